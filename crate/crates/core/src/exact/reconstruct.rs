//! Recover a univariate rational function from exact samples with Thiele
//! continued-fraction interpolation.
//!
//! Points are drawn from a seeded stream of small rationals. Samples where
//! the black box reports `None` (a vanishing factor) are skipped. The
//! interpolant is accepted once `agree` consecutive fresh samples match it,
//! then checked against `verify` further samples.

use std::collections::HashSet;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ExactError, Poly, Rational, RationalFunction};

#[derive(Debug, Clone)]
pub struct ReconstructOptions {
    pub seed: u64,
    pub max_samples: usize,
    pub agree: usize,
    pub verify: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { seed: 0x5eed, max_samples: 600, agree: 3, verify: 2 }
    }
}

/// Deterministic stream of pairwise distinct sample points.
pub struct SamplePoints {
    rng: ChaCha8Rng,
    seen: HashSet<Rational>,
}

impl SamplePoints {
    pub fn new(seed: u64) -> Self {
        SamplePoints { rng: ChaCha8Rng::seed_from_u64(seed), seen: HashSet::new() }
    }
}

impl Iterator for SamplePoints {
    type Item = Rational;
    fn next(&mut self) -> Option<Rational> {
        loop {
            let n: i64 = self.rng.gen_range(-2000..=2000);
            let d: i64 = self.rng.gen_range(1..=101);
            let x = Rational::new(n.into(), d.into());
            if self.seen.insert(x.clone()) {
                return Some(x);
            }
        }
    }
}

/// Continued fraction `a0 + (x - x0) / (a1 + (x - x1) / (a2 + ...))`.
#[derive(Debug, Default)]
struct Thiele {
    nodes: Vec<Rational>,
    coeffs: Vec<Rational>,
}

impl Thiele {
    /// `None` if the evaluation runs into a zero denominator.
    fn eval(&self, x: &Rational) -> Option<Rational> {
        let n = self.coeffs.len();
        let mut acc = self.coeffs.last()?.clone();
        for k in (0..n - 1).rev() {
            if acc.is_zero() {
                return None;
            }
            acc = &self.coeffs[k] + (x - &self.nodes[k]) / acc;
        }
        Some(acc)
    }

    /// Appends a node through inverse differences. Returns false if the
    /// point is degenerate for the current fraction.
    fn push(&mut self, x: Rational, fx: Rational) -> bool {
        let mut p = fx;
        for k in 0..self.coeffs.len() {
            let diff = &p - &self.coeffs[k];
            if diff.is_zero() {
                return false;
            }
            p = (&x - &self.nodes[k]) / diff;
        }
        self.nodes.push(x);
        self.coeffs.push(p);
        true
    }

    fn to_function(&self) -> Result<RationalFunction, ExactError> {
        let n = self.coeffs.len();
        let Some(last) = self.coeffs.last() else {
            return Ok(RationalFunction::zero());
        };
        let mut acc = RationalFunction::constant(last.clone());
        let v = RationalFunction::v();
        for k in (0..n - 1).rev() {
            let lin = &v - &RationalFunction::constant(self.nodes[k].clone());
            acc = &RationalFunction::constant(self.coeffs[k].clone()) + &(&lin / &acc)?;
        }
        Ok(acc)
    }
}

/// Reconstructs `f` as an element of `Q(v)`.
pub fn reconstruct<F>(mut f: F, opts: &ReconstructOptions) -> Result<RationalFunction, ExactError>
where
    F: FnMut(&Rational) -> Option<Rational>,
{
    let points = SamplePoints::new(opts.seed);
    let samples = points.filter_map(|x| f(&x).map(|fx| (x, fx)));
    interpolate(samples, opts)
}

/// Reconstructs an `f` known to be a rational function of `v^2`, sampling
/// at `v` and interpolating in `y = v^2`.
pub fn reconstruct_even<F>(mut f: F, opts: &ReconstructOptions) -> Result<RationalFunction, ExactError>
where
    F: FnMut(&Rational) -> Option<Rational>,
{
    let mut seen = HashSet::new();
    let points = SamplePoints::new(opts.seed).filter(move |v| seen.insert(v * v));
    let samples = points.filter_map(|v| f(&v).map(|fv| (&v * &v, fv)));
    let in_y = interpolate(samples, opts)?;
    let spread = |p: &Poly| {
        let mut c = vec![Rational::zero(); 2 * p.coeffs().len()];
        for (k, x) in p.coeffs().iter().enumerate() {
            c[2 * k] = x.clone();
        }
        Poly::from_coeffs(c)
    };
    RationalFunction::new(spread(in_y.numer()), spread(in_y.denom()))
}

fn interpolate<I>(mut samples: I, opts: &ReconstructOptions) -> Result<RationalFunction, ExactError>
where
    I: Iterator<Item = (Rational, Rational)>,
{
    let mut cf = Thiele::default();
    let mut streak = 0;
    let mut used = 0;
    while streak < opts.agree {
        if used >= opts.max_samples {
            return Err(ExactError::ReconstructionFailed(used));
        }
        let (x, fx) = samples.next().ok_or(ExactError::ReconstructionFailed(used))?;
        used += 1;
        if !cf.coeffs.is_empty() && cf.eval(&x).as_ref() == Some(&fx) {
            streak += 1;
            continue;
        }
        streak = 0;
        cf.push(x, fx);
    }
    let candidate = cf.to_function()?;
    let mut checked = 0;
    while checked < opts.verify {
        let (x, fx) = samples.next().ok_or(ExactError::ReconstructionFailed(used))?;
        match candidate.eval(&x) {
            Ok(val) if val == fx => checked += 1,
            Err(ExactError::PoleAtValue) => continue,
            _ => return Err(ExactError::ReconstructionFailed(used + checked)),
        }
    }
    Ok(candidate)
}
