//! Atiyah-Bott evaluation of `Q_n(S, β)` and `Q_n(S, β, y)`.
//!
//! The integrals live on a compact space but their integrands only become
//! polynomial after summing over fixed points, and the summed equivariant
//! value still depends on the surface-torus parameters. The invariant is its
//! nonequivariant value. We restrict the surface parameters to a ray
//! `s = ε (a, b)` through the origin, expand every fixed-point contribution
//! as a Laurent series in `ε` and keep the constant term of the sum.
//!
//! Refined values keep `y = v^2` symbolic by sampling rational `v` and
//! rebuilding the answer with Thiele interpolation.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::{Cache, CacheError};
use crate::exact::reconstruct::{reconstruct_even, ReconstructOptions};
use crate::exact::{ExactError, Exponent, PuiseuxSeries, Rational, RationalFunction};
use crate::hilb::FixedPointSpace;
use crate::ktheory::{virtual_tangent, TorusCharacter};
use crate::toric::{BundleTuple, SurfaceKind, ToricSurface};

/// Attempts before a vanishing linear form is reported.
pub const MAX_DRAWS: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizationError {
    #[error("a weight vanished under the specialization")]
    ZeroWeight,
    #[error("the trivial weight occurs with positive multiplicity {0}: the integrand has a pole")]
    TrivialWeightPole(i64),
    #[error("every one of {0} specializations hit a vanishing weight")]
    RedrawExhausted(u32),
    #[error("bundle tuple has rank {got}, sizes have length {expected}")]
    RankMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Cache(#[from] CacheError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unrefined,
    Refined,
}

impl Mode {
    pub fn id(self) -> &'static str {
        match self {
            Mode::Unrefined => "unrefined",
            Mode::Refined => "refined",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unrefined" => Ok(Mode::Unrefined),
            "refined" => Ok(Mode::Refined),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

/// Exact values for the surface-torus parameters.
///
/// `params` is a generic point, used by the per-fixed-point evaluators:
/// additive weights `(s1, s2)` in unrefined mode, square roots `(e1, e2)` of
/// the multiplicative characters in refined mode. `direction` is the integer
/// ray along which the nonequivariant limit is taken.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specialization {
    pub mode: Mode,
    pub seed: u64,
    pub params: [Rational; 2],
    pub direction: [i64; 2],
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let n: i64 = rng.gen_range(-97..=97);
        let d: i64 = rng.gen_range(1..=53);
        let x = Rational::new(n.into(), d.into());
        if !x.is_zero() && x.abs() != Rational::one() {
            return x;
        }
    }
}

impl Specialization {
    pub fn draw(mode: Mode, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = small_rational(&mut rng);
        let mut b = small_rational(&mut rng);
        while b == a || b == -a.clone() {
            b = small_rational(&mut rng);
        }
        let mut direction = [0, 0];
        while direction[0] == 0 || direction[1] == 0 || direction[0].abs() == direction[1].abs() {
            direction = [rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000)];
        }
        Specialization { mode, seed, params: [a, b], direction }
    }

    /// Next specialization in the redraw chain.
    pub fn redraw(&self) -> Self {
        Specialization::draw(self.mode, self.seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407))
    }

    fn half_power(&self, a: i64, b: i64) -> Rational {
        pow_i(&self.params[0], a) * pow_i(&self.params[1], b)
    }

    fn ray(&self, a: i64, b: i64) -> i64 {
        a * self.direction[0] + b * self.direction[1]
    }
}

fn pow_i(x: &Rational, k: i64) -> Rational {
    if k >= 0 {
        num_traits::pow(x.clone(), k as usize)
    } else {
        num_traits::pow(x.recip(), (-k) as usize)
    }
}

/// Raw fraction kept unreduced while multiplying many factors.
struct Fraction {
    num: BigInt,
    den: BigInt,
}

impl Fraction {
    fn one() -> Self {
        Fraction { num: BigInt::one(), den: BigInt::one() }
    }

    fn mul_pow(&mut self, x: &Rational, mult: i64) {
        let (n, d) = if mult > 0 { (x.numer(), x.denom()) } else { (x.denom(), x.numer()) };
        for _ in 0..mult.unsigned_abs() {
            self.num *= n;
            self.den *= d;
        }
    }

    fn finish(self) -> Rational {
        Rational::new(self.num, self.den)
    }
}

/// `false` if the trivial weight forces a zero contribution.
fn check_trivial(t: &TorusCharacter) -> Result<bool, LocalizationError> {
    match t.multiplicity([0, 0, 0]) {
        0 => Ok(true),
        m if m < 0 => Ok(false),
        m => Err(LocalizationError::TrivialWeightPole(m)),
    }
}

/// `e(-T) = ∏ (a s1 + b s2 + c)^{-mult}` at the generic point.
pub fn euler_contribution(t: &TorusCharacter, spec: &Specialization) -> Result<Rational, LocalizationError> {
    let [s1, s2] = &spec.params;
    let mut acc = Fraction::one();
    for (w, m) in t.terms() {
        if *w == [0, 0, 0] {
            continue;
        }
        let val = s1 * Rational::from_integer(w[0].into())
            + s2 * Rational::from_integer(w[1].into())
            + Rational::from_integer(w[2].into());
        if val.is_zero() {
            return Err(LocalizationError::ZeroWeight);
        }
        acc.mul_pow(&val, -m);
    }
    Ok(if check_trivial(t)? { acc.finish() } else { Rational::zero() })
}

/// `∏ (x^{1/2} - x^{-1/2})^{-mult}` at the generic point, as a rational
/// function of `v`.
pub fn refined_contribution(t: &TorusCharacter, spec: &Specialization) -> Result<RationalFunction, LocalizationError> {
    let mut acc = RationalFunction::one();
    for (w, m) in t.terms() {
        if *w == [0, 0, 0] {
            continue;
        }
        let alpha = spec.half_power(w[0], w[1]);
        if w[2] == 0 && alpha.abs().is_one() {
            return Err(LocalizationError::ZeroWeight);
        }
        let a = RationalFunction::monomial(alpha.clone(), w[2]);
        let b = RationalFunction::monomial(alpha.recip(), -w[2]);
        acc = &acc * &(&a - &b).pow(-m)?;
    }
    Ok(if check_trivial(t)? { acc } else { RationalFunction::zero() })
}

/// Truncated power series helpers on `Vec<Rational>`, all of one length.
mod series {
    use super::Rational;
    use num_traits::{One, Zero};

    /// `log(f / f_0)` for `f_0 != 0`.
    pub fn log_unit(f: &[Rational]) -> Vec<Rational> {
        let n = f.len();
        let g: Vec<Rational> = f.iter().map(|c| c / &f[0]).collect();
        let mut l = vec![Rational::zero(); n];
        for k in 1..n {
            let mut acc = g[k].clone();
            for j in 1..k {
                acc -= Rational::new(j.into(), k.into()) * &l[j] * &g[k - j];
            }
            l[k] = acc;
        }
        l
    }

    /// `exp(l)` for `l_0 = 0`.
    pub fn exp(l: &[Rational]) -> Vec<Rational> {
        let n = l.len();
        let mut e = vec![Rational::zero(); n];
        if n == 0 {
            return e;
        }
        e[0] = Rational::one();
        for k in 1..n {
            let mut acc = Rational::zero();
            for j in 1..=k {
                acc += Rational::from_integer(j.into()) * &l[j] * &e[k - j];
            }
            e[k] = acc / Rational::from_integer(k.into());
        }
        e
    }

    /// Coefficients of `log(sinh x / x)` up to `x^{n-1}`.
    pub fn log_sinhc(n: usize) -> Vec<Rational> {
        let mut f = vec![Rational::zero(); n];
        let mut fact = Rational::one();
        for k in 0..n {
            if k > 0 {
                fact *= Rational::from_integer(k.into());
            }
            if k % 2 == 0 {
                // sinh x / x = Σ x^{2j} / (2j+1)!
                f[k] = (fact.clone() * Rational::from_integer((k + 1).into())).recip();
            }
        }
        log_unit(&f)
    }

    /// Coefficients of `log((u e^x - u^{-1} e^{-x}) / (u - u^{-1}))`.
    pub fn log_shifted_sinh(u: &Rational, n: usize) -> Vec<Rational> {
        let inv = u.recip();
        let mut f = Vec::with_capacity(n);
        let mut fact = Rational::one();
        for k in 0..n {
            if k > 0 {
                fact *= Rational::from_integer(k.into());
            }
            let c = if k % 2 == 0 { u - &inv } else { u + &inv };
            f.push(c / &fact);
        }
        log_unit(&f)
    }
}

/// A fixed-point contribution restricted to the ray `s = ε (a, b)`, grouped
/// by the pair `(ℓ, c)` of ray slope and Higgs exponent.
#[derive(Debug, Clone)]
enum RayProfile {
    /// Vanishes identically or has no `ε^0` term.
    Zero,
    Terms {
        /// Power of `ε^{-1}` contributed by the fixed weights.
        pole: usize,
        fixed: Vec<(i64, i64)>,
        moving: Vec<(i64, i64, i64)>,
    },
}

fn ray_profile(t: &TorusCharacter, spec: &Specialization) -> Result<RayProfile, LocalizationError> {
    if !check_trivial(t)? {
        return Ok(RayProfile::Zero);
    }
    let mut fixed: BTreeMap<i64, i64> = BTreeMap::new();
    let mut moving: BTreeMap<(i64, i64), i64> = BTreeMap::new();
    for (w, m) in t.terms() {
        if *w == [0, 0, 0] {
            continue;
        }
        let l = spec.ray(w[0], w[1]);
        if w[2] == 0 {
            if l == 0 {
                return Err(LocalizationError::ZeroWeight);
            }
            *fixed.entry(l).or_insert(0) += m;
        } else {
            *moving.entry((l, w[2])).or_insert(0) += m;
        }
    }
    let pole: i64 = fixed.values().sum();
    if pole < 0 {
        return Ok(RayProfile::Zero);
    }
    Ok(RayProfile::Terms {
        pole: pole as usize,
        fixed: fixed.into_iter().filter(|(_, m)| *m != 0).collect(),
        moving: moving.into_iter().filter(|(_, m)| *m != 0).map(|((l, c), m)| (l, c, m)).collect(),
    })
}

impl RayProfile {
    /// Constant term in `ε` of `∏ (c + ℓε)^{-mult}`.
    fn unrefined_limit(&self) -> Rational {
        let RayProfile::Terms { pole, fixed, moving } = self else {
            return Rational::zero();
        };
        let n = pole + 1;
        let mut scale = Fraction::one();
        let mut log = vec![Rational::zero(); n];
        for (l, m) in fixed {
            scale.mul_pow(&Rational::from_integer((*l).into()), -m);
        }
        for (l, c, m) in moving {
            let c = Rational::from_integer((*c).into());
            scale.mul_pow(&c, -m);
            // -m log(1 + (ℓ/c) ε)
            let ratio = Rational::from_integer((*l).into()) / &c;
            let mut p = Rational::one();
            for (j, slot) in log.iter_mut().enumerate().skip(1) {
                p *= &ratio;
                let sign = if j % 2 == 1 { 1 } else { -1 };
                *slot += Rational::new((-m * sign).into(), (j as i64).into()) * &p;
            }
        }
        scale.finish() * &series::exp(&log)[*pole]
    }

    /// Constant term in `ε` of `∏ (v^c e^{ℓε} - v^{-c} e^{-ℓε})^{-mult}`,
    /// or `None` if a moving factor vanishes at this `v`.
    fn refined_limit(&self, v: &Rational, sinhc: &[Rational]) -> Option<Rational> {
        let RayProfile::Terms { pole, fixed, moving } = self else {
            return Some(Rational::zero());
        };
        let n = pole + 1;
        let mut scale = Fraction::one();
        let mut log = vec![Rational::zero(); n];
        let add_scaled = |log: &mut Vec<Rational>, base: &[Rational], l: i64, m: i64| {
            let lr = Rational::from_integer(l.into());
            let mut p = Rational::one();
            for (j, slot) in log.iter_mut().enumerate().skip(1) {
                p *= &lr;
                if !base[j].is_zero() {
                    *slot -= Rational::from_integer(m.into()) * &base[j] * &p;
                }
            }
        };
        for (l, m) in fixed {
            scale.mul_pow(&Rational::from_integer((2 * l).into()), -m);
            add_scaled(&mut log, &sinhc[..n], *l, *m);
        }
        let mut by_c: BTreeMap<i64, Vec<Rational>> = BTreeMap::new();
        for (l, c, m) in moving {
            let u = pow_i(v, *c);
            let lead = &u - u.recip();
            if lead.is_zero() {
                return None;
            }
            scale.mul_pow(&lead, -m);
            let base = by_c.entry(*c).or_insert_with(|| series::log_shifted_sinh(&u, n));
            add_scaled(&mut log, base, *l, *m);
        }
        Some(scale.finish() * &series::exp(&log)[*pole])
    }
}

/// One computed `Q_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QResult {
    pub surface: SurfaceKind,
    pub bundles: BundleTuple,
    pub n: Vec<u32>,
    pub mode: Mode,
    pub seed: u64,
    /// Unrefined values are stored as constants.
    pub value: RationalFunction,
}

impl QResult {
    pub fn unrefined(&self) -> Option<Rational> {
        match self.mode {
            Mode::Unrefined => self.value.as_constant(),
            Mode::Refined => None,
        }
    }
}

/// Evaluation context: worker policy and optional cache.
#[derive(Clone)]
pub struct Engine {
    workers: usize,
    pool: Option<Arc<rayon::ThreadPool>>,
    cache: Option<Cache>,
    reconstruct: ReconstructOptions,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(0)
    }
}

impl Engine {
    /// `workers == 1` runs the serial reference path, `0` uses the global
    /// rayon pool, larger values a dedicated pool.
    pub fn new(workers: usize) -> Self {
        let pool = (workers > 1)
            .then(|| rayon::ThreadPoolBuilder::new().num_threads(workers).build().ok().map(Arc::new))
            .flatten();
        Engine { workers, pool, cache: None, reconstruct: ReconstructOptions { max_samples: 2000, ..Default::default() } }
    }

    pub fn with_cache(mut self, cache: Option<Cache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn cache(&self) -> Option<&Cache> {
        self.cache.as_ref()
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    fn sum_over<F>(&self, len: usize, f: F) -> Option<Rational>
    where
        F: Fn(usize) -> Option<Rational> + Sync + Send,
    {
        let add = |a: Option<Rational>, b: Option<Rational>| Some(a? + b?);
        if self.workers == 1 {
            return (0..len).map(&f).fold(Some(Rational::zero()), add);
        }
        let run = || (0..len).into_par_iter().map(&f).reduce(|| Some(Rational::zero()), add);
        match &self.pool {
            Some(p) => p.install(run),
            None => run(),
        }
    }

    fn map_over<T, F>(&self, len: usize, f: F) -> Result<Vec<T>, LocalizationError>
    where
        T: Send,
        F: Fn(usize) -> Result<T, LocalizationError> + Sync + Send,
    {
        if self.workers == 1 {
            return (0..len).map(f).collect();
        }
        let run = || (0..len).into_par_iter().map(&f).collect();
        match &self.pool {
            Some(p) => p.install(run),
            None => run(),
        }
    }

    /// `Q_n` without consulting the cache.
    pub fn compute_q_uncached(
        &self,
        surface: &ToricSurface,
        l: &BundleTuple,
        n: &[u32],
        mode: Mode,
        seed: u64,
    ) -> Result<QResult, LocalizationError> {
        if l.rank() != n.len() {
            return Err(LocalizationError::RankMismatch { got: l.rank(), expected: n.len() });
        }
        let space = FixedPointSpace::new(surface.euler_number(), n);
        let mut spec = Specialization::draw(mode, seed);
        for _ in 0..MAX_DRAWS {
            let profiles =
                self.map_over(space.len(), |i| ray_profile(&virtual_tangent(surface, l, &space.get(i)), &spec));
            match profiles {
                Ok(profiles) => {
                    let value = self.sum_profiles(&profiles, mode, spec.seed)?;
                    return Ok(QResult {
                        surface: surface.kind,
                        bundles: l.clone(),
                        n: n.to_vec(),
                        mode,
                        seed: spec.seed,
                        value,
                    });
                }
                Err(LocalizationError::ZeroWeight) => {
                    log::debug!("vanishing weight under seed {}, redrawing", spec.seed);
                    spec = spec.redraw();
                }
                Err(e) => return Err(e),
            }
        }
        Err(LocalizationError::RedrawExhausted(MAX_DRAWS))
    }

    fn sum_profiles(&self, profiles: &[RayProfile], mode: Mode, seed: u64) -> Result<RationalFunction, LocalizationError> {
        match mode {
            Mode::Unrefined => {
                let total = self.sum_over(profiles.len(), |i| Some(profiles[i].unrefined_limit()));
                Ok(RationalFunction::constant(total.expect("unrefined limits never skip")))
            }
            Mode::Refined => {
                let max_pole = profiles
                    .iter()
                    .map(|p| match p {
                        RayProfile::Terms { pole, .. } => *pole,
                        RayProfile::Zero => 0,
                    })
                    .max()
                    .unwrap_or(0);
                let sinhc = series::log_sinhc(max_pole + 1);
                let opts = ReconstructOptions { seed: seed ^ 0x9e37_79b9_7f4a_7c15, ..self.reconstruct.clone() };
                let f = |v: &Rational| -> Option<Rational> {
                    if v.is_zero() || v.abs().is_one() {
                        return None;
                    }
                    self.sum_over(profiles.len(), |i| profiles[i].refined_limit(v, &sinhc))
                };
                Ok(reconstruct_even(f, &opts)?)
            }
        }
    }

    /// `Q_n`, served from the cache when present.
    pub fn compute_q(
        &self,
        surface: &ToricSurface,
        l: &BundleTuple,
        n: &[u32],
        mode: Mode,
        seed: u64,
    ) -> Result<QResult, LocalizationError> {
        if let Some(cache) = &self.cache {
            if let Some(hit) = cache.get(surface.kind, l, n, mode)? {
                return Ok(hit);
            }
            let res = self.compute_q_uncached(surface, l, n, mode, seed)?;
            cache.put(&res)?;
            return Ok(res);
        }
        self.compute_q_uncached(surface, l, n, mode, seed)
    }

    /// `Σ_{|n| <= n_max} Q_n q^{|n|}` with truncation order `n_max + 1`.
    pub fn q_series(
        &self,
        surface: &ToricSurface,
        l: &BundleTuple,
        n_max: u32,
        mode: Mode,
        seed: u64,
    ) -> Result<PuiseuxSeries, LocalizationError> {
        let mut s = PuiseuxSeries::zero(Exponent::from_integer(n_max as i64 + 1));
        for n in size_tuples(l.rank(), n_max) {
            let q = self.compute_q(surface, l, &n, mode, seed)?;
            let total: u32 = n.iter().sum();
            s.add_term(Exponent::from_integer(total as i64), q.value);
        }
        Ok(s)
    }
}

/// All `n ∈ Z_{>=0}^r` with `|n| <= n_max`, by total then lexicographically.
pub fn size_tuples(r: usize, n_max: u32) -> Vec<Vec<u32>> {
    fn rec(r: usize, rest: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if r == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for k in 0..=rest {
            prefix.push(k);
            rec(r - 1, rest - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for total in 0..=n_max {
        rec(r, total, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};
    use crate::toric::SurfaceKind;

    fn higgs(i: i64) -> TorusCharacter {
        TorusCharacter::from_terms([([0, 0, i + 1], 1), ([0, 0, -i], -1)])
    }

    #[test]
    fn empty_character_contributes_one() {
        let u = Specialization::draw(Mode::Unrefined, 1);
        assert_eq!(euler_contribution(&TorusCharacter::zero(), &u).unwrap(), int(1));
        let r = Specialization::draw(Mode::Refined, 1);
        assert_eq!(refined_contribution(&TorusCharacter::zero(), &r).unwrap(), RationalFunction::one());
    }

    #[test]
    fn single_higgs_pair() {
        let u = Specialization::draw(Mode::Unrefined, 3);
        let r = Specialization::draw(Mode::Refined, 3);
        let mut sum = TorusCharacter::zero();
        for i in 1..=4 {
            assert_eq!(euler_contribution(&higgs(i), &u).unwrap(), rational(-i, i + 1));
            sum = &sum + &higgs(i);
            let sign = if i % 2 == 0 { 1 } else { -1 };
            assert_eq!(euler_contribution(&sum, &u).unwrap(), rational(sign, i + 1));
            // -[i]/[i+1]
            let qi = RationalFunction::laurent(&[(i, 1), (-i, -1)]);
            let qi1 = RationalFunction::laurent(&[(i + 1, 1), (-i - 1, -1)]);
            let expected = -(&qi / &qi1).unwrap();
            assert_eq!(refined_contribution(&higgs(i), &r).unwrap(), expected);
        }
    }

    #[test]
    fn trivial_weight_handling() {
        let u = Specialization::draw(Mode::Unrefined, 5);
        let vanishing = TorusCharacter::from_terms([([0, 0, 0], -1), ([1, 0, 0], 1)]);
        assert_eq!(euler_contribution(&vanishing, &u).unwrap(), int(0));
        let pole = TorusCharacter::from_terms([([0, 0, 0], 1)]);
        assert_eq!(euler_contribution(&pole, &u), Err(LocalizationError::TrivialWeightPole(1)));
    }

    #[test]
    fn accidental_zero_is_reported() {
        let mut u = Specialization::draw(Mode::Unrefined, 5);
        u.params = [int(2), int(3)];
        let t = TorusCharacter::from_terms([([3, -2, 0], 1)]);
        assert_eq!(euler_contribution(&t, &u), Err(LocalizationError::ZeroWeight));
        u.direction = [2, 3];
        assert!(matches!(ray_profile(&t, &u), Err(LocalizationError::ZeroWeight)));
    }

    #[test]
    fn series_helpers() {
        let f: Vec<Rational> = [1, 2, 3, 4, 5].iter().map(|&x| int(x)).collect();
        let back = series::exp(&series::log_unit(&f));
        assert_eq!(back, f);
        // log(sinh x / x) = x^2/6 - x^4/180 + ...
        let s = series::log_sinhc(5);
        assert_eq!(s, vec![int(0), int(0), rational(1, 6), int(0), rational(-1, 180)]);
    }

    #[test]
    fn ray_limit_matches_a_polynomial_integrand() {
        // Σ over the fixed points of P^2 of c1(O(1))^2 / e(T) along the ray
        // is exactly 1.
        let s = ToricSurface::new(SurfaceKind::P2);
        let spec = Specialization::draw(Mode::Unrefined, 9);
        let hyperplane = crate::toric::EquivariantLineBundle::from_class(&s, &[1]);
        let mut total = Rational::zero();
        for (sigma, [w1, w2]) in s.charts.iter().enumerate() {
            let h = hyperplane.weight(sigma);
            // Two copies of the weight of O(1) in the numerator as a class
            // with c = 0: mult -2 of the same weight, plus the tangent.
            let mut t = TorusCharacter::from_terms([([w1[0], w1[1], 0], 1), ([w2[0], w2[1], 0], 1)]);
            if h != [0, 0] {
                t.add_weight([h[0], h[1], 0], -2);
                total += ray_profile(&t, &spec).unwrap().unrefined_limit();
            }
        }
        assert_eq!(total, int(1));
    }

    #[test]
    fn zero_sizes_give_one() {
        let engine = Engine::new(1);
        for kind in [SurfaceKind::P2, SurfaceKind::P1xP1] {
            let s = ToricSurface::new(kind);
            let l = BundleTuple::lift(&s, std::slice::from_ref(&s.canonical));
            for mode in [Mode::Unrefined, Mode::Refined] {
                let q = engine.compute_q(&s, &l, &[0, 0], mode, 11).unwrap();
                assert!(q.value.is_one());
            }
        }
    }

    #[test]
    fn size_tuple_enumeration() {
        assert_eq!(size_tuples(3, 3).len(), 20);
        assert_eq!(size_tuples(1, 2), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(size_tuples(2, 1), vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
    }
}
