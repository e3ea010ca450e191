//! Universal series: leading factors, extraction from toric runs, assembly
//! of `A, B, C_ij` and evaluation of the full generating function.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, Exponent, PuiseuxSeries, Rational, RationalFunction};
use crate::ktheory::TorusCharacter;
use crate::linalg;
use crate::localization::{Engine, LocalizationError, Mode};
use crate::toric::{basis_matrix, chern_symbols, AbstractSurface, BasisPair, ChernSymbol, ToricError};

pub use crate::toric::d_shift;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UniversalError {
    #[error(transparent)]
    Toric(#[from] ToricError),
    #[error(transparent)]
    Localization(#[from] LocalizationError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("universal series for {0} missing")]
    MissingSymbol(String),
}

/// `[i]_y = (y^{i/2} - y^{-i/2}) / (y^{1/2} - y^{-1/2})` as a Laurent
/// polynomial in `v`.
pub fn quantum_integer(i: i64) -> RationalFunction {
    if i < 0 {
        return -quantum_integer(-i);
    }
    let terms: Vec<(i64, i64)> = (0..i).map(|k| (i - 1 - 2 * k, 1)).collect();
    RationalFunction::laurent(&terms)
}

/// `[n]! / ([k]! [n-k]!)`.
pub fn quantum_binomial(n: i64, k: i64) -> RationalFunction {
    assert!(0 <= k && k <= n, "quantum binomial needs 0 <= k <= n");
    let fact = |m: i64| (1..=m).fold(RationalFunction::one(), |acc, i| &acc * &quantum_integer(i));
    (&fact(n) / &(&fact(k) * &fact(n - k))).expect("quantum factorials are nonzero")
}

/// Multiplicity of `(t^{i+1} - t^{-i}) β^kβ^l` in the trace-free tangent of
/// a split bundle, `1 <= i <= s`, `1 <= k <= l <= s`.
pub fn mu(i: i64, k: i64, l: i64, s: i64) -> i64 {
    if k == l {
        return i.min(s - k + 1).min(k).min(s - i + 1);
    }
    if l - k <= i && i < l.min(s - k + 1) {
        -1
    } else if l.max(s - k + 1) <= i && i <= s {
        1
    } else {
        0
    }
}

/// `Σ_i (t^{i+1} - t^{-i})`: the `χ(O_S)` part of the tangent at `n = 0`.
pub fn chi_character(rank: usize) -> TorusCharacter {
    let s = rank as i64 - 1;
    let mut t = TorusCharacter::zero();
    for i in 1..=s {
        t.add_weight([0, 0, i + 1], 1);
        t.add_weight([0, 0, -i], -1);
    }
    t
}

/// `Σ_i μ(i,k,l) (t^{i+1} - t^{-i})`.
pub fn pairing_character(rank: usize, k: usize, l: usize) -> TorusCharacter {
    let s = rank as i64 - 1;
    let mut t = TorusCharacter::zero();
    for i in 1..=s {
        let m = mu(i, k as i64, l as i64, s);
        t.add_weight([0, 0, i + 1], m);
        t.add_weight([0, 0, -i], -m);
    }
    t
}

fn specialize(f: RationalFunction, mode: Mode) -> RationalFunction {
    match mode {
        Mode::Refined => f,
        Mode::Unrefined => RationalFunction::constant(f.at_y_one().expect("leading constants are regular at y = 1")),
    }
}

/// `F_0 = (-1)^s / [s+1]_y`.
pub fn f_chi(rank: usize, mode: Mode) -> RationalFunction {
    let s = rank as i64 - 1;
    let sign = if s % 2 == 0 { 1 } else { -1 };
    let f = quantum_integer(s + 1).inv().expect("nonzero").scale(&Rational::from_integer(sign.into()));
    specialize(f, mode)
}

/// `F_kk = (-1)^{sk} / qbinom(s+1, k)` and
/// `F_kl = [l][s+1-k] / ([l-k][s+1])` for `k < l`.
pub fn f_pair(rank: usize, k: usize, l: usize, mode: Mode) -> RationalFunction {
    let s = rank as i64 - 1;
    let (k, l) = (k as i64, l as i64);
    let f = if k == l {
        let sign = if (s * k) % 2 == 0 { 1 } else { -1 };
        quantum_binomial(s + 1, k).inv().expect("nonzero").scale(&Rational::from_integer(sign.into()))
    } else {
        let num = &quantum_integer(l) * &quantum_integer(s + 1 - k);
        let den = &quantum_integer(l - k) * &quantum_integer(s + 1);
        (&num / &den).expect("nonzero")
    };
    specialize(f, mode)
}

/// `F = F_0^{χ} ∏_{k<=l} F_kl^{β^kβ^l}` from `χ(O_S)` and the pairing
/// matrix of `β^1..β^s`.
pub fn leading_factor(chi: i64, pairings: &[Vec<i64>], rank: usize, mode: Mode) -> RationalFunction {
    let mut acc = f_chi(rank, mode).pow(chi).expect("nonzero");
    for k in 1..rank {
        for l in k..rank {
            let e = pairings[k - 1][l - 1];
            acc = &acc * &f_pair(rank, k, l, mode).pow(e).expect("nonzero");
        }
    }
    acc
}

/// One universal series with its symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalEntry {
    pub symbol: ChernSymbol,
    pub label: String,
    pub series: PuiseuxSeries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniversalSeriesSet {
    pub rank: usize,
    pub mode: Mode,
    /// Largest `|n|` used; every series is known modulo `q^{n_max+1}`.
    pub n_max: u32,
    pub entries: Vec<UniversalEntry>,
}

impl UniversalSeriesSet {
    pub fn get(&self, symbol: ChernSymbol) -> Result<&PuiseuxSeries, UniversalError> {
        self.entries
            .iter()
            .find(|e| e.symbol == symbol)
            .map(|e| &e.series)
            .ok_or_else(|| UniversalError::MissingSymbol(symbol.to_string()))
    }

    /// `∏ A_𝔑^{𝔑}` for a Chern-number vector in the standard column order.
    pub fn predict(&self, chern: &[i64]) -> Result<PuiseuxSeries, UniversalError> {
        let mut acc = PuiseuxSeries::one(Exponent::from_integer(self.n_max as i64 + 1));
        for (e, k) in self.entries.iter().zip(chern) {
            acc = acc.mul(&e.series.pow(*k)?);
        }
        Ok(acc)
    }
}

/// Basis data and per-basis generating series behind an extraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Extraction {
    pub basis: Vec<BasisPair>,
    pub matrix: Vec<Vec<i64>>,
    pub basis_series: Vec<PuiseuxSeries>,
    pub universal: UniversalSeriesSet,
}

/// Solve `log Z_b = Σ_𝔑 M[b][𝔑] log A_𝔑` for the `A_𝔑`.
pub fn solve_universal(
    rank: usize,
    mode: Mode,
    n_max: u32,
    matrix: &[Vec<i64>],
    basis_series: &[PuiseuxSeries],
) -> Result<UniversalSeriesSet, UniversalError> {
    let inv = linalg::inverse(&linalg::from_integers(matrix)).ok_or(ToricError::SingularBasis(rank))?;
    let logs: Vec<PuiseuxSeries> = basis_series.iter().map(PuiseuxSeries::log).collect::<Result<_, _>>()?;
    let order = Exponent::from_integer(n_max as i64 + 1);
    let mut entries = Vec::new();
    for (row, symbol) in inv.iter().zip(chern_symbols(rank)) {
        let mut acc = PuiseuxSeries::zero(order);
        for (c, l) in row.iter().zip(&logs) {
            if !c.is_zero() {
                acc = acc.add(&l.scale(&RationalFunction::constant(c.clone())));
            }
        }
        entries.push(UniversalEntry { symbol, label: symbol.to_string(), series: acc.exp()? });
    }
    Ok(UniversalSeriesSet { rank, mode, n_max, entries })
}

/// Compute every basis series with the engine and extract the `A_𝔑`.
pub fn extract_universal(
    engine: &Engine,
    rank: usize,
    n_max: u32,
    mode: Mode,
    seed: u64,
) -> Result<Extraction, UniversalError> {
    let (basis, matrix) = basis_matrix(rank)?;
    let mut basis_series = Vec::with_capacity(basis.len());
    for pair in &basis {
        let (surface, bundles) = pair.bundles();
        log::info!("computing basis series {pair} to |n| <= {n_max}");
        basis_series.push(engine.q_series(&surface, &bundles, n_max, mode, seed)?);
    }
    let universal = solve_universal(rank, mode, n_max, &matrix, &basis_series)?;
    Ok(Extraction { basis, matrix, basis_series, universal })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSeries {
    pub i: usize,
    pub j: usize,
    pub series: PuiseuxSeries,
}

/// `A, B` and the `C_ij` of the generating function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssembledSeries {
    pub rank: usize,
    pub mode: Mode,
    pub a: PuiseuxSeries,
    pub b: PuiseuxSeries,
    pub c: Vec<PairSeries>,
}

impl AssembledSeries {
    pub fn c(&self, i: usize, j: usize) -> Option<&PuiseuxSeries> {
        self.c.iter().find(|p| p.i == i && p.j == j).map(|p| &p.series)
    }
}

/// Leading `q`-exponent of `C_ij`.
pub fn c_exponent(rank: usize, i: usize, j: usize) -> Exponent {
    let (r, i, j) = (rank as i64, i as i64, j as i64);
    if i == j {
        Exponent::new(i * (i - r), 2 * r)
    } else {
        Exponent::new(i * (j - r), r)
    }
}

pub fn assemble(u: &UniversalSeriesSet) -> Result<AssembledSeries, UniversalError> {
    let r = u.rank;
    let sign = if r % 2 == 1 { 1 } else { -1 };
    let a_const = f_chi(r, u.mode).scale(&Rational::from_integer(sign.into()));
    let a = u.get(ChernSymbol::Chi)?.scale(&a_const);
    let b = u.get(ChernSymbol::KSquared)?.clone();
    let mut c = Vec::new();
    for i in 1..r {
        for j in i..r {
            let base = if i == j {
                u.get(ChernSymbol::BetaBeta(i, i))?.mul(u.get(ChernSymbol::KBeta(i))?)
            } else {
                u.get(ChernSymbol::BetaBeta(i, j))?.clone()
            };
            let series = base.scale(&f_pair(r, i, j, u.mode)).shift(c_exponent(r, i, j));
            c.push(PairSeries { i, j, series });
        }
    }
    Ok(AssembledSeries { rank: r, mode: u.mode, a, b, c })
}

/// All `(s)`-tuples over `0..m`.
fn tuples(m: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..m).map(move |x| {
                    let mut u = t.clone();
                    u.push(x);
                    u
                })
            })
            .collect();
    }
    out
}

/// `Z_{S,r,c1} = A^χ B^{K²} Σ_β SW(β^1)⋯SW(β^s) ∏_{i<=j} C_ij^{β^iβ^j}`,
/// summed over tuples of basic classes with `c1 - Σ i β^i ∈ r H²`.
pub fn evaluate_z(
    surface: &AbstractSurface,
    c1: &[i64],
    z: &AssembledSeries,
) -> Result<PuiseuxSeries, UniversalError> {
    let r = z.rank;
    let s = r - 1;
    let mut total: Option<PuiseuxSeries> = None;
    for choice in tuples(surface.basic_classes.len(), s) {
        let betas: Vec<&Vec<i64>> = choice.iter().map(|&k| &surface.basic_classes[k].0).collect();
        let admissible = (0..c1.len()).all(|d| {
            let x = c1[d] - betas.iter().enumerate().map(|(i, b)| (i as i64 + 1) * b[d]).sum::<i64>();
            x.rem_euclid(r as i64) == 0
        });
        if !admissible {
            continue;
        }
        let sw: i64 = choice.iter().map(|&k| surface.basic_classes[k].1).product();
        if sw == 0 {
            continue;
        }
        let mut term: Option<PuiseuxSeries> = None;
        for i in 1..=s {
            for j in i..=s {
                let e = surface.dot(betas[i - 1], betas[j - 1]);
                let factor = z.c(i, j).ok_or_else(|| UniversalError::MissingSymbol(format!("C{i}{j}")))?.pow(e)?;
                term = Some(match term {
                    None => factor,
                    Some(t) => t.mul(&factor),
                });
            }
        }
        let term = term
            .unwrap_or_else(|| PuiseuxSeries::one(z.a.order() - z.a.valuation().unwrap_or_default()))
            .scale(&RationalFunction::from_int(sw));
        total = Some(match total {
            None => term,
            Some(t) => t.add(&term),
        });
    }
    let Some(sum) = total else {
        log::warn!("no tuple of basic classes satisfies the congruence on c1");
        return Ok(PuiseuxSeries::zero(z.a.order()));
    };
    let front = z.a.pow(surface.chi)?.mul(&z.b.pow(surface.k_squared())?);
    Ok(front.mul(&sum))
}
