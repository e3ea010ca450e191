//! Toric surfaces, equivariant line bundles and the Chern-number
//! bookkeeping behind the extraction matrix.
//!
//! Chart weights are the characters of the two coordinate functions on the
//! affine chart. A line bundle is linearized by the character `m` of its
//! local generator on each chart, so sections on chart `σ` have characters
//! `m_σ + a w_1 + b w_2` for `a, b >= 0`.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ExactError, Rational, RationalFunction};
use crate::linalg;

pub type Weight = [i64; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("unsupported surface {0:?} (expected p2 or p1xp1)")]
    UnsupportedSurface(String),
    #[error("no invertible basis found for rank {0}")]
    SingularBasis(usize),
    #[error("bundle tuple has the wrong length")]
    RankMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SurfaceKind {
    #[serde(rename = "p2")]
    P2,
    #[serde(rename = "p1xp1")]
    P1xP1,
}

impl SurfaceKind {
    pub fn id(self) -> &'static str {
        match self {
            SurfaceKind::P2 => "p2",
            SurfaceKind::P1xP1 => "p1xp1",
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for SurfaceKind {
    type Err = ToricError;
    fn from_str(s: &str) -> Result<Self, ToricError> {
        match s.to_ascii_lowercase().as_str() {
            "p2" | "P2" => Ok(SurfaceKind::P2),
            "p1xp1" | "p1p1" => Ok(SurfaceKind::P1xP1),
            _ => Err(ToricError::UnsupportedSurface(s.to_string())),
        }
    }
}

/// A divisor class in the Picard lattice, as coordinates in the surface's
/// chosen generators.
pub type DivisorClass = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricSurface {
    pub kind: SurfaceKind,
    /// Coordinate-function weights `(w1, w2)` per chart.
    pub charts: Vec<[Weight; 2]>,
    /// `generator_weights[σ][k]`: character of the local generator of the
    /// `k`-th Picard generator on chart `σ` (standard linearization).
    pub generator_weights: Vec<Vec<Weight>>,
    pub intersection: Vec<Vec<i64>>,
    pub canonical: DivisorClass,
    pub chi: i64,
}

fn add(a: Weight, b: Weight) -> Weight {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(k: i64, a: Weight) -> Weight {
    [k * a[0], k * a[1]]
}

impl ToricSurface {
    pub fn new(kind: SurfaceKind) -> Self {
        match kind {
            SurfaceKind::P2 => ToricSurface {
                kind,
                charts: vec![[[1, 0], [0, 1]], [[-1, 0], [-1, 1]], [[0, -1], [1, -1]]],
                generator_weights: vec![vec![[0, 0]], vec![[1, 0]], vec![[0, 1]]],
                intersection: vec![vec![1]],
                canonical: vec![-3],
                chi: 1,
            },
            SurfaceKind::P1xP1 => {
                // Chart (a, b): x_a and z_b nonvanishing; x1 and z1 carry
                // the characters (1,0) and (0,1).
                let mut charts = Vec::new();
                let mut gens = Vec::new();
                for a in 0..2 {
                    for b in 0..2 {
                        let wx = if a == 0 { [1, 0] } else { [-1, 0] };
                        let wz = if b == 0 { [0, 1] } else { [0, -1] };
                        charts.push([wx, wz]);
                        gens.push(vec![[a, 0], [0, b]]);
                    }
                }
                ToricSurface {
                    kind,
                    charts,
                    generator_weights: gens,
                    intersection: vec![vec![0, 1], vec![1, 0]],
                    canonical: vec![-2, -2],
                    chi: 1,
                }
            }
        }
    }

    pub fn from_name(name: &str) -> Result<Self, ToricError> {
        Ok(ToricSurface::new(name.parse()?))
    }

    /// Coordinate-function weights of every chart.
    pub fn chart_weights(&self) -> &[[Weight; 2]] {
        &self.charts
    }

    pub fn euler_number(&self) -> usize {
        self.charts.len()
    }

    pub fn picard_rank(&self) -> usize {
        self.intersection.len()
    }

    pub fn dot(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut s = 0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                s += x * y * self.intersection[i][j];
            }
        }
        s
    }

    pub fn k_squared(&self) -> i64 {
        self.dot(&self.canonical, &self.canonical)
    }

    /// Charts `σ, τ` are joined by an invariant curve iff exactly one weight
    /// of `τ` is the negative of a weight of `σ`. Returns the index in `σ`
    /// of the inverted weight.
    pub fn shared_wall(&self, sigma: usize, tau: usize) -> Option<usize> {
        let s = self.charts[sigma];
        let t = self.charts[tau];
        let hits: Vec<usize> = (0..2).filter(|&i| t.contains(&scale(-1, s[i]))).collect();
        (hits.len() == 1).then(|| hits[0])
    }

    /// Class of the invariant curve joining two adjacent charts.
    pub fn wall_curve(&self, sigma: usize, tau: usize) -> Option<DivisorClass> {
        let w = self.shared_wall(sigma, tau)?;
        Some(match self.kind {
            SurfaceKind::P2 => vec![1],
            // The curve moves along the inverted coordinate: x-direction
            // curves are fibres {z = const} of class (0,1).
            SurfaceKind::P1xP1 => {
                if self.charts[sigma][w][0] != 0 {
                    vec![0, 1]
                } else {
                    vec![1, 0]
                }
            }
        })
    }

    /// Sheaf Euler characteristic from Riemann-Roch.
    pub fn riemann_roch(&self, class: &[i64]) -> i64 {
        let diff: Vec<i64> = class.iter().zip(&self.canonical).map(|(a, k)| a - k).collect();
        self.chi + self.dot(class, &diff) / 2
    }
}

/// An equivariant line bundle: divisor class plus per-chart generator
/// characters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EquivariantLineBundle {
    pub class: DivisorClass,
    pub weights: Vec<Weight>,
}

impl EquivariantLineBundle {
    pub fn trivial(s: &ToricSurface) -> Self {
        EquivariantLineBundle { class: vec![0; s.picard_rank()], weights: vec![[0, 0]; s.euler_number()] }
    }

    /// Standard linearization of the class.
    pub fn from_class(s: &ToricSurface, class: &[i64]) -> Self {
        let weights = s
            .generator_weights
            .iter()
            .map(|g| g.iter().zip(class).fold([0, 0], |acc, (w, d)| add(acc, scale(*d, *w))))
            .collect();
        EquivariantLineBundle { class: class.to_vec(), weights }
    }

    /// Canonical bundle `ω_S = Λ² Ω`, whose generator `dx∧dy` on each chart
    /// has character `w1 + w2`.
    pub fn canonical(s: &ToricSurface) -> Self {
        EquivariantLineBundle {
            class: s.canonical.clone(),
            weights: s.charts.iter().map(|[a, b]| add(*a, *b)).collect(),
        }
    }

    pub fn weight(&self, chart: usize) -> Weight {
        self.weights[chart]
    }

    pub fn tensor(&self, other: &Self) -> Self {
        EquivariantLineBundle {
            class: self.class.iter().zip(&other.class).map(|(a, b)| a + b).collect(),
            weights: self.weights.iter().zip(&other.weights).map(|(a, b)| add(*a, *b)).collect(),
        }
    }

    pub fn dual(&self) -> Self {
        EquivariantLineBundle {
            class: self.class.iter().map(|a| -a).collect(),
            weights: self.weights.iter().map(|w| scale(-1, *w)).collect(),
        }
    }

    pub fn power(&self, k: i64) -> Self {
        EquivariantLineBundle {
            class: self.class.iter().map(|a| k * a).collect(),
            weights: self.weights.iter().map(|w| scale(k, *w)).collect(),
        }
    }

    /// Tensor with the trivial bundle carrying character `chi`.
    pub fn twist(&self, chi: Weight) -> Self {
        EquivariantLineBundle { class: self.class.clone(), weights: self.weights.iter().map(|w| add(*w, chi)).collect() }
    }

    /// Piecewise-linear compatibility: across every wall,
    /// `m_τ - m_σ = (L.C) w` with `w` the inverted coordinate weight.
    pub fn is_compatible(&self, s: &ToricSurface) -> bool {
        let n = s.euler_number();
        for sigma in 0..n {
            for tau in 0..n {
                if let (Some(i), Some(c)) = (s.shared_wall(sigma, tau), s.wall_curve(sigma, tau)) {
                    let deg = s.dot(&self.class, &c);
                    let expected = add(self.weights[sigma], scale(deg, s.charts[sigma][i]));
                    if self.weights[tau] != expected {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Euler characteristic by localization: the character
    /// `Σ_σ χ^{m_σ} / ((1-χ^{w1})(1-χ^{w2}))` restricted to a generic
    /// one-parameter subgroup and evaluated at the identity.
    pub fn localized_euler_characteristic(&self, s: &ToricSurface) -> Result<Rational, ExactError> {
        let line = [1i64, 3];
        let pair = |w: Weight| w[0] * line[0] + w[1] * line[1];
        let mut total = RationalFunction::zero();
        let one = RationalFunction::one();
        for (sigma, [w1, w2]) in s.charts.iter().enumerate() {
            let num = RationalFunction::monomial(Rational::from_integer(1.into()), pair(self.weights[sigma]));
            let d1 = &one - &RationalFunction::monomial(Rational::from_integer(1.into()), pair(*w1));
            let d2 = &one - &RationalFunction::monomial(Rational::from_integer(1.into()), pair(*w2));
            total = &total + &(&num / &(&d1 * &d2))?;
        }
        total.eval(&Rational::from_integer(1.into()))
    }
}

/// `L = (L_0, ..., L_s)` on a fixed surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleTuple {
    pub bundles: Vec<EquivariantLineBundle>,
}

impl BundleTuple {
    pub fn rank(&self) -> usize {
        self.bundles.len()
    }

    /// Lift classes `β^1..β^s` with `L_0 = O`, `L_i = L_{i-1} ⊗ O(-β^i)`.
    /// A class equal to `k K_S` is realized by the canonical linearization.
    pub fn lift(s: &ToricSurface, beta_upper: &[DivisorClass]) -> Self {
        let omega = EquivariantLineBundle::canonical(s);
        let mut bundles = vec![EquivariantLineBundle::trivial(s)];
        for b in beta_upper {
            let step = match canonical_multiple(s, b) {
                Some(k) => omega.power(-k),
                None => EquivariantLineBundle::from_class(s, b).dual(),
            };
            let next = bundles.last().unwrap().tensor(&step);
            bundles.push(next);
        }
        BundleTuple { bundles }
    }

    /// `β^i = c1(L_{i-1}) - c1(L_i)` for `i = 1..s`.
    pub fn beta_upper(&self) -> Vec<DivisorClass> {
        self.bundles
            .windows(2)
            .map(|w| w[0].class.iter().zip(&w[1].class).map(|(a, b)| a - b).collect())
            .collect()
    }

    /// `β_i = c1(L_i ⊗ L_{i-1}^* ⊗ ω)`.
    pub fn beta_lower(&self, s: &ToricSurface) -> Vec<DivisorClass> {
        self.beta_upper()
            .iter()
            .map(|b| s.canonical.iter().zip(b).map(|(k, x)| k - x).collect())
            .collect()
    }

    /// Tensor every bundle by the same character.
    pub fn twist_all(&self, chi: Weight) -> Self {
        BundleTuple { bundles: self.bundles.iter().map(|l| l.twist(chi)).collect() }
    }
}

fn canonical_multiple(s: &ToricSurface, b: &[i64]) -> Option<i64> {
    let k = &s.canonical;
    let idx = k.iter().position(|x| *x != 0)?;
    if b[idx] % k[idx] != 0 {
        return None;
    }
    let m = b[idx] / k[idx];
    k.iter().zip(b).all(|(x, y)| m * x == *y).then_some(m)
}

/// Coordinates of the Chern-number vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChernSymbol {
    Chi,
    KSquared,
    /// `K_S β^i` (1-based).
    KBeta(usize),
    /// `β^i β^j`, `i <= j` (1-based).
    BetaBeta(usize, usize),
}

impl fmt::Display for ChernSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChernSymbol::Chi => write!(f, "chi"),
            ChernSymbol::KSquared => write!(f, "K^2"),
            ChernSymbol::KBeta(i) => write!(f, "K.b{i}"),
            ChernSymbol::BetaBeta(i, j) => write!(f, "b{i}.b{j}"),
        }
    }
}

/// Column order: `χ, K², (Kβ^i, β^iβ^i) for each i, then β^iβ^j for i<j`.
pub fn chern_symbols(rank: usize) -> Vec<ChernSymbol> {
    let s = rank.saturating_sub(1);
    let mut out = vec![ChernSymbol::Chi, ChernSymbol::KSquared];
    for i in 1..=s {
        out.push(ChernSymbol::KBeta(i));
        out.push(ChernSymbol::BetaBeta(i, i));
    }
    for i in 1..=s {
        for j in i + 1..=s {
            out.push(ChernSymbol::BetaBeta(i, j));
        }
    }
    out
}

/// Evaluate every symbol on `(S, β)`.
pub fn chern_vector(s: &ToricSurface, beta_upper: &[DivisorClass]) -> Vec<i64> {
    let k = &s.canonical;
    chern_symbols(beta_upper.len() + 1)
        .into_iter()
        .map(|sym| match sym {
            ChernSymbol::Chi => s.chi,
            ChernSymbol::KSquared => s.k_squared(),
            ChernSymbol::KBeta(i) => s.dot(k, &beta_upper[i - 1]),
            ChernSymbol::BetaBeta(i, j) => s.dot(&beta_upper[i - 1], &beta_upper[j - 1]),
        })
        .collect()
}

/// A basis element: a surface with `β^i = k_i K_S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisPair {
    pub surface: SurfaceKind,
    pub canonical_multiples: Vec<i64>,
}

impl BasisPair {
    pub fn new(surface: SurfaceKind, canonical_multiples: Vec<i64>) -> Self {
        BasisPair { surface, canonical_multiples }
    }

    pub fn beta_upper(&self, s: &ToricSurface) -> Vec<DivisorClass> {
        self.canonical_multiples.iter().map(|k| s.canonical.iter().map(|x| k * x).collect()).collect()
    }

    pub fn bundles(&self) -> (ToricSurface, BundleTuple) {
        let s = ToricSurface::new(self.surface);
        let l = BundleTuple::lift(&s, &self.beta_upper(&s));
        (s, l)
    }

    pub fn chern_vector(&self) -> Vec<i64> {
        let s = ToricSurface::new(self.surface);
        chern_vector(&s, &self.beta_upper(&s))
    }
}

impl fmt::Display for BasisPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .canonical_multiples
            .iter()
            .map(|k| match k {
                0 => "O".to_string(),
                1 => "K".to_string(),
                -1 => "-K".to_string(),
                k => format!("{k}K"),
            })
            .collect();
        write!(f, "[{}, ({})]", self.surface, parts.join(","))
    }
}

/// Extraction basis for `rank` together with its Chern-number matrix.
pub fn basis_matrix(rank: usize) -> Result<(Vec<BasisPair>, Vec<Vec<i64>>), ToricError> {
    use SurfaceKind::{P1xP1, P2};
    let s = rank.saturating_sub(1);
    let basis: Vec<BasisPair> = match rank {
        0 => return Err(ToricError::SingularBasis(0)),
        1 => vec![BasisPair::new(P1xP1, vec![]), BasisPair::new(P2, vec![])],
        2 => vec![
            BasisPair::new(P1xP1, vec![0]),
            BasisPair::new(P2, vec![0]),
            BasisPair::new(P2, vec![1]),
            BasisPair::new(P2, vec![-1]),
        ],
        3 => vec![
            BasisPair::new(P1xP1, vec![0, 0]),
            BasisPair::new(P2, vec![0, 0]),
            BasisPair::new(P2, vec![1, 0]),
            BasisPair::new(P2, vec![-1, 0]),
            BasisPair::new(P2, vec![0, 1]),
            BasisPair::new(P2, vec![0, -1]),
            BasisPair::new(P2, vec![1, 1]),
        ],
        _ => generated_basis(s)?,
    };
    let m: Vec<Vec<i64>> = basis.iter().map(BasisPair::chern_vector).collect();
    if linalg::determinant(&linalg::from_integers(&m)).is_zero() {
        return Err(ToricError::SingularBasis(rank));
    }
    Ok((basis, m))
}

/// Greedy basis over tuples with entries in `{0, K, -K}`.
fn generated_basis(s: usize) -> Result<Vec<BasisPair>, ToricError> {
    let target = chern_symbols(s + 1).len();
    let mut basis = vec![BasisPair::new(SurfaceKind::P1xP1, vec![0; s])];
    let mut rows = vec![basis[0].chern_vector()];
    let total = 3usize.pow(s as u32);
    for idx in 0..total {
        let mut ks = Vec::with_capacity(s);
        let mut x = idx;
        for _ in 0..s {
            ks.push([0, 1, -1][x % 3]);
            x /= 3;
        }
        let cand = BasisPair::new(SurfaceKind::P2, ks);
        let mut trial = rows.clone();
        trial.push(cand.chern_vector());
        if linalg::rank(&linalg::from_integers(&trial)) == trial.len() {
            rows = trial;
            basis.push(cand);
            if basis.len() == target {
                return Ok(basis);
            }
        }
    }
    Err(ToricError::SingularBasis(s + 1))
}

/// `c2(⊕ L_i ⊗ I_{n_i}) = |n| + Σ_{i<j} c1(L_i) c1(L_j)`.
pub fn chern_c2(s: &ToricSurface, l: &BundleTuple, n: &[u32]) -> Result<Rational, ToricError> {
    if l.rank() != n.len() {
        return Err(ToricError::RankMismatch);
    }
    let mut c2: i64 = n.iter().map(|&k| k as i64).sum();
    for i in 0..l.rank() {
        for j in i + 1..l.rank() {
            c2 += s.dot(&l.bundles[i].class, &l.bundles[j].class);
        }
    }
    Ok(Rational::from_integer(c2.into()))
}

/// The same number through `|n| + (r-1)/(2r) c1² + d(β)`.
pub fn chern_c2_beta_form(s: &ToricSurface, l: &BundleTuple, n: &[u32]) -> Result<Rational, ToricError> {
    if l.rank() != n.len() {
        return Err(ToricError::RankMismatch);
    }
    let r = l.rank() as i64;
    let c1: Vec<i64> = (0..s.picard_rank()).map(|k| l.bundles.iter().map(|b| b.class[k]).sum()).collect();
    let betas = l.beta_upper();
    let size: i64 = n.iter().map(|&k| k as i64).sum();
    let pairings: Vec<Vec<i64>> = betas.iter().map(|a| betas.iter().map(|b| s.dot(a, b)).collect()).collect();
    Ok(Rational::from_integer(size.into())
        + Rational::new(((r - 1) * s.dot(&c1, &c1)).into(), (2 * r).into())
        + d_shift(&pairings, r as usize))
}

/// `d(β) = -Σ_{i<j} i(r-j)/r β^iβ^j - Σ_i i(r-i)/(2r) (β^i)²` from the
/// pairing matrix of `β^1..β^{r-1}`.
pub fn d_shift(pairings: &[Vec<i64>], rank: usize) -> Rational {
    let r = rank as i64;
    let mut acc = Rational::zero();
    for i in 1..r {
        for j in i..r {
            let b = pairings[(i - 1) as usize][(j - 1) as usize];
            acc -= if i == j {
                Rational::new((i * (r - i) * b).into(), (2 * r).into())
            } else {
                Rational::new((i * (r - j) * b).into(), r.into())
            };
        }
    }
    acc
}

/// A surface known only through numerical data: `χ(O_S)`, an integral
/// lattice with Gram matrix containing `K_S`, and the Seiberg-Witten basic
/// classes with their invariants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractSurface {
    pub chi: i64,
    pub gram: Vec<Vec<i64>>,
    pub canonical: DivisorClass,
    pub basic_classes: Vec<(DivisorClass, i64)>,
}

impl AbstractSurface {
    /// `None` unless the Gram matrix is square and symmetric and every class
    /// has the lattice rank.
    pub fn new(
        chi: i64,
        gram: Vec<Vec<i64>>,
        canonical: DivisorClass,
        basic_classes: Vec<(DivisorClass, i64)>,
    ) -> Option<Self> {
        let n = gram.len();
        let square = gram.iter().all(|row| row.len() == n);
        let symmetric = square && (0..n).all(|i| (0..n).all(|j| gram[i][j] == gram[j][i]));
        let sized = canonical.len() == n && basic_classes.iter().all(|(c, _)| c.len() == n);
        (symmetric && sized).then_some(AbstractSurface { chi, gram, canonical, basic_classes })
    }

    /// Minimal surface of general type whose only basic classes are `0` and
    /// `K_S`, with `SW(0) = 1` and `SW(K_S) = (-1)^χ`. The lattice is the rank
    /// one sublattice spanned by `K_S`.
    pub fn canonical_curve(chi: i64, k_squared: i64) -> Self {
        let sign = if chi % 2 == 0 { 1 } else { -1 };
        AbstractSurface { chi, gram: vec![vec![k_squared]], canonical: vec![1], basic_classes: vec![(vec![0], 1), (vec![1], sign)] }
    }

    /// K3 surface: trivial canonical class, single basic class 0.
    pub fn k3() -> Self {
        AbstractSurface { chi: 2, gram: Vec::new(), canonical: Vec::new(), basic_classes: vec![(Vec::new(), 1)] }
    }

    pub fn dot(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                acc += x * self.gram[i][j] * y;
            }
        }
        acc
    }

    pub fn k_squared(&self) -> i64 {
        self.dot(&self.canonical, &self.canonical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;

    fn det(w: [Weight; 2]) -> i64 {
        w[0][0] * w[1][1] - w[0][1] * w[1][0]
    }

    #[test]
    fn charts_are_smooth() {
        for kind in [SurfaceKind::P2, SurfaceKind::P1xP1] {
            let s = ToricSurface::new(kind);
            for c in s.chart_weights() {
                assert_eq!(det(*c).abs(), 1);
            }
        }
        assert_eq!(ToricSurface::new(SurfaceKind::P2).euler_number(), 3);
        assert_eq!(ToricSurface::new(SurfaceKind::P1xP1).euler_number(), 4);
        assert!(ToricSurface::from_name("f1").is_err());
    }

    #[test]
    fn canonical_is_standard_linearization_twisted() {
        for kind in [SurfaceKind::P2, SurfaceKind::P1xP1] {
            let s = ToricSurface::new(kind);
            let std = EquivariantLineBundle::from_class(&s, &s.canonical).twist([1, 1]);
            assert_eq!(std, EquivariantLineBundle::canonical(&s));
            assert!(EquivariantLineBundle::canonical(&s).is_compatible(&s));
        }
    }

    #[test]
    fn riemann_roch_by_localization() {
        let p2 = ToricSurface::new(SurfaceKind::P2);
        for d in -3..=3 {
            let l = EquivariantLineBundle::from_class(&p2, &[d]);
            assert!(l.is_compatible(&p2));
            assert_eq!(l.localized_euler_characteristic(&p2).unwrap(), int(p2.riemann_roch(&[d])));
        }
        assert_eq!(EquivariantLineBundle::from_class(&p2, &[1]).localized_euler_characteristic(&p2).unwrap(), int(3));
        let q = ToricSurface::new(SurfaceKind::P1xP1);
        for a in -3..=3 {
            for b in -3..=3 {
                let l = EquivariantLineBundle::from_class(&q, &[a, b]).twist([2, -5]);
                assert!(l.is_compatible(&q));
                assert_eq!(l.localized_euler_characteristic(&q).unwrap(), int((a + 1) * (b + 1)));
            }
        }
    }

    #[test]
    fn incompatible_weights_detected() {
        let p2 = ToricSurface::new(SurfaceKind::P2);
        let mut l = EquivariantLineBundle::from_class(&p2, &[2]);
        l.weights[1] = [1, 0];
        assert!(!l.is_compatible(&p2));
    }

    #[test]
    fn chern_vectors_of_printed_rows() {
        let p2 = ToricSurface::new(SurfaceKind::P2);
        let q = ToricSurface::new(SurfaceKind::P1xP1);
        assert_eq!(chern_vector(&p2, std::slice::from_ref(&p2.canonical)), vec![1, 9, 9, 9]);
        assert_eq!(chern_vector(&q, &[vec![0, 0]]), vec![1, 8, 0, 0]);
        assert_eq!(chern_vector(&p2, &[vec![3]]), vec![1, 9, -9, 9]);
    }

    #[test]
    fn printed_matrices() {
        let (_, m2) = basis_matrix(2).unwrap();
        assert_eq!(m2, vec![vec![1, 8, 0, 0], vec![1, 9, 0, 0], vec![1, 9, 9, 9], vec![1, 9, -9, 9]]);
        let (_, m3) = basis_matrix(3).unwrap();
        assert_eq!(
            m3,
            vec![
                vec![1, 8, 0, 0, 0, 0, 0],
                vec![1, 9, 0, 0, 0, 0, 0],
                vec![1, 9, 9, 9, 0, 0, 0],
                vec![1, 9, -9, 9, 0, 0, 0],
                vec![1, 9, 0, 0, 9, 9, 0],
                vec![1, 9, 0, 0, -9, 9, 0],
                vec![1, 9, 9, 9, 9, 9, 9],
            ]
        );
    }

    #[test]
    fn generated_bases_are_invertible() {
        for r in [1, 4, 5] {
            let (b, m) = basis_matrix(r).unwrap();
            assert_eq!(b.len(), chern_symbols(r).len());
            assert_eq!(m.len(), b.len());
        }
    }

    #[test]
    fn lift_recovers_beta() {
        let p2 = ToricSurface::new(SurfaceKind::P2);
        let betas = vec![vec![-3], vec![0], vec![3], vec![2]];
        let l = BundleTuple::lift(&p2, &betas);
        assert_eq!(l.beta_upper(), betas);
        for (lo, up) in l.beta_lower(&p2).iter().zip(&betas) {
            assert_eq!(lo[0], -3 - up[0]);
        }
        assert!(l.bundles.iter().all(|b| b.is_compatible(&p2)));
    }

    #[test]
    fn c2_trivial_and_small_cases() {
        let p2 = ToricSurface::new(SurfaceKind::P2);
        let l = BundleTuple::lift(&p2, &[vec![0], vec![0]]);
        assert_eq!(chern_c2(&p2, &l, &[2, 2, 2]).unwrap(), int(6));
        let omega = EquivariantLineBundle::canonical(&p2);
        let o = EquivariantLineBundle::trivial(&p2);
        let l = BundleTuple { bundles: vec![omega, o.clone(), o] };
        assert_eq!(chern_c2(&p2, &l, &[0, 0, 0]).unwrap(), int(0));
        assert_eq!(chern_c2_beta_form(&p2, &l, &[0, 0, 0]).unwrap(), int(0));
    }

    #[test]
    fn d_shift_examples() {
        assert!(d_shift(&[vec![0]], 2).is_zero());
        assert_eq!(d_shift(&[vec![1]], 2), crate::exact::rational(-1, 4));
        assert_eq!(d_shift(&[vec![0, 1], vec![1, 0]], 3), crate::exact::rational(-1, 3));
    }
}
