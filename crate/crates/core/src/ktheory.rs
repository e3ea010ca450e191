//! Equivariant characters at torus-fixed points.
//!
//! A [`TorusCharacter`] is a virtual representation of the two-dimensional
//! surface torus times the Higgs `C*`, stored as weights `(a, b, c)` with
//! integer multiplicities. `(a, b)` lives in the character lattice of the
//! surface torus and `c` is the exponent of the Higgs character `t`.

use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::hilb::{FixedPoint, Partition};
use crate::toric::{BundleTuple, EquivariantLineBundle, ToricSurface, Weight};

pub type TorusWeight = [i64; 3];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusCharacter {
    terms: BTreeMap<TorusWeight, i64>,
}

impl TorusCharacter {
    pub fn zero() -> Self {
        TorusCharacter::default()
    }

    pub fn monomial(w: TorusWeight) -> Self {
        let mut c = TorusCharacter::zero();
        c.add_weight(w, 1);
        c
    }

    pub fn from_terms<I: IntoIterator<Item = (TorusWeight, i64)>>(terms: I) -> Self {
        let mut c = TorusCharacter::zero();
        for (w, m) in terms {
            c.add_weight(w, m);
        }
        c
    }

    pub fn add_weight(&mut self, w: TorusWeight, mult: i64) {
        if mult == 0 {
            return;
        }
        let e = self.terms.entry(w).or_insert(0);
        *e += mult;
        if *e == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TorusWeight, &i64)> {
        self.terms.iter()
    }

    pub fn multiplicity(&self, w: TorusWeight) -> i64 {
        self.terms.get(&w).copied().unwrap_or(0)
    }

    /// Virtual rank: sum of multiplicities.
    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Multiply by the monomial with weight `w`.
    pub fn shift(&self, w: TorusWeight) -> Self {
        TorusCharacter {
            terms: self.terms.iter().map(|(k, m)| ([k[0] + w[0], k[1] + w[1], k[2] + w[2]], *m)).collect(),
        }
    }

    /// Dual representation: every weight negated.
    pub fn dual(&self) -> Self {
        TorusCharacter { terms: self.terms.iter().map(|(k, m)| ([-k[0], -k[1], -k[2]], *m)).collect() }
    }

    pub fn scale(&self, k: i64) -> Self {
        TorusCharacter::from_terms(self.terms.iter().map(|(w, m)| (*w, k * m)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = TorusCharacter::zero();
        for (a, ma) in &self.terms {
            for (b, mb) in &other.terms {
                out.add_weight([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ma * mb);
            }
        }
        out
    }

    /// Read `(a, b)` as exponents of chart variables `q1, q2` and substitute
    /// `q_k = χ^{w_k}`.
    pub fn substitute(&self, w1: Weight, w2: Weight) -> Self {
        TorusCharacter::from_terms(
            self.terms.iter().map(|(k, m)| ([k[0] * w1[0] + k[1] * w2[0], k[0] * w1[1] + k[1] * w2[1], k[2]], *m)),
        )
    }

    /// Range of `t`-exponents present.
    pub fn t_range(&self) -> Option<(i64, i64)> {
        let min = self.terms.keys().map(|k| k[2]).min()?;
        let max = self.terms.keys().map(|k| k[2]).max()?;
        Some((min, max))
    }
}

impl Add for &TorusCharacter {
    type Output = TorusCharacter;
    fn add(self, rhs: &TorusCharacter) -> TorusCharacter {
        let mut out = self.clone();
        for (w, m) in &rhs.terms {
            out.add_weight(*w, *m);
        }
        out
    }
}

impl Sub for &TorusCharacter {
    type Output = TorusCharacter;
    fn sub(self, rhs: &TorusCharacter) -> TorusCharacter {
        self + &(-rhs)
    }
}

impl Neg for &TorusCharacter {
    type Output = TorusCharacter;
    fn neg(self) -> TorusCharacter {
        self.scale(-1)
    }
}

/// `Q_λ = Σ_{(i,j) ∈ λ} q1^i q2^j` in chart variables.
pub fn partition_character(lambda: &Partition) -> TorusCharacter {
    TorusCharacter::from_terms(lambda.boxes().map(|(i, j)| ([i, j, 0], 1)))
}

/// `V_{λμ} = Q_μ + Q̄_λ (q1 q2)^{-1} - Q_μ Q̄_λ (1 - q1^{-1})(1 - q2^{-1})`,
/// the chart-local character of `χ(O) - χ(I_λ, I_μ)`.
pub fn hom_vertex(lambda: &Partition, mu: &Partition) -> TorusCharacter {
    let qm = partition_character(mu);
    let ql = partition_character(lambda).dual();
    let mut v = &qm + &ql.shift([-1, -1, 0]);
    let p = TorusCharacter::from_terms([([0, 0, 0], 1), ([-1, 0, 0], -1), ([0, -1, 0], -1), ([-1, -1, 0], 1)]);
    v = &v - &qm.mul(&ql).mul(&p);
    v
}

/// `H_ij(M) = Σ_σ χ^{m_σ(L_i^* ⊗ L_j ⊗ M)} V_{λ^i_σ, λ^j_σ}` with chart
/// weights substituted.
pub fn deficiency_class(
    surface: &ToricSurface,
    li: &EquivariantLineBundle,
    lj: &EquivariantLineBundle,
    twist: &EquivariantLineBundle,
    f: &FixedPoint,
    i: usize,
    j: usize,
) -> TorusCharacter {
    let m = li.dual().tensor(lj).tensor(twist);
    let mut out = TorusCharacter::zero();
    for (sigma, [w1, w2]) in surface.charts.iter().enumerate() {
        let (a, b) = (&f.parts[i][sigma], &f.parts[j][sigma]);
        if a.is_empty() && b.is_empty() {
            continue;
        }
        let mw = m.weight(sigma);
        out = &out + &hom_vertex(a, b).substitute(*w1, *w2).shift([mw[0], mw[1], 0]);
    }
    out
}

/// `T_{L,0}|_F = Σ_{i,j} t^{i-j} (H_ij(O) - t H_ij(ω))`.
pub fn virtual_tangent(surface: &ToricSurface, l: &BundleTuple, f: &FixedPoint) -> TorusCharacter {
    let trivial = EquivariantLineBundle::trivial(surface);
    let omega = EquivariantLineBundle::canonical(surface);
    let r = l.rank();
    let mut out = TorusCharacter::zero();
    for i in 0..r {
        for j in 0..r {
            let c = i as i64 - j as i64;
            let (li, lj) = (&l.bundles[i], &l.bundles[j]);
            let h0 = deficiency_class(surface, li, lj, &trivial, f, i, j);
            let h1 = deficiency_class(surface, li, lj, &omega, f, i, j);
            out = &out + &h0.shift([0, 0, c]);
            out = &out - &h1.shift([0, 0, c + 1]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilb::{partitions_of, FixedPointSpace};
    use crate::toric::SurfaceKind;

    fn part(p: &[u32]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn partition_characters() {
        assert!(partition_character(&Partition::empty()).is_zero());
        assert_eq!(partition_character(&part(&[1])), TorusCharacter::monomial([0, 0, 0]));
        let expected = TorusCharacter::from_terms([([0, 0, 0], 1), ([1, 0, 0], 1), ([0, 1, 0], 1)]);
        assert_eq!(partition_character(&part(&[2, 1])), expected);
    }

    #[test]
    fn vertex_of_single_box_is_tangent() {
        assert!(hom_vertex(&Partition::empty(), &Partition::empty()).is_zero());
        let v = hom_vertex(&part(&[1]), &part(&[1]));
        assert_eq!(v, TorusCharacter::from_terms([([-1, 0, 0], 1), ([0, -1, 0], 1)]));
    }

    #[test]
    fn vertex_rank_and_positivity() {
        for a in 0..=4 {
            for b in 0..=4 {
                for l in partitions_of(a) {
                    for m in partitions_of(b) {
                        let v = hom_vertex(&l, &m);
                        assert_eq!(v.rank(), (a + b) as i64);
                    }
                }
            }
        }
        // Tangent spaces are honest representations without zero weights.
        for n in 1..=5 {
            for l in partitions_of(n) {
                let v = hom_vertex(&l, &l);
                assert!(v.terms().all(|(w, m)| *m > 0 && *w != [0, 0, 0]));
            }
        }
    }

    #[test]
    fn t_exponents_bounded_and_serre_symmetric() {
        let s = ToricSurface::new(SurfaceKind::P2);
        let l = BundleTuple::lift(&s, &[s.canonical.clone(), vec![0]]);
        let space = FixedPointSpace::new(3, &[1, 1, 1]);
        for f in space.iter() {
            let t = virtual_tangent(&s, &l, &f);
            let (lo, hi) = t.t_range().unwrap();
            assert!(lo >= -2 && hi <= 3);
            // T = -t · T^∨
            assert_eq!(t, -&t.dual().shift([0, 0, 1]));
        }
    }

    #[test]
    fn rank_one_degree_zero_part_is_hilbert_tangent() {
        let s = ToricSurface::new(SurfaceKind::P1xP1);
        let l = BundleTuple::lift(&s, &[]);
        let o = EquivariantLineBundle::trivial(&s);
        for f in FixedPointSpace::new(4, &[3]).iter() {
            let t = virtual_tangent(&s, &l, &f);
            let zero_part = TorusCharacter::from_terms(t.terms().filter(|(w, _)| w[2] == 0).map(|(w, m)| (*w, *m)));
            let tangent = deficiency_class(&s, &o, &o, &o, &f, 0, 0);
            assert_eq!(zero_part, tangent);
            assert_eq!(tangent.rank(), 6);
        }
    }

    #[test]
    fn empty_point_gives_zero() {
        let s = ToricSurface::new(SurfaceKind::P2);
        let l = BundleTuple::lift(&s, &[vec![-3], vec![3]]);
        let f = FixedPointSpace::new(3, &[0, 0, 0]).get(0);
        assert!(virtual_tangent(&s, &l, &f).is_zero());
    }
}
