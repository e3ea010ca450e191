//! Truncated Puiseux series `sum c_e q^e + O(q^order)` with exact rational
//! exponents and [`RationalFunction`] coefficients.
//!
//! Coefficients at exponents `>= order` are unknown. Ring operations track
//! relative precision: a product is known up to
//! `min(order(a) + val(b), order(b) + val(a))`, which is the minimum of the
//! two orders whenever both series start at `q^0`.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, Exponent, Rational, RationalFunction};

#[derive(Clone, PartialEq, Eq)]
pub struct PuiseuxSeries {
    terms: BTreeMap<Exponent, RationalFunction>,
    order: Exponent,
}

/// Dense block `sum coeffs[k] q^(k/den)` used by the unit-series kernels.
struct Dense {
    den: i64,
    coeffs: Vec<RationalFunction>,
}

fn ceil_ratio(x: Exponent) -> i64 {
    x.ceil().to_integer()
}

impl PuiseuxSeries {
    pub fn zero(order: Exponent) -> Self {
        PuiseuxSeries { terms: BTreeMap::new(), order }
    }

    pub fn one(order: Exponent) -> Self {
        PuiseuxSeries::constant(RationalFunction::one(), order)
    }

    pub fn constant(c: RationalFunction, order: Exponent) -> Self {
        PuiseuxSeries::monomial(c, Exponent::zero(), order)
    }

    pub fn monomial(c: RationalFunction, exponent: Exponent, order: Exponent) -> Self {
        let mut s = PuiseuxSeries::zero(order);
        s.add_term(exponent, c);
        s
    }

    pub fn from_terms<I>(terms: I, order: Exponent) -> Self
    where
        I: IntoIterator<Item = (Exponent, RationalFunction)>,
    {
        let mut s = PuiseuxSeries::zero(order);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c q^e`; terms at or beyond the truncation order are dropped.
    pub fn add_term(&mut self, e: Exponent, c: RationalFunction) {
        if e >= self.order || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let sum = &*old + &c;
                if sum.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn order(&self) -> Exponent {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: Exponent) -> RationalFunction {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    pub fn coeff_int(&self, k: i64) -> RationalFunction {
        self.coeff(Exponent::from_integer(k))
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<Exponent> {
        self.terms.keys().next().copied()
    }

    pub fn leading(&self) -> Option<(Exponent, &RationalFunction)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least common denominator of the exponents and the order.
    pub fn ramification(&self) -> i64 {
        self.terms.keys().fold(*self.order.denom(), |acc, e| acc.lcm(e.denom()))
    }

    pub fn respects_ramification(&self, d: i64) -> bool {
        d % self.ramification() == 0
    }

    /// Drops everything at or above `order` (no-op if already coarser).
    pub fn truncate(&self, order: Exponent) -> Self {
        let order = order.min(self.order);
        PuiseuxSeries::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())), order)
    }

    pub fn neg(&self) -> Self {
        PuiseuxSeries { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(), order: self.order }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let order = self.order.min(rhs.order);
        let mut out = self.truncate(order);
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Multiply every coefficient by an exact factor.
    pub fn scale(&self, c: &RationalFunction) -> Self {
        PuiseuxSeries::from_terms(self.terms.iter().map(|(e, x)| (*e, x * c)), self.order)
    }

    /// Multiply by `q^shift`.
    pub fn shift(&self, shift: Exponent) -> Self {
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (*e + shift, c.clone())).collect(),
            order: self.order + shift,
        }
    }

    /// Substitute `q -> q^k` for a positive rational `k`.
    pub fn scale_exponents(&self, k: Exponent) -> Self {
        assert!(k.is_positive());
        PuiseuxSeries {
            terms: self.terms.iter().map(|(e, c)| (*e * k, c.clone())).collect(),
            order: self.order * k,
        }
    }

    fn valuation_or_order(&self) -> Exponent {
        self.valuation().unwrap_or(self.order)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let order = (self.order + rhs.valuation_or_order()).min(rhs.order + self.valuation_or_order());
        let mut acc: BTreeMap<Exponent, RationalFunction> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = *ea + *eb;
                if e >= order {
                    break;
                }
                let prod = ca * cb;
                acc.entry(e).and_modify(|c| *c = &*c + &prod).or_insert(prod);
            }
        }
        PuiseuxSeries::from_terms(acc, order)
    }

    /// Split into `c q^v (1 + u)` and densify `1 + u` on its exponent grid.
    fn unit_form(&self) -> Result<(Exponent, RationalFunction, Dense), ExactError> {
        let (v, c) = self.leading().ok_or(ExactError::ZeroDivisor)?;
        let c = c.clone();
        let cinv = c.inv()?;
        let rel = self.order - v;
        let den = self.ramification();
        let n = ceil_ratio(rel * den) as usize;
        let mut coeffs = vec![RationalFunction::zero(); n];
        for (e, x) in &self.terms {
            let k = ((*e - v) * den).to_integer() as usize;
            if k < n {
                coeffs[k] = x * &cinv;
            }
        }
        Ok((v, c, Dense { den, coeffs }))
    }

    fn from_dense(lead: Exponent, c: &RationalFunction, d: Dense, order: Exponent) -> Self {
        let den = d.den;
        PuiseuxSeries::from_terms(
            d.coeffs.into_iter().enumerate().map(|(k, x)| (lead + Exponent::new(k as i64, den), &x * c)),
            order,
        )
    }

    /// Multiplicative inverse; the leading coefficient must be invertible.
    pub fn inv(&self) -> Result<Self, ExactError> {
        let (v, c, d) = self.unit_form()?;
        let rel = self.order - v;
        let out = dense_inverse(&d);
        Ok(PuiseuxSeries::from_dense(-v, &c.inv()?, out, -v + rel))
    }

    pub fn div(&self, rhs: &Self) -> Result<Self, ExactError> {
        if rhs.is_zero() {
            return Err(ExactError::ZeroDivisor);
        }
        Ok(self.mul(&rhs.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self, ExactError> {
        if e == 0 {
            let rel = self.order - self.valuation().ok_or(ExactError::ZeroDivisor)?;
            return Ok(PuiseuxSeries::one(rel));
        }
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc: Option<PuiseuxSeries> = None;
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc.unwrap())
    }

    fn check_unit_constant(&self) -> Result<(), ExactError> {
        match self.leading() {
            Some((v, c)) if v.is_zero() && c.is_one() => Ok(()),
            _ => Err(ExactError::BadLeadingTerm),
        }
    }

    /// Natural logarithm of a series `1 + O(q^e)`, `e > 0`.
    pub fn log(&self) -> Result<Self, ExactError> {
        self.check_unit_constant()?;
        let (_, _, d) = self.unit_form()?;
        let n = d.coeffs.len();
        let mut l = vec![RationalFunction::zero(); n];
        for k in 1..n {
            // k L_k = k f_k - sum_{j<k} j L_j f_{k-j}
            let mut acc = d.coeffs[k].scale(&Rational::from_integer((k as i64).into()));
            for j in 1..k {
                if l[j].is_zero() || d.coeffs[k - j].is_zero() {
                    continue;
                }
                let t = (&l[j] * &d.coeffs[k - j]).scale(&Rational::from_integer((j as i64).into()));
                acc = &acc - &t;
            }
            l[k] = acc.scale(&Rational::new(1.into(), (k as i64).into()));
        }
        Ok(PuiseuxSeries::from_dense(
            Exponent::zero(),
            &RationalFunction::one(),
            Dense { den: d.den, coeffs: l },
            self.order,
        ))
    }

    /// Exponential of a series with only positive exponents.
    pub fn exp(&self) -> Result<Self, ExactError> {
        if self.valuation().is_some_and(|v| !v.is_positive()) {
            return Err(ExactError::BadLeadingTerm);
        }
        let den = self.ramification();
        let n = ceil_ratio(self.order * den).max(0) as usize;
        let mut h = vec![RationalFunction::zero(); n];
        for (e, c) in &self.terms {
            h[(*e * den).to_integer() as usize] = c.clone();
        }
        let mut g = vec![RationalFunction::zero(); n];
        if n > 0 {
            g[0] = RationalFunction::one();
        }
        for k in 1..n {
            // k g_k = sum_{j=1..k} j h_j g_{k-j}
            let mut acc = RationalFunction::zero();
            for j in 1..=k {
                if h[j].is_zero() || g[k - j].is_zero() {
                    continue;
                }
                acc = &acc + &(&h[j] * &g[k - j]).scale(&Rational::from_integer((j as i64).into()));
            }
            g[k] = acc.scale(&Rational::new(1.into(), (k as i64).into()));
        }
        Ok(PuiseuxSeries::from_dense(Exponent::zero(), &RationalFunction::one(), Dense { den, coeffs: g }, self.order))
    }

    /// Square root with leading coefficient `leading_root`, which must square
    /// to the leading coefficient of `self`.
    pub fn sqrt(&self, leading_root: &RationalFunction) -> Result<Self, ExactError> {
        let (v, c, d) = self.unit_form()?;
        if leading_root * leading_root != c {
            return Err(ExactError::BranchMismatch);
        }
        let rel = self.order - v;
        let half_v = v / 2;
        let mut d = d;
        // The exponent grid must contain v/2 offsets: refine if necessary.
        let grid = d.den.lcm(half_v.denom());
        if grid != d.den {
            let factor = (grid / d.den) as usize;
            let n = ceil_ratio(rel * grid) as usize;
            let mut coeffs = vec![RationalFunction::zero(); n];
            for (k, x) in d.coeffs.into_iter().enumerate() {
                if k * factor < n {
                    coeffs[k * factor] = x;
                }
            }
            d = Dense { den: grid, coeffs };
        }
        let n = d.coeffs.len();
        let mut g = vec![RationalFunction::zero(); n];
        if n > 0 {
            g[0] = RationalFunction::one();
        }
        let half = Rational::new(1.into(), 2.into());
        for k in 1..n {
            let mut acc = d.coeffs[k].clone();
            for j in 1..k {
                if g[j].is_zero() || g[k - j].is_zero() {
                    continue;
                }
                acc = &acc - &(&g[j] * &g[k - j]);
            }
            g[k] = acc.scale(&half);
        }
        Ok(PuiseuxSeries::from_dense(half_v, leading_root, d_with(d.den, g), half_v + rel))
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&RationalFunction) -> RationalFunction) -> Self {
        PuiseuxSeries::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))), self.order)
    }

    /// True iff every coefficient lies in `Q(y)`.
    pub fn is_pure_in_y(&self) -> bool {
        self.terms.values().all(RationalFunction::is_pure_in_y)
    }

    pub fn to_record(&self) -> SeriesRecord {
        SeriesRecord {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e.numer(), *e.denom(), c.to_string()))
                .collect(),
            order: (*self.order.numer(), *self.order.denom()),
        }
    }

    pub fn from_record(rec: &SeriesRecord) -> Result<Self, ExactError> {
        let mut terms = Vec::with_capacity(rec.terms.len());
        for (n, d, c) in &rec.terms {
            if *d == 0 {
                return Err(ExactError::Parse(format!("{n}/{d}")));
            }
            terms.push((Exponent::new(*n, *d), c.parse()?));
        }
        if rec.order.1 == 0 {
            return Err(ExactError::Parse(format!("{:?}", rec.order)));
        }
        Ok(PuiseuxSeries::from_terms(terms, Exponent::new(rec.order.0, rec.order.1)))
    }
}

fn d_with(den: i64, coeffs: Vec<RationalFunction>) -> Dense {
    Dense { den, coeffs }
}

fn dense_inverse(d: &Dense) -> Dense {
    let n = d.coeffs.len();
    let mut g = vec![RationalFunction::zero(); n];
    if n > 0 {
        g[0] = RationalFunction::one();
    }
    for k in 1..n {
        let mut acc = RationalFunction::zero();
        for j in 1..=k {
            if d.coeffs[j].is_zero() || g[k - j].is_zero() {
                continue;
            }
            acc = &acc - &(&d.coeffs[j] * &g[k - j]);
        }
        g[k] = acc;
    }
    Dense { den: d.den, coeffs: g }
}

/// Serialized form: `(exponent_num, exponent_den, coefficient)` triples plus
/// the truncation order as a fraction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesRecord {
    pub terms: Vec<(i64, i64, String)>,
    pub order: (i64, i64),
}

impl Serialize for PuiseuxSeries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_record().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PuiseuxSeries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rec = SeriesRecord::deserialize(deserializer)?;
        PuiseuxSeries::from_record(&rec).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.terms {
            write!(f, "{c}*q^({e}) + ")?;
        }
        write!(f, "O(q^({}))", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};
    use proptest::prelude::*;

    fn e(n: i64) -> Exponent {
        Exponent::from_integer(n)
    }

    fn rf(c: i64) -> RationalFunction {
        RationalFunction::from_int(c)
    }

    #[test]
    fn log_of_one_is_zero() {
        let s = PuiseuxSeries::one(e(5));
        assert!(s.log().unwrap().is_zero());
    }

    #[test]
    fn first_order_log() {
        let c = RationalFunction::laurent(&[(2, 3), (-1, 1)]);
        let s = PuiseuxSeries::from_terms([(e(0), rf(1)), (e(1), c.clone())], e(2));
        let l = s.log().unwrap();
        assert_eq!(l, PuiseuxSeries::monomial(c, e(1), e(2)));
    }

    #[test]
    fn log_rejects_bad_constant() {
        let s = PuiseuxSeries::from_terms([(e(0), rf(2))], e(3));
        assert_eq!(s.log().unwrap_err(), ExactError::BadLeadingTerm);
    }

    #[test]
    fn sqrt_of_phi_leading_term() {
        // (v - 1/v)^2 (1 + 3q)
        let root = RationalFunction::laurent(&[(1, 1), (-1, -1)]);
        let s = PuiseuxSeries::from_terms([(e(0), &root * &root), (e(1), (&root * &root).scale(&int(3)))], e(4));
        let r = s.sqrt(&root).unwrap();
        assert_eq!(r.leading().unwrap().1, &root);
        assert_eq!(r.mul(&r), s);
        assert_eq!(s.sqrt(&rf(1)).unwrap_err(), ExactError::BranchMismatch);
    }

    #[test]
    fn division_with_negative_valuation() {
        let a = PuiseuxSeries::from_terms([(e(0), rf(1)), (e(1), rf(2))], e(4));
        let b = PuiseuxSeries::from_terms([(Exponent::new(1, 3), rf(3)), (Exponent::new(4, 3), rf(1))], Exponent::new(13, 3));
        let c = a.div(&b).unwrap();
        assert_eq!(c.valuation(), Some(Exponent::new(-1, 3)));
        assert_eq!(c.mul(&b).truncate(e(3)), a.truncate(e(3)));
        assert_eq!(a.div(&PuiseuxSeries::zero(e(3))).unwrap_err(), ExactError::ZeroDivisor);
    }

    #[test]
    fn record_round_trip() {
        let s = PuiseuxSeries::from_terms(
            [(Exponent::new(-1, 4), RationalFunction::laurent(&[(1, 1), (-1, 1)])), (Exponent::new(3, 4), rf(-5))],
            Exponent::new(15, 4),
        );
        let json = serde_json::to_string(&s).unwrap();
        let back: PuiseuxSeries = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }

    fn arb_unit_series() -> impl Strategy<Value = PuiseuxSeries> {
        prop::collection::vec((1i64..10, -3i64..4, -2i64..3), 0..5).prop_map(|ts| {
            let mut s = PuiseuxSeries::one(e(10));
            for (k, c, p) in ts {
                let coeff = RationalFunction::monomial(rational(c, 2), p);
                s.add_term(e(k), coeff);
            }
            s
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn exp_log_round_trip(s in arb_unit_series()) {
            prop_assert_eq!(s.log().unwrap().exp().unwrap(), s);
        }

        #[test]
        fn sqrt_squares_back(s in arb_unit_series(), lead in 1i64..4) {
            let c = RationalFunction::from_int(lead * lead);
            let s = s.scale(&c);
            let r = s.sqrt(&RationalFunction::from_int(-lead)).unwrap();
            prop_assert_eq!(r.mul(&r), s);
        }

        #[test]
        fn inverse_is_inverse(s in arb_unit_series()) {
            let prod = s.mul(&s.inv().unwrap());
            prop_assert_eq!(prod, PuiseuxSeries::one(e(10)));
        }
    }
}
