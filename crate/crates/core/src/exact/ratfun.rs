//! Rational functions in `v = y^(1/2)` over the rationals.
//!
//! Values are kept in a canonical form: the denominator is monic and coprime
//! to the numerator, and zero is `0/1`. Structural equality is therefore
//! mathematical equality.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ExactError, Poly, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RationalFunction::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        RationalFunction::constant(Rational::from_integer(c.into()))
    }

    /// `c * v^k` for any integer `k`.
    pub fn monomial(c: Rational, k: i64) -> Self {
        if k >= 0 {
            RationalFunction { num: Poly::monomial(c, k as usize), den: Poly::one() }
        } else {
            RationalFunction { num: Poly::constant(c), den: Poly::monomial(Rational::one(), (-k) as usize) }
        }
    }

    /// The variable `v`.
    pub fn v() -> Self {
        RationalFunction::monomial(Rational::one(), 1)
    }

    /// `y^k = v^(2k)`.
    pub fn y_pow(k: i64) -> Self {
        RationalFunction::monomial(Rational::one(), 2 * k)
    }

    /// Builds a Laurent polynomial `sum c_k v^k` from `(k, c_k)` pairs.
    pub fn laurent(terms: &[(i64, i64)]) -> Self {
        terms
            .iter()
            .map(|&(k, c)| RationalFunction::monomial(Rational::from_integer(c.into()), k))
            .fold(RationalFunction::zero(), |acc, t| &acc + &t)
    }

    pub fn new(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::ZeroDivisor);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RationalFunction::zero();
        }
        let g = Poly::gcd(&num, &den);
        let (mut num, mut den) = if g.is_one() { (num, den) } else { (num.div_exact(&g), den.div_exact(&g)) };
        let lead = den.leading().unwrap().clone();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RationalFunction { num, den }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The constant value if this function does not depend on `v`.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        (self.num.degree() == Some(0) && self.den.degree() == Some(0)).then(|| self.num.coeff(0))
    }

    /// Exact evaluation at `v = value`.
    pub fn eval(&self, value: &Rational) -> Result<Rational, ExactError> {
        let d = self.den.eval(value);
        if d.is_zero() {
            return Err(ExactError::PoleAtValue);
        }
        Ok(self.num.eval(value) / d)
    }

    /// Evaluation at `y = 1`, i.e. `v = 1`.
    pub fn at_y_one(&self) -> Result<Rational, ExactError> {
        self.eval(&Rational::one())
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::ZeroDivisor);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: i64) -> Result<Self, ExactError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = RationalFunction::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// True iff the function lies in `Q(y)`: only even powers of `v` occur.
    pub fn is_pure_in_y(&self) -> bool {
        self.num.is_even() && self.den.is_even()
    }

    /// Integer normal form `(P, Q)`: `self = P/Q` with integral coefficients,
    /// `Q` having a positive leading coefficient and the joint content 1.
    pub fn integer_form(&self) -> (Vec<BigInt>, Vec<BigInt>) {
        if self.is_zero() {
            return (vec![], vec![BigInt::one()]);
        }
        let (pn, sn) = self.num.to_integer_coeffs();
        let (pd, sd) = self.den.to_integer_coeffs();
        // self = (sn/sd) * pn/pd with pn, pd primitive.
        let s = sn / sd;
        let a = s.numer().clone();
        let b = s.denom().clone();
        (pn.into_iter().map(|c| c * &a).collect(), pd.into_iter().map(|c| c * &b).collect())
    }
}

impl Default for RationalFunction {
    fn default() -> Self {
        RationalFunction::zero()
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::normalized(&self.num + &rhs.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return RationalFunction::normalized(num, &self.den * &rhs.den);
        }
        let a = self.den.div_exact(&g);
        let b = rhs.den.div_exact(&g);
        let num = &(&self.num * &b) + &(&rhs.num * &a);
        RationalFunction::normalized(num, &(&a * &b) * &g)
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        // Cross-cancel before multiplying.
        let g1 = Poly::gcd(&self.num, &rhs.den);
        let g2 = Poly::gcd(&rhs.num, &self.den);
        let n1 = self.num.div_exact(&g1);
        let d2 = rhs.den.div_exact(&g1);
        let n2 = rhs.num.div_exact(&g2);
        let d1 = self.den.div_exact(&g2);
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let lead = den.leading().unwrap().clone();
        if lead.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lead.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl Div for &RationalFunction {
    type Output = Result<RationalFunction, ExactError>;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &RationalFunction) -> Result<RationalFunction, ExactError> {
        Ok(self * &rhs.inv()?)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

fn write_poly(f: &mut fmt::Formatter<'_>, coeffs: &[BigInt]) -> fmt::Result {
    let mut first = true;
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        if first {
            if c.is_negative() {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {sign} ")?;
        }
        first = false;
        match k {
            0 => write!(f, "{mag}")?,
            1 => write!(f, "{mag}*v")?,
            _ => write!(f, "{mag}*v^{k}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Canonical text form `(P)/(Q)` with integer coefficients, ascending powers
/// of `v`, every term written `c`, `c*v` or `c*v^k`.
impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = self.integer_form();
        write!(f, "(")?;
        write_poly(f, &p)?;
        write!(f, ")/(")?;
        write_poly(f, &q)?;
        write!(f, ")")
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_poly(s: &str) -> Result<Poly, ExactError> {
    let bad = || ExactError::Parse(s.to_string());
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut cur = String::new();
    for (i, ch) in compact.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 && !compact[..i].ends_with('^') {
            terms.push(std::mem::take(&mut cur));
        }
        cur.push(ch);
    }
    terms.push(cur);
    let mut coeffs: Vec<Rational> = Vec::new();
    for t in terms {
        let t = t.strip_prefix('+').unwrap_or(&t);
        let (c, k) = match t.split_once("*v") {
            None => (t, 0usize),
            Some((c, rest)) => {
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(bad)?.parse().map_err(|_| bad())?
                };
                (c, k)
            }
        };
        let c: BigInt = c.parse().map_err(|_| bad())?;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, Rational::zero());
        }
        coeffs[k] += Rational::from_integer(c);
    }
    Ok(Poly::from_coeffs(coeffs))
}

impl FromStr for RationalFunction {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ExactError::Parse(s.to_string());
        let s = s.trim();
        let (a, b) = s.split_once(")/(").ok_or_else(bad)?;
        let a = a.strip_prefix('(').ok_or_else(bad)?;
        let b = b.strip_suffix(')').ok_or_else(bad)?;
        RationalFunction::new(parse_poly(a)?, parse_poly(b)?)
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn y() -> RationalFunction {
        RationalFunction::y_pow(1)
    }

    #[test]
    fn evaluation_examples() {
        // (y^2 + y + 1)/y at y = 1
        let f = RationalFunction::laurent(&[(2, 1), (0, 1), (-2, 1)]);
        assert_eq!(f.at_y_one().unwrap(), q(3, 1));
        assert_eq!(RationalFunction::one().eval(&q(7, 3)).unwrap(), q(1, 1));
        // -y^(1/2)/(1+y) at y = 1
        let g = (&-&RationalFunction::v() / &(&RationalFunction::one() + &y())).unwrap();
        assert_eq!(g.at_y_one().unwrap(), q(-1, 2));
    }

    #[test]
    fn pole_is_reported() {
        let f = RationalFunction::one().scale(&q(1, 1));
        let g = (&f / &(&y() - &RationalFunction::one())).unwrap();
        assert_eq!(g.at_y_one(), Err(ExactError::PoleAtValue));
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = (&(&y() - &RationalFunction::one()) / &(&RationalFunction::v() - &RationalFunction::one())).unwrap();
        let b = &RationalFunction::v() + &RationalFunction::one();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "(1 + 1*v)/(1)");
    }

    #[test]
    fn text_round_trip() {
        let f = (&RationalFunction::laurent(&[(4, 2), (0, -3), (-2, 1)])
            / &RationalFunction::laurent(&[(2, 6), (0, 4)]))
        .unwrap()
        .scale(&q(5, 7));
        let s = f.to_string();
        assert_eq!(s.parse::<RationalFunction>().unwrap(), f);
        assert_eq!("(0)/(1)".parse::<RationalFunction>().unwrap(), RationalFunction::zero());
        assert!("1/2".parse::<RationalFunction>().is_err());
    }

    #[test]
    fn purity_predicate() {
        assert!(RationalFunction::laurent(&[(2, 1), (0, 1), (-2, 1)]).is_pure_in_y());
        assert!(!RationalFunction::v().is_pure_in_y());
    }

    fn arb_rf() -> impl Strategy<Value = RationalFunction> {
        (
            prop::collection::vec(-4i64..5, 1..4),
            prop::collection::vec(-4i64..5, 1..4),
            -3i64..4,
        )
            .prop_filter_map("nonzero denominator", |(n, d, shift)| {
                let den = Poly::from_i64(&d);
                if den.is_zero() {
                    return None;
                }
                let f = RationalFunction::new(Poly::from_i64(&n), den).ok()?;
                Some(&f * &RationalFunction::monomial(Rational::one(), shift))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn ring_axioms(a in arb_rf(), b in arb_rf(), c in arb_rf()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a - &a, RationalFunction::zero());
        }

        #[test]
        fn string_round_trip(a in arb_rf()) {
            prop_assert_eq!(a.to_string().parse::<RationalFunction>().unwrap(), a);
        }
    }
}
