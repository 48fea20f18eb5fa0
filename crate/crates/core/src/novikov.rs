//! Truncated one-variable Novikov series with exact rational exponents.
//!
//! A series is a finite sum `a_1 P^{l_1} + ... + a_n P^{l_n}` with strictly
//! increasing exponents, every exponent strictly below the series' truncation.
//! Exponents and rational coefficients are exact, so sign tests on the
//! valuation are decided without rounding.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NovikovError {
    #[error("coefficient fields differ: {0:?} vs {1:?}")]
    FieldMismatch(CoefficientField, CoefficientField),
    #[error("division by zero in coefficient field")]
    DivisionByZero,
    #[error("series is not a valuation-zero unit")]
    NotAUnit,
    #[error("{0} is not an element of the two-element field")]
    NotInField(String),
    #[error("cannot parse series: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientField {
    Rational,
    Binary,
}

/// A field element. Binary elements are stored as booleans.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    F2(bool),
}

impl Scalar {
    pub fn field(&self) -> CoefficientField {
        match self {
            Scalar::Q(_) => CoefficientField::Rational,
            Scalar::F2(_) => CoefficientField::Binary,
        }
    }

    pub fn zero(field: CoefficientField) -> Self {
        match field {
            CoefficientField::Rational => Scalar::Q(BigRational::zero()),
            CoefficientField::Binary => Scalar::F2(false),
        }
    }

    pub fn one(field: CoefficientField) -> Self {
        match field {
            CoefficientField::Rational => Scalar::Q(BigRational::one()),
            CoefficientField::Binary => Scalar::F2(true),
        }
    }

    /// Embeds a rational into `field`. For the two-element field the
    /// denominator must be odd.
    pub fn from_rational(field: CoefficientField, q: BigRational) -> Result<Self, NovikovError> {
        match field {
            CoefficientField::Rational => Ok(Scalar::Q(q)),
            CoefficientField::Binary => {
                let two = BigInt::from(2);
                if q.denom().is_multiple_of(&two) {
                    return Err(NovikovError::NotInField(q.to_string()));
                }
                Ok(Scalar::F2(q.numer().is_odd()))
            }
        }
    }

    pub fn from_i64(field: CoefficientField, v: i64) -> Self {
        match field {
            CoefficientField::Rational => Scalar::Q(BigRational::from_integer(v.into())),
            CoefficientField::Binary => Scalar::F2(v.rem_euclid(2) == 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(q) => q.is_zero(),
            Scalar::F2(b) => !b,
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a + b),
            (Scalar::F2(a), Scalar::F2(b)) => Scalar::F2(a ^ b),
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a * b),
            (Scalar::F2(a), Scalar::F2(b)) => Scalar::F2(*a && *b),
            _ => panic!("mixed coefficient fields"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(-a),
            Scalar::F2(a) => Scalar::F2(*a),
        }
    }

    pub fn inv(&self) -> Result<Scalar, NovikovError> {
        if self.is_zero() {
            return Err(NovikovError::DivisionByZero);
        }
        Ok(match self {
            Scalar::Q(a) => Scalar::Q(a.recip()),
            Scalar::F2(_) => Scalar::F2(true),
        })
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Q(a) => a.to_f64().unwrap_or(f64::NAN),
            Scalar::F2(b) => *b as u8 as f64,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(q) => write!(f, "{q}"),
            Scalar::F2(b) => write!(f, "{}", *b as u8),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exponent: BigRational,
    pub coeff: Scalar,
}

/// Membership of a series in the Novikov subrings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NovikovClass {
    /// Valuation strictly positive.
    Positive,
    /// Valuation exactly zero.
    NonNegativeOnly,
    /// Valuation negative.
    Negative,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NovikovSeries {
    field: CoefficientField,
    terms: Vec<Term>,
    truncation: BigRational,
}

/// Parses `"3"`, `"-3/4"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, NovikovError> {
    let s = s.trim();
    let bad = || NovikovError::Parse(format!("bad rational literal {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(NovikovError::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Rounds `x` to the nearest multiple of `1/denominator`.
pub fn rationalize(x: f64, denominator: u64) -> BigRational {
    assert!(x.is_finite(), "cannot rationalize {x}");
    let d = denominator.max(1);
    let scaled = (x * d as f64).round();
    let n = BigInt::from(scaled as i128);
    BigRational::new(n, BigInt::from(d))
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Sorts, merges equal exponents, drops zero coefficients and every term at
/// or above the truncation.
pub fn nv_normalize(
    field: CoefficientField,
    raw: Vec<(BigRational, Scalar)>,
    truncation: BigRational,
) -> NovikovSeries {
    let mut raw: Vec<(BigRational, Scalar)> = raw.into_iter().filter(|(e, _)| *e < truncation).collect();
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
    for (exponent, coeff) in raw {
        assert_eq!(coeff.field(), field, "coefficient outside the series field");
        match terms.last_mut() {
            Some(last) if last.exponent == exponent => last.coeff = last.coeff.add(&coeff),
            _ => terms.push(Term { exponent, coeff }),
        }
    }
    terms.retain(|t| !t.coeff.is_zero());
    NovikovSeries { field, terms, truncation }
}

impl NovikovSeries {
    pub fn zero(field: CoefficientField, truncation: BigRational) -> Self {
        NovikovSeries { field, terms: Vec::new(), truncation }
    }

    pub fn monomial(coeff: Scalar, exponent: BigRational, truncation: BigRational) -> Self {
        let field = coeff.field();
        nv_normalize(field, vec![(exponent, coeff)], truncation)
    }

    pub fn field(&self) -> CoefficientField {
        self.field
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn truncation(&self) -> &BigRational {
        &self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn with_truncation(&self, truncation: BigRational) -> Self {
        let raw = self.terms.iter().map(|t| (t.exponent.clone(), t.coeff.clone())).collect();
        nv_normalize(self.field, raw, truncation)
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { exponent: t.exponent.clone(), coeff: t.coeff.neg() })
            .collect();
        NovikovSeries { field: self.field, terms, truncation: self.truncation.clone() }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let raw = self.terms.iter().map(|t| (t.exponent.clone(), t.coeff.mul(c))).collect();
        nv_normalize(self.field, raw, self.truncation.clone())
    }

    /// Inverse of a series with valuation 0. The leading coefficient is
    /// inverted and the remainder expanded as a geometric series until every
    /// new term reaches the truncation.
    pub fn invert_leading_unit(&self) -> Result<Self, NovikovError> {
        let lead = self.leading().ok_or(NovikovError::NotAUnit)?;
        if !lead.exponent.is_zero() {
            return Err(NovikovError::NotAUnit);
        }
        let c0_inv = lead.coeff.inv()?;
        // self = c0 (1 + r) with r of positive valuation
        let r = self.scale(&c0_inv).sub_one();
        let minus_r = r.neg();
        let one = NovikovSeries::monomial(Scalar::one(self.field), BigRational::zero(), self.truncation.clone());
        let mut sum = one.clone();
        let mut power = one;
        loop {
            power = nv_mul(&power, &minus_r).expect("same field");
            if power.is_zero() {
                break;
            }
            sum = nv_add(&sum, &power).expect("same field");
        }
        Ok(sum.scale(&c0_inv))
    }

    fn sub_one(&self) -> Self {
        let mut raw: Vec<(BigRational, Scalar)> =
            self.terms.iter().map(|t| (t.exponent.clone(), t.coeff.clone())).collect();
        raw.push((BigRational::zero(), Scalar::one(self.field).neg()));
        nv_normalize(self.field, raw, self.truncation.clone())
    }

    /// Parses the text form produced by `Display`.
    pub fn parse(text: &str, field: CoefficientField) -> Result<Self, NovikovError> {
        let text = text.trim();
        let open = text
            .rfind("(trunc ")
            .ok_or_else(|| NovikovError::Parse("missing \"(trunc L)\" suffix".into()))?;
        let tail = text[open + 7..]
            .strip_suffix(')')
            .ok_or_else(|| NovikovError::Parse("unclosed truncation".into()))?;
        let truncation = parse_rational(tail)?;
        let body = text[..open].trim();
        let mut raw = Vec::new();
        if body != "0" {
            for part in body.split(" + ") {
                let (c, e) = part
                    .split_once("*P^")
                    .ok_or_else(|| NovikovError::Parse(format!("term {part:?} lacks \"*P^\"")))?;
                let coeff = Scalar::from_rational(field, parse_rational(c)?)?;
                raw.push((parse_rational(e)?, coeff));
            }
        }
        Ok(nv_normalize(field, raw, truncation))
    }
}

impl fmt::Display for NovikovSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*P^{}", t.coeff, t.exponent)?;
        }
        write!(f, " (trunc {})", self.truncation)
    }
}

impl FromStr for NovikovSeries {
    type Err = NovikovError;

    /// Parses with rational coefficients.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NovikovSeries::parse(s, CoefficientField::Rational)
    }
}

fn check_fields(a: &NovikovSeries, b: &NovikovSeries) -> Result<(), NovikovError> {
    if a.field != b.field {
        return Err(NovikovError::FieldMismatch(a.field, b.field));
    }
    Ok(())
}

fn min_trunc(a: &NovikovSeries, b: &NovikovSeries) -> BigRational {
    if a.truncation <= b.truncation {
        a.truncation.clone()
    } else {
        b.truncation.clone()
    }
}

pub fn nv_add(a: &NovikovSeries, b: &NovikovSeries) -> Result<NovikovSeries, NovikovError> {
    check_fields(a, b)?;
    let raw = a
        .terms
        .iter()
        .chain(b.terms.iter())
        .map(|t| (t.exponent.clone(), t.coeff.clone()))
        .collect();
    Ok(nv_normalize(a.field, raw, min_trunc(a, b)))
}

pub fn nv_mul(a: &NovikovSeries, b: &NovikovSeries) -> Result<NovikovSeries, NovikovError> {
    check_fields(a, b)?;
    let trunc = min_trunc(a, b);
    let mut raw = Vec::with_capacity(a.terms.len() * b.terms.len());
    for s in &a.terms {
        for t in &b.terms {
            let e = &s.exponent + &t.exponent;
            if e < trunc {
                raw.push((e, s.coeff.mul(&t.coeff)));
            }
        }
    }
    Ok(nv_normalize(a.field, raw, trunc))
}

/// Multiplies by `P^shift`. The truncation moves with the exponents so that
/// shifting back and forth is lossless.
pub fn nv_shift(a: &NovikovSeries, shift: &BigRational) -> NovikovSeries {
    let terms = a
        .terms
        .iter()
        .map(|t| Term { exponent: &t.exponent + shift, coeff: t.coeff.clone() })
        .collect();
    NovikovSeries { field: a.field, terms, truncation: &a.truncation + shift }
}

/// Smallest exponent, `None` standing for +∞ on the zero series.
pub fn nv_valuation(a: &NovikovSeries) -> Option<BigRational> {
    a.terms.first().map(|t| t.exponent.clone())
}

pub fn nv_classify(a: &NovikovSeries) -> NovikovClass {
    match nv_valuation(a) {
        None => NovikovClass::Zero,
        Some(v) => match v.cmp(&BigRational::zero()) {
            Ordering::Greater => NovikovClass::Positive,
            Ordering::Equal => NovikovClass::NonNegativeOnly,
            Ordering::Less => NovikovClass::Negative,
        },
    }
}

pub fn valuation_f64(a: &NovikovSeries) -> f64 {
    nv_valuation(a).map_or(f64::INFINITY, |v| v.to_f64().unwrap_or(f64::NAN))
}

pub fn is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: CoefficientField = CoefficientField::Rational;

    fn r(n: i64, d: i64) -> BigRational {
        rational(n, d)
    }

    fn q(n: i64) -> Scalar {
        Scalar::from_i64(Q, n)
    }

    fn series(terms: &[(i64, i64, i64)], trunc: i64) -> NovikovSeries {
        let raw = terms.iter().map(|&(n, d, c)| (r(n, d), q(c))).collect();
        nv_normalize(Q, raw, r(trunc, 1))
    }

    #[test]
    fn normalize_cancels_sorts_and_truncates() {
        assert!(series(&[(1, 2, 2), (1, 2, -2)], 10).is_zero());
        let s = series(&[(1, 1, 3), (0, 1, 1)], 10);
        assert_eq!(s.terms()[0].exponent, r(0, 1));
        assert_eq!(s.terms()[1].coeff, q(3));
        assert_eq!(series(&[(0, 1, 1), (12, 1, 5)], 10), series(&[(0, 1, 1)], 10));
    }

    #[test]
    fn addition_examples() {
        let one = series(&[(0, 1, 1)], 10);
        assert!(nv_add(&one, &one.neg()).unwrap().is_zero());
        let a = series(&[(0, 1, 1), (1, 2, 2)], 10);
        let b = series(&[(1, 2, 1)], 10);
        assert_eq!(nv_add(&a, &b).unwrap(), series(&[(0, 1, 1), (1, 2, 3)], 10));
        let c = nv_normalize(Q, vec![(r(3, 10), q(1))], r(1, 2));
        let d = nv_normalize(Q, vec![(r(7, 10), q(1))], r(10, 1));
        assert_eq!(nv_add(&c, &d).unwrap(), c);
    }

    #[test]
    fn multiplication_examples() {
        let a = series(&[(0, 1, 1), (1, 2, 2)], 10);
        let b = series(&[(3, 10, 1)], 10);
        assert_eq!(nv_mul(&a, &b).unwrap(), series(&[(3, 10, 1), (8, 10, 2)], 10));
        assert!(nv_mul(&a, &NovikovSeries::zero(Q, r(10, 1))).unwrap().is_zero());
    }

    #[test]
    fn field_mismatch_rejected() {
        let a = series(&[(0, 1, 1)], 10);
        let b = NovikovSeries::monomial(Scalar::F2(true), r(0, 1), r(10, 1));
        assert!(matches!(nv_add(&a, &b), Err(NovikovError::FieldMismatch(..))));
        assert!(matches!(nv_mul(&a, &b), Err(NovikovError::FieldMismatch(..))));
    }

    #[test]
    fn shift_valuation_and_classification() {
        let one = series(&[(0, 1, 1)], 10);
        assert_eq!(nv_shift(&one, &r(3, 10)), nv_shift(&series(&[(0, 1, 1)], 10), &r(3, 10)));
        assert_eq!(nv_valuation(&nv_shift(&one, &r(3, 10))), Some(r(3, 10)));
        let back = nv_shift(&nv_shift(&one, &r(3, 10)), &r(-3, 10));
        assert_eq!(back, one);
        assert_eq!(nv_valuation(&series(&[(1, 5, 1), (1, 1, 1)], 10)), Some(r(1, 5)));
        assert_eq!(nv_valuation(&NovikovSeries::zero(Q, r(1, 1))), None);
        assert_eq!(nv_classify(&series(&[(1, 10, 1)], 10)), NovikovClass::Positive);
        assert_eq!(nv_classify(&series(&[(0, 1, 1), (2, 5, 1)], 10)), NovikovClass::NonNegativeOnly);
        assert_eq!(nv_classify(&series(&[(-1, 10, 1)], 10)), NovikovClass::Negative);
        assert_eq!(nv_classify(&NovikovSeries::zero(Q, r(1, 1))), NovikovClass::Zero);
    }

    #[test]
    fn binary_field_arithmetic() {
        let f = CoefficientField::Binary;
        let one = NovikovSeries::monomial(Scalar::one(f), r(0, 1), r(4, 1));
        assert!(nv_add(&one, &one).unwrap().is_zero());
        let x = nv_normalize(f, vec![(r(0, 1), Scalar::F2(true)), (r(1, 2), Scalar::F2(true))], r(4, 1));
        let sq = nv_mul(&x, &x).unwrap();
        // (1 + P^{1/2})^2 = 1 + P in characteristic two
        assert_eq!(sq, nv_normalize(f, vec![(r(0, 1), Scalar::F2(true)), (r(1, 1), Scalar::F2(true))], r(4, 1)));
        assert!(Scalar::from_rational(f, r(1, 2)).is_err());
        assert_eq!(Scalar::from_rational(f, r(3, 5)).unwrap(), Scalar::F2(true));
    }

    #[test]
    fn unit_inverse() {
        let u = series(&[(0, 1, 2), (1, 3, 1), (1, 1, -5)], 3);
        let inv = u.invert_leading_unit().unwrap();
        let prod = nv_mul(&u, &inv).unwrap();
        assert_eq!(prod, series(&[(0, 1, 1)], 3));
        assert!(series(&[(1, 3, 1)], 3).invert_leading_unit().is_err());
    }

    #[test]
    fn text_round_trip_examples() {
        let s = series(&[(0, 1, 1), (1, 2, -3)], 10);
        assert_eq!(s.to_string(), "1*P^0 + -3*P^1/2 (trunc 10)");
        assert_eq!("1*P^0 + -3*P^1/2 (trunc 10)".parse::<NovikovSeries>().unwrap(), s);
        let z = NovikovSeries::zero(Q, r(5, 2));
        assert_eq!(z.to_string(), "0 (trunc 5/2)");
        assert_eq!(z.to_string().parse::<NovikovSeries>().unwrap(), z);
        assert!("1*P^0".parse::<NovikovSeries>().is_err());
    }

    #[test]
    fn rationalize_rounds_to_grid() {
        assert_eq!(rationalize(0.25, 1000), r(1, 4));
        assert_eq!(rationalize(-0.1234567, 1000), r(-123, 1000));
    }

    fn arb_series(trunc: i64) -> impl Strategy<Value = NovikovSeries> {
        proptest::collection::vec((-6i64..40, 1i64..5, -5i64..6), 0..6).prop_map(move |v| {
            let raw = v.into_iter().map(|(n, d, c)| (r(n, d * 2), q(c))).collect();
            nv_normalize(Q, raw, r(trunc, 1))
        })
    }

    fn arb_nonneg_series(trunc: i64) -> impl Strategy<Value = NovikovSeries> {
        proptest::collection::vec((0i64..40, 1i64..5, -5i64..6), 0..6).prop_map(move |v| {
            let raw = v.into_iter().map(|(n, d, c)| (r(n, d * 2), q(c))).collect();
            nv_normalize(Q, raw, r(trunc, 1))
        })
    }

    /// Untruncated triple product, truncated once at the end.
    fn brute_triple(a: &NovikovSeries, b: &NovikovSeries, c: &NovikovSeries) -> NovikovSeries {
        let mut raw = Vec::new();
        for x in a.terms() {
            for y in b.terms() {
                for z in c.terms() {
                    let e = &x.exponent + &y.exponent + &z.exponent;
                    raw.push((e, x.coeff.mul(&y.coeff).mul(&z.coeff)));
                }
            }
        }
        nv_normalize(Q, raw, a.truncation().clone())
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_nonneg_series(6), b in arb_nonneg_series(6), c in arb_nonneg_series(6)) {
            prop_assert_eq!(nv_add(&a, &b).unwrap(), nv_add(&b, &a).unwrap());
            prop_assert_eq!(nv_mul(&a, &b).unwrap(), nv_mul(&b, &a).unwrap());
            let ab_c = nv_mul(&nv_mul(&a, &b).unwrap(), &c).unwrap();
            let a_bc = nv_mul(&a, &nv_mul(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            prop_assert_eq!(ab_c, brute_triple(&a, &b, &c));
            let lhs = nv_mul(&a, &nv_add(&b, &c).unwrap()).unwrap();
            let rhs = nv_add(&nv_mul(&a, &b).unwrap(), &nv_mul(&a, &c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sum_and_single_product_allow_negative_exponents(a in arb_series(6), b in arb_series(6), c in arb_series(6)) {
            let lhs = nv_mul(&a, &nv_add(&b, &c).unwrap()).unwrap();
            let rhs = nv_add(&nv_mul(&a, &b).unwrap(), &nv_mul(&a, &c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(nv_add(&nv_add(&a, &b).unwrap(), &c).unwrap(), nv_add(&a, &nv_add(&b, &c).unwrap()).unwrap());
        }

        #[test]
        fn normal_form_invariants(a in arb_series(6)) {
            for w in a.terms().windows(2) {
                prop_assert!(w[0].exponent < w[1].exponent);
            }
            for t in a.terms() {
                prop_assert!(!t.coeff.is_zero());
                prop_assert!(t.exponent < *a.truncation());
            }
        }

        #[test]
        fn shift_is_invertible(a in arb_series(6), n in -20i64..20, d in 1i64..7) {
            let l = r(n, d);
            prop_assert_eq!(nv_shift(&nv_shift(&a, &l), &-l.clone()), a.clone());
            let v = nv_valuation(&a).map(|v| v + &l);
            prop_assert_eq!(nv_valuation(&nv_shift(&a, &l)), v);
        }

        #[test]
        fn text_round_trip(a in arb_series(6)) {
            prop_assert_eq!(a.to_string().parse::<NovikovSeries>().unwrap(), a);
        }

        #[test]
        fn classification_invariant_under_units(a in arb_series(6), u in arb_series(6), c in 1i64..5) {
            // build a valuation-zero unit with nonnegative exponents
            let mut raw: Vec<(BigRational, Scalar)> = u
                .terms()
                .iter()
                .filter(|t| t.exponent > BigRational::zero())
                .map(|t| (t.exponent.clone(), t.coeff.clone()))
                .collect();
            raw.push((BigRational::zero(), q(c)));
            let unit = nv_normalize(Q, raw, r(40, 1));
            let prod = nv_mul(&a, &unit).unwrap();
            prop_assert_eq!(nv_classify(&prod), nv_classify(&a));
        }
    }
}
