//! Exact coefficients: rationals and rational-linear forms in the unknowns `c1..c30`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Number of unknown coefficients in the generic combination.
pub const UNKNOWN_COUNT: u32 = 30;

/// Index `k` of an unknown `c_k`, `1 <= k <= 30`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown(u32);

impl Unknown {
    pub fn new(k: u32) -> Option<Unknown> {
        (1..=UNKNOWN_COUNT).contains(&k).then_some(Unknown(k))
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Unknown> {
        (1..=UNKNOWN_COUNT).map(Unknown)
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// A value for each unknown.
pub type Assignment = BTreeMap<Unknown, Rational>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("assignment has no value for {0}")]
    MissingUnknown(Unknown),
    #[error("product of two forms with unknowns is not linear")]
    NonLinear,
}

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q` (optionally signed); the result is in lowest terms.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = parse_signed_integer(numer)?;
    let denom: BigInt = parse_signed_integer(denom)?;
    if denom.is_zero() {
        return None;
    }
    Some(Rational::new(numer, denom))
}

fn parse_signed_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

/// `constant + Σ q_k c_k` with exact rational entries. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    constant: Rational,
    unknowns: BTreeMap<Unknown, Rational>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::default()
    }

    pub fn one() -> Scalar {
        Scalar::from(Rational::one())
    }

    /// The pure unknown `c_k`.
    pub fn unknown(k: Unknown) -> Scalar {
        Scalar::term(Rational::one(), k)
    }

    /// `q · c_k`.
    pub fn term(q: Rational, k: Unknown) -> Scalar {
        let mut s = Scalar::zero();
        s.add_unknown(k, q);
        s
    }

    pub fn from_parts(
        constant: Rational,
        unknowns: impl IntoIterator<Item = (Unknown, Rational)>,
    ) -> Scalar {
        let mut s = Scalar::from(constant);
        for (k, q) in unknowns {
            s.add_unknown(k, q);
        }
        s
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn unknowns(&self) -> &BTreeMap<Unknown, Rational> {
        &self.unknowns
    }

    pub fn coefficient(&self, k: Unknown) -> Rational {
        self.unknowns
            .get(&k)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.unknowns.is_empty()
    }

    /// True when no unknown occurs.
    pub fn is_rational(&self) -> bool {
        self.unknowns.is_empty()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.constant)
    }

    pub fn add_unknown(&mut self, k: Unknown, q: Rational) {
        let entry = self.unknowns.entry(k).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.unknowns.remove(&k);
        }
    }

    pub fn scale(&self, q: &Rational) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar {
            constant: &self.constant * q,
            unknowns: self.unknowns.iter().map(|(k, c)| (*k, c * q)).collect(),
        }
    }

    /// Product of two scalars, defined when at least one side is a pure rational.
    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (self.as_rational(), other.as_rational()) {
            (Some(q), _) => Ok(other.scale(q)),
            (_, Some(q)) => Ok(self.scale(q)),
            _ => Err(ScalarError::NonLinear),
        }
    }

    /// `constant + Σ q_k · assignment(k)`.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Rational, ScalarError> {
        let mut total = self.constant.clone();
        for (k, q) in &self.unknowns {
            let value = assignment.get(k).ok_or(ScalarError::MissingUnknown(*k))?;
            total += q * value;
        }
        Ok(total)
    }
}

impl From<Rational> for Scalar {
    fn from(constant: Rational) -> Scalar {
        Scalar {
            constant,
            unknowns: BTreeMap::new(),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::from(integer(n))
    }
}

impl Add for &Scalar {
    type Output = Scalar;

    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out.constant += &rhs.constant;
        for (k, q) in &rhs.unknowns {
            out.add_unknown(*k, q.clone());
        }
        out
    }
}

impl Add for Scalar {
    type Output = Scalar;

    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Neg for &Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        Scalar {
            constant: -&self.constant,
            unknowns: self.unknowns.iter().map(|(k, q)| (*k, -q)).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;

    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sub for &Scalar {
    type Output = Scalar;

    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;

    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(k: u32) -> Unknown {
        Unknown::new(k).unwrap()
    }

    fn table_subset() -> Assignment {
        [
            (c(2), rational(-5, 72)),
            (c(3), rational(-1, 252)),
            (c(4), rational(5, 72)),
            (c(6), rational(41, 21)),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn unknown_range() {
        assert!(Unknown::new(0).is_none());
        assert!(Unknown::new(31).is_none());
        assert_eq!(Unknown::new(30).unwrap().to_string(), "c30");
    }

    #[test]
    fn evaluate_first_two_relations_at_table() {
        let e1 = Scalar::unknown(c(2)) + Scalar::unknown(c(4));
        assert_eq!(e1.evaluate(&table_subset()).unwrap(), integer(0));

        let e2 = Scalar::term(integer(3), c(3)) - Scalar::unknown(c(4))
            + Scalar::term(rational(1, 24), c(6));
        assert_eq!(e2.evaluate(&table_subset()).unwrap(), integer(0));
    }

    #[test]
    fn evaluate_pure_rational_ignores_assignment() {
        let q = Scalar::from(rational(-7, 3));
        assert_eq!(q.evaluate(&Assignment::new()).unwrap(), rational(-7, 3));
    }

    #[test]
    fn evaluate_reports_missing_unknown() {
        let s = Scalar::unknown(c(9));
        assert_eq!(
            s.evaluate(&table_subset()),
            Err(ScalarError::MissingUnknown(c(9)))
        );
    }

    #[test]
    fn cancellation_removes_entries() {
        let s = Scalar::unknown(c(5)) - Scalar::unknown(c(5));
        assert!(s.is_zero());
        assert!(s.unknowns().is_empty());
    }

    #[test]
    fn nonlinear_product_rejected() {
        let a = Scalar::unknown(c(1));
        assert_eq!(a.checked_mul(&a), Err(ScalarError::NonLinear));
        let half = Scalar::from(rational(1, 2));
        assert_eq!(
            a.checked_mul(&half).unwrap(),
            Scalar::term(rational(1, 2), c(1))
        );
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("10/-4"), Some(rational(-5, 2)));
        assert_eq!(parse_rational("-3"), Some(integer(-3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("+1"), None);
        assert_eq!(parse_rational("1/2/3"), None);
        assert_eq!(rational(6, -8).to_string(), "-3/4");
        assert_eq!(integer(5).to_string(), "5");
    }
}
