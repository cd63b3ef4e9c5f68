//! The basis strata, the generic combination `E = Σ c_k (k)`, the printed right-hand side
//! of the relation, and the tabulated solution.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::data::{data_lines, DataError, SOLUTION_FILE, STRATA_FILE, THEOREM_FILE};
use crate::expr::Expression;
use crate::parse::{parse_term, parse_terms};
use crate::scalar::{
    integer, parse_rational, Assignment, Rational, Scalar, Unknown, UNKNOWN_COUNT,
};
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("stratum index {0} is outside 1..=30")]
pub struct OutOfRange(pub u32);

/// Splits `k: rest` and checks that `k` is the expected running index.
fn labeled_line<'a>(
    file: &'static str,
    line: usize,
    text: &'a str,
    expected: u32,
) -> Result<&'a str, DataError> {
    let err = |message: String| DataError::Line {
        file,
        line,
        message,
    };
    let (k, rest) = text
        .split_once(':')
        .ok_or_else(|| err("expected \"k: ...\"".to_string()))?;
    let k: u32 = k
        .trim()
        .parse()
        .map_err(|_| err(format!("bad index {:?}", k.trim())))?;
    if k != expected {
        return Err(err(format!("expected index {expected}, found {k}")));
    }
    Ok(rest.trim())
}

/// The 30 basis strata, stored canonically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCatalog {
    entries: Vec<Term>,
    index: BTreeMap<Term, u32>,
}

impl BasisCatalog {
    pub fn from_text(text: &str) -> Result<BasisCatalog, DataError> {
        let mut entries = Vec::new();
        let mut index = BTreeMap::new();
        for (line, content) in data_lines(text) {
            let k = entries.len() as u32 + 1;
            let src = labeled_line(STRATA_FILE, line, content, k)?;
            let term = parse_term(src)
                .map(|t| t.canonical_unchecked())
                .map_err(|e| DataError::Line {
                    file: STRATA_FILE,
                    line,
                    message: e.to_string(),
                })?;
            if let Some(prev) = index.insert(term.clone(), k) {
                return Err(DataError::Line {
                    file: STRATA_FILE,
                    line,
                    message: format!("stratum {k} equals stratum {prev}"),
                });
            }
            entries.push(term);
        }
        if entries.len() != UNKNOWN_COUNT as usize {
            return Err(DataError::integrity(
                STRATA_FILE,
                format!("expected {UNKNOWN_COUNT} strata, found {}", entries.len()),
            ));
        }
        Ok(BasisCatalog { entries, index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Canonical term of stratum `k`.
    pub fn basis(&self, k: u32) -> Result<&Term, OutOfRange> {
        k.checked_sub(1)
            .and_then(|i| self.entries.get(i as usize))
            .ok_or(OutOfRange(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Term)> {
        self.entries.iter().zip(1..).map(|(t, k)| (k, t))
    }

    /// The index of the stratum equal to `t`, if any.
    pub fn lookup(&self, t: &Term) -> Option<u32> {
        let key = t.canonicalize().ok()?;
        self.index.get(&key).copied()
    }

    /// `E = Σ c_k (k)`.
    pub fn generic_e(&self) -> Expression {
        let mut e = Expression::zero();
        for (k, t) in self.iter() {
            let c = Unknown::new(k).expect("catalog has 30 entries");
            e.add_term(Scalar::unknown(c), t)
                .expect("catalog terms are valid");
        }
        e
    }

    /// `Σ_k values(k) · (k)` over the given indices.
    pub fn combination<'a>(
        &self,
        values: impl IntoIterator<Item = (u32, &'a Rational)>,
    ) -> Expression {
        let mut e = Expression::zero();
        for (k, q) in values {
            if let Ok(t) = self.basis(k) {
                e.add_term(Scalar::from(q.clone()), t)
                    .expect("catalog terms are valid");
            }
        }
        e
    }
}

/// The printed right-hand side of `(1) = Σ_{k≥2} w_k (k)`, matched to the catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremRhs {
    coeffs: BTreeMap<u32, Rational>,
    printed: Vec<(Term, Rational)>,
}

impl TheoremRhs {
    pub fn from_text(text: &str, basis: &BasisCatalog) -> Result<TheoremRhs, DataError> {
        let body: String = data_lines(text)
            .map(|(_, l)| l)
            .collect::<Vec<_>>()
            .join("\n");
        let terms =
            parse_terms(&body).map_err(|e| DataError::integrity(THEOREM_FILE, e.to_string()))?;
        let mut coeffs = BTreeMap::new();
        let mut printed = Vec::new();
        for (scalar, term) in terms {
            let q = scalar.as_rational().cloned().ok_or_else(|| {
                DataError::integrity(THEOREM_FILE, format!("coefficient of {term} has unknowns"))
            })?;
            if q.is_negative() {
                return Err(DataError::integrity(
                    THEOREM_FILE,
                    format!("coefficient {q} of {term} is negative"),
                ));
            }
            let k = basis.lookup(&term).ok_or_else(|| {
                DataError::integrity(THEOREM_FILE, format!("{term} is not a basis stratum"))
            })?;
            if k == 1 {
                return Err(DataError::integrity(
                    THEOREM_FILE,
                    "stratum 1 appears on the right-hand side",
                ));
            }
            if coeffs.insert(k, q.clone()).is_some() {
                return Err(DataError::integrity(
                    THEOREM_FILE,
                    format!("stratum {k} appears twice"),
                ));
            }
            printed.push((term, q));
        }
        if coeffs.len() != UNKNOWN_COUNT as usize - 1 {
            return Err(DataError::integrity(
                THEOREM_FILE,
                format!("expected 29 terms, found {}", coeffs.len()),
            ));
        }
        Ok(TheoremRhs { coeffs, printed })
    }

    /// Printed coefficient of stratum `k` (2..=30); stratum 1 reads as 1.
    pub fn coefficient(&self, k: u32) -> Option<&Rational> {
        self.coeffs.get(&k)
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, Rational> {
        &self.coeffs
    }

    /// Terms in printed order, with their printed dummy names.
    pub fn printed(&self) -> &[(Term, Rational)] {
        &self.printed
    }

    pub fn expression(&self, basis: &BasisCatalog) -> Expression {
        basis.combination(self.coeffs.iter().map(|(k, q)| (*k, q)))
    }
}

/// The tabulated solution, normalized at `c1 = -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionTable {
    values: BTreeMap<u32, Rational>,
}

impl SolutionTable {
    pub fn from_text(text: &str) -> Result<SolutionTable, DataError> {
        let mut values = BTreeMap::new();
        for (line, content) in data_lines(text) {
            let k = values.len() as u32 + 1;
            let src = labeled_line(SOLUTION_FILE, line, content, k)?;
            let q = parse_rational(src).ok_or_else(|| DataError::Line {
                file: SOLUTION_FILE,
                line,
                message: format!("bad rational {src:?}"),
            })?;
            values.insert(k, q);
        }
        if values.len() != UNKNOWN_COUNT as usize {
            return Err(DataError::integrity(
                SOLUTION_FILE,
                format!("expected {UNKNOWN_COUNT} values, found {}", values.len()),
            ));
        }
        if values[&1] != integer(-1) {
            return Err(DataError::integrity(SOLUTION_FILE, "c1 must be -1"));
        }
        Ok(SolutionTable { values })
    }

    pub fn value(&self, k: u32) -> Option<&Rational> {
        self.values.get(&k)
    }

    pub fn values(&self) -> &BTreeMap<u32, Rational> {
        &self.values
    }

    pub fn assignment(&self) -> Assignment {
        self.values
            .iter()
            .map(|(k, q)| (Unknown::new(*k).expect("indices 1..=30"), q.clone()))
            .collect()
    }
}

/// How a coefficient vector compares with the printed right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremComparison {
    /// `-c_k / c_1`, the right-hand-side weight implied by the vector.
    pub implied: BTreeMap<u32, Rational>,
    pub magnitude_match: BTreeMap<u32, bool>,
    /// Indices whose implied weight and printed weight are nonzero with opposite signs.
    pub sign_flips: BTreeSet<u32>,
}

impl TheoremComparison {
    pub fn all_magnitudes_match(&self) -> bool {
        self.magnitude_match.values().all(|m| *m)
    }
}

/// Compares `values` (indexed 1..=30, any normalization with `c1 != 0`) with the printed
/// weights. Returns `None` when `c1` is zero or missing.
pub fn compare_with_theorem(
    theorem: &TheoremRhs,
    values: &BTreeMap<u32, Rational>,
) -> Option<TheoremComparison> {
    let c1 = values.get(&1).filter(|q| !q.is_zero())?;
    let mut out = TheoremComparison {
        implied: BTreeMap::new(),
        magnitude_match: BTreeMap::new(),
        sign_flips: BTreeSet::new(),
    };
    for k in 2..=UNKNOWN_COUNT {
        let implied = values
            .get(&k)
            .map(|q| -(q / c1))
            .unwrap_or_else(Rational::zero);
        let printed = theorem
            .coefficient(k)
            .cloned()
            .unwrap_or_else(Rational::zero);
        out.magnitude_match
            .insert(k, implied.abs() == printed.abs());
        if !implied.is_zero()
            && !printed.is_zero()
            && implied.is_negative() != printed.is_negative()
        {
            out.sign_flips.insert(k);
        }
        out.implied.insert(k, implied);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::scalar::rational;

    fn data() -> &'static Dataset {
        Dataset::embedded()
    }

    #[test]
    fn first_and_last_strata() {
        let b = &data().basis;
        assert_eq!(
            *b.basis(1).unwrap(),
            parse_term("<x^3>_3").unwrap().canonicalize().unwrap()
        );
        assert!(b
            .basis(30)
            .unwrap()
            .equal(&parse_term("<x mu mu nu nu a a>").unwrap())
            .unwrap());
        assert_eq!(b.basis(0), Err(OutOfRange(0)));
        assert_eq!(b.basis(31), Err(OutOfRange(31)));
    }

    #[test]
    fn strata_seven_and_eight_differ() {
        let b = &data().basis;
        assert!(!b.basis(7).unwrap().equal(b.basis(8).unwrap()).unwrap());
    }

    #[test]
    fn generic_e_has_pure_unknowns() {
        let b = &data().basis;
        let e = b.generic_e();
        assert_eq!(e.len(), 30);
        for (k, t) in b.iter() {
            assert_eq!(
                e.coefficient_of(t).unwrap(),
                Scalar::unknown(Unknown::new(k).unwrap())
            );
        }
    }

    #[test]
    fn theorem_printed_weights() {
        let d = data();
        let rhs = d.theorem.expression(&d.basis);
        let coeff = |k| rhs.coefficient_of(d.basis.basis(k).unwrap()).unwrap();
        assert_eq!(coeff(2), Scalar::from(rational(5, 72)));
        assert_eq!(coeff(21), Scalar::zero());
        assert_eq!(coeff(30), Scalar::from(rational(1, 53760)));
        assert_eq!(d.theorem.coefficient(21), Some(&integer(0)));
        assert_eq!(d.theorem.printed().len(), 29);
        assert_eq!(rhs.len(), 28);
    }

    #[test]
    fn theorem_rejects_unmatched_or_negative() {
        let b = &data().basis;
        assert!(TheoremRhs::from_text("1/2*<x mu mu>", b).is_err());
        assert!(TheoremRhs::from_text("-1/2*<x mu nu><mu nu>_1", b).is_err());
        assert!(TheoremRhs::from_text("<x^3>_3", b).is_err());
        assert!(TheoremRhs::from_text("<x mu nu><mu nu>_1 + <x a b><a b>_1", b).is_err());
    }

    #[test]
    fn solution_table_checks() {
        assert!(SolutionTable::from_text("1: 1\n").is_err());
        assert!(SolutionTable::from_text("2: 1\n").is_err());
        let t = &data().table;
        assert_eq!(t.value(1), Some(&integer(-1)));
        assert_eq!(t.value(10), Some(&rational(191, 120960)));
    }

    #[test]
    fn catalog_rejects_duplicates_and_short_files() {
        assert!(BasisCatalog::from_text("1: <x a b><a b>_1\n2: <x mu nu><nu mu>_1\n").is_err());
        assert!(BasisCatalog::from_text("1: <x^3>_3\n").is_err());
        assert!(BasisCatalog::from_text("1: <x mu>\n").is_err());
    }

    #[test]
    fn substituted_e_is_signed_relation() {
        let d = data();
        let values = d.table.values();
        let at_table = d
            .basis
            .generic_e()
            .substitute(&d.table.assignment())
            .unwrap();
        let cmp = compare_with_theorem(&d.theorem, values).unwrap();
        let mut expected = d
            .basis
            .combination(cmp.implied.iter().map(|(k, q)| (*k, q)));
        expected
            .add_term(Scalar::from(-1), d.basis.basis(1).unwrap())
            .unwrap();
        assert_eq!(at_table, expected);
    }
}
