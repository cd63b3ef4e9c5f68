//! Finite linear combinations of canonical terms.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::scalar::{rational, Assignment, Rational, Scalar, ScalarError};
use crate::term::{InvalidTerm, Term};

/// `Σ s_t · t` over canonical terms `t`. Zero coefficients are never stored, so the empty
/// expression is the only representation of zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Expression {
    terms: BTreeMap<Term, Scalar>,
}

impl Expression {
    pub fn zero() -> Expression {
        Expression::default()
    }

    pub fn from_term(scalar: Scalar, term: &Term) -> Result<Expression, InvalidTerm> {
        let mut e = Expression::zero();
        e.add_term(scalar, term)?;
        Ok(e)
    }

    /// Adds `scalar · term`, canonicalizing `term` first.
    pub fn add_term(&mut self, scalar: Scalar, term: &Term) -> Result<(), InvalidTerm> {
        let key = term.canonicalize()?;
        self.add_canonical(key, scalar);
        Ok(())
    }

    fn add_canonical(&mut self, key: Term, scalar: Scalar) {
        if scalar.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            Entry::Vacant(slot) => {
                slot.insert(scalar);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get() + &scalar;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    slot.insert(sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&Term, &Scalar)> {
        self.terms.iter()
    }

    /// The coefficient of `term` (after canonicalization), zero when absent.
    pub fn coefficient_of(&self, term: &Term) -> Result<Scalar, InvalidTerm> {
        let key = term.canonicalize()?;
        Ok(self.terms.get(&key).cloned().unwrap_or_default())
    }

    /// `a·self`.
    pub fn scale(&self, a: &Scalar) -> Result<Expression, ScalarError> {
        let mut out = Expression::zero();
        for (t, s) in &self.terms {
            out.add_canonical(t.clone(), a.checked_mul(s)?);
        }
        Ok(out)
    }

    /// `a·e1 + b·e2`. Fails only when a product of two forms with unknowns would be
    /// needed.
    pub fn combine(
        a: &Scalar,
        e1: &Expression,
        b: &Scalar,
        e2: &Expression,
    ) -> Result<Expression, ScalarError> {
        let mut out = e1.scale(a)?;
        for (t, s) in &e2.terms {
            out.add_canonical(t.clone(), b.checked_mul(s)?);
        }
        Ok(out)
    }

    /// Exchanges `i` and `j` in every term.
    pub fn swap_ij(&self) -> Expression {
        let mut out = Expression::zero();
        for (t, s) in &self.terms {
            out.add_canonical(t.swap_ij_unchecked(), s.clone());
        }
        out
    }

    /// `(e + swap_ij(e)) / 2`.
    pub fn symmetrize_ij(&self) -> Expression {
        let half = rational(1, 2);
        let mut out = Expression::zero();
        for (t, s) in &self.terms {
            let s = s.scale(&half);
            out.add_canonical(t.swap_ij_unchecked(), s.clone());
            out.add_canonical(t.clone(), s);
        }
        out
    }

    /// Substitutes values for every unknown; the result has pure rational coefficients.
    pub fn substitute(&self, assignment: &Assignment) -> Result<Expression, ScalarError> {
        let mut out = Expression::zero();
        for (t, s) in &self.terms {
            out.add_canonical(t.clone(), Scalar::from(s.evaluate(assignment)?));
        }
        Ok(out)
    }

    /// The rational coefficient of each term, if no unknowns occur.
    pub fn rational_coefficients(&self) -> Option<BTreeMap<&Term, &Rational>> {
        self.terms
            .iter()
            .map(|(t, s)| s.as_rational().map(|q| (t, q)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_term;
    use crate::scalar::{integer, Unknown};

    fn term(src: &str) -> Term {
        parse_term(src).unwrap()
    }

    fn c(k: u32) -> Scalar {
        Scalar::unknown(Unknown::new(k).unwrap())
    }

    #[test]
    fn cancellation_gives_empty() {
        let e = Expression::from_term(c(3), &term("<x mu nu><mu nu>_1")).unwrap();
        let out = Expression::combine(&Scalar::one(), &e, &Scalar::from(-1), &e).unwrap();
        assert!(out.is_zero());
    }

    #[test]
    fn combine_with_unknown_coefficients() {
        let s2 = term("<x a b><mu a b><mu>_2");
        let s4 = term("<x mu mu nu><nu^1>_2");
        let e2 = Expression::from_term(Scalar::one(), &s2).unwrap();
        let e4 = Expression::from_term(Scalar::one(), &s4).unwrap();
        let e = Expression::combine(&c(2), &e2, &c(4), &e4).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.coefficient_of(&s2).unwrap(), c(2));
        assert_eq!(e.coefficient_of(&s4).unwrap(), c(4));
    }

    #[test]
    fn nonlinear_combine_is_an_error() {
        let e = Expression::from_term(c(1), &term("<x^3>_3")).unwrap();
        assert_eq!(
            Expression::combine(&c(2), &e, &Scalar::zero(), &Expression::zero()),
            Err(ScalarError::NonLinear)
        );
    }

    #[test]
    fn coefficient_of_absent_term_is_zero() {
        assert!(Expression::zero()
            .coefficient_of(&term("<x>_3"))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn symmetrize_splits_asymmetric_term() {
        let t = term("<x i mu><j b b><mu^1>_2");
        let e = Expression::from_term(Scalar::one(), &t).unwrap();
        let sym = e.symmetrize_ij();
        assert_eq!(sym.len(), 2);
        let half = Scalar::from(rational(1, 2));
        assert_eq!(sym.coefficient_of(&t).unwrap(), half);
        assert_eq!(sym.coefficient_of(&t.swap_ij().unwrap()).unwrap(), half);
        assert_eq!(sym.symmetrize_ij(), sym);
        assert_eq!(sym.swap_ij(), sym);
    }

    #[test]
    fn symmetrize_keeps_symmetric_expression() {
        let t = term("<x i j mu><mu>_1");
        let e = Expression::from_term(Scalar::from(integer(7)), &t).unwrap();
        assert_eq!(e.symmetrize_ij(), e);
    }

    #[test]
    fn substitute_evaluates_coefficients() {
        let t = term("<x^3>_3");
        let e = Expression::from_term(c(1) + Scalar::from(2), &t).unwrap();
        let assignment: Assignment = [(Unknown::new(1).unwrap(), integer(-2))].into();
        assert!(e.substitute(&assignment).unwrap().is_zero());
        assert!(e.substitute(&Assignment::new()).is_err());
    }
}
