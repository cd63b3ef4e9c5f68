mod common;

use common::{
    random_expression, random_rational, random_scalar, random_term, rename_dummies, shuffle_term,
};
use gwis::print::{from_json, json, latex, plain};
use gwis::{parse_expression, Assignment, Expression, Scalar, Unknown};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn canonical_form_is_idempotent(seed: u64) {
        let t = random_term(&mut rng(seed), 4, 3);
        let c = t.canonicalize().unwrap();
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.canonicalize().unwrap(), c);
    }

    #[test]
    fn renaming_and_reordering_preserve_class(seed: u64) {
        let mut r = rng(seed);
        let t = random_term(&mut r, 4, 3);
        let renamed = rename_dummies(&mut r, &t);
        let shuffled = shuffle_term(&mut r, &renamed);
        prop_assert_eq!(t.canonicalize().unwrap(), shuffled.canonicalize().unwrap());
        prop_assert!(t.equal(&shuffled).unwrap());
    }

    #[test]
    fn swap_ij_is_an_involution(seed: u64) {
        let t = random_term(&mut rng(seed), 4, 3);
        prop_assert_eq!(t.swap_ij().unwrap().swap_ij().unwrap(), t.canonicalize().unwrap());
    }

    #[test]
    fn symmetrization_is_idempotent_and_symmetric(seed: u64) {
        let e = random_expression(&mut rng(seed));
        let s = e.symmetrize_ij();
        prop_assert_eq!(s.symmetrize_ij(), s.clone());
        prop_assert_eq!(s.swap_ij(), s);
    }

    #[test]
    fn plain_and_json_round_trip(seed: u64) {
        let e = random_expression(&mut rng(seed));
        prop_assert_eq!(parse_expression(&plain(&e)).unwrap(), e.clone());
        prop_assert_eq!(from_json(&json(&e)).unwrap(), e.clone());
        prop_assert!(!latex(&e).is_empty());
    }

    #[test]
    fn addition_then_negation_cancels(seed: u64) {
        let mut r = rng(seed);
        let e = random_expression(&mut r);
        let f = random_expression(&mut r);
        let one = Scalar::from(1);
        let sum = Expression::combine(&one, &e, &one, &f).unwrap();
        let back = Expression::combine(&one, &sum, &Scalar::from(-1), &f).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn evaluation_is_linear(seed: u64) {
        let mut r = rng(seed);
        let a = random_scalar(&mut r);
        let b = random_scalar(&mut r);
        let q = random_rational(&mut r);
        let assignment: Assignment = Unknown::all().map(|k| (k, random_rational(&mut r))).collect();
        let lhs = (&a.scale(&q) + &b).evaluate(&assignment).unwrap();
        let rhs = a.evaluate(&assignment).unwrap() * &q + b.evaluate(&assignment).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
