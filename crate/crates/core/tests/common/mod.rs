// Shared generators for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use gwis::scalar::{integer, rational};
use gwis::{Correlator, Expression, Insertion, Label, Rational, Scalar, Term, Unknown};
use rand::seq::SliceRandom;
use rand::Rng;

const NAMES: &[&str] = &["mu", "nu", "alpha", "beta", "k", "m2", "p10", "q"];

/// A valid term with at most `max_correlators` brackets, at most `max_pairs` dummy
/// pairs and ψ-powers at most 3.
pub fn random_term<R: Rng>(rng: &mut R, max_correlators: usize, max_pairs: usize) -> Term {
    loop {
        let n = rng.gen_range(1..=max_correlators);
        let pairs = rng.gen_range(0..=max_pairs);
        let mut names: Vec<&str> = NAMES.to_vec();
        names.shuffle(rng);

        let mut labels = Vec::new();
        for fixed in [Label::External, Label::HalfEdgeI, Label::HalfEdgeJ] {
            if rng.gen_bool(0.6) {
                labels.push(fixed);
            }
        }
        for name in &names[..pairs] {
            labels.push(Label::dummy(*name));
            labels.push(Label::dummy(*name));
        }
        if labels.len() < n {
            continue;
        }
        labels.shuffle(rng);

        let mut slots: Vec<Vec<Insertion>> = vec![Vec::new(); n];
        for (pos, label) in labels.into_iter().enumerate() {
            let target = if pos < n { pos } else { rng.gen_range(0..n) };
            let psi = if rng.gen_bool(0.7) {
                0
            } else {
                rng.gen_range(1..=3)
            };
            slots[target].push(Insertion::new(label, psi));
        }
        let correlators = slots
            .into_iter()
            .map(|ins| Correlator::new(rng.gen_range(0..=3), ins))
            .collect();
        let t = Term::new(correlators);
        assert!(t.validate().is_empty(), "generator produced {t}");
        return t;
    }
}

/// Same term with dummies renamed by a random bijection onto fresh names.
pub fn rename_dummies<R: Rng>(rng: &mut R, t: &Term) -> Term {
    let mut fresh: Vec<String> = (0..12).map(|n| format!("z{n}")).collect();
    fresh.shuffle(rng);
    let mut map: BTreeMap<String, String> = BTreeMap::new();
    t.map_labels(|label| match label {
        Label::Dummy(name) => {
            let next = map.len();
            let target = map
                .entry(name.as_str().to_string())
                .or_insert_with(|| fresh[next].clone());
            Label::dummy(target.clone())
        }
        other => other.clone(),
    })
}

/// Same term with brackets and the insertions inside each bracket shuffled.
pub fn shuffle_term<R: Rng>(rng: &mut R, t: &Term) -> Term {
    let mut correlators = t.correlators().to_vec();
    for c in &mut correlators {
        c.insertions.shuffle(rng);
    }
    correlators.shuffle(rng);
    Term::new(correlators)
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let n = rng.gen_range(-60..=60);
    let d = rng.gen_range(1..=400);
    rational(n, d)
}

pub fn random_scalar<R: Rng>(rng: &mut R) -> Scalar {
    if rng.gen_bool(0.6) {
        return Scalar::from(random_rational(rng));
    }
    let constant = if rng.gen_bool(0.3) {
        random_rational(rng)
    } else {
        integer(0)
    };
    let count = rng.gen_range(1..=3);
    let unknowns: Vec<(Unknown, Rational)> = (0..count)
        .map(|_| {
            (
                Unknown::new(rng.gen_range(1..=30)).unwrap(),
                random_rational(rng),
            )
        })
        .collect();
    Scalar::from_parts(constant, unknowns)
}

pub fn random_expression<R: Rng>(rng: &mut R) -> Expression {
    let mut e = Expression::zero();
    for _ in 0..rng.gen_range(0..=5) {
        let t = random_term(rng, 4, 3);
        e.add_term(random_scalar(rng), &t).unwrap();
    }
    e
}
