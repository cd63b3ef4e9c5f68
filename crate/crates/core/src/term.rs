//! Correlator products and their canonical forms.
//!
//! A [`Term`] is a product of brackets `<...>_g`. Each dummy label must occur exactly
//! twice in the term; the pair denotes an edge (possibly a self-edge) of the underlying
//! decorated graph. Two terms are equal when they differ only by a renaming of dummies,
//! a reordering of insertions within a bracket, or a reordering of brackets.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

/// Largest number of dummy pairs accepted by [`Term::validate`]. The canonical search
/// enumerates all `n!` dummy bijections.
pub const MAX_DUMMY_PAIRS: usize = 8;

/// Name of a contracted index. Ordered naturally, so `d2 < d10`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DummyName(String);

impl DummyName {
    pub fn new(name: impl Into<String>) -> DummyName {
        DummyName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn natural_key(&self) -> (&str, usize, &str) {
        let split = self.0.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (prefix, digits) = self.0.split_at(split);
        let digits = digits.trim_start_matches('0');
        (prefix, digits.len(), digits)
    }
}

impl Ord for DummyName {
    fn cmp(&self, other: &Self) -> Ordering {
        self.natural_key()
            .cmp(&other.natural_key())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for DummyName {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Label of one insertion. Variant order is the label order `x < i < j < dummies`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    External,
    HalfEdgeI,
    HalfEdgeJ,
    Dummy(DummyName),
}

impl Label {
    pub fn dummy(name: impl Into<String>) -> Label {
        Label::Dummy(DummyName::new(name))
    }

    pub fn is_half_edge(&self) -> bool {
        matches!(self, Label::HalfEdgeI | Label::HalfEdgeJ)
    }

    fn swapped_ij(&self) -> Label {
        match self {
            Label::HalfEdgeI => Label::HalfEdgeJ,
            Label::HalfEdgeJ => Label::HalfEdgeI,
            other => other.clone(),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::External => f.write_str("x"),
            Label::HalfEdgeI => f.write_str("i"),
            Label::HalfEdgeJ => f.write_str("j"),
            Label::Dummy(name) => f.write_str(name.as_str()),
        }
    }
}

/// One slot of a bracket: a label with its ψ-power.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Insertion {
    pub label: Label,
    pub psi: u32,
}

impl Insertion {
    pub fn new(label: Label, psi: u32) -> Insertion {
        Insertion { label, psi }
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.psi > 0 {
            write!(f, "^{}", self.psi)?;
        }
        Ok(())
    }
}

/// A bracket `<...>_g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Correlator {
    pub genus: u32,
    pub insertions: Vec<Insertion>,
}

impl Correlator {
    pub fn new(genus: u32, insertions: Vec<Insertion>) -> Correlator {
        Correlator { genus, insertions }
    }
}

// Brackets sort by genus, then size, then insertion sequence.
impl Ord for Correlator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.genus
            .cmp(&other.genus)
            .then_with(|| self.insertions.len().cmp(&other.insertions.len()))
            .then_with(|| self.insertions.cmp(&other.insertions))
    }
}

impl PartialOrd for Correlator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Correlator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.insertions.iter().format(" "))?;
        if self.genus > 0 {
            write!(f, "_{}", self.genus)?;
        }
        Ok(())
    }
}

/// A broken [`Term`] invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoCorrelators,
    EmptyCorrelator { index: usize },
    FreeDummy(DummyName),
    OverusedDummy { name: DummyName, count: usize },
    RepeatedLabel { label: Label, count: usize },
    TooManyDummies { pairs: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCorrelators => f.write_str("term has no brackets"),
            Violation::EmptyCorrelator { index } => write!(f, "bracket {} is empty", index + 1),
            Violation::FreeDummy(name) => write!(f, "dummy {} occurs once", name.as_str()),
            Violation::OverusedDummy { name, count } => {
                write!(f, "dummy {} occurs {count} times", name.as_str())
            }
            Violation::RepeatedLabel { label, count } => {
                write!(f, "label {label} occurs {count} times")
            }
            Violation::TooManyDummies { pairs } => {
                write!(
                    f,
                    "{pairs} dummy pairs exceed the limit of {MAX_DUMMY_PAIRS}"
                )
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("invalid term: {}", .0.iter().join("; "))]
pub struct InvalidTerm(pub Vec<Violation>);

/// A bracket as (genus, size, sorted (label code, ψ) slots).
type Encoded = (u32, usize, Vec<(u32, u32)>);

/// A product of correlators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    correlators: Vec<Correlator>,
}

impl Term {
    pub fn new(correlators: Vec<Correlator>) -> Term {
        Term { correlators }
    }

    pub fn correlators(&self) -> &[Correlator] {
        &self.correlators
    }

    pub fn insertions(&self) -> impl Iterator<Item = &Insertion> {
        self.correlators.iter().flat_map(|c| c.insertions.iter())
    }

    pub fn has_half_edge(&self) -> bool {
        self.insertions().any(|ins| ins.label.is_half_edge())
    }

    /// Lists every broken invariant; empty iff the term is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.correlators.is_empty() {
            out.push(Violation::NoCorrelators);
        }
        for (index, c) in self.correlators.iter().enumerate() {
            if c.insertions.is_empty() {
                out.push(Violation::EmptyCorrelator { index });
            }
        }

        let mut named: BTreeMap<&Label, usize> = BTreeMap::new();
        for ins in self.insertions() {
            *named.entry(&ins.label).or_default() += 1;
        }
        let mut pairs = 0;
        for (label, &count) in &named {
            match label {
                Label::Dummy(name) => match count {
                    1 => out.push(Violation::FreeDummy(name.clone())),
                    2 => pairs += 1,
                    _ => out.push(Violation::OverusedDummy {
                        name: name.clone(),
                        count,
                    }),
                },
                _ if count > 1 => out.push(Violation::RepeatedLabel {
                    label: (*label).clone(),
                    count,
                }),
                _ => {}
            }
        }
        if pairs > MAX_DUMMY_PAIRS {
            out.push(Violation::TooManyDummies { pairs });
        }
        out
    }

    pub fn check(&self) -> Result<(), InvalidTerm> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(InvalidTerm(violations))
        }
    }

    /// The canonical representative of this term's class under dummy renaming and
    /// reordering.
    ///
    /// Every bijection from the dummies onto `d1 < d2 < ...` is tried; for each, the
    /// insertions of every bracket and then the brackets themselves are sorted, and the
    /// lexicographically smallest bracket sequence wins.
    pub fn canonicalize(&self) -> Result<Term, InvalidTerm> {
        self.check()?;
        Ok(self.canonical_unchecked())
    }

    pub fn is_canonical(&self) -> bool {
        self.validate().is_empty() && self.canonical_unchecked() == *self
    }

    /// True iff both terms have the same canonical form.
    pub fn equal(&self, other: &Term) -> Result<bool, InvalidTerm> {
        Ok(self.canonicalize()? == other.canonicalize()?)
    }

    /// Exchanges the half-edges `i` and `j`; the result is canonical.
    pub fn swap_ij(&self) -> Result<Term, InvalidTerm> {
        self.check()?;
        Ok(self.swap_ij_unchecked())
    }

    pub(crate) fn swap_ij_unchecked(&self) -> Term {
        self.map_labels(Label::swapped_ij).canonical_unchecked()
    }

    /// Applies `f` to every label.
    pub fn map_labels(&self, mut f: impl FnMut(&Label) -> Label) -> Term {
        Term::new(
            self.correlators
                .iter()
                .map(|c| {
                    Correlator::new(
                        c.genus,
                        c.insertions
                            .iter()
                            .map(|ins| Insertion::new(f(&ins.label), ins.psi))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub(crate) fn canonical_unchecked(&self) -> Term {
        let mut dummies: Vec<&DummyName> = Vec::new();
        for ins in self.insertions() {
            if let Label::Dummy(name) = &ins.label {
                if !dummies.contains(&name) {
                    dummies.push(name);
                }
            }
        }
        let code_of = |label: &Label, perm: &[u32]| -> u32 {
            match label {
                Label::External => 0,
                Label::HalfEdgeI => 1,
                Label::HalfEdgeJ => 2,
                Label::Dummy(name) => {
                    let idx = dummies.iter().position(|d| *d == name).unwrap_or(0);
                    3 + perm[idx]
                }
            }
        };

        let encode = |perm: &[u32]| -> Vec<Encoded> {
            let mut brackets: Vec<_> = self
                .correlators
                .iter()
                .map(|c| {
                    let mut slots: Vec<(u32, u32)> = c
                        .insertions
                        .iter()
                        .map(|ins| (code_of(&ins.label, perm), ins.psi))
                        .collect();
                    slots.sort_unstable();
                    (c.genus, slots.len(), slots)
                })
                .collect();
            brackets.sort_unstable();
            brackets
        };

        let n = dummies.len() as u32;
        let best = (0..n)
            .permutations(n as usize)
            .map(|perm| encode(&perm))
            .min()
            .unwrap_or_else(|| encode(&[]));

        Term::new(
            best.into_iter()
                .map(|(genus, _, slots)| {
                    Correlator::new(
                        genus,
                        slots
                            .into_iter()
                            .map(|(code, psi)| Insertion::new(decode_label(code), psi))
                            .collect(),
                    )
                })
                .collect(),
        )
    }
}

fn decode_label(code: u32) -> Label {
    match code {
        0 => Label::External,
        1 => Label::HalfEdgeI,
        2 => Label::HalfEdgeJ,
        n => Label::dummy(format!("d{}", n - 2)),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.correlators {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}
