//! The constraint equations on `c1..c30` and exact linear algebra over ℚ.
//!
//! Two independent elimination routes are provided: rational Gauss-Jordan reduction
//! ([`rank_and_kernel`]) and fraction-free Bareiss elimination over ℤ
//! ([`rank_and_kernel_fraction_free`]).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataError, Dataset, EQUATIONS_FILE};
use crate::parse::parse_term;
use crate::print::{plain_scalar, JsonScalar};
use crate::scalar::{integer, Assignment, Rational, Scalar, ScalarError, Unknown, UNKNOWN_COUNT};
use crate::strata::compare_with_theorem;
use crate::term::Term;

pub const EQUATION_COUNT: usize = 49;

/// Rank the embedded system must have for the relation to be unique up to scale.
pub const EXPECTED_RANK: usize = UNKNOWN_COUNT as usize - 1;

/// One linear constraint: the coefficient of `label` in the image of `E`, set to zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintEquation {
    pub ordinal: u32,
    /// Canonical form of the output-graph basis vector.
    pub label: Term,
    /// The label as written in the data file.
    pub label_source: String,
    pub form: Scalar,
    pub note: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonEquation {
    ordinal: u32,
    label: String,
    form: JsonScalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

/// The 49 equations in order of appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSet {
    equations: Vec<ConstraintEquation>,
}

impl EquationSet {
    /// Parses and checks `equations.json`: exactly 49 entries with ordinals 1..=49,
    /// homogeneous forms, and labels that are valid terms containing `i` or `j`.
    pub fn from_json(text: &str) -> Result<EquationSet, DataError> {
        let raw: Vec<JsonEquation> = serde_json::from_str(text)
            .map_err(|e| DataError::integrity(EQUATIONS_FILE, e.to_string()))?;
        if raw.len() != EQUATION_COUNT {
            return Err(DataError::integrity(
                EQUATIONS_FILE,
                format!("expected {EQUATION_COUNT} equations, found {}", raw.len()),
            ));
        }
        let mut equations = Vec::with_capacity(raw.len());
        for (expected, eq) in (1..).zip(raw) {
            let fail = |message: String| {
                DataError::integrity(
                    EQUATIONS_FILE,
                    format!("equation {}: {message}", eq.ordinal),
                )
            };
            if eq.ordinal != expected {
                return Err(fail(format!("expected ordinal {expected}")));
            }
            let form = Scalar::try_from(&eq.form).map_err(|e| fail(e.to_string()))?;
            if !form.constant().is_zero() {
                return Err(fail(format!(
                    "form is not homogeneous (constant {})",
                    form.constant()
                )));
            }
            let label = parse_term(&eq.label)
                .map_err(|e| fail(format!("label: {e}")))?
                .canonical_unchecked();
            if !label.has_half_edge() {
                return Err(fail("label has neither i nor j".to_string()));
            }
            equations.push(ConstraintEquation {
                ordinal: eq.ordinal,
                label,
                label_source: eq.label,
                form,
                note: eq.note,
            });
        }
        Ok(EquationSet { equations })
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<JsonEquation> = self
            .equations
            .iter()
            .map(|eq| JsonEquation {
                ordinal: eq.ordinal,
                label: eq.label_source.clone(),
                form: (&eq.form).into(),
                note: eq.note.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&raw).expect("serializable")
    }

    pub fn equations(&self) -> &[ConstraintEquation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn matrix(&self) -> RationalMatrix {
        assemble_matrix(&self.equations)
    }

    pub fn residuals(
        &self,
        assignment: &Assignment,
    ) -> Result<BTreeMap<u32, Rational>, ScalarError> {
        residuals(&self.equations, assignment)
    }
}

/// Exact evaluation of each form at `assignment`, keyed by ordinal.
pub fn residuals(
    equations: &[ConstraintEquation],
    assignment: &Assignment,
) -> Result<BTreeMap<u32, Rational>, ScalarError> {
    equations
        .iter()
        .map(|eq| Ok((eq.ordinal, eq.form.evaluate(assignment)?)))
        .collect()
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> RationalMatrix {
        let mut m = RationalMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> RationalMatrix {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        RationalMatrix {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, q: Rational) {
        self.entries[r * self.cols + c] = q;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn scale_row(&mut self, r: usize, q: &Rational) {
        for c in 0..self.cols {
            let v = self.get(r, c) * q;
            self.set(r, c, v);
        }
    }

    /// The matrix restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> RationalMatrix {
        RationalMatrix::from_rows(rows.iter().map(|&r| self.row(r).to_vec()).collect())
            .with_cols(self.cols)
    }

    fn with_cols(mut self, cols: usize) -> RationalMatrix {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

/// Row `r`, column `k-1` holds the coefficient of `c_k` in equation `r+1`.
pub fn assemble_matrix(equations: &[ConstraintEquation]) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(equations.len(), UNKNOWN_COUNT as usize);
    for (r, eq) in equations.iter().enumerate() {
        for (k, q) in eq.form.unknowns() {
            m.set(r, k.index() as usize - 1, q.clone());
        }
    }
    m
}

/// Rank and a basis of the right null space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub rank: usize,
    pub basis: Vec<Vec<Rational>>,
}

impl Kernel {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Gauss-Jordan reduction over ℚ. The pivot in each column is the candidate entry with
/// the largest numerator magnitude.
pub fn rank_and_kernel(m: &RationalMatrix) -> Kernel {
    let mut a = m.to_rows();
    let cols = m.cols();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len())
            .filter(|&i| !a[i][col].is_zero())
            .max_by(|&i, &j| {
                a[i][col]
                    .numer()
                    .abs()
                    .cmp(&a[j][col].numer().abs())
                    .then(j.cmp(&i))
            })
        else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][col].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &factor * p;
            }
        }
        pivots.push(col);
        r += 1;
    }

    let basis = (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][free].clone();
            }
            v
        })
        .collect();
    Kernel {
        rank: pivots.len(),
        basis,
    }
}

/// Fraction-free (Bareiss) elimination: rows are scaled to integers and every
/// intermediate division is exact. The kernel is read off the integer echelon form by
/// back substitution.
pub fn rank_and_kernel_fraction_free(m: &RationalMatrix) -> Kernel {
    let cols = m.cols();
    let mut a: Vec<Vec<BigInt>> = (0..m.rows())
        .map(|r| {
            let row = m.row(r);
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect()
        })
        .collect();

    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            for j in col + 1..cols {
                let num = &pivot_row[col] * &row[j] - &row[col] * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[col] = BigInt::zero();
        }
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }

    let basis = (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate().rev() {
                let sum = (pc + 1..cols).fold(Rational::zero(), |acc, j| {
                    acc + Rational::from_integer(a[row][j].clone()) * &v[j]
                });
                v[pc] = -sum / Rational::from_integer(a[row][pc].clone());
            }
            v
        })
        .collect();
    Kernel {
        rank: pivots.len(),
        basis,
    }
}

/// True when both kernels have the same rank and span the same space.
pub fn kernels_agree(a: &Kernel, b: &Kernel) -> bool {
    if a.rank != b.rank || a.dimension() != b.dimension() {
        return false;
    }
    if a.basis.is_empty() {
        return true;
    }
    let stacked = RationalMatrix::from_rows(a.basis.iter().chain(&b.basis).cloned().collect());
    rank_and_kernel(&stacked).rank == a.dimension()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("no unique normalized solution (kernel dimension {0})")]
    NotUnique(usize),
    #[error("normalization impossible: kernel vector vanishes at {0}")]
    ZeroPivot(Unknown),
    #[error("matrix has {0} columns, expected 30")]
    Width(usize),
}

/// The unique kernel vector with `c_pivot = value`.
pub fn solve_normalized(
    m: &RationalMatrix,
    pivot: Unknown,
    value: &Rational,
) -> Result<Assignment, SolveError> {
    if m.cols() != UNKNOWN_COUNT as usize {
        return Err(SolveError::Width(m.cols()));
    }
    let kernel = rank_and_kernel(m);
    if kernel.dimension() != 1 {
        return Err(SolveError::NotUnique(kernel.dimension()));
    }
    let v = &kernel.basis[0];
    let at = &v[pivot.index() as usize - 1];
    if at.is_zero() {
        return Err(SolveError::ZeroPivot(pivot));
    }
    let scale = value / at;
    Ok(Unknown::all()
        .zip(v)
        .map(|(k, q)| (k, q * &scale))
        .collect())
}

/// Rank analysis of the system with some rows removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    pub dropped: Vec<u32>,
    pub rank: usize,
    pub kernel_dimension: usize,
    pub solution: Option<Assignment>,
    pub solution_matches_table: bool,
}

/// Result of the full pipeline.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub equation_count: usize,
    pub rank: usize,
    pub kernel_dimension: usize,
    pub fraction_free_rank: usize,
    pub fraction_free_kernel_dimension: usize,
    pub elimination_paths_agree: bool,
    pub solution: Option<Assignment>,
    pub solve_error: Option<String>,
    /// Residuals at the tabulated vector, keyed by ordinal.
    pub residuals: BTreeMap<u32, Rational>,
    pub table: BTreeMap<u32, Rational>,
    /// Solved value equals tabulated value, per index. All false without a solution.
    pub table_match: BTreeMap<u32, bool>,
    pub theorem: BTreeMap<u32, Rational>,
    /// `|table_k|` equals the printed weight, for k in 2..=30.
    pub theorem_magnitude_match: BTreeMap<u32, bool>,
    pub theorem_sign_flips: BTreeSet<u32>,
    /// Same comparison made against the solved vector, when there is one.
    pub solution_theorem_magnitude_match: Option<BTreeMap<u32, bool>>,
    /// Present when some residual is nonzero: the system without those rows.
    pub consistent_subsystem: Option<Subsystem>,
}

impl VerificationReport {
    pub fn nonzero_residuals(&self) -> Vec<u32> {
        self.residuals
            .iter()
            .filter(|(_, q)| !q.is_zero())
            .map(|(o, _)| *o)
            .collect()
    }

    pub fn passed(&self) -> bool {
        self.nonzero_residuals().is_empty()
            && self.rank == EXPECTED_RANK
            && self.elimination_paths_agree
            && self.table_match.values().all(|m| *m)
            && self.theorem_magnitude_match.values().all(|m| *m)
            && self
                .solution_theorem_magnitude_match
                .as_ref()
                .is_some_and(|m| m.values().all(|x| *x))
    }

    pub fn to_json(&self) -> String {
        let s = |q: &Rational| q.to_string();
        let vector = |a: &Assignment| -> BTreeMap<u32, String> {
            a.iter().map(|(k, q)| (k.index(), s(q))).collect()
        };
        let v = ReportJson {
            pass: self.passed(),
            equations: self.equation_count,
            unknowns: UNKNOWN_COUNT as usize,
            rank: self.rank,
            kernel_dimension: self.kernel_dimension,
            fraction_free_rank: self.fraction_free_rank,
            fraction_free_kernel_dimension: self.fraction_free_kernel_dimension,
            elimination_paths_agree: self.elimination_paths_agree,
            solution: self.solution.as_ref().map(vector),
            solve_error: self.solve_error.clone(),
            residuals: self.residuals.iter().map(|(o, q)| (*o, s(q))).collect(),
            nonzero_residuals: self.nonzero_residuals(),
            table_match: self.table_match.clone(),
            theorem_magnitude_match: self.theorem_magnitude_match.clone(),
            theorem_sign_flips: self.theorem_sign_flips.clone(),
            solution_theorem_magnitude_match: self.solution_theorem_magnitude_match.clone(),
            consistent_subsystem: self.consistent_subsystem.as_ref().map(|sub| SubsystemJson {
                dropped: sub.dropped.clone(),
                rank: sub.rank,
                kernel_dimension: sub.kernel_dimension,
                solution: sub.solution.as_ref().map(vector),
                solution_matches_table: sub.solution_matches_table,
            }),
        };
        serde_json::to_string_pretty(&v).expect("serializable")
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        let nonzero = self.nonzero_residuals();
        writeln!(w, "equations                {}", self.equation_count).ok();
        writeln!(w, "unknowns                 {UNKNOWN_COUNT}").ok();
        writeln!(w, "rank (gauss-jordan)      {}", self.rank).ok();
        writeln!(w, "rank (fraction-free)     {}", self.fraction_free_rank).ok();
        writeln!(w, "kernel dimension         {}", self.kernel_dimension).ok();
        writeln!(
            w,
            "elimination paths agree  {}",
            yes_no(self.elimination_paths_agree)
        )
        .ok();
        match &self.solve_error {
            Some(e) => writeln!(w, "normalized solve         {e}"),
            None => writeln!(w, "normalized solve         ok (c1 = -1)"),
        }
        .ok();
        writeln!(
            w,
            "zero residuals at table  {}/{}",
            self.residuals.len() - nonzero.len(),
            self.residuals.len()
        )
        .ok();
        for o in &nonzero {
            writeln!(w, "  equation {o}: residual {}", self.residuals[o]).ok();
        }
        if let Some(sub) = &self.consistent_subsystem {
            let dropped: Vec<String> = sub.dropped.iter().map(u32::to_string).collect();
            writeln!(
                w,
                "without equations {}: rank {}, kernel dimension {}, solution {} the table",
                dropped.join(", "),
                sub.rank,
                sub.kernel_dimension,
                if sub.solution_matches_table {
                    "equals"
                } else {
                    "differs from"
                }
            )
            .ok();
        }
        writeln!(w).ok();
        writeln!(
            w,
            "{:>3}  {:>14}  {:>14}  {:>5}  {:>14}  {:>5}  {:>4}",
            "k", "table", "solved", "match", "printed", "|.|=", "sign"
        )
        .ok();
        for (k, q) in &self.table {
            let solved = self
                .solution
                .as_ref()
                .and_then(|s| Unknown::new(*k).and_then(|u| s.get(&u)))
                .map_or_else(|| "-".to_string(), Rational::to_string);
            let printed = if *k == 1 {
                "1".to_string()
            } else {
                self.theorem
                    .get(k)
                    .map_or_else(|| "-".to_string(), Rational::to_string)
            };
            let magnitude = self
                .theorem_magnitude_match
                .get(k)
                .map_or("", |m| yes_no(*m));
            let flip = if self.theorem_sign_flips.contains(k) {
                "flip"
            } else {
                ""
            };
            writeln!(
                w,
                "{k:>3}  {:>14}  {solved:>14}  {:>5}  {printed:>14}  {magnitude:>5}  {flip:>4}",
                q.to_string(),
                yes_no(self.table_match[k]),
            )
            .ok();
        }
        writeln!(w).ok();
        let flips: Vec<String> = self.theorem_sign_flips.iter().map(u32::to_string).collect();
        writeln!(w, "sign flips vs printed    {}", flips.join(", ")).ok();
        writeln!(
            w,
            "result                   {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
        .ok();
        out
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct SubsystemJson {
    dropped: Vec<u32>,
    rank: usize,
    kernel_dimension: usize,
    solution: Option<BTreeMap<u32, String>>,
    solution_matches_table: bool,
}

#[derive(Serialize)]
struct ReportJson {
    pass: bool,
    equations: usize,
    unknowns: usize,
    rank: usize,
    kernel_dimension: usize,
    fraction_free_rank: usize,
    fraction_free_kernel_dimension: usize,
    elimination_paths_agree: bool,
    solution: Option<BTreeMap<u32, String>>,
    solve_error: Option<String>,
    residuals: BTreeMap<u32, String>,
    nonzero_residuals: Vec<u32>,
    table_match: BTreeMap<u32, bool>,
    theorem_magnitude_match: BTreeMap<u32, bool>,
    theorem_sign_flips: BTreeSet<u32>,
    solution_theorem_magnitude_match: Option<BTreeMap<u32, bool>>,
    consistent_subsystem: Option<SubsystemJson>,
}

fn matches_table(solution: &Assignment, table: &BTreeMap<u32, Rational>) -> bool {
    solution.len() == table.len()
        && solution
            .iter()
            .all(|(k, q)| table.get(&k.index()) == Some(q))
}

/// Runs assemble, both eliminations, the normalized solve (`c1 = -1`), residuals at the
/// table, and the comparison with the printed right-hand side.
pub fn verify(data: &Dataset) -> VerificationReport {
    let m = data.equations.matrix();
    let gauss = rank_and_kernel(&m);
    let bareiss = rank_and_kernel_fraction_free(&m);
    let c1 = Unknown::new(1).expect("c1");
    let minus_one = integer(-1);

    let (solution, solve_error) = match solve_normalized(&m, c1, &minus_one) {
        Ok(s) => (Some(s), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let table = data.table.values().clone();
    let residuals = data
        .equations
        .residuals(&data.table.assignment())
        .expect("table covers c1..c30");
    let table_match = table
        .iter()
        .map(|(k, q)| {
            let hit = solution
                .as_ref()
                .and_then(|s| s.get(&Unknown::new(*k).expect("k in 1..=30")))
                == Some(q);
            (*k, hit)
        })
        .collect();

    let by_table = compare_with_theorem(&data.theorem, &table).expect("table has c1 = -1");
    let by_solution = solution.as_ref().and_then(|s| {
        let values = s.iter().map(|(k, q)| (k.index(), q.clone())).collect();
        compare_with_theorem(&data.theorem, &values)
    });

    let nonzero: Vec<usize> = (0..data.equations.len())
        .filter(|&r| !residuals[&data.equations.equations()[r].ordinal].is_zero())
        .collect();
    let consistent_subsystem = (!nonzero.is_empty()).then(|| {
        let keep: Vec<usize> = (0..m.rows()).filter(|r| !nonzero.contains(r)).collect();
        let sub = m.select_rows(&keep);
        let kernel = rank_and_kernel(&sub);
        let solution = solve_normalized(&sub, c1, &minus_one).ok();
        Subsystem {
            dropped: nonzero
                .iter()
                .map(|&r| data.equations.equations()[r].ordinal)
                .collect(),
            rank: kernel.rank,
            kernel_dimension: kernel.dimension(),
            solution_matches_table: solution.as_ref().is_some_and(|s| matches_table(s, &table)),
            solution,
        }
    });

    VerificationReport {
        equation_count: data.equations.len(),
        rank: gauss.rank,
        kernel_dimension: gauss.dimension(),
        fraction_free_rank: bareiss.rank,
        fraction_free_kernel_dimension: bareiss.dimension(),
        elimination_paths_agree: kernels_agree(&gauss, &bareiss),
        solution,
        solve_error,
        residuals,
        table,
        table_match,
        theorem: data.theorem.coefficients().clone(),
        theorem_magnitude_match: by_table.magnitude_match,
        theorem_sign_flips: by_table.sign_flips,
        solution_theorem_magnitude_match: by_solution.map(|c| c.magnitude_match),
        consistent_subsystem,
    }
}

/// Form of one equation in plain text, e.g. `c2 + c4`.
pub fn describe(eq: &ConstraintEquation) -> String {
    format!("{}: {} = 0", eq.label_source, plain_scalar(&eq.form))
}
