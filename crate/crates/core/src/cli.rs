//! Command-line front end.
//!
//! Exit status: 0 success, 1 verification or solve failure, 2 bad input, 3 bad data files.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_traits::{One, Signed, Zero};

use crate::data::{DataFiles, Dataset};
use crate::linsys::{rank_and_kernel, solve_normalized, verify};
use crate::parse::parse_expression;
use crate::print::{latex_term, print, Format, JsonCorrelator};
use crate::scalar::{integer, Rational, Unknown};
use crate::strata::compare_with_theorem;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "gwis",
    version,
    about = "Exact algebra for gwis expressions and the genus-3 relation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format. `parse` defaults to json, everything else to plain.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Directory whose data files replace the embedded ones.
    #[arg(long, global = true, value_name = "PATH")]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical form of an expression.
    Canon(InputArgs),
    /// Parse an expression and print it (JSON by default).
    Parse(InputArgs),
    /// Solve the constraint system with c1 = -1.
    Solve,
    /// Rank and kernel dimension of the constraint system.
    Rank,
    /// Full verification report.
    Verify,
    /// The relation rebuilt from the solved coefficients.
    Emit {
        /// Use the tabulated coefficients instead of solving.
        #[arg(long)]
        use_table: bool,
    },
}

#[derive(Debug, clap::Args)]
pub struct InputArgs {
    /// File to read, or the expression itself.
    #[arg(
        long,
        value_name = "PATH|STRING",
        conflicts_with = "expression",
        allow_hyphen_values = true
    )]
    pub input: Option<String>,

    /// The expression, when `--input` is not given.
    #[arg(allow_hyphen_values = true)]
    pub expression: Option<String>,
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err((message, code)) => {
            let _ = writeln!(err, "gwis: {message}");
            code
        }
    }
}

type Outcome = Result<(String, i32), (String, i32)>;

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Canon(input) => {
            let e = parse_input(input)?;
            Ok((
                line(print(&e, cli.format.unwrap_or(Format::Plain))),
                EXIT_OK,
            ))
        }
        Command::Parse(input) => {
            let e = parse_input(input)?;
            Ok((line(print(&e, cli.format.unwrap_or(Format::Json))), EXIT_OK))
        }
        Command::Solve => solve(&load(cli)?, cli.format.unwrap_or_default()),
        Command::Rank => rank(&load(cli)?, cli.format.unwrap_or_default()),
        Command::Verify => {
            let report = verify(&load(cli)?);
            let text = match cli.format.unwrap_or_default() {
                Format::Json => line(report.to_json()),
                Format::Plain | Format::Latex => report.to_text(),
            };
            Ok((
                text,
                if report.passed() {
                    EXIT_OK
                } else {
                    EXIT_FAILED
                },
            ))
        }
        Command::Emit { use_table } => {
            emit(&load(cli)?, cli.format.unwrap_or_default(), *use_table)
        }
    }
}

fn line(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn parse_input(input: &InputArgs) -> Result<crate::Expression, (String, i32)> {
    let text = match (&input.input, &input.expression) {
        (Some(arg), _) => {
            let path = Path::new(arg);
            if path.is_file() {
                std::fs::read_to_string(path)
                    .map_err(|e| (format!("{}: {e}", path.display()), EXIT_INPUT))?
            } else {
                arg.clone()
            }
        }
        (None, Some(expr)) => expr.clone(),
        (None, None) => return Err(("no input expression".to_string(), EXIT_INPUT)),
    };
    parse_expression(&text).map_err(|e| (e.to_string(), EXIT_INPUT))
}

fn load(cli: &Cli) -> Result<Dataset, (String, i32)> {
    let files = match &cli.data_dir {
        Some(dir) => DataFiles::from_dir(dir).map_err(|e| (e.to_string(), EXIT_DATA))?,
        None => return Ok(Dataset::embedded().clone()),
    };
    Dataset::load(&files).map_err(|e| (e.to_string(), EXIT_DATA))
}

fn solve(data: &Dataset, format: Format) -> Outcome {
    let m = data.equations.matrix();
    let c1 = Unknown::new(1).expect("c1");
    let solution = solve_normalized(&m, c1, &integer(-1))
        .map_err(|e| (format!("solve failed: {e}"), EXIT_FAILED))?;
    let mut out = String::new();
    match format {
        Format::Json => {
            let items: Vec<String> = solution
                .iter()
                .map(|(k, q)| format!("  \"{k}\": {}", serde_json::Value::from(q.to_string())))
                .collect();
            out = format!("{{\n{}\n}}\n", items.join(",\n"));
        }
        Format::Plain => {
            for (k, q) in &solution {
                out.push_str(&format!("{k} = {q}\n"));
            }
        }
        Format::Latex => {
            for (k, q) in &solution {
                out.push_str(&format!("c_{{{}}} = {}\n", k.index(), latex_rational(q)));
            }
        }
    }
    Ok((out, EXIT_OK))
}

fn rank(data: &Dataset, format: Format) -> Outcome {
    let m = data.equations.matrix();
    let k = rank_and_kernel(&m);
    let text = match format {
        Format::Json => line(
            serde_json::to_string_pretty(&serde_json::json!({
                "equations": m.rows(),
                "unknowns": m.cols(),
                "rank": k.rank,
                "kernel_dimension": k.dimension(),
            }))
            .expect("serializable"),
        ),
        Format::Plain | Format::Latex => format!(
            "equations {}\nunknowns {}\nrank {}\nkernel dimension {}\n",
            m.rows(),
            m.cols(),
            k.rank,
            k.dimension()
        ),
    };
    Ok((text, EXIT_OK))
}

fn latex_rational(q: &Rational) -> String {
    let sign = if q.is_negative() { "-" } else { "" };
    let a = q.abs();
    if a.denom().is_one() {
        format!("{sign}{}", a.numer())
    } else {
        format!("{sign}\\frac{{{}}}{{{}}}", a.numer(), a.denom())
    }
}

fn emit(data: &Dataset, format: Format, use_table: bool) -> Outcome {
    let values: BTreeMap<u32, Rational> = if use_table {
        data.table.values().clone()
    } else {
        let m = data.equations.matrix();
        let c1 = Unknown::new(1).expect("c1");
        solve_normalized(&m, c1, &integer(-1))
            .map_err(|e| {
                (
                    format!("solve failed: {e}; use --use-table to emit the tabulated relation"),
                    EXIT_FAILED,
                )
            })?
            .into_iter()
            .map(|(k, q)| (k.index(), q))
            .collect()
    };
    let cmp = compare_with_theorem(&data.theorem, &values).ok_or_else(|| {
        (
            "c1 vanishes; the relation has no left-hand side".to_string(),
            EXIT_FAILED,
        )
    })?;
    let basis = |k: u32| data.basis.basis(k).expect("index in range");
    let flips: Vec<String> = cmp.sign_flips.iter().map(u32::to_string).collect();
    let source = if use_table { "table" } else { "solution" };

    let text = match format {
        Format::Json => {
            let rhs: Vec<serde_json::Value> = cmp
                .implied
                .iter()
                .map(|(k, q)| {
                    serde_json::json!({
                        "index": k,
                        "coefficient": q.to_string(),
                        "printed": data.theorem.coefficient(*k).map_or_else(|| "0".to_string(), Rational::to_string),
                        "sign_flip": cmp.sign_flips.contains(k),
                        "correlators": Vec::<JsonCorrelator>::from(basis(*k)),
                    })
                })
                .collect();
            let v = serde_json::json!({
                "source": source,
                "lhs": Vec::<JsonCorrelator>::from(basis(1)),
                "rhs": rhs,
                "sign_flips": cmp.sign_flips,
            });
            line(serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Format::Plain | Format::Latex => {
            let latex = format == Format::Latex;
            let mut out = if latex {
                latex_term(basis(1))
            } else {
                basis(1).to_string()
            };
            out.push_str(" =");
            for (n, (k, q)) in cmp.implied.iter().enumerate() {
                let sign = if q.is_negative() {
                    "-"
                } else if n == 0 {
                    ""
                } else {
                    "+"
                };
                let a = q.abs();
                let (coefficient, term) = if latex {
                    (latex_rational(&a), latex_term(basis(*k)))
                } else {
                    (a.to_string(), basis(*k).to_string())
                };
                let joiner = if latex { " " } else { "*" };
                let space = if sign.is_empty() { "" } else { " " };
                out.push_str(&format!("\n  {sign}{space}{coefficient}{joiner}{term}"));
                if cmp.sign_flips.contains(k) && !q.is_zero() {
                    out.push_str(if latex {
                        "  % sign flip"
                    } else {
                        "  # sign flip"
                    });
                }
            }
            out.push('\n');
            let comment = if latex { "%" } else { "#" };
            out.push_str(&format!(
                "{comment} coefficients from the {source}; sign differs from the printed weight at k = {}\n",
                if flips.is_empty() { "none".to_string() } else { flips.join(", ") }
            ));
            out
        }
    };
    Ok((text, EXIT_OK))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("gwis").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn canon_renames_dummies() {
        let (code, out, _) = call(&["canon", "<j a b><x b a><i^1>_2"]);
        assert_eq!(code, 0);
        assert!(out.contains("d1") && out.contains("d2") && !out.contains(" a"));
    }

    #[test]
    fn parse_error_exit_code() {
        let (code, out, err) = call(&["parse", "<x a>"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(out.is_empty());
        assert!(err.contains("dummy a occurs once"), "{err}");
    }

    #[test]
    fn missing_input() {
        assert_eq!(call(&["canon"]).0, EXIT_INPUT);
        assert_eq!(call(&["frobnicate"]).0, EXIT_INPUT);
    }

    #[test]
    fn rank_json() {
        let (code, out, _) = call(&["rank", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["equations"], 49);
        assert_eq!(v["unknowns"], 30);
    }

    #[test]
    fn emit_from_table_lists_basis_order() {
        let (code, out, _) = call(&["emit", "--use-table"]);
        assert_eq!(code, 0);
        let first = out.lines().next().unwrap();
        assert_eq!(first, "<x^3>_3 =");
        assert_eq!(out.lines().count(), 31);
        assert!(out.contains("sign differs from the printed weight at k = 2, 3, 7"));
    }

    #[test]
    fn bad_data_dir() {
        let (code, _, err) = call(&["verify", "--data-dir", "/nonexistent/gwis"]);
        assert_eq!(code, EXIT_DATA);
        assert!(!err.is_empty());
    }
}
