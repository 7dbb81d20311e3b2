//! The `kac` command line.
//!
//! Exit codes: `0` success, `1` a verification ran and the two sides
//! differed, `2` bad input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::codec::{self, CodecError, SetDoc, SystemDoc};
use crate::dynamics::{Generator, System};
use crate::iet::{compile, induced_iet, Compilation, Iet};
use crate::measure::PointSet;
use crate::rational::Rational;
use crate::recurrence::{
    induced_map, kac_check, kakutani_tower, return_time_distribution, series_terms,
    VerificationReport,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FALSIFIED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "kac",
    version,
    about = "Exact return-time integrals of finite measure-preserving systems"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the return-time integral over E with the measure of its invariant closure.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Also report the integral divided by the total measure.
        #[arg(long)]
        normalize: bool,
    },
    /// Terms and partial sums of the return-time series.
    Series {
        #[command(flatten)]
        input: Input,
        /// Number of terms (default: number of points or cells).
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// The tower over E, one column per return time.
    Tower {
        #[command(flatten)]
        input: Input,
    },
    /// The first-return map on E, as a system document.
    Induce {
        #[command(flatten)]
        input: Input,
    },
    /// Mass of E carried by each return time.
    Dist {
        #[command(flatten)]
        input: Input,
    },
    /// Write a generated system document.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Write here instead of standard output.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// System document (permutation or iet).
    #[arg(long)]
    pub system: PathBuf,
    /// Set document, inline JSON or a file path.
    #[arg(long)]
    pub set: String,
    #[arg(long, value_enum, default_value_t = Output::Json)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Human,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// x -> x + 1 mod n with uniform weights.
    Cycle {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        total: Rational,
    },
    /// Seeded random permutation with one random weight per cycle.
    #[command(alias = "random-permutation")]
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_denominator: u64,
    },
    /// (i, j) -> (2i + j, i + j) mod q on the q x q grid.
    #[command(alias = "cat-map")]
    Cat {
        #[arg(long)]
        q: usize,
    },
}

/// Source of verification reports, so tests can substitute a broken one.
pub trait Verifier {
    fn verify(&self, system: &System, set: &PointSet) -> crate::Result<VerificationReport>;
}

pub struct ExactVerifier;

impl Verifier for ExactVerifier {
    fn verify(&self, system: &System, set: &PointSet) -> crate::Result<VerificationReport> {
        kac_check(system, set)
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Codec(#[from] CodecError),
    #[error("{0}")]
    Core(#[from] crate::Error),
    #[error("set: {0}")]
    SetKind(&'static str),
}

/// A loaded system and set, with the grid when the system is an exchange.
struct Loaded {
    system: System,
    set: PointSet,
    exchange: Option<(Iet, crate::iet::IntervalSet, Compilation)>,
}

impl Loaded {
    fn render_set(&self, set: &PointSet) -> Value {
        match &self.exchange {
            Some((_, _, compilation)) => {
                codec::intervals_value(&compilation.cells_to_intervals(set))
            }
            None => codec::points_value(set),
        }
    }

    fn render_set_text(&self, set: &PointSet) -> String {
        match &self.exchange {
            Some((_, _, compilation)) => compilation
                .cells_to_intervals(set)
                .intervals()
                .iter()
                .map(|(a, b)| format!("[{a}, {b})"))
                .collect::<Vec<_>>()
                .join(" ∪ "),
            None => format!("{:?}", set.indices()),
        }
    }
}

fn read(path: &std::path::Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load(input: &Input) -> Result<Loaded, CliError> {
    let system = codec::parse_system(&read(&input.system)?)?;
    let set_text = if input.set.trim_start().starts_with('{') {
        input.set.clone()
    } else {
        read(std::path::Path::new(&input.set))?
    };
    let set = codec::parse_set(&set_text)?;
    match (system, set) {
        (SystemDoc::Permutation(system), SetDoc::Points(points)) => {
            let set = PointSet::new(system.size(), points)?;
            Ok(Loaded {
                system,
                set,
                exchange: None,
            })
        }
        (SystemDoc::Iet(iet), SetDoc::Intervals(intervals)) => {
            let (compilation, mut cells) = compile(&iet, std::slice::from_ref(&intervals))?;
            Ok(Loaded {
                system: compilation.system(),
                set: cells.remove(0),
                exchange: Some((iet, intervals, compilation)),
            })
        }
        (SystemDoc::Permutation(_), SetDoc::Intervals(_)) => Err(CliError::SetKind(
            "a permutation system takes {\"points\":[...]}",
        )),
        (SystemDoc::Iet(_), SetDoc::Points(_)) => Err(CliError::SetKind(
            "an iet system takes {\"intervals\":[[a,b],...]}",
        )),
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut line = serde_json::to_string(value).expect("reports serialize");
    line.push('\n');
    line
}

/// Left-aligned columns separated by two spaces.
fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let header_row: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
    for row in std::iter::once(&header_row).chain(rows) {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct VerifyOut {
    lhs: Rational,
    rhs: Rational,
    equal: bool,
    invariant_closure: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized_lhs: Option<Rational>,
}

#[derive(Serialize)]
struct ColumnOut {
    return_time: usize,
    base: Value,
    levels: Vec<Value>,
}

/// Runs one command; the report goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(
    args: I,
    verifier: &dyn Verifier,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&config.command, verifier) {
        Ok((text, code)) => {
            if let Some(path) = gen_out(&config.command) {
                if let Err(e) = fs::write(path, &text) {
                    let _ = writeln!(stderr, "error: {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            } else if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            if code == EXIT_FALSIFIED {
                let _ = writeln!(
                    stderr,
                    "error: return-time integral differs from the measure of the invariant closure"
                );
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn gen_out(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Gen { out, .. } => out.as_ref(),
        _ => None,
    }
}

fn execute(command: &Command, verifier: &dyn Verifier) -> Result<(String, u8), CliError> {
    match command {
        Command::Verify { input, normalize } => {
            let loaded = load(input)?;
            let report = verifier.verify(&loaded.system, &loaded.set)?;
            let code = if report.equal {
                EXIT_OK
            } else {
                EXIT_FALSIFIED
            };
            let normalized = report.normalized_lhs.clone().filter(|_| *normalize);
            let text = match input.output {
                Output::Json => json_line(&VerifyOut {
                    lhs: report.lhs.clone(),
                    rhs: report.rhs.clone(),
                    equal: report.equal,
                    invariant_closure: loaded.render_set(&report.rhs_set),
                    normalized_lhs: normalized.clone(),
                }),
                Output::Human => {
                    let mut rows = vec![
                        vec!["integral of n_E over E".into(), report.lhs.to_string()],
                        vec!["measure of I_E".into(), report.rhs.to_string()],
                        vec!["equal".into(), report.equal.to_string()],
                        vec!["I_E".into(), loaded.render_set_text(&report.rhs_set)],
                    ];
                    if let Some(value) = normalized {
                        rows.push(vec!["normalized integral".into(), value.to_string()]);
                    }
                    if let Some((_, _, compilation)) = &loaded.exchange {
                        rows.push(vec![
                            "grid cells".into(),
                            compilation.grid_order.to_string(),
                        ]);
                    }
                    table(&["quantity", "value"], &rows)
                }
            };
            Ok((text, code))
        }
        Command::Series { input, horizon } => {
            let loaded = load(input)?;
            let report = series_terms(&loaded.system, &loaded.set, *horizon)?;
            let text = match input.output {
                Output::Json => json_line(&report),
                Output::Human => {
                    let rows: Vec<Vec<String>> = (0..report.terms_a.len())
                        .map(|i| {
                            vec![
                                (i + 1).to_string(),
                                report.terms_a[i].to_string(),
                                report.terms_b[i].to_string(),
                                report.partial_sums[i].to_string(),
                            ]
                        })
                        .collect();
                    format!(
                        "mu(E) = {}\n{}",
                        report.mu_e,
                        table(&["n", "a_n", "b_n", "partial sum"], &rows)
                    )
                }
            };
            Ok((text, EXIT_OK))
        }
        Command::Tower { input } => {
            let loaded = load(input)?;
            let tower = kakutani_tower(&loaded.system, &loaded.set)?;
            let text = match input.output {
                Output::Json => {
                    let columns: Vec<ColumnOut> = tower
                        .columns
                        .iter()
                        .map(|c| ColumnOut {
                            return_time: c.return_time,
                            base: loaded.render_set(&c.base),
                            levels: c.levels.iter().map(|l| loaded.render_set(l)).collect(),
                        })
                        .collect();
                    json_line(&columns)
                }
                Output::Human => {
                    let rows: Vec<Vec<String>> = tower
                        .columns
                        .iter()
                        .map(|c| {
                            Ok(vec![
                                c.return_time.to_string(),
                                loaded.system.measure(&c.base)?.to_string(),
                                loaded.render_set_text(&c.base),
                            ])
                        })
                        .collect::<crate::Result<_>>()?;
                    table(&["r", "mu(E_r)", "E_r"], &rows)
                }
            };
            Ok((text, EXIT_OK))
        }
        Command::Induce { input } => {
            let loaded = load(input)?;
            let text = match &loaded.exchange {
                Some((iet, intervals, _)) => codec::iet_json(&induced_iet(iet, intervals)?),
                None => codec::system_json(&induced_map(&loaded.system, &loaded.set)?),
            };
            Ok((text + "\n", EXIT_OK))
        }
        Command::Dist { input } => {
            let loaded = load(input)?;
            let dist = return_time_distribution(&loaded.system, &loaded.set)?;
            let text = match input.output {
                Output::Json => json_line(&dist),
                Output::Human => {
                    let rows: Vec<Vec<String>> = dist
                        .iter()
                        .map(|d| vec![d.k.to_string(), d.mass.to_string()])
                        .collect();
                    table(&["k", "mass"], &rows)
                }
            };
            Ok((text, EXIT_OK))
        }
        Command::Gen { kind, .. } => {
            let generator = match kind {
                GenKind::Cycle { n, total } => Generator::Cycle {
                    n: *n,
                    total: total.clone(),
                },
                GenKind::Random {
                    n,
                    seed,
                    max_denominator,
                } => Generator::RandomPermutation {
                    n: *n,
                    seed: *seed,
                    max_denominator: *max_denominator,
                },
                GenKind::Cat { q } => Generator::CatMap { q: *q },
            };
            Ok((codec::system_json(&generator.generate()?) + "\n", EXIT_OK))
        }
    }
}
