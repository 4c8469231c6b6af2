use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use monofock::fock::{chain_vector, fock_inner, orthogonal_projection, projection_formula};
use monofock::meixner::{meixner_verify, Status};
use monofock::rational::{self, int};
use monofock::simplex::strat_is_zero;
use monofock::suite::{self, SuiteConfig};
use monofock::{FockVector, JacobiData, PiecewisePolynomial, Rational, StratifiedFunction};

/// Depth of the default Jacobi data `b ≡ 0, a ≡ 1`.
const DEFAULT_DEPTH: usize = 16;

#[derive(Parser)]
#[command(
    name = "monofock",
    version,
    about = "Exact moments, projections and Meixner checks for monotone Levy noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Args)]
struct Options {
    /// Jacobi data file (`{"b": [...], "a": [...]}` or `{"lambda", "eta", "depth"}`).
    #[arg(long, global = true)]
    nu: Option<PathBuf>,
    /// JSON object mapping names to piecewise polynomials.
    #[arg(long, global = true)]
    functions: Option<PathBuf>,
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// Comma-separated function names; repeatable.
    #[arg(long = "word", global = true)]
    words: Vec<String>,
    #[arg(long, global = true, default_value_t = 6)]
    digits: usize,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Mixed moments of the requested words.
    Moments,
    /// Gram matrix of the orthogonal projections of the words.
    Gram,
    /// Orthogonal projections of the words, stratum by stratum.
    Project,
    /// Compare the constant-coefficient expansion with the projections.
    MeixnerCheck,
    /// Run the invariant suite.
    Verify {
        #[arg(long)]
        meixner_check: bool,
        #[arg(long, default_value_t = 100)]
        cases: usize,
        #[arg(long, default_value_t = 10)]
        random_families: usize,
    },
}

enum Failure {
    Input(String),
    Assertion(String),
}

impl From<monofock::Error> for Failure {
    fn from(e: monofock::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

struct Job {
    nu: JacobiData,
    functions: BTreeMap<String, PiecewisePolynomial>,
    digits: usize,
}

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(opts: &Options) -> Outcome<Job> {
    let nu = match &opts.nu {
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => JacobiData::constant(int(0), int(1), DEFAULT_DEPTH)?,
    };
    let functions = match &opts.functions {
        Some(p) => serde_json::from_str(&read(p)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => BTreeMap::from([(
            "h".to_string(),
            PiecewisePolynomial::indicator(int(0), int(1))?,
        )]),
    };
    Ok(Job {
        nu,
        functions,
        digits: opts.digits,
    })
}

struct Word {
    label: String,
    names: Vec<String>,
    functions: Vec<PiecewisePolynomial>,
}

impl Job {
    fn word(&self, names: Vec<String>) -> Outcome<Word> {
        let functions = names
            .iter()
            .map(|n| {
                self.functions
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Failure::Input(format!("unknown function name '{n}'")))
            })
            .collect::<Outcome<Vec<_>>>()?;
        Ok(Word {
            label: names.join(","),
            names,
            functions,
        })
    }

    /// Explicit `--word`s, else every word up to `max_degree` in name order.
    fn words(&self, opts: &Options, default_degree: usize) -> Outcome<Vec<Word>> {
        if !opts.words.is_empty() {
            return opts
                .words
                .iter()
                .map(|w| {
                    let names: Vec<String> = w.split(',').map(|s| s.trim().to_string()).collect();
                    if names.iter().any(String::is_empty) {
                        return Err(Failure::Input(format!("malformed word '{w}'")));
                    }
                    self.word(names)
                })
                .collect();
        }
        let names: Vec<String> = self.functions.keys().cloned().collect();
        let mut out = Vec::new();
        let mut layer: Vec<Vec<String>> = vec![Vec::new()];
        for _ in 0..opts.max_degree.unwrap_or(default_degree) {
            layer = layer
                .iter()
                .flat_map(|w| {
                    names.iter().map(move |n| {
                        let mut w = w.clone();
                        w.push(n.clone());
                        w
                    })
                })
                .collect();
            for w in &layer {
                out.push(self.word(w.clone())?);
            }
        }
        Ok(out)
    }

    fn decimal(&self, r: &Rational) -> String {
        rational::to_decimal(r, self.digits)
    }
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(header.to_vec());
    for row in rows {
        s += &line(row.iter().map(String::as_str).collect());
    }
    s
}

fn write_report<T: Serialize>(opts: &Options, report: &T) -> Outcome<()> {
    if let Some(path) = &opts.out {
        let mut text = serde_json::to_string_pretty(report).expect("report serializes");
        text.push('\n');
        fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MomentRow {
    word: Vec<String>,
    exact: String,
    decimal: String,
}

fn moments(opts: &Options) -> Outcome<()> {
    let job = load(opts)?;
    let mut rows = Vec::new();
    for w in job.words(opts, 4)? {
        let m = monofock::fock::moment(&job.nu, &w.functions)?;
        rows.push(MomentRow {
            word: w.names,
            exact: rational::format(&m),
            decimal: job.decimal(&m),
        });
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.word.join(","), r.exact.clone(), r.decimal.clone()])
        .collect();
    print!("{}", table(&["word", "exact", "decimal"], &cells));
    write_report(
        opts,
        &serde_json::json!({ "command": "moments", "rows": rows }),
    )
}

fn gram(opts: &Options) -> Outcome<()> {
    let job = load(opts)?;
    let ws = job.words(opts, 2)?;
    let vectors = ws
        .iter()
        .map(|w| {
            let n = w.functions.len();
            Ok(FockVector::from_graded(
                chain_vector(&job.nu, &w.functions)?.component(n),
            ))
        })
        .collect::<Outcome<Vec<_>>>()?;
    let mut matrix = Vec::with_capacity(ws.len());
    for a in &vectors {
        let row = vectors
            .iter()
            .map(|b| fock_inner(&job.nu, a, b).map(|r| rational::format(&r)))
            .collect::<monofock::Result<Vec<_>>>()?;
        matrix.push(row);
    }
    let labels: Vec<String> = ws.iter().map(|w| w.label.clone()).collect();
    let mut header = vec![""];
    header.extend(labels.iter().map(String::as_str));
    let cells: Vec<Vec<String>> = labels
        .iter()
        .zip(&matrix)
        .map(|(l, row)| {
            std::iter::once(l.clone())
                .chain(row.iter().cloned())
                .collect()
        })
        .collect();
    if labels.is_empty() {
        println!("(empty family)");
    } else {
        print!("{}", table(&header, &cells));
    }
    write_report(
        opts,
        &serde_json::json!({ "command": "gram", "words": labels, "matrix": matrix }),
    )
}

#[derive(Serialize)]
struct ProjectionRow {
    word: Vec<String>,
    #[serde(with = "rational::serde_str")]
    norm: Rational,
    projection: StratifiedFunction,
}

fn project(opts: &Options) -> Outcome<()> {
    let job = load(opts)?;
    let mut rows = Vec::new();
    let mut out = String::new();
    for w in job.words(opts, 2)? {
        let p = orthogonal_projection(&job.nu, &w.functions)?;
        let closed = projection_formula(&w.functions);
        if !strat_is_zero(&p.sub(&closed)?) {
            return Err(Failure::Assertion(format!(
                "projection of {} differs from the closed form",
                w.label
            )));
        }
        let v = FockVector::from_graded(p.clone());
        let norm = fock_inner(&job.nu, &v, &v)?;
        out += &format!("word {}  norm² = {}\n", w.label, rational::format(&norm));
        for (comp, terms) in p.components() {
            for t in terms {
                let factors: Vec<String> = t.factors.iter().map(|f| format!("[{f}]")).collect();
                out += &format!(
                    "  {comp}  {} · {}\n",
                    rational::format(&t.coefficient),
                    factors.join(" ⊗ ")
                );
            }
        }
        rows.push(ProjectionRow {
            word: w.names,
            norm,
            projection: p,
        });
    }
    print!("{out}");
    write_report(
        opts,
        &serde_json::json!({ "command": "project", "rows": rows }),
    )
}

fn meixner_check(opts: &Options) -> Outcome<()> {
    let job = load(opts)?;
    let family: Vec<PiecewisePolynomial> = job.functions.values().cloned().collect();
    let report = meixner_verify(&job.nu, &family, opts.max_degree.unwrap_or(3))?;
    print_meixner(&report);
    write_report(opts, &report)
}

fn print_meixner(report: &monofock::meixner::MeixnerReport) {
    println!(
        "constant coefficients: {}  lambda = {}  eta = {}",
        if report.meixner { "yes" } else { "no" },
        rational::format(&report.lambda),
        rational::format(&report.eta)
    );
    let rows: Vec<Vec<String>> = report
        .records
        .iter()
        .map(|r| {
            vec![
                r.degree.to_string(),
                match r.status {
                    Status::Pass => "pass".into(),
                    Status::Fail => "fail".into(),
                },
                rational::format(&r.residual_norm),
            ]
        })
        .collect();
    print!("{}", table(&["degree", "status", "residual"], &rows));
    match report.first_failure {
        Some(n) => println!("first nonzero residual at degree {n}"),
        None => println!("no residual up to degree {}", report.records.len()),
    }
}

fn verify(
    opts: &Options,
    meixner_check: bool,
    cases: usize,
    random_families: usize,
) -> Outcome<()> {
    let job = load(opts)?;
    let family = if opts.functions.is_some() {
        job.functions.values().cloned().collect()
    } else {
        suite::default_family()
    };
    let cfg = SuiteConfig {
        family,
        max_degree: opts.max_degree.unwrap_or(3),
        seed: opts.seed,
        random_cases: cases,
        random_families,
        meixner_check,
    };
    let report = suite::run_suite(&job.nu, &cfg)?;
    let rows: Vec<Vec<String>> = report
        .checks
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                if c.passed { "pass" } else { "FAIL" }.to_string(),
                c.cases.to_string(),
            ]
        })
        .collect();
    print!("{}", table(&["check", "result", "cases"], &rows));
    if let Some(m) = &report.meixner {
        print_meixner(m);
    }
    write_report(opts, &report)?;
    match report.first_failure() {
        None => Ok(()),
        Some(bad) => Err(Failure::Assertion(format!(
            "check '{}' failed; counterexample:\n{}",
            bad.name,
            serde_json::to_string_pretty(&bad.counterexample).expect("serializes")
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = &cli.opts;
    let result = match cli.command {
        Command::Moments => moments(opts),
        Command::Gram => gram(opts),
        Command::Project => project(opts),
        Command::MeixnerCheck => meixner_check(opts),
        Command::Verify {
            meixner_check,
            cases,
            random_families,
        } => verify(opts, meixner_check, cases, random_families),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
