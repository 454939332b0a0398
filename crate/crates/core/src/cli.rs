//! The `blocklab` command line: CSV in, JSON report out.
//!
//! Exit status is 0 when every check passes, 1 on a failed verification,
//! 2 on unreadable or malformed input and 3 when a construction would
//! exceed the simulator cap.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::applications::{self, Check, LabeledDataset, PipelineOutcome};
use crate::block_encoding::{
    trivial_encoding, verify, BlockEncoding, EncodingSummary, VerificationReport,
};
use crate::centering::{build_uc, centering_encoding, centering_matrix, ones_matrix_encoding};
use crate::data_encoding::{data_unitaries, matrix_encoding};
use crate::error::{Error, Result};
use crate::io::{self, MatrixJson};
use crate::linalg::{eigh, spectral_norm};
use crate::matrix::{cap_qubits, unitarity_deviation, ComplexMatrix, C64};
use crate::mc::{self, CenteringMode};
use crate::reference;
use crate::spectral::DEFAULT_T_BITS;
use crate::suite::run_suite;

#[derive(Debug, Parser)]
#[command(
    name = "blocklab",
    version,
    about = "Block-encoded mean centering and multivariate pipelines on a statevector simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Replace the tolerance of every numeric check.
    #[arg(long, global = true, value_parser = positive)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Center a data matrix through its block-encoding.
    Center {
        #[arg(long, default_value = "cxc")]
        mode: CenteringMode,
        input: PathBuf,
    },
    /// Block-encode a data matrix and verify the encoding.
    Encode { input: PathBuf },
    /// Verify a built-in construction against its closed form.
    Verify {
        #[arg(long, ignore_case = true)]
        target: Target,
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Data matrix, required for `--target x`.
        input: Option<PathBuf>,
    },
    /// Principal components with phase-estimated eigenvalues.
    Pca {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long = "t-bits", default_value_t = DEFAULT_T_BITS)]
        t_bits: usize,
        input: PathBuf,
    },
    /// Linear discriminant analysis; labels hold one class per line.
    Lda {
        #[arg(long, default_value_t = 1)]
        d: usize,
        input: PathBuf,
        labels: PathBuf,
    },
    /// Canonical correlation analysis of two views.
    Cca {
        #[arg(long, default_value_t = 1)]
        d: usize,
        x: PathBuf,
        y: PathBuf,
    },
    /// Discriminant CCA of two labeled views.
    Dcca {
        #[arg(long, default_value_t = 1)]
        d: usize,
        x: PathBuf,
        y: PathBuf,
        labels: PathBuf,
    },
    /// Least squares on the centered design (rows are observations).
    Ols { x: PathBuf, y: PathBuf },
    /// Run the full verification battery.
    Suite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// The centering matrix.
    C,
    /// The reflection `(2/n) e e^T - I`.
    Uc,
    /// The all-ones matrix.
    Ones,
    /// A data matrix read from the input file.
    X,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got {s:?}")),
    }
}

/// A finished run: the JSON document and whether it passed.
#[derive(Debug)]
pub struct Report {
    pub document: Value,
    pub pass: bool,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

/// Exit status for an error.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::CapExceeded { .. } => 3,
        Error::Parse(_) | Error::Io(_) | Error::InvalidInput(_) | Error::DimensionMismatch(_) => 2,
        _ => 1,
    }
}

struct Inputs(Vec<Value>);

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path)?;
        self.0.push(json!({
            "path": path.display().to_string(),
            "sha256": io::sha256_hex(text.as_bytes()),
        }));
        Ok(text)
    }

    fn matrix(&mut self, path: &Path) -> Result<ComplexMatrix> {
        io::parse_csv(&self.read(path)?)
    }

    fn labels(&mut self, path: &Path) -> Result<Vec<i64>> {
        io::parse_labels(&self.read(path)?)
    }
}

struct Body {
    encodings: Vec<EncodingSummary>,
    checks: Vec<Check>,
    result: Value,
    extra: Vec<(&'static str, Value)>,
}

fn to_value<T: Serialize + ?Sized>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn from_outcome<R: Serialize>(out: PipelineOutcome<R>) -> Body {
    Body {
        extra: vec![("composition_audit", to_value(&out.audit))],
        encodings: out.encodings,
        checks: out.checks,
        result: to_value(&out.result),
    }
}

fn from_report(
    label: &str,
    be: &BlockEncoding,
    rep: &VerificationReport,
    more: Vec<Check>,
) -> Body {
    let mut checks = vec![Check::new(
        "block distance",
        rep.distance_measured,
        rep.tolerance,
    )];
    checks.extend(more);
    Body {
        encodings: vec![be.summary(label)],
        checks,
        result: to_value(rep),
        extra: vec![],
    }
}

fn labeled(inputs: &mut Inputs, x: &Path, labels: &Path) -> Result<LabeledDataset> {
    let x = inputs.matrix(x)?;
    let labels = inputs.labels(labels)?;
    LabeledDataset::new(x, &labels)
}

fn center(inputs: &mut Inputs, mode: CenteringMode, path: &Path, tol: f64) -> Result<Body> {
    let x = inputs.matrix(path)?;
    let be = mc::mc_encoding_exact(&x, mode)?;
    let got = be.scaled_block().submatrix(0, 0, x.rows(), x.cols());
    let want = mc::classical_center(&x, mode)?;
    // Entries at the round-off floor of the simulation are reported as zero.
    let floor = 1e-13 * be.alpha();
    let shown = got.map(|z| {
        if z.norm() <= floor {
            C64::new(0.0, 0.0)
        } else {
            z
        }
    });
    Ok(Body {
        encodings: vec![be.summary(&mode.to_string())],
        checks: vec![Check::new(
            "block vs classical centering",
            spectral_norm(&(&got - &want)),
            tol,
        )],
        result: json!({
            "mode": mode,
            "centered": MatrixJson::from(&shown),
            "csv": io::to_csv(&shown),
            "zero_floor": floor,
        }),
        extra: vec![("composition_audit", to_value(&be.provenance().audit()))],
    })
}

fn encode(inputs: &mut Inputs, path: &Path, tol: f64) -> Result<Body> {
    let x = mc::padded(&inputs.matrix(path)?);
    let be = matrix_encoding(&x)?;
    let rep = verify(&be, &x, tol)?;
    let (u_m, u_n) = data_unitaries(&x, cap_qubits())?;
    let more = vec![
        Check::new(
            "alpha vs Frobenius norm",
            (be.alpha() - x.frobenius_norm()).abs(),
            1e-12,
        ),
        Check::new(
            "U_M unitarity",
            unitarity_deviation(&u_m.to_matrix(cap_qubits())?)?,
            1e-10,
        ),
        Check::new(
            "U_N unitarity",
            unitarity_deviation(&u_n.to_matrix(cap_qubits())?)?,
            1e-10,
        ),
    ];
    Ok(from_report("X", &be, &rep, more))
}

fn verify_target(
    inputs: &mut Inputs,
    target: Target,
    n: usize,
    input: Option<&Path>,
    tol: Option<f64>,
) -> Result<Body> {
    let log_n = || {
        crate::matrix::log2_exact(n)
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::InvalidInput(format!("--n must be a power of two >= 2, got {n}")))
    };
    let (label, be, want, default_tol) = match target {
        Target::C => ("C", centering_encoding(n)?, centering_matrix(n), 1e-12),
        Target::Uc => {
            let k = log_n()?;
            let closed = ComplexMatrix::from_fn(n, n, |r, c| {
                C64::new(2.0 / n as f64 - if r == c { 1.0 } else { 0.0 }, 0.0)
            });
            ("U_c", trivial_encoding(&build_uc(k)?)?, closed, 1e-12)
        }
        Target::Ones => {
            let ones = ComplexMatrix::from_fn(n, n, |_, _| C64::new(1.0, 0.0));
            ("J", ones_matrix_encoding(n)?, ones, 1e-10)
        }
        Target::X => {
            let path = input
                .ok_or_else(|| Error::InvalidInput("--target x needs an input matrix".into()))?;
            let x = mc::padded(&inputs.matrix(path)?);
            ("X", matrix_encoding(&x)?, x, 1e-9)
        }
    };
    let rep = verify(&be, &want, tol.unwrap_or(default_tol))?;
    Ok(from_report(label, &be, &rep, vec![]))
}

fn pca(inputs: &mut Inputs, d: usize, t_bits: usize, path: &Path) -> Result<Body> {
    let x = inputs.matrix(path)?;
    let oracle = reference::scatter_total(&x);
    let oracle_values = eigh(&oracle, 1e-8 * oracle.max_abs().max(1.0))?.values;
    let mut body = from_outcome(applications::pca(&x, d, t_bits)?);
    body.extra.push((
        "oracle_eigenvalues",
        to_value(&oracle_values[..d.min(oracle_values.len())]),
    ));
    Ok(body)
}

fn ols(inputs: &mut Inputs, x: &Path, y: &Path) -> Result<Body> {
    let x = inputs.matrix(x)?;
    let y = io::parse_vector(&inputs.read(y)?)?;
    Ok(from_outcome(applications::ols(&x, &y)?))
}

fn suite(seed: u64) -> Result<(Body, Value)> {
    let (report, timings) = run_suite(seed)?;
    for c in &report.criteria {
        eprintln!(
            "{:<5} {:<4} {:<52} measured {:>10.3e}  tol {:>8.1e}  n={}",
            c.id,
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance,
            c.instances
        );
    }
    let checks = report
        .criteria
        .iter()
        .map(|c| Check {
            name: format!("{} {}", c.id, c.name),
            measured: c.measured,
            tolerance: c.tolerance,
            pass: c.pass,
        })
        .collect();
    let ms: serde_json::Map<String, Value> =
        timings.into_iter().map(|(id, t)| (id, json!(t))).collect();
    Ok((
        Body {
            encodings: vec![],
            checks,
            result: to_value(&report),
            extra: vec![],
        },
        Value::Object(ms),
    ))
}

/// Runs one command and assembles its report.
pub fn execute(cli: &Cli) -> Result<Report> {
    let start = Instant::now();
    let mut inputs = Inputs(vec![]);
    let mut config = json!({ "seed": cli.seed, "tol": cli.tol, "cap_qubits": cap_qubits() });
    let mut criteria_ms = None;
    let set = |config: &mut Value, key: &str, v: Value| {
        config[key] = v;
    };
    let (name, mut body) = match &cli.command {
        Command::Center { mode, input } => {
            set(&mut config, "mode", json!(mode));
            (
                "center",
                center(&mut inputs, *mode, input, cli.tol.unwrap_or(1e-8))?,
            )
        }
        Command::Encode { input } => (
            "encode",
            encode(&mut inputs, input, cli.tol.unwrap_or(1e-9))?,
        ),
        Command::Verify { target, n, input } => {
            set(
                &mut config,
                "target",
                json!(format!("{target:?}").to_lowercase()),
            );
            set(&mut config, "n", json!(n));
            (
                "verify",
                verify_target(&mut inputs, *target, *n, input.as_deref(), cli.tol)?,
            )
        }
        Command::Pca { d, t_bits, input } => {
            set(&mut config, "d", json!(d));
            set(&mut config, "t_bits", json!(t_bits));
            ("pca", pca(&mut inputs, *d, *t_bits, input)?)
        }
        Command::Lda { d, input, labels } => {
            set(&mut config, "d", json!(d));
            let ds = labeled(&mut inputs, input, labels)?;
            ("lda", from_outcome(applications::lda(&ds, *d)?))
        }
        Command::Cca { d, x, y } => {
            set(&mut config, "d", json!(d));
            let (x, y) = (inputs.matrix(x)?, inputs.matrix(y)?);
            ("cca", from_outcome(applications::cca(&x, &y, *d)?))
        }
        Command::Dcca { d, x, y, labels } => {
            set(&mut config, "d", json!(d));
            let xm = inputs.matrix(x)?;
            let ym = inputs.matrix(y)?;
            let labels = inputs.labels(labels)?;
            let (dx, dy) = (
                LabeledDataset::new(xm, &labels)?,
                LabeledDataset::new(ym, &labels)?,
            );
            ("dcca", from_outcome(applications::dcca(&dx, &dy, *d)?))
        }
        Command::Ols { x, y } => ("ols", ols(&mut inputs, x, y)?),
        Command::Suite => {
            let (body, ms) = suite(cli.seed)?;
            criteria_ms = Some(ms);
            ("suite", body)
        }
    };
    if let (Some(tol), false) = (
        cli.tol,
        matches!(cli.command, Command::Suite | Command::Verify { .. }),
    ) {
        for c in body.checks.iter_mut().filter(|c| c.tolerance > 0.0) {
            c.tolerance = tol;
            c.pass = c.measured <= tol;
        }
    }
    let pass = body.checks.iter().all(|c| c.pass);
    let unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0);
    let mut timestamp = json!({
        "unix_ms": unix_ms,
        "wall_time_ms": start.elapsed().as_secs_f64() * 1e3,
    });
    if let Some(ms) = criteria_ms {
        timestamp["criteria_ms"] = ms;
    }
    let mut document = json!({
        "command": name,
        "config": config,
        "inputs": inputs.0,
        "encodings": body.encodings,
        "checks": body.checks,
        "result": body.result,
        "pass": pass,
        "timestamp": timestamp,
    });
    for (k, v) in body.extra {
        document[k] = v;
    }
    Ok(Report { document, pass })
}

/// Parses arguments, runs, writes the report and returns the exit status.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report.document)
                .expect("JSON values serialize")
                + "\n";
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text).map_err(Error::from),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => report.exit_code(),
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
