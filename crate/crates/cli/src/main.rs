#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ckn_lab::config::{ConfigFile, Settings};
use ckn_lab::emden_fowler::{emden_fowler, ClosedFormPhi};
use ckn_lab::extremal::{amplitude_constant, extremal, s_r_closed};
use ckn_lab::params::{beta_fs, classify, hardy_constants, rellich_infimum, validate};
use ckn_lab::scan::{run_scan, write_csv, BetaRange, Output, Range, ScanSpec};
use ckn_lab::spectral::fs_locate_with;
use ckn_lab::variation::certify_with;
use ckn_lab::verify::{verify_all, VerifyOptions};
use ckn_lab::Error;

const OK: u8 = 0;
const FAILED: u8 = 1;
const INVALID: u8 = 2;
const IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ckn-lab",
    version,
    about = "Sharp constants and symmetry breaking for a second-order weighted CKN inequality"
)]
struct Cli {
    /// key = value file overriding default tolerances
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit one JSON record per line
    #[arg(long, global = true)]
    json: bool,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Clone, Copy)]
struct Point {
    #[arg(long = "N")]
    n: u32,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Level {
    Fast,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exponents and closed-form constants at one parameter point
    Constants {
        #[command(flatten)]
        point: Point,
    },
    /// Three-witness symmetry-breaking certificate
    Certify {
        #[command(flatten)]
        point: Point,
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<f64>,
        /// Sign band for the second variation
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Closed-form and spectrally located symmetry-breaking threshold
    FsCurve {
        #[arg(long = "N")]
        n: u32,
        /// A value or lo:hi:steps
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// Bisection tolerance for the spectral locator
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Region scan over an (alpha, beta) grid
    Scan {
        #[arg(long = "N")]
        n: u32,
        /// A value or lo:hi:steps
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        /// A value, lo:hi:steps, auto or auto:steps
        #[arg(long, allow_hyphen_values = true, default_value = "auto")]
        beta: String,
        /// Comma-separated subset of class,s_r,beta_fs,second_variation,rho1
        #[arg(long, default_value = "class,s_r,beta_fs,second_variation,rho1")]
        outputs: String,
        /// Worker threads (falls back to CKN_LAB_THREADS, then the config file, then all cores)
        #[arg(long)]
        jobs: Option<usize>,
        /// Record per-point wall time (output is then not reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Run the invariant battery
    VerifyAll {
        #[arg(long, value_enum, default_value = "fast")]
        level: Level,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Emden-Fowler residuals of the transformed extremal
    TransformCheck {
        #[command(flatten)]
        point: Point,
        /// Largest acceptable residual
        #[arg(long)]
        tol: Option<f64>,
        /// Half-width of the t-window
        #[arg(long, default_value_t = 2.0)]
        span: f64,
        #[arg(long, default_value_t = 41)]
        samples: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParams(_) | Error::Domain(_) => INVALID,
            _ => FAILED,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: Option<&Path>, e: io::Error) -> Failure {
    let message = match path {
        Some(p) => format!("{}: {e}", p.display()),
        None => e.to_string(),
    };
    Failure { code: IO, message }
}

type Sink = Box<dyn Write>;

fn open_sink(out: &Option<PathBuf>) -> Result<Sink, Failure> {
    match out {
        Some(p) => {
            let f = File::create(p).map_err(|e| io_failure(Some(p), e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

/// JSON-lines or indented `key: value` text.
fn emit(sink: &mut Sink, json: bool, record: &Value) -> io::Result<()> {
    if json {
        writeln!(sink, "{record}")
    } else {
        if let Value::Object(map) = record {
            for (k, v) in map {
                writeln!(sink, "{k}: {v}")?;
            }
        }
        writeln!(sink)
    }
}

fn parse_range(s: &str) -> Result<Range, Failure> {
    let bad = |m: String| Failure {
        code: INVALID,
        message: m,
    };
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| bad(format!("'{t}': {e}")));
    match parts.as_slice() {
        [x] => Ok(Range::point(num(x)?)),
        [lo, hi, n] => {
            let steps = n.trim().parse::<usize>().map_err(|e| bad(format!("'{n}': {e}")))?;
            Ok(Range::new(num(lo)?, num(hi)?, steps)?)
        }
        _ => Err(bad(format!("expected a value or lo:hi:steps, got '{s}'"))),
    }
}

fn parse_beta(s: &str) -> Result<BetaRange, Failure> {
    if let Some(rest) = s.strip_prefix("auto") {
        let steps = match rest.strip_prefix(':') {
            Some(n) => n.parse().map_err(|e| Failure {
                code: INVALID,
                message: format!("'{n}': {e}"),
            })?,
            None if rest.is_empty() => 20,
            None => {
                return Err(Failure {
                    code: INVALID,
                    message: format!("bad beta range '{s}'"),
                })
            }
        };
        return Ok(BetaRange::Auto { steps });
    }
    Ok(BetaRange::Fixed(parse_range(s)?))
}

fn resolve_jobs(flag: Option<usize>, file: &ConfigFile) -> Result<usize, Failure> {
    if let Some(j) = flag {
        return Ok(j);
    }
    if let Ok(v) = std::env::var("CKN_LAB_THREADS") {
        return v.trim().parse().map_err(|e| Failure {
            code: INVALID,
            message: format!("CKN_LAB_THREADS='{v}': {e}"),
        });
    }
    Ok(file
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_failure(Some(p), e))?;
            ConfigFile::parse(&text)?
        }
        None => ConfigFile::default(),
    };
    let io_err = |e: io::Error| io_failure(cli.out.as_deref(), e);

    match cli.cmd {
        Cmd::Constants { point } => {
            let p = validate(point.n, point.alpha, point.beta)?;
            let d = p.derive();
            let hardy = hardy_constants(&p);
            let weight = (p.beta() - 2.0 * p.alpha()) / 2.0;
            let (rellich, rellich_k) = rellich_infimum(p.n(), weight);
            let record = json!({
                "N": p.n(),
                "alpha": p.alpha(),
                "beta": p.beta(),
                "class": classify(p.n(), p.alpha(), p.beta()),
                "p_star": d.p_star,
                "q": d.q,
                "M": d.m,
                "amplitude": amplitude_constant(&p),
                "s_r": s_r_closed(&p),
                "beta_fs": if p.alpha() > 0.0 { beta_fs(p.n(), p.alpha()).ok() } else { None },
                "hardy_e": hardy.e,
                "hardy_c": hardy.c,
                "rellich_infimum": rellich,
                "rellich_k": rellich_k,
            });
            let mut sink = open_sink(&cli.out)?;
            emit(&mut sink, cli.json, &record)
                .and_then(|_| sink.flush())
                .map_err(io_err)?;
            Ok(OK)
        }
        Cmd::Certify { point, eps, tol } => {
            let p = validate(point.n, point.alpha, point.beta)?;
            let s = Settings::resolve(&file, tol, eps);
            let c = certify_with(&p, s.eps, s.certify_tol, &s.quad)?;
            let mut record = serde_json::to_value(&c).expect("certificate serialises");
            record["passed"] = json!(c.passed());
            let mut sink = open_sink(&cli.out)?;
            emit(&mut sink, cli.json, &record)
                .and_then(|_| sink.flush())
                .map_err(io_err)?;
            if !c.passed() {
                eprintln!("certificate failed: {}", c.discrepancies.join("; "));
                return Ok(FAILED);
            }
            Ok(OK)
        }
        Cmd::FsCurve { n, alpha, tol } => {
            let s = Settings::resolve(&file, None, None);
            let mut sink = open_sink(&cli.out)?;
            for a in parse_range(&alpha)?.values() {
                let closed = beta_fs(n, a)?;
                let located = fs_locate_with(n, a, tol, &s.quad)?;
                let record = json!({
                    "N": n,
                    "alpha": a,
                    "beta_fs": closed,
                    "beta_located": located,
                    "abs_diff": (located - closed).abs(),
                });
                emit(&mut sink, cli.json, &record).map_err(io_err)?;
            }
            sink.flush().map_err(io_err)?;
            Ok(OK)
        }
        Cmd::Scan {
            n,
            alpha,
            beta,
            outputs,
            jobs,
            timing,
        } => {
            let outputs = outputs
                .split(',')
                .map(|t| Output::parse(t.trim()))
                .collect::<ckn_lab::Result<BTreeSet<_>>>()?;
            let spec = ScanSpec {
                n,
                alpha_range: parse_range(&alpha)?,
                beta_range: parse_beta(&beta)?,
                outputs,
            };
            let jobs = resolve_jobs(jobs, &file)?;
            let s = Settings::resolve(&file, None, None);
            // validate the grid before touching the output path
            spec.grid()?;
            let mut sink = open_sink(&cli.out)?;
            let records = run_scan(&spec, jobs, &s.quad, timing)?;
            if cli.json {
                for r in &records {
                    writeln!(sink, "{}", serde_json::to_string(r).expect("record serialises")).map_err(io_err)?;
                }
                sink.flush().map_err(io_err)?;
            } else {
                write_csv(&mut sink, &records).map_err(io_err)?;
            }
            for r in &records {
                for (col, msg) in &r.errors {
                    eprintln!("({}, {}, {}) {col}: {msg}", r.n, r.alpha, r.beta);
                }
            }
            Ok(OK)
        }
        Cmd::VerifyAll { level, inject_fault } => {
            let opts = VerifyOptions {
                full: matches!(level, Level::Full),
                inject_fault,
            };
            let outcomes = verify_all(&opts);
            let mut sink = open_sink(&cli.out)?;
            for o in &outcomes {
                if cli.json {
                    writeln!(sink, "{}", serde_json::to_string(o).expect("outcome serialises"))
                } else {
                    writeln!(
                        sink,
                        "{} {}: {}",
                        if o.pass { "PASS" } else { "FAIL" },
                        o.name,
                        o.detail
                    )
                }
                .map_err(io_err)?;
            }
            sink.flush().map_err(io_err)?;
            let failing: Vec<_> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name).collect();
            if failing.is_empty() {
                Ok(OK)
            } else {
                eprintln!("failing checks: {}", failing.join(", "));
                Ok(FAILED)
            }
        }
        Cmd::TransformCheck {
            point,
            tol,
            span,
            samples,
        } => {
            let p = validate(point.n, point.alpha, point.beta)?;
            let tol = tol.unwrap_or(1e-6);
            if !(span > 0.0) || samples < 2 {
                return Err(Failure {
                    code: INVALID,
                    message: "need span > 0 and samples >= 2".into(),
                });
            }
            let m = p.derive().m;
            let ef = emden_fowler(extremal(&p, 1.0)?, &p);
            let closed = ClosedFormPhi::new(m)?;
            let (mut residual, mut deviation) = (0.0f64, 0.0f64);
            for i in 0..samples {
                let t = -span + 2.0 * span * i as f64 / (samples - 1) as f64;
                let want = closed.jet(t)[0];
                residual = residual.max(ef.residual(t));
                deviation = deviation.max(((ef.phi(t) - want) / want).abs());
            }
            let pass = residual <= tol && deviation <= tol;
            let record = json!({
                "N": p.n(),
                "alpha": p.alpha(),
                "beta": p.beta(),
                "M": m,
                "max_residual": residual,
                "max_closed_form_deviation": deviation,
                "tol": tol,
                "pass": pass,
            });
            let mut sink = open_sink(&cli.out)?;
            emit(&mut sink, cli.json, &record)
                .and_then(|_| sink.flush())
                .map_err(io_err)?;
            Ok(if pass { OK } else { FAILED })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
