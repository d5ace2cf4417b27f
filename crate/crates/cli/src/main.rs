use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use detshallow::abs_det::abs_det_approx;
use detshallow::cac::{hermitian_schedule, hurwitz_schedule};
use detshallow::det_circuits::SignMode;
use detshallow::matrix::{delta_q, exact_det, format_matrix, generate_hermitian, generate_hurwitz, generate_psd, parse_matrix};
use detshallow::pipeline::{approximate_determinant, circuit_report, ApproxOptions, ParamMode, ProblemClass};
use detshallow::Error;

#[derive(Parser)]
#[command(name = "detshallow", version, about = "Determinant approximation through shallow arithmetic circuits")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Hermitian,
    Hurwitz,
    Abs,
}

#[derive(Clone, Copy, ValueEnum)]
enum PMode {
    Paper,
    Practical,
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenClass {
    #[value(name = "H")]
    H,
    #[value(name = "S")]
    S,
    #[value(name = "psd")]
    Psd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Approximate the determinant of a matrix file.
    Approx {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "practical")]
        param_mode: PMode,
        #[arg(long)]
        m0: Option<u64>,
        #[arg(long)]
        precision_bits: Option<usize>,
        #[arg(long)]
        verify: bool,
        /// Write the depth-reduced, fan-in-2 pipeline circuit here.
        #[arg(long)]
        dump_circuit: Option<PathBuf>,
        #[arg(long)]
        dump_schedule: bool,
        #[arg(long, value_enum, default_value = "json")]
        report: Report,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Skip the class certificate check.
        #[arg(long = "unsafe")]
        unsafe_input: bool,
        /// Run the continuation even when the budget reaches n.
        #[arg(long)]
        force_cac: bool,
        /// Report composed-circuit metrics before and after depth reduction.
        #[arg(long)]
        circuit_metrics: bool,
    },
    /// Generate a matrix with a certified spectrum.
    Gen {
        #[arg(long, value_enum)]
        class: GenClass,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        Error::Precondition(_)
        | Error::Parameter(_)
        | Error::Parse(_)
        | Error::EmptyMatrix
        | Error::OracleLimit { .. }
        | Error::Magnitude { .. }
        | Error::Normalization => 2,
        _ => 1,
    }
}

fn print_text(v: &Value, prefix: &str) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                print_text(x, &p);
            }
        }
        _ => println!("{prefix}: {v}"),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Gen { class, n, delta, seed, out } => {
            let m = match class {
                GenClass::H => generate_hermitian(n, delta, seed)?,
                GenClass::S => generate_hurwitz(n, delta, seed)?,
                GenClass::Psd => generate_psd(n, delta, seed)?,
            };
            fs::write(&out, format_matrix(&m)).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", out.display())))?;
            Ok(())
        }
        Cmd::Approx {
            matrix,
            mode,
            delta,
            epsilon,
            param_mode,
            m0,
            precision_bits,
            verify,
            dump_circuit,
            dump_schedule,
            report,
            seed,
            unsafe_input,
            force_cac,
            circuit_metrics,
        } => {
            let text = fs::read_to_string(&matrix).map_err(|e| Error::Parse(format!("cannot read {}: {e}", matrix.display())))?;
            let a = parse_matrix(&text)?;
            let mut out = match mode {
                Mode::Abs => {
                    let start = std::time::Instant::now();
                    let r = abs_det_approx(&a, epsilon, 1.0 / delta)?;
                    let mut v = json!({
                        "mode": "abs",
                        "estimate": r.estimate,
                        "v": r.v,
                        "iterations": r.iterations,
                        "alpha": r.alpha,
                    });
                    if verify {
                        let o = exact_det(&a)?.to_c64().norm();
                        v["oracle"] = json!(o);
                        v["rel_error"] = json!((r.estimate - o).abs() / o);
                    }
                    v["wall_time_ms"] = json!(start.elapsed().as_millis() as u64);
                    v
                }
                Mode::Hermitian | Mode::Hurwitz => {
                    let class = if matches!(mode, Mode::Hermitian) { ProblemClass::Hermitian } else { ProblemClass::Hurwitz };
                    let mut o = ApproxOptions::practical(class);
                    o.param_mode = match param_mode {
                        PMode::Paper => ParamMode::Paper,
                        PMode::Practical => ParamMode::Practical,
                    };
                    o.m0 = m0;
                    o.precision_bits = precision_bits;
                    o.verify = verify;
                    o.unsafe_input = unsafe_input;
                    o.force_cac = force_cac;
                    o.circuit_metrics = circuit_metrics;
                    let r = approximate_determinant(&a, epsilon, delta, &o)?;
                    let dq = delta_q(delta)?;
                    let (schedule, sign) = match class {
                        ProblemClass::Hermitian => (hermitian_schedule(&dq)?, SignMode::Plain),
                        ProblemClass::Hurwitz => (hurwitz_schedule(&dq)?, SignMode::Negated),
                    };
                    if dump_schedule {
                        for line in schedule.dump() {
                            eprintln!("{line}");
                        }
                    }
                    if let Some(path) = dump_circuit {
                        let k = r.k.map_or(a.n, |k| k.min(a.n as u128) as usize).max(1);
                        let (_, c) = circuit_report(a.n, sign, &schedule, k, epsilon)?;
                        fs::write(&path, c.to_text()).map_err(|e| Error::Parameter(format!("cannot write {}: {e}", path.display())))?;
                    }
                    serde_json::to_value(&r).map_err(|e| Error::Parameter(e.to_string()))?
                }
            };
            out["seed"] = json!(seed);
            match report {
                Report::Json => println!("{}", serde_json::to_string_pretty(&out).expect("serializable")),
                Report::Text => print_text(&out, ""),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
