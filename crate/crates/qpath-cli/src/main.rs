//! Command-line driver: amplitudes, verification suites, Wigner tables,
//! symplectic data, and generating functions, all emitted as a versioned
//! JSON envelope on stdout. Exit code 0 means every requested check
//! passed; anything else exits nonzero with a machine-readable error.

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qpath_core::circuit::{parse_circuit, CircuitIr, Gate};
use qpath_core::cv::parse_cv_circuit;
use qpath_core::densesim::{circuit_unitary, dense_amplitude, DenseMatrix, DENSE_DIM_CAP};
use qpath_core::action::gate_generating_function;
use qpath_core::algebra::Var;
use qpath_core::pathsum::{amplitude, build_phase, effective_cap, Method};
use qpath_core::phasespace::{circuit_symplectomorphism, wigner_transform};
use qpath_core::verify::{run_suite, CampaignOutcome, SUITES};
use num_complex::Complex64;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "qpath",
    about = "Exact sum-over-paths engine for prime-dimensional Clifford circuits",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Pretty-print the JSON envelope.
    #[arg(long, global = true)]
    pretty: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pathsum,
    Gauss,
    Dense,
}

#[derive(Subcommand)]
enum Command {
    /// Transition amplitude <out|U|in> of a circuit file.
    Amp {
        /// Path to a circuit description file.
        #[arg(long)]
        circuit: PathBuf,
        /// Input basis point, comma-separated digits, one per wire.
        #[arg(long = "in")]
        input: String,
        /// Output basis point, comma-separated digits, one per wire.
        #[arg(long = "out")]
        output: String,
        /// Evaluation strategy.
        #[arg(long, value_enum, default_value = "pathsum")]
        method: MethodArg,
        /// Enumeration cap (points); overrides QPATH_CAP and the default.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Run a named verification suite.
    Verify {
        /// One of: oracle, main-disc, main-cv, covariance, actclasstraj, balanced.
        #[arg(long)]
        suite: String,
        /// Base seed; every case derives its own PRNG stream from it.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of random cases (fixed sub-checks always run).
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
    /// Wigner table of a basis state evolved through a circuit.
    Wigner {
        #[arg(long)]
        circuit: PathBuf,
        /// Initial basis state as a flat index (little-endian digits).
        #[arg(long, default_value_t = 0)]
        state: usize,
    },
    /// Affine symplectomorphism (S, a) of a whole circuit.
    Symplectic {
        #[arg(long)]
        circuit: PathBuf,
    },
    /// Generating function of a single gate at a given dimension.
    Genfun {
        /// Gate mnemonic: F, R, SUM, or ID.
        #[arg(long)]
        gate: String,
        /// Odd prime dimension.
        #[arg(long)]
        d: u64,
    },
    /// Syntax-check a circuit file (discrete or continuous format).
    Parse {
        #[arg(long)]
        circuit: PathBuf,
    },
}

#[derive(Serialize)]
struct Envelope {
    schema_version: u32,
    command: &'static str,
    status: &'static str,
    timing_ms: u128,
    payload: Value,
}

fn emit(envelope: &Envelope, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(envelope)
    } else {
        serde_json::to_string(envelope)
    }
    .expect("envelope serializes");
    println!("{text}");
}

fn fail(command: &'static str, start: Instant, code: &str, err: impl Display, pretty: bool) -> ExitCode {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        status: "error",
        timing_ms: start.elapsed().as_millis(),
        payload: json!({ "code": code, "message": err.to_string() }),
    };
    emit(&envelope, pretty);
    ExitCode::FAILURE
}

fn succeed(command: &'static str, start: Instant, payload: Value, pretty: bool) -> ExitCode {
    let envelope = Envelope {
        schema_version: SCHEMA_VERSION,
        command,
        status: "ok",
        timing_ms: start.elapsed().as_millis(),
        payload,
    };
    emit(&envelope, pretty);
    ExitCode::SUCCESS
}

fn read_circuit(path: &PathBuf) -> Result<CircuitIr, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_circuit(&text).map_err(|e| e.to_string())
}

fn parse_point(text: &str, d: u64, n: usize, what: &str) -> Result<Vec<u64>, String> {
    let digits: Result<Vec<u64>, _> = text
        .split(',')
        .map(|part| part.trim().parse::<u64>())
        .collect();
    let digits = digits.map_err(|e| format!("{what}: {e}"))?;
    if digits.len() != n {
        return Err(format!("{what}: expected {n} digits, found {}", digits.len()));
    }
    if let Some(bad) = digits.iter().find(|&&x| x >= d) {
        return Err(format!("{what}: digit {bad} is out of range for d={d}"));
    }
    Ok(digits)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pretty = cli.pretty;
    let start = Instant::now();
    match cli.command {
        Command::Amp {
            circuit,
            input,
            output,
            method,
            cap,
        } => {
            let ir = match read_circuit(&circuit) {
                Ok(ir) => ir,
                Err(e) => return fail("amp", start, "parse", e, pretty),
            };
            let q0 = match parse_point(&input, ir.d, ir.n, "--in") {
                Ok(v) => v,
                Err(e) => return fail("amp", start, "input", e, pretty),
            };
            let qf = match parse_point(&output, ir.d, ir.n, "--out") {
                Ok(v) => v,
                Err(e) => return fail("amp", start, "output", e, pretty),
            };
            let method_name = match method {
                MethodArg::Pathsum => "pathsum",
                MethodArg::Gauss => "gauss",
                MethodArg::Dense => "dense",
            };
            let mut payload = json!({
                "d": ir.d,
                "n": ir.n,
                "method": method_name,
                "in": q0,
                "out": qf,
            });
            let amp: Complex64 = match method {
                MethodArg::Dense => match dense_amplitude(&ir, &q0, &qf, DENSE_DIM_CAP) {
                    Ok(a) => a,
                    Err(e) => return fail("amp", start, "dense", e, pretty),
                },
                MethodArg::Pathsum | MethodArg::Gauss => {
                    let form = build_phase(&ir);
                    let m = match method {
                        MethodArg::Pathsum => Method::Enumerate,
                        _ => Method::Gauss,
                    };
                    match amplitude(&form, &q0, &qf, m, effective_cap(cap)) {
                        Ok(exact) => {
                            payload["exact"] = json!({
                                "counts": exact.counts(),
                                "half_power": exact.half_power(),
                            });
                            exact.to_complex()
                        }
                        Err(e) => return fail("amp", start, "pathsum", e, pretty),
                    }
                }
            };
            payload["re"] = json!(amp.re);
            payload["im"] = json!(amp.im);
            succeed("amp", start, payload, pretty)
        }
        Command::Verify { suite, seed, count } => {
            let Some(outcomes) = run_suite(&suite, seed, count) else {
                return fail(
                    "verify",
                    start,
                    "suite",
                    format!("unknown suite {suite:?}; expected one of {SUITES:?}"),
                    pretty,
                );
            };
            let all_passed = outcomes.iter().all(CampaignOutcome::passed);
            let campaigns: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({
                        "name": o.name,
                        "cases": o.cases,
                        "elapsed_ms": o.elapsed_ms,
                        "passed": o.passed(),
                        "failures": o
                            .failures
                            .iter()
                            .map(|f| json!({ "case": f.case, "detail": f.detail }))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            let payload = json!({
                "suite": suite,
                "seed": seed,
                "count": count,
                "rng": "chacha8-stream",
                "passed": all_passed,
                "campaigns": campaigns,
            });
            let envelope = Envelope {
                schema_version: SCHEMA_VERSION,
                command: "verify",
                status: "ok",
                timing_ms: start.elapsed().as_millis(),
                payload,
            };
            emit(&envelope, pretty);
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Wigner { circuit, state } => {
            let ir = match read_circuit(&circuit) {
                Ok(ir) => ir,
                Err(e) => return fail("wigner", start, "parse", e, pretty),
            };
            let dim = (ir.d as usize).pow(ir.n as u32);
            if state >= dim {
                return fail(
                    "wigner",
                    start,
                    "state",
                    format!("basis index {state} out of range for dimension {dim}"),
                    pretty,
                );
            }
            let u = match circuit_unitary(&ir, DENSE_DIM_CAP) {
                Ok(u) => u,
                Err(e) => return fail("wigner", start, "dense", e, pretty),
            };
            let mut rho = DenseMatrix::zeros(dim);
            rho.set(state, state, Complex64::new(1.0, 0.0));
            let evolved = u.conjugate(&rho);
            let w = match wigner_transform(&evolved, ir.d, ir.n) {
                Ok(w) => w,
                Err(e) => return fail("wigner", start, "wigner", e, pretty),
            };
            succeed(
                "wigner",
                start,
                json!({
                    "d": ir.d,
                    "n": ir.n,
                    "state": state,
                    "indexing": "little-endian (q1..qn, p1..pn)",
                    "values": w.values,
                }),
                pretty,
            )
        }
        Command::Symplectic { circuit } => {
            let ir = match read_circuit(&circuit) {
                Ok(ir) => ir,
                Err(e) => return fail("symplectic", start, "parse", e, pretty),
            };
            let map = circuit_symplectomorphism(&ir);
            let rows: Vec<Vec<u64>> = (0..2 * ir.n)
                .map(|i| (0..2 * ir.n).map(|j| map.s.get(i, j)).collect())
                .collect();
            succeed(
                "symplectic",
                start,
                json!({
                    "d": ir.d,
                    "n": ir.n,
                    "coordinates": "(q1..qn, p1..pn)",
                    "s": rows,
                    "a": map.a,
                }),
                pretty,
            )
        }
        Command::Genfun { gate, d } => {
            let parsed = match gate.to_ascii_uppercase().as_str() {
                "F" => Gate::F(0),
                "R" => Gate::R(0),
                "SUM" => Gate::Sum(0, 1),
                "ID" => Gate::Id(0),
                other => {
                    return fail(
                        "genfun",
                        start,
                        "gate",
                        format!("unknown gate {other:?}; expected F, R, SUM, or ID"),
                        pretty,
                    )
                }
            };
            let poly = match gate_generating_function(&parsed, d) {
                Ok(p) => p,
                Err(e) => return fail("genfun", start, "genfun", e, pretty),
            };
            let arity = parsed.wires().len();
            let rendered = poly.render_with(|v| match (v, arity) {
                (Var::In(0), 1) => "q".to_string(),
                (Var::Out(0), 1) => "Q".to_string(),
                (Var::In(i), _) => format!("q{}", i + 1),
                (Var::Out(i), _) => format!("Q{}", i + 1),
                (other, _) => other.default_name(),
            });
            succeed(
                "genfun",
                start,
                json!({
                    "gate": parsed.mnemonic(),
                    "d": d,
                    "polynomial": rendered,
                }),
                pretty,
            )
        }
        Command::Parse { circuit } => {
            let text = match std::fs::read_to_string(&circuit) {
                Ok(t) => t,
                Err(e) => {
                    return fail(
                        "parse",
                        start,
                        "io",
                        format!("cannot read {}: {e}", circuit.display()),
                        pretty,
                    )
                }
            };
            match parse_circuit(&text) {
                Ok(ir) => succeed(
                    "parse",
                    start,
                    json!({
                        "format": "discrete",
                        "d": ir.d,
                        "n": ir.n,
                        "gates": ir.gates.iter().map(Gate::to_string).collect::<Vec<_>>(),
                    }),
                    pretty,
                ),
                Err(disc_err) => match parse_cv_circuit(&text) {
                    Ok(cv) => succeed(
                        "parse",
                        start,
                        json!({
                            "format": "cv",
                            "n": cv.n,
                            "gates": cv.gates.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                        }),
                        pretty,
                    ),
                    Err(cv_err) => fail(
                        "parse",
                        start,
                        "syntax",
                        format!("not a discrete circuit ({disc_err}); not a continuous circuit ({cv_err})"),
                        pretty,
                    ),
                },
            }
        }
    }
}
