//! Command line surface.
//!
//! Every subcommand prints exactly one JSON object:
//! `{"status": .., "payload": {..}, "timing_ns": ..}` — except `bench`,
//! which emits CSV (`width,median_ns,runs`) for downstream plotting.
//! Exit codes: 0 ok, 1 no solution, 2 usage or validation error.
//! Residues print as decimal strings and parse as decimal or 0x hex.

use crate::chebyshev::{self, ChebDegree};
use crate::degree_solver;
use crate::kex_sim::{self, BaseKind};
use crate::perm_generic::{self, IterOracle, PermPoly, TABLE_WIDTH_LIMIT};
use crate::residue_forms::{
    self, classify, ResidueForm, DEGREE_BRUTE_MAX_WIDTH, ORBIT_BRUTE_MAX_WIDTH,
};
use crate::ring2w::RingElem;
use crate::verification;
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    NoSolution,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NoSolution => "no_solution",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NoSolution => 1,
            Status::Error => 2,
        }
    }
}

/// One finished invocation: what happened, the command-specific payload,
/// and wall time.
#[derive(Debug, Clone)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub timing_ns: u128,
}

impl CommandResult {
    pub fn render_json(&self) -> String {
        json!({
            "status": self.status.as_str(),
            "payload": self.payload,
            "timing_ns": self.timing_ns,
        })
        .to_string()
    }

    fn render_plain(&self) -> String {
        let mut lines = vec![format!("status: {}", self.status.as_str())];
        if let Value::Object(map) = &self.payload {
            for (key, value) in map {
                match value {
                    Value::String(s) => lines.push(format!("{key}: {s}")),
                    other => lines.push(format!("{key}: {other}")),
                }
            }
        } else {
            lines.push(self.payload.to_string());
        }
        lines.join("\n")
    }
}

fn width_parser(s: &str) -> Result<u32, String> {
    let w: u32 = s.parse().map_err(|_| format!("{s:?} is not an integer"))?;
    if (5..=crate::ring2w::MAX_WIDTH).contains(&w) {
        Ok(w)
    } else {
        Err(format!(
            "width must sit in [5, {}]",
            crate::ring2w::MAX_WIDTH
        ))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cheby2w",
    version,
    about = "Chebyshev and permutation polynomial toolkit over Z/2^w Z"
)]
struct Cli {
    /// Emit a machine-readable JSON object (pass --json=false for plain text).
    #[arg(long, global = true, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaseArg {
    OddNear,
    Even,
    Degenerate,
}

impl From<BaseArg> for BaseKind {
    fn from(value: BaseArg) -> Self {
        match value {
            BaseArg::OddNear => BaseKind::OddNear,
            BaseArg::Even => BaseKind::Even,
            BaseArg::Degenerate => BaseKind::Degenerate,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Evaluate T_degree(x) mod 2^width.
    Eval {
        #[arg(long)]
        degree: String,
        #[arg(long)]
        x: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
    },
    /// Decompose x into its 2-adic normal form.
    Classify {
        #[arg(long)]
        x: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
    },
    /// Orbital period of the map T_degree starting from x.
    OrbitPeriod {
        #[arg(long)]
        x: String,
        #[arg(long)]
        degree: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
        /// Also walk the orbit directly and report the observed period.
        #[arg(long)]
        brute: bool,
    },
    /// Degree period at argument x.
    DegreePeriod {
        #[arg(long)]
        x: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
        /// Also scan the degree sequence directly.
        #[arg(long)]
        brute: bool,
    },
    /// Find the degrees p with T_p(x) = y mod 2^width.
    Solve {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
        /// Stop at the first verified solution instead of scanning all shifts.
        #[arg(long)]
        first: bool,
    },
    /// Check whether T_degree(x) = y mod 2^width.
    Verify {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        degree: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
    },
    /// Test the permutation criterion on a coefficient list (constant first).
    RivestCheck {
        #[arg(long)]
        poly: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
    },
    /// Find j with F^j(x) = y for F a permutation polynomial (--poly,
    /// table oracle, width <= 22) or F = T_c (--cheb-degree, closed form).
    GenericAttack {
        #[arg(long)]
        poly: Option<String>,
        #[arg(long)]
        cheb_degree: Option<String>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
    },
    /// Run the key exchange once and break it from the transcript.
    KexDemo {
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Base point shape: the default exercises the odd-argument case.
        #[arg(long, value_enum, default_value_t = BaseArg::OddNear)]
        base: BaseArg,
    },
    /// Re-check the closed-form period laws against brute force at one width.
    VerifyTheorems {
        #[arg(short, long, value_parser = width_parser)]
        width: u32,
        /// Sample count for widths too large to sweep exhaustively.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Time the solver across widths; prints CSV (width,median_ns,runs).
    Bench {
        /// Comma-separated width ladder.
        #[arg(long, default_value = "16,32,64,128")]
        widths: String,
        /// Repetitions per width (floored at 9 so medians are stable).
        #[arg(long, default_value_t = 9)]
        runs: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Entry point shared by `main` and the golden tests: returns what to
/// print and the process exit code.
pub fn run<I, T>(argv: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            return (err.to_string().trim_end().to_string(), 0);
        }
        Err(err) => {
            let result = CommandResult {
                status: Status::Error,
                payload: json!({ "error": err.to_string().trim_end() }),
                timing_ns: 0,
            };
            return (result.render_json(), Status::Error.exit_code());
        }
    };
    let json_mode = cli.json;
    if let Cmd::Bench { .. } = cli.command {
        return match execute(cli.command) {
            Ok((_, Value::String(csv))) => (csv, 0),
            Ok(_) => unreachable!("bench yields CSV text"),
            Err(message) => error_result(message, json_mode),
        };
    }
    let started = Instant::now();
    let outcome = execute(cli.command);
    let timing_ns = started.elapsed().as_nanos();
    match outcome {
        Ok((status, payload)) => {
            let result = CommandResult {
                status,
                payload,
                timing_ns,
            };
            let text = if json_mode {
                result.render_json()
            } else {
                result.render_plain()
            };
            (text, status.exit_code())
        }
        Err(message) => error_result(message, json_mode),
    }
}

fn error_result(message: String, json_mode: bool) -> (String, i32) {
    let result = CommandResult {
        status: Status::Error,
        payload: json!({ "error": message }),
        timing_ns: 0,
    };
    let text = if json_mode {
        result.render_json()
    } else {
        result.render_plain()
    };
    (text, Status::Error.exit_code())
}

fn parse_residue(raw: &str, width: u32) -> Result<RingElem, String> {
    RingElem::parse(raw, width).map_err(|e| e.to_string())
}

fn parse_degree(raw: &str) -> Result<ChebDegree, String> {
    ChebDegree::parse(raw).ok_or_else(|| format!("cannot parse degree {raw:?}"))
}

fn parse_coefficients(raw: &str) -> Result<Vec<BigInt>, String> {
    raw.split(',')
        .map(|tok| {
            let t = tok.trim();
            let (negative, magnitude) = match t.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, t),
            };
            let parsed = if let Some(hex) = magnitude
                .strip_prefix("0x")
                .or_else(|| magnitude.strip_prefix("0X"))
            {
                BigUint::parse_bytes(hex.as_bytes(), 16)
            } else if magnitude.is_empty() {
                None
            } else {
                BigUint::parse_bytes(magnitude.as_bytes(), 10)
            };
            let value = parsed.ok_or_else(|| format!("cannot parse coefficient {t:?}"))?;
            let signed = BigInt::from(value);
            Ok(if negative { -signed } else { signed })
        })
        .collect()
}

fn period_value(period: &BigUint) -> Value {
    match period.to_u64() {
        Some(small) => json!(small),
        None => json!(period.to_string()),
    }
}

fn form_payload(form: &ResidueForm) -> Value {
    match form {
        ResidueForm::OddNear { a, k, sign } => json!({
            "kind": form.kind_name(),
            "a": a.to_string(),
            "k": k,
            "sign": sign,
        }),
        ResidueForm::EvenForm { a, k } => json!({
            "kind": form.kind_name(),
            "a": a.to_string(),
            "k": k,
        }),
        _ => json!({ "kind": form.kind_name() }),
    }
}

fn sweep_payload(report: verification::SweepReport) -> Value {
    json!({ "cells": report.cells, "mismatches": report.mismatches })
}

fn execute(cmd: Cmd) -> Result<(Status, Value), String> {
    match cmd {
        Cmd::Eval { degree, x, width } => {
            let x = parse_residue(&x, width)?;
            let degree = parse_degree(&degree)?;
            let value = chebyshev::eval(&degree, &x);
            Ok((Status::Ok, json!({ "value": value.to_string() })))
        }
        Cmd::Classify { x, width } => {
            let x = parse_residue(&x, width)?;
            Ok((Status::Ok, form_payload(&classify(&x))))
        }
        Cmd::OrbitPeriod {
            x,
            degree,
            width,
            brute,
        } => {
            let x = parse_residue(&x, width)?;
            let degree = parse_degree(&degree)?;
            let period =
                residue_forms::orbital_period_closed(&x, &degree).map_err(|e| e.to_string())?;
            let mut payload = json!({ "period": period_value(&period) });
            if brute {
                if width > ORBIT_BRUTE_MAX_WIDTH {
                    return Err(format!(
                        "--brute orbit walking supports width <= {ORBIT_BRUTE_MAX_WIDTH}"
                    ));
                }
                let walked =
                    residue_forms::orbital_period_brute(&x, &degree).map_err(|e| e.to_string())?;
                payload["brute_period"] = period_value(&walked);
            }
            Ok((Status::Ok, payload))
        }
        Cmd::DegreePeriod { x, width, brute } => {
            let x = parse_residue(&x, width)?;
            let period = residue_forms::degree_period_closed(&x);
            let mut payload = json!({ "period": period_value(&period) });
            if brute {
                if width > DEGREE_BRUTE_MAX_WIDTH {
                    return Err(format!(
                        "--brute degree scanning supports width <= {DEGREE_BRUTE_MAX_WIDTH}"
                    ));
                }
                payload["brute_period"] = period_value(&residue_forms::degree_period_brute(&x));
            }
            Ok((Status::Ok, payload))
        }
        Cmd::Solve { x, y, width, first } => {
            let x = parse_residue(&x, width)?;
            let y = parse_residue(&y, width)?;
            let solution = if first {
                degree_solver::solve_any(&x, &y)
            } else {
                degree_solver::solve(&x, &y)
            };
            let status = if solution.is_empty() {
                Status::NoSolution
            } else {
                Status::Ok
            };
            let entries: Vec<Value> = solution
                .solutions
                .iter()
                .map(|s| {
                    json!({
                        "shift": s.shift,
                        "odd_factor": s.odd_factor.to_string(),
                        "degree": s.degree.to_string(),
                        "all_odd": s.all_odd,
                    })
                })
                .collect();
            let degrees: Vec<String> = solution.degrees().iter().map(|d| d.to_string()).collect();
            Ok((
                status,
                json!({
                    "zero_degree_solves": solution.zero_degree_solves,
                    "solutions": entries,
                    "degrees": degrees,
                }),
            ))
        }
        Cmd::Verify {
            x,
            y,
            degree,
            width,
        } => {
            let x = parse_residue(&x, width)?;
            let y = parse_residue(&y, width)?;
            let degree = parse_degree(&degree)?;
            let valid = degree_solver::verify(&x, &y, &degree);
            Ok((Status::Ok, json!({ "valid": valid })))
        }
        Cmd::RivestCheck { poly, width } => {
            let coeffs = parse_coefficients(&poly)?;
            let is_permutation = perm_generic::is_permutation_poly(&coeffs, width);
            Ok((Status::Ok, json!({ "is_permutation": is_permutation })))
        }
        Cmd::GenericAttack {
            poly,
            cheb_degree,
            x,
            y,
            width,
        } => {
            let x = parse_residue(&x, width)?;
            let y = parse_residue(&y, width)?;
            let oracle = match (poly, cheb_degree) {
                (Some(poly), None) => {
                    if width > TABLE_WIDTH_LIMIT {
                        return Err(format!(
                            "table oracle supports width <= {TABLE_WIDTH_LIMIT}; \
                             use --cheb-degree for larger widths"
                        ));
                    }
                    let coeffs = parse_coefficients(&poly)?;
                    let poly = PermPoly::new(&coeffs, width).map_err(|e| e.to_string())?;
                    IterOracle::table(&poly).map_err(|e| e.to_string())?
                }
                (None, Some(c)) => {
                    let base = parse_degree(&c)?;
                    IterOracle::closed_form_chebyshev(base, width).map_err(|e| e.to_string())?
                }
                _ => return Err("pass exactly one of --poly or --cheb-degree".to_string()),
            };
            let (found, stats) = perm_generic::generic_attack_with_stats(&oracle, &x, &y)
                .map_err(|e| e.to_string())?;
            match found {
                Some(j) => Ok((
                    Status::Ok,
                    json!({ "j": j.to_string(), "oracle_calls": stats.oracle_calls }),
                )),
                None => Ok((
                    Status::NoSolution,
                    json!({ "j": Value::Null, "oracle_calls": stats.oracle_calls }),
                )),
            }
        }
        Cmd::KexDemo { width, seed, base } => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let base = kex_sim::sample_base(&mut rng, width, base.into());
            let alice = kex_sim::sample_secret(&mut rng, width);
            let bob = kex_sim::sample_secret(&mut rng, width);
            let (transcript, key) =
                kex_sim::protocol_run(&base, &alice, &bob).map_err(|e| e.to_string())?;
            let recovered = kex_sim::eavesdrop(&transcript).map_err(|e| e.to_string())?;
            let transcript_json: Value =
                serde_json::from_str(&transcript.to_json()).expect("transcript JSON is valid");
            let key_match = recovered == key;
            Ok((
                Status::Ok,
                json!({
                    "transcript": transcript_json,
                    "alice_secret": alice.to_string(),
                    "bob_secret": bob.to_string(),
                    "shared_key": key.to_string(),
                    "recovered_key": recovered.to_string(),
                    "key_match": key_match,
                }),
            ))
        }
        Cmd::VerifyTheorems {
            width,
            samples,
            seed,
            threads,
        } => {
            if width > DEGREE_BRUTE_MAX_WIDTH {
                return Err(format!(
                    "theorem sweeps need the brute oracles; width <= {DEGREE_BRUTE_MAX_WIDTH}"
                ));
            }
            let samples = samples.unwrap_or(1000);
            let orbital = if width <= 8 {
                verification::orbital_law_exhaustive(width, threads)
            } else {
                verification::orbital_law_random(width, samples, seed)
            };
            let degree = if width <= 12 {
                verification::degree_law_exhaustive(width)
            } else {
                verification::degree_law_random(width, samples, seed)
            };
            let clean = orbital.clean() && degree.clean();
            let status = if clean { Status::Ok } else { Status::Error };
            Ok((
                status,
                json!({
                    "width": width,
                    "orbital": sweep_payload(orbital),
                    "degree": sweep_payload(degree),
                    "clean": clean,
                }),
            ))
        }
        Cmd::Bench { widths, runs, seed } => {
            let runs = runs.max(9);
            let widths: Vec<u32> = widths
                .split(',')
                .map(|tok| width_parser(tok.trim()))
                .collect::<Result<_, _>>()?;
            let mut csv = String::from("width,median_ns,runs\n");
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            for width in widths {
                let mut times: Vec<u128> = Vec::with_capacity(runs as usize);
                for _ in 0..runs {
                    let (x, y) = random_solver_instance(&mut rng, width);
                    let started = Instant::now();
                    let solution = degree_solver::solve(&x, &y);
                    times.push(started.elapsed().as_nanos());
                    assert!(!solution.is_empty(), "constructed instances are solvable");
                }
                times.sort_unstable();
                let median = times[times.len() / 2];
                csv.push_str(&format!("{width},{median},{runs}\n"));
            }
            Ok((Status::Ok, Value::String(csv.trim_end().to_string())))
        }
    }
}

fn random_solver_instance(rng: &mut ChaCha20Rng, width: u32) -> (RingElem, RingElem) {
    use num_bigint::RandBigInt;
    let x = RingElem::new(rng.gen_biguint(width as u64), width).expect("valid width");
    let degree = ChebDegree::new(rng.gen_biguint(width as u64));
    let y = chebyshev::eval(&degree, &x);
    (x, y)
}
