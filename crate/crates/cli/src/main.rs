//! `ratioref`: JSON-in/JSON-out front end for the ratio-induced reference
//! calculus.
//!
//! Every solver runs on one of two numeric backends, selected by
//! `--backend`: exact rationals (default; scales parse as `"p/q"`, decimal
//! strings, or integers, and results print as exact fractions) or `f64`
//! (decimals with 15 significant digits). Domain and validation failures
//! exit 1 with a machine-readable JSON object on stderr; `verify` exits 2
//! when a cross-check suite fails.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ratioref::composition::{chain, mediate, product_mean};
use ratioref::geometry::{boundaries, classify, stability_radius, Cell};
use ratioref::meaning::{
    backbone_window, capacity_bound, is_symbol, low_cost_window, mean, mean_total,
    near_balance_window,
};
use ratioref::multidim::{log_solution_json, mean_md, mean_md_log};
use ratioref::oracle::DEFAULT_SEED;
use ratioref::verify::run_verification;
use ratioref::{Dictionary, Error, Penalty, Rat, Scalar, Scale, ScaleVec, Tol};

#[derive(Parser)]
#[command(
    name = "ratioref",
    about = "Ratio-induced reference calculus: mismatch penalties, meaning solvers, \
             decision boundaries, mediation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Numeric backend: exact rationals or f64.
    #[arg(long, global = true, value_enum, default_value_t = Backend::Rational)]
    backend: Backend,

    /// Penalty exponent a > 0 (1 = canonical; rational backend needs an integer).
    #[arg(long = "penalty-a", global = true, default_value_t = 1.0)]
    penalty_a: f64,

    /// Relative tie tolerance on the float backend.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,

    /// Seed for randomized checks; the RATIOREF_SEED env var overrides.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Backend {
    Rational,
    Float,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the mismatch penalty J at a positive ratio.
    Eval {
        #[arg(long)]
        x: String,
    },
    /// Sublevel interval [lo, hi] of {x : J(x) <= eps}.
    Sublevel {
        #[arg(long)]
        eps: String,
    },
    /// Meaning set of a configuration scale over a 1-D dictionary.
    Mean {
        #[arg(long)]
        s: String,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Minimize the total cost J(s) + J(o) + J(s/o) over the dictionary.
    MeanTotal {
        #[arg(long)]
        s: String,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Meaning of a multi-coordinate configuration (`--s` comma-separated).
    MeanMd {
        #[arg(long)]
        s: String,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Geometric-mean decision boundaries of a finite 1-D dictionary.
    Boundaries {
        #[arg(long)]
        dict: PathBuf,
    },
    /// Locate a scale among the decision boundaries.
    Classify {
        #[arg(long)]
        x: String,
        #[arg(long)]
        dict: PathBuf,
        /// Also emit the stability certificate.
        #[arg(long)]
        certificate: bool,
    },
    /// Emit (x, cell, margin, per-object costs) over a log-spaced grid.
    /// Always computes on the float backend.
    Sweep {
        #[arg(long)]
        dict: PathBuf,
        /// Lower end of the grid (default: min dictionary scale / 10).
        #[arg(long)]
        from: Option<f64>,
        /// Upper end of the grid (default: max dictionary scale * 10).
        #[arg(long)]
        to: Option<f64>,
        /// Grid resolution.
        #[arg(long, default_value_t = 512)]
        per_decade: usize,
        /// CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Scale windows: low-cost, near-balance, or backbone.
    Window {
        #[command(subcommand)]
        mode: WindowMode,
    },
    /// Count dictionary objects inside the backbone window.
    Capacity {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        delta: String,
    },
    /// Optimal two-hop mediation from --a to --c through a mediator dictionary.
    Mediate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Equal-log-increment chain from --a to --c in k hops.
    Chain {
        #[arg(long)]
        a: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        k: u32,
    },
    /// Componentwise meaning over a product of two dictionaries.
    Product {
        #[arg(long)]
        s1: String,
        #[arg(long)]
        s2: String,
        #[arg(long)]
        dict1: PathBuf,
        #[arg(long)]
        dict2: PathBuf,
    },
    /// Symbol predicate: is --s a symbol for the object --id?
    IsSymbol {
        #[arg(long)]
        s: String,
        #[arg(long)]
        id: String,
        #[arg(long)]
        dict: PathBuf,
    },
    /// Run the full oracle cross-validation battery.
    Verify,
}

#[derive(Subcommand)]
enum WindowMode {
    /// Object-scale window for meanings of a low-cost configuration.
    LowCost {
        #[arg(long)]
        s: String,
        #[arg(long)]
        eps: String,
    },
    /// Window [1/b^2, b^2] for meanings of eps-cheap configurations.
    NearBalance {
        #[arg(long)]
        eps: String,
    },
    /// Backbone window for the class (1 - delta, 1 + delta).
    Backbone {
        #[arg(long)]
        delta: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems (unknown subcommand/flag) exit 1; --help and
            // --version print normally and exit 0.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let seed = std::env::var("RATIOREF_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(cli.seed);

    let outcome = match cli.backend {
        Backend::Rational => execute::<Rat>(&cli, seed),
        Backend::Float => execute::<f64>(&cli, seed),
    };
    match outcome {
        Ok(Exit::Ok) => ExitCode::SUCCESS,
        Ok(Exit::VerifyFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(1)
        }
    }
}

enum Exit {
    Ok,
    VerifyFailed,
}

fn error_json(e: &Error) -> Value {
    let kind = match e {
        Error::NonPositive(_)
        | Error::InvalidExponent(_)
        | Error::NegativeLevel(_)
        | Error::DeltaOutOfRange(_)
        | Error::LevelBelowIntrinsicCost { .. }
        | Error::Negative(_)
        | Error::ZeroSteps
        | Error::NonCanonical => "domain",
        Error::ExactnessLost(_) | Error::FloatOnly(_) => "exactness",
        Error::Parse(_) => "parse",
        _ => "validation",
    };
    json!({ "error": { "kind": kind, "message": e.to_string() } })
}

fn load_dict<S: Scalar>(path: &Path) -> Result<Dictionary<S>, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Dictionary::from_json_str(&text)
}

fn parse_scale<S: Scalar>(text: &str) -> Result<Scale<S>, Error> {
    Scale::new(S::parse_str(text)?)
}

fn parse_scale_vec<S: Scalar>(text: &str) -> Result<ScaleVec<S>, Error> {
    let coords = text
        .split(',')
        .map(parse_scale::<S>)
        .collect::<Result<Vec<_>, _>>()?;
    ScaleVec::new(coords)
}

fn emit(v: Value) {
    println!("{v}");
}

fn execute<S: Scalar>(cli: &Cli, seed: u64) -> Result<Exit, Error> {
    let p = Penalty::new(cli.penalty_a)?;
    let tol = Tol(cli.tol);
    match &cli.command {
        Command::Eval { x } => {
            let x = S::parse_str(x)?;
            emit(json!({ "J": p.eval(&x)?.to_json() }));
        }
        Command::Sublevel { eps } => {
            let eps = S::parse_str(eps)?;
            let w = p.sublevel(&eps)?;
            emit(json!({
                "lo": w.lo().to_json(),
                "hi": w.hi().to_json(),
                "level": w.level().to_json(),
            }));
        }
        Command::Mean { s, dict } => {
            let s = parse_scale::<S>(s)?;
            let dict = load_dict::<S>(dict)?;
            emit(mean(&s, &dict, &p, tol)?.to_json());
        }
        Command::MeanTotal { s, dict } => {
            let s = parse_scale::<S>(s)?;
            let dict = load_dict::<S>(dict)?;
            emit(mean_total(&s, &dict, &p, tol)?.to_json());
        }
        Command::MeanMd { s, dict } => {
            let s = parse_scale_vec::<S>(s)?;
            let dict = load_dict::<S>(dict)?;
            match &dict {
                Dictionary::LogBox(_) | Dictionary::LogPolytope(_) => {
                    // Log-space carriers: report both coordinate systems.
                    if !S::EXACT {
                        let t: Vec<f64> = s.to_f64_vec().iter().map(|x| x.ln()).collect();
                        let fdict = Dictionary::<f64>::from_json(&dict.to_json())?;
                        let (u, cost) = mean_md_log(&t, &fdict, &p)?;
                        emit(log_solution_json(&u, cost));
                    } else {
                        return Err(Error::FloatOnly("log-space dictionaries"));
                    }
                }
                _ => emit(mean_md(&s, &dict, &p, tol)?.to_json()),
            }
        }
        Command::Boundaries { dict } => {
            let dict = load_dict::<S>(dict)?;
            emit(boundaries(&dict)?.to_json());
        }
        Command::Classify { x, dict, certificate } => {
            let x = parse_scale::<S>(x)?;
            let dict = load_dict::<S>(dict)?;
            let b = boundaries(&dict)?;
            let cell = classify(&x, &b, tol);
            let cells: Vec<usize> = cell.indices().iter().map(|k| k + 1).collect();
            let ids: Vec<&str> = cell.indices().iter().map(|&k| b.id(k)).collect();
            let mut out = json!({
                "x": x.value().to_json(),
                "cells": cells,
                "ids": ids,
                "tie": matches!(cell, Cell::Boundary(..)),
            });
            if *certificate {
                let cert = stability_radius(&x, &b, &p, tol)?;
                out["certificate"] = cert.to_json();
            }
            emit(out);
        }
        Command::Sweep {
            dict,
            from,
            to,
            per_decade,
            csv,
        } => {
            // Sweeps sample a log grid, so they always run on floats.
            let dict = load_dict::<f64>(dict)?;
            sweep(&dict, *from, *to, *per_decade, *csv, &p, tol)?;
        }
        Command::Window { mode } => {
            let w = match mode {
                WindowMode::LowCost { s, eps } => {
                    low_cost_window(&parse_scale::<S>(s)?, &S::parse_str(eps)?, &p)?
                }
                WindowMode::NearBalance { eps } => near_balance_window(&S::parse_str(eps)?, &p)?,
                WindowMode::Backbone { delta } => backbone_window(&S::parse_str(delta)?)?,
            };
            emit(w.to_json());
        }
        Command::Capacity { dict, delta } => {
            let dict = load_dict::<S>(dict)?;
            let delta = S::parse_str(delta)?;
            let count = capacity_bound(&dict, &delta)?;
            emit(json!({
                "capacity": count,
                "window": backbone_window(&delta)?.to_json(),
            }));
        }
        Command::Mediate { a, c, dict } => {
            let a = parse_scale::<S>(a)?;
            let c = parse_scale::<S>(c)?;
            let mediators = load_dict::<S>(dict)?;
            emit(mediate(&a, &c, &mediators, &p, tol)?.to_json());
        }
        Command::Chain { a, c, k } => {
            let a = parse_scale::<S>(a)?;
            let c = parse_scale::<S>(c)?;
            emit(chain(&a, &c, *k, &p)?.to_json());
        }
        Command::Product {
            s1,
            s2,
            dict1,
            dict2,
        } => {
            let s1 = parse_scale::<S>(s1)?;
            let s2 = parse_scale::<S>(s2)?;
            let d1 = load_dict::<S>(dict1)?;
            let d2 = load_dict::<S>(dict2)?;
            let (r1, r2) = product_mean(&s1, &s2, &d1, &d2, &p, tol)?;
            emit(json!({ "first": r1.to_json(), "second": r2.to_json() }));
        }
        Command::IsSymbol { s, id, dict } => {
            let s = parse_scale::<S>(s)?;
            let dict = load_dict::<S>(dict)?;
            emit(json!({ "symbol": is_symbol(&s, id, &dict, &p, tol)? }));
        }
        Command::Verify => {
            let report = run_verification(seed);
            for suite in &report.suites {
                let status = if suite.passed() { "ok  " } else { "FAIL" };
                println!(
                    "{status} {:<24} trials={:<7} failures={}",
                    suite.name, suite.trials, suite.failures
                );
                if let Some(detail) = &suite.first_failure {
                    println!("     first failure: {detail}");
                }
            }
            println!("{}", report.to_json());
            if !report.passed() {
                return Ok(Exit::VerifyFailed);
            }
        }
    }
    Ok(Exit::Ok)
}

fn sweep(
    dict: &Dictionary<f64>,
    from: Option<f64>,
    to: Option<f64>,
    per_decade: usize,
    csv: bool,
    p: &Penalty,
    tol: Tol,
) -> Result<(), Error> {
    let b = boundaries(dict)?;
    let scales: Vec<f64> = (0..b.len()).map(|k| *b.scale(k).value()).collect();
    let lo = from.unwrap_or_else(|| scales.first().unwrap() / 10.0);
    let hi = to.unwrap_or_else(|| scales.last().unwrap() * 10.0);
    if !(lo > 0.0 && hi > 0.0) {
        return Err(Error::NonPositive("sweep bounds"));
    }
    if lo > hi || per_decade == 0 {
        return Err(Error::BadInterval);
    }
    let decades = (hi / lo).log10();
    let points = ((decades * per_decade as f64).ceil() as usize).max(1) + 1;

    let mut rows = Vec::new();
    for j in 0..points {
        let x = (lo.ln() + (hi.ln() - lo.ln()) * j as f64 / (points - 1) as f64).exp();
        let xs = Scale::new(x)?;
        let cell = classify(&xs, &b, tol);
        let cell_label = cell
            .indices()
            .iter()
            .map(|k| (k + 1).to_string())
            .collect::<Vec<_>>()
            .join("|");
        let r = mean(&xs, dict, p, tol)?;
        let margin = r.margin.expect("finite dictionaries always carry a margin");
        let costs: Vec<f64> = (0..b.len())
            .map(|k| p.eval(&(x / b.scale(k).value())))
            .collect::<Result<_, _>>()?;
        rows.push((x, cell_label, margin, costs));
    }

    if csv {
        let mut header = String::from("x,cell,margin");
        for k in 0..b.len() {
            header.push_str(&format!(",cost_{}", b.id(k)));
        }
        println!("{header}");
        for (x, cell, margin, costs) in rows {
            let margin = match margin {
                ratioref::meaning::Margin::Gap(g) => format!("{g:.14e}"),
                ratioref::meaning::Margin::Infinite => "inf".to_string(),
            };
            let mut line = format!("{x:.14e},{cell},{margin}");
            for c in costs {
                line.push_str(&format!(",{c:.14e}"));
            }
            println!("{line}");
        }
    } else {
        let out: Vec<Value> = rows
            .into_iter()
            .map(|(x, cell, margin, costs)| {
                let cost_map: serde_json::Map<String, Value> = (0..b.len())
                    .map(|k| (format!("cost_{}", b.id(k)), costs[k].to_json()))
                    .collect();
                json!({
                    "x": x.to_json(),
                    "cell": cell,
                    "margin": margin.to_json(),
                    "costs": cost_map,
                })
            })
            .collect();
        emit(Value::Array(out));
    }
    Ok(())
}
