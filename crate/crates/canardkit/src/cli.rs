//! Command-line front end: expansion, series evaluation, simulation,
//! parameter sweeps, explosion location, and the self-check suite.
//!
//! Exit codes: 0 success, 1 check failure, 2 solver error, 3 numeric or
//! I/O error, 64 usage error. Every error path writes one JSON object
//! with a stable "code" field to standard error. Rational values cross
//! the process boundary as exact strings, never floats.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::fcm::{
    cross_validate, darboux_check, fcm_expand, jet_finite_difference_check,
    VectorField, DEFAULT_MAX_PHI,
};
use crate::gspm::{
    expand_canard, expansion_from_json, CanardExpansion, Method, SolverError,
};
use crate::numerics::{
    integrate, locate_explosion, sweep, CycleOptions, NumericError, NumericSystem, TimeScale,
};
use crate::sysmodel::{
    critical_manifold, default_fold, fold_points, parse_system, select_fold, vdp, FoldPoint,
    ModelError, SPSystem,
};
use crate::algebra::Polynomial;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub struct CliFailure {
    pub code: &'static str,
    pub exit: i32,
    pub message: String,
}

impl CliFailure {
    fn usage(message: impl Into<String>) -> CliFailure {
        CliFailure {
            code: "usage",
            exit: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn io(err: std::io::Error, path: &Path) -> CliFailure {
        CliFailure {
            code: "io",
            exit: EXIT_NUMERIC,
            message: format!("{}: {}", path.display(), err),
        }
    }
}

impl From<SolverError> for CliFailure {
    fn from(e: SolverError) -> CliFailure {
        CliFailure {
            code: "solver",
            exit: EXIT_SOLVER,
            message: e.to_string(),
        }
    }
}

impl From<ModelError> for CliFailure {
    fn from(e: ModelError) -> CliFailure {
        CliFailure {
            code: "solver",
            exit: EXIT_SOLVER,
            message: e.to_string(),
        }
    }
}

impl From<NumericError> for CliFailure {
    fn from(e: NumericError) -> CliFailure {
        CliFailure {
            code: "numeric",
            exit: EXIT_NUMERIC,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "canardkit",
    about = "Slow-manifold expansions and canard-explosion location for planar fast/slow systems",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct SystemArgs {
    /// Builtin system name ("vdp") or path to a JSON definition file.
    #[arg(long, default_value = "vdp")]
    pub system: String,
    /// Fold selector: picks the fold nearest this x value (default: the
    /// fold with the largest x).
    #[arg(long, allow_negative_numbers = true)]
    pub fold: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the canard expansion and emit it as exact-rational JSON.
    Expand {
        #[command(flatten)]
        system: SystemArgs,
        /// gspm or fcm.
        #[arg(long, default_value = "gspm")]
        method: String,
        /// Expansion order N (yields F0..FN and mu0..mu_{N-1}).
        #[arg(long)]
        order: usize,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the bifurcation-parameter series at a numeric eps.
    Mu {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        eps: f64,
        /// Series degree K: evaluates mu0 + ... + muK*eps^K.
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "gspm")]
        method: String,
    },
    /// Integrate one trajectory and write it as CSV.
    Simulate {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 30.0)]
        tend: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        x0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y0: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit-cycle amplitude and period over a list of mu values.
    Sweep {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        eps: f64,
        /// Comma-separated mu values.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        mu: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect the amplitude classifier to locate the canard explosion.
    Explode {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        eps: f64,
        /// Relaxation-side bracket end.
        #[arg(long, default_value_t = 0.99, allow_negative_numbers = true)]
        lo: f64,
        /// Small-cycle/equilibrium-side bracket end.
        #[arg(long, default_value_t = 1.01, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long, default_value_t = 2.0)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-12)]
        resolution: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the cross-validation suite and report pass/fail per item.
    Check {
        #[command(flatten)]
        system: SystemArgs,
        /// Skip the numeric items (bisection agreement, jets).
        #[arg(long)]
        skip_numeric: bool,
        /// Compare a previously exported expansion JSON against a fresh
        /// computation.
        #[arg(long)]
        against: Option<PathBuf>,
        /// Seed for the randomized jet probes.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

fn load_system(args: &SystemArgs) -> Result<SPSystem, CliFailure> {
    if args.system == "vdp" {
        return Ok(vdp());
    }
    let path = Path::new(&args.system);
    let text = fs::read_to_string(path).map_err(|e| CliFailure::io(e, path))?;
    Ok(parse_system(&text)?)
}

fn resolve_fold(s: &SPSystem, selector: Option<f64>) -> Result<FoldPoint, CliFailure> {
    let manifold = critical_manifold(s)?;
    let folds = fold_points(&manifold)?;
    Ok(match selector {
        Some(near) => select_fold(&folds, near).clone(),
        None => default_fold(&folds).clone(),
    })
}

fn max_phi_from_env() -> u32 {
    std::env::var("CANARDKIT_MAX_PHI")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_PHI)
}

fn expand_with(
    s: &SPSystem,
    method: &str,
    order: usize,
    fold: &FoldPoint,
) -> Result<CanardExpansion, CliFailure> {
    match method {
        "gspm" => Ok(expand_canard(s, order, fold)?),
        "fcm" => Ok(fcm_expand(s, order, fold, max_phi_from_env())?),
        other => Err(CliFailure::usage(format!(
            "unknown method '{other}' (expected gspm or fcm)"
        ))),
    }
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CliFailure> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| CliFailure::io(e, path)),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

/// All floats in CSV output carry 17 significant digits.
fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

fn metadata_sidecar(
    out: &Option<PathBuf>,
    command: &str,
    fields: serde_json::Value,
) -> Result<(), CliFailure> {
    let Some(path) = out else { return Ok(()) };
    let meta_path = path.with_extension(format!(
        "{}meta.json",
        path.extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let mut value = fields;
    value["command"] = json!(command);
    value["version"] = json!(env!("CARGO_PKG_VERSION"));
    fs::write(&meta_path, serde_json::to_string_pretty(&value).unwrap())
        .map_err(|e| CliFailure::io(e, &meta_path))
}

pub fn run(cli: Cli) -> Result<i32, CliFailure> {
    match cli.command {
        Command::Expand {
            system,
            method,
            order,
            out,
        } => {
            if order < 1 {
                return Err(CliFailure::usage("--order must be at least 1"));
            }
            let s = load_system(&system)?;
            let fold = resolve_fold(&s, system.fold)?;
            let e = expand_with(&s, &method, order, &fold)?;
            let text = serde_json::to_string_pretty(&e.to_json()).unwrap();
            write_or_print(&out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Mu {
            system,
            eps,
            order,
            method,
        } => {
            if eps < 0.0 {
                return Err(CliFailure::usage("--eps must be nonnegative"));
            }
            let s = load_system(&system)?;
            let fold = resolve_fold(&s, system.fold)?;
            // Series degree K needs mu0..muK, i.e. expansion order K+1.
            let e = expand_with(&s, &method, order + 1, &fold)?;
            println!("{}", fmt_f64(e.mu_eval(eps)));
            Ok(EXIT_OK)
        }
        Command::Simulate {
            system,
            eps,
            mu,
            tend,
            x0,
            y0,
            tol,
            out,
        } => {
            if eps <= 0.0 {
                return Err(CliFailure::usage("--eps must be positive"));
            }
            if !(1e-13..=1e-6).contains(&tol) {
                return Err(CliFailure::usage("--tol must lie in [1e-13, 1e-6]"));
            }
            let s = load_system(&system)?;
            let sys = NumericSystem::compile(&s, mu, eps, TimeScale::Slow);
            let traj = integrate(&sys, (x0, y0), tend, tol)?;
            let mut csv = String::from("t,x,y\n");
            for row in &traj.samples {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(row[0]),
                    fmt_f64(row[1]),
                    fmt_f64(row[2])
                ));
            }
            write_or_print(&out, csv.trim_end())?;
            metadata_sidecar(
                &out,
                "simulate",
                json!({
                    "system": s.name,
                    "eps": eps,
                    "mu": mu,
                    "tend": tend,
                    "initial": [x0, y0],
                    "tol": tol,
                    "accepted_steps": traj.accepted,
                    "rejected_steps": traj.rejected,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            system,
            eps,
            mu,
            threshold,
            tol,
            out,
        } => {
            if eps <= 0.0 {
                return Err(CliFailure::usage("--eps must be positive"));
            }
            let s = load_system(&system)?;
            let opts = CycleOptions {
                tol,
                ..CycleOptions::default()
            };
            let rows = sweep(&s, eps, &mu, (0.5, 0.0), threshold, &opts);
            let mut csv = String::from("mu,amplitude_x,period,classification\n");
            for row in &rows {
                let (amp, period) = match &row.summary {
                    Ok(summary) => (fmt_f64(summary.amplitude_x), fmt_f64(summary.period)),
                    Err(_) => ("".into(), "".into()),
                };
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_f64(row.mu),
                    amp,
                    period,
                    row.classification
                ));
            }
            write_or_print(&out, csv.trim_end())?;
            metadata_sidecar(
                &out,
                "sweep",
                json!({
                    "system": s.name,
                    "eps": eps,
                    "mu": mu,
                    "threshold": threshold,
                    "tol": tol,
                    "initial": [0.5, 0.0],
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Explode {
            system,
            eps,
            lo,
            hi,
            threshold,
            resolution,
            tol,
            out,
        } => {
            if eps <= 0.0 {
                return Err(CliFailure::usage("--eps must be positive"));
            }
            let s = load_system(&system)?;
            let opts = CycleOptions {
                tol,
                ..CycleOptions::default()
            };
            let start = if 0.5 * (lo + hi) < 0.0 { (-0.5, 0.0) } else { (0.5, 0.0) };
            let r = locate_explosion(&s, eps, lo, hi, threshold, resolution, start, &opts)?;
            println!("{}", fmt_f64(r.mu_star));
            if out.is_some() {
                let csv = format!(
                    "mu_star,bracket_width,amplitude_below,amplitude_above\n{},{},{},{}",
                    fmt_f64(r.mu_star),
                    fmt_f64(r.bracket_width),
                    fmt_f64(r.amplitude_below),
                    fmt_f64(r.amplitude_above)
                );
                write_or_print(&out, &csv)?;
                metadata_sidecar(
                    &out,
                    "explode",
                    json!({
                        "system": s.name,
                        "eps": eps,
                        "bracket": [lo, hi],
                        "threshold": threshold,
                        "resolution": resolution,
                        "tol": tol,
                        "initial": [start.0, start.1],
                    }),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            system,
            skip_numeric,
            against,
            seed,
        } => run_check(&system, skip_numeric, against, seed),
    }
}

fn run_check(
    system: &SystemArgs,
    skip_numeric: bool,
    against: Option<PathBuf>,
    seed: u64,
) -> Result<i32, CliFailure> {
    let s = load_system(system)?;
    let fold = resolve_fold(&s, system.fold)?;
    let mut failures = 0usize;
    let mut item = |name: &str, outcome: Result<(), String>| {
        match outcome {
            Ok(()) => println!("PASS {name}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {name}: {why}");
            }
        }
    };

    let started = Instant::now();
    let gspm3 = expand_canard(&s, 3, &fold)?;

    item(
        "gspm-fcm-agreement",
        fcm_expand(&s, 3, &fold, max_phi_from_env())
            .map_err(|e| e.to_string())
            .and_then(|f| {
                let report = cross_validate(&gspm3, &f);
                if report.equal {
                    Ok(())
                } else {
                    Err(report
                        .first_divergence
                        .unwrap_or_else(|| "unequal".into()))
                }
            }),
    );

    item("invariance-order", {
        let mut result = Ok(());
        for n in 1..=3 {
            let e = expand_canard(&s, n, &fold)?;
            let r = crate::gspm::invariance_residual(&s, &e);
            if r.verified_order < Some(n) {
                result = Err(format!(
                    "order {n}: residual verified only to {:?}",
                    r.verified_order
                ));
                break;
            }
        }
        result
    });

    item("darboux-oracle", {
        let x = Polynomial::var(crate::algebra::Var::X);
        let y = Polynomial::var(crate::algebra::Var::Y);
        let field = VectorField {
            x_dot: x.clone(),
            y_dot: y.scale(&crate::algebra::rat_int(2)),
        };
        let parabola = &y - &x.pow(2);
        let report = darboux_check(&parabola, &field);
        let line = &y - &x;
        let line_report = darboux_check(&line, &field);
        if report.exact
            && report.cofactor == Some(Polynomial::from_int(2))
            && !line_report.exact
        {
            Ok(())
        } else {
            Err("classical Darboux example misbehaved".into())
        }
    });

    if let Some(path) = against {
        let text = fs::read_to_string(&path).map_err(|e| CliFailure::io(e, &path))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| CliFailure::usage(e.to_string()))?;
        item(
            "against-file",
            expansion_from_json(&value, fold.clone())
                .and_then(|loaded| {
                    let fresh = if loaded.method == Method::Fcm {
                        fcm_expand(&s, loaded.order(), &fold, max_phi_from_env())
                            .map_err(|e| e.to_string())?
                    } else {
                        expand_canard(&s, loaded.order(), &fold).map_err(|e| e.to_string())?
                    };
                    let report = cross_validate(&fresh, &loaded);
                    if report.equal {
                        Ok(())
                    } else {
                        Err(report
                            .first_divergence
                            .unwrap_or_else(|| "unequal".into()))
                    }
                }),
        );
    }

    if !skip_numeric {
        item("series-vs-bisection", {
            let eps = 0.01;
            let opts = CycleOptions::default();
            match locate_explosion(&s, eps, 0.99, 1.01, 2.0, 1e-9, (0.5, 0.0), &opts) {
                Ok(r) => {
                    let e4 = expand_canard(&s, 4, &fold)?;
                    let series = e4.mu_eval(eps);
                    if (r.mu_star - series).abs() <= 5e-4 {
                        Ok(())
                    } else {
                        Err(format!("mu_star {} vs series {}", r.mu_star, series))
                    }
                }
                Err(e) => Err(e.to_string()),
            }
        });

        item("jet-consistency", {
            match jet_finite_difference_check(&s, 20, seed) {
                Ok(worst) if worst <= 1e-5 => Ok(()),
                Ok(worst) => Err(format!("worst relative error {worst}")),
                Err(e) => Err(e.to_string()),
            }
        });
    }

    println!(
        "check finished in {:.1}s: {}",
        started.elapsed().as_secs_f64(),
        if failures == 0 { "all passed" } else { "FAILURES" }
    );
    Ok(if failures == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}
