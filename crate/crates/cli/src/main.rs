//! `cubic5` — exact counting, transversality sampling, and exponent calculus
//! for the jet surfaces of binary cubic forms.
//!
//! Every subcommand prints a versioned JSON document (`"schema": "v1"`) to
//! standard output. Exit codes: 0 success, 1 domain/validation error,
//! 2 resource-budget error.

mod config;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{Context, Result, anyhow};
use clap::{Args, Parser, Subcommand};

use cubic5::cubic::{CubicForm, TAYLOR_VARS, TaylorParts, taylor_decomposition};
use cubic5::experiment::{
    DEFAULT_SLOPE_TOLERANCE, ExperimentConfig, Schedule, run_experiment, write_plot_data,
};
use cubic5::exponents::{
    decoupling_exponent, diophantine_exponents, domain_check, interpolation_params,
    scale_loss_exponent, series_closed_forms,
};
use cubic5::lattice::{
    CountOptions, Variant, cross_check_variants, rep_table_s, rep_table_s_prime, solution_count,
    write_rept,
};
use cubic5::rat::parse_rational;
use cubic5::transversality::{ProjectionOrder, generic_dimension_check_mixed};

use config::ConfigMap;
use json::{big_json_number, rational_string};

#[derive(Parser)]
#[command(
    name = "cubic5",
    version,
    about = "Exact solution counting and transversality checks for cubic jet surfaces"
)]
struct Cli {
    /// Config file with `key = value` lines; command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Count integer solutions of the five-equation system, exactly.
    Count(CountArgs),
    /// Count over an N schedule, fit the growth exponent, and compare it
    /// against the expected one.
    Fit(FitArgs),
    /// Exact exponent calculus: interpolation exponents, series, decoupling
    /// exponent (--p) and solution-count exponents (--r).
    Exponents(ExponentArgs),
    /// Sample the transversality dimension inequalities at random subspaces
    /// and base points.
    Transversality(TransArgs),
    /// Check the graded decomposition of phi(t+dt, s+ds) - phi(t, s).
    Taylor(TaylorArgs),
    /// Count through both surface variants and compare.
    Crosscheck(CrossArgs),
}

#[derive(Args)]
struct CountArgs {
    /// Cubic form as "a,b,c,d".
    #[arg(long)]
    form: Option<String>,
    /// Fold count (half the number of points per side).
    #[arg(long)]
    r: Option<u32>,
    /// Grid range bound.
    #[arg(long = "N")]
    n: Option<u32>,
    /// Surface variant: "s" or "sprime".
    #[arg(long)]
    variant: Option<String>,
    /// Worker threads for the convolution.
    #[arg(long)]
    threads: Option<usize>,
    /// Memory cap in bytes for the pre-flight estimate.
    #[arg(long = "mem-cap")]
    mem_cap: Option<u64>,
    /// Write the full representation table (binary) to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    form: Option<String>,
    #[arg(long)]
    r: Option<u32>,
    /// Comma-separated strictly increasing N values (at least three).
    #[arg(long = "N-schedule")]
    n_schedule: Option<String>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "mem-cap")]
    mem_cap: Option<u64>,
    /// Verdict tolerance on |slope - e_max|.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write two-column plot data (N J) to this path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExponentArgs {
    /// Lebesgue index as an integer or "num/den".
    #[arg(long)]
    p: Option<String>,
    /// Fold count for the solution-count exponents.
    #[arg(long)]
    r: Option<u32>,
}

#[derive(Args)]
struct TransArgs {
    #[arg(long)]
    form: Option<String>,
    /// Projection order: 1 (first-order tangent space) or 2 (second-order).
    #[arg(long)]
    iota: Option<u8>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TaylorArgs {
    #[arg(long)]
    form: Option<String>,
}

#[derive(Args)]
struct CrossArgs {
    #[arg(long)]
    form: Option<String>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long = "N")]
    n: Option<u32>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long = "mem-cap")]
    mem_cap: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let ok = matches!(
                e.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let budget = err
                .downcast_ref::<cubic5::Error>()
                .map(cubic5::Error::is_budget)
                .unwrap_or(false);
            ExitCode::from(if budget { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = ConfigMap::load(cli.config.as_deref())?;
    let doc = match cli.cmd {
        Cmd::Count(args) => cmd_count(args, &cfg)?,
        Cmd::Fit(args) => cmd_fit(args, &cfg)?,
        Cmd::Exponents(args) => cmd_exponents(args, &cfg)?,
        Cmd::Transversality(args) => cmd_transversality(args, &cfg)?,
        Cmd::Taylor(args) => cmd_taylor(args, &cfg)?,
        Cmd::Crosscheck(args) => cmd_crosscheck(args, &cfg)?,
    };
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn parse_form(spec: &str) -> Result<CubicForm> {
    Ok(CubicForm::from_str(spec)?)
}

fn parse_variant(spec: &str) -> Result<Variant> {
    Ok(Variant::from_str(spec)?)
}

fn count_options(threads: Option<usize>, mem_cap: Option<u64>) -> CountOptions {
    let mut opts = CountOptions::default();
    opts.threads = threads;
    if let Some(cap) = mem_cap {
        opts.mem_cap_bytes = cap;
    }
    opts
}

fn cmd_count(args: CountArgs, cfg: &ConfigMap) -> Result<serde_json::Value> {
    let form = cfg.parse_req("form", args.form, parse_form)?;
    let r = cfg.typed_req("r", args.r)?;
    let n = cfg.typed_req("N", args.n)?;
    let variant = cfg
        .parse_opt("variant", args.variant, parse_variant)?
        .unwrap_or(Variant::S);
    let threads = cfg.typed_opt("threads", args.threads)?;
    let mem_cap = cfg.typed_opt("mem-cap", args.mem_cap)?;
    let out = cfg.typed_opt("out", args.out)?;
    let opts = count_options(threads, mem_cap);

    let start = Instant::now();
    let j = match &out {
        None => solution_count(&form, r, n, variant, &opts)?,
        Some(path) => {
            // build the table once: export it and count from it
            let j = match variant {
                Variant::S => {
                    let table = rep_table_s(&form, r, n, &opts)?;
                    let mut file = std::fs::File::create(path)
                        .with_context(|| format!("cannot create {}", path.display()))?;
                    write_rept(&table, &mut file)?;
                    table.sum_of_squares()
                }
                Variant::SPrime => {
                    let table = rep_table_s_prime(&form, r, n, &opts)?;
                    let mut file = std::fs::File::create(path)
                        .with_context(|| format!("cannot create {}", path.display()))?;
                    write_rept(&table, &mut file)?;
                    table.sum_of_squares()
                }
            };
            j
        }
    };
    let elapsed_ms = start.elapsed().as_millis();

    Ok(serde_json::json!({
        "schema": "v1",
        "form": form.to_string(),
        "r": r,
        "N": n,
        "variant": variant.to_string(),
        "degenerate": !form.is_nondegenerate(),
        "J": big_json_number(&j),
        "elapsed_ms": elapsed_ms as u64,
    }))
}

fn cmd_fit(args: FitArgs, cfg: &ConfigMap) -> Result<serde_json::Value> {
    let form = cfg.parse_req("form", args.form, parse_form)?;
    let r = cfg.typed_req("r", args.r)?;
    let schedule = cfg.parse_req("N-schedule", args.n_schedule, |s| config::parse_schedule(s))?;
    let variant = cfg
        .parse_opt("variant", args.variant, parse_variant)?
        .unwrap_or(Variant::S);
    let threads = cfg.typed_opt("threads", args.threads)?;
    let mem_cap = cfg.typed_opt("mem-cap", args.mem_cap)?;
    let tolerance = cfg
        .typed_opt("tolerance", args.tolerance)?
        .unwrap_or(DEFAULT_SLOPE_TOLERANCE);
    let out = cfg.typed_opt("out", args.out)?;

    let config = ExperimentConfig {
        form,
        r,
        schedule: Schedule::Explicit(schedule),
        variant,
        count: count_options(threads, mem_cap),
        tolerance,
    };
    let start = Instant::now();
    let report = run_experiment(&config)?;
    let elapsed_ms = start.elapsed().as_millis();

    if let Some(path) = out {
        let mut file = std::fs::File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        write_plot_data(&report, &mut file)?;
    }

    let points: Vec<serde_json::Value> = report
        .points
        .iter()
        .map(|p| {
            serde_json::json!({
                "N": p.n,
                "J": p.j.as_ref().map(big_json_number),
                "error": p.error,
                "elapsed_ms": p.elapsed_ms as u64,
            })
        })
        .collect();

    Ok(serde_json::json!({
        "schema": "v1",
        "form": report.form,
        "r": report.r,
        "variant": report.variant.to_string(),
        "schedule": report.schedule,
        "points": points,
        "slope": report.fit.as_ref().map(|f| f.slope),
        "intercept": report.fit.as_ref().map(|f| f.intercept),
        "max_abs_residual": report.fit.as_ref().map(|f| f.max_abs_residual),
        "e_low": report.exponents.e_low,
        "e_high": report.exponents.e_high,
        "e_max": report.exponents.e_max,
        "supercritical": report.exponents.supercritical,
        "tolerance": report.tolerance,
        "verdict": report.verdict.label(),
        "elapsed_ms": elapsed_ms as u64,
    }))
}

fn cmd_exponents(args: ExponentArgs, cfg: &ConfigMap) -> Result<serde_json::Value> {
    let p = cfg.parse_opt("p", args.p, |s| Ok(parse_rational(s)?))?;
    let r = cfg.typed_opt("r", args.r)?;
    if p.is_none() && r.is_none() {
        return Err(anyhow!("exponents needs --p and/or --r"));
    }

    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), "v1".into());
    if let Some(p) = p {
        let check = domain_check(&p);
        let params = interpolation_params(&p)?;
        let sums = series_closed_forms(&params)?;
        let loss = scale_loss_exponent(&params)?;
        let exponent = decoupling_exponent(&params)?;
        doc.insert("p".into(), rational_string(&p).into());
        doc.insert("alpha1".into(), rational_string(&params.alpha1).into());
        doc.insert("alpha2".into(), rational_string(&params.alpha2).into());
        doc.insert("beta2".into(), rational_string(&params.beta2).into());
        doc.insert("S_w".into(), rational_string(&sums.sum_bw).into());
        doc.insert("S_tau".into(), rational_string(&sums.sum_btau).into());
        doc.insert("lambda0".into(), rational_string(&loss).into());
        doc.insert("exponent".into(), rational_string(&exponent).into());
        doc.insert(
            "domain_check".into(),
            serde_json::json!({
                "p_exceeds_5": check.p_exceeds_5,
                "alpha1_in_range": check.alpha1_in_range,
                "alpha2_in_range": check.alpha2_in_range,
                "beta2_in_range": check.beta2_in_range,
                "denominator_nonzero": check.denominator_nonzero,
                "series_converge": check.series_converge,
                "admissible": check.admissible,
                "lower_endpoint": check.lower_endpoint,
            }),
        );
    }
    if let Some(r) = r {
        let e = diophantine_exponents(r);
        doc.insert("r".into(), r.into());
        doc.insert("e_low".into(), e.e_low.into());
        doc.insert("e_high".into(), e.e_high.into());
        doc.insert("e_max".into(), e.e_max.into());
        doc.insert("supercritical".into(), e.supercritical.into());
    }
    Ok(serde_json::Value::Object(doc))
}

fn cmd_transversality(args: TransArgs, cfg: &ConfigMap) -> Result<serde_json::Value> {
    let form = cfg.parse_req("form", args.form, parse_form)?;
    let iota = cfg.typed_req("iota", args.iota)?;
    let trials = cfg.typed_opt("trials", args.trials)?.unwrap_or(1000);
    let seed = cfg.typed_opt("seed", args.seed)?.unwrap_or(0);
    let order = ProjectionOrder::from_iota(iota)?;

    let report = generic_dimension_check_mixed(&form, order, trials, seed)?;
    let witnesses: Vec<serde_json::Value> = report
        .witnesses
        .iter()
        .map(|w| {
            serde_json::json!({
                "basis": w.basis.iter().map(|row| row.to_vec()).collect::<Vec<_>>(),
                "points": w.points.iter().map(|(t, s)| {
                    vec![rational_string(t), rational_string(s)]
                }).collect::<Vec<_>>(),
                "dimV": w.dim_v,
                "proj_dims": w.proj_dims,
            })
        })
        .collect();

    Ok(serde_json::json!({
        "schema": "v1",
        "form": form.to_string(),
        "iota": iota,
        "dimV": "mixed",
        "trials": report.trials,
        "violations": report.violations,
        "witnesses": witnesses,
        "seed": report.seed,
    }))
}

fn cmd_taylor(args: TaylorArgs, cfg: &ConfigMap) -> Result<serde_json::Value> {
    let form = cfg.parse_req("form", args.form, parse_form)?;
    let parts = taylor_decomposition(&form);
    let identity = parts.holds_for(&form);
    debug_assert_eq!(parts, TaylorParts::expected(&form));
    Ok(serde_json::json!({
        "schema": "v1",
        "form": form.to_string(),
        "identity": identity,
        "linear": parts.linear.render(&TAYLOR_VARS),
        "bilinear": parts.bilinear.render(&TAYLOR_VARS),
        "remainder": parts.remainder.render(&TAYLOR_VARS),
    }))
}

fn cmd_crosscheck(args: CrossArgs, cfg: &ConfigMap) -> Result<serde_json::Value> {
    let form = cfg.parse_req("form", args.form, parse_form)?;
    let r = cfg.typed_req("r", args.r)?;
    let n = cfg.typed_req("N", args.n)?;
    let threads = cfg.typed_opt("threads", args.threads)?;
    let mem_cap = cfg.typed_opt("mem-cap", args.mem_cap)?;
    let opts = count_options(threads, mem_cap);

    let start = Instant::now();
    let check = cross_check_variants(&form, r, n, &opts)?;
    let elapsed_ms = start.elapsed().as_millis();
    Ok(serde_json::json!({
        "schema": "v1",
        "form": form.to_string(),
        "r": r,
        "N": n,
        "degenerate": !form.is_nondegenerate(),
        "J_s": big_json_number(&check.j_s),
        "J_sprime": big_json_number(&check.j_s_prime),
        "equal": check.equal,
        "elapsed_ms": elapsed_ms as u64,
    }))
}
