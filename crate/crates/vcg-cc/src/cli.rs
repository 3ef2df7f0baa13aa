//! Command-line surface. Thin argument handling over the library; all
//! numerics live in the other modules.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3
//! quadrature failure, 4 uncertified search result, 5 k-ceiling abort.

use crate::cc::{cc_asymptotic, cc_exact, cc_sl_asymptotic, cc_sl_exact, CcQuery, Mechanism};
use crate::dist::{Example11Curve, PiecewiseCurve, RevenueCurve, TruncatedGpd};
use crate::error::{Error, Result};
use crate::oracle::{mc_rev_opt, mc_rev_vcg, McConfig};
use crate::orderstat::QuadratureConfig;
use crate::revenue::{rev_opt, rev_sl_vcg, rev_vcg};
use crate::verify::{all_pass, run_suite, Suite};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "vcg-cc", version, about = "Competition complexity of multi-unit VCG auctions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    run: RunConfig,
}

/// Options shared by every subcommand.
#[derive(Debug, Args)]
pub struct RunConfig {
    /// Worker threads (falls back to the CC_THREADS environment variable).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format; each subcommand has a natural default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    abs_tol: f64,
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Simulation seed (Monte Carlo options only).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

impl RunConfig {
    fn quadrature(&self) -> Result<QuadratureConfig> {
        QuadratureConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_depth: 60,
        }
        .validated()
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.output {
            Some(path) => {
                let mut f = std::fs::File::create(path)?;
                writeln!(f, "{text}")?;
            }
            None => println!("{text}"),
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Expected revenues of VCG, the optimal mechanism, and the
    /// supply-limiting variant for one market.
    Rev(RevArgs),
    /// Exact competition complexity by certified search.
    Cc(CcArgs),
    /// Competition complexity table for balanced MHR markets.
    Table(TableArgs),
    /// Closed-form asymptotic competition complexity.
    Asymptotic(AsymptoticArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct RevArgs {
    /// Regularity level of the truncated generalized Pareto family.
    #[arg(long, conflicts_with_all = ["curve", "example11"], requires = "r")]
    lambda: Option<f64>,
    /// Truncation point of the family.
    #[arg(long)]
    r: Option<f64>,
    /// Piecewise-linear revenue curve as CSV with header `q,R`.
    #[arg(long, conflicts_with = "example11")]
    curve: Option<PathBuf>,
    /// Use the hard regular instance with top value 3n-1.
    #[arg(long)]
    example11: bool,
    /// Units for sale (defaults to n).
    #[arg(long)]
    m: Option<u64>,
    /// Original buyers.
    #[arg(long)]
    n: u64,
    /// Added buyers for the VCG run.
    #[arg(long, default_value_t = 0)]
    k: u64,
    /// Supply cap: also report the supply-limiting VCG revenue at s units.
    #[arg(long)]
    s: Option<u64>,
    /// Also report Monte Carlo estimates at this many trials.
    #[arg(long)]
    mc_trials: Option<u64>,
}

#[derive(Debug, Args)]
struct CcArgs {
    #[arg(long)]
    lambda: f64,
    /// Units for sale (defaults to n).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    n: u64,
    /// Revenue target as a fraction of the optimal mechanism.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Search the supply-limiting mechanism instead of plain VCG.
    #[arg(long)]
    sl: bool,
    /// Truncation grid points.
    #[arg(long, default_value_t = 172)]
    grid: usize,
    /// Truncation cap when the legal range is unbounded.
    #[arg(long, default_value_t = 1e3)]
    rcap: f64,
    /// Abort threshold for the added-buyer search (default 4n).
    #[arg(long)]
    k_ceiling: Option<u64>,
}

#[derive(Debug, Args)]
struct TableArgs {
    /// Largest market size to tabulate.
    #[arg(long)]
    n_max: u64,
}

#[derive(Debug, Args)]
struct AsymptoticArgs {
    #[arg(long)]
    lambda: f64,
    /// Unit density m/n.
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    sl: bool,
    /// Sweep one parameter and emit a CSV curve.
    #[arg(long, value_enum)]
    sweep: Option<SweepAxis>,
    #[arg(long, requires = "sweep")]
    from: Option<f64>,
    #[arg(long, requires = "sweep")]
    to: Option<f64>,
    #[arg(long, requires = "sweep")]
    step: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepAxis {
    Lambda,
    Alpha,
    Gamma,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Fast)]
    suite: SuiteArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Fast,
    Full,
}

/// 17 significant digits: enough to round-trip any f64.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::CurveFormat(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::QuadratureNonConvergence { .. } | Error::SingularDenominator { .. } => 3,
        Error::Uncertified { .. } => 4,
        Error::KCeiling { .. } => 5,
    }
}

/// Parse arguments, dispatch, and return the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if let Some(threads) = cli.run.threads.or_else(|| {
        std::env::var("CC_THREADS")
            .ok()
            .and_then(|s| s.parse().ok())
    }) {
        // ignore failure: the global pool may already exist (tests, repeat calls)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let result = match &cli.cmd {
        Cmd::Rev(a) => cmd_rev(a, &cli.run),
        Cmd::Cc(a) => cmd_cc(a, &cli.run),
        Cmd::Table(a) => cmd_table(a, &cli.run),
        Cmd::Asymptotic(a) => cmd_asymptotic(a, &cli.run),
        Cmd::Verify(a) => cmd_verify(a, &cli.run),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load_curve(a: &RevArgs) -> Result<RevenueCurve> {
    if a.example11 {
        return Ok(RevenueCurve::Example11(Example11Curve::new(a.n)?));
    }
    if let Some(path) = &a.curve {
        let text = std::fs::read_to_string(path)?;
        return Ok(RevenueCurve::Piecewise(PiecewiseCurve::from_csv(&text)?));
    }
    match (a.lambda, a.r) {
        (Some(lambda), Some(r)) => Ok(RevenueCurve::Tgpd(TruncatedGpd::new(lambda, r)?)),
        _ => Err(Error::InvalidParameter(
            "specify a market: --lambda with --r, --curve, or --example11".into(),
        )),
    }
}

fn cmd_rev(a: &RevArgs, run: &RunConfig) -> Result<i32> {
    let curve = load_curve(a)?;
    let cfg = run.quadrature()?;
    let m = a.m.unwrap_or(a.n);
    let spec = crate::revenue::MarketSpec::new(m, a.n, a.k, a.s)?;
    let vcg = rev_vcg(&curve, spec.m, spec.n + spec.k, &cfg)?;
    let opt = rev_opt(&curve, spec.m, spec.n, &cfg)?;
    let sl = match spec.s {
        Some(s) => Some(rev_sl_vcg(&curve, s, spec.n + spec.k, &cfg)?),
        None => None,
    };
    let mc = a.mc_trials.map(|trials| {
        let mc_cfg = McConfig {
            trials,
            seed: run.seed,
            batch: 1 << 14,
        };
        let (v, o) = match &curve {
            RevenueCurve::Tgpd(d) => (
                mc_rev_vcg(d, spec.m, spec.n + spec.k, &mc_cfg),
                mc_rev_opt(d, spec.m, spec.n, &mc_cfg),
            ),
            RevenueCurve::Example11(d) => (
                mc_rev_vcg(d, spec.m, spec.n + spec.k, &mc_cfg),
                mc_rev_opt(d, spec.m, spec.n, &mc_cfg),
            ),
            RevenueCurve::Piecewise(_) => {
                return Err(Error::InvalidParameter(
                    "Monte Carlo estimates need a sampleable family, not a bare curve".into(),
                ))
            }
        };
        Ok((v, o))
    });
    let mc = match mc {
        Some(r) => Some(r?),
        None => None,
    };

    match run.format.unwrap_or(Format::Json) {
        Format::Json => {
            let mut obj = serde_json::json!({
                "m": spec.m, "n": spec.n, "k": spec.k,
                "rev_vcg": vcg,
                "rev_opt": opt,
            });
            if let Some(s) = sl {
                obj["s"] = serde_json::json!(spec.s.unwrap());
                obj["rev_sl_vcg"] = serde_json::json!(s);
            }
            if let Some((v, o)) = mc {
                obj["mc_rev_vcg"] = serde_json::json!({"mean": v.mean, "stderr": v.stderr, "trials": v.trials});
                obj["mc_rev_opt"] = serde_json::json!({"mean": o.mean, "stderr": o.stderr, "trials": o.trials});
            }
            run.emit(&serde_json::to_string_pretty(&obj)?)?;
        }
        Format::Csv => {
            let mut header = "m,n,k,rev_vcg,rev_opt".to_string();
            let mut row = format!("{},{},{},{},{}", spec.m, spec.n, spec.k, fmt(vcg), fmt(opt));
            if let Some(s) = sl {
                header.push_str(",s,rev_sl_vcg");
                row.push_str(&format!(",{},{}", spec.s.unwrap(), fmt(s)));
            }
            run.emit(&format!("{header}\n{row}"))?;
        }
    }
    Ok(0)
}

fn cmd_cc(a: &CcArgs, run: &RunConfig) -> Result<i32> {
    let m = a.m.unwrap_or(a.n);
    let mechanism = if a.sl { Mechanism::SlVcg } else { Mechanism::Vcg };
    let mut q = CcQuery::new(a.lambda, m, a.n, a.gamma, mechanism)?;
    q.grid_points = a.grid;
    q.r_cap = a.rcap;
    q.k_ceiling = a.k_ceiling;
    let res = if a.sl { cc_sl_exact(&q) } else { cc_exact(&q) }?;
    match run.format.unwrap_or(Format::Json) {
        Format::Json => run.emit(&serde_json::to_string_pretty(&res)?)?,
        Format::Csv => {
            let header = "k,worst_r,margin,certified";
            let row = format!("{},{},{},{}", res.k, fmt(res.worst_r), fmt(res.margin), res.certified);
            run.emit(&format!("{header}\n{row}"))?;
        }
    }
    if !res.certified {
        return Err(Error::Uncertified {
            min_margin: res.margin,
            at_r: res.worst_r,
        });
    }
    Ok(0)
}

fn cmd_table(a: &TableArgs, run: &RunConfig) -> Result<i32> {
    if a.n_max == 0 {
        return Err(Error::InvalidParameter("n-max must be >= 1".into()));
    }
    // compute everything before touching the output so a late failure
    // leaves no partial table behind
    let mut rows = Vec::with_capacity(a.n_max as usize);
    for n in 1..=a.n_max {
        let q = CcQuery::new(0.0, n, n, 1.0, Mechanism::Vcg)?;
        rows.push((n, cc_exact(&q)?.k));
    }
    match run.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut text = String::from("n,t_n");
            for (n, t) in rows {
                text.push_str(&format!("\n{n},{t}"));
            }
            run.emit(&text)?;
        }
        Format::Json => {
            let obj: Vec<_> = rows
                .iter()
                .map(|&(n, t)| serde_json::json!({"n": n, "t_n": t}))
                .collect();
            run.emit(&serde_json::to_string_pretty(&obj)?)?;
        }
    }
    Ok(0)
}

fn cmd_asymptotic(a: &AsymptoticArgs, run: &RunConfig) -> Result<i32> {
    let check = |lambda: f64, alpha: f64, gamma: f64| -> Result<f64> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!("lambda must lie in [0,1], got {lambda}")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0,1], got {alpha}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0,1) for the limit, got {gamma}"
            )));
        }
        Ok(if a.sl {
            cc_sl_asymptotic(lambda, alpha, gamma)
        } else {
            cc_asymptotic(lambda, alpha, gamma)
        })
    };

    match a.sweep {
        None => {
            let v = check(a.lambda, a.alpha, a.gamma)?;
            match run.format.unwrap_or(Format::Json) {
                Format::Json => run.emit(&serde_json::to_string_pretty(&serde_json::json!({
                    "lambda": a.lambda, "alpha": a.alpha, "gamma": a.gamma,
                    "sl": a.sl, "cc_infty": v,
                }))?)?,
                Format::Csv => run.emit(&format!("x,cc_infty\n{},{}", fmt(a.alpha), fmt(v)))?,
            }
        }
        Some(axis) => {
            let (from, to, step) = match (a.from, a.to, a.step) {
                (Some(f), Some(t), Some(s)) if s > 0.0 && t >= f => (f, t, s),
                _ => {
                    return Err(Error::InvalidParameter(
                        "sweep needs --from <= --to and --step > 0".into(),
                    ))
                }
            };
            let steps = ((to - from) / step).round() as usize;
            let mut rows = Vec::with_capacity(steps + 1);
            for i in 0..=steps {
                let x = (from + i as f64 * step).min(to);
                let v = match axis {
                    SweepAxis::Lambda => check(x, a.alpha, a.gamma)?,
                    SweepAxis::Alpha => check(a.lambda, x, a.gamma)?,
                    SweepAxis::Gamma => check(a.lambda, a.alpha, x)?,
                };
                rows.push((x, v));
            }
            match run.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut text = String::from("x,cc_infty");
                    for (x, v) in rows {
                        text.push_str(&format!("\n{},{}", fmt(x), fmt(v)));
                    }
                    run.emit(&text)?;
                }
                Format::Json => {
                    let obj: Vec<_> = rows
                        .iter()
                        .map(|&(x, v)| serde_json::json!({"x": x, "cc_infty": v}))
                        .collect();
                    run.emit(&serde_json::to_string_pretty(&obj)?)?;
                }
            }
        }
    }
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs, run: &RunConfig) -> Result<i32> {
    let suite = match a.suite {
        SuiteArg::Fast => Suite::Fast,
        SuiteArg::Full => Suite::Full,
    };
    let reports = run_suite(suite);
    match run.format.unwrap_or(Format::Json) {
        Format::Json => run.emit(&serde_json::to_string_pretty(&reports)?)?,
        Format::Csv => {
            let mut text = String::from("criterion,status");
            for r in &reports {
                text.push_str(&format!("\n{},{}", r.criterion, r.status));
            }
            run.emit(&text)?;
        }
    }
    Ok(if all_pass(&reports) { 0 } else { 1 })
}
