//! Command-line front end: argument definitions and subcommand handlers.
//!
//! Each handler returns the primary output (CSV or a JSON record) together
//! with a run manifest; the binary writes the first to stdout or `--out` and
//! the manifest to stderr.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::blockage::block_prob;
use crate::channel::omega_vector;
use crate::coverage::{ConditionalCoverage, CoverageCurve, ErgodicOptions, ThresholdKind};
use crate::error::{Error, Result};
use crate::montecarlo::{run_trials, scenario_hash, Metric, MonteCarlo};
use crate::quad;
use crate::scenario::{LevelName, ScenarioConfig};
use crate::spatial::throughput;

#[derive(Debug, Parser)]
#[command(
    name = "mmwave-d2d",
    version,
    about = "Coverage, rate and spectral efficiency of finite mmWave D2D networks with body blockage"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Method {
    Analytic,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MetricName {
    Coverage,
    Rate,
    Ergodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SweepParam {
    #[value(name = "p_t")]
    PT,
    #[value(name = "W")]
    W,
    #[value(name = "K")]
    K,
    #[value(name = "lambda")]
    Lambda,
    #[value(name = "sigma2_db")]
    Sigma2Db,
    #[value(name = "nt")]
    Nt,
    #[value(name = "nr")]
    Nr,
}

impl SweepParam {
    fn name(&self) -> &'static str {
        match self {
            SweepParam::PT => "p_t",
            SweepParam::W => "W",
            SweepParam::K => "K",
            SweepParam::Lambda => "lambda",
            SweepParam::Sigma2Db => "sigma2_db",
            SweepParam::Nt => "nt",
            SweepParam::Nr => "nr",
        }
    }
}

/// Options shared by every subcommand; flags override the scenario file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Scenario file (TOML, or JSON with a `.json` extension).
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Write the primary output here instead of stdout.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Placement level: A1, A2, A3, A4 or fixed.
    #[arg(long)]
    pub level: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub nt: Option<u32>,
    #[arg(long)]
    pub nr: Option<u32>,
    #[arg(long = "p-t")]
    pub p_t: Option<f64>,
    /// Blockage diameter in metres.
    #[arg(long = "w")]
    pub w: Option<f64>,
    /// Number of interferers for random placements.
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long = "sigma2-db")]
    pub sigma2_db: Option<f64>,
    /// Orbital radius in metres.
    #[arg(long)]
    pub d: Option<f64>,
    /// Initial ergodic grid size.
    #[arg(long = "ergodic-points")]
    pub ergodic_points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// SINR coverage curve, `beta_db,coverage`.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Rate coverage curve, `eta_bits,ccdf`.
    Rate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Ergodic spectral efficiency and throughput as a JSON record.
    Ergodic {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Blocking probability against distance, `r_m,p_b`, plus the LOS ball.
    Blockprob {
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo estimates with standard errors.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "coverage")]
        metric: MetricName,
    },
    /// One-parameter sweep in long format, `swept_param,value,metric,result`.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        param: SweepParam,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, value_enum, default_value = "analytic")]
        method: Method,
    },
    /// Ergodic spectral efficiency over `N_t, N_r ∈ {1, 4, 16}`.
    Table {
        #[command(flatten)]
        common: Common,
        /// Fixed lattice, exact analysis.
        #[arg(long, conflicts_with = "random")]
        fixed: bool,
        /// Orbital-model Monte Carlo.
        #[arg(long)]
        random: bool,
    },
}

/// Primary output and manifest of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: String,
    pub manifest: Value,
    pub out: Option<PathBuf>,
}

fn load(common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = match &common.config {
        Some(p) => ScenarioConfig::from_path(p)?,
        None => ScenarioConfig::default(),
    };
    if let Some(l) = &common.level {
        cfg.analysis.level =
            LevelName::parse(l).ok_or_else(|| Error::config("--level", format!("unknown level `{l}`")))?;
    }
    if let Some(v) = common.trials {
        cfg.analysis.trials = v;
    }
    if let Some(v) = common.seed {
        cfg.analysis.seed = v;
    }
    if let Some(v) = common.nt {
        cfg.antennas.nt = v;
    }
    if let Some(v) = common.nr {
        cfg.antennas.nr = v;
    }
    if let Some(v) = common.p_t {
        cfg.link.p_t = v;
    }
    if let Some(v) = common.w {
        cfg.users.w_m = v;
    }
    if let Some(v) = common.k {
        cfg.users.k = v;
    }
    if let Some(v) = common.sigma2_db {
        cfg.link.sigma2_db = v;
    }
    if let Some(v) = common.d {
        cfg.users.orbital_d_m = v;
    }
    if let Some(v) = common.ergodic_points {
        cfg.analysis.ergodic_points = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn manifest(cfg: &ScenarioConfig, command: &str, extra: Value) -> Result<Value> {
    let mut m = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": cfg.analysis.seed,
        "level": cfg.analysis.level.as_str(),
        "k": cfg.effective_k()?,
        "lambda": cfg.lambda()?,
        "scenario_hash": scenario_hash(cfg),
        "config": cfg,
    });
    if let (Some(obj), Value::Object(more)) = (m.as_object_mut(), extra) {
        obj.extend(more);
    }
    Ok(m)
}

/// Which analytic model a level admits.
enum Analytic {
    Conditional(ConditionalCoverage, crate::channel::OmegaVector),
    Spatial(crate::spatial::SpatialCoverage),
}

impl Analytic {
    fn coverage(&self, beta: f64) -> Result<f64> {
        match self {
            Analytic::Conditional(c, om) => c.coverage(beta, om),
            Analytic::Spatial(s) => s.coverage(beta),
        }
    }

    fn ergodic(&self, opts: &ErgodicOptions) -> Result<crate::coverage::ErgodicResult> {
        match self {
            Analytic::Conditional(c, om) => c.ergodic(om, opts),
            Analytic::Spatial(s) => s.ergodic(opts),
        }
    }
}

fn analytic(cfg: &ScenarioConfig) -> Result<Analytic> {
    match cfg.analysis.level {
        LevelName::FixedGrid => {
            let mc = cfg.monte_carlo()?;
            let p = mc.place(cfg.analysis.seed, 0)?;
            let om = omega_vector(&p.transmitters, &p.los, &mc.reference, &mc.rx, &mc.link)?;
            Ok(Analytic::Conditional(
                ConditionalCoverage::new(&mc.link, &mc.tx, &mc.reference)?,
                om,
            ))
        }
        LevelName::LosBall => Ok(Analytic::Spatial(cfg.spatial()?)),
        other => Err(Error::invalid(
            "method",
            format!(
                "incompatible flags: analytic method needs level `fixed` or `A4`, got `{}`; use --method mc",
                other.as_str()
            ),
        )),
    }
}

fn estimates_csv(header: [&str; 3], xs: &[f64], run: &crate::montecarlo::RunResult) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for (x, e) in xs.iter().zip(&run.estimates) {
        w.write_record([x.to_string(), e.mean.to_string(), e.std_error.to_string()])
            .map_err(io)?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn mc_metric(cfg: &ScenarioConfig, metric: MetricName) -> Metric {
    match metric {
        MetricName::Coverage => Metric::Coverage(cfg.beta_grid()),
        MetricName::Rate => Metric::Rate(cfg.eta_grid()),
        MetricName::Ergodic => Metric::Ergodic(cfg.ergodic_options()),
    }
}

fn run_mc(cfg: &ScenarioConfig, metric: MetricName) -> Result<(String, Value)> {
    let mc = cfg.monte_carlo()?;
    let m = mc_metric(cfg, metric);
    let run = run_trials(&mc, &m, cfg.analysis.trials, cfg.analysis.seed)?;
    let body = match metric {
        MetricName::Coverage => {
            let db: Vec<f64> = cfg.beta_grid().iter().map(|b| 10.0 * b.log10()).collect();
            estimates_csv(["beta_db", "mean", "std_error"], &db, &run)?
        }
        MetricName::Rate => estimates_csv(["eta_bits", "mean", "std_error"], &cfg.eta_grid(), &run)?,
        MetricName::Ergodic => {
            let e = run.estimates[0];
            serde_json::to_string(&json!({
                "ergodic_se": e.mean,
                "std_error": e.std_error,
                "throughput": throughput(cfg.link.p_t, e.mean),
                "grid_rel_change": run.grid_rel_change,
            }))
            .map_err(|e| Error::Io(e.to_string()))?
                + "\n"
        }
    };
    let extra = json!({ "run": run.manifest, "n_trials": cfg.analysis.trials, "method": "mc" });
    Ok((body, extra))
}

fn cmd_curve(common: &Common, method: Method, kind: ThresholdKind) -> Result<Output> {
    let cfg = load(common)?;
    let (name, metric) = match kind {
        ThresholdKind::SinrLinear => ("coverage", MetricName::Coverage),
        ThresholdKind::RateBits => ("rate", MetricName::Rate),
    };
    let (body, extra) = match method {
        Method::Analytic => {
            let model = analytic(&cfg)?;
            let xs = match kind {
                ThresholdKind::SinrLinear => cfg.beta_grid(),
                ThresholdKind::RateBits => cfg.eta_grid(),
            };
            let values = xs
                .iter()
                .map(|&x| match kind {
                    ThresholdKind::SinrLinear => model.coverage(x),
                    ThresholdKind::RateBits => model.coverage(x.exp2() - 1.0),
                })
                .collect::<Result<Vec<_>>>()?;
            let body = CoverageCurve::new(kind, xs, values).to_csv()?;
            (body, json!({ "method": "analytic" }))
        }
        Method::Mc => run_mc(&cfg, metric)?,
    };
    Ok(Output {
        body,
        manifest: manifest(&cfg, name, extra)?,
        out: common.out.clone(),
    })
}

fn ergodic_value(cfg: &ScenarioConfig, method: Method) -> Result<(f64, Value)> {
    match method {
        Method::Analytic => {
            let r = analytic(cfg)?.ergodic(&cfg.ergodic_options())?;
            Ok((r.value, json!({ "points": r.points, "rel_change": r.rel_change })))
        }
        Method::Mc => {
            let run = run_trials(
                &cfg.monte_carlo()?,
                &Metric::Ergodic(cfg.ergodic_options()),
                cfg.analysis.trials,
                cfg.analysis.seed,
            )?;
            let e = run.estimates[0];
            Ok((
                e.mean,
                json!({ "std_error": e.std_error, "grid_rel_change": run.grid_rel_change }),
            ))
        }
    }
}

fn cmd_ergodic(common: &Common, method: Method) -> Result<Output> {
    let cfg = load(common)?;
    let (value, detail) = ergodic_value(&cfg, method)?;
    let mut record = json!({
        "ergodic_se": value,
        "throughput": throughput(cfg.link.p_t, value),
    });
    if let (Some(r), Value::Object(d)) = (record.as_object_mut(), detail) {
        r.extend(d);
    }
    let body = serde_json::to_string(&record).map_err(|e| Error::Io(e.to_string()))? + "\n";
    Ok(Output {
        body,
        manifest: manifest(&cfg, "ergodic", json!({ "method": method }))?,
        out: common.out.clone(),
    })
}

fn cmd_blockprob(common: &Common) -> Result<Output> {
    let cfg = load(common)?;
    let profile = cfg.block_profile()?;
    let region = cfg.region()?;
    let rs = quad::linspace(region.r_in(), region.r_out(), cfg.analysis.blockprob_points);
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["r_m", "p_b"]).map_err(io)?;
    for &r in &rs {
        w.write_record([r.to_string(), block_prob(r, &profile)?.to_string()])
            .map_err(io)?;
    }
    let ball = cfg.los_ball()?;
    Ok(Output {
        body: into_string(w)?,
        // Blocking statistics always describe K random bodies, whatever the level.
        manifest: manifest(
            &cfg,
            "blockprob",
            json!({
                "R_B": ball.radius,
                "rho": ball.expected_los,
                "k": cfg.users.k,
                "lambda": f64::from(cfg.users.k) / region.area(),
            }),
        )?,
        out: common.out.clone(),
    })
}

fn cmd_montecarlo(common: &Common, metric: MetricName) -> Result<Output> {
    let cfg = load(common)?;
    let (body, extra) = run_mc(&cfg, metric)?;
    Ok(Output {
        body,
        manifest: manifest(&cfg, "montecarlo", extra)?,
        out: common.out.clone(),
    })
}

fn apply_sweep(cfg: &mut ScenarioConfig, param: SweepParam, value: f64) -> Result<f64> {
    let area = cfg.region()?.area();
    let as_count = |v: f64, key: &str| -> Result<u32> {
        if v < 0.0 || !v.is_finite() {
            return Err(Error::config(key.to_string(), format!("sweep value {v} must be >= 0")));
        }
        Ok(v.round() as u32)
    };
    let reported = match param {
        SweepParam::PT => {
            cfg.link.p_t = value;
            value
        }
        SweepParam::W => {
            cfg.users.w_m = value;
            value
        }
        SweepParam::K => {
            cfg.users.k = as_count(value, "users.k")?;
            f64::from(cfg.users.k)
        }
        SweepParam::Lambda => {
            cfg.users.k = as_count(value * area, "users.k")?;
            value
        }
        SweepParam::Sigma2Db => {
            cfg.link.sigma2_db = value;
            value
        }
        SweepParam::Nt => {
            cfg.antennas.nt = as_count(value, "antennas.nt")?;
            f64::from(cfg.antennas.nt)
        }
        SweepParam::Nr => {
            cfg.antennas.nr = as_count(value, "antennas.nr")?;
            f64::from(cfg.antennas.nr)
        }
    };
    cfg.validate()?;
    Ok(reported)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: &Common,
    param: SweepParam,
    from: f64,
    to: f64,
    steps: usize,
    method: Method,
) -> Result<Output> {
    let base = load(common)?;
    if steps == 0 {
        return Err(Error::invalid("steps", "sweep needs at least one step"));
    }
    if matches!(param, SweepParam::K | SweepParam::Lambda) && base.analysis.level == LevelName::FixedGrid {
        return Err(Error::invalid(
            "param",
            "the lattice fixes K; sweep K or lambda with a random level",
        ));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["swept_param", "value", "metric", "result"]).map_err(io)?;
    for x in quad::linspace(from, to, steps) {
        let mut cfg = base.clone();
        let v = apply_sweep(&mut cfg, param, x)?;
        let (se, _) = ergodic_value(&cfg, method)?;
        let rows = [
            ("ergodic_se", se),
            ("throughput", throughput(cfg.link.p_t, se)),
            ("k", cfg.effective_k()? as f64),
            ("lambda", cfg.lambda()?),
        ];
        for (metric, result) in rows {
            w.write_record([param.name(), &v.to_string(), metric, &result.to_string()])
                .map_err(io)?;
        }
    }
    Ok(Output {
        body: into_string(w)?,
        manifest: manifest(
            &base,
            "sweep",
            json!({ "param": param.name(), "from": from, "to": to, "steps": steps, "method": method }),
        )?,
        out: common.out.clone(),
    })
}

/// Antenna sizes of the 3×3 table.
pub const TABLE_SIZES: [u32; 3] = [1, 4, 16];

/// Ergodic spectral efficiency (and standard error) for every `(N_t, N_r)`.
pub fn ergodic_table(cfg: &ScenarioConfig, method: Method) -> Result<[[(f64, f64); 3]; 3]> {
    let mut out = [[(0.0, 0.0); 3]; 3];
    for (i, &nt) in TABLE_SIZES.iter().enumerate() {
        for (j, &nr) in TABLE_SIZES.iter().enumerate() {
            let mut c = cfg.clone();
            c.antennas.nt = nt;
            c.antennas.nr = nr;
            let (v, detail) = ergodic_value(&c, method)?;
            let se = detail.get("std_error").and_then(Value::as_f64).unwrap_or(0.0);
            out[i][j] = (v, se);
        }
    }
    Ok(out)
}

/// Default grid size for Monte Carlo tables; the doubling check is reported.
const TABLE_MC_POINTS: usize = 500;
const TABLE_MC_TRIALS: usize = 20_000;

fn cmd_table(common: &Common, fixed: bool, random: bool) -> Result<Output> {
    if fixed == random {
        return Err(Error::invalid("table", "choose exactly one of --fixed or --random"));
    }
    let mut cfg = load(common)?;
    let method = if fixed {
        cfg.analysis.level = LevelName::FixedGrid;
        Method::Analytic
    } else {
        if common.level.is_none() {
            cfg.analysis.level = LevelName::Orbital;
        }
        if common.trials.is_none() {
            cfg.analysis.trials = TABLE_MC_TRIALS;
        }
        if common.ergodic_points.is_none() {
            cfg.analysis.ergodic_points = TABLE_MC_POINTS;
        }
        Method::Mc
    };
    let table = ergodic_table(&cfg, method)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["nt", "nr_1", "nr_4", "nr_16"]).map_err(io)?;
    for (i, row) in table.iter().enumerate() {
        let mut rec = vec![TABLE_SIZES[i].to_string()];
        rec.extend(row.iter().map(|(v, _)| format!("{v:.4}")));
        w.write_record(&rec).map_err(io)?;
    }
    let std_errors: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|c| c.1).collect()).collect();
    Ok(Output {
        body: into_string(w)?,
        manifest: manifest(
            &cfg,
            "table",
            json!({ "mode": if fixed { "fixed" } else { "random" }, "std_errors": std_errors,
                    "n_trials": if fixed { 1 } else { cfg.analysis.trials } }),
        )?,
        out: common.out.clone(),
    })
}

/// Dispatches a parsed command line.
pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Coverage { common, method } => cmd_curve(common, *method, ThresholdKind::SinrLinear),
        Command::Rate { common, method } => cmd_curve(common, *method, ThresholdKind::RateBits),
        Command::Ergodic { common, method } => cmd_ergodic(common, *method),
        Command::Blockprob { common } => cmd_blockprob(common),
        Command::Montecarlo { common, metric } => cmd_montecarlo(common, *metric),
        Command::Sweep {
            common,
            param,
            from,
            to,
            steps,
            method,
        } => cmd_sweep(common, *param, *from, *to, *steps, *method),
        Command::Table {
            common,
            fixed,
            random,
        } => cmd_table(common, *fixed, *random),
    }
}

/// Machine-readable failure record.
pub fn error_record(e: &Error) -> Value {
    let mut rec = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
    if let Error::Config { path, .. } = e {
        rec["error"]["path"] = json!(path);
    }
    rec
}

/// Monte Carlo scenario for a given configuration, exposed for examples.
pub fn monte_carlo_for(cfg: &ScenarioConfig) -> Result<MonteCarlo> {
    cfg.monte_carlo()
}
