//! Monte Carlo engine for the spatial average.
//!
//! Each trial places users according to an [`AssumptionLevel`], resolves
//! blockage, builds `Ω` and evaluates the exact conditional coverage. Fading
//! and antenna orientation are integrated analytically, so the only noise
//! left is from placement and blockage.
//!
//! Trial `i` draws from a ChaCha8 stream selected by `i` under the master
//! seed, and trials are grouped into fixed batches whose partial sums are
//! merged in batch order. Results therefore do not depend on thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::antenna::AntennaPattern;
use crate::blockage::{BlockProbProfile, LosBall};
use crate::channel::{omega_vector, LinkModel, ReferenceLink};
use crate::coverage::{ergodic_on_grid, ConditionalCoverage, ErgodicOptions, Scratch};
use crate::error::{Error, Result};
use crate::geometry::{
    blocked_set, grid_placement, orbital_positions, sample_bpp, AnnulusRegion, BlockingField,
    PlanarPoint, UserSet,
};

/// Trials per deterministic reduction batch.
const BATCH: usize = 128;
/// Coverage below this is treated as zero for the rest of an increasing grid.
const NEGLIGIBLE: f64 = 1e-12;

/// How users are placed and blocked in each trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AssumptionLevel {
    /// Bodies form a BPP; each transmitter sits on a circle of radius `d`
    /// around its own body, which can block it.
    Orbital { d: f64 },
    /// Transmitters and bodies are independent BPPs.
    IndependentProcesses,
    /// Transmitters form a BPP and are blocked independently with `p_b(R)`.
    IndependentBlocking { profile: BlockProbProfile },
    /// Transmitters form a BPP and are LOS exactly inside the ball.
    LosBall { ball: LosBall },
    /// Deterministic `n × n` lattice with co-located bodies and no self-blocking.
    FixedGrid { n: usize, spacing: f64 },
}

impl AssumptionLevel {
    pub fn name(&self) -> &'static str {
        match self {
            AssumptionLevel::Orbital { .. } => "A1",
            AssumptionLevel::IndependentProcesses => "A2",
            AssumptionLevel::IndependentBlocking { .. } => "A3",
            AssumptionLevel::LosBall { .. } => "A4",
            AssumptionLevel::FixedGrid { .. } => "fixed",
        }
    }
}

/// Quantity averaged over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Metric {
    /// Coverage at linear SINR thresholds.
    Coverage(Vec<f64>),
    /// Rate CCDF at spectral efficiencies in bits per use.
    Rate(Vec<f64>),
    /// Ergodic spectral efficiency on the grid of the options.
    Ergodic(ErgodicOptions),
}

impl Metric {
    fn betas(&self) -> Vec<f64> {
        match self {
            Metric::Coverage(b) => b.clone(),
            Metric::Rate(e) => e.iter().map(|e| e.exp2() - 1.0).collect(),
            // Odd-sized fine grid so the even points form the coarse grid.
            Metric::Ergodic(o) => o.grid(2 * o.points - 1),
        }
    }

    /// Grid values reported alongside the estimates.
    pub fn thresholds(&self) -> Vec<f64> {
        match self {
            Metric::Coverage(b) => b.clone(),
            Metric::Rate(e) => e.clone(),
            Metric::Ergodic(_) => vec![f64::NAN],
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Metric::Coverage(b) if b.is_empty() || b.iter().any(|&x| !(x >= 0.0)) => {
                Err(Error::invalid("beta_grid", "needs at least one non-negative threshold"))
            }
            Metric::Rate(e) if e.is_empty() || e.iter().any(|&x| !(x >= 0.0)) => {
                Err(Error::invalid("eta_grid", "needs at least one non-negative rate"))
            }
            Metric::Ergodic(o) => o.validate(),
            _ => Ok(()),
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_trials: usize,
    pub seed: u64,
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        self.mean += d * other.n / n;
        self.m2 += other.m2 + d * d * self.n * other.n / n;
        self.n = n;
    }

    fn estimate(&self, seed: u64) -> Estimate {
        let var = if self.n > 1.0 { self.m2 / (self.n - 1.0) } else { 0.0 };
        Estimate {
            mean: self.mean,
            std_error: (var / self.n).sqrt(),
            n_trials: self.n as usize,
            seed,
        }
    }
}

/// A Monte Carlo scenario: region, users, antennas, link and placement level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarlo {
    pub region: AnnulusRegion,
    /// Number of interferers (and of bodies).
    pub k: usize,
    pub blockage_diameter: f64,
    pub link: LinkModel,
    pub tx: AntennaPattern,
    pub rx: AntennaPattern,
    pub reference: ReferenceLink,
    pub level: AssumptionLevel,
}

/// Positions and LOS flags of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub transmitters: Vec<PlanarPoint>,
    pub los: Vec<bool>,
}

/// Per-grid-point estimates of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub thresholds: Vec<f64>,
    pub estimates: Vec<Estimate>,
    /// For the ergodic metric: relative change of the mean between the
    /// coarse grid and the doubled grid.
    pub grid_rel_change: Option<f64>,
    pub manifest: RunManifest,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub seed: u64,
    pub level: String,
    pub n_trials: usize,
    pub scenario_hash: String,
    pub version: String,
}

/// Hex SHA-256 of the JSON form of any serializable scenario.
pub fn scenario_hash<T: Serialize>(scenario: &T) -> String {
    let json = serde_json::to_vec(scenario).unwrap_or_default();
    hex::encode(Sha256::digest(&json))
}

impl MonteCarlo {
    pub fn validate(&self) -> Result<()> {
        if !(self.blockage_diameter > 0.0) {
            return Err(Error::invalid("W", "blockage diameter must be positive"));
        }
        if let AssumptionLevel::Orbital { d } = self.level {
            if !(d > 0.5 * self.blockage_diameter) {
                return Err(Error::invalid(
                    "orbital_d",
                    format!("must exceed W/2 = {}, got {d}", 0.5 * self.blockage_diameter),
                ));
            }
        }
        Ok(())
    }

    pub fn with_level(&self, level: AssumptionLevel) -> Self {
        Self {
            level,
            ..self.clone()
        }
    }

    fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        rng
    }

    /// Users and blockage state of trial `trial`.
    pub fn place(&self, seed: u64, trial: usize) -> Result<Placement> {
        let mut rng = Self::trial_rng(seed, trial);
        self.place_with(&mut rng)
    }

    fn place_with<R: Rng>(&self, rng: &mut R) -> Result<Placement> {
        let w = self.blockage_diameter;
        match &self.level {
            AssumptionLevel::Orbital { d } => {
                let bodies = sample_bpp(self.k, &self.region, rng);
                let tx = orbital_positions(&bodies, *d, w, rng)?;
                let users = UserSet::new(tx, bodies, w)?;
                let report = blocked_set(&users, true)?;
                Ok(Placement {
                    los: report.los_flags(),
                    transmitters: users.transmitters().to_vec(),
                })
            }
            AssumptionLevel::IndependentProcesses => {
                let tx = sample_bpp(self.k, &self.region, rng);
                let bodies = sample_bpp(self.k, &self.region, rng);
                let users = UserSet::new(tx, bodies, w)?;
                let report = blocked_set(&users, true)?;
                Ok(Placement {
                    los: report.los_flags(),
                    transmitters: users.transmitters().to_vec(),
                })
            }
            AssumptionLevel::IndependentBlocking { profile } => {
                let tx = sample_bpp(self.k, &self.region, rng);
                let los = tx
                    .iter()
                    .map(|p| Ok(rng.random::<f64>() >= profile.block_prob(p.radius())?))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Placement {
                    transmitters: tx,
                    los,
                })
            }
            AssumptionLevel::LosBall { ball } => {
                let tx = sample_bpp(self.k, &self.region, rng);
                let los = tx.iter().map(|p| ball.is_los(p.radius())).collect();
                Ok(Placement {
                    transmitters: tx,
                    los,
                })
            }
            AssumptionLevel::FixedGrid { n, spacing } => {
                let users = grid_placement(*n, *spacing, &self.region, w)?;
                let report = blocked_set(&users, false)?;
                Ok(Placement {
                    los: report.los_flags(),
                    transmitters: users.transmitters().to_vec(),
                })
            }
        }
    }

    /// Number of interferers actually placed (the lattice may hold fewer than `k`).
    pub fn interferer_count(&self) -> Result<usize> {
        match &self.level {
            AssumptionLevel::FixedGrid { n, spacing } => {
                Ok(grid_placement(*n, *spacing, &self.region, self.blockage_diameter)?.len())
            }
            _ => Ok(self.k),
        }
    }

    fn manifest(&self, seed: u64, n_trials: usize, metric: &Metric) -> RunManifest {
        RunManifest {
            seed,
            level: self.level.name().to_string(),
            n_trials,
            scenario_hash: scenario_hash(&(self, metric)),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// Coverage of one placement on an increasing grid, stopping once negligible.
fn trial_curve(
    mc: &MonteCarlo,
    cov: &ConditionalCoverage,
    betas: &[f64],
    monotone: bool,
    seed: u64,
    trial: usize,
    scratch: &mut Scratch,
    out: &mut [f64],
) -> Result<()> {
    let placement = mc.place(seed, trial)?;
    let omega = omega_vector(&placement.transmitters, &placement.los, &mc.reference, &mc.rx, &mc.link)?;
    let mut done = false;
    for (slot, &b) in out.iter_mut().zip(betas) {
        if done {
            *slot = 0.0;
            continue;
        }
        let v = cov.coverage_with(b, &omega, scratch);
        *slot = v;
        done = monotone && v < NEGLIGIBLE;
    }
    Ok(())
}

/// Runs `n_trials` placements and averages `metric` per grid point.
pub fn run_trials(mc: &MonteCarlo, metric: &Metric, n_trials: usize, seed: u64) -> Result<RunResult> {
    if n_trials == 0 {
        return Err(Error::invalid("trials", "need at least one trial"));
    }
    mc.validate()?;
    metric.validate()?;
    let cov = ConditionalCoverage::new(&mc.link, &mc.tx, &mc.reference)?;
    let betas = metric.betas();
    let monotone = betas.windows(2).all(|w| w[1] >= w[0]);
    let ergodic = matches!(metric, Metric::Ergodic(_));
    let coarse: Vec<f64> = betas.iter().step_by(2).copied().collect();
    let outputs = if ergodic { 2 } else { betas.len() };

    let n_batches = n_trials.div_ceil(BATCH);
    let batches: Vec<Result<Vec<Moments>>> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let mut acc = vec![Moments::default(); outputs];
            let mut scratch = Scratch::new(cov.m0());
            let mut curve = vec![0.0; betas.len()];
            let mut coarse_vals = vec![0.0; coarse.len()];
            for trial in bi * BATCH..((bi + 1) * BATCH).min(n_trials) {
                trial_curve(mc, &cov, &betas, monotone, seed, trial, &mut scratch, &mut curve)?;
                if ergodic {
                    for (c, v) in coarse_vals.iter_mut().zip(curve.iter().step_by(2)) {
                        *c = *v;
                    }
                    acc[0].push(ergodic_on_grid(&coarse, &coarse_vals));
                    acc[1].push(ergodic_on_grid(&betas, &curve));
                } else {
                    for (m, &v) in acc.iter_mut().zip(&curve) {
                        m.push(v);
                    }
                }
            }
            Ok(acc)
        })
        .collect();

    let mut total = vec![Moments::default(); outputs];
    for batch in batches {
        for (t, b) in total.iter_mut().zip(batch?) {
            t.merge(&b);
        }
    }
    let manifest = mc.manifest(seed, n_trials, metric);
    if ergodic {
        let (c, f) = (total[0].mean, total[1].mean);
        let change = if f != 0.0 { ((f - c) / f).abs() } else { (f - c).abs() };
        return Ok(RunResult {
            thresholds: metric.thresholds(),
            estimates: vec![total[1].estimate(seed)],
            grid_rel_change: Some(change),
            manifest,
        });
    }
    Ok(RunResult {
        thresholds: metric.thresholds(),
        estimates: total.iter().map(|m| m.estimate(seed)).collect(),
        grid_rel_change: None,
        manifest,
    })
}

/// Estimates of several levels on a common grid with their largest gaps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelComparison {
    pub thresholds: Vec<f64>,
    pub levels: Vec<String>,
    pub estimates: Vec<Vec<Estimate>>,
    /// `(i, j, max |mean_i - mean_j|, largest gap in combined standard errors)`.
    pub pairwise: Vec<(usize, usize, f64, f64)>,
}

pub fn compare_levels(
    mc: &MonteCarlo,
    levels: &[AssumptionLevel],
    metric: &Metric,
    n_trials: usize,
    seed: u64,
) -> Result<LevelComparison> {
    if levels.len() < 2 {
        return Err(Error::invalid("levels", "comparison needs at least two levels"));
    }
    let runs = levels
        .iter()
        .map(|l| run_trials(&mc.with_level(l.clone()), metric, n_trials, seed))
        .collect::<Result<Vec<_>>>()?;
    let mut pairwise = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let (mut gap, mut z) = (0.0f64, 0.0f64);
            for (a, b) in runs[i].estimates.iter().zip(&runs[j].estimates) {
                let d = (a.mean - b.mean).abs();
                gap = gap.max(d);
                let se = a.std_error.hypot(b.std_error);
                if se > 0.0 {
                    z = z.max(d / se);
                }
            }
            pairwise.push((i, j, gap, z));
        }
    }
    Ok(LevelComparison {
        thresholds: metric.thresholds(),
        levels: levels.iter().map(|l| l.name().to_string()).collect(),
        estimates: runs.into_iter().map(|r| r.estimates).collect(),
        pairwise,
    })
}

/// Blocking probability tabulated from independent-process placements: the
/// fraction of blocked transmitters per radial bin, at bin centres.
pub fn empirical_block_profile(
    region: &AnnulusRegion,
    blockage_diameter: f64,
    k: usize,
    bins: usize,
    n_trials: usize,
    seed: u64,
) -> Result<BlockProbProfile> {
    if bins == 0 || n_trials == 0 {
        return Err(Error::invalid("bins", "need at least one bin and one trial"));
    }
    let (r_in, r_out) = (region.r_in(), region.r_out());
    let width = (r_out - r_in) / bins as f64;
    let n_batches = n_trials.div_ceil(BATCH);
    let parts: Vec<Result<Vec<(u64, u64)>>> = (0..n_batches)
        .into_par_iter()
        .map(|bi| {
            let mut counts = vec![(0u64, 0u64); bins];
            for trial in bi * BATCH..((bi + 1) * BATCH).min(n_trials) {
                let mut rng = MonteCarlo::trial_rng(seed, trial);
                let tx = sample_bpp(k, region, &mut rng);
                let bodies = sample_bpp(k, region, &mut rng);
                let field = BlockingField::new(&bodies, blockage_diameter)?;
                for p in &tx {
                    let b = (((p.radius() - r_in) / width) as usize).min(bins - 1);
                    counts[b].1 += 1;
                    if field.is_blocked(*p, None) {
                        counts[b].0 += 1;
                    }
                }
            }
            Ok(counts)
        })
        .collect();
    let mut counts = vec![(0u64, 0u64); bins];
    for part in parts {
        for (c, p) in counts.iter_mut().zip(part?) {
            c.0 += p.0;
            c.1 += p.1;
        }
    }
    let table = counts
        .iter()
        .enumerate()
        .filter(|(_, c)| c.1 > 0)
        .map(|(i, c)| (r_in + (i as f64 + 0.5) * width, c.0 as f64 / c.1 as f64))
        .collect();
    BlockProbProfile::tabulated(*region, blockage_diameter, k as u32, table)
}
