//! Exact SINR coverage conditioned on the gain vector `Ω`, rate coverage and
//! ergodic spectral efficiency.
//!
//! With an integer reference Nakagami factor `m₀` the coverage reduces to
//! `Σ_{t<m₀} β₀^t h_t · Γ̄(m₀ - t, β₀σ²)`, where `Γ̄` is the Erlang tail and
//! `h_t` is the degree-`t` coefficient of `Π_i Σ_k G_k(Ω_i) z^k`. The
//! product is formed by truncated series convolution.

use serde::Serialize;

use crate::antenna::{mainlobe_prob, AntennaPattern};
use crate::channel::{beta0, LinkModel, OmegaVector, ReferenceLink};
use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{gamma_ratio, gamma_sf};

/// One coefficient `G_t(Ω_i)` of an interferer's series.
pub fn g_ti(t: u32, omega: f64, m: u32, beta0: f64, tx: &AntennaPattern, p_t: f64) -> f64 {
    let mf = f64::from(m);
    let tf = f64::from(t);
    let p_m = mainlobe_prob(tx);
    let q = |x: f64| -> f64 {
        if x <= 0.0 {
            return if t == 0 { 1.0 } else { 0.0 };
        }
        // (xΩ/m)^t (1 + β₀xΩ/m)^{-(m+t)} in log space
        let y = x * omega / mf;
        (tf * y.ln() - (mf + tf) * (beta0 * y).ln_1p()).exp()
    };
    let lobes = if tx.is_isotropic() {
        q(tx.gain_main)
    } else {
        p_m * q(tx.gain_main) + (1.0 - p_m) * q(tx.gain_side)
    };
    let active = p_t * gamma_ratio(m, t) * lobes;
    if t == 0 {
        active + (1.0 - p_t)
    } else {
        active
    }
}

/// Fills `out[k] = G_k(Ω)` for `k < out.len()` by the ratio recursion
/// `G_k / G_{k-1} = (m + k - 1)/k · y/(1 + u)` on each lobe.
fn interferer_series(
    omega: f64,
    m: u32,
    beta0: f64,
    lobes: &[(f64, f64)],
    p_t: f64,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let mf = f64::from(m);
    for &(gain, weight) in lobes {
        let y = gain * omega / mf;
        let u = beta0 * y;
        let ratio = y / (1.0 + u);
        let mut term = weight * p_t * (1.0 + u).powi(-(m as i32));
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                term *= (mf + k as f64 - 1.0) / k as f64 * ratio;
            }
            *slot += term;
        }
    }
    if let Some(first) = out.first_mut() {
        *first += 1.0 - p_t;
    }
}

/// In-place truncated product `acc ← acc · s`.
fn mul_truncated(acc: &mut [f64], s: &[f64]) {
    for t in (0..acc.len()).rev() {
        let mut v = 0.0;
        for k in 0..=t {
            v += acc[t - k] * s[k];
        }
        acc[t] = v;
    }
}

/// Per-interferer coefficient series and the two ways of combining them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultinomialPlan {
    pub m0: u32,
    /// `series[i][k] = G_k(Ω_i)`, `k < m₀`.
    pub series: Vec<Vec<f64>>,
}

impl MultinomialPlan {
    /// `h_t` for `t < m₀` via series convolution.
    pub fn convolve(&self) -> Vec<f64> {
        let mut acc = vec![0.0; self.m0 as usize];
        acc[0] = 1.0;
        for s in &self.series {
            mul_truncated(&mut acc, s);
        }
        acc
    }

    /// `h_t` by explicit summation over every length-`K` sequence of
    /// non-negative integers with sum `t`. Exponential in `K`; for tests.
    pub fn enumerate(&self) -> Vec<f64> {
        let k = self.series.len();
        let mut h = vec![0.0; self.m0 as usize];
        for (t, slot) in h.iter_mut().enumerate() {
            let mut idx = vec![0usize; k];
            *slot = sum_compositions(&self.series, &mut idx, 0, t);
        }
        h
    }
}

fn sum_compositions(series: &[Vec<f64>], idx: &mut [usize], pos: usize, remaining: usize) -> f64 {
    if pos == series.len() {
        if remaining != 0 {
            return 0.0;
        }
        return idx.iter().zip(series).map(|(&t, s)| s[t]).product();
    }
    let mut total = 0.0;
    for t in 0..=remaining {
        idx[pos] = t;
        total += sum_compositions(series, idx, pos + 1, remaining - t);
    }
    idx[pos] = 0;
    total
}

/// Combines `h_t` with the Erlang tail of the noise term.
pub(crate) fn combine(h: &[f64], beta0: f64, noise: f64) -> f64 {
    let m0 = h.len() as u32;
    let x = beta0 * noise;
    let mut total = 0.0;
    let mut b_pow = 1.0;
    for (t, &ht) in h.iter().enumerate() {
        if ht != 0.0 {
            // gamma_sf only fails for k = 0 or x < 0, both excluded here.
            let tail = gamma_sf(m0 - t as u32, x).unwrap_or(0.0);
            total += b_pow * ht * tail;
        }
        b_pow *= beta0;
    }
    total.clamp(0.0, 1.0)
}

/// Coverage evaluator bound to a transmit antenna, link model and reference link.
#[derive(Debug, Clone)]
pub struct ConditionalCoverage {
    tx: AntennaPattern,
    lobes: Vec<(f64, f64)>,
    p_t: f64,
    noise: f64,
    m0: u32,
    reference: ReferenceLink,
}

impl ConditionalCoverage {
    pub fn new(link: &LinkModel, tx: &AntennaPattern, reference: &ReferenceLink) -> Result<Self> {
        if reference.nakagami == 0 {
            return Err(Error::Unsupported {
                name: "m0",
                reason: "reference Nakagami factor must be an integer >= 1".into(),
            });
        }
        let lobes = if tx.is_isotropic() {
            vec![(tx.gain_main, 1.0)]
        } else {
            let p_m = mainlobe_prob(tx);
            vec![(tx.gain_main, p_m), (tx.gain_side, 1.0 - p_m)]
        };
        Ok(Self {
            tx: *tx,
            lobes,
            p_t: link.p_t,
            noise: link.noise,
            m0: reference.nakagami,
            reference: *reference,
        })
    }

    pub fn m0(&self) -> u32 {
        self.m0
    }

    pub fn reference(&self) -> &ReferenceLink {
        &self.reference
    }

    pub fn beta0(&self, beta: f64, omega: &OmegaVector) -> f64 {
        beta0(beta, self.m0, &self.tx, omega.omega_0)
    }

    pub fn plan(&self, beta: f64, omega: &OmegaVector) -> MultinomialPlan {
        let b0 = self.beta0(beta, omega);
        let series = omega
            .omega
            .iter()
            .zip(&omega.nakagami)
            .map(|(&w, &m)| {
                let mut s = vec![0.0; self.m0 as usize];
                interferer_series(w, m, b0, &self.lobes, self.p_t, &mut s);
                s
            })
            .collect();
        MultinomialPlan { m0: self.m0, series }
    }

    /// `P_c(β, Ω)`.
    pub fn coverage(&self, beta: f64, omega: &OmegaVector) -> Result<f64> {
        if !(beta >= 0.0) || beta.is_infinite() {
            return Err(Error::invalid("beta", format!("threshold must be >= 0, got {beta}")));
        }
        let mut scratch = Scratch::new(self.m0);
        Ok(self.coverage_with(beta, omega, &mut scratch))
    }

    /// Allocation-free evaluation for hot loops.
    pub(crate) fn coverage_with(&self, beta: f64, omega: &OmegaVector, scratch: &mut Scratch) -> f64 {
        if beta == 0.0 {
            return 1.0;
        }
        let b0 = self.beta0(beta, omega);
        let Scratch { acc, term } = scratch;
        acc.iter_mut().for_each(|v| *v = 0.0);
        acc[0] = 1.0;
        for (&w, &m) in omega.omega.iter().zip(&omega.nakagami) {
            interferer_series(w, m, b0, &self.lobes, self.p_t, term);
            mul_truncated(acc, term);
        }
        combine(acc, b0, self.noise)
    }

    pub fn rate_ccdf(&self, eta: f64, omega: &OmegaVector) -> Result<f64> {
        if !(eta >= 0.0) {
            return Err(Error::invalid("eta", format!("rate must be >= 0, got {eta}")));
        }
        self.coverage(eta.exp2() - 1.0, omega)
    }

    pub fn coverage_curve(&self, betas: &[f64], omega: &OmegaVector) -> Result<CoverageCurve> {
        let values = betas
            .iter()
            .map(|&b| self.coverage(b, omega))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverageCurve::new(ThresholdKind::SinrLinear, betas.to_vec(), values))
    }

    pub fn rate_curve(&self, etas: &[f64], omega: &OmegaVector) -> Result<CoverageCurve> {
        let values = etas
            .iter()
            .map(|&e| self.rate_ccdf(e, omega))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoverageCurve::new(ThresholdKind::RateBits, etas.to_vec(), values))
    }

    pub fn ergodic(&self, omega: &OmegaVector, opts: &ErgodicOptions) -> Result<ErgodicResult> {
        let mut scratch = Scratch::new(self.m0);
        ergodic_spectral_efficiency(|b| Ok(self.coverage_with(b, omega, &mut scratch)), opts)
    }
}

/// Reusable buffers for [`ConditionalCoverage::coverage_with`].
#[derive(Debug, Clone)]
pub(crate) struct Scratch {
    acc: Vec<f64>,
    term: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(m0: u32) -> Self {
        Self {
            acc: vec![0.0; m0 as usize],
            term: vec![0.0; m0 as usize],
        }
    }
}

/// Convenience wrapper around [`ConditionalCoverage`].
pub fn coverage_conditional(
    beta: f64,
    omega: &OmegaVector,
    link: &LinkModel,
    tx: &AntennaPattern,
    reference: &ReferenceLink,
) -> Result<f64> {
    ConditionalCoverage::new(link, tx, reference)?.coverage(beta, omega)
}

/// `P[log₂(1 + SINR) > η] = P_c(2^η - 1)`.
pub fn rate_ccdf(
    eta: f64,
    omega: &OmegaVector,
    link: &LinkModel,
    tx: &AntennaPattern,
    reference: &ReferenceLink,
) -> Result<f64> {
    ConditionalCoverage::new(link, tx, reference)?.rate_ccdf(eta, omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdKind {
    SinrLinear,
    RateBits,
}

/// A CCDF sampled at increasing thresholds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    pub kind: ThresholdKind,
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl CoverageCurve {
    pub fn new(kind: ThresholdKind, thresholds: Vec<f64>, values: Vec<f64>) -> Self {
        Self {
            kind,
            thresholds,
            values,
        }
    }

    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    /// CSV with `beta_db,coverage` or `eta_bits,ccdf` columns.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = match self.kind {
            ThresholdKind::SinrLinear => ["beta_db", "coverage"],
            ThresholdKind::RateBits => ["eta_bits", "ccdf"],
        };
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(header).map_err(io)?;
        for (&x, &v) in self.thresholds.iter().zip(&self.values) {
            let x = match self.kind {
                ThresholdKind::SinrLinear => 10.0 * x.log10(),
                ThresholdKind::RateBits => x,
            };
            w.write_record([x.to_string(), v.to_string()]).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Integration range and grid control for the ergodic spectral efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicOptions {
    pub beta_min: f64,
    pub beta_max: f64,
    /// Initial number of log-spaced grid points.
    pub points: usize,
    /// Stop once doubling the grid changes the result by less than this.
    pub rel_tol: f64,
    /// Give up after the grid exceeds this many points.
    pub max_points: usize,
}

impl Default for ErgodicOptions {
    fn default() -> Self {
        Self {
            beta_min: 1e-4,
            beta_max: 1e6,
            points: 2000,
            rel_tol: 1e-3,
            max_points: 1 << 18,
        }
    }
}

impl ErgodicOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta_min >= 0.0 && self.beta_max > self.beta_min && self.beta_max.is_finite()) {
            return Err(Error::invalid(
                "beta_range",
                format!("need 0 <= beta_min < beta_max, got [{}, {}]", self.beta_min, self.beta_max),
            ));
        }
        if self.points < 2 {
            return Err(Error::invalid("points", "grid needs at least two points"));
        }
        Ok(())
    }

    /// The `β` grid at `n` log-spaced points. A zero lower limit becomes a
    /// leading 0 ahead of a grid starting twelve decades below `β_max`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        if self.beta_min > 0.0 {
            quad::logspace(self.beta_min, self.beta_max, n)
        } else {
            let lo = (self.beta_max * 1e-12).min(1e-6);
            let mut g = vec![0.0];
            g.extend(quad::logspace(lo, self.beta_max, n - 1));
            g
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicResult {
    /// Bits per channel use.
    pub value: f64,
    /// Grid size at which the doubling test passed.
    pub points: usize,
    /// Relative change seen at the last doubling.
    pub rel_change: f64,
}

/// Trapezoid of `P_c(β) / ((1 + β) ln 2)` on `grid`.
pub fn ergodic_on_grid(grid: &[f64], coverage: &[f64]) -> f64 {
    let ys: Vec<f64> = grid
        .iter()
        .zip(coverage)
        .map(|(&b, &p)| p / ((1.0 + b) * std::f64::consts::LN_2))
        .collect();
    quad::trapezoid(grid, &ys)
}

/// Ergodic spectral efficiency of an arbitrary coverage function, doubling
/// the grid until successive estimates agree to `rel_tol`.
pub fn ergodic_spectral_efficiency<F>(mut coverage: F, opts: &ErgodicOptions) -> Result<ErgodicResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    opts.validate()?;
    let mut eval = |n: usize| -> Result<f64> {
        let grid = opts.grid(n);
        let values = grid.iter().map(|&b| coverage(b)).collect::<Result<Vec<_>>>()?;
        Ok(ergodic_on_grid(&grid, &values))
    };
    let mut n = opts.points;
    let mut prev = eval(n)?;
    loop {
        let next_n = 2 * n - 1;
        if next_n > opts.max_points {
            return Err(Error::NonConvergence {
                routine: "ergodic_spectral_efficiency",
                detail: format!("no {} agreement by {} grid points (last {prev})", opts.rel_tol, n),
            });
        }
        let next = eval(next_n)?;
        let change = if next == 0.0 {
            (next - prev).abs()
        } else {
            ((next - prev) / next).abs()
        };
        if change < opts.rel_tol {
            return Ok(ErgodicResult {
                value: next,
                points: next_n,
                rel_change: change,
            });
        }
        prev = next;
        n = next_n;
    }
}
