//! Spatially averaged coverage with i.i.d. uniformly placed interferers and
//! LOS decided by an equivalent LOS ball.
//!
//! Each interferer's gain `Ω = c R^{-α}` then has a piecewise power-law
//! density made of four bands (receiver main or side lobe, inside or outside
//! the ball). On a band `[ω₁, ω₂]` the density is
//! `w · 2π c^{2/α} ω^{-1-2/α} / (α |A|)`, and the expectation of a series
//! coefficient `G_t(Ω)` over it reduces to an incomplete form of
//! `₂F₁(m + t, m + 2/α; m + 2/α + 1; ·)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::antenna::{mainlobe_prob, AntennaPattern};
use crate::blockage::LosBall;
use crate::channel::{beta0, LinkModel, PowerRatios, ReferenceLink};
use crate::coverage::{combine, ergodic_spectral_efficiency, ErgodicOptions, ErgodicResult};
use crate::error::{Error, Result};
use crate::geometry::AnnulusRegion;
use crate::quad::{self, QuadOptions};
use crate::specfun::{hyp2f1_bplus1, ln_gamma_pos, Hyp2F1Args};

/// One power-law band of the `Ω` density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OmegaSegment {
    pub omega_lo: f64,
    pub omega_hi: f64,
    /// `(P_i/P_0)` times the receiver gain of this lobe.
    pub c: f64,
    pub alpha: f64,
    pub nakagami: u32,
    /// Probability of the receiver lobe.
    pub weight: f64,
    pub los: bool,
}

impl OmegaSegment {
    fn scale(&self, area: f64) -> f64 {
        self.weight * PI * self.c.powf(2.0 / self.alpha) / area
    }

    /// Probability mass carried by this band.
    pub fn mass(&self, area: f64) -> f64 {
        if self.omega_hi <= self.omega_lo {
            return 0.0;
        }
        let e = 2.0 / self.alpha;
        self.scale(area) * (self.omega_lo.powf(-e) - self.omega_hi.powf(-e))
    }

    fn mass_below(&self, omega: f64, area: f64) -> f64 {
        if omega <= self.omega_lo || self.omega_hi <= self.omega_lo {
            return 0.0;
        }
        let hi = omega.min(self.omega_hi);
        let e = 2.0 / self.alpha;
        self.scale(area) * (self.omega_lo.powf(-e) - hi.powf(-e))
    }

    fn pdf(&self, omega: f64, area: f64) -> f64 {
        if omega < self.omega_lo || omega > self.omega_hi || self.omega_hi <= self.omega_lo {
            return 0.0;
        }
        let e = 2.0 / self.alpha;
        self.scale(area) * e * omega.powf(-1.0 - e)
    }
}

/// Density of one interferer's `Ω` as a mixture of power-law bands.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaDensity {
    pub segments: Vec<OmegaSegment>,
    pub area: f64,
}

impl OmegaDensity {
    pub fn new(
        rx: &AntennaPattern,
        link: &LinkModel,
        power_ratio: f64,
        region: &AnnulusRegion,
        ball: &LosBall,
        sidelobe_only: bool,
    ) -> Result<Self> {
        let (r_in, r_out) = (region.r_in(), region.r_out());
        let rb = ball.radius;
        if !(rb >= r_in && rb <= r_out) {
            return Err(Error::invalid(
                "R_B",
                format!("LOS ball radius {rb} outside [{r_in}, {r_out}]"),
            ));
        }
        let main_w = if sidelobe_only {
            0.0
        } else {
            (rx.theta_az / std::f64::consts::TAU).min(1.0)
        };
        let mut segments = Vec::with_capacity(4);
        for (gain, weight) in [(rx.gain_main, main_w), (rx.gain_side, 1.0 - main_w)] {
            if weight <= 0.0 {
                continue;
            }
            let c = power_ratio * gain;
            let (al, an) = (link.alpha_los, link.alpha_nlos);
            segments.push(OmegaSegment {
                omega_lo: c * rb.powf(-al),
                omega_hi: c * r_in.powf(-al),
                c,
                alpha: al,
                nakagami: link.m_los,
                weight,
                los: true,
            });
            segments.push(OmegaSegment {
                omega_lo: c * r_out.powf(-an),
                omega_hi: c * rb.powf(-an),
                c,
                alpha: an,
                nakagami: link.m_nlos,
                weight,
                los: false,
            });
        }
        Ok(Self {
            segments,
            area: region.area(),
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.segments.iter().map(|s| s.mass(self.area)).sum()
    }

    pub fn pdf(&self, omega: f64) -> f64 {
        self.segments.iter().map(|s| s.pdf(omega, self.area)).sum()
    }

    pub fn cdf(&self, omega: f64) -> f64 {
        self.segments
            .iter()
            .map(|s| s.mass_below(omega, self.area))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }
}

/// Segment-level evaluator of `E[G_t(Ω)]`.
#[derive(Debug, Clone, Copy)]
struct LobeTerm {
    gain: f64,
    weight: f64,
}

fn lobe_terms(tx: &AntennaPattern) -> Vec<LobeTerm> {
    if tx.is_isotropic() {
        vec![LobeTerm {
            gain: tx.gain_main,
            weight: 1.0,
        }]
    } else {
        let p_m = mainlobe_prob(tx);
        vec![
            LobeTerm {
                gain: tx.gain_main,
                weight: p_m,
            },
            LobeTerm {
                gain: tx.gain_side,
                weight: 1.0 - p_m,
            },
        ]
    }
}

/// `J(Y) = ∫₀^{ln(1+Y)} (1 - e^{-s})^{b-1} e^{-s(a-b)} ds`, read off
/// `₂F₁(a, b; b+1; -Y) = b Y^{-b} J(Y)`.
fn j_via_hyp2f1(a: f64, b: f64, y: f64) -> Result<f64> {
    let f = hyp2f1_bplus1(Hyp2F1Args::new(a, b, -y)?)?;
    Ok(f * (b * y.ln()).exp() / b)
}

fn j_direct(a: f64, b: f64, lo: f64, hi: f64) -> Result<f64> {
    let integrand = |s: f64| (-(-s).exp_m1()).powf(b - 1.0) * (-s * (a - b)).exp();
    Ok(quad::integrate(integrand, lo, hi, &[], QuadOptions::relative(1e-13))?.value)
}

/// `J(Y₁) - J(Y₂)` for `Y₁ >= Y₂`, from two hypergeometric values when they
/// are well separated and by integrating the gap directly when the
/// difference would lose digits.
fn j_difference(a: f64, b: f64, y1: f64, y2: f64) -> Result<f64> {
    let (l1, l2) = (y1.ln_1p(), y2.ln_1p());
    if l1 <= l2 {
        return Ok(0.0);
    }
    let j1 = j_via_hyp2f1(a, b, y1)?;
    let j2 = j_via_hyp2f1(a, b, y2)?;
    if j1 > 0.0 && j2 < 0.5 * j1 {
        Ok(j1 - j2)
    } else {
        j_direct(a, b, l2, l1)
    }
}

/// `E[G_t(Ω)]` over one band for one transmit lobe, without `p_t` or the
/// lobe probability.
fn band_moment(t: u32, seg: &OmegaSegment, gain: f64, beta0: f64, area: f64) -> Result<f64> {
    if seg.omega_hi <= seg.omega_lo {
        return Ok(0.0);
    }
    let m = f64::from(seg.nakagami);
    let tf = f64::from(t);
    let e = 2.0 / seg.alpha;
    let a = m + tf;
    let b = m + e;
    let y1 = m / (gain * beta0 * seg.omega_lo);
    let y2 = m / (gain * beta0 * seg.omega_hi);
    let j = j_difference(a, b, y1, y2)?;
    // 2π Γ(m+t) c^{2/α} x^{2/α} β₀^{2/α-t} m^{-2/α} / (Γ(m) |A| t! α)
    let log_pref = (2.0 * PI / (area * seg.alpha)).ln()
        + ln_gamma_pos(a)
        - ln_gamma_pos(m)
        - ln_gamma_pos(tf + 1.0)
        + e * (seg.c * gain / m).ln()
        + (e - tf) * beta0.ln();
    Ok(seg.weight * log_pref.exp() * j)
}

/// `E_Ω[G_t(Ω)]` under the band density.
pub fn expected_g_ti(
    t: u32,
    density: &OmegaDensity,
    beta0: f64,
    tx: &AntennaPattern,
    p_t: f64,
) -> Result<f64> {
    if !(beta0 > 0.0) {
        return Err(Error::invalid("beta0", format!("must be positive, got {beta0}")));
    }
    let lobes = lobe_terms(tx);
    let mut active = 0.0;
    if p_t > 0.0 {
        for seg in &density.segments {
            for lobe in &lobes {
                active += lobe.weight * band_moment(t, seg, lobe.gain, beta0, density.area)?;
            }
        }
    }
    let silent = if t == 0 {
        (1.0 - p_t) * density.total_mass()
    } else {
        0.0
    };
    Ok(p_t * active + silent)
}

/// Truncated polynomial product.
fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for i in 0..n {
        for j in 0..n - i {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// `s^k` truncated to `s.len()` terms by repeated squaring.
pub fn poly_pow(s: &[f64], mut k: u32) -> Vec<f64> {
    let mut result = vec![0.0; s.len()];
    if let Some(r) = result.first_mut() {
        *r = 1.0;
    }
    let mut base = s.to_vec();
    while k > 0 {
        if k & 1 == 1 {
            result = poly_mul(&result, &base);
        }
        k >>= 1;
        if k > 0 {
            base = poly_mul(&base, &base);
        }
    }
    result
}

/// Spatially averaged coverage evaluator.
#[derive(Debug, Clone)]
pub struct SpatialCoverage {
    tx: AntennaPattern,
    p_t: f64,
    noise: f64,
    m0: u32,
    omega_0: f64,
    /// One density per distinct interferer class with its multiplicity.
    classes: Vec<(OmegaDensity, u32)>,
    ball: LosBall,
}

impl SpatialCoverage {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k: u32,
        link: &LinkModel,
        tx: &AntennaPattern,
        rx: &AntennaPattern,
        reference: &ReferenceLink,
        region: &AnnulusRegion,
        ball: &LosBall,
    ) -> Result<Self> {
        let classes = match &link.power_ratios {
            PowerRatios::Uniform(r) => {
                vec![(OmegaDensity::new(rx, link, *r, region, ball, reference.sidelobe_only)?, k)]
            }
            PowerRatios::PerInterferer(v) => {
                if v.len() != k as usize {
                    return Err(Error::invalid(
                        "power_ratios",
                        format!("{} ratios for {k} interferers", v.len()),
                    ));
                }
                v.iter()
                    .map(|&r| {
                        Ok((OmegaDensity::new(rx, link, r, region, ball, reference.sidelobe_only)?, 1))
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(Self {
            tx: *tx,
            p_t: link.p_t,
            noise: link.noise,
            m0: reference.nakagami,
            omega_0: reference.omega(rx),
            classes,
            ball: *ball,
        })
    }

    pub fn los_ball(&self) -> &LosBall {
        &self.ball
    }

    pub fn density(&self) -> &OmegaDensity {
        &self.classes[0].0
    }

    /// `E[G_t(Ω)]` for `t < m₀` of the first interferer class.
    pub fn expected_series(&self, beta: f64) -> Result<Vec<f64>> {
        let b0 = beta0(beta, self.m0, &self.tx, self.omega_0);
        self.series_for(&self.classes[0].0, b0)
    }

    fn series_for(&self, density: &OmegaDensity, b0: f64) -> Result<Vec<f64>> {
        (0..self.m0)
            .map(|t| expected_g_ti(t, density, b0, &self.tx, self.p_t))
            .collect()
    }

    pub fn coverage(&self, beta: f64) -> Result<f64> {
        if !(beta >= 0.0) || beta.is_infinite() {
            return Err(Error::invalid("beta", format!("threshold must be >= 0, got {beta}")));
        }
        if beta == 0.0 {
            return Ok(1.0);
        }
        let b0 = beta0(beta, self.m0, &self.tx, self.omega_0);
        let mut h = vec![0.0; self.m0 as usize];
        h[0] = 1.0;
        for (density, count) in &self.classes {
            if *count == 0 {
                continue;
            }
            let s = self.series_for(density, b0)?;
            h = poly_mul(&h, &poly_pow(&s, *count));
        }
        Ok(combine(&h, b0, self.noise))
    }

    pub fn coverage_curve(&self, betas: &[f64]) -> Result<Vec<f64>> {
        betas.iter().map(|&b| self.coverage(b)).collect()
    }

    pub fn rate_ccdf(&self, eta: f64) -> Result<f64> {
        if !(eta >= 0.0) {
            return Err(Error::invalid("eta", format!("rate must be >= 0, got {eta}")));
        }
        self.coverage(eta.exp2() - 1.0)
    }

    pub fn ergodic(&self, opts: &ErgodicOptions) -> Result<ErgodicResult> {
        ergodic_spectral_efficiency(|b| self.coverage(b), opts)
    }

    pub fn throughput(&self, opts: &ErgodicOptions) -> Result<f64> {
        Ok(throughput(self.p_t, self.ergodic(opts)?.value))
    }
}

/// `p_t · E[η]`.
pub fn throughput(p_t: f64, ergodic_se: f64) -> f64 {
    p_t * ergodic_se
}

/// Finds the LOS ball radius whose averaged ergodic spectral efficiency
/// equals `target`.
///
/// The efficiency is not monotone in the radius: once the ball shrinks below
/// 1 m, NLOS interferers inside it are received more strongly than LOS ones
/// when `α_N > α_L`. The radius grid is scanned from `r_out` inward and the
/// first bracket is refined by bisection, so the largest matching radius is
/// returned.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_los_ball(
    target: f64,
    k: u32,
    link: &LinkModel,
    tx: &AntennaPattern,
    rx: &AntennaPattern,
    reference: &ReferenceLink,
    region: &AnnulusRegion,
    opts: &ErgodicOptions,
) -> Result<LosBall> {
    const SCAN: usize = 48;
    let se = |radius: f64| -> Result<f64> {
        let ball = LosBall::with_radius(radius, region, k)?;
        Ok(SpatialCoverage::new(k, link, tx, rx, reference, region, &ball)?
            .ergodic(opts)?
            .value)
    };
    let radii = quad::linspace(region.r_out(), region.r_in(), SCAN + 1);
    let mut prev = (radii[0], se(radii[0])? - target);
    if prev.1 == 0.0 {
        return LosBall::with_radius(prev.0, region, k);
    }
    let (mut lo_seen, mut hi_seen) = (prev.1, prev.1);
    for &r in &radii[1..] {
        let cur = (r, se(r)? - target);
        lo_seen = lo_seen.min(cur.1);
        hi_seen = hi_seen.max(cur.1);
        if cur.1 == 0.0 {
            return LosBall::with_radius(r, region, k);
        }
        if cur.1.signum() != prev.1.signum() {
            // prev is the outer end of the bracket
            let (mut outer, mut inner) = (prev, cur);
            while outer.0 - inner.0 > 1e-7 {
                let mid = 0.5 * (outer.0 + inner.0);
                let f = se(mid)? - target;
                if f.signum() == outer.1.signum() {
                    outer = (mid, f);
                } else {
                    inner = (mid, f);
                }
            }
            return LosBall::with_radius(0.5 * (outer.0 + inner.0), region, k);
        }
        prev = cur;
    }
    Err(Error::invalid(
        "target",
        format!(
            "spectral efficiency {target} outside the scanned range [{}, {}]",
            target + lo_seen,
            target + hi_seen
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::upa_pattern;
    use crate::coverage::g_ti;

    fn setup(nr: u32, rb: f64) -> (OmegaDensity, AnnulusRegion) {
        let region = AnnulusRegion::new(0.3, 2.1).unwrap();
        let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.0).unwrap();
        let ball = LosBall::with_radius(rb, &region, 36).unwrap();
        let rx = upa_pattern(nr).unwrap();
        (OmegaDensity::new(&rx, &link, 1.0, &region, &ball, false).unwrap(), region)
    }

    #[test]
    fn mass_is_one() {
        for nr in [1, 4, 16] {
            let (d, _) = setup(nr, 1.1);
            assert!((d.total_mass() - 1.0).abs() < 1e-12);
            assert!((d.cdf(1e9) - 1.0).abs() < 1e-12);
            assert_eq!(d.cdf(0.0), 0.0);
        }
        let (d, region) = setup(1, 2.1);
        let nlos: f64 = d.segments.iter().filter(|s| !s.los).map(|s| s.mass(region.area())).sum();
        assert_eq!(nlos, 0.0);
    }

    #[test]
    fn pdf_integrates_to_mass() {
        let (d, region) = setup(4, 1.1);
        for s in &d.segments {
            let r = quad::integrate(|w| s.pdf(w, region.area()), s.omega_lo, s.omega_hi, &[], QuadOptions::relative(1e-12))
                .unwrap();
            assert!((r.value - s.mass(region.area())).abs() < 1e-10);
        }
    }

    #[test]
    fn silent_interferers() {
        let (d, _) = setup(4, 1.1);
        let tx = upa_pattern(4).unwrap();
        assert!((expected_g_ti(0, &d, 0.3, &tx, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(expected_g_ti(2, &d, 0.3, &tx, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_radial_quadrature() {
        let region = AnnulusRegion::new(0.3, 2.1).unwrap();
        let (d, _) = setup(16, 1.2);
        let tx = upa_pattern(4).unwrap();
        for &b0 in &[1e-4, 0.01, 0.3, 5.0, 300.0] {
            for t in 0..4 {
                let v = expected_g_ti(t, &d, b0, &tx, 0.8).unwrap();
                let mut oracle = 0.0;
                for s in &d.segments {
                    let r_lo = (s.c / s.omega_hi).powf(1.0 / s.alpha);
                    let r_hi = (s.c / s.omega_lo).powf(1.0 / s.alpha);
                    let f = |r: f64| {
                        let w = s.c * r.powf(-s.alpha);
                        g_ti(t, w, s.nakagami, b0, &tx, 0.8) * 2.0 * PI * r / region.area()
                    };
                    oracle += s.weight
                        * quad::integrate(f, r_lo, r_hi, &[], QuadOptions::relative(1e-13)).unwrap().value;
                }
                assert!((v - oracle).abs() <= 1e-9 * oracle.abs(), "t={t} b0={b0} {v} vs {oracle}");
            }
        }
    }

    #[test]
    fn power_by_squaring() {
        let s = [0.7, 0.2, 0.05, 0.01];
        let mut direct = vec![1.0, 0.0, 0.0, 0.0];
        for _ in 0..37 {
            direct = poly_mul(&direct, &s);
        }
        for (a, b) in poly_pow(&s, 37).iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(poly_pow(&s, 0), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn spatial_coverage_basics() {
        let region = AnnulusRegion::new(0.3, 2.1).unwrap();
        let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, 0.7).unwrap();
        let reference = ReferenceLink::los(0.3, 0.0, &link).unwrap();
        let ball = LosBall::with_radius(1.0, &region, 36).unwrap();
        let p4 = upa_pattern(4).unwrap();
        let cov = SpatialCoverage::new(36, &link, &p4, &p4, &reference, &region, &ball).unwrap();
        let mut prev = 1.0;
        for db in (-20..=40).step_by(5) {
            let v = cov.coverage(10f64.powf(f64::from(db) / 10.0)).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v <= prev + 1e-12);
            prev = v;
        }
        let none = SpatialCoverage::new(0, &link, &p4, &p4, &reference, &region, &ball).unwrap();
        let b0 = beta0(2.0, 4, &p4, reference.omega(&p4));
        let tail = crate::specfun::gamma_sf(4, b0 * 0.01).unwrap();
        assert!((none.coverage(2.0).unwrap() - tail).abs() < 1e-14);
    }
}
