//! Distance-dependent blocking probability under independently and
//! uniformly placed blockages, and the equivalent LOS ball.
//!
//! A blockage of diameter `W` at `B` blocks a transmitter at distance `r`
//! when `B` lies in the stadium-shaped region swept by the segment from the
//! receiver to the transmitter (a `r × W` strip plus a half-disk cap behind
//! the transmitter), intersected with the annulus. The area of that region
//! over `|A|` is the pairwise probability, and independence over the `K`
//! blockages gives `p_b(r) = 1 - (1 - area/|A|)^K`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::AnnulusRegion;
use crate::quad::{self, QuadOptions};

const DOMAIN_SLACK: f64 = 1e-12;

fn clamp_unit(x: f64, what: &str) -> f64 {
    if x.abs() > 1.0 && x.abs() <= 1.0 + DOMAIN_SLACK {
        x.signum()
    } else {
        debug_assert!(x.abs() <= 1.0, "{what} argument {x} outside [-1, 1]");
        x
    }
}

fn check_geometry(region: &AnnulusRegion, w: f64) -> Result<()> {
    if !(w >= 0.0 && w.is_finite()) {
        return Err(Error::invalid("W", format!("blockage diameter must be >= 0, got {w}")));
    }
    // At W = 2·r_in the inner-disk term is still defined (arcsin 1).
    if w > 2.0 * region.r_in() {
        return Err(Error::invalid(
            "W",
            format!(
                "blockage diameter {w} must not exceed 2·r_in = {}",
                2.0 * region.r_in()
            ),
        ));
    }
    Ok(())
}

/// Area of the region in which a single blockage blocks a transmitter at `r`.
pub fn blocking_area(r: f64, region: &AnnulusRegion, w: f64) -> Result<f64> {
    check_geometry(region, w)?;
    let (r_in, r_out) = (region.r_in(), region.r_out());
    if !(r >= r_in - 1e-9 && r <= r_out + 1e-9) {
        return Err(Error::invalid(
            "r",
            format!("distance {r} outside the annulus [{r_in}, {r_out}]"),
        ));
    }
    if w == 0.0 {
        return Ok(0.0);
    }
    let r = r.clamp(r_in, r_out);
    let hw = 0.5 * w;
    // Part of the strip hidden inside the receiver's exclusion disk.
    let mu = hw * (r_in * r_in - hw * hw).sqrt() + r_in * r_in * (w / (2.0 * r_in)).asin();
    if r <= r_out - hw {
        return Ok(r * w + PI * w * w / 8.0 - mu);
    }
    // The cap crosses the outer boundary.
    let a1 = clamp_unit((r_out * r_out - hw * hw - r * r) / (r * w), "arcsin");
    let a2 = clamp_unit((r_out * r_out - hw * hw + r * r) / (2.0 * r * r_out), "arccos");
    let s = 0.5 * (r_out + r + hw);
    let heron = (s * (s - r) * (s - hw) * (s - r_out)).max(0.0).sqrt();
    let nu = hw * hw * a1.asin() + r_out * r_out * a2.acos() - 2.0 * heron;
    Ok(r * w - mu + nu)
}

/// Probability that one uniformly placed blockage blocks a transmitter at `r`.
pub fn pairwise_block_prob(r: f64, region: &AnnulusRegion, w: f64) -> Result<f64> {
    Ok((blocking_area(r, region, w)? / region.area()).clamp(0.0, 1.0))
}

/// Inputs of the blocking-probability curve: region, body diameter, blockage
/// count and an optional tabulated override.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockProbProfile {
    region: AnnulusRegion,
    w: f64,
    k: u32,
    table: Option<Vec<(f64, f64)>>,
}

impl BlockProbProfile {
    /// Analytic profile.
    pub fn new(region: AnnulusRegion, w: f64, k: u32) -> Result<Self> {
        check_geometry(&region, w)?;
        Ok(Self {
            region,
            w,
            k,
            table: None,
        })
    }

    /// Profile given by `(r, p_b)` samples, linearly interpolated and held
    /// constant beyond the first and last samples.
    pub fn tabulated(region: AnnulusRegion, w: f64, k: u32, table: Vec<(f64, f64)>) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::invalid("table", "empty blocking-probability table"));
        }
        if table.windows(2).any(|p| !(p[1].0 > p[0].0)) {
            return Err(Error::invalid("table", "radii must be strictly increasing"));
        }
        if table.iter().any(|&(_, p)| !(0.0..=1.0).contains(&p)) {
            return Err(Error::invalid("table", "probabilities must lie in [0, 1]"));
        }
        Ok(Self {
            region,
            w,
            k,
            table: Some(table),
        })
    }

    pub fn region(&self) -> &AnnulusRegion {
        &self.region
    }

    pub fn blockage_diameter(&self) -> f64 {
        self.w
    }

    pub fn blockages(&self) -> u32 {
        self.k
    }

    pub fn is_tabulated(&self) -> bool {
        self.table.is_some()
    }

    /// Radius where the analytic curve switches branch.
    pub fn branch_point(&self) -> f64 {
        self.region.r_out() - 0.5 * self.w
    }

    pub fn block_prob(&self, r: f64) -> Result<f64> {
        if let Some(t) = &self.table {
            return Ok(interpolate(t, r));
        }
        if self.k == 0 {
            return Ok(0.0);
        }
        let p = pairwise_block_prob(r, &self.region, self.w)?;
        Ok(1.0 - (1.0 - p).powi(self.k as i32))
    }
}

fn interpolate(table: &[(f64, f64)], r: f64) -> f64 {
    let i = table.partition_point(|&(x, _)| x <= r);
    if i == 0 {
        return table[0].1;
    }
    if i == table.len() {
        return table[i - 1].1;
    }
    let (x0, y0) = table[i - 1];
    let (x1, y1) = table[i];
    y0 + (y1 - y0) * (r - x0) / (x1 - x0)
}

/// `p_b(r) = 1 - (1 - area(r)/|A|)^K`.
pub fn block_prob(r: f64, profile: &BlockProbProfile) -> Result<f64> {
    profile.block_prob(r)
}

/// Radius of the equivalent LOS ball and the expected number of unblocked
/// interferers it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LosBall {
    pub radius: f64,
    pub expected_los: f64,
    pub r_in: f64,
}

impl LosBall {
    /// A ball of given radius with the matching expected LOS count.
    pub fn with_radius(radius: f64, region: &AnnulusRegion, k: u32) -> Result<Self> {
        if !(radius >= region.r_in() && radius <= region.r_out()) {
            return Err(Error::invalid(
                "R_B",
                format!("must lie in [{}, {}], got {radius}", region.r_in(), region.r_out()),
            ));
        }
        let lambda = f64::from(k) / region.area();
        Ok(Self {
            radius,
            expected_los: lambda * PI * (radius * radius - region.r_in() * region.r_in()),
            r_in: region.r_in(),
        })
    }

    /// Step approximation: 0 inside the ball, 1 beyond.
    pub fn step_block_prob(&self, r: f64) -> f64 {
        if r <= self.radius {
            0.0
        } else {
            1.0
        }
    }

    pub fn is_los(&self, r: f64) -> bool {
        r <= self.radius
    }
}

/// First-moment matched LOS ball: `R_B² = 2∫(1 - p_b) r dr + r_in²`.
pub fn los_ball(profile: &BlockProbProfile) -> Result<LosBall> {
    let region = profile.region();
    let (r_in, r_out) = (region.r_in(), region.r_out());
    let mut failure = None;
    let integrand = |r: f64| match profile.block_prob(r) {
        Ok(p) => (1.0 - p) * r,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    };
    let mut breaks = vec![profile.branch_point()];
    if let Some(t) = &profile.table {
        breaks.extend(t.iter().map(|&(x, _)| x));
    }
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-8,
        max_intervals: 4000,
    };
    let res = quad::integrate(integrand, r_in, r_out, &breaks, opts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let integral = res.value.max(0.0);
    let radius = (2.0 * integral + r_in * r_in).sqrt().clamp(r_in, r_out);
    let lambda = f64::from(profile.blockages()) / region.area();
    Ok(LosBall {
        radius,
        expected_los: 2.0 * PI * lambda * integral,
        r_in,
    })
}
