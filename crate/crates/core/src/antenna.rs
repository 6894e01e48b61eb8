//! Sectorized 3-D antenna pattern for an `N`-element uniform planar square array.
//!
//! Half-power beamwidths are `√3/√N` rad in azimuth and elevation, the
//! main-lobe gain is `N`, and the side-lobe gain is fixed by requiring the
//! pattern to radiate a total of `4π`. A single element is isotropic.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntennaPattern {
    pub n_elements: u32,
    /// Azimuth half-power beamwidth, radians.
    pub theta_az: f64,
    /// Elevation half-power beamwidth, radians.
    pub theta_el: f64,
    /// Main-lobe gain, linear.
    pub gain_main: f64,
    /// Side-lobe gain, linear.
    pub gain_side: f64,
}

impl AntennaPattern {
    pub fn isotropic() -> Self {
        Self {
            n_elements: 1,
            theta_az: TAU,
            theta_el: PI,
            gain_main: 1.0,
            gain_side: 1.0,
        }
    }

    pub fn is_isotropic(&self) -> bool {
        self.n_elements == 1
    }

    pub fn beamwidth_deg(&self) -> f64 {
        self.theta_az.to_degrees()
    }

    pub fn gain_main_db(&self) -> f64 {
        to_db(self.gain_main)
    }

    pub fn gain_side_db(&self) -> f64 {
        to_db(self.gain_side)
    }

    /// Solid angle covered by the main lobe, `θ_a · 2 sin(θ_e / 2)`.
    pub fn mainlobe_solid_angle(&self) -> f64 {
        self.theta_az * 2.0 * (0.5 * self.theta_el).sin()
    }
}

/// Pattern of an `n`-element uniform planar square array.
pub fn upa_pattern(n: u32) -> Result<AntennaPattern> {
    if n == 0 {
        return Err(Error::invalid("n_elements", "antenna needs at least one element"));
    }
    if n == 1 {
        return Ok(AntennaPattern::isotropic());
    }
    let nf = f64::from(n);
    let root = nf.sqrt();
    let theta = 3f64.sqrt() / root;
    let c = 3f64.sqrt() / TAU;
    let s = (3f64.sqrt() / (2.0 * root)).sin();
    let gain_side = (root - c * nf * s) / (root - c * s);
    Ok(AntennaPattern {
        n_elements: n,
        theta_az: theta,
        theta_el: theta,
        gain_main: nf,
        gain_side,
    })
}

/// Probability that a randomly oriented transmitter points its main lobe at
/// the receiver: `(θ_a / 2π) sin(θ_e / 2)`.
pub fn mainlobe_prob(pattern: &AntennaPattern) -> f64 {
    if pattern.is_isotropic() {
        return 1.0;
    }
    pattern.theta_az / TAU * (0.5 * pattern.theta_el).sin()
}

/// `∫∫ G(φ, ψ) cos ψ dψ dφ` of the sectorized pattern; `4π` for a passive array.
pub fn radiated_power_integral(pattern: &AntennaPattern) -> f64 {
    let main = pattern.mainlobe_solid_angle();
    pattern.gain_main * main + pattern.gain_side * (4.0 * PI - main)
}

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
