//! Link parameters and the normalized power gains `Ω` seen by the reference receiver.

use serde::Serialize;

use crate::antenna::{mainlobe_prob, AntennaPattern};
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, PlanarPoint};

/// Interferer transmit power relative to the reference transmitter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PowerRatios {
    Uniform(f64),
    PerInterferer(Vec<f64>),
}

impl PowerRatios {
    pub fn get(&self, i: usize) -> f64 {
        match self {
            PowerRatios::Uniform(r) => *r,
            PowerRatios::PerInterferer(v) => v[i],
        }
    }
}

/// Nakagami and path-loss parameters shared by all links, plus noise and access.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkModel {
    pub m_los: u32,
    pub m_nlos: u32,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Noise power over reference transmit power, linear.
    pub noise: f64,
    /// Per-interferer transmission probability.
    pub p_t: f64,
    pub power_ratios: PowerRatios,
}

impl LinkModel {
    pub fn new(
        m_los: u32,
        m_nlos: u32,
        alpha_los: f64,
        alpha_nlos: f64,
        noise: f64,
        p_t: f64,
    ) -> Result<Self> {
        let link = Self {
            m_los,
            m_nlos,
            alpha_los,
            alpha_nlos,
            noise,
            p_t,
            power_ratios: PowerRatios::Uniform(1.0),
        };
        link.validate()?;
        Ok(link)
    }

    pub fn with_power_ratios(mut self, ratios: PowerRatios) -> Result<Self> {
        let bad = match &ratios {
            PowerRatios::Uniform(r) => !(*r > 0.0 && r.is_finite()),
            PowerRatios::PerInterferer(v) => v.iter().any(|r| !(*r > 0.0 && r.is_finite())),
        };
        if bad {
            return Err(Error::invalid("power_ratio", "ratios must be positive and finite"));
        }
        self.power_ratios = ratios;
        Ok(self)
    }

    pub fn with_p_t(mut self, p_t: f64) -> Result<Self> {
        self.p_t = p_t;
        self.validate()?;
        Ok(self)
    }

    pub fn with_noise(mut self, noise: f64) -> Result<Self> {
        self.noise = noise;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.m_los == 0 || self.m_nlos == 0 {
            return Err(Error::invalid("m", "Nakagami factors must be >= 1"));
        }
        if !(self.alpha_los > 0.0 && self.alpha_los.is_finite()) {
            return Err(Error::invalid("alpha_los", format!("must be positive, got {}", self.alpha_los)));
        }
        if !(self.alpha_nlos >= self.alpha_los && self.alpha_nlos.is_finite()) {
            return Err(Error::invalid(
                "alpha_nlos",
                format!("must be >= alpha_los = {}, got {}", self.alpha_los, self.alpha_nlos),
            ));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::invalid("noise", format!("must be >= 0, got {}", self.noise)));
        }
        if !(0.0..=1.0).contains(&self.p_t) {
            return Err(Error::invalid("p_t", format!("must lie in [0, 1], got {}", self.p_t)));
        }
        Ok(())
    }

    pub fn nakagami(&self, los: bool) -> u32 {
        if los {
            self.m_los
        } else {
            self.m_nlos
        }
    }

    pub fn path_loss_exponent(&self, los: bool) -> f64 {
        if los {
            self.alpha_los
        } else {
            self.alpha_nlos
        }
    }
}

/// Converts a real Nakagami factor to the integer the exact analysis requires.
pub fn integer_nakagami(name: &'static str, m: f64) -> Result<u32> {
    if m.fract() != 0.0 || !(1.0..=1e6).contains(&m) {
        return Err(Error::Unsupported {
            name,
            reason: format!("exact coverage needs a positive integer Nakagami factor, got {m}"),
        });
    }
    Ok(m as u32)
}

/// The reference transmitter as seen from the receiver at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceLink {
    pub distance: f64,
    pub azimuth: f64,
    pub elevation: f64,
    pub nakagami: u32,
    pub alpha: f64,
    /// Receiver main lobe misses the interferer plane (`|ψ₀| > θ_e/2`), so
    /// every interferer is received through the side lobe.
    pub sidelobe_only: bool,
}

impl ReferenceLink {
    /// Line-of-sight reference link, `m₀ = m_L`, `α₀ = α_L`.
    pub fn los(distance: f64, azimuth: f64, link: &LinkModel) -> Result<Self> {
        Self::build(distance, azimuth, link.m_los, link.alpha_los)
    }

    /// Reference link blocked by the user's own body: `m₀ = m_N`, `α₀ = α_N`.
    pub fn nlos(distance: f64, azimuth: f64, link: &LinkModel) -> Result<Self> {
        Self::build(distance, azimuth, link.m_nlos, link.alpha_nlos)
    }

    fn build(distance: f64, azimuth: f64, nakagami: u32, alpha: f64) -> Result<Self> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::invalid("r0", format!("must be positive, got {distance}")));
        }
        Ok(Self {
            distance,
            azimuth,
            elevation: 0.0,
            nakagami,
            alpha,
            sidelobe_only: false,
        })
    }

    pub fn with_elevation(mut self, elevation: f64, sidelobe_only: bool) -> Self {
        self.elevation = elevation;
        self.sidelobe_only = sidelobe_only;
        self
    }

    /// `Ω₀ = G_r R₀^{-α₀}`.
    pub fn omega(&self, rx: &AntennaPattern) -> f64 {
        rx.gain_main * self.distance.powf(-self.alpha)
    }

    fn check_elevation(&self, rx: &AntennaPattern) -> Result<()> {
        if !self.sidelobe_only && self.elevation.abs() > 0.5 * rx.theta_el + 1e-12 {
            return Err(Error::invalid(
                "psi0",
                format!(
                    "|ψ₀| = {} exceeds θ_e/2 = {}; set the side-lobe-only case explicitly",
                    self.elevation.abs(),
                    0.5 * rx.theta_el
                ),
            ));
        }
        Ok(())
    }
}

/// Normalized power gains of the reference link and each interferer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaVector {
    pub omega_0: f64,
    pub omega: Vec<f64>,
    pub los: Vec<bool>,
    /// Nakagami factor of each interferer link.
    pub nakagami: Vec<u32>,
}

impl OmegaVector {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }
}

/// Builds `Ω` from interferer positions and their line-of-sight state.
pub fn omega_vector(
    positions: &[PlanarPoint],
    los: &[bool],
    reference: &ReferenceLink,
    rx: &AntennaPattern,
    link: &LinkModel,
) -> Result<OmegaVector> {
    if positions.len() != los.len() {
        return Err(Error::invalid(
            "los",
            format!("{} positions but {} LOS flags", positions.len(), los.len()),
        ));
    }
    if let PowerRatios::PerInterferer(v) = &link.power_ratios {
        if v.len() != positions.len() {
            return Err(Error::invalid(
                "power_ratios",
                format!("{} ratios for {} interferers", v.len(), positions.len()),
            ));
        }
    }
    reference.check_elevation(rx)?;
    let half_beam = 0.5 * rx.theta_az;
    let mut omega = Vec::with_capacity(positions.len());
    let mut nakagami = Vec::with_capacity(positions.len());
    for (i, (p, &is_los)) in positions.iter().zip(los).enumerate() {
        let r = p.radius();
        if !(r > 0.0) {
            return Err(Error::Degenerate(format!("interferer {i} is co-located with the receiver")));
        }
        let in_main = !reference.sidelobe_only
            && wrap_angle(p.azimuth() - reference.azimuth).abs() <= half_beam;
        let gain = if in_main { rx.gain_main } else { rx.gain_side };
        let alpha = link.path_loss_exponent(is_los);
        omega.push(link.power_ratios.get(i) * gain * r.powf(-alpha));
        nakagami.push(link.nakagami(is_los));
    }
    Ok(OmegaVector {
        omega_0: reference.omega(rx),
        omega,
        los: los.to_vec(),
        nakagami,
    })
}

/// Distribution of the power an interferer radiates toward the receiver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainPmf {
    pub silent: f64,
    pub main: (f64, f64),
    pub side: (f64, f64),
}

impl GainPmf {
    /// `(value, probability)` pairs: off, main lobe, side lobe.
    pub fn atoms(&self) -> [(f64, f64); 3] {
        [(0.0, self.silent), self.main, self.side]
    }

    pub fn total_mass(&self) -> f64 {
        self.silent + self.main.1 + self.side.1
    }
}

pub fn interferer_gain_pmf(tx: &AntennaPattern, p_t: f64) -> GainPmf {
    let p_m = mainlobe_prob(tx);
    GainPmf {
        silent: 1.0 - p_t,
        main: (tx.gain_main, p_t * p_m),
        side: (tx.gain_side, p_t * (1.0 - p_m)),
    }
}

/// `β₀ = β m₀ / (G_t Ω₀)`.
pub fn beta0(beta: f64, m0: u32, tx: &AntennaPattern, omega_0: f64) -> f64 {
    beta * f64::from(m0) / (tx.gain_main * omega_0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::upa_pattern;
    use std::f64::consts::PI;

    fn table3_link() -> LinkModel {
        LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.0).unwrap()
    }

    #[test]
    fn no_interferers() {
        let link = table3_link();
        let r = ReferenceLink::los(0.3, 0.0, &link).unwrap();
        let rx = AntennaPattern::isotropic();
        let om = omega_vector(&[], &[], &r, &rx, &link).unwrap();
        assert!((om.omega_0 - 11.111_111_111_111).abs() < 1e-9);
        assert!(om.is_empty());
    }

    #[test]
    fn unit_distance_interferers() {
        let link = table3_link();
        let r = ReferenceLink::los(0.3, 0.0, &link).unwrap();
        let om = omega_vector(
            &[PlanarPoint::new(1.0, 0.0)],
            &[true],
            &r,
            &AntennaPattern::isotropic(),
            &link,
        )
        .unwrap();
        assert_eq!(om.omega, vec![1.0]);
        assert_eq!(om.nakagami, vec![4]);

        let rx16 = upa_pattern(16).unwrap();
        let om = omega_vector(&[PlanarPoint::new(-1.0, 0.0)], &[false], &r, &rx16, &link).unwrap();
        assert!((om.omega[0] - 0.7745).abs() < 1e-4);
        assert_eq!(om.nakagami, vec![2]);
    }

    #[test]
    fn sidelobe_only_case() {
        let link = table3_link();
        let rx = upa_pattern(4).unwrap();
        let r = ReferenceLink::los(0.3, 0.0, &link).unwrap();
        assert!(r.with_elevation(0.5, false).check_elevation(&rx).is_err());
        let r = r.with_elevation(0.5, true);
        let om = omega_vector(&[PlanarPoint::new(2.0, 0.0)], &[true], &r, &rx, &link).unwrap();
        assert!((om.omega[0] - rx.gain_side / 4.0).abs() < 1e-12);
    }

    #[test]
    fn interferer_on_receiver_rejected() {
        let link = table3_link();
        let r = ReferenceLink::los(0.3, 0.0, &link).unwrap();
        let rx = AntennaPattern::isotropic();
        assert!(omega_vector(&[PlanarPoint::ORIGIN], &[true], &r, &rx, &link).is_err());
    }

    #[test]
    fn omega_rotation_invariant() {
        let link = table3_link();
        let rx = upa_pattern(16).unwrap();
        let pts: Vec<_> = (0..12)
            .map(|k| PlanarPoint::from_polar(0.5 + 0.1 * k as f64, 0.37 * k as f64))
            .collect();
        let los: Vec<_> = (0..12).map(|k| k % 3 != 0).collect();
        let r = ReferenceLink::los(0.3, 0.2, &link).unwrap();
        let base = omega_vector(&pts, &los, &r, &rx, &link).unwrap();
        let rot = 1.234;
        let pts_r: Vec<_> = pts.iter().map(|p| p.rotated(rot)).collect();
        let r_r = ReferenceLink::los(0.3, 0.2 + rot, &link).unwrap();
        let turned = omega_vector(&pts_r, &los, &r_r, &rx, &link).unwrap();
        for (a, b) in base.omega.iter().zip(&turned.omega) {
            assert!((a - b).abs() < 1e-12 * a);
        }
        let _ = PI;
    }

    #[test]
    fn gain_pmf_cases() {
        let p = interferer_gain_pmf(&AntennaPattern::isotropic(), 0.0);
        assert_eq!(p.silent, 1.0);
        let p = interferer_gain_pmf(&AntennaPattern::isotropic(), 1.0);
        assert_eq!(p.silent, 0.0);
        assert_eq!(p.main, (1.0, 1.0));
        let p = interferer_gain_pmf(&upa_pattern(4).unwrap(), 0.5);
        assert!((p.main.1 - 0.028_918).abs() < 1e-6);
        assert!((p.side.0 - 0.8158).abs() < 1e-4);
        assert!((p.side.1 - 0.471_082).abs() < 1e-6);
        assert!((p.total_mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beta0_examples() {
        let omega_0 = 1.0 / 0.09;
        let iso = AntennaPattern::isotropic();
        assert!((beta0(1.0, 4, &iso, omega_0) - 0.36).abs() < 1e-12);
        assert!((beta0(1.0, 4, &upa_pattern(16).unwrap(), omega_0) - 0.0225).abs() < 1e-12);
    }

    #[test]
    fn integer_nakagami_check() {
        assert_eq!(integer_nakagami("m_l", 4.0).unwrap(), 4);
        assert!(matches!(
            integer_nakagami("m_l", 2.5),
            Err(Error::Unsupported { .. })
        ));
        assert!(integer_nakagami("m_l", 0.0).is_err());
    }

    #[test]
    fn link_validation() {
        assert!(LinkModel::new(4, 2, 2.0, 1.5, 0.01, 1.0).is_err());
        assert!(LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.5).is_err());
        assert!(LinkModel::new(0, 2, 2.0, 4.0, 0.01, 1.0).is_err());
    }
}
