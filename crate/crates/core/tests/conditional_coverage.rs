mod common;

use common::{fading_oracle, FadingCase};
use mmwave_d2d::antenna::upa_pattern;
use mmwave_d2d::channel::{beta0, interferer_gain_pmf, omega_vector, LinkModel, OmegaVector, ReferenceLink};
use mmwave_d2d::coverage::{
    ergodic_spectral_efficiency, g_ti, ConditionalCoverage, ErgodicOptions,
};
use mmwave_d2d::geometry::PlanarPoint;
use mmwave_d2d::AntennaPattern;

fn omega(omega_0: f64, omega: Vec<f64>, nakagami: Vec<u32>) -> OmegaVector {
    OmegaVector {
        omega_0,
        los: vec![true; omega.len()],
        omega,
        nakagami,
    }
}

fn model(m0: u32, noise: f64, p_t: f64, tx: &AntennaPattern) -> ConditionalCoverage {
    let link = LinkModel::new(m0, 2, 2.0, 4.0, noise, p_t).unwrap();
    let r = ReferenceLink::los(0.3, 0.0, &link).unwrap();
    ConditionalCoverage::new(&link, tx, &r).unwrap()
}

#[test]
fn beta0_arithmetic() {
    let iso = AntennaPattern::isotropic();
    assert!((beta0(1.0, 4, &iso, 11.11) - 4.0 / 11.11).abs() < 1e-15);
    assert!((beta0(1.0, 4, &iso, 100.0 / 9.0) - 0.36).abs() < 1e-12);
    let t16 = upa_pattern(16).unwrap();
    assert!((beta0(1.0, 4, &t16, 100.0 / 9.0) - 0.0225).abs() < 1e-12);
    assert!(beta0(1e-300, 4, &iso, 11.11) < 1e-299);
}

#[test]
fn g_ti_hand_values() {
    let iso = AntennaPattern::isotropic();
    assert_eq!(g_ti(0, 3.0, 4, 0.5, &iso, 0.0), 1.0);
    assert_eq!(g_ti(2, 3.0, 4, 0.5, &iso, 0.0), 0.0);
    // β₀Ω = 4 with m = 4 gives (1 + 1)^{-4}.
    assert!((g_ti(0, 8.0, 4, 0.5, &iso, 1.0) - 0.0625).abs() < 1e-15);
}

#[test]
fn no_interference_is_gamma_tail() {
    let iso = AntennaPattern::isotropic();
    let om = omega(100.0 / 9.0, vec![], vec![]);
    let c1 = model(1, 0.01, 1.0, &iso);
    let b0 = 1.0 / (100.0 / 9.0);
    assert!((c1.coverage(1.0, &om).unwrap() - (-b0 * 0.01f64).exp()).abs() < 1e-15);

    let c4 = model(4, 0.01, 1.0, &iso);
    let x: f64 = 0.0036;
    let expect = (-x).exp() * (1.0 + x + x * x / 2.0 + x.powi(3) / 6.0);
    let got = c4.coverage(1.0, &om).unwrap();
    assert!((got - expect).abs() < 1e-15);
    assert!(got > 0.999_999_99);

    // Rate threshold 3 bits means β = 7.
    let r = c1.rate_ccdf(3.0, &om).unwrap();
    assert!((r - (-7.0 * b0 * 0.01f64).exp()).abs() < 1e-15);
}

#[test]
fn rate_ccdf_is_coverage_at_two_pow_eta_minus_one() {
    let tx = upa_pattern(4).unwrap();
    let c = model(4, 0.01, 0.6, &tx);
    let om = omega(11.1, vec![0.4, 2.0, 0.05], vec![4, 2, 2]);
    for eta in [0.0, 0.5, 1.0, 2.5, 6.0] {
        let a = c.rate_ccdf(eta, &om).unwrap();
        let b = c.coverage(eta.exp2() - 1.0, &om).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(c.rate_ccdf(0.0, &om).unwrap(), 1.0);
}

#[test]
fn vanishing_interferer_changes_nothing() {
    let tx = upa_pattern(16).unwrap();
    let c = model(4, 0.01, 1.0, &tx);
    let base = omega(11.1, vec![0.4, 2.0], vec![4, 2]);
    let more = omega(11.1, vec![0.4, 2.0, 1e-14], vec![4, 2, 4]);
    for beta in [0.1, 1.0, 10.0, 100.0] {
        let a = c.coverage(beta, &base).unwrap();
        let b = c.coverage(beta, &more).unwrap();
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn two_interferers_match_enumeration_and_fading_sampling() {
    let tx = upa_pattern(4).unwrap();
    let (m0, noise, p_t) = (3, 0.05, 0.8);
    let c = model(m0, noise, p_t, &tx);
    let om = omega(5.0, vec![1.3, 0.35], vec![4, 2]);
    let betas = [0.05, 0.2, 0.5, 1.0, 2.0];
    for &b in &betas {
        let plan = c.plan(b, &om);
        for (x, y) in plan.convolve().iter().zip(plan.enumerate()) {
            assert!((x - y).abs() <= 1e-12);
        }
    }
    let case = FadingCase {
        m0,
        omega_0: om.omega_0,
        omega: om.omega.clone(),
        nakagami: om.nakagami.clone(),
        noise,
        tx,
        p_t,
    };
    let sim = fading_oracle(&case, &betas, 100_000_000, 9001);
    for (&b, (mean, se)) in betas.iter().zip(sim) {
        let p = c.coverage(b, &om).unwrap();
        assert!((p - mean).abs() <= 4.0 * se.max(1e-9), "β={b}: {p} vs {mean} ± {se}");
    }
}

#[test]
fn gain_pmf_sums_to_one() {
    for n in [1, 4, 16, 64] {
        let tx = upa_pattern(n).unwrap();
        for p_t in [0.0, 0.3, 1.0] {
            let pmf = interferer_gain_pmf(&tx, p_t);
            assert!(pmf.atoms().iter().all(|a| a.1 >= 0.0));
            assert!((pmf.total_mass() - 1.0).abs() < 1e-15);
        }
    }
}

#[test]
fn omega_vector_geometry() {
    let link = LinkModel::new(4, 2, 2.0, 4.0, 0.01, 1.0).unwrap();
    let rx = upa_pattern(16).unwrap();
    let r = ReferenceLink::los(0.3, 0.4, &link).unwrap();
    let pts: Vec<PlanarPoint> = [0.5, 0.9, 1.4, 2.0].iter().map(|&d| PlanarPoint::from_polar(d, 0.45)).collect();
    let om = omega_vector(&pts, &[true; 4], &r, &rx, &link).unwrap();
    for w in om.omega.windows(2) {
        assert!(w[1] < w[0]);
    }
    let far = [PlanarPoint::from_polar(1.5, 2.0)];
    let l = omega_vector(&far, &[true], &r, &rx, &link).unwrap().omega[0];
    let n = omega_vector(&far, &[false], &r, &rx, &link).unwrap().omega[0];
    assert!(n < l);

    let shift = 1.1;
    let rotated: Vec<PlanarPoint> = pts.iter().map(|p| p.rotated(shift)).collect();
    let r2 = ReferenceLink::los(0.3, 0.4 + shift, &link).unwrap();
    let om2 = omega_vector(&rotated, &[true; 4], &r2, &rx, &link).unwrap();
    for (a, b) in om.omega.iter().zip(&om2.omega) {
        assert!((a - b).abs() <= 1e-12 * a);
    }
}

#[test]
fn non_integer_nakagami_rejected() {
    let e = mmwave_d2d::channel::integer_nakagami("m_L", 2.5).unwrap_err();
    assert_eq!(e.kind(), "unsupported");
}

#[test]
fn ergodic_of_unit_coverage() {
    let opts = ErgodicOptions {
        beta_min: 0.0,
        beta_max: 1e3,
        ..Default::default()
    };
    let r = ergodic_spectral_efficiency(|_| Ok(1.0), &opts).unwrap();
    assert!((r.value - 1001f64.log2()).abs() < 1e-3 * 1001f64.log2());
}

#[test]
fn coverage_monotone_in_noise_and_p_t() {
    let tx = upa_pattern(4).unwrap();
    let om = omega(11.1, vec![0.9, 2.5, 0.2, 0.05], vec![4, 4, 2, 2]);
    for beta in [0.3, 1.0, 4.0, 20.0] {
        let mut last = 1.0;
        for noise in [0.0, 0.01, 0.1, 1.0] {
            let p = model(4, noise, 1.0, &tx).coverage(beta, &om).unwrap();
            assert!(p <= last + 1e-14);
            last = p;
        }
        let mut last = 1.0;
        for p_t in [0.0, 0.2, 0.5, 1.0] {
            let p = model(4, 0.01, p_t, &tx).coverage(beta, &om).unwrap();
            assert!(p <= last + 1e-14);
            last = p;
        }
    }
}

#[test]
fn fixed_grid_curve_is_non_increasing() {
    let cfg = mmwave_d2d::ScenarioConfig::default();
    let mc = cfg.monte_carlo().unwrap();
    let p = mc.place(1, 0).unwrap();
    let om = omega_vector(&p.transmitters, &p.los, &mc.reference, &mc.rx, &mc.link).unwrap();
    let c = ConditionalCoverage::new(&mc.link, &mc.tx, &mc.reference).unwrap();
    let curve = c.coverage_curve(&cfg.beta_grid(), &om).unwrap();
    assert!(curve.is_non_increasing(1e-14));
    assert!(curve.values.iter().all(|v| (0.0..=1.0).contains(v)));
}
