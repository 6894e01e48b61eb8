mod common;

use common::{blocking_area_fraction, rng, uniform_in_annulus};
use mmwave_d2d::blockage::{block_prob, los_ball, pairwise_block_prob, BlockProbProfile, LosBall};
use mmwave_d2d::geometry::{AnnulusRegion, BlockingField, PlanarPoint};
use mmwave_d2d::quad::{linspace, trapezoid};

fn wide() -> AnnulusRegion {
    AnnulusRegion::new(1.0, 7.0).unwrap()
}

#[test]
fn near_case_area_matches_geometric_oracle() {
    let (p, se) = blocking_area_fraction(&wide(), 1.0, 4.0, 10_000_000, 41);
    let a = pairwise_block_prob(4.0, &wide(), 1.0).unwrap();
    assert!((a - p).abs() < 3.0 * se, "analytic {a}, oracle {p} ± {se}");
}

#[test]
fn far_case_area_matches_geometric_oracle() {
    for (r, seed) in [(7.0, 42), (6.8, 43)] {
        let (p, se) = blocking_area_fraction(&wide(), 1.0, r, 10_000_000, seed);
        let a = pairwise_block_prob(r, &wide(), 1.0).unwrap();
        assert!((a - p).abs() < 3.0 * se, "r={r}: analytic {a}, oracle {p} ± {se}");
    }
}

#[test]
fn branch_point_is_continuous() {
    let reg = wide();
    let b = 7.0 - 0.5;
    let lo = pairwise_block_prob(b - 1e-12, &reg, 1.0).unwrap();
    let hi = pairwise_block_prob(b + 1e-12, &reg, 1.0).unwrap();
    assert!((lo - hi).abs() < 1e-9, "{lo} vs {hi}");
}

#[test]
fn block_prob_is_non_decreasing() {
    for (reg, w) in [(wide(), 1.0), (AnnulusRegion::new(0.3, 2.1).unwrap(), 0.3)] {
        let prof = BlockProbProfile::new(reg, w, 36).unwrap();
        let rs = linspace(reg.r_in(), reg.r_out(), 5001);
        let ps: Vec<f64> = rs.iter().map(|&r| prof.block_prob(r).unwrap()).collect();
        for w2 in ps.windows(2) {
            assert!(w2[1] - w2[0] >= -1e-9);
        }
    }
}

#[test]
fn trivial_profiles() {
    let reg = AnnulusRegion::new(0.3, 2.1).unwrap();
    let none = BlockProbProfile::new(reg, 0.3, 0).unwrap();
    assert_eq!(block_prob(1.0, &none).unwrap(), 0.0);
    let ball = los_ball(&none).unwrap();
    assert!((ball.radius - 2.1).abs() < 1e-9);
    assert!((ball.expected_los - 0.0).abs() < 1e-12);

    let thin = BlockProbProfile::new(reg, 1e-9, 36).unwrap();
    assert!(block_prob(2.0, &thin).unwrap() < 1e-6);
    let ball = los_ball(&thin).unwrap();
    assert!((ball.radius - 2.1).abs() < 1e-6);
    assert!((ball.expected_los - 36.0).abs() < 1e-4);

    let full = BlockProbProfile::tabulated(reg, 0.3, 36, vec![(0.3, 1.0), (2.1, 1.0)]).unwrap();
    let ball = los_ball(&full).unwrap();
    assert!((ball.radius - 0.3).abs() < 1e-9);
    assert!(ball.expected_los.abs() < 1e-9);
}

#[test]
fn width_precondition() {
    let reg = AnnulusRegion::new(0.3, 2.1).unwrap();
    assert!(pairwise_block_prob(1.0, &reg, 0.61).is_err());
    assert!(pairwise_block_prob(1.0, &reg, 0.6).is_ok());
    assert!(pairwise_block_prob(0.2, &reg, 0.3).is_err());
}

#[test]
fn los_ball_matches_trapezoid_and_identity() {
    let reg = AnnulusRegion::new(0.3, 2.1).unwrap();
    let prof = BlockProbProfile::new(reg, 0.3, 36).unwrap();
    let ball = los_ball(&prof).unwrap();

    let rs = linspace(0.3, 2.1, 10_000);
    let ys: Vec<f64> = rs.iter().map(|&r| (1.0 - prof.block_prob(r).unwrap()) * r).collect();
    let integral = trapezoid(&rs, &ys);
    let rb = (2.0 * integral + 0.09f64).sqrt();
    assert!((ball.radius - rb).abs() < 1e-4, "{} vs {rb}", ball.radius);

    let lambda = 36.0 / reg.area();
    let rho = lambda * std::f64::consts::PI * (ball.radius.powi(2) - 0.09);
    assert!((rho - ball.expected_los).abs() <= 1e-6 * rho);

    // K times the area-weighted mean of 1 - p_b.
    let mean_los = 2.0 * std::f64::consts::PI * integral / reg.area();
    assert!((36.0 * mean_los - ball.expected_los).abs() < 1e-4 * ball.expected_los);

    let same = LosBall::with_radius(ball.radius, &reg, 36).unwrap();
    assert!((same.expected_los - ball.expected_los).abs() < 1e-12 * ball.expected_los);
}

/// Fraction of trials in which a probe at radius `r` is blocked by K bodies.
fn placement_oracle(reg: &AnnulusRegion, w: f64, k: usize, r: f64, trials: usize, seed: u64) -> f64 {
    let mut g = rng(seed);
    let probe = PlanarPoint::new(r, 0.0);
    let mut blocked = 0usize;
    for _ in 0..trials {
        let bodies: Vec<PlanarPoint> = (0..k).map(|_| uniform_in_annulus(reg, &mut g)).collect();
        if BlockingField::new(&bodies, w).unwrap().is_blocked(probe, None) {
            blocked += 1;
        }
    }
    blocked as f64 / trials as f64
}

#[test]
fn block_prob_matches_placement_simulation() {
    let reg = wide();
    let prof = BlockProbProfile::new(reg, 1.0, 36).unwrap();
    for (i, r) in [2.0, 4.0, 6.0].into_iter().enumerate() {
        let sim = placement_oracle(&reg, 1.0, 36, r, 100_000, 100 + i as u64);
        let p = prof.block_prob(r).unwrap();
        assert!((sim - p).abs() <= 0.005, "r={r}: analytic {p}, simulation {sim}");
    }
}
