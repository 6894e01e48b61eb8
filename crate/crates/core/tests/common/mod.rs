//! Independent oracles shared by the integration tests. None of them call the
//! closed forms they are used to check.

#![allow(dead_code)]

use mmwave_d2d::antenna::AntennaPattern;
use mmwave_d2d::geometry::{AnnulusRegion, PlanarPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the annulus by rejection from the bounding square.
pub fn uniform_in_annulus<R: Rng>(region: &AnnulusRegion, rng: &mut R) -> PlanarPoint {
    let (a, b) = (region.r_in(), region.r_out());
    loop {
        let x = rng.random_range(-b..b);
        let y = rng.random_range(-b..b);
        let r2 = x * x + y * y;
        if r2 >= a * a && r2 <= b * b {
            return PlanarPoint::new(x, y);
        }
    }
}

/// Distance from `p` to the segment from the origin to `x`.
pub fn dist_to_segment(p: PlanarPoint, x: PlanarPoint) -> f64 {
    let len2 = x.x * x.x + x.y * x.y;
    let t = ((p.x * x.x + p.y * x.y) / len2).clamp(0.0, 1.0);
    ((p.x - t * x.x).powi(2) + (p.y - t * x.y).powi(2)).sqrt()
}

/// Blocked flags by exact segment–disk intersection plus the proximity rule.
pub fn segment_oracle(tx: &[PlanarPoint], bodies: &[PlanarPoint], w: f64, skip_self: bool) -> Vec<bool> {
    tx.iter()
        .enumerate()
        .map(|(i, &x)| {
            bodies
                .iter()
                .enumerate()
                .filter(|(j, _)| !(skip_self && *j == i))
                .any(|(_, &b)| x.distance(b) <= w / 2.0 || dist_to_segment(b, x) <= w / 2.0)
        })
        .collect()
}

/// Whether a body centred at `b` lies in the blocking region of a transmitter
/// at `x`: the width-`W` strip along the segment, capped by a half disk at
/// the transmitter end.
pub fn in_blocking_region(b: PlanarPoint, x: PlanarPoint, w: f64) -> bool {
    let r = x.radius();
    let (ux, uy) = (x.x / r, x.y / r);
    let along = b.x * ux + b.y * uy;
    let across = (b.x * uy - b.y * ux).abs();
    (along >= 0.0 && along <= r && across <= w / 2.0) || b.distance(x) <= w / 2.0
}

/// Monte Carlo estimate (mean, standard error) of the blocking-region area
/// fraction of the annulus for a transmitter at radius `r`.
pub fn blocking_area_fraction(region: &AnnulusRegion, w: f64, r: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut g = rng(seed);
    let x = PlanarPoint::new(r, 0.0);
    let hits = (0..draws)
        .filter(|_| in_blocking_region(uniform_in_annulus(region, &mut g), x, w))
        .count();
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

/// Small scenario for the fading oracle.
#[derive(Debug, Clone)]
pub struct FadingCase {
    pub m0: u32,
    pub omega_0: f64,
    pub omega: Vec<f64>,
    pub nakagami: Vec<u32>,
    pub noise: f64,
    pub tx: AntennaPattern,
    pub p_t: f64,
}

/// Coverage at each `beta` by sampling the reference fading, the interferer
/// fading and the interferer antenna gains. Returns `(mean, std_error)` pairs.
pub fn fading_oracle(case: &FadingCase, betas: &[f64], draws: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut g = rng(seed);
    let h0 = Gamma::new(f64::from(case.m0), 1.0 / f64::from(case.m0)).unwrap();
    let hs: Vec<Gamma<f64>> = case
        .nakagami
        .iter()
        .map(|&m| Gamma::new(f64::from(m), 1.0 / f64::from(m)).unwrap())
        .collect();
    let tx = case.tx;
    let p_main = if tx.n_elements == 1 {
        1.0
    } else {
        (tx.theta_az / std::f64::consts::TAU) * (tx.theta_el / 2.0).sin()
    };
    let mut hits = vec![0usize; betas.len()];
    for _ in 0..draws {
        let signal = tx.gain_main * case.omega_0 * h0.sample(&mut g);
        let mut interference = 0.0;
        for (i, &om) in case.omega.iter().enumerate() {
            let fade = hs[i].sample(&mut g);
            if g.random::<f64>() < case.p_t {
                let gain = if g.random::<f64>() < p_main { tx.gain_main } else { tx.gain_side };
                interference += gain * fade * om;
            }
        }
        let sinr = signal / (case.noise + interference);
        for (h, &b) in hits.iter_mut().zip(betas) {
            if sinr > b {
                *h += 1;
            }
        }
    }
    hits.iter()
        .map(|&h| {
            let p = h as f64 / draws as f64;
            (p, (p * (1.0 - p) / draws as f64).sqrt())
        })
        .collect()
}

/// Two-sample-free Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical value at significance 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.628 / (n as f64).sqrt()
}
