//! Special functions needed by the coverage expressions: log-gamma, the
//! integer-shape gamma survival function, and the Gauss hypergeometric
//! function restricted to `c = b + 1`, `z <= 0`.

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::invalid("x", format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return ln_gamma_pos(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEF[0];
    for (k, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        sum += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `Γ(m + t) / (t! Γ(m))` evaluated through log-gamma.
pub fn gamma_ratio(m: u32, t: u32) -> f64 {
    let (m, t) = (f64::from(m), f64::from(t));
    (ln_gamma_pos(m + t) - ln_gamma_pos(t + 1.0) - ln_gamma_pos(m)).exp()
}

/// Erlang tail `P[X > x]` for a unit-rate gamma variable of integer shape `k`:
/// `e^{-x} Σ_{ℓ<k} x^ℓ / ℓ!`.
pub fn gamma_sf(k: u32, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k", "gamma_sf needs shape k >= 1"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::invalid("x", format!("gamma_sf needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    let lx = x.ln();
    if x < f64::from(k) {
        // Below the median the Poisson lower tail is small and rounding of
        // 1 - tail stays monotone in x.
        let mut term = (-x + f64::from(k) * lx - ln_gamma_pos(f64::from(k) + 1.0)).exp();
        let mut tail: f64 = 0.0;
        let mut l = f64::from(k);
        while term > f64::EPSILON * 1e-3 * tail.max(f64::MIN_POSITIVE) && l < f64::from(k) + 2000.0 {
            tail += term;
            l += 1.0;
            term *= x / l;
        }
        return Ok((1.0 - tail).max(0.0));
    }
    let total: f64 = (0..k)
        .map(|l| {
            let l = f64::from(l);
            (-x + l * lx - ln_gamma_pos(l + 1.0)).exp()
        })
        .sum();
    Ok(total.min(1.0))
}

/// Arguments of `₂F₁(a, b; b + 1; z)` with `a, b > 0` and `z <= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Args {
    a: f64,
    b: f64,
    z: f64,
}

impl Hyp2F1Args {
    pub fn new(a: f64, b: f64, z: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", format!("must be positive, got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("b", format!("must be positive, got {b}")));
        }
        if !(z <= 0.0) || !z.is_finite() {
            return Err(Error::invalid("z", format!("must be finite and <= 0, got {z}")));
        }
        Ok(Self { a, b, z })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.b + 1.0
    }
    pub fn z(&self) -> f64 {
        self.z
    }
}

/// Above this value of the Pfaff variable `w = z / (z - 1)` the series needs
/// too many terms and the integral path is used instead.
const SERIES_W_LIMIT: f64 = 0.8;
const SERIES_MAX_TERMS: usize = 20_000;

/// `₂F₁(a, b; b + 1; z)` for `z <= 0`.
pub fn hyp2f1_bplus1(args: Hyp2F1Args) -> Result<f64> {
    if args.z == 0.0 {
        return Ok(1.0);
    }
    let w = -args.z / (1.0 - args.z);
    if w <= SERIES_W_LIMIT {
        hyp2f1_series(args)
    } else {
        hyp2f1_integral(args)
    }
}

/// Pfaff-transformed series:
/// `₂F₁(a,b;b+1;z) = (1-z)^{-b} Σ_n (b+1-a)_n b/(b+n) w^n/n!`, `w = z/(z-1)`.
pub fn hyp2f1_series(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, z } = args;
    if z == 0.0 {
        return Ok(1.0);
    }
    let w = -z / (1.0 - z);
    let p = b + 1.0 - a;
    // term_n = (p)_n w^n / n!
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        term *= (p + nf) * w / (nf + 1.0);
        let contrib = term * b / (b + nf + 1.0);
        sum += contrib;
        if term == 0.0 || contrib.abs() <= 1e-17 * sum.abs() {
            return Ok(sum * (1.0 - z).powf(-b));
        }
    }
    Err(Error::NonConvergence {
        routine: "hyp2f1_series",
        detail: format!("a={a}, b={b}, z={z}: {SERIES_MAX_TERMS} terms"),
    })
}

/// Euler integral `b ∫₀¹ t^{b-1} (1 - z t)^{-a} dt`, evaluated after the
/// substitution `1 + Z t = e^{s}` (`Z = -z`), which turns it into
/// `b Z^{-b} ∫₀^{ln(1+Z)} (1 - e^{-s})^{b-1} e^{-s(a-b)} ds`, a smooth
/// integrand even for very large `Z`.
pub fn hyp2f1_integral(args: Hyp2F1Args) -> Result<f64> {
    let Hyp2F1Args { a, b, z } = args;
    if z == 0.0 {
        return Ok(1.0);
    }
    let big_z = -z;
    let upper = big_z.ln_1p();
    let integrand = |s: f64| (-(-s).exp_m1()).powf(b - 1.0) * (-s * (a - b)).exp();
    let r = quad::integrate(integrand, 0.0, upper, &[], QuadOptions::relative(1e-13)).map_err(
        |e| Error::NonConvergence {
            routine: "hyp2f1_integral",
            detail: format!("a={a}, b={b}, z={z}: {e}"),
        },
    )?;
    Ok(b * (-b * big_z.ln()).exp() * r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn log_gamma_known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert_eq!(log_gamma(2.0).unwrap(), 0.0);
        assert!(rel(log_gamma(0.5).unwrap(), 0.572_364_942_924_700_1) < 1e-13);
        // ln(10!) = ln 3628800
        assert!(rel(log_gamma(11.0).unwrap(), 3_628_800f64.ln()) < 1e-13);
        let big = log_gamma(171.0).unwrap();
        assert!(big.is_finite() && big > 700.0);
        assert!(rel(log_gamma(0.1).unwrap(), 2.252_712_651_734_206) < 1e-13);
    }

    #[test]
    fn log_gamma_rejects_non_positive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_gamma_recurrence() {
        let mut x = 0.5;
        while x <= 200.0 {
            let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
            assert!((d - x.ln()).abs() < 1e-12, "x={x}");
            x += 0.37;
        }
    }

    #[test]
    fn gamma_ratio_is_binomial() {
        // Γ(m+t)/(t!Γ(m)) = C(m+t-1, t)
        assert!((gamma_ratio(4, 3) - 20.0).abs() < 1e-12);
        assert!((gamma_ratio(2, 0) - 1.0).abs() < 1e-15);
        assert!((gamma_ratio(1, 5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_sf_values() {
        assert_eq!(gamma_sf(1, 0.0).unwrap(), 1.0);
        assert!((gamma_sf(4, 4.0).unwrap() - 0.433_470_120_366_709).abs() < 1e-13);
        assert!((gamma_sf(1, 2.0).unwrap() - (-2f64).exp()).abs() < 1e-16);
        let tail = gamma_sf(2, 700.0).unwrap();
        assert!(tail >= 0.0 && tail < 1e-290);
        assert!(gamma_sf(0, 1.0).is_err());
        assert!(gamma_sf(2, -1.0).is_err());
    }

    #[test]
    fn gamma_sf_monotone_near_one() {
        assert!(gamma_sf(22, 1.7466658878).unwrap() <= gamma_sf(22, 0.7666151338).unwrap());
        for k in [1, 2, 4, 9, 22, 29] {
            let mut last = 1.0;
            for i in 0..4000 {
                let q = gamma_sf(k, 0.01 * f64::from(i)).unwrap();
                assert!(q <= last, "k={k}, i={i}");
                last = q;
            }
        }
    }

    #[test]
    fn gamma_sf_branches_agree() {
        // Direct Poisson sum against the complement form used below x = k.
        for k in [2u32, 5, 12, 30] {
            for x in [0.3, 0.5 * f64::from(k), 0.95 * f64::from(k)] {
                let direct: f64 = (0..k)
                    .map(|l| (-x + f64::from(l) * x.ln() - ln_gamma_pos(f64::from(l) + 1.0)).exp())
                    .sum();
                assert!((gamma_sf(k, x).unwrap() - direct).abs() < 1e-14, "k={k}, x={x}");
            }
        }
    }

    #[test]
    fn gamma_sf_matches_density_integral() {
        // P[X > 4] for shape 4 by integrating the density x^3 e^{-x} / 3!.
        let r = quad::integrate(
            |x: f64| if x <= 0.0 { 0.0 } else { x.powi(3) * (-x).exp() / 6.0 },
            0.0,
            4.0,
            &[],
            QuadOptions::relative(1e-14),
        )
        .unwrap();
        assert!((1.0 - r.value - gamma_sf(4, 4.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn hyp2f1_log_identity() {
        let args = Hyp2F1Args::new(1.0, 1.0, -1.0).unwrap();
        let v = hyp2f1_bplus1(args).unwrap();
        assert!(rel(v, std::f64::consts::LN_2) < 1e-12);
        assert!(rel(hyp2f1_integral(args).unwrap(), std::f64::consts::LN_2) < 1e-12);
        assert!(rel(hyp2f1_series(args).unwrap(), std::f64::consts::LN_2) < 1e-12);
        // Far in the tail: ₂F₁(1,1;2;z) = ln(1-z)/(-z)
        let z = -1e7;
        let v = hyp2f1_bplus1(Hyp2F1Args::new(1.0, 1.0, z).unwrap()).unwrap();
        assert!(rel(v, (1.0 - z).ln() / -z) < 1e-11);
    }

    #[test]
    fn hyp2f1_z_zero_is_one() {
        assert_eq!(hyp2f1_bplus1(Hyp2F1Args::new(3.0, 2.5, 0.0).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn hyp2f1_dual_path_agrees() {
        let args = Hyp2F1Args::new(4.5, 4.5, -3.7).unwrap();
        let s = hyp2f1_series(args).unwrap();
        let i = hyp2f1_integral(args).unwrap();
        assert!(rel(s, i) < 1e-10, "series {s} integral {i}");
    }

    #[test]
    fn hyp2f1_rejects_bad_args() {
        assert!(Hyp2F1Args::new(1.0, 1.0, 0.5).is_err());
        assert!(Hyp2F1Args::new(0.0, 1.0, -0.5).is_err());
        assert!(Hyp2F1Args::new(1.0, -2.0, -0.5).is_err());
    }
}
