//! Standard normal distribution kernels.
//!
//! The CDF is computed through the error function: a Maclaurin series for
//! small arguments and a modified-Lentz continued fraction for the tail.
//! Internally everything runs in `f64`; generic wrappers convert at the edge.

use crate::scalar::{conv, Scalar};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_PI: f64 = 0.5641895835477563; // 1/sqrt(pi)
const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327; // 1/sqrt(2*pi)

/// Maclaurin series for erf(x), accurate for |x| <= 3.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0_f64;
    loop {
        term *= -x2 / n;
        let contrib = term / (2.0 * n + 1.0);
        sum += contrib;
        if contrib.abs() <= 1e-18 * sum.abs() || n > 200.0 {
            break;
        }
        n += 1.0;
    }
    2.0 * FRAC_1_SQRT_PI * sum
}

/// Continued fraction for erfc(x), x >= 3 (modified Lentz).
fn erfc_cf(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x.max(tiny);
    let mut c = f;
    let mut d = 0.0_f64;
    let mut k = 0.5_f64;
    for _ in 0..200 {
        // continued fraction erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        d = x + k * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + k / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
        k += 0.5;
    }
    (-x * x).exp() * FRAC_1_SQRT_PI / f
}

fn erfc_f64(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_f64(-x);
    }
    if x < 3.0 {
        1.0 - erf_series(x)
    } else {
        erfc_cf(x)
    }
}

/// Standard normal CDF.
pub fn normal_cdf<S: Scalar>(z: S) -> S {
    let z = z.to_f64().expect("scalar convertible to f64");
    conv(0.5 * erfc_f64(-z / SQRT_2))
}

/// Standard normal density.
pub fn normal_pdf<S: Scalar>(z: S) -> S {
    let z = z.to_f64().expect("scalar convertible to f64");
    conv(FRAC_1_SQRT_2PI * (-0.5 * z * z).exp())
}

/// Two-sided tail probability of |Z| >= |z|.
pub fn two_sided_p<S: Scalar>(z: S) -> S {
    let z = z.to_f64().expect("scalar convertible to f64").abs();
    conv(erfc_f64(z / SQRT_2))
}
