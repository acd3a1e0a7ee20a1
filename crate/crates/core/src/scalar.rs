//! Scalar abstraction for the numeric core.
//!
//! Everything downstream of data ingestion is generic over [`Scalar`], so the
//! same estimation code runs in `f32` or `f64`. Concrete aliases for the
//! common `f64` instantiation live at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating-point scalar usable throughout the estimation pipeline.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum<Self>
    + for<'a> Sum<&'a Self>
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand conversion from an `f64` literal into the active scalar type.
#[inline]
pub fn conv<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("f64 value representable in scalar type")
}

/// Logistic function 1 / (1 + e^-x).
#[inline]
pub fn expit<S: Scalar>(x: S) -> S {
    S::one() / (S::one() + (-x).exp())
}

/// Log-odds; caller must guarantee p in (0, 1).
#[inline]
pub fn logit<S: Scalar>(p: S) -> S {
    (p / (S::one() - p)).ln()
}

/// Clamp a probability into [bound, 1 - bound].
#[inline]
pub fn clamp_prob<S: Scalar>(p: S, bound: S) -> S {
    p.max(bound).min(S::one() - bound)
}

/// Sample mean; zero for an empty slice.
pub fn mean<S: Scalar>(xs: &[S]) -> S {
    if xs.is_empty() {
        return S::zero();
    }
    xs.iter().copied().sum::<S>() / conv::<S>(xs.len() as f64)
}

/// Sample standard deviation with the n-1 denominator.
pub fn sample_sd<S: Scalar>(xs: &[S]) -> S {
    let n = xs.len();
    if n < 2 {
        return S::zero();
    }
    let m = mean(xs);
    let ss = xs.iter().map(|&x| (x - m) * (x - m)).sum::<S>();
    (ss / conv::<S>((n - 1) as f64)).sqrt()
}

/// Median of the observed values (average of the middle pair for even counts).
pub fn median<S: Scalar>(xs: &[S]) -> S {
    debug_assert!(!xs.is_empty());
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in median input"));
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / conv::<S>(2.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expit_logit_roundtrip() {
        for &p in &[0.01_f64, 0.3, 0.5, 0.99] {
            assert!((expit(logit(p)) - p).abs() < 1e-14);
        }
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[1.0_f64, 3.0]), 2.0);
        assert_eq!(median(&[3.0_f64, 1.0, 2.0]), 2.0);
    }

    #[test]
    fn works_in_f32() {
        let p: f32 = expit(0.7_f32);
        assert!((logit(p) - 0.7).abs() < 1e-5);
    }
}
