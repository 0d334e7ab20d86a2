//! Scalar abstractions shared by the closed-form evaluators.
//!
//! Two families are used:
//!
//! * [`Real`]: floating point types (`f32`, `f64`) for log-domain and
//!   transcendental work (thresholds, giant-component envelopes, root finding).
//! * [`Field`]: anything closed under `+ - * /` that can represent small
//!   integer ratios exactly or approximately. This covers the floats as well as
//!   [`num_rational::BigRational`], which lets the product-form probabilities be
//!   evaluated without any rounding at all.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num};

/// Floating point scalar used by the log-domain evaluators.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {
    /// Lossy conversion from an index/count.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable as float")
    }

    /// Lossy conversion from `f64` literals.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Number type able to carry exact (or best-effort) ratios of integers.
pub trait Field: Num + Clone + PartialOrd + Debug {
    /// The ratio `num / den`; `den` must be nonzero.
    fn ratio(num: u128, den: u128) -> Self;

    /// Converts a probability given as `f64`. Exact for [`BigRational`], which
    /// represents every finite double as a dyadic rational.
    fn from_prob(p: f64) -> Self;

    fn to_f64(&self) -> f64;
}

impl Field for f64 {
    fn ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn from_prob(p: f64) -> Self {
        p
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Field for f32 {
    fn ratio(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn from_prob(p: f64) -> Self {
        p as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Field for BigRational {
    fn ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_prob(p: f64) -> Self {
        BigRational::from_float(p).expect("finite probability")
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `base^exp` by repeated squaring, for any [`Field`].
pub(crate) fn powi<T: Field>(base: &T, mut exp: u64) -> T {
    let mut acc = T::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b.clone();
        }
        exp >>= 1;
        if exp > 0 {
            b = b.clone() * b;
        }
    }
    acc
}

/// Exact `C(a, b)` as `u128`; zero when `b > a`. Panics on overflow, which only
/// happens far outside the sizes the exact routes are meant for.
pub(crate) fn choose_u128(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc
            .checked_mul(u128::from(a - i))
            .expect("binomial overflow")
            / u128::from(i + 1);
    }
    acc
}

/// `C(a, k) / C(b, k)` for `a <= b`, as an element of `T`.
pub(crate) fn choose_ratio<T: Field>(a: u64, b: u64, k: u64) -> T {
    let den = choose_u128(b, k);
    if den == 0 {
        return T::zero();
    }
    T::ratio(choose_u128(a, k), den)
}
