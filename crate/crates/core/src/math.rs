//! Scalar math helpers shared by the trainers.
//!
//! `f64`'s transcendental methods live in `std`, so this module routes
//! through `libm`. Using one implementation everywhere also keeps results
//! bit-identical across the deterministic and parallel training paths.

/// Logit magnitudes are clamped here before exponentiation so every loss
/// and gradient stays finite.
pub const SIGMOID_CLAMP: f64 = 30.0;

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// sigma(x) = 1 / (1 + e^-x), with x clamped to +-SIGMOID_CLAMP.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    1.0 / (1.0 + exp(-x))
}

/// ln sigma(x) under the same clamp; always finite and <= 0.
#[inline]
pub fn ln_sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    // ln(1/(1+e^-x)) = -ln(1+e^-x); e^-x <= e^30 fits comfortably in f64.
    -ln(1.0 + exp(-x))
}

/// Stable softplus ln(1 + e^z), used by the logistic-loss baseline.
#[inline]
pub fn softplus(z: f64) -> f64 {
    if z > SIGMOID_CLAMP {
        z
    } else if z < -SIGMOID_CLAMP {
        exp(z)
    } else {
        ln(1.0 + exp(z))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}
