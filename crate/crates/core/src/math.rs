//! Scalar helpers that `core` does not provide on stable.

// Unused at call sites whenever std is linked: inherent float methods win.
pub(crate) use num_traits::Float;

use core::f64::consts::TAU;

/// Wraps `x` into `[0, 2π)`.
pub(crate) fn wrap_positive(x: f64) -> f64 {
    let w = x - TAU * (x / TAU).floor();
    if w >= TAU {
        0.0
    } else {
        w
    }
}
