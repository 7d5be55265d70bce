//! Limit extrapolation and convergence-order estimates for sequences
//! sampled at step sizes h → 0, modelled as `F(h) = L + K hᵖ + …`.

use crate::error::{Error, Result};

/// Two-point Richardson extrapolation assuming an error of order `p`.
pub fn richardson(h_coarse: f64, f_coarse: f64, h_fine: f64, f_fine: f64, p: f64) -> f64 {
    let r = (h_coarse / h_fine).powf(p);
    (r * f_fine - f_coarse) / (r - 1.0)
}

/// Observed order from three samples with `h1 > h2 > h3 > 0`, without
/// knowing the limit. The step ratios need not be equal; `p` solves
/// `(F1 − F2)/(F2 − F3) = (h1ᵖ − h2ᵖ)/(h2ᵖ − h3ᵖ)` by bisection on
/// `[1e-3, 20]`. Errors if the differences change sign (non-monotone data)
/// or the root is not bracketed.
pub fn observed_order(h: [f64; 3], f: [f64; 3]) -> Result<f64> {
    if !(h[0] > h[1] && h[1] > h[2] && h[2] > 0.0) {
        return Err(Error::InvalidInput("steps must be strictly decreasing and positive".into()));
    }
    let (d1, d2) = (f[0] - f[1], f[1] - f[2]);
    if d2 == 0.0 || d1 / d2 <= 0.0 {
        return Err(Error::InvalidInput("samples are not monotone; order undefined".into()));
    }
    let target = (d1 / d2).ln();
    let phi = |p: f64| {
        let (a, b, c) = (h[0].powf(p), h[1].powf(p), h[2].powf(p));
        ((a - b) / (b - c)).ln() - target
    };
    let (mut lo, mut hi) = (1e-3, 20.0);
    let (flo, fhi) = (phi(lo), phi(hi));
    if flo.signum() == fhi.signum() {
        return Err(Error::InvalidInput("convergence order outside [1e-3, 20]".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid).signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
