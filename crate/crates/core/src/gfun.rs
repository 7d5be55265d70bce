//! The orientation-average function
//!
//! ```text
//! g(r) = ∫₀¹ r u² / (1 + (r − 1) u²) du,     r > 0,
//! ```
//!
//! which is increasing, maps (0, ∞) onto (0, 1), and has g(1) = 1/3.

use crate::error::{Error, Result};

// Below this |r − 1| the closed forms lose digits to cancellation.
const SERIES_WINDOW: f64 = 0.25;
const SERIES_TERMS: usize = 40;

/// Evaluates g(r). Errors on non-positive or non-finite `r`.
pub fn g(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidInput(format!("g(r) needs finite r > 0, got {r}")));
    }
    Ok(g_unchecked(r))
}

pub(crate) fn g_unchecked(r: f64) -> f64 {
    if (r - 1.0).abs() <= SERIES_WINDOW {
        series(r)
    } else {
        closed(r)
    }
}

// r Σ (−k)ⁿ / (2n + 3) with k = r − 1, summed from the small end
fn series(r: f64) -> f64 {
    let k = r - 1.0;
    let mut sum = 0.0;
    for n in (0..SERIES_TERMS).rev() {
        sum = sum * (-k) + 1.0 / (2 * n + 3) as f64;
    }
    r * sum
}

fn closed(r: f64) -> f64 {
    let k = r - 1.0;
    let f = if k > 0.0 {
        let s = k.sqrt();
        s.atan() / s
    } else {
        let s = (-k).sqrt();
        // atanh(s)/s, written to stay accurate as r → 0
        (2.0 * s.ln_1p() - r.ln()) / (2.0 * s)
    };
    r / k * (1.0 - f)
}
