use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fit::{log2_slope, LineFit};
use crate::lp::{dyadic_norm_sequence, LpPartition};

/// Shell values below this are treated as numerically zero and dropped.
pub const NEGLIGIBLE: f64 = 1e-14;
/// Allowed shortfall of the measured gain against the predicted one.
pub const GAIN_TOLERANCE: f64 = 0.1;
/// Fewest shells a decay window may contain.
pub const MIN_WINDOW: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub sigma: f64,
    pub r: f64,
    pub window: (usize, usize),
    /// `a_k = 2^{sigma k} ||P_k u||_r` for `k = 0..=top`.
    pub a: Vec<f64>,
    /// Window shells that entered the fit.
    pub fitted: Vec<usize>,
    /// Window shells dropped as negligible.
    pub dropped: Vec<usize>,
    pub fit: Option<LineFit>,
    /// `-slope`; infinite when every window shell is negligible.
    pub epsilon_measured: f64,
    pub epsilon_theory: f64,
    pub pass: bool,
}

/// The default fitting window `[2, min(top - 2, resolved)]`.
pub fn default_window(part: &LpPartition) -> (usize, usize) {
    (2, part.top().saturating_sub(2).min(part.resolved()))
}

/// Fit the decay rate of `a_k = 2^{sigma k} ||P_k u||_r` over `window` and
/// compare it with `epsilon_theory`.
pub fn dyadic_decay_report(
    part: &LpPartition,
    u: &SpectralField,
    sigma: f64,
    r: f64,
    window: (usize, usize),
    epsilon_theory: f64,
) -> Result<DecayReport> {
    let (lo, hi) = window;
    let max_hi = part.top().saturating_sub(2);
    if lo < 2 || hi > max_hi || hi < lo || hi - lo + 1 < MIN_WINDOW {
        return Err(Error::InvalidWindow(format!(
            "window [{lo}, {hi}] must lie in [2, {max_hi}] and hold at least {MIN_WINDOW} shells; \
             use a larger grid"
        )));
    }
    let seq = dyadic_norm_sequence(part, u, r)?;
    let a: Vec<f64> = seq
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (sigma * k as f64).exp2() * v)
        .collect();
    let (fitted, dropped): (Vec<usize>, Vec<usize>) = (lo..=hi).partition(|&k| a[k] >= NEGLIGIBLE);
    let values: Vec<f64> = fitted.iter().map(|&k| a[k]).collect();
    let fit = log2_slope(&fitted, &values);
    let epsilon_measured = match (&fit, fitted.len()) {
        (Some(f), _) => -f.slope,
        // Everything beyond the first shell vanished: faster than any rate.
        (None, n) if n <= 1 => f64::INFINITY,
        (None, _) => f64::NAN,
    };
    Ok(DecayReport {
        sigma,
        r,
        window,
        a,
        fitted,
        dropped,
        fit,
        epsilon_measured,
        epsilon_theory,
        pass: epsilon_measured >= epsilon_theory - GAIN_TOLERANCE,
    })
}
