use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::partition::LpPartition;
use crate::error::{Error, Result};
use crate::field::{lp_norm, lp_norm_of_magnitudes, validate_exponent, SpectralField};

/// Per-shell norms `||P_j f||_r` for `j = 0..=top`.
#[derive(Debug, Clone, Serialize)]
pub struct DyadicNormSequence {
    pub r: f64,
    pub values: Vec<f64>,
}

impl DyadicNormSequence {
    /// CSV table with columns `j,norm,log2norm`.
    pub fn to_csv(&self) -> String {
        shell_table_csv(&self.values)
    }
}

/// CSV rendering shared by every per-shell table.
pub fn shell_table_csv(values: &[f64]) -> String {
    let mut out = String::from("j,norm,log2norm\n");
    for (j, v) in values.iter().enumerate() {
        let l = if *v > 0.0 { v.log2() } else { f64::NEG_INFINITY };
        writeln!(out, "{j},{v:.17e},{l:.17e}").expect("write to string");
    }
    out
}

pub fn dyadic_norm_sequence(
    part: &LpPartition,
    f: &SpectralField,
    r: f64,
) -> Result<DyadicNormSequence> {
    validate_exponent(r)?;
    crate::grid::ensure_same(part.grid(), f.grid())?;
    let f = f.spectral_only();
    let values = (0..=part.top())
        .into_par_iter()
        .map(|j| lp_norm(&part.project(&f, j)?, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(DyadicNormSequence { r, values })
}

/// Square-function norm
/// `(||P_0 f||_p^p + ||(sum_{j>=1} 2^{2js} |P_j f|^2)^{1/2}||_p^p)^{1/p}`.
pub fn sobolev_norm(part: &LpPartition, f: &SpectralField, s: f64, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::ExponentNotInterior(p));
    }
    crate::grid::ensure_same(part.grid(), f.grid())?;
    let f = f.spectral_only();
    let low = lp_norm(&part.project(&f, 0)?, p)?;
    let len = part.grid().len();
    // Shells are computed in parallel but summed in a fixed order so the
    // result does not depend on scheduling.
    let shells = (1..=part.top())
        .into_par_iter()
        .map(|j| -> Result<Vec<f64>> {
            let w = (2.0 * j as f64 * s).exp2();
            let m = part.project(&f, j)?.magnitudes();
            Ok(m.into_iter().map(|v| w * v * v).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut square = vec![0.0; len];
    for shell in shells {
        square.iter_mut().zip(shell).for_each(|(x, y)| *x += y);
    }
    let sq: Vec<f64> = square.into_iter().map(f64::sqrt).collect();
    let high = lp_norm_of_magnitudes(&sq, p);
    Ok((low.powf(p) + high.powf(p)).powf(1.0 / p))
}

/// `||f||_q / (2^{n j (1/p - 1/q)} ||f||_p)` for `f` with spectrum in `B_{2^j}`.
pub fn bernstein_ratio(f: &SpectralField, j: usize, p: f64, q: f64) -> Result<f64> {
    validate_exponent(p)?;
    validate_exponent(q)?;
    if q < p {
        return Err(Error::InvalidParams(format!("need p <= q, got p={p}, q={q}")));
    }
    let grid = *f.grid();
    let radius = (j as f64).exp2();
    let spec = f.spectral();
    let norms = grid.frequency_norms();
    let len = grid.len();
    let peak = spec.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let tol = 1e-12 * peak;
    for (i, v) in spec.iter().enumerate() {
        let r = norms[i % len];
        if r > radius && v.norm() > tol {
            return Err(Error::SupportViolation { radius, found: r });
        }
    }
    let inv = |t: f64| if t.is_infinite() { 0.0 } else { 1.0 / t };
    let scale = (grid.dim() as f64 * j as f64 * (inv(p) - inv(q))).exp2();
    let np = lp_norm(f, p)?;
    if np == 0.0 {
        return Ok(0.0);
    }
    Ok(lp_norm(f, q)? / (scale * np))
}
