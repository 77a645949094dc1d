//! Smooth radial cutoffs `eta_rho` on the torus: 1 on `B_rho`, 0 outside
//! `B_{2 rho}`, centered at the origin in the periodic metric.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{wrap_centered, GridSpec};
use crate::lp::smooth_step;

/// `eta_rho(x)` for a point given in any representative.
pub fn bump(x: &[f64], rho: f64) -> f64 {
    let d = x
        .iter()
        .map(|&a| wrap_centered(a).powi(2))
        .sum::<f64>()
        .sqrt();
    1.0 - smooth_step((d - rho) / rho)
}

/// `eta_rho` sampled on the grid. Requires `0 < 2 rho < pi` so the bump
/// does not reach the wrap-around seam.
pub fn cutoff_field(grid: GridSpec, rho: f64) -> Result<SpectralField> {
    if !(rho > 0.0 && 2.0 * rho < std::f64::consts::PI) {
        return Err(Error::InvalidParams(format!(
            "cutoff radius {rho} must lie in (0, pi/2)"
        )));
    }
    Ok(SpectralField::from_fn(grid, |x| Complex64::new(bump(x, rho), 0.0)))
}
