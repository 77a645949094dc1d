//! Shell mapping ratios, commutators with Littlewood-Paley projections and
//! with cutoffs, and the remainder symbol of `P_k A`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quantize::apply;
use super::symbol::{Symbol, SymbolKind};
use crate::error::Result;
use crate::field::{lp_norm, SpectralField};
use crate::fit::{log2_slope, LineFit};
use crate::grid::{norm, GridSpec, MAX_DIM};
use crate::lp::{profile, LpPartition};
use crate::product::pointwise_product;

/// `||A P_k f||_p / (2^{k m} ||P_{k-1 <= . <= k+1} f||_p)`, or `None` when
/// the denominator vanishes.
pub fn ap_shell_ratio(
    part: &LpPartition,
    a: &Symbol,
    f: &SpectralField,
    k: usize,
    p: f64,
) -> Result<Option<f64>> {
    let pk = part.project(f, k)?;
    let num = lp_norm(&apply(a, &pk)?, p)?;
    let den = lp_norm(&part.project_window(f, k.saturating_sub(1), k + 1)?, p)?
        * (k as f64 * a.order()).exp2();
    Ok((den > 0.0).then(|| num / den))
}

/// `(P_k A - A P_k) f`.
pub fn commutator_field(
    part: &LpPartition,
    a: &Symbol,
    f: &SpectralField,
    k: usize,
) -> Result<SpectralField> {
    let left = part.project(&apply(a, f)?, k)?;
    let right = apply(a, &part.project(f, k)?)?;
    left.sub(&right)
}

/// `||(P_k A - A P_k) f||_p`; exactly zero for Fourier multipliers.
pub fn commutator_shell(
    part: &LpPartition,
    a: &Symbol,
    f: &SpectralField,
    k: usize,
    p: f64,
) -> Result<f64> {
    if a.kind() == SymbolKind::Multiplier {
        part.multiplier(k)?;
        return Ok(0.0);
    }
    lp_norm(&commutator_field(part, a, f, k)?, p)
}

/// `eta * (A f) - A (eta * f)` with dealiased products.
pub fn cutoff_commutator(a: &Symbol, eta: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
    let left = pointwise_product(eta, &apply(a, f)?)?;
    let right = apply(a, &pointwise_product(eta, f)?)?;
    left.sub(&right)
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellSlopeReport {
    pub shells: Vec<usize>,
    /// Per-shell ratio `||P_k g||_2 / ||P_{k-1 <= . <= k+1} f||_2`.
    pub ratios: Vec<f64>,
    pub fit: Option<LineFit>,
}

/// Per-shell size of `g` relative to the matching shells of `f`, with the
/// fitted log2 slope against `k`.
pub fn relative_shell_slope(
    part: &LpPartition,
    g: &SpectralField,
    f: &SpectralField,
    shells: &[usize],
) -> Result<ShellSlopeReport> {
    let ratios = shells
        .par_iter()
        .map(|&k| -> Result<f64> {
            let num = lp_norm(&part.project(g, k)?, 2.0)?;
            let den = lp_norm(&part.project_window(f, k.saturating_sub(1), k + 1)?, 2.0)?;
            Ok(if den > 0.0 { num / den } else { f64::NAN })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = log2_slope(shells, &ratios);
    Ok(ShellSlopeReport {
        shells: shells.to_vec(),
        ratios,
        fit,
    })
}

/// Decay of the cutoff commutator `[eta, A]` shell by shell; for an order-`m`
/// symbol the slope should not exceed `m - 1` by much.
pub fn cutoff_commutator_order(
    part: &LpPartition,
    a: &Symbol,
    eta: &SpectralField,
    f: &SpectralField,
    shells: &[usize],
) -> Result<ShellSlopeReport> {
    let c = cutoff_commutator(a, eta, f)?;
    relative_shell_slope(part, &c, f, shells)
}

/// Maxima of the remainder symbol `rho_k` over the three frequency regimes.
#[derive(Debug, Clone, Serialize)]
pub struct RemainderReport {
    pub k: usize,
    /// `max |rho_k|` on `2^{k-3} <= |xi| <= 2^{k+3}`.
    pub near: f64,
    /// `max |rho_k| / (1 + |xi|)^{m-1}` on the same band.
    pub near_normalized: f64,
    /// `max |rho_k|` on `|xi| > 2^{k+3}`.
    pub high: f64,
    /// `max |rho_k|` on `|xi| < 2^{k-3}`.
    pub low: f64,
    /// Scale of the symbol on the sampled set, for roundoff comparisons.
    pub symbol_scale: f64,
}

/// Remainder `rho_k(x, xi) = sum_eta e^{i x.eta} (phi_k(xi + eta) - phi_k(xi)) ahat(eta, xi)`
/// of the composition `P_k A`, where `ahat` is the Fourier transform of `a`
/// in `x` on `grid`. Frequencies are sampled along the first axis,
/// `xi = t e_1` with integer `|t| <= xi_max`.
pub fn commutator_symbol_remainder(
    a: &Symbol,
    grid: &GridSpec,
    k: usize,
    xi_max: i64,
) -> Result<RemainderReport> {
    let d = grid.dim();
    let len = grid.len();
    let etas: Vec<[f64; MAX_DIM]> = (0..len).map(|i| grid.frequency(i)).collect();
    let points: Vec<[f64; MAX_DIM]> = (0..len).map(|i| grid.point(i)).collect();
    let m = a.order();
    let lo_edge = (k as f64 - 3.0).exp2();
    let hi_edge = (k as f64 + 3.0).exp2();
    let per_xi: Vec<(f64, f64, f64)> = (-xi_max..=xi_max)
        .into_par_iter()
        .map(|t| -> Result<(f64, f64, f64)> {
            let mut xi = [0.0; MAX_DIM];
            xi[0] = t as f64;
            let r = norm(&xi[..d]);
            let samples: Vec<Complex64> = points.iter().map(|x| a.eval(&x[..d], &xi[..d])).collect();
            let scale = samples.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let field = SpectralField::from_physical(*grid, 1, samples)?;
            let base = profile(k, r);
            let weighted: Vec<Complex64> = field
                .spectral()
                .iter()
                .zip(&etas)
                .map(|(c, eta)| {
                    let mut s = [0.0; MAX_DIM];
                    for axis in 0..d {
                        s[axis] = xi[axis] + eta[axis];
                    }
                    c * (profile(k, norm(&s[..d])) - base)
                })
                .collect();
            let rho = SpectralField::from_spectral(*grid, 1, weighted)?.max_abs();
            Ok((r, rho, scale))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = RemainderReport {
        k,
        near: 0.0,
        near_normalized: 0.0,
        high: 0.0,
        low: 0.0,
        symbol_scale: 0.0,
    };
    for (r, rho, scale) in per_xi {
        report.symbol_scale = report.symbol_scale.max(scale);
        if r > hi_edge {
            report.high = report.high.max(rho);
        } else if r < lo_edge {
            report.low = report.low.max(rho);
        } else {
            report.near = report.near.max(rho);
            report.near_normalized = report.near_normalized.max(rho / (1.0 + r).powf(m - 1.0));
        }
    }
    Ok(report)
}
