//! Quantization `(A f)(x) = sum_xi e^{i x.xi} a(x, xi) fhat(xi)`.
//!
//! Multipliers act coefficient-wise, multiplications act on samples, and
//! general scalar symbols use their separable form when one is present.
//! The direct double sum stays available as a reference path.

use num_complex::Complex64;
use rayon::prelude::*;

use super::symbol::{Symbol, SymbolKind};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

/// Largest number of symbol evaluations the direct path will attempt.
pub const DIRECT_LIMIT: u128 = 1 << 28;

fn check_order(a: &Symbol, grid: &GridSpec) -> Result<()> {
    let growth = grid.max_frequency_norm().powf(a.order());
    if !growth.is_finite() || growth > 1e300 {
        return Err(Error::OrderOverflow {
            name: a.name().to_string(),
            order: a.order(),
        });
    }
    Ok(())
}

/// Output layout for a `rows x cols` symbol acting on `comps` components:
/// a matrix-vector product when `cols == comps`, otherwise an outer
/// broadcast for `cols == 1` with output component `r * comps + i`.
fn output_components(a: &Symbol, comps: usize) -> Result<usize> {
    let (rows, cols) = a.shape();
    if cols == comps {
        Ok(rows)
    } else if cols == 1 {
        Ok(rows * comps)
    } else {
        Err(Error::ComponentMismatch(format!(
            "symbol '{}' of shape {rows}x{cols} cannot act on {comps} component(s)",
            a.name()
        )))
    }
}

/// Coefficients with every Nyquist site cleared.
fn coefficients_without_nyquist(f: &SpectralField) -> Vec<Complex64> {
    let grid = f.grid();
    let len = grid.len();
    let mut spec = f.spectral().into_owned();
    for (i, v) in spec.iter_mut().enumerate() {
        if grid.is_nyquist(i % len) {
            *v = Complex64::default();
        }
    }
    spec
}

fn check_finite(a: &Symbol, values: &[Complex64]) -> Result<()> {
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::OrderOverflow {
            name: a.name().to_string(),
            order: a.order(),
        });
    }
    Ok(())
}

/// Apply `a` to `f`, choosing the cheapest exact path.
pub fn apply(a: &Symbol, f: &SpectralField) -> Result<SpectralField> {
    let grid = *f.grid();
    check_order(a, &grid)?;
    match a.kind() {
        SymbolKind::Multiplier => apply_multiplier(a, f),
        SymbolKind::Multiplication => apply_separable(a, f),
        SymbolKind::General if a.separable_terms().is_some() => apply_separable(a, f),
        SymbolKind::General => apply_direct(a, f),
    }
}

fn apply_multiplier(a: &Symbol, f: &SpectralField) -> Result<SpectralField> {
    let grid = *f.grid();
    let comps = f.components();
    let out_comps = output_components(a, comps)?;
    let (rows, cols) = a.shape();
    let len = grid.len();
    let spec = coefficients_without_nyquist(f);
    let x0 = [0.0; crate::grid::MAX_DIM];
    let d = grid.dim();
    let entry = a.entry_fn();
    let mut out = vec![Complex64::default(); out_comps * len];
    // Site-major evaluation, then scattered into component-major storage.
    let per_site: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|i| {
            let xi = grid.frequency(i);
            let mut vals = vec![Complex64::default(); out_comps];
            if grid.is_nyquist(i) {
                return vals;
            }
            if cols == comps {
                for r in 0..rows {
                    let mut acc = Complex64::default();
                    for c in 0..cols {
                        let v = spec[c * len + i];
                        if v != Complex64::default() {
                            acc += entry(&x0[..d], &xi[..d], r, c) * v;
                        }
                    }
                    vals[r] = acc;
                }
            } else {
                for r in 0..rows {
                    let m = entry(&x0[..d], &xi[..d], r, 0);
                    for c in 0..comps {
                        vals[r * comps + c] = m * spec[c * len + i];
                    }
                }
            }
            vals
        })
        .collect();
    for (i, vals) in per_site.into_iter().enumerate() {
        for (o, v) in vals.into_iter().enumerate() {
            out[o * len + i] = v;
        }
    }
    check_finite(a, &out)?;
    SpectralField::from_spectral(grid, out_comps, out)
}

/// `sum_t b_t(x) * IFFT(c_t(xi) fhat)` evaluated on the grid.
fn apply_separable(a: &Symbol, f: &SpectralField) -> Result<SpectralField> {
    let terms = a
        .separable_terms()
        .expect("separable path requires terms");
    let grid = *f.grid();
    let comps = f.components();
    output_components(a, comps)?;
    let len = grid.len();
    let d = grid.dim();
    let spec = coefficients_without_nyquist(f);
    let mut out = vec![Complex64::default(); comps * len];
    for t in terms {
        let c_vals: Vec<Complex64> = (0..len)
            .into_par_iter()
            .map(|i| {
                if grid.is_nyquist(i) {
                    Complex64::default()
                } else {
                    (t.freq)(&grid.frequency(i)[..d])
                }
            })
            .collect();
        let b_vals: Vec<Complex64> = (0..len)
            .into_par_iter()
            .map(|i| (t.space)(&grid.point(i)[..d]))
            .collect();
        let filtered: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(k, v)| v * c_vals[k % len])
            .collect();
        let phys = SpectralField::from_spectral(grid, comps, filtered)?.into_physical();
        for (k, v) in phys.into_iter().enumerate() {
            out[k] += b_vals[k % len] * v;
        }
    }
    check_finite(a, &out)?;
    SpectralField::from_physical(grid, comps, out)
}

/// Direct double sum over grid points and lattice frequencies. Scalar
/// symbols only; cost `N^{2n}` symbol evaluations.
pub fn apply_direct(a: &Symbol, f: &SpectralField) -> Result<SpectralField> {
    let grid = *f.grid();
    check_order(a, &grid)?;
    let (rows, cols) = a.shape();
    if rows != 1 || cols != 1 {
        return apply_multiplier_checked(a, f);
    }
    let len = grid.len();
    let cost = (len as u128) * (len as u128);
    if cost > DIRECT_LIMIT {
        return Err(Error::QuantizationTooLarge {
            name: a.name().to_string(),
            cost,
            limit: DIRECT_LIMIT,
        });
    }
    let n = grid.points();
    let d = grid.dim();
    let comps = f.components();
    let spec = coefficients_without_nyquist(f);
    let roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let active: Vec<usize> = (0..len).filter(|&i| !grid.is_nyquist(i)).collect();
    let freqs: Vec<[f64; crate::grid::MAX_DIM]> = (0..len).map(|i| grid.frequency(i)).collect();
    let out: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|g| {
            let x = grid.point(g);
            let gm = grid.multi_index(g);
            let mut acc = vec![Complex64::default(); comps];
            for &i in &active {
                let im = grid.multi_index(i);
                let mut phase = 0usize;
                for axis in 0..d {
                    phase += gm[axis] * im[axis];
                }
                let w = roots[phase % n] * a.eval(&x[..d], &freqs[i][..d]);
                for (c, s) in acc.iter_mut().enumerate() {
                    *s += w * spec[c * len + i];
                }
            }
            acc
        })
        .collect();
    let mut phys = vec![Complex64::default(); comps * len];
    for (g, vals) in out.into_iter().enumerate() {
        for (c, v) in vals.into_iter().enumerate() {
            phys[c * len + g] = v;
        }
    }
    check_finite(a, &phys)?;
    SpectralField::from_physical(grid, comps, phys)
}

fn apply_multiplier_checked(a: &Symbol, f: &SpectralField) -> Result<SpectralField> {
    if a.kind() != SymbolKind::Multiplier {
        return Err(Error::ComponentMismatch(format!(
            "matrix symbol '{}' must be a Fourier multiplier",
            a.name()
        )));
    }
    apply_multiplier(a, f)
}
