//! Ellipticity margins, splitting a locally elliptic symbol into a globally
//! elliptic part plus a part vanishing on the unit ball, and first-order
//! parametrices.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::symbol::{SeparableTerm, Symbol, SymbolKind};
use crate::cutoff::bump;
use crate::error::{Error, Result};
use crate::grid::{norm, GridSpec};
use crate::lp::smooth_step;

/// Default low-frequency cutoff radius for parametrices.
pub const DEFAULT_C2: f64 = 4.0;

fn require_scalar(a: &Symbol) -> Result<()> {
    if !a.is_scalar() {
        return Err(Error::NotElliptic {
            name: a.name().to_string(),
            reason: "only scalar symbols are handled".into(),
        });
    }
    Ok(())
}

/// `inf |a(x, xi)| / |xi|^m` over grid points `x` accepted by `keep` and
/// lattice frequencies `|xi| >= c2`, `xi != 0`, off the Nyquist planes.
pub fn ellipticity_margin_where(
    a: &Symbol,
    grid: &GridSpec,
    c2: f64,
    keep: impl Fn(&[f64]) -> bool + Sync,
) -> Result<f64> {
    require_scalar(a)?;
    let d = grid.dim();
    let m = a.order();
    let freqs: Vec<([f64; crate::grid::MAX_DIM], f64)> = (0..grid.len())
        .filter(|&i| !grid.is_nyquist(i))
        .map(|i| {
            let xi = grid.frequency(i);
            let r = norm(&xi[..d]);
            (xi, r)
        })
        .filter(|(_, r)| *r >= c2 && *r > 0.0)
        .collect();
    let points: Vec<usize> = if a.kind() == SymbolKind::Multiplier {
        vec![0]
    } else {
        (0..grid.len()).filter(|&g| keep(&grid.point(g)[..d])).collect()
    };
    let margin = points
        .par_iter()
        .map(|&g| {
            let x = grid.point(g);
            freqs
                .iter()
                .map(|(xi, r)| a.eval(&x[..d], &xi[..d]).norm() / r.powf(m))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(if margin.is_finite() { margin } else { 0.0 })
}

/// `inf |a(x, xi)| / |xi|^m` over all grid points and lattice `|xi| >= c2`.
/// A positive value certifies ellipticity on the sampled lattice.
pub fn ellipticity_margin(a: &Symbol, grid: &GridSpec, c2: f64) -> Result<f64> {
    ellipticity_margin_where(a, grid, c2, |_| true)
}

/// `L = E + M` with `E` globally elliptic and `M` vanishing for `x` in the
/// ball of radius `radius` around the origin.
#[derive(Debug, Clone)]
pub struct EllipticSplit {
    pub e: Symbol,
    pub m: Symbol,
    pub radius: f64,
    /// Ellipticity margin of `E` on the sampling grid.
    pub margin: f64,
}

/// Freeze the coefficients of `l` at the origin outside `B_2`:
/// `E = kappa L(x, xi) + (1 - kappa) L(0, xi)` with `kappa` equal to 1 on
/// `B_1` and 0 outside `B_2`.
pub fn split_elliptic(l: &Symbol, grid: &GridSpec, c2: f64) -> Result<EllipticSplit> {
    require_scalar(l)?;
    let radius = 1.0;
    let d = grid.dim();
    let local = ellipticity_margin_where(l, grid, c2, |x| {
        x.iter()
            .map(|&a| crate::grid::wrap_centered(a).powi(2))
            .sum::<f64>()
            .sqrt()
            <= radius
    })?;
    if local <= 0.0 {
        return Err(Error::NotElliptic {
            name: l.name().to_string(),
            reason: "not elliptic on the unit ball".into(),
        });
    }
    if l.kind() == SymbolKind::Multiplier {
        return Ok(EllipticSplit {
            e: l.clone(),
            m: Symbol::zero(format!("{}-remainder", l.name()), l.order()),
            radius,
            margin: local,
        });
    }
    let origin = vec![0.0; d];
    let (e, m) = match l.separable_terms() {
        Some(terms) => {
            let mut e_terms = Vec::with_capacity(terms.len());
            let mut m_terms = Vec::with_capacity(terms.len());
            for t in terms {
                let at0 = (t.space)(&origin);
                let b = t.space.clone();
                let b2 = t.space.clone();
                e_terms.push(SeparableTerm {
                    space: Arc::new(move |x: &[f64]| {
                        let k = bump(x, radius);
                        b(x) * k + at0 * (1.0 - k)
                    }),
                    freq: t.freq.clone(),
                });
                m_terms.push(SeparableTerm {
                    space: Arc::new(move |x: &[f64]| (b2(x) - at0) * (1.0 - bump(x, radius))),
                    freq: t.freq.clone(),
                });
            }
            (
                Symbol::separable(format!("{}-elliptic", l.name()), l.order(), e_terms),
                Symbol::separable(format!("{}-remainder", l.name()), l.order(), m_terms),
            )
        }
        None => {
            let l1 = l.clone();
            let l2 = l.clone();
            let o1 = origin.clone();
            let o2 = origin;
            (
                Symbol::general(format!("{}-elliptic", l.name()), l.order(), move |x, xi| {
                    let k = bump(x, radius);
                    l1.eval(x, xi) * k + l1.eval(&o1, xi) * (1.0 - k)
                }),
                Symbol::general(format!("{}-remainder", l.name()), l.order(), move |x, xi| {
                    (l2.eval(x, xi) - l2.eval(&o2, xi)) * (1.0 - bump(x, radius))
                }),
            )
        }
    };
    let margin = ellipticity_margin(&e, grid, c2)?;
    if margin <= 0.0 {
        return Err(Error::NotElliptic {
            name: l.name().to_string(),
            reason: "frozen-coefficient extension loses ellipticity".into(),
        });
    }
    Ok(EllipticSplit { e, m, radius, margin })
}

/// Smooth high-pass: 0 for `|xi| <= c2/2`, 1 for `|xi| >= c2`; identically
/// 1 when `c2 = 0`.
pub fn high_pass(radius: f64, c2: f64) -> f64 {
    if c2 <= 0.0 {
        1.0
    } else {
        smooth_step((radius - c2 / 2.0) / (c2 / 2.0))
    }
}

fn safe_inverse(v: Complex64) -> Complex64 {
    if v == Complex64::default() {
        Complex64::default()
    } else {
        v.inv()
    }
}

/// First-order parametrix `b = chi_{>=c2}(xi) / e(x, xi)` of an elliptic
/// symbol. Sites where `e` vanishes (the mean mode of homogeneous symbols)
/// map to zero.
pub fn parametrix(e: &Symbol, grid: &GridSpec, c2: f64) -> Result<Symbol> {
    require_scalar(e)?;
    let margin = ellipticity_margin(e, grid, c2.max(1.0))?;
    if margin <= 0.0 {
        return Err(Error::NotElliptic {
            name: e.name().to_string(),
            reason: format!("no positive lower bound beyond |xi| = {c2}"),
        });
    }
    let name = format!("parametrix({})", e.name());
    let order = -e.order();
    if e.kind() == SymbolKind::Multiplier {
        let e = e.clone();
        return Ok(Symbol::multiplier(name, order, move |xi| {
            safe_inverse(e.eval(&[], xi)) * high_pass(norm(xi), c2)
        }));
    }
    if let Some([t]) = e.separable_terms() {
        let (b, c) = (t.space.clone(), t.freq.clone());
        return Ok(Symbol::separable(
            name,
            order,
            vec![SeparableTerm {
                space: Arc::new(move |x: &[f64]| safe_inverse(b(x))),
                freq: Arc::new(move |xi: &[f64]| safe_inverse(c(xi)) * high_pass(norm(xi), c2)),
            }],
        ));
    }
    let e = e.clone();
    Ok(Symbol::general(name, order, move |x, xi| {
        safe_inverse(e.eval(x, xi)) * high_pass(norm(xi), c2)
    }))
}
