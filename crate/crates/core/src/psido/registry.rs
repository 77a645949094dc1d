//! Built-in symbols and the name registry used by configuration files and
//! the command line.
//!
//! Names: `identity`, `laplacian` (`|xi|^2`, i.e. `-Delta`), `bilaplacian`,
//! `fractional_laplacian:<s>` (`|xi|^{2s}`), `bessel:<m>` (`(1+|xi|^2)^{m/2}`),
//! `grad` (column of `i xi_j`), `grad:<i>` (`i xi_i`, axes counted from 1),
//! `div`, `leray`, and `sep:<terms>` for separable scalar symbols.
//!
//! A `sep:` body is a `;`-separated list of `<space>*<freq>` terms. The space
//! factor is `1`, `cos<i>`, `sin<i>` or `expcos<i>`, optionally preceded by a
//! constant and `+` (as in `2+sin1`). The frequency factor is `1`, `abs^<m>`
//! (`|xi|^m`) or `bessel^<m>`. Example: `sep:2+sin1*bessel^2;cos2*abs^1`.

use num_complex::Complex64;

use super::symbol::{SeparableTerm, Symbol};
use crate::error::{Error, Result};
use crate::grid::norm;

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

pub fn identity() -> Symbol {
    Symbol::multiplier("identity", 0.0, |_| re(1.0))
}

/// `|xi|^2`, the symbol of `-Delta`.
pub fn laplacian() -> Symbol {
    Symbol::multiplier("laplacian", 2.0, |xi| re(xi.iter().map(|a| a * a).sum()))
}

/// `|xi|^4`, the symbol of `Delta^2`.
pub fn bilaplacian() -> Symbol {
    Symbol::multiplier("bilaplacian", 4.0, |xi| {
        let s: f64 = xi.iter().map(|a| a * a).sum();
        re(s * s)
    })
}

/// `|xi|^{2s}`, the symbol of `(-Delta)^s`; zero at the origin.
pub fn fractional_laplacian(s: f64) -> Symbol {
    Symbol::multiplier(format!("fractional_laplacian:{s}"), 2.0 * s, move |xi| {
        let r = norm(xi);
        re(if r == 0.0 { 0.0 } else { r.powf(2.0 * s) })
    })
}

/// `|xi|^m`; zero at the origin.
pub fn homogeneous(m: f64) -> Symbol {
    Symbol::multiplier(format!("abs^{m}"), m, move |xi| {
        let r = norm(xi);
        re(if r == 0.0 { 0.0 } else { r.powf(m) })
    })
}

/// `(1 + |xi|^2)^{m/2}`.
pub fn bessel(m: f64) -> Symbol {
    Symbol::multiplier(format!("bessel:{m}"), m, move |xi| {
        re((1.0 + xi.iter().map(|a| a * a).sum::<f64>()).powf(m / 2.0))
    })
}

/// `i xi_axis` (axis counted from 0), the symbol of `d/dx_axis`.
pub fn partial(axis: usize) -> Symbol {
    Symbol::multiplier(format!("grad:{}", axis + 1), 1.0, move |xi| {
        Complex64::new(0.0, xi[axis])
    })
}

/// Gradient as a `dim x 1` multiplier.
pub fn gradient(dim: usize) -> Symbol {
    Symbol::matrix_multiplier("grad", 1.0, dim, 1, |xi, r, _| Complex64::new(0.0, xi[r]))
}

/// Divergence as a `1 x dim` multiplier.
pub fn divergence(dim: usize) -> Symbol {
    Symbol::matrix_multiplier("div", 1.0, 1, dim, |xi, _, c| Complex64::new(0.0, xi[c]))
}

/// Leray projector `I - xi xi^T / |xi|^2`, the identity at `xi = 0`.
pub fn leray(dim: usize) -> Symbol {
    Symbol::matrix_multiplier("leray", 0.0, dim, dim, |xi, r, c| {
        let delta = if r == c { 1.0 } else { 0.0 };
        let s: f64 = xi.iter().map(|a| a * a).sum();
        re(if s == 0.0 { delta } else { delta - xi[r] * xi[c] / s })
    })
}

/// Look up a symbol by registry name for a `dim`-dimensional grid.
pub fn lookup(name: &str, dim: usize) -> Result<Symbol> {
    let unknown = || Error::UnknownSymbol(name.to_string());
    let parse_f = |s: &str| s.trim().parse::<f64>().map_err(|_| unknown());
    match name {
        "identity" => return Ok(identity()),
        "laplacian" => return Ok(laplacian()),
        "bilaplacian" => return Ok(bilaplacian()),
        "grad" => return Ok(gradient(dim)),
        "div" => return Ok(divergence(dim)),
        "leray" => {
            if dim < 2 {
                return Err(Error::InvalidParams("the Leray projector needs n >= 2".into()));
            }
            return Ok(leray(dim));
        }
        _ => {}
    }
    if let Some(rest) = name.strip_prefix("fractional_laplacian:") {
        return Ok(fractional_laplacian(parse_f(rest)?));
    }
    if let Some(rest) = name.strip_prefix("bessel:") {
        return Ok(bessel(parse_f(rest)?));
    }
    if let Some(rest) = name.strip_prefix("grad:") {
        let i: usize = rest.trim().parse().map_err(|_| unknown())?;
        if i == 0 || i > dim {
            return Err(unknown());
        }
        return Ok(partial(i - 1));
    }
    if let Some(rest) = name.strip_prefix("sep:") {
        return parse_separable(rest, dim).map(|s| s.with_name(name));
    }
    Err(unknown())
}

fn parse_separable(body: &str, dim: usize) -> Result<Symbol> {
    let bad = |msg: &str| Error::UnknownSymbol(format!("sep:{body} ({msg})"));
    let mut terms = Vec::new();
    let mut order = f64::NEG_INFINITY;
    for raw in body.split(';') {
        let (space, freq) = raw.split_once('*').ok_or_else(|| bad("term without '*'"))?;
        let space_fn = parse_space(space.trim(), dim).ok_or_else(|| bad("space factor"))?;
        let (freq_fn, m) = parse_freq(freq.trim()).ok_or_else(|| bad("frequency factor"))?;
        order = order.max(m);
        terms.push(SeparableTerm {
            space: space_fn,
            freq: freq_fn,
        });
    }
    if terms.is_empty() {
        return Err(bad("no terms"));
    }
    Ok(Symbol::separable(format!("sep:{body}"), order, terms))
}

type Factor = super::symbol::SpaceFn;

fn parse_space(s: &str, dim: usize) -> Option<Factor> {
    let (offset, base) = match s.split_once('+') {
        Some((c, b)) => (c.trim().parse::<f64>().ok()?, b.trim()),
        None => (0.0, s),
    };
    if base == "1" {
        let v = offset + 1.0;
        return Some(std::sync::Arc::new(move |_: &[f64]| re(v)));
    }
    let (func, axis): (fn(f64) -> f64, &str) = if let Some(a) = base.strip_prefix("expcos") {
        (|t: f64| t.cos().exp(), a)
    } else if let Some(a) = base.strip_prefix("cos") {
        (f64::cos, a)
    } else if let Some(a) = base.strip_prefix("sin") {
        (f64::sin, a)
    } else {
        return None;
    };
    let axis: usize = axis.parse().ok()?;
    if axis == 0 || axis > dim {
        return None;
    }
    let i = axis - 1;
    Some(std::sync::Arc::new(move |x: &[f64]| re(offset + func(x[i]))))
}

fn parse_freq(s: &str) -> Option<(Factor, f64)> {
    if s == "1" {
        return Some((std::sync::Arc::new(|_: &[f64]| re(1.0)), 0.0));
    }
    if let Some(m) = s.strip_prefix("abs^") {
        let m: f64 = m.parse().ok()?;
        return Some((
            std::sync::Arc::new(move |xi: &[f64]| {
                let r = norm(xi);
                re(if r == 0.0 { 0.0 } else { r.powf(m) })
            }),
            m,
        ));
    }
    if let Some(m) = s.strip_prefix("bessel^") {
        let m: f64 = m.parse().ok()?;
        return Some((
            std::sync::Arc::new(move |xi: &[f64]| {
                re((1.0 + xi.iter().map(|a| a * a).sum::<f64>()).powf(m / 2.0))
            }),
            m,
        ));
    }
    None
}
