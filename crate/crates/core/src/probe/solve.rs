use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

use super::equation::EquationSpec;

/// Consecutive growing residuals after which the iteration is abandoned.
const GROWTH_LIMIT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveOptions {
    /// Stop once `||residual||_2 <= tol ||f||_2`.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Manufactured {
    pub u: SpectralField,
    pub forcing: SpectralField,
    pub iterations: usize,
    /// Relative `L^2` residual of the returned `u`.
    pub residual: f64,
}

/// Solve `L u + P(V(u) Q u) = f` for a small smooth forcing by the Picard
/// iteration `u <- L^{-1}(f - P(V(u) Q u))`.
pub fn manufactured_solution(
    spec: &EquationSpec,
    grid: GridSpec,
    opts: SolveOptions,
) -> Result<Manufactured> {
    if grid.dim() != spec.dim {
        return Err(Error::InvalidParams(format!(
            "equation is posed in dimension {} but the grid has dimension {}",
            spec.dim,
            grid.dim()
        )));
    }
    spec.validate()?;
    let f = spec.forcing(grid)?;
    let scale = f.coefficient_norm();
    let mut u = spec.solve_linear(&f)?;
    if scale == 0.0 {
        return Ok(Manufactured {
            u,
            forcing: f,
            iterations: 0,
            residual: 0.0,
        });
    }
    let mut last = f64::INFINITY;
    let mut growing = 0;
    for it in 1..=opts.max_iterations {
        let res = spec.residual(&u, &f)?.coefficient_norm() / scale;
        if res <= opts.tol {
            return Ok(Manufactured {
                u,
                forcing: f,
                iterations: it - 1,
                residual: res,
            });
        }
        growing = if res > last { growing + 1 } else { 0 };
        if growing >= GROWTH_LIMIT || !res.is_finite() {
            return Err(Error::NonContraction(format!(
                "residual grew for {growing} consecutive steps, reaching {res:.3e}; lower the amplitude"
            )));
        }
        last = res;
        u = spec.solve_linear(&f.sub(&spec.nonlinearity(&u)?)?)?;
    }
    Err(Error::NonContraction(format!(
        "no convergence to {:.1e} within {} iterations (last residual {last:.3e})",
        opts.tol, opts.max_iterations
    )))
}
