use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{check_hypotheses, ExponentInputs};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::paraproduct::Pairing;
use crate::psido::{apply, registry, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationKind {
    /// `Delta^2 u + d_1^2((d_1 u)^2) = f`.
    Biharmonic,
    /// `-Delta u + Leray((u . grad) u) = f` for a divergence-free field.
    NavierStokes,
    /// `|D|^n u + div(V grad u) = f` with `V = (|D|^3 u)^k`.
    Gjms,
    Custom,
}

impl EquationKind {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "biharmonic" | "biharmonic-toy" | "biharmonic4d-toy" => Some(Self::Biharmonic),
            "ns" | "navier-stokes" | "stationary-navier-stokes" => Some(Self::NavierStokes),
            "gjms" | "gjms-toy" => Some(Self::Gjms),
            _ => None,
        }
    }
}

/// How the coefficient `V` is obtained from the solution.
#[derive(Debug, Clone)]
pub enum Coefficient {
    /// `V = u`.
    Solution,
    /// `V = A u`.
    Operator(Symbol),
    /// `V = (A u)^k` with dealiased powers.
    Power(Symbol, u32),
}

impl Coefficient {
    pub fn evaluate(&self, u: &SpectralField) -> Result<SpectralField> {
        match self {
            Coefficient::Solution => Ok(u.clone()),
            Coefficient::Operator(a) => apply(a, u),
            Coefficient::Power(a, k) => {
                let base = apply(a, u)?;
                let mut out = base.clone();
                for _ in 1..*k {
                    out = crate::product::pointwise_product(&out, &base)?;
                }
                Ok(out)
            }
        }
    }
}

/// `L u + P(V(u) . Q u) = f` together with the regularity `(s, p)` assumed
/// for the hypothesis check and the forcing recipe.
#[derive(Debug, Clone)]
pub struct EquationSpec {
    pub kind: EquationKind,
    pub dim: usize,
    pub l: Symbol,
    pub p: Symbol,
    pub q: Symbol,
    pub coefficient: Coefficient,
    pub pairing: Pairing,
    /// Solution components.
    pub components: usize,
    pub s: f64,
    pub p_exp: f64,
    /// Target `||L^{-1} f||_inf`.
    pub amplitude: f64,
    pub seed: u64,
    /// Forcing modes live in `|xi| <= forcing_radius`.
    pub forcing_radius: f64,
}

/// Default `(s, p)` for the built-in equations: the energy-class exponents
/// in dimension 4 and order-preserving analogs in lower dimensions.
pub fn default_regularity(kind: EquationKind, dim: usize) -> (f64, f64) {
    match (kind, dim) {
        (EquationKind::NavierStokes, 2) => (1.0, 8.0 / 3.0),
        (EquationKind::NavierStokes, _) => (1.0, 2.0),
        (EquationKind::Biharmonic, 2) => (2.0, 4.0 / 3.0),
        (EquationKind::Biharmonic, _) => (2.0, 2.0),
        (EquationKind::Gjms, 4) => (2.0, 2.0),
        _ => (1.0, 2.0),
    }
}

impl EquationSpec {
    pub fn builtin(kind: EquationKind, dim: usize) -> Result<Self> {
        let (s, p_exp) = default_regularity(kind, dim);
        let base = |l, p, q, coefficient, pairing, components| Self {
            kind,
            dim,
            l,
            p,
            q,
            coefficient,
            pairing,
            components,
            s,
            p_exp,
            amplitude: 1e-2,
            seed: 1,
            forcing_radius: 6.0,
        };
        Ok(match kind {
            EquationKind::Biharmonic => base(
                registry::bilaplacian(),
                Symbol::multiplier("d1^2", 2.0, |xi| Complex64::new(-xi[0] * xi[0], 0.0)),
                registry::partial(0),
                Coefficient::Operator(registry::partial(0)),
                Pairing::Product,
                1,
            ),
            EquationKind::NavierStokes => {
                if dim < 2 {
                    return Err(Error::InvalidParams(
                        "the Navier-Stokes system needs n >= 2".into(),
                    ));
                }
                base(
                    registry::laplacian(),
                    registry::leray(dim),
                    registry::gradient(dim),
                    Coefficient::Solution,
                    Pairing::Contract,
                    dim,
                )
            }
            EquationKind::Gjms => {
                let power = if dim > 2 && (dim - 2) % 3 == 0 {
                    ((dim - 2) / 3) as u32
                } else {
                    1
                };
                base(
                    registry::homogeneous(dim as f64),
                    registry::divergence(dim),
                    registry::gradient(dim),
                    Coefficient::Power(registry::homogeneous(3.0), power),
                    Pairing::Product,
                    1,
                )
            }
            EquationKind::Custom => {
                return Err(Error::InvalidParams(
                    "custom equations are assembled field by field".into(),
                ))
            }
        })
    }

    pub fn exponent_inputs(&self) -> ExponentInputs {
        ExponentInputs::new(
            self.dim as f64,
            self.l.order(),
            self.p.order(),
            self.q.order(),
            self.s,
            self.p_exp,
        )
    }

    /// Reject specs failing the structural hypotheses before any work.
    pub fn validate(&self) -> Result<()> {
        let rep = check_hypotheses(&self.exponent_inputs());
        if !rep.holds {
            return Err(Error::HypothesisViolation(rep.violations));
        }
        Ok(())
    }

    /// `P(V(u) . Q u)`.
    pub fn nonlinearity(&self, u: &SpectralField) -> Result<SpectralField> {
        let v = self.coefficient.evaluate(u)?;
        self.nonlinearity_with(&v, u)
    }

    /// `P(V . Q u)` for a given coefficient field.
    pub fn nonlinearity_with(&self, v: &SpectralField, u: &SpectralField) -> Result<SpectralField> {
        let qu = apply(&self.q, u)?;
        apply(&self.p, &self.pairing.combine(v, &qu)?)
    }

    /// `L u + P(V(u) . Q u) - f`.
    pub fn residual(&self, u: &SpectralField, f: &SpectralField) -> Result<SpectralField> {
        apply(&self.l, u)?.add(&self.nonlinearity(u)?)?.sub(f)
    }

    /// Inverse of `L` on mean-zero fields (zero on the mean mode).
    pub fn solve_linear(&self, rhs: &SpectralField) -> Result<SpectralField> {
        let l = self.l.clone();
        let inv = Symbol::multiplier("inverse", -l.order(), move |xi| {
            let v = l.eval(&[], xi);
            if v.norm() == 0.0 {
                Complex64::default()
            } else {
                v.inv()
            }
        });
        apply(&inv, rhs)
    }

    /// Smooth mean-zero forcing scaled so that `||L^{-1} f||_inf = amplitude`;
    /// divergence-free for vector equations.
    pub fn forcing(&self, grid: GridSpec) -> Result<SpectralField> {
        let radius = self.forcing_radius;
        let raw = crate::rng::random_weighted_field(grid, self.components, self.seed, |r| {
            if r == 0.0 || r > radius {
                0.0
            } else {
                (-r * r / (radius * radius)).exp()
            }
        });
        let raw = if self.components > 1 {
            apply(&registry::leray(grid.dim()), &raw)?
        } else {
            raw
        };
        let response = self.solve_linear(&raw)?.max_abs();
        if response == 0.0 || self.amplitude == 0.0 {
            return Ok(SpectralField::zeros(grid, self.components));
        }
        Ok(raw.scale(Complex64::new(self.amplitude / response, 0.0)))
    }
}
