//! Numerical probe of the local regularity gain: manufacture a smooth
//! solution of `L u + P(V Q u) = f`, localize it, split the localized
//! equation into a parametrix-composed main term and a remainder, and fit
//! the decay of `a_k = 2^{sigma k} ||P_k (eta u)||_r`.

mod decay;
mod equation;
mod solve;

pub use decay::{default_window, dyadic_decay_report, DecayReport, GAIN_TOLERANCE, MIN_WINDOW, NEGLIGIBLE};
pub use equation::{default_regularity, Coefficient, EquationKind, EquationSpec};
pub use solve::{manufactured_solution, Manufactured, SolveOptions};

use serde::Serialize;

use crate::cutoff::cutoff_field;
use crate::error::{Error, Result};
use crate::exponents::{check_hypotheses, gain_report, ExponentInputs, GainReport, HypothesisReport};
use crate::field::{lp_norm, SpectralField};
use crate::grid::GridSpec;
use crate::iteration::{decay_bound, hypothesis_holds, two_sided_geometric, DecaySequence, IterationParams};
use crate::lp::LpPartition;
use crate::paraproduct::{zone_estimate_report, ZoneContext, ZoneReport};
use crate::product::grid_product;
use crate::psido::{apply, parametrix, split_elliptic, DEFAULT_C2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeOptions {
    /// Cutoff radius; `u` is localized by `eta_rho`, `V` by `eta_{2 rho}`.
    pub rho: f64,
    pub c2: f64,
    pub solve: SolveOptions,
    /// Fitting window; defaults to [`default_window`].
    pub window: Option<(usize, usize)>,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            rho: std::f64::consts::PI / 8.0,
            c2: DEFAULT_C2,
            solve: SolveOptions::default(),
            window: None,
        }
    }
}

/// `u_loc = eta_rho u` and `V_loc = eta_{2 rho} V`, taken on the grid.
pub fn localize(
    u: &SpectralField,
    v: &SpectralField,
    rho: f64,
) -> Result<(SpectralField, SpectralField)> {
    if !(rho > 0.0 && rho < std::f64::consts::FRAC_PI_4) {
        return Err(Error::InvalidParams(format!(
            "cutoff radius {rho} must lie in (0, pi/4)"
        )));
    }
    let grid = *u.grid();
    let u_loc = grid_product(&cutoff_field(grid, rho)?, u)?;
    let v_loc = grid_product(&cutoff_field(grid, 2.0 * rho)?, v)?;
    Ok((u_loc, v_loc))
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveSummary {
    pub amplitude: f64,
    pub iterations: usize,
    pub residual: f64,
    pub max_abs: f64,
}

/// Per-shell terms of `u_loc = -B P(V_loc Q u_loc) + B rest - D u_loc`,
/// each weighted by `2^{sigma k}` and measured in `L^r`.
#[derive(Debug, Clone, Serialize)]
pub struct ShellTerms {
    pub k: usize,
    pub a: f64,
    pub main: f64,
    pub remainder: f64,
    /// `sum_j a_j 2^{-theta |j - k|}`.
    pub convolution: f64,
}

/// `a_k <= C0delta conv_k + C_rho 2^{-theta k}` with constants fitted on
/// `k >= window start`.
#[derive(Debug, Clone, Serialize)]
pub struct MasterInequality {
    pub c0_delta: f64,
    pub c_rho: f64,
    pub theta: f64,
    pub holds: bool,
}

/// The iteration lemma applied to `a / C_rho` with `eps = theta / 2`.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaOutcome {
    pub eps: f64,
    pub delta: f64,
    pub delta_cap: f64,
    pub admissible: bool,
    pub holds: Option<bool>,
    pub first_violation: Option<usize>,
    pub m: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub equation: EquationKind,
    pub grid: String,
    pub rho: f64,
    pub params: ExponentInputs,
    pub hypotheses: HypothesisReport,
    pub gains: GainReport,
    pub solve: SolveSummary,
    /// `||V_loc||_q`.
    pub delta: f64,
    pub shells: Vec<ShellTerms>,
    pub master: MasterInequality,
    pub lemma: LemmaOutcome,
    pub zones: Vec<ZoneReport>,
    pub decay: DecayReport,
    pub pass: bool,
}

fn weighted_norms(part: &LpPartition, f: &SpectralField, sigma: f64, r: f64) -> Result<Vec<f64>> {
    let seq = crate::lp::dyadic_norm_sequence(part, f, r)?;
    Ok(seq
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (sigma * k as f64).exp2() * v)
        .collect())
}

pub fn run_probe(spec: &EquationSpec, grid: GridSpec, opts: &ProbeOptions) -> Result<ProbeReport> {
    let hypotheses = check_hypotheses(&spec.exponent_inputs());
    if !hypotheses.holds {
        return Err(Error::HypothesisViolation(hypotheses.violations));
    }
    let gains = gain_report(&spec.exponent_inputs())?;
    let part = LpPartition::build(grid)?;
    let window = opts.window.unwrap_or_else(|| default_window(&part));
    let (sigma, r, theta) = (gains.params.sigma, gains.params.r, gains.theta);

    let solved = manufactured_solution(spec, grid, opts.solve)?;
    let v = spec.coefficient.evaluate(&solved.u)?;
    let (u_loc, v_loc) = localize(&solved.u, &v, opts.rho)?;

    let decay = dyadic_decay_report(&part, &u_loc, sigma, r, window, gains.epsilon)?;

    let split = split_elliptic(&spec.l, &grid, opts.c2)?;
    let b = parametrix(&split.e, &grid, opts.c2)?;
    let nonlinear = spec.nonlinearity_with(&v_loc, &u_loc)?;
    let e_u = apply(&split.e, &u_loc)?;
    let rest = e_u.add(&nonlinear)?;
    let defect = apply(&b, &e_u)?.sub(&u_loc)?;

    let main = weighted_norms(&part, &apply(&b, &nonlinear)?, sigma, r)?;
    let rem_a = weighted_norms(&part, &apply(&b, &rest)?, sigma, r)?;
    let rem_b = weighted_norms(&part, &defect, sigma, r)?;
    let a = decay.a.clone();
    let conv = two_sided_geometric(&a, (-theta).exp2());

    let start = window.0;
    let shells: Vec<ShellTerms> = (0..a.len())
        .map(|k| ShellTerms {
            k,
            a: a[k],
            main: main[k],
            remainder: rem_a[k] + rem_b[k],
            convolution: conv[k],
        })
        .collect();
    let c0_delta = shells[start..]
        .iter()
        .filter(|t| t.convolution > 0.0)
        .map(|t| t.main / t.convolution)
        .fold(0.0, f64::max);
    let c_rho = shells[start..]
        .iter()
        .map(|t| t.remainder * (theta * t.k as f64).exp2())
        .fold(0.0, f64::max);
    let master_holds = shells[start..].iter().all(|t| {
        let bound = c0_delta * t.convolution + c_rho * (-theta * t.k as f64).exp2();
        t.a <= bound * (1.0 + 1e-9)
    });
    let master = MasterInequality {
        c0_delta,
        c_rho,
        theta,
        holds: master_holds,
    };

    let eps = theta / 2.0;
    let delta_cap = IterationParams::delta_cap(eps);
    let admissible = c0_delta > 0.0 && c0_delta < delta_cap && c_rho > 0.0;
    let mut lemma = LemmaOutcome {
        eps,
        delta: c0_delta,
        delta_cap,
        admissible,
        holds: None,
        first_violation: None,
        m: None,
    };
    if admissible {
        let params = IterationParams::new(eps, c0_delta, start)?;
        let seq = DecaySequence::new(a.iter().map(|x| x / c_rho).collect())?;
        let check = hypothesis_holds(&seq, &params);
        lemma.holds = Some(check.holds);
        lemma.first_violation = check.first_violation;
        if check.holds {
            lemma.m = Some(decay_bound(&seq, &params)?.m_from_start);
        }
    }

    let ctx = ZoneContext::measure(&part, gains.params, &v_loc, &u_loc)?;
    let w = apply(&spec.q, &u_loc)?;
    let zones = (window.0..=window.1)
        .map(|k| zone_estimate_report(&part, spec.pairing, &ctx, &v_loc, &w, k))
        .collect::<Result<Vec<_>>>()?;

    Ok(ProbeReport {
        equation: spec.kind,
        grid: grid.label(),
        rho: opts.rho,
        params: spec.exponent_inputs(),
        hypotheses,
        solve: SolveSummary {
            amplitude: spec.amplitude,
            iterations: solved.iterations,
            residual: solved.residual,
            max_abs: solved.u.max_abs(),
        },
        delta: lp_norm(&v_loc, gains.params.q)?,
        gains,
        shells,
        master,
        lemma,
        zones,
        pass: decay.pass,
        decay,
    })
}
