//! Exponent arithmetic of the regularity bootstrap for
//! `L u + P(V Q u) = 0` with operator orders `alpha`, `beta`, `gamma`:
//! hypothesis checks, the critical exponent of `V`, the lifted pair
//! `(sigma, r)`, the bootstrap exponents and the gains `epsilon`, `theta`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fraction of the admissible minimum taken as `theta`.
pub const THETA_FRACTION: f64 = 0.9;

/// The six inputs `(n, alpha, beta, gamma, s, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentInputs {
    pub n: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub s: f64,
    pub p: f64,
}

impl ExponentInputs {
    pub fn new(n: f64, alpha: f64, beta: f64, gamma: f64, s: f64, p: f64) -> Self {
        Self {
            n,
            alpha,
            beta,
            gamma,
            s,
            p,
        }
    }

    /// `alpha - beta`.
    pub fn nu(&self) -> f64 {
        self.alpha - self.beta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub holds: bool,
    /// Each violated inequality, written out.
    pub violations: Vec<String>,
}

/// Evaluate the structural hypotheses literally:
/// orders nonnegative, `alpha > beta + gamma`, `alpha - beta >= s >= gamma`,
/// `gamma > s - n/p > alpha - beta - n`, and `1 < p < inf`.
pub fn check_hypotheses(h: &ExponentInputs) -> HypothesisReport {
    let mut v = Vec::new();
    let ExponentInputs {
        n,
        alpha,
        beta,
        gamma,
        s,
        p,
    } = *h;
    let all = [n, alpha, beta, gamma, s, p];
    if all.iter().any(|x| x.is_nan()) {
        v.push("all inputs must be numbers".to_string());
    }
    if !(n >= 1.0 && n.fract() == 0.0) {
        v.push(format!("dimension n = {n} must be a positive integer"));
    }
    for (name, val) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
        if !(val >= 0.0) {
            v.push(format!("{name} >= 0 fails: {name} = {val}"));
        }
    }
    if !(alpha > beta + gamma) {
        v.push(format!(
            "alpha > beta + gamma fails: {alpha} <= {}",
            beta + gamma
        ));
    }
    if !(alpha - beta >= s) {
        v.push(format!("alpha - beta >= s fails: {} < {s}", alpha - beta));
    }
    if !(s >= gamma) {
        v.push(format!("s >= gamma fails: {s} < {gamma}"));
    }
    if !(p > 1.0 && p < f64::INFINITY) {
        v.push(format!("1 < p < inf fails: p = {p}"));
    } else {
        let sob = s - n / p;
        if !(gamma > sob) {
            v.push(format!("gamma > s - n/p fails: {gamma} <= {sob}"));
        }
        if !(sob > alpha - beta - n) {
            v.push(format!(
                "s - n/p > alpha - beta - n fails: {sob} <= {}",
                alpha - beta - n
            ));
        }
    }
    HypothesisReport {
        holds: v.is_empty(),
        violations: v,
    }
}

fn require(h: &ExponentInputs) -> Result<()> {
    let rep = check_hypotheses(h);
    if rep.holds {
        Ok(())
    } else {
        Err(Error::HypothesisViolation(rep.violations))
    }
}

/// `q = n / (alpha - beta - gamma)`, the critical integrability of `V`.
pub fn critical_exponent(n: f64, alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    let gap = alpha - beta - gamma;
    if !(gap > 0.0) {
        return Err(Error::HypothesisViolation(vec![format!(
            "alpha > beta + gamma fails: {alpha} <= {}",
            beta + gamma
        )]));
    }
    let q = n / gap;
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "critical exponent q = {q} is not in (1, inf)"
        )));
    }
    Ok(q)
}

/// Inputs together with the lifted pair and the critical exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityParams {
    pub inputs: ExponentInputs,
    /// Smoothness and integrability actually lifted from; they differ from
    /// the inputs only when `s = alpha - beta` forced a lowering.
    pub s_used: f64,
    pub p_used: f64,
    pub lowered: bool,
    pub sigma: f64,
    pub r: f64,
    pub q: f64,
}

impl RegularityParams {
    pub fn n(&self) -> f64 {
        self.inputs.n
    }
    pub fn alpha(&self) -> f64 {
        self.inputs.alpha
    }
    pub fn beta(&self) -> f64 {
        self.inputs.beta
    }
    pub fn gamma(&self) -> f64 {
        self.inputs.gamma
    }

    /// Hoelder dual `q' = q / (q - 1)`.
    pub fn q_dual(&self) -> f64 {
        self.q / (self.q - 1.0)
    }
}

/// Choose `sigma` at the midpoint of `(max(gamma, s), min(alpha - beta, s + 1))`
/// and `r` from `sigma - n/r = s - n/p`. When `s = alpha - beta` the pair
/// `(s, p)` is first moved down the Sobolev line by
/// `eta = min(1/4, (s - gamma)/2)`, keeping `s - n/p` fixed.
pub fn lift_parameters(h: &ExponentInputs) -> Result<RegularityParams> {
    require(h)?;
    let q = critical_exponent(h.n, h.alpha, h.beta, h.gamma)?;
    let nu = h.nu();
    let (mut s, mut p, mut lowered) = (h.s, h.p, false);
    if s >= nu {
        let eta = 0.25f64.min((s - h.gamma) / 2.0);
        let inv_p = 1.0 / p - eta / h.n;
        if !(eta > 0.0 && inv_p > 0.0 && inv_p < 1.0) {
            return Err(Error::InvalidParams(format!(
                "cannot lower s = {s} along the Sobolev line (eta = {eta})"
            )));
        }
        s -= eta;
        p = 1.0 / inv_p;
        lowered = true;
    }
    let lo = h.gamma.max(s);
    let hi = nu.min(s + 1.0);
    if !(lo < hi) {
        return Err(Error::InvalidParams(format!(
            "empty admissible interval ({lo}, {hi}) for sigma"
        )));
    }
    let sigma = 0.5 * (lo + hi);
    let r = h.n / (sigma - s + h.n / p);
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::InvalidParams(format!("lifted exponent r = {r} is not in (1, inf)")));
    }
    Ok(RegularityParams {
        inputs: *h,
        s_used: s,
        p_used: p,
        lowered,
        sigma,
        r,
        q,
    })
}

/// One bootstrap exponent: `Some(p)` when finite, `None` when the
/// reciprocal is non-positive (the function lies in every `L^t`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BootstrapExponent {
    pub reciprocal: f64,
    pub value: Option<f64>,
}

impl BootstrapExponent {
    fn from_reciprocal(reciprocal: f64) -> Self {
        Self {
            reciprocal,
            value: (reciprocal > 0.0).then(|| 1.0 / reciprocal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub exponents: [BootstrapExponent; 5],
    /// Indices (1-based) of exponents at or below 1.
    pub inconsistent: Vec<usize>,
}

/// Integrability of the five source terms after rewriting the localized
/// equation: `1/p1 = 1/p + nu/n - s/n`, `1/p2 = 1/p - s/n`, `p3 = p1`,
/// `1/p4 = 1/p1 - 1/n`, `p5 = q`, with `nu = alpha - beta`.
pub fn bootstrap_exponents(h: &ExponentInputs) -> Result<BootstrapReport> {
    require(h)?;
    let q = critical_exponent(h.n, h.alpha, h.beta, h.gamma)?;
    let n = h.n;
    let i1 = 1.0 / h.p + h.nu() / n - h.s / n;
    let recips = [i1, 1.0 / h.p - h.s / n, i1, i1 - 1.0 / n, 1.0 / q];
    let exponents = recips.map(BootstrapExponent::from_reciprocal);
    let inconsistent = recips
        .iter()
        .enumerate()
        .filter(|(_, r)| **r >= 1.0)
        .map(|(i, _)| i + 1)
        .collect();
    Ok(BootstrapReport {
        exponents,
        inconsistent,
    })
}

/// `epsilon = min{1, alpha - beta - sigma, gamma - sigma + n/r}`.
pub fn epsilon_gain(params: &RegularityParams) -> Result<f64> {
    let eps = 1f64
        .min(params.alpha() - params.beta() - params.sigma)
        .min(params.gamma() - params.sigma + params.n() / params.r);
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("epsilon = {eps} is not positive")));
    }
    Ok(eps)
}

/// The four exponents bounding the convolution kernels, in order:
/// `gamma + n/r - sigma`, `alpha - beta - sigma`, `sigma - gamma`,
/// `-alpha + beta + n(1 - 1/r) + sigma`.
pub fn kernel_exponents(params: &RegularityParams) -> [f64; 4] {
    let (n, a, b, g, s, r) = (
        params.n(),
        params.alpha(),
        params.beta(),
        params.gamma(),
        params.sigma,
        params.r,
    );
    [g + n / r - s, a - b - s, s - g, -a + b + n * (1.0 - 1.0 / r) + s]
}

/// `theta = 0.9 min{kernel exponents, epsilon}`.
pub fn theta_exponent(params: &RegularityParams) -> Result<f64> {
    let eps = epsilon_gain(params)?;
    let m = kernel_exponents(params).into_iter().fold(eps, f64::min);
    if !(m > 0.0) {
        return Err(Error::InvalidParams(format!(
            "theta bound {m} is not positive"
        )));
    }
    Ok(THETA_FRACTION * m)
}

#[derive(Debug, Clone, Serialize)]
pub struct GainReport {
    pub params: RegularityParams,
    pub epsilon: f64,
    pub theta: f64,
    pub bootstrap: BootstrapReport,
}

/// Everything derived from the six inputs.
pub fn gain_report(h: &ExponentInputs) -> Result<GainReport> {
    let params = lift_parameters(h)?;
    Ok(GainReport {
        epsilon: epsilon_gain(&params)?,
        theta: theta_exponent(&params)?,
        bootstrap: bootstrap_exponents(h)?,
        params,
    })
}
