//! Finite-window form of the sequence iteration lemma: if a bounded
//! sequence satisfies
//! `a_k <= 2^{-eps k} + delta sum_j a_j 2^{-2 eps |k - j|}` for `k >= S`
//! with `0 < delta < (1 - 2^{-eps}) / 2`, then `a_k <= M 2^{-eps k}`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Relative slack used when comparing a term against its bound.
pub const COMPARE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySequence {
    values: Vec<f64>,
    sup: f64,
}

impl DecaySequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidParams(format!(
                "sequence entries must be finite and nonnegative, found {bad}"
            )));
        }
        let sup = values.iter().copied().fold(0.0, f64::max);
        Ok(Self { values, sup })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationParams {
    pub eps: f64,
    pub delta: f64,
    pub start: usize,
}

impl IterationParams {
    pub fn new(eps: f64, delta: f64, start: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParams(format!("eps = {eps} must be positive")));
        }
        let cap = Self::delta_cap(eps);
        if !(delta > 0.0 && delta < cap) {
            return Err(Error::InvalidParams(format!(
                "delta = {delta} must lie in (0, {cap})"
            )));
        }
        Ok(Self { eps, delta, start })
    }

    /// `(1 - 2^{-eps}) / 2`.
    pub fn delta_cap(eps: f64) -> f64 {
        (1.0 - (-eps).exp2()) / 2.0
    }
}

/// `sum_j a_j rho^{|k - j|}` for every `k`, by one forward and one backward
/// geometric recursion.
pub fn two_sided_geometric(a: &[f64], rho: f64) -> Vec<f64> {
    let n = a.len();
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    let mut acc = 0.0;
    for k in 0..n {
        acc = a[k] + rho * acc;
        left[k] = acc;
    }
    acc = 0.0;
    for k in (0..n).rev() {
        acc = a[k] + rho * acc;
        right[k] = acc;
    }
    (0..n).map(|k| left[k] + right[k] - a[k]).collect()
}

/// Right side `2^{-eps k} + delta sum_j a_j 2^{-2 eps |k - j|}` for every `k`.
pub fn hypothesis_rhs(a: &[f64], params: &IterationParams) -> Vec<f64> {
    let conv = two_sided_geometric(a, (-2.0 * params.eps).exp2());
    conv.iter()
        .enumerate()
        .map(|(k, c)| (-params.eps * k as f64).exp2() + params.delta * c)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub first_violation: Option<usize>,
}

/// Check the lemma's hypothesis on `k = S..=K`.
pub fn hypothesis_holds(a: &DecaySequence, params: &IterationParams) -> HypothesisCheck {
    let rhs = hypothesis_rhs(a.values(), params);
    let first_violation = (params.start..a.len())
        .find(|&k| a.values()[k] > rhs[k] * (1.0 + COMPARE_SLACK));
    HypothesisCheck {
        holds: first_violation.is_none(),
        first_violation,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayBound {
    /// `max_k a_k 2^{eps k} / sup a` over the whole window.
    pub m: f64,
    /// The same maximum restricted to `k >= S`.
    pub m_from_start: f64,
}

fn normalized_max(a: &DecaySequence, eps: f64, from: usize) -> f64 {
    if a.sup_norm() == 0.0 {
        return 0.0;
    }
    a.values()
        .iter()
        .enumerate()
        .skip(from)
        .map(|(k, v)| v / (-eps * k as f64).exp2() / a.sup_norm())
        .fold(0.0, f64::max)
}

/// Smallest `M` with `a_k <= M sup(a) 2^{-eps k}` on the window.
pub fn decay_bound(a: &DecaySequence, params: &IterationParams) -> Result<DecayBound> {
    let check = hypothesis_holds(a, params);
    if let Some(k) = check.first_violation {
        return Err(Error::HypothesisViolation(vec![format!(
            "sequence bound fails at k = {k}"
        )]));
    }
    Ok(DecayBound {
        m: normalized_max(a, params.eps, 0),
        m_from_start: normalized_max(a, params.eps, params.start),
    })
}

/// Iterate `b -> min(b, RHS(b))` (applied for `k >= S`) until nothing changes.
pub fn tighten(a: &DecaySequence, params: &IterationParams, max_rounds: usize) -> Result<DecaySequence> {
    let mut b = a.values().to_vec();
    for _ in 0..max_rounds {
        let rhs = hypothesis_rhs(&b, params);
        let mut changed = false;
        for k in params.start..b.len() {
            if rhs[k] < b[k] {
                b[k] = rhs[k];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    DecaySequence::new(b)
}

/// `k -> C0delta sum_j a_j 2^{-theta |j - k|} + C_rho 2^{-theta k}`.
pub fn convolution_majorant(a: &DecaySequence, theta: f64, c0_delta: f64, c_rho: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0) {
        return Err(Error::InvalidParams(format!("theta = {theta} must be positive")));
    }
    let conv = two_sided_geometric(a.values(), (-theta).exp2());
    Ok(conv
        .iter()
        .enumerate()
        .map(|(k, c)| c0_delta * c + c_rho * (-theta * k as f64).exp2())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_sequence_has_unit_bound() {
        let eps = 0.5;
        let a = DecaySequence::new((0..40).map(|k| (-eps * k as f64).exp2()).collect()).unwrap();
        let p = IterationParams::new(eps, 0.05, 0).unwrap();
        assert!(hypothesis_holds(&a, &p).holds);
        assert_eq!(decay_bound(&a, &p).unwrap().m, 1.0);
    }

    #[test]
    fn constant_sequence_fails() {
        let a = DecaySequence::new(vec![1.0; 64]).unwrap();
        let p = IterationParams::new(1.0, 0.01, 0).unwrap();
        let c = hypothesis_holds(&a, &p);
        assert!(!c.holds);
        assert!(c.first_violation.unwrap() > 0);
    }

    #[test]
    fn delta_range_enforced() {
        assert!(IterationParams::new(1.0, 0.25, 0).is_err());
        assert!(IterationParams::new(1.0, 0.0, 0).is_err());
        assert!(IterationParams::new(-1.0, 0.1, 0).is_err());
    }
}
