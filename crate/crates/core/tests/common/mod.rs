//! Hand-written oracles shared by the module tests and the acceptance run.
#![allow(dead_code)]

use lpw::iteration::COMPARE_SLACK;
use lpw::rng::CounterRng;

/// Hand evaluation of the four structural conditions, returned in order:
/// `alpha > beta + gamma`, `alpha - beta >= s >= gamma`,
/// `gamma > s - n/p`, `s - n/p > alpha - beta - n`.
pub fn hand_conditions(n: f64, a: f64, b: f64, g: f64, s: f64, p: f64) -> [bool; 4] {
    let sob = s - n / p;
    [a > b + g, a - b >= s && s >= g, g > sob, sob > a - b - n]
}

pub fn hand_holds(t: [f64; 6]) -> bool {
    let [n, a, b, g, s, p] = t;
    a >= 0.0 && b >= 0.0 && g >= 0.0 && p > 1.0 && p.is_finite() && hand_conditions(n, a, b, g, s, p).iter().all(|c| *c)
}

/// Twenty tuples: sixteen random draws around the admissible region plus
/// the four boundary cases, each failing exactly one condition.
pub fn randomized_tuples() -> Vec<[f64; 6]> {
    let mut rng = CounterRng::new(2024);
    let mut out: Vec<[f64; 6]> = (0..16)
        .map(|_| {
            let n = 1.0 + rng.below(4) as f64;
            let b = rng.uniform_in(0.0, 2.0);
            let g = rng.uniform_in(0.0, 2.0);
            let a = b + g + rng.uniform_in(-0.5, n);
            let s = rng.uniform_in(g - 0.5, a - b + 0.5);
            let p = rng.uniform_in(1.05, 8.0);
            [n, a, b, g, s, p]
        })
        .collect();
    out.extend([
        // alpha = beta + gamma
        [4.0, 2.0, 1.0, 1.0, 1.0, 2.0],
        // s above alpha - beta
        [4.0, 2.0, 0.0, 1.0, 2.25, 2.0],
        // gamma = s - n/p
        [4.0, 2.0, 0.0, 1.0, 2.0, 4.0],
        // s - n/p = alpha - beta - n
        [4.0, 2.0, 0.0, 1.0, 1.0, 4.0 / 3.0],
    ]);
    out
}

/// First `k >= start` with `a_k > 2^{-eps k} + delta sum_j a_j 2^{-2 eps |k-j|}`,
/// by a direct double loop.
pub fn oracle_violation(a: &[f64], eps: f64, delta: f64, start: usize) -> Option<usize> {
    (start..a.len()).find(|&k| {
        let conv: f64 = a
            .iter()
            .enumerate()
            .map(|(j, v)| v * (-2.0 * eps * (k as f64 - j as f64).abs()).exp2())
            .sum();
        a[k] > ((-eps * k as f64).exp2() + delta * conv) * (1.0 + COMPARE_SLACK)
    })
}

/// A random iteration instance `(a, eps, delta, start)` with `K + 1 = 65`
/// entries; roughly half of the draws satisfy the hypothesis.
pub fn random_iteration_case(rng: &mut CounterRng, delta_cap: impl Fn(f64) -> f64) -> (Vec<f64>, f64, f64, usize) {
    let eps = rng.uniform_in(0.05, 2.0);
    let delta = rng.uniform_in(0.01, 0.99) * delta_cap(eps);
    let start = rng.below(8) as usize;
    let scale = rng.uniform_in(0.2, 1.6);
    let rate = eps * rng.uniform_in(0.3, 1.5);
    let a = (0..=64)
        .map(|k| scale * (-rate * k as f64).exp2() * rng.uniform_in(0.0, 1.2))
        .collect();
    (a, eps, delta, start)
}
