//! Measured checks of the analytic estimates on concrete data. Each check
//! returns a serializable report with a `pass` flag and the name of the
//! estimate it exercises.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{lift_parameters, ExponentInputs};
use crate::field::{lp_norm, relative_l2_error, SpectralField};
use crate::fit::{log2_slope, LineFit};
use crate::grid::GridSpec;
use crate::lp::{sobolev_norm, LpPartition, CAP_INNER, CAP_OUTER};
use crate::paraproduct::{split, split_brute_force, zone_estimate_report, BranchFlags, Pairing, ZoneContext, ZoneReport};
use crate::psido::{ap_shell_ratio, apply, commutator_field, commutator_symbol_remainder, registry, RemainderReport, Symbol, SymbolKind};
use crate::rng::{random_weighted_field, CounterRng};

/// `max / min` of the positive finite entries, `inf` if fewer than one.
pub fn spread(values: &[f64]) -> f64 {
    let good: Vec<f64> = values.iter().copied().filter(|v| v.is_finite() && *v > 0.0).collect();
    if good.is_empty() || good.len() < values.len() {
        return f64::INFINITY;
    }
    let max = good.iter().copied().fold(0.0, f64::max);
    let min = good.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

/// Random real field with roughly equal `L^2` mass in every dyadic shell.
pub fn flat_profile_field(grid: GridSpec, components: usize, seed: u64) -> SpectralField {
    let half_dim = grid.dim() as f64 / 2.0;
    random_weighted_field(grid, components, seed, move |r| if r == 0.0 { 0.0 } else { r.powf(-half_dim) })
}

/// Self-similar field: shell `j` has `L^2` mass `mass[j]`, spread with equal
/// positive coefficients over the band where `phi_j = 1` exactly
/// (`CAP_OUTER/2 * 2^j < |xi| < CAP_INNER * 2^j`), so every shell is a bump
/// concentrated at the origin.
pub fn coherent_profile_field(grid: GridSpec, mass: &[f64]) -> Result<SpectralField> {
    let norms = grid.frequency_norms();
    let band_of: Vec<Option<usize>> = norms
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            if grid.is_nyquist(i) || r == 0.0 {
                return None;
            }
            let j = r.log2().round().max(0.0) as usize;
            let scale = (j as f64).exp2();
            (j < mass.len() && r > 0.5 * CAP_OUTER * scale && r < CAP_INNER * scale).then_some(j)
        })
        .collect();
    let mut count = vec![0usize; mass.len()];
    for j in band_of.iter().flatten() {
        count[*j] += 1;
    }
    let spec = band_of
        .iter()
        .map(|b| match b {
            Some(j) => Complex64::new(mass[*j] / (count[*j] as f64).sqrt(), 0.0),
            None => Complex64::default(),
        })
        .collect();
    SpectralField::from_spectral(grid, 1, spec)
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub deviation: f64,
    pub reconstruction: f64,
    pub pass: bool,
}

/// Pointwise `|sum_j phi_j - 1|` and `||sum_j P_j f - f|| / ||f||`.
pub fn partition_check(grid: GridSpec, seed: u64) -> Result<PartitionCheck> {
    let part = LpPartition::build(grid)?;
    let deviation = part.partition_deviation();
    let f = flat_profile_field(grid, 1, seed);
    let pieces = (0..=part.top())
        .into_par_iter()
        .map(|j| part.project(&f, j))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = SpectralField::zeros(grid, 1).spectral_only();
    for p in &pieces {
        sum = sum.add(p)?;
    }
    let reconstruction = relative_l2_error(&sum, &f)?;
    Ok(PartitionCheck {
        estimate: "smooth dyadic partition of unity",
        grid: grid.label(),
        deviation,
        reconstruction,
        pass: deviation <= 1e-14 && reconstruction <= 1e-12,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BernsteinCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub shells: Vec<usize>,
    /// `||P_j f||_inf / ||P_j f||_2`.
    pub ratios: Vec<f64>,
    /// `ratio_j / 2^{j n / 2}`.
    pub constants: Vec<f64>,
    pub fit: Option<LineFit>,
    pub expected_slope: f64,
    pub constant_spread: f64,
    pub pass: bool,
}

/// Shell data with nonnegative random amplitudes, translated to a random
/// grid point so that the peak is sampled.
fn coherent_shell_field(part: &LpPartition, j: usize, rng: &mut CounterRng) -> Result<SpectralField> {
    let grid = *part.grid();
    let phi = part.multiplier(j)?;
    let centre = rng.below(grid.len() as u64) as usize;
    let x0 = grid.point(centre);
    let d = grid.dim();
    let spec = (0..grid.len())
        .map(|i| {
            if phi[i] == 0.0 || grid.is_nyquist(i) {
                return Complex64::default();
            }
            let xi = grid.frequency(i);
            let phase: f64 = (0..d).map(|a| xi[a] * x0[a]).sum();
            Complex64::from_polar(phi[i] * rng.uniform(), -phase)
        })
        .collect();
    SpectralField::from_spectral(grid, 1, spec)
}

/// Growth of `||P_j f||_inf / ||P_j f||_2` in `j`: slope near `n/2`
/// (within 0.15) and constants within a factor 4.
pub fn bernstein_check(grid: GridSpec, shells: &[usize], seed: u64) -> Result<BernsteinCheck> {
    let part = LpPartition::build(grid)?;
    let mut rng = CounterRng::new(seed);
    let mut ratios = Vec::with_capacity(shells.len());
    for &j in shells {
        let f = coherent_shell_field(&part, j, &mut rng)?;
        ratios.push(lp_norm(&f, f64::INFINITY)? / lp_norm(&f, 2.0)?);
    }
    let half = grid.dim() as f64 / 2.0;
    let constants: Vec<f64> = shells
        .iter()
        .zip(&ratios)
        .map(|(&j, r)| r / (half * j as f64).exp2())
        .collect();
    let fit = log2_slope(shells, &ratios);
    let constant_spread = spread(&constants);
    let slope_ok = fit.map_or(false, |f| (f.slope - half).abs() <= 0.15);
    Ok(BernsteinCheck {
        estimate: "Bernstein inequality",
        grid: grid.label(),
        shells: shells.to_vec(),
        ratios,
        constants,
        fit,
        expected_slope: half,
        constant_spread,
        pass: slope_ok && constant_spread <= 4.0,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SymbolRatios {
    pub symbol: String,
    pub order: f64,
    pub ratios: Vec<f64>,
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellMappingCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub shells: Vec<usize>,
    pub p: f64,
    pub symbols: Vec<SymbolRatios>,
    pub pass: bool,
}

/// The default symbols of the shell mapping check.
pub const SHELL_MAPPING_SYMBOLS: [&str; 5] = [
    "laplacian",
    "fractional_laplacian:0.75",
    "bessel:-1",
    "grad:1",
    "sep:2+cos1*bessel^1",
];

/// `||A P_k f||_p <= C 2^{k m} ||P_{~k} f||_p` with `C` independent of `k`:
/// per-symbol ratios may spread at most a factor 10.
pub fn shell_mapping_check(
    grid: GridSpec,
    symbols: &[Symbol],
    shells: &[usize],
    p: f64,
    seed: u64,
) -> Result<ShellMappingCheck> {
    let part = LpPartition::build(grid)?;
    let f = flat_profile_field(grid, 1, seed);
    let mut out = Vec::new();
    for a in symbols {
        let ratios = shells
            .iter()
            .map(|&k| Ok(ap_shell_ratio(&part, a, &f, k, p)?.unwrap_or(f64::NAN)))
            .collect::<Result<Vec<_>>>()?;
        out.push(SymbolRatios {
            symbol: a.name().to_string(),
            order: a.order(),
            spread: spread(&ratios),
            ratios,
        });
    }
    Ok(ShellMappingCheck {
        estimate: "shell mapping estimate for pseudodifferential operators",
        grid: grid.label(),
        shells: shells.to_vec(),
        p,
        pass: out.iter().all(|s| s.spread <= 10.0),
        symbols: out,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorSlope {
    pub symbol: String,
    pub order: f64,
    /// `||[P_k, A] f||_2 / ||P_{k-1 <= . <= k+1} f||_2`.
    pub ratios: Vec<f64>,
    pub fit: Option<LineFit>,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub shells: Vec<usize>,
    pub symbols: Vec<CommutatorSlope>,
    /// `||[P_k, A] f||` for the multiplier symbols; all must be zero.
    pub multiplier_values: Vec<f64>,
    pub pass: bool,
}

/// The x-dependent symbols of orders 0, 1, 2 used by the commutator check.
pub const COMMUTATOR_SYMBOLS: [&str; 3] = [
    "sep:2+cos1*1",
    "sep:2+cos1*bessel^1",
    "sep:2+cos1*abs^2",
];

/// `[P_k, A]` has order `m - 1`: the fitted shell slope of the relative
/// commutator size must not exceed `m - 1 + 0.2`, and multipliers commute.
pub fn commutator_check(
    grid: GridSpec,
    symbols: &[Symbol],
    multipliers: &[Symbol],
    shells: &[usize],
    seed: u64,
) -> Result<CommutatorCheck> {
    let part = LpPartition::build(grid)?;
    let f = flat_profile_field(grid, 1, seed);
    let mut out = Vec::new();
    for a in symbols {
        let ratios = shells
            .par_iter()
            .map(|&k| -> Result<f64> {
                let num = lp_norm(&commutator_field(&part, a, &f, k)?, 2.0)?;
                let den = lp_norm(&part.project_window(&f, k.saturating_sub(1), k + 1)?, 2.0)?;
                Ok(num / den)
            })
            .collect::<Result<Vec<_>>>()?;
        let fit = log2_slope(shells, &ratios);
        let bound = a.order() - 1.0 + 0.2;
        out.push(CommutatorSlope {
            symbol: a.name().to_string(),
            order: a.order(),
            pass: fit.map_or(false, |f| f.slope <= bound),
            ratios,
            fit,
            bound,
        });
    }
    let mut multiplier_values = Vec::new();
    for a in multipliers {
        for &k in shells {
            multiplier_values.push(crate::psido::commutator_shell(&part, a, &f, k, 2.0)?);
        }
    }
    let mult_ok = multipliers.iter().all(|a| a.kind() == SymbolKind::Multiplier)
        && multiplier_values.iter().all(|v| *v == 0.0);
    Ok(CommutatorCheck {
        estimate: "commutator estimate for Littlewood-Paley projections",
        grid: grid.label(),
        shells: shells.to_vec(),
        pass: mult_ok && out.iter().all(|s| s.pass),
        symbols: out,
        multiplier_values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderCheck {
    pub estimate: &'static str,
    pub symbol: String,
    pub reports: Vec<RemainderReport>,
    /// Values below this count as exact zeros.
    pub floor: f64,
    /// Off-band maxima either shrink by `2^8` per step or stay below `floor`.
    pub off_band_decay: bool,
    pub near_spread: f64,
    pub pass: bool,
}

/// Remainder symbol of `P_k A` over its three frequency regimes.
pub fn remainder_check(a: &Symbol, grid: GridSpec, ks: &[usize]) -> Result<RemainderCheck> {
    let reports = ks
        .iter()
        .map(|&k| commutator_symbol_remainder(a, &grid, k, 1i64 << (k + 5)))
        .collect::<Result<Vec<_>>>()?;
    let scale = reports.iter().map(|r| r.symbol_scale).fold(0.0, f64::max);
    let floor = 1e-12 * scale.max(1.0);
    let decays = |get: fn(&RemainderReport) -> f64| {
        reports.windows(2).all(|w| {
            let (prev, next) = (get(&w[0]), get(&w[1]));
            next <= floor || next * 256.0 <= prev
        })
    };
    let off_band_decay = decays(|r| r.high) && decays(|r| r.low);
    let near: Vec<f64> = reports.iter().map(|r| r.near_normalized).collect();
    let near_spread = spread(&near);
    Ok(RemainderCheck {
        estimate: "remainder symbol estimate for the composition with P_k",
        symbol: a.name().to_string(),
        floor,
        pass: off_band_decay && near_spread <= 10.0,
        reports,
        off_band_decay,
        near_spread,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub shells: Vec<usize>,
    /// `||(LL + LH + HL + HH) - P_k(V w)||_2 / ||P_k(V w)||_2`.
    pub errors: Vec<f64>,
    pub brute_grid: String,
    /// Largest zone difference between the windowed and all-pairs sums.
    pub brute_zone_error: f64,
    /// Largest all-pairs contribution outside every zone.
    pub brute_outside: f64,
    pub pass: bool,
}

fn relative_or_absolute(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let scale = b.coefficient_norm();
    let diff = a.sub(b)?.coefficient_norm();
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

/// The four zones reproduce every shell of the product exactly; on a small
/// grid the windowed zone sums match the pair-by-pair sums.
pub fn cover_check(grid: GridSpec, brute_grid: GridSpec, seed: u64) -> Result<CoverCheck> {
    let part = LpPartition::build(grid)?;
    let v = flat_profile_field(grid, 1, seed);
    let w = flat_profile_field(grid, 1, seed.wrapping_add(1));
    let vw = crate::product::pointwise_product(&v, &w)?;
    let shells: Vec<usize> = (1..=part.top()).collect();
    let errors = shells
        .iter()
        .map(|&k| relative_or_absolute(&split(&part, Pairing::Product, &v, &w, k)?.total()?, &part.project(&vw, k)?))
        .collect::<Result<Vec<_>>>()?;

    let small = LpPartition::build(brute_grid)?;
    let sv = flat_profile_field(brute_grid, 1, seed.wrapping_add(2));
    let sw = flat_profile_field(brute_grid, 1, seed.wrapping_add(3));
    let scale = sv.coefficient_norm() * sw.coefficient_norm();
    let mut brute_zone_error: f64 = 0.0;
    let mut brute_outside: f64 = 0.0;
    for k in 0..=small.top() {
        let fast = split(&small, Pairing::Product, &sv, &sw, k)?;
        let (slow, outside) = split_brute_force(&small, Pairing::Product, &sv, &sw, k)?;
        for z in crate::paraproduct::Zone::ALL {
            let d = fast.zone(z).sub(slow.zone(z))?.coefficient_norm() / scale;
            brute_zone_error = brute_zone_error.max(d);
        }
        brute_outside = brute_outside.max(outside.coefficient_norm() / scale);
    }
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(CoverCheck {
        estimate: "exact cover of a product shell by the four interaction zones",
        grid: grid.label(),
        shells,
        brute_grid: brute_grid.label(),
        pass: worst <= 1e-10 && brute_zone_error <= 1e-10 && brute_outside <= 1e-10,
        errors,
        brute_zone_error,
        brute_outside,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ZoneBranchCheck {
    pub inputs: ExponentInputs,
    pub branches: BranchFlags,
    /// Whether the flags agree with a direct evaluation of the sign conditions.
    pub branches_match: bool,
    pub reports: Vec<ZoneReport>,
    /// Spread across `k` of the measured constants, per displayed estimate.
    pub spreads: [f64; 3],
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZoneEstimateCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub shells: Vec<usize>,
    pub cases: Vec<ZoneBranchCheck>,
    pub pass: bool,
}

/// Exponent tuples exercising both branches of the high-low and high-high
/// estimates on `n = 1`: `r < q, r < q'` and `r >= q, r >= q'`.
pub fn zone_branch_inputs() -> [ExponentInputs; 2] {
    [
        ExponentInputs::new(1.0, 1.0, 0.0, 0.25, 0.6, 1.0 / 0.58),
        ExponentInputs::new(1.0, 1.0, 0.0, 0.5, 0.5, 5.0),
    ]
}

/// Measure the zone estimates on self-similar dyadic-profile data and check
/// that their constants do not drift with `k`.
pub fn zone_estimate_check(grid: GridSpec, inputs: &[ExponentInputs]) -> Result<ZoneEstimateCheck> {
    if grid.dim() != 1 {
        return Err(Error::InvalidParams("the zone estimate check runs on n = 1".into()));
    }
    let part = LpPartition::build(grid)?;
    let top = part.top();
    if top < 14 {
        return Err(Error::InvalidGrid(format!(
            "the zone estimate check needs at least 15 shells, {} has {}",
            grid.label(),
            top + 1
        )));
    }
    let shells: Vec<usize> = (6..=top - 7).collect();
    let mut cases = Vec::new();
    for h in inputs {
        let params = lift_parameters(h)?;
        let n = h.n;
        // Self-similar data: every shell is a bump at the origin, u has a
        // flat profile a_j and V sits at the critical scaling of L^q.
        let u_mass: Vec<f64> = (0..=top)
            .map(|j| (-(params.sigma + n * (0.5 - 1.0 / params.r)) * j as f64).exp2())
            .collect();
        let v_mass: Vec<f64> = (0..=top)
            .map(|j| 0.1 * (-(n * (0.5 - 1.0 / params.q)) * j as f64).exp2())
            .collect();
        let u = coherent_profile_field(grid, &u_mass)?;
        let v = coherent_profile_field(grid, &v_mass)?;
        let w = apply(&registry::homogeneous(h.gamma), &u)?;
        let ctx = ZoneContext::measure(&part, params, &v, &u)?;
        let reports = shells
            .par_iter()
            .map(|&k| zone_estimate_report(&part, Pairing::Product, &ctx, &v, &w, k))
            .collect::<Result<Vec<_>>>()?;
        let pick = |f: fn(&ZoneReport) -> Option<f64>| -> Vec<f64> {
            reports.iter().map(|r| f(r).unwrap_or(f64::NAN)).collect()
        };
        let spreads = [
            spread(&pick(|r| r.ll_lh.constant)),
            spread(&pick(|r| r.hl.constant)),
            spread(&pick(|r| r.hh.constant)),
        ];
        let branches = BranchFlags::from_params(&params);
        let q_dual = params.q / (params.q - 1.0);
        let branches_match = branches.r_ge_q == (params.r >= params.q)
            && branches.r_ge_q_dual == (params.r >= q_dual)
            && branches.hl_kernel_negative == (params.sigma - h.gamma - n / params.r < 0.0)
            && branches.lifted_below_order == (-h.alpha + h.beta + params.sigma < 0.0);
        cases.push(ZoneBranchCheck {
            inputs: *h,
            branches,
            branches_match,
            pass: branches_match && spreads.iter().all(|s| *s <= 10.0),
            reports,
            spreads,
        });
    }
    Ok(ZoneEstimateCheck {
        estimate: "zone estimates for the low, high-low and high-high interactions",
        grid: grid.label(),
        shells,
        pass: cases.iter().all(|c| c.pass),
        cases,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct MappingCase {
    pub symbol: String,
    pub order: f64,
    /// `(s, p, C)` with `C = ||A f||_{W^{s-m,p}} / ||f||_{W^{s,p}}`.
    pub constants: Vec<(f64, f64, f64)>,
    pub spread: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MappingCheck {
    pub estimate: &'static str,
    pub grid: String,
    pub cases: Vec<MappingCase>,
    pub pass: bool,
}

/// `W^{s,p} -> W^{s-m,p}` boundedness, measured on one random field over a
/// grid of `(s, p)`: constants may spread at most a factor 10.
pub fn mapping_check(grid: GridSpec, symbols: &[Symbol], pairs: &[(f64, f64)], seed: u64) -> Result<MappingCheck> {
    let part = LpPartition::build(grid)?;
    let f = flat_profile_field(grid, 1, seed);
    let mut cases = Vec::new();
    for a in symbols {
        let af = apply(a, &f)?;
        let constants = pairs
            .par_iter()
            .map(|&(s, p)| -> Result<(f64, f64, f64)> {
                let c = sobolev_norm(&part, &af, s - a.order(), p)? / sobolev_norm(&part, &f, s, p)?;
                Ok((s, p, c))
            })
            .collect::<Result<Vec<_>>>()?;
        let values: Vec<f64> = constants.iter().map(|c| c.2).collect();
        cases.push(MappingCase {
            symbol: a.name().to_string(),
            order: a.order(),
            spread: spread(&values),
            constants,
        });
    }
    Ok(MappingCheck {
        estimate: "Sobolev mapping property of pseudodifferential operators",
        grid: grid.label(),
        pass: cases.iter().all(|c| c.spread <= 10.0),
        cases,
    })
}

/// Resolve registry names for `dim`.
pub fn lookup_all(names: &[&str], dim: usize) -> Result<Vec<Symbol>> {
    names.iter().map(|n| registry::lookup(n, dim)).collect()
}
