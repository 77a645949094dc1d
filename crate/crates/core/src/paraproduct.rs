//! Frequency-interaction zones of a shell of a product,
//! `P_k(V w) = sum_{i,j} P_k(P_i V P_j w) = I + II + III + IV`, and
//! two-sided reports of the per-zone estimates.
//!
//! Zones for target shell `k` (all indices clipped to `[0, top]`, with the
//! low cap at index 0):
//!
//! * LL: `k-5 <= i, j <= k+7` and `min(i, j) <= k+5`
//! * LH: `i < k-5` and `k-3 <= j <= k+3`
//! * HL: `k-3 <= i <= k+3` and `j < k-5`
//! * HH: `i, j > k+5` and `|i - j| <= 3`

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::RegularityParams;
use crate::field::{lp_norm, SpectralField};
use crate::grid::ensure_same;
use crate::lp::LpPartition;
use crate::product::{contract, pointwise_product};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Zone {
    LL,
    LH,
    HL,
    HH,
}

impl Zone {
    pub const ALL: [Zone; 4] = [Zone::LL, Zone::LH, Zone::HL, Zone::HH];

    /// Whether the pair `(i, j)` lies in this zone for target `k`
    /// (no range clipping).
    pub fn contains(self, k: i64, i: i64, j: i64) -> bool {
        match self {
            Zone::LL => {
                (k - 5..=k + 7).contains(&i) && (k - 5..=k + 7).contains(&j) && i.min(j) <= k + 5
            }
            Zone::LH => i < k - 5 && (k - 3..=k + 3).contains(&j),
            Zone::HL => (k - 3..=k + 3).contains(&i) && j < k - 5,
            Zone::HH => i > k + 5 && j > k + 5 && (i - j).abs() <= 3,
        }
    }
}

/// The four zones as literal index sets inside `[0, top]`.
#[derive(Debug, Clone, Serialize)]
pub struct ZonePartition {
    pub k: usize,
    pub top: usize,
    pub ll: BTreeSet<(usize, usize)>,
    pub lh: BTreeSet<(usize, usize)>,
    pub hl: BTreeSet<(usize, usize)>,
    pub hh: BTreeSet<(usize, usize)>,
    /// Set when the low-low square would reach beyond `top`.
    pub truncated: bool,
}

impl ZonePartition {
    pub fn zone(&self, z: Zone) -> &BTreeSet<(usize, usize)> {
        match z {
            Zone::LL => &self.ll,
            Zone::LH => &self.lh,
            Zone::HL => &self.hl,
            Zone::HH => &self.hh,
        }
    }

    pub fn classify(&self, i: usize, j: usize) -> Option<Zone> {
        Zone::ALL.into_iter().find(|z| self.zone(*z).contains(&(i, j)))
    }
}

/// Build the zone sets for shell `k`. `truncated` is set when the low-low
/// square reaches past `top`; the high-high zone is always cut at `top`.
pub fn zones(k: usize, top: usize) -> ZonePartition {
    let ki = k as i64;
    let mut sets: [BTreeSet<(usize, usize)>; 4] = Default::default();
    for i in 0..=top {
        for j in 0..=top {
            for (slot, z) in Zone::ALL.into_iter().enumerate() {
                if z.contains(ki, i as i64, j as i64) {
                    sets[slot].insert((i, j));
                }
            }
        }
    }
    let [ll, lh, hl, hh] = sets;
    ZonePartition {
        k,
        top,
        ll,
        lh,
        hl,
        hh,
        truncated: k + 7 > top,
    }
}

/// How the two factors combine pointwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Dealiased pointwise product (scalar broadcast or componentwise).
    Product,
    /// `out_i = sum_j V_j w_{j c + i}`, e.g. `(V . grad) u`.
    Contract,
}

impl Pairing {
    pub fn combine(self, v: &SpectralField, w: &SpectralField) -> Result<SpectralField> {
        match self {
            Pairing::Product => pointwise_product(v, w),
            Pairing::Contract => contract(v, w),
        }
    }
}

/// The four zone sums for shell `k`.
#[derive(Debug, Clone)]
pub struct ZoneSplit {
    pub k: usize,
    pub ll: SpectralField,
    pub lh: SpectralField,
    pub hl: SpectralField,
    pub hh: SpectralField,
}

impl ZoneSplit {
    pub fn zone(&self, z: Zone) -> &SpectralField {
        match z {
            Zone::LL => &self.ll,
            Zone::LH => &self.lh,
            Zone::HL => &self.hl,
            Zone::HH => &self.hh,
        }
    }

    pub fn total(&self) -> Result<SpectralField> {
        self.ll.add(&self.lh)?.add(&self.hl)?.add(&self.hh)
    }
}

/// Index window `[lo, hi]` clipped to `[0, top]`, `None` if empty.
fn clip(lo: i64, hi: i64, top: usize) -> Option<(usize, usize)> {
    let lo = lo.max(0);
    let hi = hi.min(top as i64);
    (lo <= hi).then_some((lo as usize, hi as usize))
}

/// Sum of `P_k(P_a V P_b w)` over the rectangle `a in ra`, `b in rb`.
fn rectangle(
    part: &LpPartition,
    pairing: Pairing,
    v: &SpectralField,
    w: &SpectralField,
    k: usize,
    ra: Option<(usize, usize)>,
    rb: Option<(usize, usize)>,
    comps: usize,
) -> Result<SpectralField> {
    match (ra, rb) {
        (Some((a0, a1)), Some((b0, b1))) => {
            let vv = part.project_window(v, a0, a1)?;
            let ww = part.project_window(w, b0, b1)?;
            part.project(&pairing.combine(&vv, &ww)?, k)
        }
        _ => Ok(SpectralField::zeros(*part.grid(), comps)),
    }
}

/// Output component count of `pairing` on these inputs.
fn output_components(pairing: Pairing, v: &SpectralField, w: &SpectralField) -> Result<usize> {
    let (cv, cw) = (v.components(), w.components());
    match pairing {
        Pairing::Product if cv == 1 || cw == 1 || cv == cw => Ok(cv.max(cw)),
        Pairing::Contract if cw % cv == 0 => Ok(cw / cv),
        _ => Err(Error::ComponentMismatch(format!(
            "{cv}- and {cw}-component factors cannot be paired"
        ))),
    }
}

/// Split `P_k(V w)` into the four zone sums. Each zone is evaluated as a
/// handful of products of windowed factors rather than pair by pair.
pub fn split(
    part: &LpPartition,
    pairing: Pairing,
    v: &SpectralField,
    w: &SpectralField,
    k: usize,
) -> Result<ZoneSplit> {
    ensure_same(v.grid(), w.grid())?;
    ensure_same(part.grid(), v.grid())?;
    let top = part.top();
    if k > top {
        return Err(Error::ShellOutOfRange { index: k, max: top });
    }
    let comps = output_components(pairing, v, w)?;
    let ki = k as i64;
    let v = v.spectral_only();
    let w = w.spectral_only();

    // LL: the full square minus the corner where both indices exceed k+5.
    let square = clip(ki - 5, ki + 7, top);
    let corner = clip(ki + 6, ki + 7, top);
    let mut ll = rectangle(part, pairing, &v, &w, k, square, square, comps)?;
    if corner.is_some() {
        ll = ll.sub(&rectangle(part, pairing, &v, &w, k, corner, corner, comps)?)?;
    }
    let lh = rectangle(part, pairing, &v, &w, k, clip(0, ki - 6, top), clip(ki - 3, ki + 3, top), comps)?;
    let hl = rectangle(part, pairing, &v, &w, k, clip(ki - 3, ki + 3, top), clip(0, ki - 6, top), comps)?;

    // HH: one product per row i of the band |i - j| <= 3.
    let rows: Vec<usize> = (k + 6..=top).collect();
    let hh_terms = rows
        .par_iter()
        .map(|&i| {
            let band = clip((i as i64 - 3).max(ki + 6), i as i64 + 3, top);
            rectangle(part, pairing, &v, &w, k, Some((i, i)), band, comps)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut hh = SpectralField::zeros(*part.grid(), comps).spectral_only();
    for t in hh_terms {
        hh = hh.add(&t)?;
    }
    Ok(ZoneSplit { k, ll, lh, hl, hh })
}

/// Reference evaluation: `sum over pairs in each zone of P_k(P_i V P_j w)`,
/// one product per pair, plus the sum over pairs in no zone.
pub fn split_brute_force(
    part: &LpPartition,
    pairing: Pairing,
    v: &SpectralField,
    w: &SpectralField,
    k: usize,
) -> Result<(ZoneSplit, SpectralField)> {
    let top = part.top();
    let comps = output_components(pairing, v, w)?;
    let zp = zones(k, top);
    let vs: Vec<SpectralField> = (0..=top).map(|i| part.project(v, i)).collect::<Result<_>>()?;
    let ws: Vec<SpectralField> = (0..=top).map(|j| part.project(w, j)).collect::<Result<_>>()?;
    let pairs: Vec<(usize, usize)> = (0..=top).flat_map(|i| (0..=top).map(move |j| (i, j))).collect();
    let terms = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<(Option<Zone>, SpectralField)> {
            let t = part.project(&pairing.combine(&vs[i], &ws[j])?, k)?;
            Ok((zp.classify(i, j), t))
        })
        .collect::<Result<Vec<_>>>()?;
    let zero = SpectralField::zeros(*part.grid(), comps).spectral_only();
    let mut acc = [zero.clone(), zero.clone(), zero.clone(), zero.clone()];
    let mut outside = zero;
    for (z, t) in terms {
        match z {
            Some(z) => {
                let slot = Zone::ALL.iter().position(|x| *x == z).expect("zone listed");
                acc[slot] = acc[slot].add(&t)?;
            }
            None => outside = outside.add(&t)?,
        }
    }
    let [ll, lh, hl, hh] = acc;
    Ok((ZoneSplit { k, ll, lh, hl, hh }, outside))
}

/// One displayed zone inequality evaluated on data.
#[derive(Debug, Clone, Serialize)]
pub struct ZoneBound {
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`, or `None` when the right side vanishes.
    pub constant: Option<f64>,
}

impl ZoneBound {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            constant: (rhs > 0.0).then(|| lhs / rhs),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchFlags {
    /// `r >= q` selects the Hoelder-with-`L^inf` bound for HL.
    pub r_ge_q: bool,
    /// `r >= q'` selects the `L^t`, `1/t = 1/r + 1/q`, bound for HH.
    pub r_ge_q_dual: bool,
    /// `sigma - gamma - n/r < 0`.
    pub hl_kernel_negative: bool,
    /// `-alpha + beta + sigma < 0`.
    pub lifted_below_order: bool,
}

impl BranchFlags {
    pub fn from_params(p: &RegularityParams) -> Self {
        Self {
            r_ge_q: p.r >= p.q,
            r_ge_q_dual: p.r >= p.q_dual(),
            hl_kernel_negative: p.sigma - p.gamma() - p.n() / p.r < 0.0,
            lifted_below_order: -p.alpha() + p.beta() + p.sigma < 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZoneReport {
    pub k: usize,
    /// Low-low and low-high together.
    pub ll_lh: ZoneBound,
    pub hl: ZoneBound,
    pub hh: ZoneBound,
    pub branches: BranchFlags,
}

/// Inputs shared by the zone estimates at every `k`.
#[derive(Debug, Clone)]
pub struct ZoneContext {
    pub params: RegularityParams,
    /// `a_j = 2^{sigma j} ||P_j u||_r`, `j = 0..=top`.
    pub a: Vec<f64>,
    pub delta: f64,
    pub c_rho: f64,
}

impl ZoneContext {
    /// `delta = ||V||_q`, `a_j` from the shells of `u`, `C_rho = sup a_j`.
    pub fn measure(part: &LpPartition, params: RegularityParams, v: &SpectralField, u: &SpectralField) -> Result<Self> {
        let delta = lp_norm(v, params.q)?;
        let seq = crate::lp::dyadic_norm_sequence(part, u, params.r)?;
        let a: Vec<f64> = seq
            .values
            .iter()
            .enumerate()
            .map(|(j, x)| (params.sigma * j as f64).exp2() * x)
            .collect();
        let c_rho = a.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            params,
            a,
            delta,
            c_rho,
        })
    }

    fn kernel_sum(&self, lo: i64, hi: i64, k: usize, exponent: f64) -> f64 {
        let top = self.a.len() as i64 - 1;
        (lo.max(0)..=hi.min(top))
            .map(|j| (exponent * (k as f64 - j as f64)).exp2() * self.a[j as usize])
            .sum()
    }

    /// Right sides of the displayed estimates at shell `k`.
    pub fn right_sides(&self, k: usize) -> (f64, f64, f64) {
        let p = &self.params;
        let (n, a, b, g, s, r) = (p.n(), p.alpha(), p.beta(), p.gamma(), p.sigma, p.r);
        let ki = k as i64;
        let top = self.a.len() as i64 - 1;
        let kf = k as f64;
        let low = self.delta * self.kernel_sum(ki - 20, ki + 20, k, 0.0);
        let hl = if r >= p.q {
            let e = s - g - n / r;
            self.delta * self.kernel_sum(1, ki + 10, k, e) + (e * kf).exp2() * self.c_rho
        } else {
            let e = s - a + b;
            self.delta * self.kernel_sum(1, ki + 10, k, e) + (e * kf).exp2() * self.c_rho
        };
        let hh = if r >= p.q_dual() {
            self.delta * self.kernel_sum(ki - 20, top, k, s - g)
        } else {
            self.delta * self.kernel_sum(ki - 20, top, k, -a + b + s + n - n / r)
        };
        (low, hl, hh)
    }
}

/// Evaluate both sides of the zone estimates for `P_k(V w)` with `w = Q u`.
pub fn zone_estimate_report(
    part: &LpPartition,
    pairing: Pairing,
    ctx: &ZoneContext,
    v: &SpectralField,
    w: &SpectralField,
    k: usize,
) -> Result<ZoneReport> {
    let p = &ctx.params;
    let sp = split(part, pairing, v, w, k)?;
    let scale = ((-p.alpha() + p.beta() + p.sigma) * k as f64).exp2();
    let r = p.r;
    let lhs_low = scale * (lp_norm(&sp.ll, r)? + lp_norm(&sp.lh, r)?);
    let lhs_hl = scale * lp_norm(&sp.hl, r)?;
    let lhs_hh = scale * lp_norm(&sp.hh, r)?;
    let (rl, rhl, rhh) = ctx.right_sides(k);
    Ok(ZoneReport {
        k,
        ll_lh: ZoneBound::new(lhs_low, rl),
        hl: ZoneBound::new(lhs_hl, rhl),
        hh: ZoneBound::new(lhs_hh, rhh),
        branches: BranchFlags::from_params(p),
    })
}
