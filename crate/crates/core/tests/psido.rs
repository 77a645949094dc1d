use lpw::cutoff::{bump, cutoff_field};
use lpw::field::relative_l2_error;
use lpw::lp::{profile, LpPartition};
use lpw::psido::{
    ap_shell_ratio, apply, apply_direct, commutator_field, commutator_shell,
    commutator_symbol_remainder, cutoff_commutator, cutoff_commutator_order, ellipticity_margin,
    parametrix, registry, relative_shell_slope, split_elliptic, SeparableTerm, Symbol, SymbolKind,
};
use lpw::rng::{random_band_field, random_weighted_field};
use lpw::verify::{flat_profile_field, spread};
use lpw::{lp_norm, GridSpec, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

fn grid(d: usize, n: usize) -> GridSpec {
    GridSpec::new(d, n).unwrap()
}

/// `(A f)(x) = sum_xi e^{i x.xi} a(x, xi) fhat(xi)` written out directly.
fn quantize_oracle(a: &Symbol, f: &SpectralField) -> Vec<Complex64> {
    let g = *f.grid();
    let d = g.dim();
    let spec = f.spectral();
    (0..g.len())
        .map(|p| {
            let x = g.point(p);
            let mut acc = Complex64::default();
            for (i, c) in spec.iter().enumerate() {
                if g.is_nyquist(i) {
                    continue;
                }
                let xi = g.frequency(i);
                let phase: f64 = (0..d).map(|k| x[k] * xi[k]).sum();
                acc += Complex64::from_polar(1.0, phase) * a.eval(&x[..d], &xi[..d]) * c;
            }
            acc
        })
        .collect()
}

fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

/// Spectral derivative along `axis`, computed from the coefficients.
fn derivative(f: &SpectralField, axis: usize) -> SpectralField {
    let g = *f.grid();
    let spec = f
        .spectral()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if g.is_nyquist(i) {
                Complex64::default()
            } else {
                c * Complex64::new(0.0, g.frequency(i)[axis])
            }
        })
        .collect();
    SpectralField::from_spectral(g, 1, spec).unwrap()
}

fn sample_product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let v = a.physical().iter().zip(b.physical().iter()).map(|(x, y)| x * y).collect();
    SpectralField::from_physical(*a.grid(), 1, v).unwrap()
}

#[test]
fn laplacian_on_plane_wave() {
    let g = grid(2, 32);
    let w = SpectralField::plane_wave(g, &[3, -4]).unwrap();
    let got = apply(&registry::laplacian(), &w).unwrap();
    assert!(relative_l2_error(&got, &w.scale(re(25.0))).unwrap() < 1e-13);
}

#[test]
fn multiplication_symbol_is_pointwise_product() {
    let g = grid(2, 32);
    let f = random_band_field(g, 1, 0.0, 8.0, 1);
    let b = Symbol::multiplication("2+sin", |x| re(2.0 + x[0].sin() * x[1].cos()));
    let got = apply(&b, &f).unwrap();
    let bf = SpectralField::from_fn(g, |x| re(2.0 + x[0].sin() * x[1].cos()));
    assert!(relative_l2_error(&got, &sample_product(&bf, &f)).unwrap() < 1e-13);
}

#[test]
fn fast_and_direct_paths_match_oracle() {
    let g = grid(2, 16);
    let f = random_weighted_field(g, 1, 3, |_| 1.0);
    for name in ["sep:cos1*abs^1", "sep:2+sin1*bessel^2;cos2*abs^1", "laplacian", "sep:expcos2*1"] {
        let a = registry::lookup(name, 2).unwrap();
        let fast = apply(&a, &f).unwrap();
        let direct = apply_direct(&a, &f).unwrap();
        let oracle = quantize_oracle(&a, &f);
        assert!(max_rel(&fast.physical(), &oracle) < 1e-12, "{name}");
        assert!(max_rel(&direct.physical(), &oracle) < 1e-12, "{name}");
        let general = a.without_separable();
        assert_eq!(general.kind(), if a.kind() == SymbolKind::Multiplier { SymbolKind::Multiplier } else { SymbolKind::General });
        assert!(max_rel(&apply(&general, &f).unwrap().physical(), &oracle) < 1e-12, "{name}");
    }
}

#[test]
fn order_overflow_is_reported() {
    let g = grid(1, 1 << 12);
    let f = random_band_field(g, 1, 0.0, 10.0, 1);
    assert!(apply(&registry::homogeneous(400.0), &f).is_err());
    let big = grid(2, 256);
    let h = random_band_field(big, 1, 0.0, 10.0, 1);
    assert!(apply_direct(&registry::lookup("sep:cos1*1", 2).unwrap(), &h).is_err());
}

#[test]
fn separable_form_matches_eval() {
    let a = registry::lookup("sep:2+sin1*bessel^2;cos2*abs^1", 2).unwrap();
    let terms = a.separable_terms().unwrap();
    for (x, xi) in [([0.3, 1.2], [3.0, -4.0]), ([5.0, 0.0], [0.0, 0.0]), ([2.0, 6.1], [-7.0, 11.0])] {
        let sum: Complex64 = terms.iter().map(|t| (t.space)(&x) * (t.freq)(&xi)).sum();
        assert!((sum - a.eval(&x, &xi)).norm() <= 1e-12 * sum.norm().max(1.0));
    }
}

#[test]
fn declared_orders_bound_the_registry_symbols() {
    let g = grid(2, 64);
    let names = [
        "identity",
        "laplacian",
        "bilaplacian",
        "fractional_laplacian:0.75",
        "bessel:-1",
        "grad:2",
        "sep:2+cos1*bessel^1",
        "sep:2+sin1*bessel^2;cos2*abs^1",
    ];
    for name in names {
        let a = registry::lookup(name, 2).unwrap();
        let mut worst: f64 = 0.0;
        for p in (0..g.len()).step_by(97) {
            let x = g.point(p);
            for i in 0..g.len() {
                let xi = g.frequency(i);
                let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                worst = worst.max(a.eval(&x[..2], &xi[..2]).norm() / (1.0 + r).powf(a.order()));
            }
        }
        assert!(worst <= 4.0, "{name}: {worst}");
    }
}

#[test]
fn ellipticity_margin_examples() {
    let g = grid(2, 32);
    for alpha in [1.0, 2.0, 3.5] {
        let m = ellipticity_margin(&registry::homogeneous(alpha), &g, 1.0).unwrap();
        assert!((m - 1.0).abs() < 1e-12);
    }
    assert_eq!(ellipticity_margin(&registry::partial(0), &g, 1.0).unwrap(), 0.0);

    let a = registry::lookup("sep:2+sin1*bessel^2", 2).unwrap();
    let got = ellipticity_margin(&a, &g, 4.0).unwrap();
    let mut scan = f64::INFINITY;
    for p in 0..g.len() {
        let x = g.point(p);
        for i in 0..g.len() {
            if g.is_nyquist(i) {
                continue;
            }
            let xi = g.frequency(i);
            let r2 = xi[0] * xi[0] + xi[1] * xi[1];
            if r2 >= 16.0 {
                scan = scan.min((2.0 + x[0].sin()) * (1.0 + r2) / r2);
            }
        }
    }
    assert!((got - scan).abs() < 1e-12 * scan);
    assert!(got >= 1.0);
}

#[test]
fn split_of_a_global_multiplier_is_trivial() {
    let g = grid(2, 32);
    let l = registry::bessel(2.0);
    let s = split_elliptic(&l, &g, 4.0).unwrap();
    let f = random_weighted_field(g, 1, 2, |_| 1.0);
    assert!(relative_l2_error(&apply(&s.e, &f).unwrap(), &apply(&l, &f).unwrap()).unwrap() < 1e-14);
    assert_eq!(apply(&s.m, &f).unwrap().coefficient_norm(), 0.0);
}

#[test]
fn split_freezes_coefficients_outside_the_ball() {
    let g = grid(2, 64);
    // chi vanishes on B_2, where the frozen extension keeps L untouched.
    let chi = |x: &[f64]| 1.0 - bump(x, 2.0);
    let l = Symbol::separable(
        "(1+chi)(1+|xi|^2)",
        2.0,
        vec![SeparableTerm::new(move |x| re(1.0 + chi(x)), |xi| re(1.0 + xi.iter().map(|a| a * a).sum::<f64>()))],
    );
    let s = split_elliptic(&l, &g, 4.0).unwrap();
    for p in (0..g.len()).step_by(37) {
        let x = g.point(p);
        for xi in [[0.0, 0.0], [3.0, 1.0], [-9.0, 12.0]] {
            let sym = 1.0 + xi[0] * xi[0] + xi[1] * xi[1];
            assert!((s.e.eval(&x[..2], &xi) - re(sym)).norm() < 1e-12 * sym);
            assert!((s.m.eval(&x[..2], &xi) - re(chi(&x[..2]) * sym)).norm() < 1e-12 * sym);
            let total = s.e.eval(&x[..2], &xi) + s.m.eval(&x[..2], &xi);
            assert!((total - l.eval(&x[..2], &xi)).norm() < 1e-12 * sym);
        }
    }
    assert!(s.margin > 0.0);
}

#[test]
fn split_is_consistent_under_quantization() {
    let g = grid(2, 64);
    let l = registry::lookup("sep:2+sin1*bessel^2", 2).unwrap();
    let s = split_elliptic(&l, &g, 4.0).unwrap();
    let f = random_weighted_field(g, 1, 7, |r| 1.0 / (1.0 + r * r));
    let sum = apply(&s.e, &f).unwrap().add(&apply(&s.m, &f).unwrap()).unwrap();
    assert!(relative_l2_error(&sum, &apply(&l, &f).unwrap()).unwrap() < 1e-12);
    assert!(split_elliptic(&registry::partial(0), &g, 4.0).is_err());
}

#[test]
fn parametrix_of_a_multiplier_inverts_it() {
    let g = grid(2, 64);
    let e = registry::bessel(2.0);
    let b = parametrix(&e, &g, 0.0).unwrap();
    for xi in [[0.0, 0.0], [5.0, -2.0]] {
        let want = 1.0 / (1.0 + xi[0] * xi[0] + xi[1] * xi[1]);
        assert!((b.eval(&[0.0, 0.0], &xi) - re(want)).norm() < 1e-15);
    }
    let f = random_weighted_field(g, 1, 4, |_| 1.0);
    let back = apply(&b, &apply(&e, &f).unwrap()).unwrap();
    assert!(relative_l2_error(&back, &f).unwrap() < 1e-12);

    let c2 = 4.0;
    let b = parametrix(&e, &g, c2).unwrap();
    let high = random_weighted_field(g, 1, 5, |r| if r >= c2 { 1.0 } else { 0.0 });
    let back = apply(&b, &apply(&e, &high).unwrap()).unwrap();
    assert!(relative_l2_error(&back, &high).unwrap() <= 1e-10);
}

#[test]
fn parametrix_defect_gains_one_order() {
    let g = grid(1, 1 << 12);
    let part = LpPartition::build(g).unwrap();
    let e = registry::lookup("sep:2+sin1*bessel^2", 1).unwrap();
    let b = parametrix(&e, &g, 4.0).unwrap();
    let f = flat_profile_field(g, 1, 3);
    let defect = apply(&b, &apply(&e, &f).unwrap()).unwrap().sub(&f).unwrap();
    let shells: Vec<usize> = (4..=9).collect();
    let rep = relative_shell_slope(&part, &defect, &f, &shells).unwrap();
    let slope = rep.fit.unwrap().slope;
    assert!(slope <= -0.8, "slope {slope}, ratios {:?}", rep.ratios);
}

#[test]
fn shell_ratio_of_a_single_mode() {
    let g = grid(2, 256);
    let part = LpPartition::build(g).unwrap();
    for (k, m) in [(3usize, 2.0), (5, 1.5), (6, 0.5)] {
        let t = (0.9 * (k as f64).exp2()).round() as i64;
        let w = SpectralField::plane_wave(g, &[t, 0]).unwrap();
        let got = ap_shell_ratio(&part, &registry::homogeneous(m), &w, k, 2.0).unwrap().unwrap();
        let want = profile(k, t as f64) * (t as f64 / (k as f64).exp2()).powf(m);
        assert!((got - want).abs() < 1e-12 * want);
        assert!(got >= 0.6f64.powf(m) && got <= (5.0f64 / 3.0).powf(m));
    }
    let f = flat_profile_field(g, 1, 1);
    for k in 1..=part.resolved() {
        let r = ap_shell_ratio(&part, &registry::identity(), &f, k, 2.0).unwrap().unwrap();
        assert!(r <= 1.0 + 1e-12);
    }
    let empty = SpectralField::zeros(g, 1);
    assert!(ap_shell_ratio(&part, &registry::identity(), &empty, 3, 2.0).unwrap().is_none());
}

#[test]
fn shell_ratio_of_a_separable_symbol_is_uniform() {
    let g = grid(2, 256);
    let part = LpPartition::build(g).unwrap();
    let a = registry::lookup("sep:2+cos1*bessel^1", 2).unwrap();
    let f = flat_profile_field(g, 1, 9);
    let ratios: Vec<f64> = (1..=part.resolved())
        .map(|k| ap_shell_ratio(&part, &a, &f, k, 2.0).unwrap().unwrap())
        .collect();
    assert!(spread(&ratios) <= 10.0, "{ratios:?}");
}

#[test]
fn multipliers_commute_with_shells() {
    let g = grid(2, 64);
    let part = LpPartition::build(g).unwrap();
    let f = random_weighted_field(g, 1, 1, |_| 1.0);
    for a in [registry::laplacian(), registry::bessel(-1.0), registry::homogeneous(0.5)] {
        for k in 0..=part.top() {
            assert_eq!(commutator_shell(&part, &a, &f, k, 2.0).unwrap(), 0.0);
            let scale = apply(&a, &f).unwrap().coefficient_norm();
            assert!(commutator_field(&part, &a, &f, k).unwrap().coefficient_norm() <= 1e-13 * scale);
        }
    }
}

#[test]
fn commutator_with_a_modulation_matches_shifted_profiles() {
    let g = grid(2, 64);
    let part = LpPartition::build(g).unwrap();
    let f = random_band_field(g, 1, 0.0, 25.0, 2);
    let a = Symbol::multiplication("e^{ix1}", |x| Complex64::from_polar(1.0, x[0]));
    let spec = f.spectral();
    for k in 1..=5 {
        let got = commutator_field(&part, &a, &f, k).unwrap();
        // (e^{i x1} f)^(xi) = fhat(xi - e1).
        let want: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let xi = g.frequency(i);
                let src = [xi[0] as i64 - 1, xi[1] as i64];
                let (Some(a0), Some(a1)) = (g.axis_index(src[0]), g.axis_index(src[1])) else {
                    return Complex64::default();
                };
                let j = g.flat_index(&[a0, a1]);
                if g.is_nyquist(j) || g.is_nyquist(i) {
                    return Complex64::default();
                }
                let r_here = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
                let r_src = ((src[0] * src[0] + src[1] * src[1]) as f64).sqrt();
                spec[j] * (profile(k, r_here) - profile(k, r_src))
            })
            .collect();
        assert!(max_rel(&got.spectral(), &want) < 1e-12 || got.coefficient_norm() < 1e-14, "k={k}");
    }
}

#[test]
fn remainder_vanishes_for_multipliers_and_modulations() {
    let g = grid(1, 64);
    let rep = commutator_symbol_remainder(&registry::bessel(1.0), &g, 8, 1 << 11).unwrap();
    assert!(rep.near == 0.0 && rep.high == 0.0 && rep.low == 0.0);
    let a = Symbol::multiplication("e^{ix1}", |x| Complex64::from_polar(1.0, x[0]));
    let r8 = commutator_symbol_remainder(&a, &g, 8, 1 << 11).unwrap();
    let r10 = commutator_symbol_remainder(&a, &g, 10, 1 << 13).unwrap();
    assert!(r8.near > 0.0 && r10.near > 0.0);
    for r in [&r8, &r10] {
        assert!(r.high <= 1e-12 && r.low <= 1e-12);
    }
    assert!(r10.low <= 1e-12 || r8.low >= 256.0 * r10.low);
}

#[test]
fn laplacian_cutoff_commutator_follows_leibniz() {
    let g = grid(2, 64);
    // Band-limited bump, so that every product stays on the grid.
    let eta = SpectralField::from_fn(g, |x| re(((1.0 + x[0].cos()) / 2.0).powi(4) * ((1.0 + x[1].cos()) / 2.0).powi(4)));
    let f = random_band_field(g, 1, 0.0, 10.0, 3);
    let got = cutoff_commutator(&registry::laplacian(), &eta, &f).unwrap();
    let lap_eta = derivative(&derivative(&eta, 0), 0).add(&derivative(&derivative(&eta, 1), 1)).unwrap();
    let mut want = sample_product(&lap_eta, &f);
    for axis in 0..2 {
        let term = sample_product(&derivative(&eta, axis), &derivative(&f, axis));
        want = want.add(&term.scale(re(2.0))).unwrap();
    }
    assert!(relative_l2_error(&got, &want).unwrap() < 1e-10);

    let one = SpectralField::constant(g, re(1.0));
    let zero = cutoff_commutator(&registry::identity(), &one, &f).unwrap();
    assert!(zero.coefficient_norm() < 1e-14 * f.coefficient_norm());
}

#[test]
fn cutoff_commutator_gains_one_order() {
    let g = grid(1, 1 << 12);
    let part = LpPartition::build(g).unwrap();
    let eta = cutoff_field(g, 0.5).unwrap();
    let f = flat_profile_field(g, 1, 4);
    let shells: Vec<usize> = (4..=9).collect();
    let rep = cutoff_commutator_order(&part, &registry::bessel(2.0), &eta, &f, &shells).unwrap();
    let slope = rep.fit.unwrap().slope;
    assert!(slope <= 1.2, "slope {slope}");
}

#[test]
fn leray_projection_properties() {
    let g = grid(2, 64);
    let p = registry::leray(2);
    let phi = random_weighted_field(g, 1, 1, |r| if r > 0.0 { 1.0 / (1.0 + r * r) } else { 0.0 });
    let grad = apply(&registry::gradient(2), &phi).unwrap();
    assert!(apply(&p, &grad).unwrap().coefficient_norm() <= 1e-12 * grad.coefficient_norm());

    // u = (d2 psi, -d1 psi) is divergence free.
    let psi = random_weighted_field(g, 1, 2, |r| 1.0 / (1.0 + r * r));
    let u = SpectralField::stack(&[derivative(&psi, 1), derivative(&psi, 0).scale(re(-1.0))]).unwrap();
    assert!(relative_l2_error(&apply(&p, &u).unwrap(), &u).unwrap() < 1e-12);

    let v = random_weighted_field(g, 2, 3, |_| 1.0);
    let pv = apply(&p, &v).unwrap();
    assert!(relative_l2_error(&apply(&p, &pv).unwrap(), &pv).unwrap() < 1e-12);
    let div = apply(&registry::divergence(2), &pv).unwrap();
    assert!(div.coefficient_norm() <= 1e-12 * pv.coefficient_norm());
    assert!(registry::lookup("leray", 1).is_err());
}

fn space_factor(kind: u8, axis: usize, c: f64) -> impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static {
    move |x: &[f64]| {
        re(c + match kind {
            0 => x[axis].cos(),
            1 => x[axis].sin(),
            _ => x[axis].cos().exp(),
        })
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn separable_fast_path_matches_direct(
        kinds in proptest::collection::vec((0u8..3, 0usize..2, -2.0f64..2.0, 0.0f64..2.5), 1..4),
        seed in any::<u64>(),
    ) {
        let g = grid(2, 16);
        let terms: Vec<SeparableTerm> = kinds
            .iter()
            .map(|&(k, axis, c, m)| {
                SeparableTerm::new(space_factor(k, axis, c), move |xi: &[f64]| {
                    re((1.0 + xi.iter().map(|a| a * a).sum::<f64>()).powf(m / 2.0))
                })
            })
            .collect();
        let a = Symbol::separable("random", 2.5, terms);
        let f = random_weighted_field(g, 1, seed, |_| 1.0);
        let fast = apply(&a, &f).unwrap();
        let direct = apply_direct(&a, &f).unwrap();
        prop_assert!(max_rel(&fast.physical(), &direct.physical()) < 1e-12);
    }

    #[test]
    fn quantization_is_linear(seed in any::<u64>(), s in -3.0f64..3.0) {
        let g = grid(2, 32);
        let a = registry::lookup("sep:2+sin1*bessel^2;cos2*abs^1", 2).unwrap();
        let f = random_weighted_field(g, 1, seed, |r| 1.0 / (1.0 + r));
        let h = random_weighted_field(g, 1, seed ^ 1, |r| 1.0 / (1.0 + r));
        let lhs = apply(&a, &f.add(&h.scale(re(s))).unwrap()).unwrap();
        let rhs = apply(&a, &f).unwrap().add(&apply(&a, &h).unwrap().scale(re(s))).unwrap();
        prop_assert!(relative_l2_error(&lhs, &rhs).unwrap() < 1e-12);
    }

    #[test]
    fn leray_is_idempotent(seed in any::<u64>(), d in 2usize..=3) {
        let g = grid(d, 16);
        let p = registry::leray(d);
        let v = random_weighted_field(g, d, seed, |_| 1.0);
        let pv = apply(&p, &v).unwrap();
        prop_assert!(relative_l2_error(&apply(&p, &pv).unwrap(), &pv).unwrap() < 1e-12);
        prop_assert!(lp_norm(&pv, 2.0).unwrap() <= lp_norm(&v, 2.0).unwrap() * (1.0 + 1e-12));
    }
}
