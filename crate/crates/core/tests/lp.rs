use lpw::field::relative_l2_error;
use lpw::fit::log2_slope;
use lpw::lp::{
    bernstein_ratio, dyadic_norm_sequence, profile, ring_bounds, sobolev_norm, LpPartition,
};
use lpw::rng::{random_band_field, random_weighted_field, CounterRng};
use lpw::{lp_norm, GridSpec, SpectralField};
use num_complex::Complex64;
use proptest::prelude::*;

fn part(dim: usize, n: usize) -> LpPartition {
    LpPartition::build(GridSpec::new(dim, n).unwrap()).unwrap()
}

#[test]
fn profiles_sum_to_one_at_radius_seven() {
    let sum: f64 = (0..12).map(|j| profile(j, 7.0)).sum();
    assert!((sum - 1.0).abs() <= 1e-14);
}

#[test]
fn shell_three_profile_values() {
    let centre = profile(3, 8.0);
    assert!(centre > 0.0 && centre <= 1.0);
    assert_eq!(profile(3, 16.0 * 5.0 / 3.0 + 1.0), 0.0);
    let (lo, hi) = ring_bounds(3);
    assert_eq!(profile(3, lo - 1e-9), 0.0);
    assert_eq!(profile(3, hi + 1e-9), 0.0);
}

#[test]
fn profiles_lie_in_unit_interval() {
    for j in 0..10 {
        for i in 0..4000 {
            let v = profile(j, i as f64 * 0.25);
            assert!((0.0..=1.0).contains(&v), "j={j} r={}", i as f64 * 0.25);
        }
    }
}

#[test]
fn build_rejects_grids_without_three_shells() {
    assert!(LpPartition::build(GridSpec::new(1, 16).unwrap()).is_ok());
    assert!(GridSpec::new(1, 8).is_err());
}

#[test]
fn partition_of_unity_and_disjoint_rings() {
    for (d, n) in [(1, 1024), (2, 128), (3, 32)] {
        let p = part(d, n);
        assert!(p.partition_deviation() <= 1e-14);
        for i in 0..=p.top() {
            let a = p.multiplier(i).unwrap();
            for j in i + 2..=p.top() {
                let b = p.multiplier(j).unwrap();
                assert!(a.iter().zip(&b).all(|(x, y)| x * y == 0.0), "shells {i},{j}");
            }
        }
    }
}

#[test]
fn projection_of_ring_centre_mode() {
    let p = part(2, 128);
    for j in 2..=5 {
        let f = SpectralField::plane_wave(*p.grid(), &[1 << j, 0]).unwrap();
        let got = p.project(&f, j).unwrap();
        let want = f.scale(Complex64::new(profile(j, (j as f64).exp2()), 0.0));
        assert!(relative_l2_error(&got, &want).unwrap() < 1e-14);
    }
}

#[test]
fn low_modes_vanish_on_high_shells() {
    let p = part(2, 64);
    let f = random_band_field(*p.grid(), 1, 0.0, 1.0, 4);
    for j in 3..=p.top() {
        assert!(p.project(&f, j).unwrap().coefficient_norm() <= 1e-14 * f.coefficient_norm());
    }
    assert!(p.project(&f, 1).is_ok());
    assert!(p.project(&f, p.top() + 1).is_err());
}

#[test]
fn reconstruction_from_all_shells() {
    let p = part(2, 128);
    let f = random_weighted_field(*p.grid(), 1, 2, |r| 1.0 / (1.0 + r));
    let mut sum = SpectralField::zeros(*p.grid(), 1);
    for j in 0..=p.top() {
        sum = sum.add(&p.project(&f, j).unwrap()).unwrap();
    }
    assert!(relative_l2_error(&sum, &f).unwrap() <= 1e-12);
}

#[test]
fn project_range_windows() {
    let p = part(2, 128);
    let f = random_weighted_field(*p.grid(), 1, 3, |r| 1.0 / (1.0 + r));
    let top = p.top() as i64;
    let full = p.project_range(&f, -1, top + 1).unwrap();
    assert!(relative_l2_error(&full, &f).unwrap() < 1e-13);
    let without_cap = p.project_range(&f, 0, top + 1).unwrap();
    let cap = p.project(&f, 0).unwrap();
    assert!(relative_l2_error(&without_cap.add(&cap).unwrap(), &f).unwrap() < 1e-13);
    for (a, b) in [(3, 4), (4, 4), (5, 2)] {
        assert_eq!(p.project_range(&f, a, b).unwrap().coefficient_norm(), 0.0);
    }
    for k in 2..=p.top() - 1 {
        let window = p.project_range(&f, k as i64 - 2, k as i64 + 2).unwrap();
        let again = p.project(&window, k).unwrap();
        let direct = p.project(&f, k).unwrap();
        assert!(relative_l2_error(&again, &direct).unwrap() < 1e-12, "k={k}");
    }
}

#[test]
fn bernstein_ratio_examples() {
    let grid = GridSpec::new(2, 64).unwrap();
    let f = random_band_field(grid, 1, 0.0, 8.0, 1);
    assert!((bernstein_ratio(&f, 3, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-12);
    let w = SpectralField::plane_wave(grid, &[3, 2]).unwrap();
    for (p, q) in [(1.0, 2.0), (2.0, f64::INFINITY), (1.5, 4.0)] {
        let want = (-(2.0 * 3.0) * (1.0 / p - if q.is_infinite() { 0.0 } else { 1.0 / q })).exp2();
        assert!((bernstein_ratio(&w, 3, p, q).unwrap() - want).abs() < 1e-12);
    }
    assert!(bernstein_ratio(&f, 2, 2.0, 4.0).is_err());
    assert!(bernstein_ratio(&f, 3, 4.0, 2.0).is_err());
}

/// Random nonnegative coefficients on the ball of radius `2^j`. Random
/// phases would never saturate the inequality.
fn coherent_ball(grid: GridSpec, j: usize, seed: u64) -> SpectralField {
    let mut rng = CounterRng::new(seed);
    let radius = (j as f64).exp2();
    let norms = grid.frequency_norms();
    let spec = (0..grid.len())
        .map(|i| {
            let a = rng.uniform();
            Complex64::new(if norms[i] <= radius { a } else { 0.0 }, 0.0)
        })
        .collect();
    SpectralField::from_spectral(grid, 1, spec).unwrap()
}

#[test]
fn bernstein_constants_are_flat_in_j() {
    let grid = GridSpec::new(2, 256).unwrap();
    let ratios: Vec<f64> = (3..=7)
        .map(|j| bernstein_ratio(&coherent_ball(grid, j, 100 + j as u64), j, 2.0, f64::INFINITY).unwrap())
        .collect();
    let max = ratios.iter().copied().fold(0.0, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(max / min <= 4.0, "{ratios:?}");
}

#[test]
fn sobolev_norm_examples() {
    let p = part(2, 128);
    let grid = *p.grid();
    let f = random_weighted_field(grid, 1, 8, |r| 1.0 / (1.0 + r * r));
    let l2 = lp_norm(&f, 2.0).unwrap();
    let w = sobolev_norm(&p, &f, 0.0, 2.0).unwrap();
    assert!(w <= 2f64.sqrt() * l2 && w >= l2 / 2f64.sqrt());

    assert_eq!(sobolev_norm(&p, &SpectralField::zeros(grid, 1), 1.0, 3.0).unwrap(), 0.0);
    assert!(sobolev_norm(&p, &f, 0.0, 1.0).is_err());
    assert!(sobolev_norm(&p, &f, 0.0, f64::INFINITY).is_err());

    // A mode at the centre of ring j sits where only phi_j is nonzero.
    for (j, s, q) in [(3usize, 1.0, 2.0), (4, 0.5, 3.0), (5, -0.5, 1.5)] {
        let m = SpectralField::plane_wave(grid, &[0, 1 << j]).unwrap();
        let want = (j as f64 * s).exp2() * lp_norm(&m, q).unwrap() * profile(j, (j as f64).exp2());
        let got = sobolev_norm(&p, &m, s, q).unwrap();
        assert!((got / want - 1.0).abs() < 1e-12, "j={j}");
    }
}

/// Field whose spectrum is one on the band where `phi_j` is identically one.
fn exact_band(grid: GridSpec, j: usize) -> SpectralField {
    let s = (j as f64).exp2();
    random_weighted_field(grid, 1, 5, |r| if r >= 0.84 * s && r <= 1.19 * s { 1.0 } else { 0.0 })
}

#[test]
fn dyadic_sequence_examples() {
    let p = part(2, 128);
    let grid = *p.grid();
    let seq = dyadic_norm_sequence(&p, &exact_band(grid, 4), 2.0).unwrap();
    for (j, v) in seq.values.iter().enumerate() {
        if j.abs_diff(4) > 1 {
            assert!(*v <= 1e-14 * seq.values[4], "j={j}");
        }
    }
    assert!(seq.values.iter().all(|v| *v >= 0.0));

    let gauss: Vec<Complex64> = grid
        .frequency_norms()
        .iter()
        .map(|r| Complex64::new((-r * r / 2.0).exp(), 0.0))
        .collect();
    let gauss = SpectralField::from_spectral(grid, 1, gauss).unwrap();
    let g = dyadic_norm_sequence(&p, &gauss, 2.0).unwrap();
    for j in 6..=p.top() {
        assert!(g.values[j] <= (-10.0 * j as f64).exp2() * g.values[0], "j={j}");
    }

    let csv = seq.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("j,norm,log2norm"));
    assert_eq!(lines.count(), p.top() + 1);
}

#[test]
fn almost_orthogonality_is_exact() {
    let p = part(2, 128);
    let f = random_weighted_field(*p.grid(), 1, 1, |_| 1.0);
    for i in 0..=p.top() {
        let pi = p.project(&f, i).unwrap();
        for j in i + 2..=p.top() {
            assert_eq!(p.project(&pi, j).unwrap().coefficient_norm(), 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shells_are_uniformly_bounded(seed in any::<u64>(), r in prop_oneof![Just(1.5), Just(2.0), Just(4.0), Just(f64::INFINITY)]) {
        let p = part(2, 64);
        let f = random_weighted_field(*p.grid(), 1, seed, |x| 1.0 / (1.0 + x));
        let total = lp_norm(&f, r).unwrap();
        let seq = dyadic_norm_sequence(&p, &f, r).unwrap();
        for v in seq.values {
            prop_assert!(v <= 3.0 * total);
        }
    }

    #[test]
    fn shells_bounded_by_sobolev_norm(
        seed in any::<u64>(),
        s in -1.0f64..2.0,
        q in 1.2f64..6.0,
    ) {
        let p = part(2, 64);
        let f = random_weighted_field(*p.grid(), 1, seed, |x| (1.0 + x).powf(-1.5));
        let w = sobolev_norm(&p, &f, s, q).unwrap();
        let seq = dyadic_norm_sequence(&p, &f, q).unwrap();
        for (k, v) in seq.values.iter().enumerate() {
            prop_assert!(*v <= 4.0 * w * (-s * k as f64).exp2(), "k={}", k);
        }
    }

    #[test]
    fn synthesized_coefficients_bound_sobolev_norm(
        seed in any::<u64>(),
        s in 0.0f64..1.5,
        eps in 0.2f64..1.0,
        q in 1.5f64..4.0,
        level in 0.1f64..10.0,
    ) {
        let p = part(2, 128);
        let grid = *p.grid();
        let mut f = SpectralField::zeros(grid, 1);
        for k in 1..=p.resolved() {
            let c = (k as f64).exp2();
            let piece = random_band_field(grid, 1, 0.9 * c, 1.1 * c, seed.wrapping_add(k as u64));
            let target = level * (-(s + eps) * k as f64).exp2();
            let piece = piece.scale(Complex64::new(target / lp_norm(&piece, q).unwrap(), 0.0));
            f = f.add(&piece).unwrap();
        }
        let w = sobolev_norm(&p, &f, s, q).unwrap();
        let c_eps = 3.0 / (1.0 - (-eps).exp2());
        prop_assert!(w <= c_eps * level, "w={} bound={}", w, c_eps * level);
    }

    #[test]
    fn bernstein_slope_is_bounded(seed in any::<u64>(), q in prop_oneof![Just(4.0), Just(f64::INFINITY)]) {
        let p = part(2, 256);
        let f = random_weighted_field(*p.grid(), 1, seed, |_| 1.0);
        let shells: Vec<usize> = (2..=p.resolved()).collect();
        let gaps: Vec<f64> = shells
            .iter()
            .map(|&j| {
                let pj = p.project(&f, j).unwrap();
                lp_norm(&pj, q).unwrap() / lp_norm(&pj, 2.0).unwrap()
            })
            .collect();
        let slope = log2_slope(&shells, &gaps).unwrap().slope;
        let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
        prop_assert!(slope <= 2.0 * (0.5 - inv_q) + 0.1, "slope {}", slope);
    }
}
