//! Invariant and property checks across the crate: root completeness,
//! decomposition structure, metric axioms, bound dominance.

use proptest::prelude::*;

use tvkit::besov::{certified_modulus_constant, fit_smoothness, lipschitz_modulus_bound};
use tvkit::bounds::{
    best_decomposition_sum, radial_modulus_experiment, smoothed_comparison, smoothing_bound,
};
use tvkit::funcspace::{monotone_convex_decomposition, Polynomial, RealMap};
use tvkit::measures::{DensityModel, Pushforward};
use tvkit::rng;
use tvkit::tvmetrics::{
    l1_distance, modulus_curve, shift_modulus_pushforward, tv_gaussian_same_variance,
    tv_quadrature, ModulusCurve,
};

fn poly_from_roots(roots: &[f64]) -> Polynomial {
    let mut p = Polynomial::constant(1.0);
    for &r in roots {
        p = p.mul(&Polynomial::new(vec![-r, 1.0]));
    }
    p
}

#[test]
fn root_completeness_on_constructed_polynomials() {
    // roots on a dyadic grid keep the expanded coefficients exact, so a
    // duplicated root is a true double root rather than a perturbed
    // complex pair
    let mut r = rng::seeded(101);
    let mut case = 0;
    while case < 200 {
        let k = 1 + (rng::uniform(&mut r) * 6.0) as usize; // 1..=6
        let mut roots: Vec<f64> = (0..k)
            .map(|_| ((48.0 * rng::uniform(&mut r)) as i64 - 24) as f64 / 8.0)
            .collect();
        roots.sort_by(f64::total_cmp);
        roots.dedup();
        if roots.windows(2).any(|w| w[1] - w[0] < 0.25) {
            continue;
        }
        let double = roots.len() < 6 && case % 7 == 0;
        let mut all = roots.clone();
        if double {
            all.push(roots[0]);
        }
        let p = poly_from_roots(&all);
        let found = p.real_roots(-10.0, 10.0).unwrap();
        assert_eq!(
            found.len(),
            roots.len(),
            "case {case}: {p} -> {found:?} vs {roots:?}"
        );
        for (f, w) in found.iter().zip(&roots) {
            let tol = if double && (w - roots[0]).abs() < 1e-12 {
                1e-7
            } else {
                1e-9
            };
            assert!((f - w).abs() < tol, "case {case}: root {f} vs {w}");
        }
        case += 1;
    }
}

#[test]
fn breakpoint_count_bounded_by_degree() {
    // interior breakpoints of the monotone-convex decomposition never
    // exceed 2m - 3 (roots of f' and f'' together)
    let mut r = rng::seeded(202);
    let mut checked = 0;
    while checked < 1000 {
        let m = 2 + (rng::uniform(&mut r) * 7.0) as usize; // 2..=8
        let coeffs: Vec<f64> = (0..=m).map(|_| 4.0 * rng::uniform(&mut r) - 2.0).collect();
        let f = Polynomial::new(coeffs);
        if f.degree() < 2 {
            continue;
        }
        let bps = f
            .decomposition_breakpoints(f64::NEG_INFINITY, f64::INFINITY)
            .unwrap();
        let m = f.degree();
        assert!(
            bps.len() <= 2 * m - 3,
            "degree {m}: {} breakpoints",
            bps.len()
        );
        checked += 1;
    }
}

#[test]
fn pieces_have_constant_derivative_signs() {
    let mut r = rng::seeded(303);
    for _ in 0..50 {
        let m = 2 + (rng::uniform(&mut r) * 5.0) as usize;
        let coeffs: Vec<f64> = (0..=m).map(|_| 4.0 * rng::uniform(&mut r) - 2.0).collect();
        let f = Polynomial::new(coeffs);
        if f.degree() < 2 {
            continue;
        }
        let Ok(pieces) = monotone_convex_decomposition(&f, -4.0, 4.0) else {
            continue;
        };
        let d1 = f.derivative();
        let d2 = d1.derivative();
        for p in &pieces {
            let mut sign1 = 0.0f64;
            let mut sign2 = 0.0f64;
            for i in 1..=20 {
                let x = p.a + (p.b - p.a) * i as f64 / 21.0;
                let v1 = d1.eval(x);
                let v2 = d2.eval(x);
                // derivative roots may be interior-adjacent; tolerate
                // values at the numerical-zero scale
                if v1.abs() > 1e-9 * d1.eval_scale(x).max(1e-9) {
                    assert!(
                        sign1 * v1 >= 0.0,
                        "f' changed sign inside [{}, {}]",
                        p.a,
                        p.b
                    );
                    sign1 = v1.signum();
                }
                if v2.abs() > 1e-9 * d2.eval_scale(x).max(1e-9) {
                    assert!(
                        sign2 * v2 >= 0.0,
                        "f'' changed sign inside [{}, {}]",
                        p.a,
                        p.b
                    );
                    sign2 = v2.signum();
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivative_matches_central_difference(
        coeffs in prop::collection::vec(-2.0f64..2.0, 2..8),
        x in -2.0f64..2.0,
    ) {
        let f = Polynomial::new(coeffs);
        let d = f.derivative();
        let h = 1e-5;
        let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
        let exact = d.eval(x);
        let scale = d.eval_scale(x).max(1.0);
        prop_assert!((fd - exact).abs() <= 1e-6 * scale, "{fd} vs {exact}");
    }

    #[test]
    fn eval_is_horner_consistent(
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..7),
        x in -3.0f64..3.0,
    ) {
        let f = Polynomial::new(coeffs.clone());
        let direct: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * x.powi(k as i32))
            .sum();
        prop_assert!((f.eval(x) - direct).abs() <= 1e-10 * (1.0 + direct.abs()));
    }

    #[test]
    fn trig_derivative_matches_central_difference(
        cos in prop::collection::vec(-1.5f64..1.5, 1..4),
        sin_tail in prop::collection::vec(-1.5f64..1.5, 0..3),
        x in -3.0f64..3.0,
    ) {
        let n = cos.len().max(sin_tail.len() + 1);
        let mut c = cos.clone();
        c.resize(n, 0.0);
        let mut s = vec![0.0];
        s.extend(&sin_tail);
        s.resize(n, 0.0);
        let f = tvkit::funcspace::TrigPolynomial::new(c, s).unwrap();
        let d = f.derivative();
        let h = 1e-6;
        let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
        prop_assert!((fd - d.eval(x)).abs() <= 1e-5 * (1.0 + d.eval(x).abs()));
    }
}

#[test]
fn tv_symmetry_is_exact() {
    let model = DensityModel::standard_gaussian();
    let pf = Pushforward::new(Polynomial::monomial(1.0, 2), model.clone()).unwrap();
    let pg = Pushforward::new(Polynomial::new(vec![0.1, 0.2, 1.0]), model).unwrap();
    let ab = tv_quadrature(&pf, &pg, 1e-8).unwrap().value;
    let ba = tv_quadrature(&pg, &pf, 1e-8).unwrap().value;
    assert_eq!(ab.to_bits(), ba.to_bits(), "{ab} vs {ba}");
}

#[test]
fn tv_triangle_inequality_on_random_pushforwards() {
    let mut r = rng::seeded(404);
    let model = DensityModel::standard_gaussian();
    for _ in 0..8 {
        let mk = |r: &mut rng::Rng| {
            let deg = 1 + (rng::uniform(r) * 3.0) as usize;
            let coeffs: Vec<f64> = (0..=deg).map(|_| 2.0 * rng::uniform(r) - 1.0).collect();
            Polynomial::new(coeffs)
        };
        let (f, g, h) = (mk(&mut r), mk(&mut r), mk(&mut r));
        if f.is_constant() || g.is_constant() || h.is_constant() {
            continue;
        }
        let pf = Pushforward::new(f, model.clone()).unwrap();
        let pg = Pushforward::new(g, model.clone()).unwrap();
        let ph = Pushforward::new(h, model.clone()).unwrap();
        let fg = tv_quadrature(&pf, &pg, 1e-7).unwrap().value;
        let gh = tv_quadrature(&pg, &ph, 1e-7).unwrap().value;
        let fh = tv_quadrature(&pf, &ph, 1e-7).unwrap().value;
        assert!(
            fh <= fg + gh + 1e-6,
            "triangle violated: {fh} > {fg} + {gh}"
        );
        for v in [fg, gh, fh] {
            assert!((0.0..=2.0 + 1e-6).contains(&v), "TV out of range: {v}");
        }
    }
}

#[test]
fn gaussian_linear_bound_strict_for_positive_shift() {
    let mut r = rng::seeded(505);
    for _ in 0..100 {
        let dmu = 3.0 * rng::uniform(&mut r);
        let sigma = 0.1 + 2.0 * rng::uniform(&mut r);
        let v = tv_gaussian_same_variance(0.0, dmu, sigma);
        let bound = 2.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt()) * dmu;
        if dmu == 0.0 {
            assert_eq!(v, 0.0);
        } else {
            assert!(v < bound, "bound not strict at dmu={dmu}, sigma={sigma}");
        }
    }
}

#[test]
fn modulus_curve_respects_mass_ceiling() {
    let model = DensityModel::lebesgue_on(0.0, 0.5).unwrap();
    let f = Polynomial::monomial(1.0, 2);
    let grid = ModulusCurve::geometric_grid(1e-3, 2.0, 12).unwrap();
    let curve = modulus_curve(&f, &model, &grid, 1e-8).unwrap();
    let ceiling = 2.0 * curve.mass + 1e-6;
    for (u, d) in curve.u_grid.iter().zip(&curve.delta_values) {
        assert!(*d <= ceiling, "delta({u}) = {d} above 2 * mass");
        assert!(*d >= 0.0);
    }
    // saturation: far shifts separate the supports entirely
    assert!((curve.delta_values.last().unwrap() - 2.0 * curve.mass).abs() < 1e-6);
}

#[test]
fn certificates_dominate_measured_moduli() {
    let model = DensityModel::standard_gaussian();
    let grid = ModulusCurve::geometric_grid(1e-4, 1.0, 14).unwrap();
    for (f, m_max) in [
        (Polynomial::monomial(1.0, 2), 2u32),
        (Polynomial::monomial(1.0, 3), 3),
        (Polynomial::new(vec![0.0, 0.0, -1.0, 0.0, 1.0]), 2), // x^4 - x^2
    ] {
        let cert = certified_modulus_constant(&f, &model, 1e-6).unwrap();
        assert!(
            (cert.alpha - 1.0 / m_max as f64).abs() < 1e-12,
            "{f}: alpha {}",
            cert.alpha
        );
        let curve = modulus_curve(&f, &model, &grid, 1e-8).unwrap();
        for (u, d) in curve.u_grid.iter().zip(&curve.delta_values) {
            let bound = cert.total_constant * u.powf(cert.alpha);
            assert!(*d <= bound + 1e-6, "{f}: delta({u}) = {d} > {bound}");
        }
        // fitted exponent is at least the certified one (up to fit noise)
        let fit = fit_smoothness(&curve, (1e-4, 1e-1)).unwrap();
        assert!(
            fit.alpha >= cert.alpha - 0.05,
            "{f}: fitted {} vs certified {}",
            fit.alpha,
            cert.alpha
        );
    }
}

#[test]
fn lipschitz_bound_holds_for_uniform_sources() {
    // complements the Gaussian-restricted acceptance sweep with plain
    // Lebesgue sources (A = 1, L = 0)
    let mut r = rng::seeded(606);
    let mut cases = 0;
    while cases < 10 {
        let deg = 2 + (rng::uniform(&mut r) * 3.0) as usize;
        let coeffs: Vec<f64> = (0..=deg)
            .map(|_| 4.0 * rng::uniform(&mut r) - 2.0)
            .collect();
        let f = Polynomial::new(coeffs);
        if f.degree() < 2 {
            continue;
        }
        let Ok(pieces) = monotone_convex_decomposition(&f, -2.0, 2.0) else {
            continue;
        };
        let piece = pieces[cases % pieces.len()];
        if piece.b - piece.a < 0.1 {
            continue;
        }
        let model = DensityModel::lebesgue_on(piece.a, piece.b).unwrap();
        let pf = Pushforward::from_pieces(f.clone(), model.clone(), vec![piece]).unwrap();
        for &u in &[1e-3, 1e-2, 1e-1] {
            let measured = shift_modulus_pushforward(&pf, u, 1e-9).unwrap().value;
            let bound = lipschitz_modulus_bound(&f, &model, &piece, u).unwrap();
            assert!(
                measured <= bound + 1e-6,
                "{f} on [{}, {}]",
                piece.a,
                piece.b
            );
        }
        cases += 1;
    }
}

#[test]
fn noise_comparison_below_linear_bound() {
    let mut r = rng::seeded(707);
    let model = DensityModel::standard_gaussian();
    for _ in 0..50 {
        let deg = 1 + (rng::uniform(&mut r) * 3.0) as usize;
        let f = Polynomial::new(
            (0..=deg)
                .map(|_| 2.0 * rng::uniform(&mut r) - 1.0)
                .collect(),
        );
        let g = f.add(&Polynomial::new(vec![
            0.2 * rng::uniform(&mut r),
            0.2 * rng::uniform(&mut r),
        ]));
        let sigma = 0.05 + rng::uniform(&mut r);
        let d3 = smoothed_comparison(&f, &g, &model, sigma, 1e-8).unwrap();
        let l1 = l1_distance(&f, &g, &model, 1e-10).unwrap();
        let bound = 2.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt()) * l1;
        assert!(d3 <= bound + 1e-7, "d3 {d3} > linear bound {bound}");
    }
}

#[test]
fn raw_bound_dominates_any_noise_level() {
    let mut r = rng::seeded(808);
    for _ in 0..100 {
        let c_f = 5.0 * rng::uniform(&mut r);
        let c_g = 5.0 * rng::uniform(&mut r);
        let alpha = 0.2 + 1.8 * rng::uniform(&mut r);
        let l1 = 10f64.powf(-4.0 * rng::uniform(&mut r));
        let rep = smoothing_bound(c_f, c_g, alpha, l1).unwrap();
        let best = best_decomposition_sum(c_f, c_g, alpha, l1).unwrap();
        assert!(rep.raw_bound >= best - 1e-9);
        assert!(rep.clamped_bound <= 2.0 && rep.clamped_bound <= rep.raw_bound + 1e-15);
        // reported diagnostics follow their closed forms
        let e = rep.abs_moment;
        assert!((rep.delta1_bound - c_f * rep.sigma_opt.powf(alpha) * e).abs() < 1e-12);
        assert!(
            (rep.delta3_bound - 2.0 / (rep.sigma_opt * (2.0 * std::f64::consts::PI).sqrt()) * l1)
                .abs()
                < 1e-12
        );
    }
}

#[test]
fn radial_plane_case_has_unit_exponent() {
    // (d, m) = (2, 2): bounded-variation density, exponent capped at 1
    let grid = ModulusCurve::geometric_grid(1e-3, 1e-1, 10).unwrap();
    let (_, fit) = radial_modulus_experiment(2, 2.0, &grid, 1e-9).unwrap();
    assert!((fit.alpha - 1.0).abs() <= 0.1, "fitted {}", fit.alpha);
}

#[test]
fn multivariate_rate_points_beat_certified_slope() {
    // f = x1^2 + x2^2, g = f + delta x1: the measured rate of TV against
    // the L1 distance stays above the smoothing-bound exponent 1/(m+1)
    use tvkit::bounds::{rate_point, McConfig};
    use tvkit::funcspace::MultiPoly;
    let f = MultiPoly::new(2, vec![(1.0, vec![2, 0]), (1.0, vec![0, 2])]).unwrap();
    let dir = MultiPoly::new(2, vec![(1.0, vec![1, 0])]).unwrap();
    let mc = McConfig {
        n_samples: 300_000,
        n_bins: 512,
        seed: 33,
    };
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, &delta) in [0.1f64, 0.2, 0.4, 0.8].iter().enumerate() {
        let g = f.add_scaled(&dir, delta).unwrap();
        let p = rate_point(
            &f,
            &g,
            &McConfig {
                seed: mc.seed + i as u64,
                ..mc
            },
        )
        .unwrap();
        assert!(!p.excluded);
        assert!((p.l1 - delta * (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-6);
        xs.push(p.log_l1);
        ys.push(p.log_tv);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    // degree 2 floor: 1/(m+1) - 0.1 = 0.2333
    assert!(slope >= 1.0 / 3.0 - 0.1, "slope {slope}");

    // identical maps carry no rate information
    let same = rate_point(&f, &f, &mc).unwrap();
    assert!(same.excluded && same.l1 == 0.0);
}

#[test]
fn directional_grad_norm_three_dimensional() {
    use tvkit::bounds::directional_grad_norm;
    use tvkit::funcspace::MultiPoly;
    // f = x1^2 + 0.5 x2 + 0.1 x3: gram = diag-ish with E[(2x1)^2] = 4
    let f = MultiPoly::new(
        3,
        vec![
            (1.0, vec![2, 0, 0]),
            (0.5, vec![0, 1, 0]),
            (0.1, vec![0, 0, 1]),
        ],
    )
    .unwrap();
    let v = directional_grad_norm(&f, 128, 8).unwrap();
    // sup_e 4 e1^2 + 0.25 e2^2 + 0.01 e3^2 = 4 (grid sup is a lower bound)
    assert!(v <= 2.0 + 1e-9 && v > 2.0 - 1e-3, "got {v}");
    assert!(directional_grad_norm(
        &MultiPoly::new(7, vec![(1.0, vec![1, 0, 0, 0, 0, 0, 0])]).unwrap(),
        64,
        4
    )
    .is_err());
}

#[test]
fn standalone_pushforward_wrappers() {
    let f = Polynomial::monomial(1.0, 2);
    let model = DensityModel::standard_gaussian();
    let q1 = tvkit::measures::pushforward_density(&f, &model, 1.0).unwrap();
    assert!((q1 - 0.24197072451914337).abs() < 1e-12);
    // exactly at a critical value the density signals its integrable blowup
    let at_critical = tvkit::measures::pushforward_density(&f, &model, 0.0).unwrap();
    assert!(at_critical.is_infinite());
    let pieces = monotone_convex_decomposition(&f, -8.0, 8.0).unwrap();
    let xs = tvkit::measures::preimages(&f, &pieces, &model, 4.0);
    assert_eq!(xs.len(), 2);
    assert!((xs[0] + 2.0).abs() < 1e-9 && (xs[1] - 2.0).abs() < 1e-9);
}

#[test]
fn argument_shift_differs_from_value_shift_on_bounded_support() {
    // the two shift conventions agree for translation-invariant sources
    // but differ at support edges; both stay within the TV range
    let f = Polynomial::monomial(1.0, 2);
    let model = DensityModel::lebesgue_on(0.0, 1.0).unwrap();
    let val = tvkit::tvmetrics::shift_modulus(&f, &model, 0.04, 1e-9)
        .unwrap()
        .value;
    let arg = tvkit::tvmetrics::shift_modulus_arg(&f, &model, 0.04, 1e-9)
        .unwrap()
        .value;
    assert!((val - 0.4).abs() < 1e-8); // 2 sqrt(u)
    assert!((0.0..=2.0 + 1e-9).contains(&arg));
    assert!((val - arg).abs() > 1e-3, "conventions should differ here");
}

#[test]
fn flattened_trig_map_hits_quarter_exponent() {
    // -4 cos x + cos 2x realizes the maximal flatness of a degree-2
    // trigonometric polynomial (three vanishing derivatives at 0), so
    // the fitted modulus exponent drops to ~1/4
    use tvkit::bounds::trig_modulus_experiment;
    use tvkit::funcspace::TrigPolynomial;
    let f = TrigPolynomial::new(vec![0.0, -4.0, 1.0], vec![0.0, 0.0, 0.0]).unwrap();
    let grid = ModulusCurve::geometric_grid(1e-4, 1e-2, 10).unwrap();
    let (_, fit) = trig_modulus_experiment(&f, &grid, 1e-7).unwrap();
    assert!((fit.alpha - 0.25).abs() < 0.05, "fitted {}", fit.alpha);
}
