use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixfrac_core::functionals::{
    estimate_sigma_d_constant, rayleigh_quotient, required_alpha, AlphaRequirement, Functional, ProblemParams,
    SobolevOptions, WeightModel, WeightPeak,
};
use mixfrac_core::instanton::{lambda_sweep, TraceQuantities, TruncatedInstanton};
use mixfrac_core::nehari::{barycenter, nehari_project};
use mixfrac_core::spectral::{
    analyze, apply_fractional, grid_integral, hs_norm_sq, synthesize, EigenBasis, Face, FractionalParams,
    MixedRectangleDomain, SpectralField,
};

const M: usize = 8;

fn frac() -> FractionalParams {
    FractionalParams::new(0.75, 2).unwrap()
}

fn domain() -> MixedRectangleDomain {
    MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0)]).unwrap()
}

fn basis() -> &'static EigenBasis {
    static B: OnceLock<EigenBasis> = OnceLock::new();
    B.get_or_init(|| EigenBasis::new(&domain(), M, EigenBasis::recommended_quad_points(M)).unwrap())
}

/// Coefficients decaying like 1/(1+j) so every field is comfortably resolved.
fn field() -> impl Strategy<Value = SpectralField> {
    prop::collection::vec(-1.0f64..1.0, M * M).prop_map(|v| {
        SpectralField::new(v.iter().enumerate().map(|(j, a)| a / (1.0 + j as f64)).collect()).unwrap()
    })
}

fn nonzero_field() -> impl Strategy<Value = SpectralField> {
    field().prop_filter("nonzero", |u| u.dot(u) > 1e-6)
}

fn functional(lambda: f64) -> Functional<'static> {
    let pp = ProblemParams::new(lambda, 2.0, frac()).unwrap();
    Functional::new(basis(), pp, WeightModel::constant(1.0).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval(u in field()) {
        let v = synthesize(&u, basis()).unwrap();
        let l2 = grid_integral(&v, basis(), |x| x * x);
        prop_assert!((l2 - u.dot(&u)).abs() <= 1e-10 * u.dot(&u).max(1e-300));
    }

    #[test]
    fn analysis_inverts_synthesis(u in field()) {
        let back = analyze(&synthesize(&u, basis()).unwrap(), basis()).unwrap();
        for (a, b) in u.coeffs.iter().zip(&back.coeffs) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn synthesis_is_linear(u in field(), v in field(), a in -3.0f64..3.0) {
        let lhs = synthesize(&u.axpy(a, &v), basis()).unwrap();
        let su = synthesize(&u, basis()).unwrap();
        let sv = synthesize(&v, basis()).unwrap();
        for (l, (x, y)) in lhs.iter().zip(su.iter().zip(&sv)) {
            prop_assert!((l - (x + a * y)).abs() < 1e-12);
        }
    }

    #[test]
    fn hs_norm_triangle(u in field(), v in field()) {
        let f = frac();
        let n = |w: &SpectralField| hs_norm_sq(w, &f, basis()).unwrap().sqrt();
        prop_assert!(n(&u.axpy(1.0, &v)) <= n(&u) + n(&v) + 1e-12);
    }

    #[test]
    fn spectral_mapping(u in field()) {
        let f = frac();
        let lhs = hs_norm_sq(&u, &f, basis()).unwrap();
        let rhs = apply_fractional(&u, &f, basis()).unwrap().dot(&u);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.max(1e-300));
    }

    #[test]
    fn energy_is_even(u in field(), lambda in 0.0f64..5.0) {
        let f = functional(lambda);
        let a = f.energy(&u).unwrap();
        let b = f.energy(&u.scaled(-1.0)).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * a.abs().max(1.0));
    }

    #[test]
    fn energy_falls_along_rays(u in nonzero_field(), lambda in 0.0f64..5.0) {
        let f = functional(lambda);
        let mut t = 1.0;
        while f.energy(&u.scaled(t)).unwrap() >= 0.0 {
            t *= 2.0;
            prop_assert!(t < 1e8);
        }
        prop_assert!(f.energy(&u.scaled(4.0 * t)).unwrap() < f.energy(&u.scaled(t)).unwrap());
    }

    #[test]
    fn nehari_projection_is_scale_free(u in nonzero_field(), c in 1e-3f64..1e3, lambda in 0.0f64..3.0) {
        let f = functional(lambda);
        let a = nehari_project(&u, &f).unwrap();
        let b = nehari_project(&u.scaled(c), &f).unwrap();
        let scale = a.field.dot(&a.field).sqrt();
        for (x, y) in a.field.coeffs.iter().zip(&b.field.coeffs) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
        prop_assert!(a.constraint_residual.abs() < 1e-10 * a.hs_sq);
    }

    #[test]
    fn barycenter_is_homogeneous(u in nonzero_field(), c in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3]) {
        let a = barycenter(&u, &frac(), basis()).unwrap();
        let b = barycenter(&u.scaled(c), &frac(), basis()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(x));
        }
    }

    #[test]
    fn weight_rejects_dirichlet_maxima(y in 0.0f64..=1.0, gamma in 1.5f64..4.0) {
        let peak = WeightPeak { center: vec![0.0, y], coeff: 1.0, gamma };
        prop_assert!(WeightModel::new(&domain(), 2.0, 1.0, vec![peak], 1.0).is_err());
    }

    #[test]
    fn fibering_derivative_changes_sign_once(
        a in 1e-2f64..1e2, b in 1e-2f64..1e2, c in 1e-2f64..1e2, lambda in 0.0f64..50.0, q in 1.1f64..6.9,
    ) {
        let pp = ProblemParams::new(lambda, q, frac()).unwrap();
        let tq = TraceQuantities { hs_sq: a, critical: b, subcritical: c };
        let t = tq.root(&pp, None).unwrap();
        prop_assert!(tq.g(t, &pp).abs() <= 1e-10 * a.max(1.0));
        // g -> A > 0 as t -> 0 and g -> -inf as t -> inf; sample twelve decades around the root
        let ts: Vec<f64> = (0..=4000).map(|i| t * 10f64.powf(-6.0 + 12.0 * i as f64 / 4000.0)).collect();
        let changes = ts.windows(2).filter(|w| (tq.g(w[0], &pp) > 0.0) != (tq.g(w[1], &pp) > 0.0)).count();
        prop_assert_eq!(changes, 1);
        prop_assert!(tq.g(ts[0], &pp) > 0.0);
    }

    #[test]
    fn fiber_maximizer_decreases_in_lambda(
        a in 1e-1f64..1e1, b in 1e-1f64..1e1, c in 1e-1f64..1e1, q in 1.01f64..6.9,
    ) {
        let pp = ProblemParams::new(0.0, q, frac()).unwrap();
        let tq = TraceQuantities { hs_sq: a, critical: b, subcritical: c };
        let lambdas: Vec<f64> = (0..12).map(|i| 0.01 * 3f64.powi(i)).collect();
        let reps = lambda_sweep(&tq, 0.1, &pp, &lambdas, 1.0, None).unwrap();
        for w in reps.windows(2) {
            prop_assert!(w[1].t_max <= w[0].t_max);
            prop_assert!(w[1].sup_value <= w[0].sup_value);
        }
    }
}

#[test]
fn barycenter_of_symmetric_field_is_the_center() {
    // Dirichlet on both x faces: even-index modes are symmetric about 1/2 in both axes.
    let d = MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0), Face::high(0)]).unwrap();
    let b = EigenBasis::new(&d, M, EigenBasis::recommended_quad_points(M)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let coeffs = (0..b.len())
            .map(|j| if b.mode(j).iter().all(|k| k % 2 == 0) { rng.gen_range(-1.0..1.0) } else { 0.0 })
            .collect();
        let beta = barycenter(&SpectralField::new(coeffs).unwrap(), &frac(), &b).unwrap();
        assert!((beta[0] - 0.5).abs() < 1e-12 && (beta[1] - 0.5).abs() < 1e-12, "{beta:?}");
    }
}

#[test]
fn rayleigh_quotients_stay_above_the_computed_infimum() {
    let f = frac();
    let rep = estimate_sigma_d_constant(basis(), &f, &SobolevOptions::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let u = SpectralField::new((0..basis().len()).map(|j| rng.gen_range(-1.0..1.0) / (1.0 + j as f64)).collect())
            .unwrap();
        let r = rayleigh_quotient(&u, &f, basis()).unwrap();
        assert!(r >= rep.s_sigma_d * (1.0 - 1e-9), "{r} < {}", rep.s_sigma_d);
    }
}

/// Directional derivative of the energy against central differences, 50 random pairs.
#[test]
fn gradient_matches_central_differences() {
    let f = functional(1.3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut draw = || {
            SpectralField::new((0..basis().len()).map(|j| rng.gen_range(-1.0..1.0) / (1.0 + j as f64)).collect())
                .unwrap()
        };
        let (u, v) = (draw(), draw());
        let exact = f.gradient(&u).unwrap().dual.dot(&v);
        let fd = |h: f64| (f.energy(&u.axpy(h, &v)).unwrap() - f.energy(&u.axpy(-h, &v)).unwrap()) / (2.0 * h);
        let e1 = (fd(1e-2) - exact).abs();
        let e2 = (fd(5e-3) - exact).abs();
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.2, "observed order {order}");
        worst = worst.max((fd(1e-4) - exact).abs() / exact.abs().max(1e-12));
    }
    assert!(worst < 1e-6, "worst relative mismatch {worst}");
}

/// Independent statement of the flatness table.
fn table_alpha(n: usize, s: f64, q: f64) -> Option<Result<f64, f64>> {
    let nf = n as f64;
    let top = (nf + 2.0 * s) / (nf - 2.0 * s);
    let mid = (6.0 * s - nf) / (nf - 2.0 * s);
    let exact = nf - (nf - 2.0 * s) * (q + 1.0) / 2.0;
    if q >= top {
        return None;
    }
    if n == 2 || n == 3 {
        if q > 1.0 && q <= mid {
            Some(Err(nf))
        } else if q > 1.0 {
            Some(Ok(exact))
        } else {
            None
        }
    } else if q >= 1.0 {
        Some(Ok(exact))
    } else {
        None
    }
}

#[test]
fn required_alpha_matches_the_table() {
    let mut checked = 0;
    for n in 2..=5 {
        for si in 0..9 {
            let s = 0.55 + 0.05 * si as f64;
            for qi in 0..200 {
                let q = 1.0 + 0.05 * qi as f64;
                let got = required_alpha(n, s, q);
                match table_alpha(n, s, q) {
                    None => assert!(got.is_err(), "N={n} s={s} q={q}"),
                    Some(Err(upper)) => assert_eq!(got.unwrap(), AlphaRequirement::Free { upper }),
                    Some(Ok(a)) => match got.unwrap() {
                        AlphaRequirement::Exact(x) => assert!((x - a).abs() < 1e-12),
                        other => panic!("N={n} s={s} q={q}: {other:?}"),
                    },
                }
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 4 * 9 * 200);
}

#[test]
fn instantons_are_nonnegative_on_the_grid() {
    let d = domain();
    let f = frac();
    for (c, eps) in [(vec![1.0, 0.5], 0.01f64), (vec![0.5, 1.0], 0.05), (vec![1.0, 0.0], 0.002)] {
        let rho = TruncatedInstanton::default_rho(&d, &c);
        let z = TruncatedInstanton::new(&d, &c, eps.min(rho / 8.0), rho, &f).unwrap();
        for g in 0..basis().grid_len() {
            assert!(z.eval(&basis().grid_point(g)) >= 0.0);
        }
    }
}
