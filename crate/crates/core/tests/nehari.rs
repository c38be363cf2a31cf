use mixfrac_core::functionals::{
    c_star_from, default_seeds, estimate_sigma_d_constant, Functional, ProblemParams, SobolevOptions, WeightModel,
    WeightPeak,
};
use mixfrac_core::instanton::TruncatedInstanton;
use mixfrac_core::nehari::{
    barycenter, minimize_on_nehari, multiplicity_search, ps_diagnostics, MinimizeOptions, SolveStatus,
};
use mixfrac_core::spectral::{synthesize, EigenBasis, Face, FractionalParams, MixedRectangleDomain};

fn setup(m: usize) -> (MixedRectangleDomain, FractionalParams, EigenBasis) {
    let d = MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0)]).unwrap();
    let b = EigenBasis::new(&d, m, EigenBasis::recommended_quad_points(m)).unwrap();
    (d, FractionalParams::new(0.75, 2).unwrap(), b)
}

#[test]
fn unperturbed_level_matches_the_rayleigh_infimum() {
    let (_, frac, b) = setup(12);
    let rep = estimate_sigma_d_constant(&b, &frac, &SobolevOptions::default()).unwrap();
    let pp = ProblemParams::new(0.0, 2.0, frac).unwrap();
    let f = Functional::new(&b, pp, WeightModel::constant(1.0).unwrap()).unwrap();
    let seed = default_seeds(&b, &frac).swap_remove(rep.best_seed).1;
    let rec = minimize_on_nehari(&seed, 0, &f, &MinimizeOptions::default()).unwrap();
    assert_eq!(rec.status, SolveStatus::Converged);
    let level = c_star_from(rep.s_sigma_d, &frac, 1.0);
    assert!((rec.energy - level).abs() < 1e-6 * level, "{} vs {level}", rec.energy);

    // The run converges onto the compactness level itself: its tail is a flagged plateau.
    let ps = ps_diagnostics(&rec.history, level).unwrap();
    assert!(ps.flagged(), "{:?}", ps.plateaus);
    assert!(ps.final_grad_norm() < 1e-8);
}

#[test]
fn descent_is_monotone_and_coercive() {
    let (d, frac, b) = setup(16);
    let q = 2.0;
    let pp = ProblemParams::new(1.0, q, frac).unwrap();
    let peak = WeightPeak { center: vec![1.0, 0.0], coeff: 16.0, gamma: 2.5 };
    let w = WeightModel::new(&d, 2.0, 1.0, vec![peak], 1.0).unwrap();
    let f = Functional::new(&b, pp, w).unwrap();
    let seed = TruncatedInstanton::new(&d, &[1.0, 0.0], 1.0 / 64.0, 0.25, &frac).unwrap().project(&b).unwrap();
    let rec = minimize_on_nehari(&seed, 0, &f, &MinimizeOptions::default()).unwrap();
    assert!(rec.converged());
    assert!(rec.energy > 0.0 && rec.positivity_min >= -1e-10);
    let floor = 0.5 - 1.0 / (q + 1.0);
    for h in &rec.history {
        assert!(h.energy >= floor * h.hs_sq * (1.0 - 1e-12));
    }
    let noise = 1e3 * f64::EPSILON * rec.energy;
    for w in rec.history.windows(2) {
        assert!(w[1].energy <= w[0].energy + noise, "{} -> {}", w[0].energy, w[1].energy);
    }
    // natural constraint: the unconstrained gradient vanishes at the minimizer
    assert!(f.grad_norm(&rec.field).unwrap() < 1e-8);
    let v = synthesize(&rec.field, &b).unwrap();
    assert!(v.iter().all(|x| *x >= -1e-10));
}

#[test]
fn single_maximum_reduces_to_one_minimization() {
    let (d, frac, b) = setup(12);
    let peak = WeightPeak { center: vec![1.0, 0.0], coeff: 16.0, gamma: 2.5 };
    let w = WeightModel::new(&d, 2.0, 1.0, vec![peak], 1.0).unwrap();
    let f = Functional::new(&b, ProblemParams::new(1.0, 2.0, frac).unwrap(), w).unwrap();
    let rep = multiplicity_search(&f, None, &MinimizeOptions::default()).unwrap();
    assert_eq!(rep.records.len(), 1);
    assert!(rep.pairs.is_empty() && !rep.partial);
}

#[test]
fn instanton_barycenter_approaches_its_center() {
    let (d, frac, b) = setup(48);
    let c = [1.0, 0.5];
    let mut last = f64::INFINITY;
    for k in 3..=6 {
        let z = TruncatedInstanton::new(&d, &c, 0.25 * 0.5f64.powi(k), 0.25, &frac).unwrap();
        let beta = barycenter(&z.project(&b).unwrap(), &frac, &b).unwrap();
        let dist = ((beta[0] - c[0]).powi(2) + (beta[1] - c[1]).powi(2)).sqrt();
        assert!(dist < last, "k = {k}: {dist} >= {last}");
        last = dist;
    }
    assert!(last < 0.02, "{last}");
}

#[test]
fn instanton_projection_round_trip() {
    let (d, frac, b) = setup(64);
    let z = TruncatedInstanton::new(&d, &[1.0, 0.5], 0.1, 0.45, &frac).unwrap();
    let v = synthesize(&z.project(&b).unwrap(), &b).unwrap();
    let mut err: f64 = 0.0;
    let mut top: f64 = 0.0;
    for (g, x) in v.iter().enumerate() {
        let exact = z.eval(&b.grid_point(g));
        err = err.max((x - exact).abs());
        top = top.max(exact);
    }
    assert!(err < 1e-3 * top, "sup error {err} against max {top}");
}
