//! Frozen reference values (40-digit mpmath evaluations) and closed forms.

use approx::assert_relative_eq;

use mixfrac_core::extension::{mode_extension_energy, ExtensionProfile};
use mixfrac_core::functionals::{Functional, ProblemParams, WeightModel};
use mixfrac_core::instanton::{maximize_fiber, TraceQuantities, TruncatedInstanton};
use mixfrac_core::nehari::nehari_project;
use mixfrac_core::special::{bessel_k, gamma};
use mixfrac_core::spectral::{
    grid_integral, hs_norm_sq, synthesize, EigenBasis, Face, FractionalParams, MixedRectangleDomain,
};

const SOBOLEV: [(usize, f64, f64); 9] = [
    (2, 0.6, 1.8392262461528253854),
    (2, 0.75, 1.6918871106909638476),
    (2, 0.9, 0.98631933722958988843),
    (3, 0.6, 3.2287797507608160903),
    (3, 0.75, 4.107827252061523254),
    (3, 0.9, 4.9937625103701873658),
    (4, 0.6, 4.2978353335116508223),
    (4, 0.75, 6.0487091618679920271),
    (4, 0.9, 8.3676419016657034341),
];

#[test]
fn sobolev_constants() {
    for (n, s, want) in SOBOLEV {
        let got = FractionalParams::new(s, n).unwrap().sobolev_sn;
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }
}

#[test]
fn ks_constants() {
    for (s, want) in [(0.6, 0.77119461100066289916), (0.75, 0.47798879748612499536), (0.9, 0.19557356719531744193)] {
        assert_relative_eq!(FractionalParams::new(s, 2).unwrap().ks, want, max_relative = 1e-13);
    }
}

#[test]
fn gamma_values() {
    let table = [
        (0.1, 9.5135076986687318363),
        (0.45, 1.9681364006023823944),
        (0.5, 1.7724538509055160273),
        (1.3, 0.89747069630627718849),
        (2.5, 1.3293403881791370205),
        (4.75, 16.586206539225939611),
        (7.2, 1050.3178166626825977),
        (11.5, 11899423.083962248457),
    ];
    for (x, want) in table {
        assert_relative_eq!(gamma(x), want, max_relative = 1e-13);
    }
}

#[test]
fn bessel_k_values() {
    let xs = [0.01, 0.3, 1.0, 2.5, 8.0, 30.0];
    let table: [(f64, [f64; 6]); 5] = [
        (0.1, [4.9346660097555970864, 1.3843356302407963645, 0.42256594495516928669, 0.062454247735452966202, 0.00014655720249537978963, 2.1328272173424445037e-14]),
        (0.25, [6.1657412641392401507, 1.4480426307073702366, 0.43073977444858552466, 0.063017158998619515583, 0.00014701212355227993063, 2.1346641833090354838e-14]),
        (0.5, [12.408434532846930048, 1.6951610563392830856, 0.46106850444789455844, 0.065065943154009988931, 0.00014864800666517282988, 2.1412375659560113993e-14]),
        (0.8, [40.312639156131928389, 2.320095008905382451, 0.53019190150319913336, 0.069525567430508727788, 0.00015210717756104615583, 2.1549744317320286506e-14]),
        (0.95, [79.113161572698722053, 2.8397037024721130332, 0.58168805397731356846, 0.072684233853133112361, 0.00015447912923321692516, 2.1642694654052097325e-14]),
    ];
    for (nu, row) in table {
        for (x, want) in xs.iter().zip(row) {
            assert_relative_eq!(bessel_k(nu, *x).unwrap(), want, max_relative = 1e-11);
        }
    }
}

fn unit_square() -> MixedRectangleDomain {
    MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0)]).unwrap()
}

#[test]
fn eigenvalues_match_closed_forms() {
    let d = MixedRectangleDomain::new(vec![1.0, 2.0], &[Face::low(0), Face::high(1)]).unwrap();
    let b = EigenBasis::new(&d, 12, EigenBasis::recommended_quad_points(12)).unwrap();
    let pi = std::f64::consts::PI;
    for j in 0..b.len() {
        let k = b.mode(j);
        // x: Dirichlet at 0, Neumann at 1; y: Neumann at 0, Dirichlet at 2
        let want = ((k[0] as f64 + 0.5) * pi).powi(2) + ((k[1] as f64 + 0.5) * pi / 2.0).powi(2);
        assert_relative_eq!(b.eigenvalues()[j], want, max_relative = 4.0 * f64::EPSILON);
    }
    let d = MixedRectangleDomain::new(vec![1.0, 1.0], &[Face::low(0), Face::high(0)]).unwrap();
    let b = EigenBasis::new(&d, 6, EigenBasis::recommended_quad_points(6)).unwrap();
    for j in 0..b.len() {
        let k = b.mode(j);
        let want = ((k[0] as f64 + 1.0) * pi).powi(2) + (k[1] as f64 * pi).powi(2);
        assert_relative_eq!(b.eigenvalues()[j], want, max_relative = 4.0 * f64::EPSILON);
    }
}

#[test]
fn extension_is_an_isometry_on_modes() {
    let b = EigenBasis::new(&unit_square(), 8, EigenBasis::recommended_quad_points(8)).unwrap();
    for s in [0.6, 0.75, 0.9] {
        let f = FractionalParams::new(s, 2).unwrap();
        for &l in &b.eigenvalues()[..20] {
            let e = mode_extension_energy(l, &f).unwrap();
            assert!((e - l.powf(s)).abs() / l.powf(s) < 1e-6, "s = {s}, lambda = {l}: {e}");
        }
    }
}

#[test]
fn profile_normalization() {
    for s in [0.6, 0.75, 0.9] {
        let p = ExtensionProfile::new(s).unwrap();
        for t in [1e-12, 1e-9, 1e-7] {
            assert!((p.theta(t).unwrap() - 1.0).abs() < 1e-4);
        }
        let ks = FractionalParams::new(s, 2).unwrap().ks;
        assert!((ks * p.energy_integral().unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn fiber_root_matches_closed_form_at_zero_lambda() {
    let d = unit_square();
    let frac = FractionalParams::new(0.75, 2).unwrap();
    let b = EigenBasis::new(&d, 24, EigenBasis::recommended_quad_points(24)).unwrap();
    let q = WeightModel::constant(1.0).unwrap();
    let pp = ProblemParams::new(0.0, 2.0, frac).unwrap();
    for k in 3..=6 {
        let eps = 0.25 * 0.5f64.powi(k);
        let z = TruncatedInstanton::new(&d, &[1.0, 0.5], eps, 0.25, &frac).unwrap();
        let r = maximize_fiber(&z, &pp, &q, &b).unwrap();
        assert!((r.t_max - r.t0_closed).abs() <= 1e-8 * r.t0_closed);
        let tq = TraceQuantities::of_instanton(&z, &pp, &q, &b).unwrap();
        let t0 = (tq.hs_sq / tq.critical).powf(1.0 / (frac.crit_exp - 2.0));
        assert!((r.t_max - t0).abs() <= 1e-8 * t0);
    }
}

#[test]
fn nehari_scalar_root_arithmetic() {
    // |u|^2 = 2, int |u|^{2*} = 1, lambda = 0, 2* = 8
    let frac = FractionalParams::new(0.75, 2).unwrap();
    let pp = ProblemParams::new(0.0, 2.0, frac).unwrap();
    let tq = TraceQuantities { hs_sq: 2.0, critical: 1.0, subcritical: 1.0 };
    assert_relative_eq!(tq.root(&pp, None).unwrap(), 2f64.powf(1.0 / 6.0), max_relative = 1e-14);
}

#[test]
fn nehari_projection_without_perturbation() {
    let d = unit_square();
    let frac = FractionalParams::new(0.75, 2).unwrap();
    let b = EigenBasis::new(&d, 10, EigenBasis::recommended_quad_points(10)).unwrap();
    let pp = ProblemParams::new(0.0, 2.0, frac).unwrap();
    let f = Functional::new(&b, pp, WeightModel::constant(1.0).unwrap()).unwrap();
    let u = TruncatedInstanton::new(&d, &[1.0, 0.5], 0.05, 0.25, &frac).unwrap().project(&b).unwrap();
    let np = nehari_project(&u, &f).unwrap();
    let v = synthesize(&u, &b).unwrap();
    let crit = grid_integral(&v, &b, |x| x.abs().powf(frac.crit_exp));
    let want = (hs_norm_sq(&u, &frac, &b).unwrap() / crit).powf(1.0 / (frac.crit_exp - 2.0));
    assert_relative_eq!(np.t_scale, want, max_relative = 1e-10);
}
