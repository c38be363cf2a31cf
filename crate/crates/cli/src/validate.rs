//! Checks every parameter constraint before any computation starts.

use std::fmt;

use mixfrac_core::functionals::{required_alpha, weight::FACE_TOL, AlphaRequirement};
use mixfrac_core::spectral::{critical_exponent, MixedRectangleDomain};

use crate::config::{RunConfig, Subcommand};

/// One violated constraint: the key, its value and what is wrong.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub key: String,
    pub value: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.key, self.value, self.message)
    }
}

struct Diags(Vec<Diagnostic>);

impl Diags {
    fn push(&mut self, key: &str, value: impl fmt::Debug, message: impl Into<String>) {
        let value = format!("{value:?}");
        self.0.push(Diagnostic { key: key.to_string(), value, message: message.into() });
    }
}

fn needs_problem_q(c: Subcommand) -> bool {
    matches!(c, Subcommand::Fiber | Subcommand::Solve | Subcommand::Multiplicity)
}

fn needs_domain(c: &RunConfig) -> bool {
    !matches!(c.subcommand, Subcommand::Sobolev | Subcommand::Isometry) || c.solver.estimate
}

/// Empty iff the configuration can be run.
pub fn validate(c: &RunConfig) -> Vec<Diagnostic> {
    let mut d = Diags(Vec::new());
    let cmd = c.subcommand;
    let p = &c.problem;
    for &n in &p.dims {
        if n < 2 {
            d.push("problem.dim", n, "dimension N must be at least 2");
        }
    }
    for &s in &p.s {
        if !(s > 0.5 && s < 1.0) {
            d.push("problem.s", s, "s must lie in (1/2, 1)");
        }
    }
    let multi_ok = matches!(cmd, Subcommand::Sobolev | Subcommand::Isometry) && !c.solver.estimate;
    if p.dims.len() != 1 && !(multi_ok && !p.dims.is_empty()) {
        d.push("problem.dim", &p.dims, "exactly one dimension is needed here");
    }
    if p.s.len() != 1 && !(multi_ok && !p.s.is_empty()) {
        d.push("problem.s", &p.s, "exactly one s is needed here");
    }
    if !d.0.is_empty() {
        return d.0;
    }
    let n = p.dims[0] as usize;
    let s = p.s[0];
    let crit = critical_exponent(n, s).unwrap_or(f64::NAN);
    if needs_problem_q(cmd) {
        match p.q {
            None => d.push("problem.q", "missing", "q is required"),
            Some(q) if !(q >= 1.0) => d.push("problem.q", q, "q must be >= 1"),
            Some(q) if !(q < crit - 1.0) => {
                d.push("problem.q", q, format!("q must be < 2*_s - 1 = {}", crit - 1.0))
            }
            _ => {}
        }
        if p.lambdas.is_empty() {
            d.push("problem.lambda", "missing", "at least one lambda is required");
        }
        if matches!(cmd, Subcommand::Solve | Subcommand::Multiplicity) && p.lambdas.len() > 1 {
            d.push("problem.lambda", &p.lambdas, "exactly one lambda is needed here");
        }
    }
    for &l in &p.lambdas {
        if !(l >= 0.0) {
            d.push("problem.lambda", l, "lambda must be >= 0");
        }
    }

    let domain = if needs_domain(c) { check_domain(c, n, &mut d) } else { None };
    if let Some(dom) = &domain {
        check_weight(c, dom, n, s, &mut d);
        check_instanton(c, dom, n, &mut d);
    }
    check_solver(c, n, &mut d);
    for (k, v) in [("fiber.c0", c.fiber.c0), ("fiber.t1", c.fiber.t1), ("fiber.t2", c.fiber.t2)] {
        if let Some(v) = v {
            if !(v > 0.0) {
                d.push(k, v, "bracket constants must be positive");
            }
        }
    }
    d.0
}

fn check_domain(c: &RunConfig, n: usize, d: &mut Diags) -> Option<MixedRectangleDomain> {
    let dom = &c.domain;
    let before = d.0.len();
    if dom.lengths.len() != n {
        d.push("domain.lengths", &dom.lengths, format!("need {n} edge lengths"));
    }
    if dom.lengths.iter().any(|l| !(*l > 0.0)) {
        d.push("domain.lengths", &dom.lengths, "edge lengths must be positive");
    }
    for f in &dom.dirichlet {
        if f.axis >= n {
            d.push("domain.dirichlet", crate::config::face_name(*f), format!("face axis must be below N = {n}"));
        }
    }
    if d.0.len() > before {
        return None;
    }
    match MixedRectangleDomain::new(dom.lengths.clone(), &dom.dirichlet) {
        Ok(m) => Some(m),
        Err(e) => {
            let names: Vec<String> = dom.dirichlet.iter().map(|f| crate::config::face_name(*f)).collect();
            d.push("domain.dirichlet", names, e.to_string());
            None
        }
    }
}

fn check_weight(c: &RunConfig, dom: &MixedRectangleDomain, n: usize, s: f64, d: &mut Diags) {
    let w = &c.weight;
    if !(w.q_max > 0.0) {
        d.push("weight.q_max", w.q_max, "q_max must be positive");
    }
    if w.centers.is_empty() {
        if c.subcommand == Subcommand::Multiplicity {
            d.push("weight.centers", "missing", "multiplicity needs at least one maximum");
        }
        return;
    }
    let mut complete = true;
    for (key, v) in [
        ("weight.background", w.background),
        ("weight.alpha", w.alpha),
        ("weight.coeff", w.coeff),
        ("weight.gamma", w.gamma),
    ] {
        if v.is_none() {
            d.push(key, "missing", "required when weight.centers is given");
            complete = false;
        }
    }
    for x in &w.centers {
        if x.len() != n {
            d.push("weight.centers", x, format!("each maximum needs {n} coordinates"));
            complete = false;
        } else if dom.distance_to_dirichlet(x) <= FACE_TOL && dom.faces_containing(x, FACE_TOL).len() > 0 {
            d.push("weight.centers", x, "maxima must lie on the Neumann part of the boundary, not on a Dirichlet face");
            complete = false;
        } else if dom.faces_containing(x, FACE_TOL).is_empty() {
            d.push("weight.centers", x, "maxima must lie on the Neumann part of the boundary");
            complete = false;
        }
    }
    if let (Some(a), Some(g)) = (w.alpha, w.gamma) {
        if !(g > a) {
            d.push("weight.gamma", g, format!("growth exponent must exceed alpha = {a}"));
            complete = false;
        }
    }
    let crit = critical_exponent(n, s).unwrap_or(f64::NAN);
    let q_ok = c.problem.q.filter(|q| *q >= 1.0 && *q < crit - 1.0);
    if let (Some(a), Some(q)) = (w.alpha, q_ok) {
        if let Ok(req) = required_alpha(n, s, q) {
            if !req.admits(a) {
                let want = match req {
                    AlphaRequirement::Free { upper } => format!("alpha must lie in (0, {upper})"),
                    AlphaRequirement::Exact(v) => format!("alpha must equal N - (N-2s)(q+1)/2 = {v}"),
                };
                d.push("weight.alpha", a, want);
                complete = false;
            }
        } else {
            d.push("problem.q", q, "(N, s, q) admits no flatness exponent for a peaked weight");
            complete = false;
        }
    }
    if complete {
        if let Err(e) = crate::build::weight(c, dom) {
            d.push("weight.centers", &w.centers, e.to_string());
        }
    }
}

fn check_instanton(c: &RunConfig, dom: &MixedRectangleDomain, n: usize, d: &mut Diags) {
    let i = &c.instanton;
    if let Some(x) = &i.center {
        if x.len() != n {
            d.push("instanton.center", x, format!("need {n} coordinates"));
        } else if dom.faces_containing(x, FACE_TOL).is_empty() {
            d.push("instanton.center", x, "instanton centers must lie on the boundary");
        } else if dom.distance_to_dirichlet(x) <= FACE_TOL {
            d.push("instanton.center", x, "instanton centers must avoid the Dirichlet part");
        }
    }
    if let Some(r) = i.rho {
        if !(r > 0.0) {
            d.push("instanton.rho", r, "rho must be positive");
        }
    }
    for &k in &i.eps_exponents {
        if k < 3 {
            d.push("instanton.eps_exponents", k, "eps = rho 2^-k needs k >= 3 to stay below rho/4");
        }
    }
    if c.subcommand == Subcommand::Rates {
        if i.eps_exponents.len() < mixfrac_core::instanton::MIN_SAMPLES {
            d.push("instanton.eps_exponents", &i.eps_exponents, "a rate fit needs at least 4 values of eps");
        }
        if i.p.is_empty() {
            d.push("instanton.p", "missing", "at least one exponent p is required");
        }
    }
    for &p in &i.p {
        if !(p >= 1.0) {
            d.push("instanton.p", p, "p must be >= 1");
        }
    }
    if let Some(e) = i.eps_seed {
        if !(e > 0.0) {
            d.push("instanton.eps_seed", e, "eps_seed must be positive");
        }
    }
}

fn check_solver(c: &RunConfig, n: usize, d: &mut Diags) {
    let v = &c.solver;
    if v.modes < 1 {
        d.push("solver.modes", v.modes, "modes per axis must be at least 1");
    }
    if let Some(qp) = v.quad_points {
        if qp < 2 * v.modes {
            d.push("solver.quad_points", qp, format!("need at least 2 * modes = {}", 2 * v.modes));
        }
        if !v.levels.is_empty() {
            d.push("solver.quad_points", qp, "quad_points cannot be combined with levels");
        }
    }
    if v.levels.iter().any(|m| *m < 1) || v.levels.windows(2).any(|w| w[1] <= w[0]) {
        d.push("solver.levels", &v.levels, "levels must be positive and strictly increasing");
    }
    if v.count < 1 || (v.modes >= 1 && (v.count as f64) > (v.modes as f64).powi(n as i32)) {
        d.push("solver.count", v.count, "count must lie between 1 and modes^N");
    }
    if v.budget < 1 {
        d.push("solver.budget", v.budget, "budget must be at least 1");
    }
    if v.sobolev_budget < 1 {
        d.push("solver.sobolev_budget", v.sobolev_budget, "budget must be at least 1");
    }
    if !(v.grad_tol > 0.0) {
        d.push("solver.grad_tol", v.grad_tol, "tolerance must be positive");
    }
    if let Some(r) = v.r0 {
        if !(r > 0.0) {
            d.push("solver.r0", r, "r0 must be positive");
        }
    }
    if let Some(r) = v.restarts {
        if r < 1 {
            d.push("solver.restarts", r, "restarts must be at least 1");
        }
    }
    if !(v.lambda_max > 0.0) {
        d.push("solver.lambda_max", v.lambda_max, "lambda_max must be positive");
    }
}
