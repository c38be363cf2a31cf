//! One function per subcommand. Each writes its tables through a `Sink` and reports
//! whether any row was flagged.

use rayon::prelude::*;

use mixfrac_core::extension::mode_extension_energy;
use mixfrac_core::functionals::{
    estimate_sigma_d_constant, threshold_c_star, Functional, SobolevOptions, WeightModel,
};
use mixfrac_core::instanton::{
    fiber_report, half_space_threshold, lambda_crossover, lambda_sweep, lp_rate_experiment,
    weighted_critical_integral, FiberBracket, FiberingReport, RateRegime, TraceQuantities, TruncatedInstanton,
};
use mixfrac_core::nehari::{
    empirical_lambda_tilde, minimize_on_nehari, multiplicity_search, ps_diagnostics, richardson3, MinimizeOptions,
    SolutionRecord,
};
use mixfrac_core::spectral::{first_fractional_eigenvalue, EigenBasis, FractionalParams, MixedRectangleDomain};

use crate::build;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Sink, Table};
use crate::row;

/// Tolerance on fitted power-law slopes.
pub const SLOPE_TOL: f64 = 0.05;
/// Minimum R^2 of the borderline log-model fit.
pub const BORDERLINE_R2: f64 = 0.999;
/// Relative mismatch allowed between extension energy and lambda^s.
pub const ISOMETRY_TOL: f64 = 1e-6;
/// Relative energy change allowed between the two finest levels.
pub const REFINE_TOL: f64 = 1e-3;

type Flagged = Result<bool, CliError>;

fn log(c: &Context, msg: impl AsRef<str>) {
    if c.verbose {
        eprintln!("[{}] {}", c.cfg.subcommand, msg.as_ref());
    }
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub verbose: bool,
}

fn suffixed(base: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{base}{i}")).collect()
}

pub fn eigen(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let dom = build::domain(c)?;
    let frac = build::frac(c)?;
    let basis = build::basis(c, &dom, c.solver.modes as usize)?;
    let n = dom.dim();
    let mut header = vec!["j".to_string()];
    header.extend(suffixed("k", n));
    header.extend(["lambda", "lambda_s"].map(String::from));
    let mut t = Table::new(header);
    let count = (c.solver.count as usize).min(basis.len());
    for j in 0..count {
        let lam = basis.eigenvalues()[j];
        let mut r = row![j];
        r.extend(basis.mode(j).iter().map(|k| (*k).into()));
        r.extend(row![lam, lam.powf(frac.s)]);
        t.push(r);
    }
    sink.table("eigen.csv", &t)?;
    Ok(false)
}

pub fn isometry(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let dom = build::domain(c)?;
    let basis = build::basis(c, &dom, c.solver.modes as usize)?;
    let count = (c.solver.count as usize).min(basis.len());
    let lams = &basis.eigenvalues()[..count];
    let mut t = Table::new(["s", "j", "lambda", "energy", "lambda_s", "rel_error", "flag"]);
    let mut flagged = false;
    for &s in &c.problem.s {
        let frac = FractionalParams::new(s, dom.dim())?;
        let energies: Vec<f64> =
            lams.par_iter().map(|&l| mode_extension_energy(l, &frac)).collect::<Result<_, _>>()?;
        for (j, (&l, e)) in lams.iter().zip(energies).enumerate() {
            let exact = l.powf(s);
            let err = (e - exact).abs() / exact;
            let flag = err > ISOMETRY_TOL;
            flagged |= flag;
            t.push(row![s, j, l, e, exact, err, flag]);
        }
    }
    sink.table("isometry.csv", &t)?;
    Ok(flagged)
}

pub fn sobolev(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let mut t = Table::new(["dim", "s", "crit_exp", "ks", "sobolev_sn", "half_space"]);
    for &n in &c.problem.dims {
        for &s in &c.problem.s {
            let f = FractionalParams::new(s, n as usize)?;
            t.push(row![n, s, f.crit_exp, f.ks, f.sobolev_sn, f.half_space_constant()]);
        }
    }
    sink.table("sobolev.csv", &t)?;
    if !c.solver.estimate {
        return Ok(false);
    }
    let dom = build::domain(c)?;
    let frac = build::frac(c)?;
    let weight = build::weight(c, &dom)?;
    let basis = build::basis(c, &dom, c.solver.modes as usize)?;
    log(ctx, format!("estimating the mixed constant at M = {}", basis.modes_per_axis()));
    let rep = estimate_sigma_d_constant(&basis, &frac, &sobolev_options(c))?;
    let mut th = Table::new([
        "modes", "s_sigma_d", "s_sn", "half_space", "ratio", "regime", "c_star", "q_max", "best_seed", "stale",
    ]);
    th.push(row![
        basis.modes_per_axis(),
        rep.s_sigma_d,
        rep.s_sn,
        rep.half_space,
        rep.s_sigma_d / rep.half_space,
        rep.regime.label(),
        threshold_c_star(&rep, &weight),
        weight.q_max,
        rep.runs[rep.best_seed].label.clone(),
        rep.stale
    ]);
    sink.table("threshold.csv", &th)?;
    let mut seeds = Table::new(["label", "value", "iterations", "converged"]);
    for r in &rep.runs {
        seeds.push(row![r.label.clone(), r.value, r.iterations, r.converged]);
    }
    sink.table("seeds.csv", &seeds)?;
    Ok(rep.stale)
}

fn sobolev_options(c: &RunConfig) -> SobolevOptions {
    SobolevOptions {
        restarts: c.solver.restarts.map_or(usize::MAX, |r| r as usize),
        budget: c.solver.sobolev_budget as usize,
        ..SobolevOptions::default()
    }
}

struct Setup {
    dom: MixedRectangleDomain,
    frac: FractionalParams,
    weight: WeightModel,
    center: Vec<f64>,
    rho: f64,
}

fn setup(c: &RunConfig) -> Result<Setup, CliError> {
    let dom = build::domain(c)?;
    let frac = build::frac(c)?;
    let weight = build::weight(c, &dom)?;
    let center = build::instanton_center(c, &dom);
    let rho = build::rho(c, &dom, &center);
    Ok(Setup { dom, frac, weight, center, rho })
}

pub fn rates(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let st = setup(c)?;
    let eps = build::eps_sweep(c, st.rho);
    let template = TruncatedInstanton::new(&st.dom, &st.center, eps[0], st.rho, &st.frac)?;
    let n = st.frac.dim as f64;
    let mut rows = Table::new(["eps", "p", "value", "model", "residual"]);
    let mut fits = Table::new(["p", "regime", "slope", "theory", "intercept", "r_squared", "flag"]);
    let mut flagged = false;
    for &p in &c.instanton.p {
        log(ctx, format!("p = {p}"));
        let rep = lp_rate_experiment(p, &eps, &template, &st.dom, &st.frac)?;
        let (regime, flag) = match rep.regime {
            RateRegime::Borderline => ("borderline", rep.r_squared <= BORDERLINE_R2),
            RateRegime::Subcritical { .. } => ("subcritical", (rep.slope - rep.theory).abs() > SLOPE_TOL),
            RateRegime::Supercritical { .. } => ("supercritical", (rep.slope - rep.theory).abs() > SLOPE_TOL),
        };
        flagged |= flag;
        for r in &rep.rows {
            let (model, residual) = match rep.regime {
                RateRegime::Borderline => {
                    let m = (rep.intercept + rep.slope * (st.rho / r.eps).ln()) * r.eps.powf(n / 2.0);
                    (m, (r.value - m) / m)
                }
                _ => {
                    let m = (rep.intercept + rep.slope * r.eps.ln()).exp();
                    (m, r.value.ln() - m.ln())
                }
            };
            rows.push(row![r.eps, p, r.value, model, residual]);
        }
        fits.push(row![p, regime, rep.slope, rep.theory, rep.intercept, rep.r_squared, flag]);
    }
    sink.table("rates.csv", &rows)?;
    sink.table("rates_fit.csv", &fits)?;

    let insts: Vec<TruncatedInstanton> = eps
        .iter()
        .map(|&e| TruncatedInstanton::new(&st.dom, &st.center, e, st.rho, &st.frac))
        .collect::<Result<_, _>>()?;
    if !st.weight.is_constant() && st.weight.peak_at(&st.center, 1e-9).is_some() {
        let mut w = Table::new(["eps", "value", "flat", "residual"]);
        for z in &insts {
            let r = weighted_critical_integral(z, &st.weight, &st.dom, &st.frac)?;
            w.push(row![z.eps, r.value, r.flat, r.residual]);
        }
        sink.table("weighted.csv", &w)?;
    }

    let basis = build::basis(c, &st.dom, c.solver.modes as usize)?;
    log(ctx, format!("Rayleigh quotients at M = {}", basis.modes_per_axis()));
    let target = st.frac.half_space_constant();
    let mut ray = Table::new(["eps", "hs_sq", "crit_integral", "rayleigh", "half_space", "ratio", "decreasing"]);
    let mut last = f64::INFINITY;
    for z in &insts {
        let hs = z.hs_norm_sq(&basis)?;
        let crit = z.lp_integral(st.frac.crit_exp, &st.dom);
        let r = hs / crit.powf(2.0 / st.frac.crit_exp);
        ray.push(row![z.eps, hs, crit, r, target, r / target, r <= last]);
        last = r;
    }
    sink.table("rayleigh.csv", &ray)?;
    Ok(flagged)
}

pub fn fiber(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let st = setup(c)?;
    let q = c.problem.q.unwrap_or(1.0);
    let pp = build::problem(c, c.problem.lambdas[0])?;
    let basis = build::basis(c, &st.dom, c.solver.modes as usize)?;
    let threshold = half_space_threshold(&st.frac, &st.weight);
    let cap = Some(first_fractional_eigenvalue(&basis, &st.frac));
    let mut lambdas = c.problem.lambdas.clone();
    lambdas.sort_by(|a, b| a.total_cmp(b));

    let mut all: Vec<FiberingReport> = Vec::new();
    let mut table = Table::new([
        "eps", "lambda", "t_max", "t0_closed", "sup_value", "threshold", "margin", "beta_eps", "g_residual", "monotone",
    ]);
    let mut cross = Table::new(["eps", "crossover", "positive_above"]);
    let mut flagged = false;
    for eps in build::eps_sweep(c, st.rho) {
        log(ctx, format!("eps = {eps:e}"));
        let inst = TruncatedInstanton::new(&st.dom, &st.center, eps, st.rho, &st.frac)?;
        let tq = TraceQuantities::of_instanton(&inst, &pp, &st.weight, &basis)?;
        let reps = lambda_sweep(&tq, eps, &pp, &lambdas, threshold, cap)?;
        let mut prev = f64::INFINITY;
        for r in &reps {
            let mono = r.t_max <= prev * (1.0 + 1e-12);
            flagged |= !mono;
            prev = r.t_max;
            table.push(row![
                r.eps, r.lambda, r.t_max, r.t0_closed, r.sup_value, r.threshold, r.margin, r.beta_eps, r.g_residual, mono
            ]);
        }
        all.extend(reps);
        if q > 1.0 {
            let x = lambda_crossover(&tq, eps, &pp, &lambdas, threshold)?;
            match x.lambda {
                Some(l) => {
                    let above = x.reports.iter().filter(|r| r.lambda >= l).all(|r| r.margin > 0.0);
                    cross.push(row![eps, l, above]);
                }
                None => cross.push(row![eps, "none", false]),
            }
        }
    }
    sink.table("fiber.csv", &table)?;
    if q > 1.0 {
        sink.table("crossover.csv", &cross)?;
    }

    let fitted = FiberBracket::fit(&all, q)?;
    let mut consts = Table::new(["source", "c0", "t1", "t2", "all_inside"]);
    let inside = |b: &FiberBracket| all.iter().all(|r| b.contains(r, q, 1e-9));
    consts.push(row!["fitted", fitted.c0, fitted.t1, fitted.t2, inside(&fitted)]);
    if let (Some(c0), Some(t1), Some(t2)) = (c.fiber.c0, c.fiber.t1, c.fiber.t2) {
        let frozen = FiberBracket { c0, t1, t2 };
        let ok = inside(&frozen);
        flagged |= !ok;
        consts.push(row!["frozen", c0, t1, t2, ok]);
    }
    sink.table("fiber_constants.csv", &consts)?;
    Ok(flagged)
}

/// c_star at one resolution: estimated mixed constant when requested, else the half-space value.
fn threshold(c: &RunConfig, basis: &EigenBasis, frac: &FractionalParams, w: &WeightModel) -> Result<(f64, String), CliError> {
    if c.solver.estimate {
        let rep = estimate_sigma_d_constant(basis, frac, &sobolev_options(c))?;
        Ok((threshold_c_star(&rep, w), rep.regime.label().to_string()))
    } else {
        Ok((half_space_threshold(frac, w), "half_space".to_string()))
    }
}

fn minimize_options(c: &RunConfig) -> MinimizeOptions {
    MinimizeOptions {
        budget: c.solver.budget as usize,
        grad_tol: c.solver.grad_tol,
        r0: c.solver.r0,
        ..MinimizeOptions::default()
    }
}

/// Instanton seed at `center`, with rho capped by r0 and eps defaulting to rho/8.
fn seed_instanton(c: &RunConfig, st: &Setup, center: &[f64], r0: Option<f64>) -> Result<TruncatedInstanton, CliError> {
    let mut rho = build::rho(c, &st.dom, center);
    if let Some(r) = r0 {
        rho = rho.min(r);
    }
    let eps = c.instanton.eps_seed.unwrap_or(rho / 8.0).min(0.999 * rho / 4.0);
    Ok(TruncatedInstanton::new(&st.dom, center, eps, rho, &st.frac)?)
}

fn record_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = ["basin", "lambda", "q", "energy", "grad_norm"].map(String::from).to_vec();
    h.extend(suffixed("beta_", n));
    h.extend(["positivity_min", "status", "iterations"].map(String::from));
    h
}

fn record_row(r: &SolutionRecord, f: &Functional) -> Vec<crate::output::Cell> {
    let mut row = row![r.basin_index, f.params.lambda, f.params.q, r.energy, r.grad_norm];
    row.extend(r.barycenter.iter().map(|x| (*x).into()));
    row.extend(row![r.positivity_min, r.status.label(), r.iterations]);
    row
}

fn history_table(r: &SolutionRecord) -> Table {
    let mut t = Table::new(["iter", "energy", "grad_norm", "hs_sq", "step"]);
    for h in &r.history {
        t.push(row![h.iter, h.energy, h.grad_norm, h.hs_sq, h.step]);
    }
    t
}

pub fn solve(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let st = setup(c)?;
    let pp = build::problem(c, c.problem.lambdas[0])?;
    let opts = minimize_options(c);
    let (center, r0) = if st.weight.is_constant() {
        (st.center.clone(), None)
    } else {
        (st.weight.maxima()[0].clone(), Some(c.solver.r0.unwrap_or_else(|| st.weight.default_r0())))
    };
    let seed_inst = seed_instanton(c, &st, &center, r0)?;
    let n = st.frac.dim;
    let mut header = vec!["modes".to_string()];
    header.extend(record_header(n));
    header.extend(["seed_sup", "c_star", "threshold_source", "ordered", "plateau_flagged"].map(String::from));
    let mut table = Table::new(header);
    let mut flagged = false;
    let mut energies = Vec::new();
    let levels = build::levels(c);
    for &m in &levels {
        let basis = build::basis(c, &st.dom, m)?;
        let f = Functional::new(&basis, pp, st.weight.clone())?;
        log(ctx, format!("M = {m}: threshold"));
        let (c_star, source) = threshold(c, &basis, &st.frac, &st.weight)?;
        let seed = seed_inst.project(&basis)?;
        let tq = TraceQuantities::of_field(&seed, &f)?;
        let cap = Some(first_fractional_eigenvalue(&basis, &st.frac));
        let sup = fiber_report(&tq, seed_inst.eps, &pp, c_star, cap)?.sup_value;
        log(ctx, format!("M = {m}: minimizing"));
        let rec = minimize_on_nehari(&seed, 0, &f, &opts)?;
        let ps = ps_diagnostics(&rec.history, c_star)?;
        let ordered = rec.energy > 0.0 && rec.energy <= sup && sup < c_star;
        flagged |= !rec.converged() || !(rec.energy < c_star);
        let mut r = row![m];
        r.extend(record_row(&rec, &f));
        r.extend(row![sup, c_star, source, ordered, ps.flagged()]);
        table.push(r);
        sink.table(&format!("history_m{m}.csv"), &history_table(&rec))?;
        sink.coefficients(&format!("solution_m{m}.txt"), &rec.field, &basis, &st.frac)?;
        energies.push(rec.energy);
    }
    sink.table("solve.csv", &table)?;

    if levels.len() >= 2 {
        let mut refine = Table::new(["modes", "energy", "rel_change"]);
        for (i, (&m, &e)) in levels.iter().zip(&energies).enumerate() {
            let change = if i == 0 { f64::NAN } else { (e - energies[i - 1]).abs() / e.abs() };
            refine.push(row![m, e, change]);
        }
        sink.table("refine.csv", &refine)?;
        let k = energies.len();
        let last = (energies[k - 1] - energies[k - 2]).abs() / energies[k - 1].abs();
        let stable = last <= REFINE_TOL;
        flagged |= !stable;
        if k == 3 {
            let h = [0, 1, 2].map(|i| 1.0 / levels[i] as f64);
            let rich = richardson3(h, [energies[0], energies[1], energies[2]])?;
            let mut t = Table::new(["order", "limit", "last_rel_change", "stable"]);
            t.push(row![rich.order, rich.limit, rich.last_rel_change, stable]);
            sink.table("richardson.csv", &t)?;
        }
    }
    Ok(flagged)
}

pub fn multiplicity(ctx: &Context, sink: &mut Sink) -> Flagged {
    let c = ctx.cfg;
    let st = setup(c)?;
    let pp = build::problem(c, c.problem.lambdas[0])?;
    let opts = minimize_options(c);
    let basis = build::basis(c, &st.dom, c.solver.modes as usize)?;
    let f = Functional::new(&basis, pp, st.weight.clone())?;
    log(ctx, "threshold");
    let (c_star, source) = threshold(c, &basis, &st.frac, &st.weight)?;
    log(ctx, "basins");
    let eps_seed = c.instanton.eps_seed;
    let rep = multiplicity_search(&f, eps_seed, &opts)?;
    let maxima = st.weight.maxima();
    let mut header = record_header(st.frac.dim);
    header.extend(["distance_to_max", "within_r0", "below_c_star"].map(String::from));
    let mut table = Table::new(header);
    let mut flagged = rep.partial;
    for r in &rep.records {
        let d = r.barycenter.iter().zip(&maxima[r.basin_index]).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let below = r.energy < c_star;
        flagged |= !below;
        let mut row = record_row(r, &f);
        row.extend(row![d, d < rep.r0, below]);
        table.push(row);
        sink.coefficients(&format!("basin_{}.txt", r.basin_index), &r.field, &basis, &st.frac)?;
    }
    sink.table("multiplicity.csv", &table)?;
    let mut pairs = Table::new(["i", "j", "barycenter_gap", "hs_distance", "energy_gap", "distinct"]);
    for p in &rep.pairs {
        let gap = (rep.records[p.i].energy - rep.records[p.j].energy).abs();
        pairs.push(row![p.i, p.j, p.barycenter_gap, p.hs_distance, gap, p.distinct]);
    }
    sink.table("pairs.csv", &pairs)?;
    let mut th = Table::new(["c_star", "threshold_source", "r0"]);
    th.push(row![c_star, source, rep.r0]);
    sink.table("threshold.csv", &th)?;

    if c.solver.lambda_tilde {
        log(ctx, "lambda tilde");
        let lt = empirical_lambda_tilde(&f, c_star, eps_seed, pp.lambda, c.solver.lambda_max, 0.05, &opts)?;
        let mut t = Table::new(["lambda", "passing", "failing", "lambda_max"]);
        let failing = if lt.failing.is_finite() { lt.failing.into() } else { "none".into() };
        t.push(vec![pp.lambda.into(), lt.lambda.into(), failing, c.solver.lambda_max.into()]);
        sink.table("lambda_tilde.csv", &t)?;
    }
    Ok(flagged)
}
