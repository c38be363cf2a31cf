//! Golden files pin the CSV schemas and the closed-form tables.
//! Set MIXFRAC_BLESS=1 to rewrite them after an intended change.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use mixfrac_cli::{run_config, CliError, RunConfig, Status, Subcommand};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn run(cmd: Subcommand, text: &str) -> (Status, BTreeMap<String, String>) {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::from_text(cmd, text).unwrap();
    let out = run_config(&cfg, dir.path(), false).unwrap();
    let files = out
        .files
        .iter()
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(p).unwrap()))
        .collect();
    (out.status, files)
}

fn check_golden(name: &str, actual: &str) {
    let path = golden_dir().join(name);
    if std::env::var_os("MIXFRAC_BLESS").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

const EIGEN: &str = "[problem]\ndim = 2\ns = 0.75\n[domain]\ndirichlet = x-\n[solver]\nmodes = 6\ncount = 12\n";
const SOBOLEV: &str = "[problem]\ndim = 2, 3, 4\ns = 0.6, 0.75, 0.9\n";

const SMALL: &[(Subcommand, &str)] = &[
    (Subcommand::Eigen, EIGEN),
    (Subcommand::Isometry, "[problem]\ns = 0.75\n[solver]\nmodes = 4\ncount = 3\n"),
    (Subcommand::Sobolev, "[problem]\ndim = 2\ns = 0.75\n[solver]\nmodes = 8\nestimate = true\nsobolev_budget = 5\nrestarts = 1\n"),
    (
        Subcommand::Rates,
        "[problem]\ns = 0.75\n[weight]\nq_max = 2\nbackground = 1\nalpha = 1\ncenters = 1, 0.5\ncoeff = 4\ngamma = 2\n[instanton]\neps_exponents = 3, 4, 5, 6\np = 2, 4\n[solver]\nmodes = 8\n",
    ),
    (
        Subcommand::Fiber,
        "[problem]\ns = 0.75\nq = 2\nlambda = 0, 1, 100\n[instanton]\ncenter = 1, 0.5\neps_exponents = 3, 4\n[solver]\nmodes = 8\n[fiber]\nc0 = 0.1\nt1 = 0.1\nt2 = 10\n",
    ),
    (
        Subcommand::Solve,
        "[problem]\ns = 0.75\nq = 2\nlambda = 1\n[weight]\nq_max = 2\nbackground = 1\nalpha = 1\ncenters = 1, 0\ncoeff = 16\ngamma = 2.5\n[solver]\nlevels = 8, 10, 12\nbudget = 50\n",
    ),
    (
        Subcommand::Multiplicity,
        "[problem]\ns = 0.75\nq = 2\nlambda = 1\n[weight]\nq_max = 2\nbackground = 1\nalpha = 1\ncenters = 1, 0; 1, 1\ncoeff = 16\ngamma = 2.5\n[solver]\nmodes = 10\nbudget = 50\n",
    ),
];

#[test]
fn csv_schemas() {
    let mut schema = String::new();
    for (cmd, text) in SMALL {
        let (_, files) = run(*cmd, text);
        for (name, body) in files {
            let mut lines = body.lines();
            let provenance = lines.next().unwrap();
            assert!(provenance.starts_with(&format!("# mixfrac {} {cmd} config=", env!("CARGO_PKG_VERSION"))));
            let header = if name.ends_with(".txt") { lines.next().unwrap().split(' ').take(2).collect::<Vec<_>>().join(" ") } else { lines.next().unwrap().to_string() };
            schema.push_str(&format!("{cmd} {name}: {header}\n"));
        }
    }
    check_golden("schemas.txt", &schema);
}

#[test]
fn closed_form_tables() {
    let (status, files) = run(Subcommand::Eigen, EIGEN);
    assert_eq!(status, Status::Ok);
    check_golden("eigen.csv", &files["eigen.csv"]);
    let (status, files) = run(Subcommand::Sobolev, SOBOLEV);
    assert_eq!(status, Status::Ok);
    check_golden("sobolev.csv", &files["sobolev.csv"]);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (cmd, text) = SMALL[4];
    assert_eq!(run(cmd, text).1, run(cmd, text).1);
    let (cmd, text) = SMALL[6];
    assert_eq!(run(cmd, text).1, run(cmd, text).1);
}

#[test]
fn layout_does_not_change_the_hash() {
    let a = run(Subcommand::Eigen, EIGEN).1;
    let shuffled = "# same run\n[solver]\ncount = 12\nmodes = 6\n\n[domain]\ndirichlet = x-\n[problem]\ns = 7.5e-1\ndim = 2\n";
    assert_eq!(a, run(Subcommand::Eigen, shuffled).1);
}

#[test]
fn frozen_bracket_violation_is_partial() {
    let text = SMALL[4].1.replace("t2 = 10", "t2 = 0.5");
    let (status, files) = run(Subcommand::Fiber, &text);
    assert_eq!(status, Status::Partial);
    assert!(files["fiber_constants.csv"].lines().last().unwrap().ends_with("false"));
}

fn diagnostics(cmd: Subcommand, text: &str) -> Vec<String> {
    let cfg = RunConfig::from_text(cmd, text).unwrap();
    let dir = tempfile::tempdir().unwrap();
    match run_config(&cfg, dir.path(), false) {
        Err(CliError::Invalid(d)) => {
            assert!(fs::read_dir(dir.path()).unwrap().next().is_none(), "nothing may be written");
            d.iter().map(|d| d.to_string()).collect()
        }
        other => panic!("expected a validation error, got {other:?}"),
    }
}

#[test]
fn validation_messages() {
    let d = diagnostics(Subcommand::Eigen, "[problem]\ns = 0.4\n");
    assert_eq!(d, vec!["problem.s = 0.4: s must lie in (1/2, 1)"]);
    let d = diagnostics(Subcommand::Fiber, "[problem]\ns = 0.75\nq = 7\nlambda = 1\n");
    assert!(d[0].contains("q must be < 2*_s - 1"), "{d:?}");
    let d = diagnostics(
        Subcommand::Solve,
        "[problem]\ns = 0.75\nq = 2\nlambda = 1\n[weight]\nq_max = 2\nbackground = 1\nalpha = 1\ncenters = 0, 0.5\ncoeff = 1\ngamma = 2\n",
    );
    assert!(d[0].starts_with("weight.centers") && d[0].contains("Dirichlet"), "{d:?}");
}

fn binary(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mixfrac")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let out = dir.path().join("out");
    let (o, c) = (out.to_str().unwrap(), conf.to_str().unwrap());

    fs::write(&conf, EIGEN).unwrap();
    assert_eq!(binary(&["frobnicate", "--config", c, "--out", o]).0, 1);
    assert!(binary(&["frobnicate", "--config", c]).1.contains("usage: mixfrac"));
    assert_eq!(binary(&["eigen", "--config", c, "--out", o, "--threads", "1"]).0, 0);
    assert!(out.join("eigen.csv").exists());

    fs::write(&conf, "[problem]\nsigma = 1\n").unwrap();
    let (code, err) = binary(&["eigen", "--config", c, "--out", o]);
    assert_eq!(code, 1);
    assert!(err.contains("problem.sigma"), "{err}");

    fs::write(&conf, SMALL[4].1.replace("t2 = 10", "t2 = 0.5")).unwrap();
    assert_eq!(binary(&["fiber", "--config", c, "--out", o]).0, 2);
}

#[test]
fn coefficient_dump_round_trip() {
    let (_, files) = run(SMALL[6].0, SMALL[6].1);
    let field = mixfrac_cli::output::read_coefficients(&files["basin_0.txt"]).unwrap();
    assert_eq!(field.len(), 100);
    let header = files["basin_0.txt"].lines().nth(1).unwrap().to_string();
    assert!(header.contains("modes_per_axis=10") && header.contains("count=100"), "{header}");
    let first: f64 = files["basin_0.txt"].lines().nth(2).unwrap().parse().unwrap();
    assert_eq!(first, field.coeffs[0]);
}
