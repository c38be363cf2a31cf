//! Strict `key = value` config files with `[section]` headers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use mixfrac_core::spectral::{Face, Side};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcommand {
    Eigen,
    Isometry,
    Sobolev,
    Rates,
    Fiber,
    Solve,
    Multiplicity,
}

impl Subcommand {
    pub const ALL: [Subcommand; 7] = [
        Subcommand::Eigen,
        Subcommand::Isometry,
        Subcommand::Sobolev,
        Subcommand::Rates,
        Subcommand::Fiber,
        Subcommand::Solve,
        Subcommand::Multiplicity,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Subcommand::Eigen => "eigen",
            Subcommand::Isometry => "isometry",
            Subcommand::Sobolev => "sobolev",
            Subcommand::Rates => "rates",
            Subcommand::Fiber => "fiber",
            Subcommand::Solve => "solve",
            Subcommand::Multiplicity => "multiplicity",
        }
    }
}

impl FromStr for Subcommand {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Subcommand::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown subcommand `{s}`")))
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    Floats,
    Int,
    Ints,
    Bool,
    Points,
    Faces,
}

/// Every accepted (section, key) pair.
const SCHEMA: &[(&str, &str, Kind)] = &[
    ("problem", "dim", Kind::Ints),
    ("problem", "s", Kind::Floats),
    ("problem", "q", Kind::Float),
    ("problem", "lambda", Kind::Floats),
    ("domain", "lengths", Kind::Floats),
    ("domain", "dirichlet", Kind::Faces),
    ("weight", "q_max", Kind::Float),
    ("weight", "background", Kind::Float),
    ("weight", "alpha", Kind::Float),
    ("weight", "centers", Kind::Points),
    ("weight", "coeff", Kind::Float),
    ("weight", "gamma", Kind::Float),
    ("instanton", "center", Kind::Floats),
    ("instanton", "rho", Kind::Float),
    ("instanton", "eps_exponents", Kind::Ints),
    ("instanton", "eps_seed", Kind::Float),
    ("instanton", "p", Kind::Floats),
    ("solver", "modes", Kind::Int),
    ("solver", "quad_points", Kind::Int),
    ("solver", "levels", Kind::Ints),
    ("solver", "count", Kind::Int),
    ("solver", "budget", Kind::Int),
    ("solver", "grad_tol", Kind::Float),
    ("solver", "r0", Kind::Float),
    ("solver", "estimate", Kind::Bool),
    ("solver", "restarts", Kind::Int),
    ("solver", "sobolev_budget", Kind::Int),
    ("solver", "lambda_tilde", Kind::Bool),
    ("solver", "lambda_max", Kind::Float),
    ("fiber", "c0", Kind::Float),
    ("fiber", "t1", Kind::Float),
    ("fiber", "t2", Kind::Float),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Floats(Vec<f64>),
    Int(i64),
    Ints(Vec<i64>),
    Bool(bool),
    Points(Vec<Vec<f64>>),
    Faces(Vec<Face>),
}

/// Parsed file: (section, key) -> (value, line number).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<(String, String), (Value, usize)>,
}

fn bad(line: usize, key: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config { line, key: key.to_string(), message: msg.to_string() }
}

fn parse_float(line: usize, key: &str, s: &str) -> Result<f64, CliError> {
    let v: f64 = s.trim().parse().map_err(|_| bad(line, key, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(bad(line, key, "value must be finite"));
    }
    Ok(v)
}

fn parse_int(line: usize, key: &str, s: &str) -> Result<i64, CliError> {
    s.trim().parse().map_err(|_| bad(line, key, format!("`{}` is not an integer", s.trim())))
}

fn list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim)
}

/// `x-`, `y+`, `z-` or `<axis>-` / `<axis>+` with a 0-based axis.
pub fn parse_face(s: &str) -> Option<Face> {
    let s = s.trim();
    let (axis, side) = s.split_at(s.len().checked_sub(1)?);
    let side = match side {
        "-" => Side::Low,
        "+" => Side::High,
        _ => return None,
    };
    let axis = match axis {
        "x" => 0,
        "y" => 1,
        "z" => 2,
        a => a.parse().ok()?,
    };
    Some(Face { axis, side })
}

pub fn face_name(f: Face) -> String {
    let side = match f.side {
        Side::Low => '-',
        Side::High => '+',
    };
    match f.axis {
        0 => format!("x{side}"),
        1 => format!("y{side}"),
        2 => format!("z{side}"),
        a => format!("{a}{side}"),
    }
}

fn parse_value(kind: Kind, line: usize, key: &str, text: &str) -> Result<Value, CliError> {
    if text.is_empty() {
        return Err(bad(line, key, "missing value"));
    }
    Ok(match kind {
        Kind::Float => Value::Float(parse_float(line, key, text)?),
        Kind::Int => Value::Int(parse_int(line, key, text)?),
        Kind::Floats => Value::Floats(list(text).map(|t| parse_float(line, key, t)).collect::<Result<_, _>>()?),
        Kind::Ints => Value::Ints(list(text).map(|t| parse_int(line, key, t)).collect::<Result<_, _>>()?),
        Kind::Bool => Value::Bool(match text {
            "true" => true,
            "false" => false,
            _ => return Err(bad(line, key, format!("`{text}` is not true/false"))),
        }),
        Kind::Points => Value::Points(
            text.split(';')
                .map(|p| list(p).map(|t| parse_float(line, key, t)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()?,
        ),
        Kind::Faces => Value::Faces(
            list(text)
                .map(|t| parse_face(t).ok_or_else(|| bad(line, key, format!("`{t}` is not a face (use x-, y+, 2-, ...)"))))
                .collect::<Result<_, _>>()?,
        ),
    })
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad(line, content, "unterminated section header"))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _, _)| *s == name) {
                    return Err(bad(line, name, "unknown section"));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| bad(line, content, "expected `key = value`"))?;
            let key = key.trim();
            let sec = section.clone().ok_or_else(|| bad(line, key, "key outside of any [section]"))?;
            let kind = SCHEMA
                .iter()
                .find(|(s, k, _)| *s == sec && *k == key)
                .map(|e| e.2)
                .ok_or_else(|| bad(line, &format!("{sec}.{key}"), "unknown key"))?;
            let v = parse_value(kind, line, &format!("{sec}.{key}"), value.trim())?;
            if entries.insert((sec.clone(), key.to_string()), (v, line)).is_some() {
                return Err(bad(line, &format!("{sec}.{key}"), "duplicate key"));
            }
        }
        Ok(Self { entries })
    }

    fn get(&self, sec: &str, key: &str) -> Option<&(Value, usize)> {
        self.entries.get(&(sec.to_string(), key.to_string()))
    }

    /// Canonical text: sorted `section.key = value` lines, independent of layout and comments.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for ((s, k), (v, _)) in &self.entries {
            out.push_str(&format!("{s}.{k} = {}\n", render(v)));
        }
        out
    }
}

fn render(v: &Value) -> String {
    let fl = |x: &[f64]| x.iter().map(|f| format!("{f:e}")).collect::<Vec<_>>().join(",");
    match v {
        Value::Float(f) => format!("{f:e}"),
        Value::Floats(f) => fl(f),
        Value::Int(i) => i.to_string(),
        Value::Ints(i) => i.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        Value::Bool(b) => b.to_string(),
        Value::Points(p) => p.iter().map(|x| fl(x)).collect::<Vec<_>>().join(";"),
        Value::Faces(f) => f.iter().map(|x| face_name(*x)).collect::<Vec<_>>().join(","),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSection {
    pub dims: Vec<i64>,
    pub s: Vec<f64>,
    pub q: Option<f64>,
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainSection {
    pub lengths: Vec<f64>,
    pub dirichlet: Vec<Face>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSection {
    pub q_max: f64,
    pub background: Option<f64>,
    pub alpha: Option<f64>,
    pub centers: Vec<Vec<f64>>,
    pub coeff: Option<f64>,
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstantonSection {
    pub center: Option<Vec<f64>>,
    pub rho: Option<f64>,
    pub eps_exponents: Vec<i64>,
    pub eps_seed: Option<f64>,
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverSection {
    pub modes: i64,
    pub quad_points: Option<i64>,
    pub levels: Vec<i64>,
    pub count: i64,
    pub budget: i64,
    pub grad_tol: f64,
    pub r0: Option<f64>,
    pub estimate: bool,
    pub restarts: Option<i64>,
    pub sobolev_budget: i64,
    pub lambda_tilde: bool,
    pub lambda_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberSection {
    pub c0: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
}

/// A fully parsed run. Numeric constraints are checked by `validate`, not here.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub problem: ProblemSection,
    pub domain: DomainSection,
    pub weight: WeightSection,
    pub instanton: InstantonSection,
    pub solver: SolverSection,
    pub fiber: FiberSection,
    /// Lines of each key, for diagnostics.
    pub lines: BTreeMap<String, usize>,
    pub canonical: String,
}

impl RunConfig {
    pub fn from_text(subcommand: Subcommand, text: &str) -> Result<Self, CliError> {
        Self::from_raw(subcommand, &RawConfig::parse(text)?)
    }

    pub fn from_raw(subcommand: Subcommand, raw: &RawConfig) -> Result<Self, CliError> {
        let float = |s: &str, k: &str| match raw.get(s, k) {
            Some((Value::Float(v), _)) => Some(*v),
            _ => None,
        };
        let floats = |s: &str, k: &str| match raw.get(s, k) {
            Some((Value::Floats(v), _)) => Some(v.clone()),
            _ => None,
        };
        let int = |s: &str, k: &str| match raw.get(s, k) {
            Some((Value::Int(v), _)) => Some(*v),
            _ => None,
        };
        let ints = |s: &str, k: &str| match raw.get(s, k) {
            Some((Value::Ints(v), _)) => Some(v.clone()),
            _ => None,
        };
        let boolean = |s: &str, k: &str| match raw.get(s, k) {
            Some((Value::Bool(v), _)) => Some(*v),
            _ => None,
        };
        let problem = ProblemSection {
            dims: ints("problem", "dim").unwrap_or_else(|| vec![2]),
            s: floats("problem", "s").unwrap_or_else(|| vec![0.75]),
            q: float("problem", "q"),
            lambdas: floats("problem", "lambda").unwrap_or_default(),
        };
        let dim = problem.dims.first().copied().unwrap_or(2).max(1) as usize;
        let domain = DomainSection {
            lengths: floats("domain", "lengths").unwrap_or_else(|| vec![1.0; dim]),
            dirichlet: match raw.get("domain", "dirichlet") {
                Some((Value::Faces(f), _)) => f.clone(),
                _ => vec![Face::low(0)],
            },
        };
        let weight = WeightSection {
            q_max: float("weight", "q_max").unwrap_or(1.0),
            background: float("weight", "background"),
            alpha: float("weight", "alpha"),
            centers: match raw.get("weight", "centers") {
                Some((Value::Points(p), _)) => p.clone(),
                _ => Vec::new(),
            },
            coeff: float("weight", "coeff"),
            gamma: float("weight", "gamma"),
        };
        let instanton = InstantonSection {
            center: floats("instanton", "center"),
            rho: float("instanton", "rho"),
            eps_exponents: ints("instanton", "eps_exponents").unwrap_or_else(|| (3..=8).collect()),
            eps_seed: float("instanton", "eps_seed"),
            p: floats("instanton", "p").unwrap_or_default(),
        };
        let solver = SolverSection {
            modes: int("solver", "modes").unwrap_or(32),
            quad_points: int("solver", "quad_points"),
            levels: ints("solver", "levels").unwrap_or_default(),
            count: int("solver", "count").unwrap_or(20),
            budget: int("solver", "budget").unwrap_or(4000),
            grad_tol: float("solver", "grad_tol").unwrap_or(mixfrac_core::nehari::GRAD_TOL),
            r0: float("solver", "r0"),
            estimate: boolean("solver", "estimate").unwrap_or(false),
            restarts: int("solver", "restarts"),
            sobolev_budget: int("solver", "sobolev_budget").unwrap_or(400),
            lambda_tilde: boolean("solver", "lambda_tilde").unwrap_or(false),
            lambda_max: float("solver", "lambda_max").unwrap_or(100.0),
        };
        let fiber = FiberSection { c0: float("fiber", "c0"), t1: float("fiber", "t1"), t2: float("fiber", "t2") };
        let lines = raw.entries.iter().map(|((s, k), (_, l))| (format!("{s}.{k}"), *l)).collect();
        Ok(Self {
            subcommand,
            problem,
            domain,
            weight,
            instanton,
            solver,
            fiber,
            lines,
            canonical: format!("subcommand = {subcommand}\n{}", raw.canonical()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_lists_and_comments() {
        let text = "# header\n[problem]\ndim = 2\ns = 0.6, 0.75 # inline\nlambda = 1\n\n[domain]\ndirichlet = x-, 1+\n[weight]\ncenters = 1, 0; 1, 1\n";
        let raw = RawConfig::parse(text).unwrap();
        let c = RunConfig::from_raw(Subcommand::Solve, &raw).unwrap();
        assert_eq!(c.problem.s, vec![0.6, 0.75]);
        assert_eq!(c.domain.dirichlet, vec![Face::low(0), Face::high(1)]);
        assert_eq!(c.weight.centers, vec![vec![1.0, 0.0], vec![1.0, 1.0]]);
        assert_eq!(c.lines["problem.lambda"], 5);
    }

    #[test]
    fn strictness() {
        let e = RawConfig::parse("[problem]\nsigma = 1\n").unwrap_err();
        assert!(e.to_string().contains("problem.sigma"), "{e}");
        assert!(RawConfig::parse("[nope]\n").is_err());
        assert!(RawConfig::parse("s = 1\n").is_err());
        assert!(RawConfig::parse("[problem]\ns = 1\ns = 2\n").is_err());
        assert!(RawConfig::parse("[problem]\ns = abc\n").is_err());
        assert!(RawConfig::parse("[domain]\ndirichlet = w-\n").is_err());
    }

    #[test]
    fn canonical_ignores_layout() {
        let a = RawConfig::parse("[problem]\ns=0.75\ndim=2\n").unwrap();
        let b = RawConfig::parse("# c\n[problem]\n  dim = 2\n s = 7.5e-1 \n").unwrap();
        assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn faces_round_trip() {
        for f in [Face::low(0), Face::high(1), Face::low(2), Face::high(5)] {
            assert_eq!(parse_face(&face_name(f)), Some(f));
        }
        assert_eq!("rates".parse::<Subcommand>().unwrap(), Subcommand::Rates);
        assert!("bogus".parse::<Subcommand>().is_err());
    }
}
