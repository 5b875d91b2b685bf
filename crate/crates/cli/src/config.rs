//! Experiment configuration: a flat TOML table, overridable key by key.
//!
//! Every key is optional; missing keys take the defaults below, which
//! describe the two-site model at `τ = 1`, `U = 3` over one period.
//!
//! | key | type | default |
//! |-----|------|---------|
//! | `n_sites` | integer ≥ 2 | 2 |
//! | `tau`, `u` | float | 1.0, 3.0 |
//! | `boundary` | `"open"` / `"periodic"` | `"open"` |
//! | `operator` | combination such as `"1up"` or `"1up - 2up"` | `"1up"` |
//! | `algorithm` | `"exact"` / `"os"` / `"cf"` / `"trotter"` | `"exact"` |
//! | `depth` | integer ≥ 1 | 2 |
//! | `dt`, `t_max` | float > 0 | 0.02, 4π |
//! | `shots` | integer ≥ 1, absent for exact brakets | absent |
//! | `e0` | `"exact"` or float | `"exact"` |
//! | `seed` | integer | 0 |
//! | `output` | path, relative to `$GREENVQS_OUT` | `"bundle"` |
//! | `integrator` | `"rk4"` / `"euler"` | `"rk4"` |
//! | `trotter_steps` | product-formula steps per `dt` | 1 |
//! | `ground_state` | `"canonical"` or eigenvector index | `"canonical"` |
//! | `symmetry_generator` | `S1` string; OS on the dimer uses the single-Pauli propagator | absent |
//! | `window`, `damping` | spectral window (defaults to the series length) and damping | absent, 0.0 |
//! | `pole_threshold` | fraction of the largest `|Im S|` | 0.1 |
//! | `convention` | ansatz exponent sign, `"minus_i"` / `"plus_i"` | `"minus_i"` |

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::{bail, Context};
use greenvqs::greens::Algorithm;
use greenvqs::hubbard::{momentum_operator, Boundary, HubbardModel, LadderKind, LadderOperatorExpansion, Spin};
use greenvqs::vqs::Integrator;
use greenvqs::{GroundStateSelector, PauliString};
use num_complex::Complex64;
use serde::Serialize;
use toml::{Table, Value};

pub const KEYS: [&str; 21] = [
    "n_sites",
    "tau",
    "u",
    "boundary",
    "operator",
    "algorithm",
    "depth",
    "dt",
    "t_max",
    "shots",
    "e0",
    "seed",
    "output",
    "integrator",
    "trotter_steps",
    "ground_state",
    "symmetry_generator",
    "window",
    "damping",
    "pole_threshold",
    "convention",
];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum E0Source {
    Exact,
    Value(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub n_sites: usize,
    pub tau: f64,
    pub u: f64,
    pub boundary: Boundary,
    pub operator: String,
    pub algorithm: Algorithm,
    pub depth: usize,
    pub dt: f64,
    pub t_max: f64,
    pub shots: Option<u64>,
    pub e0: E0Source,
    pub seed: u64,
    pub output: PathBuf,
    pub integrator: Integrator,
    pub trotter_steps: usize,
    pub ground_state: String,
    pub symmetry_generator: Option<String>,
    pub window: Option<f64>,
    pub damping: f64,
    pub pole_threshold: f64,
    pub convention: String,
}

/// Applies `key=value` overrides. Values are read as TOML scalars, falling
/// back to bare strings.
pub fn apply_overrides(table: &mut Table, overrides: &[String]) -> anyhow::Result<()> {
    for item in overrides {
        let Some((key, raw)) = item.split_once('=') else {
            bail!("override {item:?} is not of the form key=value");
        };
        let key = key.trim();
        let value = toml::from_str::<Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| Value::String(raw.trim().to_string()));
        table.insert(key.to_string(), value);
    }
    Ok(())
}

pub fn load_table(path: Option<&std::path::Path>) -> anyhow::Result<Table> {
    match path {
        None => Ok(Table::new()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
        }
    }
}

struct Reader<'a> {
    table: &'a Table,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn float(&mut self, key: &str, default: f64) -> f64 {
        match self.table.get(key) {
            None => default,
            Some(Value::Float(x)) if x.is_finite() => *x,
            Some(Value::Integer(i)) => *i as f64,
            Some(other) => {
                self.errors.push(format!("{key}: expected a finite number, got {other}"));
                default
            }
        }
    }

    fn integer(&mut self, key: &str, default: i64) -> i64 {
        match self.table.get(key) {
            None => default,
            Some(Value::Integer(i)) => *i,
            Some(other) => {
                self.errors.push(format!("{key}: expected an integer, got {other}"));
                default
            }
        }
    }

    fn string(&mut self, key: &str, default: &str) -> String {
        match self.table.get(key) {
            None => default.to_string(),
            Some(Value::String(s)) => s.clone(),
            Some(other) => {
                self.errors.push(format!("{key}: expected a string, got {other}"));
                default.to_string()
            }
        }
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, default: &str) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.string(key, default);
        match raw.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{key}: {e}"));
                None
            }
        }
    }

    fn positive_count(&mut self, key: &str, default: i64) -> usize {
        let v = self.integer(key, default);
        if v < 1 {
            self.errors.push(format!("{key}: must be at least 1, got {v}"));
            return default as usize;
        }
        v as usize
    }

    fn positive(&mut self, key: &str, default: f64) -> f64 {
        let v = self.float(key, default);
        if v <= 0.0 {
            self.errors.push(format!("{key}: must be positive, got {v}"));
            return default;
        }
        v
    }
}

impl Config {
    /// Validates every key, reporting all problems at once.
    pub fn from_table(table: &Table) -> Result<Self, Vec<String>> {
        let known: BTreeSet<&str> = KEYS.into_iter().collect();
        let mut r = Reader { table, errors: Vec::new() };
        for key in table.keys() {
            if !known.contains(key.as_str()) {
                r.errors.push(format!("unknown key `{key}`"));
            }
        }
        let n_sites = r.integer("n_sites", 2);
        if n_sites < 2 {
            r.errors.push(format!("n_sites: need at least 2 sites, got {n_sites}"));
        }
        let tau = r.float("tau", 1.0);
        let u = r.float("u", 3.0);
        let boundary = r.parsed::<Boundary>("boundary", "open");
        let operator = r.string("operator", "1up");
        let algorithm = r.parsed::<Algorithm>("algorithm", "exact");
        let depth = r.positive_count("depth", 2);
        let dt = r.positive("dt", 0.02);
        let t_max = r.positive("t_max", 4.0 * std::f64::consts::PI);
        let shots = table.get("shots").map(|_| r.positive_count("shots", 1) as u64);
        let e0 = match table.get("e0") {
            None => E0Source::Exact,
            Some(Value::String(s)) if s == "exact" => E0Source::Exact,
            Some(Value::Float(x)) if x.is_finite() => E0Source::Value(*x),
            Some(Value::Integer(i)) => E0Source::Value(*i as f64),
            Some(other) => {
                r.errors.push(format!("e0: expected \"exact\" or a number, got {other}"));
                E0Source::Exact
            }
        };
        let seed = r.integer("seed", 0);
        if seed < 0 {
            r.errors.push(format!("seed: must be non-negative, got {seed}"));
        }
        let output = PathBuf::from(r.string("output", "bundle"));
        let integrator = r.parsed::<Integrator>("integrator", "rk4");
        let trotter_steps = r.positive_count("trotter_steps", 1);
        let ground_state = r.string("ground_state", "canonical");
        if parse_selector(&ground_state).is_none() {
            r.errors.push(format!("ground_state: expected \"canonical\" or an index, got {ground_state:?}"));
        }
        let symmetry_generator = table.get("symmetry_generator").map(|_| r.string("symmetry_generator", ""));
        if let Some(g) = &symmetry_generator {
            if g.parse::<PauliString>().is_err() {
                r.errors.push(format!("symmetry_generator: {g:?} is not a Pauli string"));
            }
        }
        let window = table.get("window").map(|_| r.positive("window", 1.0));
        let damping = r.float("damping", 0.0);
        if damping < 0.0 {
            r.errors.push(format!("damping: must be non-negative, got {damping}"));
        }
        let pole_threshold = r.float("pole_threshold", 0.1);
        if !(0.0..1.0).contains(&pole_threshold) {
            r.errors.push(format!("pole_threshold: must lie in [0, 1), got {pole_threshold}"));
        }
        let convention = r.string("convention", "minus_i");
        if !matches!(convention.as_str(), "minus_i" | "plus_i") {
            r.errors.push(format!("convention: expected \"minus_i\" or \"plus_i\", got {convention:?}"));
        }
        if dt > 0.0 && t_max > 0.0 && t_max < dt {
            r.errors.push(format!("t_max: {t_max} is shorter than one step {dt}"));
        }
        if let (Some(Algorithm::Exact), Some(_)) = (algorithm, &symmetry_generator) {
            r.errors.push("symmetry_generator: only used with algorithm = \"os\"".into());
        }

        let mut errors = r.errors;
        let config = match (boundary, algorithm, integrator) {
            (Some(boundary), Some(algorithm), Some(integrator)) if errors.is_empty() => Some(Config {
                n_sites: n_sites as usize,
                tau,
                u,
                boundary,
                operator,
                algorithm,
                depth,
                dt,
                t_max,
                shots,
                e0,
                seed: seed as u64,
                output,
                integrator,
                trotter_steps,
                ground_state,
                symmetry_generator,
                window,
                damping,
                pole_threshold,
                convention,
            }),
            _ => None,
        };
        if let Some(c) = &config {
            match c.model() {
                Err(e) => errors.push(format!("model: {e}")),
                Ok(m) => {
                    if let Err(e) = c.annihilation(&m) {
                        errors.push(format!("operator: {e}"));
                    }
                    if m.n_qubits() > 8 {
                        errors.push(format!("n_sites: {} sites exceed the 8-qubit exact reference", c.n_sites));
                    }
                    if c.symmetry_generator.is_some() && c.n_sites != 2 {
                        errors.push("symmetry_generator: only defined for the two-site model".into());
                    }
                }
            }
        }
        match config {
            Some(c) if errors.is_empty() => Ok(c),
            _ => Err(errors),
        }
    }

    pub fn model(&self) -> greenvqs::Result<HubbardModel> {
        HubbardModel::new(self.n_sites, self.tau, self.u, self.boundary)
    }

    /// `c_l`, normalized; the creator is its adjoint.
    pub fn annihilation(&self, model: &HubbardModel) -> anyhow::Result<LadderOperatorExpansion> {
        let combo = parse_operator(&self.operator)?;
        for &(_, site, _) in &combo {
            if site == 0 || site > model.n_sites() {
                bail!("site {site} outside 1..={}", model.n_sites());
            }
        }
        Ok(momentum_operator(model, &combo, LadderKind::Annihilation, true)?)
    }

    pub fn selector(&self) -> GroundStateSelector {
        parse_selector(&self.ground_state).expect("validated")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data")
    }
}

fn parse_selector(s: &str) -> Option<GroundStateSelector> {
    if s == "canonical" {
        return Some(GroundStateSelector::Canonical);
    }
    s.parse().ok().map(GroundStateSelector::Eigenvector)
}

/// Parses `[coef*]<site><up|dn>` terms joined by `+` or `-`,
/// e.g. `"1up - 2up"` or `"0.5*1up + 2dn"`.
pub fn parse_operator(text: &str) -> anyhow::Result<Vec<(Complex64, usize, Spin)>> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        bail!("empty operator");
    }
    let mut terms = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'+' => (1.0, &rest[1..]),
            b'-' => (-1.0, &rest[1..]),
            _ if terms.is_empty() => (1.0, rest),
            _ => bail!("expected + or - before {rest:?}"),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let (term, tail) = body.split_at(end);
        let (coef, orbital) = match term.split_once('*') {
            Some((c, o)) => (c.parse::<f64>().with_context(|| format!("bad coefficient {c:?}"))?, o),
            None => (1.0, term),
        };
        let (digits, spin) = orbital
            .strip_suffix("up")
            .map(|d| (d, Spin::Up))
            .or_else(|| orbital.strip_suffix("dn").map(|d| (d, Spin::Down)))
            .with_context(|| format!("orbital {orbital:?} must end in `up` or `dn`"))?;
        let site = digits.parse::<usize>().with_context(|| format!("bad site in {orbital:?}"))?;
        terms.push((Complex64::new(sign * coef, 0.0), site, spin));
        rest = tail;
    }
    Ok(terms)
}
