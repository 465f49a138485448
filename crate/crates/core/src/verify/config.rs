//! Run configuration: a flat `key = value` file plus command-line overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub const SUITES: [&str; 7] = ["elliptic", "scalar", "green", "oracle", "yangmills", "cumulants", "all"];

/// Parameters of one verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: String,
    /// Lattice sizes; zero means "derive from the background".
    pub nt: usize,
    pub nx: usize,
    pub dt: f64,
    pub dx: f64,
    pub mu: f64,
    pub lambda: f64,
    pub g: f64,
    /// Phase index `m` in `θ = (4m + 1) K(i)`.
    pub theta_index: i64,
    pub tol_identity: f64,
    pub tol_mapping: f64,
    pub sigmas: f64,
    pub draws: usize,
    pub seed: u64,
    #[serde(skip)]
    pub out_dir: Option<PathBuf>,
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            suite: "all".into(),
            nt: 0,
            nx: 0,
            dt: 0.0,
            dx: 0.0,
            mu: 1.0,
            lambda: 2.0,
            g: 1.0,
            theta_index: 0,
            tol_identity: 1e-10,
            tol_mapping: 1e-10,
            sigmas: 5.0,
            draws: 1_000_000,
            seed: 20_150_917,
            out_dir: None,
            parallel: false,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Usage(format!("cannot parse {key} = {value}")))
}

impl RunConfig {
    pub fn for_suite(suite: &str) -> Result<Self> {
        let mut c = Self::default();
        c.set("suite", suite)?;
        Ok(c)
    }

    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        match key {
            "suite" => {
                let v = value.trim();
                if !SUITES.contains(&v) {
                    return Err(Error::Usage(format!("unknown suite {v:?}; expected one of {}", SUITES.join(", "))));
                }
                self.suite = v.to_string();
            }
            "nt" => self.nt = parse(key, value)?,
            "nx" => self.nx = parse(key, value)?,
            "dt" => self.dt = parse(key, value)?,
            "dx" => self.dx = parse(key, value)?,
            "mu" => self.mu = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "g" => self.g = parse(key, value)?,
            "theta_index" | "m" => self.theta_index = parse(key, value)?,
            "tol_identity" => self.tol_identity = parse(key, value)?,
            "tol_mapping" => self.tol_mapping = parse(key, value)?,
            "sigmas" => self.sigmas = parse(key, value)?,
            "draws" => self.draws = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" | "out_dir" => self.out_dir = Some(PathBuf::from(value.trim())),
            _ => return Err(Error::Usage(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// `key=value` override as given on the command line.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("expected key=value, got {assignment:?}")))?;
        self.set(k, v)
    }

    /// Reads assignments from text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    /// Serialized as `key = value` lines that [`RunConfig::apply_text`] reads back.
    pub fn to_text(&self) -> String {
        let mut m: BTreeMap<&str, String> = BTreeMap::new();
        m.insert("suite", self.suite.clone());
        m.insert("nt", self.nt.to_string());
        m.insert("nx", self.nx.to_string());
        m.insert("dt", self.dt.to_string());
        m.insert("dx", self.dx.to_string());
        m.insert("mu", self.mu.to_string());
        m.insert("lambda", self.lambda.to_string());
        m.insert("g", self.g.to_string());
        m.insert("theta_index", self.theta_index.to_string());
        m.insert("tol_identity", self.tol_identity.to_string());
        m.insert("tol_mapping", self.tol_mapping.to_string());
        m.insert("sigmas", self.sigmas.to_string());
        m.insert("draws", self.draws.to_string());
        m.insert("seed", self.seed.to_string());
        m.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Checks the invariants; violations are parameter errors.
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) {
            return Err(Error::Parameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if !(self.mu > 0.0) {
            return Err(Error::Parameter(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.g > 0.0) {
            return Err(Error::Parameter(format!("g must be positive, got {}", self.g)));
        }
        for (name, v) in [("tol_identity", self.tol_identity), ("tol_mapping", self.tol_mapping), ("sigmas", self.sigmas)] {
            if !(v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        let lattice_given = [self.nt, self.nx].iter().any(|&v| v != 0) || self.dt != 0.0 || self.dx != 0.0;
        if lattice_given {
            if self.nt < 8 || self.nx < 8 || !(self.dt > 0.0) || !(self.dx > 0.0) {
                return Err(Error::Parameter("lattice needs nt, nx >= 8 and positive dt, dx".into()));
            }
            if self.dt > self.dx {
                return Err(Error::Parameter(format!("stability bound dt <= dx violated: {} > {}", self.dt, self.dx)));
            }
        }
        if self.draws < 1000 {
            return Err(Error::Parameter(format!("draws must be at least 1000, got {}", self.draws)));
        }
        Ok(())
    }
}
