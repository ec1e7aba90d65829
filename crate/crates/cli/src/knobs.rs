//! Flat `key = value` settings: a config file overlaid by command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Mutex;

use serde_json::{json, Value};

use hsl_core::constants::{Hardy, ProblemParams};

use crate::CliError;

/// Every key a scenario may read, with its help line.
pub const KEYS: &[(&str, &str)] = &[
    ("n", "dimension N"),
    ("mu", "Hardy coefficient mu (or give nu)"),
    ("nu", "indicial exponent nu (alternative to mu)"),
    ("p", "source exponent (defaults to 2*-1 where it matters)"),
    ("q", "absorption exponent"),
    ("eps", "absorption coefficient; a comma list for families"),
    ("delta", "comma list of initial values for the Picard map"),
    ("u0", "central value of the large solution"),
    ("cap", "value at which a shooting run counts as blown up"),
    ("radius", "ball radius; a comma list where several are swept"),
    ("rho", "comma list of ball radii for the minimization"),
    ("nodes", "grid nodes"),
    ("tol", "solver tolerance"),
    ("s_start", "start of the backward Emden-Fowler run"),
    ("s_end", "end of the backward Emden-Fowler run"),
    ("pairs", "number of random (center, radius) pairs"),
    ("k_max", "largest doubling power"),
    ("seed", "random seed"),
];

/// Given settings, plus a record of every value a scenario actually used
/// (defaults included) for the report and manifest.
#[derive(Debug, Default)]
pub struct Knobs {
    map: BTreeMap<String, String>,
    used: Mutex<BTreeMap<String, Value>>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

impl Knobs {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("{}:{}: expected key = value", path.display(), i + 1)))?;
            let k = normalize(k);
            if !KEYS.iter().any(|(name, _)| *name == k) {
                return Err(CliError::Validation(format!("{}:{}: unknown key {k}", path.display(), i + 1)));
            }
            map.insert(k, v.trim().to_string());
        }
        Ok(Self { map, used: Mutex::default() })
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.map.insert(normalize(key), value);
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.map
    }

    pub fn resolved(&self) -> Value {
        json!(*self.used.lock().expect("knob record"))
    }

    fn note<T: Into<Value> + Clone>(&self, key: &str, v: T) -> T {
        self.used.lock().expect("knob record").insert(key.to_string(), v.clone().into());
        v
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, s: &str) -> Result<T, CliError> {
        s.trim().parse().map_err(|_| CliError::Validation(format!("{key} = {s} is not a valid value")))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.raw(key).map(|s| self.parse(key, s)).transpose()
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.note(key, self.opt_f64(key)?.unwrap_or(default)))
    }

    pub fn need_f64(&self, key: &str) -> Result<f64, CliError> {
        let v = self.opt_f64(key)?.ok_or_else(|| CliError::Validation(format!("missing {key}")))?;
        Ok(self.note(key, v))
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = self.raw(key).map(|s| self.parse(key, s)).transpose()?;
        Ok(self.note(key, v.unwrap_or(default)))
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64, CliError> {
        let v = self.raw(key).map(|s| self.parse(key, s)).transpose()?;
        Ok(self.note(key, v.unwrap_or(default)))
    }

    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v: Vec<f64> = match self.raw(key) {
            None => default.to_vec(),
            Some(s) => s.split(',').map(|x| self.parse(key, x)).collect::<Result<_, _>>()?,
        };
        Ok(self.note(key, v))
    }

    /// First entry of a list-valued key, for scenarios that take one value.
    pub fn first(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.raw(key) {
            None => default,
            Some(s) => self.parse(key, s.split(',').next().unwrap_or(""))?,
        };
        Ok(self.note(key, v))
    }

    /// `(N, mu)` or `(N, nu)`, with defaults for scenarios that have a standard set.
    pub fn hardy(&self, default: Option<(u32, f64)>) -> Result<Hardy, CliError> {
        let n = match (self.raw("n"), default) {
            (Some(s), _) => self.parse::<u32>("n", s)?,
            (None, Some((n, _))) => n,
            (None, None) => return Err(CliError::Validation("missing n".into())),
        };
        self.note("n", n);
        let h = match (self.opt_f64("mu")?, self.opt_f64("nu")?) {
            (Some(_), Some(_)) => return Err(CliError::Validation("give mu or nu, not both".into())),
            (Some(mu), None) => Hardy::new(n, mu),
            (None, Some(nu)) => Hardy::from_nu(n, nu),
            (None, None) => match default {
                Some((_, mu)) => Hardy::new(n, mu),
                None => return Err(CliError::Validation("missing mu (or nu)".into())),
            },
        };
        let h = h?;
        self.note("mu", h.mu);
        self.note("nu", h.nu);
        Ok(h)
    }

    /// Full parameter set; `p` defaults to `2*-1` and `eps` to the first list entry or 1.
    pub fn params(&self, h: Hardy, q_default: Option<f64>) -> Result<ProblemParams, CliError> {
        let p = self.f64("p", h.two_star() - 1.0)?;
        let q = match q_default {
            Some(d) => self.f64("q", d)?,
            None => self.need_f64("q")?,
        };
        let eps = self.first("eps", 1.0)?;
        Ok(ProblemParams::with_hardy(h, p, q, eps)?)
    }
}
