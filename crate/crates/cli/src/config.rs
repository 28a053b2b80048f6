//! Flat `key = value` experiment configs.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are validated
//! against the schema of the experiment kind; the effective config (defaults
//! filled in) is echoed next to the outputs and reproduces the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::RunError;

/// Experiment kinds with the keys each accepts and their defaults.
pub const KINDS: [&str; 10] =
    ["apply", "kernel", "sweep", "ce2", "weights", "bmo", "stationary", "wave", "commutator", "substitution"];

pub fn schema(kind: &str) -> Option<&'static [(&'static str, &'static str)]> {
    let keys: &'static [(&'static str, &'static str)] = match kind {
        "apply" => &[
            ("n", "1"),
            ("N", "256"),
            ("L", "16"),
            ("phase", "linear"),
            ("t", "1"),
            ("kappa", "2"),
            ("amplitude", "one"),
            ("m", "0"),
            ("rho", "1"),
            ("delta", "0"),
            ("width", "1"),
            ("center", "0"),
            ("decomposed", "false"),
            ("j_max", "4"),
        ],
        "kernel" => &[("power", "1"), ("mu", "0.9"), ("N", "1024"), ("L", "128"), ("y_max", "100"), ("refine", "true")],
        "sweep" => &[
            ("n", "2"),
            ("L", "8"),
            ("phase", "wave"),
            ("t", "1"),
            ("p", "1.1"),
            ("m", "-0.659090909090909, 0.090909090909091"),
            ("sizes", "32, 48, 64"),
            ("count", "6"),
        ],
        "ce2" => &[("m", "0"), ("mu", "0.5"), ("b", "0.9"), ("p", "2"), ("N", "1024"), ("L", "16")],
        "weights" => &[
            ("n", "1"),
            ("N", "1024"),
            ("L", "16"),
            ("weight", "power"),
            ("alpha", "-0.5"),
            ("p", "2"),
            ("r_max", "8"),
            ("levels", "12"),
        ],
        "bmo" => &[("function", "truncated_log"), ("r_max", "8"), ("levels", "12")],
        "stationary" => &[("n", "1"), ("mu", "0"), ("lambda_min", "8"), ("lambda_count", "7"), ("support", "8")],
        "wave" => &[
            ("n", "1"),
            ("N", "512"),
            ("L", "16"),
            ("t", "1.5"),
            ("width", "0.7071067811865476"),
            ("p", "4"),
            ("s", "0"),
            ("sizes", "256, 512, 1024"),
            ("count", "6"),
        ],
        "commutator" => &[
            ("b", "truncated_log"),
            ("m", "-1.1"),
            ("t", "1"),
            ("p", "2"),
            ("L", "16"),
            ("sizes", "512, 1024"),
            ("count", "8"),
        ],
        "substitution" => &[("n", "1"), ("N", "512"), ("L", "8"), ("map", "scale"), ("c", "2")],
        _ => return None,
    };
    Some(keys)
}

/// Keys every kind accepts.
const COMMON: [(&str, &str); 2] = [("kind", ""), ("seed", "0")];

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub kind: String,
    entries: BTreeMap<String, String>,
}

/// Parse `key = value` lines without schema checks.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, RunError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(RunError::Validation(format!("config line {}: expected `key = value`, got {line:?}", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(RunError::Validation(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(RunError::Validation(format!("config line {}: duplicate key {k:?}", i + 1)));
        }
    }
    Ok(out)
}

impl Config {
    /// Defaults for `kind` overlaid with `pairs`; unknown keys are rejected.
    pub fn build(kind: &str, pairs: BTreeMap<String, String>) -> Result<Self, RunError> {
        let Some(keys) = schema(kind) else {
            return Err(RunError::Validation(format!(
                "unknown experiment kind {kind:?}; valid kinds: {}",
                KINDS.join(", ")
            )));
        };
        let mut entries: BTreeMap<String, String> =
            keys.iter().chain(COMMON.iter()).map(|(k, v)| (k.to_string(), v.to_string())).collect();
        entries.insert("kind".into(), kind.into());
        for (k, v) in pairs {
            if !entries.contains_key(&k) {
                let mut valid: Vec<&str> = keys.iter().chain(COMMON.iter()).map(|(k, _)| *k).collect();
                valid.sort_unstable();
                return Err(RunError::Validation(format!(
                    "unknown key {k:?} for {kind}; valid keys: {}",
                    valid.join(", ")
                )));
            }
            if k == "kind" && v != kind {
                return Err(RunError::Validation(format!("config kind {v:?} does not match subcommand {kind:?}")));
            }
            entries.insert(k, v);
        }
        Ok(Self { kind: kind.into(), entries })
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.into(), value);
    }

    pub fn entries(&self) -> &BTreeMap<String, String> {
        &self.entries
    }

    /// The effective config in the input format, keys sorted.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    fn raw(&self, key: &str) -> &str {
        self.entries.get(key).map(String::as_str).unwrap_or_else(|| panic!("key {key} is not in the schema"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, RunError> {
        let v = self.raw(key);
        v.parse()
            .map_err(|_| RunError::Validation(format!("{key} = {v:?}: expected a {}", std::any::type_name::<T>())))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, RunError> {
        let v = self.raw(key);
        let out: Result<Vec<T>, _> = v.split(',').map(|s| s.trim().parse()).collect();
        match out {
            Ok(list) if !list.is_empty() => Ok(list),
            _ => Err(RunError::Validation(format!(
                "{key} = {v:?}: expected a comma-separated list of {}",
                std::any::type_name::<T>()
            ))),
        }
    }

    pub fn choice<'a>(&'a self, key: &str, allowed: &[&str]) -> Result<&'a str, RunError> {
        let v = self.raw(key);
        if allowed.contains(&v) {
            Ok(v)
        } else {
            Err(RunError::Validation(format!("{key} = {v:?}: expected one of {}", allowed.join(", "))))
        }
    }
}
