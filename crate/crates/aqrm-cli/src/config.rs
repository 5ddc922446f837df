//! Plain `key = value` run configuration with `[section]` headers.
//!
//! Unknown sections or keys are rejected outright; a resolved echo of the
//! effective configuration is written into every run's output directory.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// The run configuration; every field mirrors a CLI flag.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // [model]
    pub g: f64,
    pub delta: f64,
    pub eps: f64,
    // [series]
    pub lambda_max: usize,
    pub points: usize,
    pub seed: u64,
    pub target_rel_err: f64,
    pub sampler: String,
    pub order: usize,
    pub max_dim: usize,
    // [zeta]
    pub s_re: f64,
    pub s_im: f64,
    pub tau: Option<f64>,
    pub j_cut: usize,
    // [grid]
    pub g_min: f64,
    pub g_max: f64,
    pub steps: usize,
    pub grid: Vec<f64>,
    pub beta: Vec<f64>,
    pub j_max: usize,
    pub tol: f64,
    // [output]
    pub out_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            g: 0.0,
            delta: 0.0,
            eps: 0.0,
            lambda_max: 8,
            points: 16384,
            seed: 1,
            target_rel_err: 1e-3,
            sampler: "qmc".to_string(),
            order: 24,
            max_dim: 4,
            s_re: 2.0,
            s_im: 0.0,
            tau: None,
            j_cut: 200,
            g_min: 0.0,
            g_max: 3.0,
            steps: 16,
            grid: Vec::new(),
            beta: vec![1.0],
            j_max: 8,
            tol: 1e-8,
            out_dir: "out".to_string(),
        }
    }
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("model", &["g", "delta", "eps"]),
    (
        "series",
        &["lambda_max", "points", "seed", "target_rel_err", "sampler", "order", "max_dim"],
    ),
    ("zeta", &["s_re", "s_im", "tau", "j_cut"]),
    ("grid", &["g_min", "g_max", "steps", "grid", "beta", "j_max", "tol"]),
    ("output", &["dir"]),
];

fn known_key(section: &str, key: &str) -> bool {
    SECTIONS
        .iter()
        .any(|(s, keys)| *s == section && keys.contains(&key))
}

fn parse_list(v: &str) -> Result<Vec<f64>, ConfigError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| ConfigError(format!("bad number {p:?} in list")))
        })
        .collect()
}

impl RunConfig {
    /// Apply one dotted or sectioned key.
    fn set(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        if !known_key(section, key) {
            return Err(ConfigError(format!("unknown key [{section}] {key}")));
        }
        let fnum = || -> Result<f64, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError(format!("bad number {value:?} for {key}")))
        };
        let unum = || -> Result<u64, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError(format!("bad integer {value:?} for {key}")))
        };
        match (section, key) {
            ("model", "g") => self.g = fnum()?,
            ("model", "delta") => self.delta = fnum()?,
            ("model", "eps") => self.eps = fnum()?,
            ("series", "lambda_max") => self.lambda_max = unum()? as usize,
            ("series", "points") => self.points = unum()? as usize,
            ("series", "seed") => self.seed = unum()?,
            ("series", "target_rel_err") => self.target_rel_err = fnum()?,
            ("series", "sampler") => {
                if value != "qmc" && value != "nested_quadrature" {
                    return Err(ConfigError(format!("unknown sampler {value:?}")));
                }
                self.sampler = value.to_string();
            }
            ("series", "order") => self.order = unum()? as usize,
            ("series", "max_dim") => self.max_dim = unum()? as usize,
            ("zeta", "s_re") => self.s_re = fnum()?,
            ("zeta", "s_im") => self.s_im = fnum()?,
            ("zeta", "tau") => {
                self.tau = if value == "auto" { None } else { Some(fnum()?) };
            }
            ("zeta", "j_cut") => self.j_cut = unum()? as usize,
            ("grid", "g_min") => self.g_min = fnum()?,
            ("grid", "g_max") => self.g_max = fnum()?,
            ("grid", "steps") => self.steps = unum()? as usize,
            ("grid", "grid") => self.grid = parse_list(value)?,
            ("grid", "beta") => self.beta = parse_list(value)?,
            ("grid", "j_max") => self.j_max = unum()? as usize,
            ("grid", "tol") => self.tol = fnum()?,
            ("output", "dir") => self.out_dir = value.to_string(),
            _ => unreachable!("key table out of sync"),
        }
        Ok(())
    }

    /// Parse a config file body on top of this configuration.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError(format!("line {}: bad section", lineno + 1)))?
                    .trim();
                if !SECTIONS.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError(format!(
                        "line {}: unknown section [{name}]",
                        lineno + 1
                    )));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected key = value", lineno + 1))
            })?;
            if section.is_empty() {
                return Err(ConfigError(format!(
                    "line {}: key outside any section",
                    lineno + 1
                )));
            }
            self.set(&section, key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Canonical echo of the resolved configuration.
    pub fn echo(&self) -> String {
        let mut by_section: BTreeMap<&str, Vec<(String, String)>> = BTreeMap::new();
        let f = aqrm_core::serial::canon_f64;
        by_section.entry("model").or_default().extend([
            ("g".into(), f(self.g)),
            ("delta".into(), f(self.delta)),
            ("eps".into(), f(self.eps)),
        ]);
        by_section.entry("series").or_default().extend([
            ("lambda_max".into(), self.lambda_max.to_string()),
            ("points".into(), self.points.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("target_rel_err".into(), f(self.target_rel_err)),
            ("sampler".into(), self.sampler.clone()),
            ("order".into(), self.order.to_string()),
            ("max_dim".into(), self.max_dim.to_string()),
        ]);
        by_section.entry("zeta").or_default().extend([
            ("s_re".into(), f(self.s_re)),
            ("s_im".into(), f(self.s_im)),
            (
                "tau".into(),
                self.tau.map(f).unwrap_or_else(|| "auto".into()),
            ),
            ("j_cut".into(), self.j_cut.to_string()),
        ]);
        let list =
            |v: &[f64]| v.iter().map(|x| f(*x)).collect::<Vec<_>>().join(",");
        by_section.entry("grid").or_default().extend([
            ("g_min".into(), f(self.g_min)),
            ("g_max".into(), f(self.g_max)),
            ("steps".into(), self.steps.to_string()),
            ("grid".into(), list(&self.grid)),
            ("beta".into(), list(&self.beta)),
            ("j_max".into(), self.j_max.to_string()),
            ("tol".into(), f(self.tol)),
        ]);
        by_section
            .entry("output")
            .or_default()
            .push(("dir".into(), self.out_dir.clone()));
        let mut out = String::new();
        for (section, pairs) in by_section {
            out.push_str(&format!("[{section}]\n"));
            for (k, v) in pairs {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    /// Apply a long-form flag such as `--delta 0.5`; flags map onto the
    /// section keys with a few aliases.
    pub fn apply_flag(&mut self, flag: &str, value: &str) -> Result<(), ConfigError> {
        match flag {
            "g" => self.set("model", "g", value),
            "delta" => self.set("model", "delta", value),
            "eps" => self.set("model", "eps", value),
            "lambda-max" => self.set("series", "lambda_max", value),
            "points" => self.set("series", "points", value),
            "seed" => self.set("series", "seed", value),
            "target-rel-err" => self.set("series", "target_rel_err", value),
            "sampler" => self.set("series", "sampler", value),
            "order" => self.set("series", "order", value),
            "max-dim" => self.set("series", "max_dim", value),
            "s" => self.set("zeta", "s_re", value),
            "s-im" => self.set("zeta", "s_im", value),
            "tau" => self.set("zeta", "tau", value),
            "jcut" => self.set("zeta", "j_cut", value),
            "gmin" => self.set("grid", "g_min", value),
            "gmax" => self.set("grid", "g_max", value),
            "steps" => self.set("grid", "steps", value),
            "grid" => self.set("grid", "grid", value),
            "beta" => self.set("grid", "beta", value),
            "jmax" => self.set("grid", "j_max", value),
            "tol" => self.set("grid", "tol", value),
            "out" => self.set("output", "dir", value),
            _ => Err(ConfigError(format!("unknown flag --{flag}"))),
        }
    }
}
