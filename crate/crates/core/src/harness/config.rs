//! TOML experiment configuration.
//!
//! ```toml
//! [material]
//! name = "SiO2"
//! density_kg_m3 = 2200.0
//! ionic_mass_amu = 20.03
//! debye_temp_K = 470.0
//! lattice_spacing_m = 1.6e-10
//!
//! [geometry]
//! radius_m = 0.175
//! thickness_m = 0.16
//!
//! [pulse]
//! n = 0
//! t_p_s = 0.25
//! T_wait_s = 0.5
//!
//! [experiment]
//! omega_m_rad_s = 1.0
//! Q = 1e8
//! temp_K = 0.01
//! omega_sn_override_rad_s = 0.1   # optional
//! omega_cav_rad_s = 1.8e15        # optional, carried only
//! seed = 1                        # optional, Monte Carlo seed
//! gamma_pairs = 10000000          # optional, γ Monte Carlo budget
//! ```
//!
//! Every problem in a file is collected before failing, so one error lists
//! all offending keys.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::{Error, Result};
use crate::physcore::{MaterialSpec, MirrorGeometry, DEFAULT_GAMMA_PAIRS};
use crate::pulse::PulseProtocol;

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Float,
    Int,
    Text,
}

struct Key {
    name: &'static str,
    kind: Kind,
    required: bool,
}

const fn req(name: &'static str, kind: Kind) -> Key {
    Key { name, kind, required: true }
}

const fn opt(name: &'static str, kind: Kind) -> Key {
    Key { name, kind, required: false }
}

const MATERIAL_KEYS: &[Key] = &[
    opt("name", Kind::Text),
    req("density_kg_m3", Kind::Float),
    req("ionic_mass_amu", Kind::Float),
    req("debye_temp_K", Kind::Float),
    req("lattice_spacing_m", Kind::Float),
];
const GEOMETRY_KEYS: &[Key] = &[req("radius_m", Kind::Float), req("thickness_m", Kind::Float)];
const PULSE_KEYS: &[Key] = &[req("n", Kind::Int), req("t_p_s", Kind::Float), req("T_wait_s", Kind::Float)];
const EXPERIMENT_KEYS: &[Key] = &[
    req("omega_m_rad_s", Kind::Float),
    req("Q", Kind::Float),
    req("temp_K", Kind::Float),
    opt("omega_sn_override_rad_s", Kind::Float),
    opt("omega_cav_rad_s", Kind::Float),
    opt("seed", Kind::Int),
    opt("gamma_pairs", Kind::Int),
];
const SECTIONS: &[(&str, &[Key])] =
    &[("material", MATERIAL_KEYS), ("geometry", GEOMETRY_KEYS), ("pulse", PULSE_KEYS), ("experiment", EXPERIMENT_KEYS)];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSection {
    pub omega_m: f64,
    pub q_factor: f64,
    pub temperature: f64,
    pub omega_sn_override: Option<f64>,
    pub omega_cav: f64,
    pub seed: u64,
    pub gamma_pairs: u64,
}

/// A parsed file; sections may be absent.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    pub material: Option<MaterialSpec>,
    pub geometry: Option<MirrorGeometry>,
    pub pulse: Option<PulseProtocol>,
    pub experiment: Option<ExperimentSection>,
}

/// A complete configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub material: MaterialSpec,
    pub geometry: MirrorGeometry,
    pub pulse: PulseProtocol,
    pub experiment: ExperimentSection,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub omega_m: Option<f64>,
    pub omega_sn: Option<f64>,
    pub n: Option<u32>,
    pub t_p: Option<f64>,
    pub t_wait: Option<f64>,
    pub temperature: Option<f64>,
    pub q_factor: Option<f64>,
}

struct Collector {
    keys: Vec<String>,
    messages: Vec<String>,
}

impl Collector {
    fn push(&mut self, key: String, message: impl Into<String>) {
        self.messages.push(format!("{key}: {}", message.into()));
        self.keys.push(key);
    }

    fn finish(self) -> Result<()> {
        if self.keys.is_empty() {
            Ok(())
        } else {
            Err(Error::Config { keys: self.keys, message: self.messages.join("; ") })
        }
    }
}

fn as_float(v: &Value) -> Option<f64> {
    match v {
        Value::Float(f) => Some(*f),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    }
}

fn check_section(name: &str, table: &toml::Table, keys: &[Key], errors: &mut Collector) {
    for (k, v) in table {
        match keys.iter().find(|key| key.name == k) {
            None => errors.push(format!("{name}.{k}"), "unknown key"),
            Some(key) => {
                let ok = match key.kind {
                    Kind::Float => as_float(v).is_some(),
                    Kind::Int => matches!(v, Value::Integer(i) if *i >= 0),
                    Kind::Text => v.is_str(),
                };
                if !ok {
                    let want = match key.kind {
                        Kind::Float => "a number",
                        Kind::Int => "a non-negative integer",
                        Kind::Text => "a string",
                    };
                    errors.push(format!("{name}.{k}"), format!("expected {want}, got {v}"));
                }
            }
        }
    }
    for key in keys.iter().filter(|k| k.required) {
        if !table.contains_key(key.name) {
            errors.push(format!("{name}.{}", key.name), "missing required key");
        }
    }
}

fn float(t: &toml::Table, k: &str) -> f64 {
    as_float(&t[k]).expect("validated")
}

fn float_opt(t: &toml::Table, k: &str) -> Option<f64> {
    t.get(k).and_then(as_float)
}

fn int_opt(t: &toml::Table, k: &str) -> Option<u64> {
    t.get(k).and_then(Value::as_integer).map(|i| i as u64)
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let root: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Config { keys: vec!["<syntax>".into()], message: e.message().to_string() })?;
    parse_table(&root)
}

/// The same schema written as a JSON object of objects.
pub fn parse_config_json(text: &str) -> Result<ConfigFile> {
    let root: toml::Table =
        serde_json::from_str(text).map_err(|e| Error::Config { keys: vec!["<syntax>".into()], message: e.to_string() })?;
    parse_table(&root)
}

fn parse_table(root: &toml::Table) -> Result<ConfigFile> {
    let mut errors = Collector { keys: vec![], messages: vec![] };
    for (k, v) in root {
        match SECTIONS.iter().find(|(s, _)| s == k) {
            None => errors.push(k.clone(), "unknown section"),
            Some((s, keys)) => match v.as_table() {
                Some(t) => check_section(s, t, keys, &mut errors),
                None => errors.push(k.clone(), "expected a table"),
            },
        }
    }
    errors.finish()?;

    let mut errors = Collector { keys: vec![], messages: vec![] };
    let mut out = ConfigFile::default();
    if let Some(t) = root.get("material").and_then(Value::as_table) {
        let name = t.get("name").and_then(Value::as_str).unwrap_or("material");
        match MaterialSpec::from_lab_units(
            name,
            float(t, "density_kg_m3"),
            float(t, "ionic_mass_amu"),
            float(t, "debye_temp_K"),
            float(t, "lattice_spacing_m"),
        ) {
            Ok(m) => out.material = Some(m),
            Err(e) => errors.push("material".into(), e.to_string()),
        }
    }
    if let Some(t) = root.get("geometry").and_then(Value::as_table) {
        match MirrorGeometry::new(float(t, "radius_m"), float(t, "thickness_m")) {
            Ok(g) => out.geometry = Some(g),
            Err(e) => errors.push("geometry".into(), e.to_string()),
        }
    }
    if let Some(t) = root.get("pulse").and_then(Value::as_table) {
        let n = t["n"].as_integer().expect("validated");
        match u32::try_from(n).map_err(|_| Error::param("n", "too large")).and_then(|n| PulseProtocol::new(n, float(t, "t_p_s"), float(t, "T_wait_s"))) {
            Ok(p) => out.pulse = Some(p),
            Err(e) => errors.push("pulse".into(), e.to_string()),
        }
    }
    if let Some(t) = root.get("experiment").and_then(Value::as_table) {
        let section = ExperimentSection {
            omega_m: float(t, "omega_m_rad_s"),
            q_factor: float(t, "Q"),
            temperature: float(t, "temp_K"),
            omega_sn_override: float_opt(t, "omega_sn_override_rad_s"),
            omega_cav: float_opt(t, "omega_cav_rad_s").unwrap_or(0.0),
            seed: int_opt(t, "seed").unwrap_or(1),
            gamma_pairs: int_opt(t, "gamma_pairs").unwrap_or(DEFAULT_GAMMA_PAIRS),
        };
        validate_experiment(&section, &mut errors);
        out.experiment = Some(section);
    }
    errors.finish()?;
    Ok(out)
}

fn validate_experiment(s: &ExperimentSection, errors: &mut Collector) {
    if !(s.omega_m > 0.0 && s.omega_m.is_finite()) {
        errors.push("experiment.omega_m_rad_s".into(), "must be positive");
    }
    if !(s.q_factor >= 1.0 && s.q_factor.is_finite()) {
        errors.push("experiment.Q".into(), "must be at least 1");
    }
    if !(s.temperature >= 0.0 && s.temperature.is_finite()) {
        errors.push("experiment.temp_K".into(), "must be non-negative");
    }
    if let Some(w) = s.omega_sn_override {
        if !(w >= 0.0 && w.is_finite()) {
            errors.push("experiment.omega_sn_override_rad_s".into(), "must be non-negative");
        }
    }
    if s.gamma_pairs == 0 {
        errors.push("experiment.gamma_pairs".into(), "must be positive");
    }
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config { keys: vec![path.display().to_string()], message: e.to_string() })?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
        parse_config_json(&text)
    } else {
        parse_config(&text)
    }
}

impl ExperimentConfig {
    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let mut missing = vec![];
        if file.material.is_none() {
            missing.push("material".to_string());
        }
        if file.geometry.is_none() {
            missing.push("geometry".to_string());
        }
        if file.pulse.is_none() {
            missing.push("pulse".to_string());
        }
        if file.experiment.is_none() {
            missing.push("experiment".to_string());
        }
        if !missing.is_empty() {
            return Err(Error::Config { message: format!("missing section(s): {}", missing.join(", ")), keys: missing });
        }
        Ok(Self {
            material: file.material.unwrap(),
            geometry: file.geometry.unwrap(),
            pulse: file.pulse.unwrap(),
            experiment: file.experiment.unwrap(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_file(load_config_file(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_file(parse_config(text)?)
    }

    /// Apply command-line values on top of the file.
    pub fn with_overrides(mut self, o: &ConfigOverrides) -> Result<Self> {
        let mut errors = Collector { keys: vec![], messages: vec![] };
        if let Some(v) = o.omega_m {
            self.experiment.omega_m = v;
        }
        if let Some(v) = o.omega_sn {
            self.experiment.omega_sn_override = Some(v);
        }
        if let Some(v) = o.temperature {
            self.experiment.temperature = v;
        }
        if let Some(v) = o.q_factor {
            self.experiment.q_factor = v;
        }
        validate_experiment(&self.experiment, &mut errors);
        let n = o.n.unwrap_or(self.pulse.n);
        let t_p = o.t_p.unwrap_or(self.pulse.t_p);
        let t_wait = o.t_wait.unwrap_or(self.pulse.t_wait);
        match PulseProtocol::new(n, t_p, t_wait) {
            Ok(p) => self.pulse = p,
            Err(e) => errors.push("pulse".into(), e.to_string()),
        }
        errors.finish()?;
        Ok(self)
    }
}
