//! Scenario files and the shipped presets.
//!
//! A scenario is plain text, one `key = value` per line. Blank lines and lines
//! starting with `#` are ignored; keys are dotted paths and may appear once.
//!
//! ```text
//! file      := { line "\n" }
//! line      := blank | "#" text | key ws* "=" ws* value
//! key       := ident { "." ident }
//! number    := decimal floating-point literal
//! function  := number | "const(" number ")"
//!            | "sin(" number "," number "," number "," number ")"
//!            | "pwl(" knot { "," knot } ")"
//! knot      := number ":" number
//! ```
//!
//! `sin(base, amplitude, omega, phase)` is `base + amplitude * sin(omega t + phase)`
//! and `pwl` interpolates its `time:value` knots, holding the end values.
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `schema_version` | `1` | required |
//! | `model.a1`, `model.a2`, `model.b1`, `model.c1`, `model.c2`, `model.m`, `model.sigma1`, `model.sigma2` | function | required |
//! | `model.x0` | `x10, x20` | required |
//! | `model.channel1.atoms` | `mark:mass, …` (may be empty) | no atoms |
//! | `model.channel1.gamma1`, `model.channel1.gamma2` | functions separated by `;`, one per atom | required with atoms |
//! | `model.channel2.atoms` | as above | no atoms |
//! | `model.channel2.delta1`, `model.channel2.delta2` | as above | required with atoms |
//! | `sim.horizon`, `sim.dt` | number | required |
//! | `sim.seed` | unsigned integer | `0` |
//! | `sim.scheme` | `log_euler` or `direct_euler` | `log_euler` |
//! | `ensemble.num_paths` | integer | `1000` |
//! | `ensemble.checkpoints` | numbers, or `linspace(a, b, n)` | `linspace(T/10, T, 10)` |
//! | `ensemble.tail_window` | number in `(0, 1]` | `0.5` |
//! | `analysis.horizon` | number | `1000` |
//! | `analysis.tolerance_band` | number or `auto` | `auto` |
//! | `analysis.theta` | numbers in `(0, 1)` | `0.5` |
//! | `analysis.p` | numbers | `1, 2` |
//! | `analysis.epsilon` | number in `(0, 1)` | `0.05` |
//! | `analysis.occupancy1`, `analysis.occupancy2` | `h, H` or `pilot` | `pilot` |
//! | `analysis.chi` | number or `pilot` | `pilot` |
//! | `output.directory` | path | `out` |
//! | `output.formats` | subset of `csv, json` | `csv, json` |
//! | `output.max_saved_paths` | integer | `10` |
//! | `flags.allow_degenerate`, `flags.prey_only` | `true` or `false` | `false` |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ensemble::{Band, EnsembleParams};
use crate::model::{Atom, FiniteJumpMeasure, JumpChannel, ModelSpec, Species, TimeFunction, ValidatedModel, ValidationReport};
use crate::regime::AnalysisParams;
use crate::sim::{Scheme, SimParams};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("model is not admissible: {0}")]
    Admissibility(ValidationReport),
}

impl ConfigError {
    fn schema(field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Schema {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Field path of a schema violation.
    pub fn field(&self) -> Option<&str> {
        match self {
            ConfigError::Schema { field, .. } => Some(field),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSettings {
    pub num_paths: usize,
    pub checkpoints: Vec<f64>,
    pub tail_window: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub horizon: f64,
    /// `None` picks the default band for the spec.
    pub tolerance_band: Option<f64>,
    pub theta_list: Vec<f64>,
    pub p_list: Vec<f64>,
    pub epsilon: f64,
    /// `None` takes the band from a pilot run.
    pub occupancy: [Option<Band>; 2],
    /// Radius for the boundedness check; `None` takes it from a pilot run.
    pub chi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub directory: PathBuf,
    pub csv: bool,
    pub json: bool,
    pub max_saved_paths: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Flags {
    pub allow_degenerate: bool,
    pub prey_only: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub model: ModelSpec,
    pub sim: SimParams,
    pub ensemble: EnsembleSettings,
    pub analysis: AnalysisSettings,
    pub output: OutputSettings,
    pub flags: Flags,
}

impl ScenarioConfig {
    /// Applies the admissibility check, or only its structural part when
    /// degenerate specs are allowed.
    pub fn validated_model(&self) -> Result<ValidatedModel, ConfigError> {
        let checked = if self.flags.allow_degenerate {
            ValidatedModel::allow_degenerate(self.model.clone())
        } else {
            ValidatedModel::new(self.model.clone())
        };
        checked.map_err(ConfigError::Admissibility)
    }

    pub fn ensemble_params(&self) -> EnsembleParams {
        EnsembleParams {
            num_paths: self.ensemble.num_paths,
            sim: self.sim,
            checkpoints: self.ensemble.checkpoints.clone(),
            tail_window: self.ensemble.tail_window,
            p_list: self.analysis.p_list.clone(),
            theta_list: self.analysis.theta_list.clone(),
            occupancy: self.analysis.occupancy,
            chi: self.analysis.chi,
            extinction_threshold: crate::ensemble::EXTINCTION_THRESHOLD,
        }
    }

    pub fn analysis_params(&self, degenerate: bool) -> AnalysisParams {
        AnalysisParams {
            horizon: self.analysis.horizon,
            tolerance_band: self.analysis.tolerance_band,
            degenerate,
            ..AnalysisParams::default()
        }
    }

    /// Canonical text form; `parse_config(&c.emit())` gives back `c`.
    pub fn emit(&self) -> String {
        let m = &self.model;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("schema_version", CONFIG_SCHEMA_VERSION.to_string());
        kv("model.a1", m.a[0].to_string());
        kv("model.a2", m.a[1].to_string());
        kv("model.b1", m.b1.to_string());
        kv("model.c1", m.c[0].to_string());
        kv("model.c2", m.c[1].to_string());
        kv("model.m", m.m.to_string());
        kv("model.sigma1", m.sigma[0].to_string());
        kv("model.sigma2", m.sigma[1].to_string());
        kv("model.x0", format!("{:?}, {:?}", m.x0[0], m.x0[1]));
        for (n, ch, amp) in [(1, &m.channel1, "gamma"), (2, &m.channel2, "delta")] {
            let atoms: Vec<String> = ch
                .measure()
                .atoms()
                .iter()
                .map(|a| format!("{:?}:{:?}", a.mark, a.mass))
                .collect();
            kv(&format!("model.channel{n}.atoms"), atoms.join(", "));
            if !atoms.is_empty() {
                for s in Species::ALL {
                    let fs: Vec<String> = ch.amplitudes(s).iter().map(|f| f.to_string()).collect();
                    kv(&format!("model.channel{n}.{amp}{}", s.number()), fs.join("; "));
                }
            }
        }
        kv("sim.horizon", format!("{:?}", self.sim.horizon));
        kv("sim.dt", format!("{:?}", self.sim.dt));
        kv("sim.seed", self.sim.seed.to_string());
        kv("sim.scheme", self.sim.scheme.name().to_string());
        kv("ensemble.num_paths", self.ensemble.num_paths.to_string());
        kv("ensemble.checkpoints", join_numbers(&self.ensemble.checkpoints));
        kv("ensemble.tail_window", format!("{:?}", self.ensemble.tail_window));
        kv("analysis.horizon", format!("{:?}", self.analysis.horizon));
        kv(
            "analysis.tolerance_band",
            self.analysis.tolerance_band.map_or("auto".into(), |b| format!("{b:?}")),
        );
        kv("analysis.theta", join_numbers(&self.analysis.theta_list));
        kv("analysis.p", join_numbers(&self.analysis.p_list));
        kv("analysis.epsilon", format!("{:?}", self.analysis.epsilon));
        for s in Species::ALL {
            let v = self.analysis.occupancy[s.index()]
                .map_or("pilot".into(), |b| format!("{:?}, {:?}", b.h, b.upper));
            kv(&format!("analysis.occupancy{}", s.number()), v);
        }
        kv(
            "analysis.chi",
            self.analysis.chi.map_or("pilot".into(), |c| format!("{c:?}")),
        );
        kv("output.directory", self.output.directory.display().to_string());
        let formats: Vec<&str> = [(self.output.csv, "csv"), (self.output.json, "json")]
            .into_iter()
            .filter_map(|(on, name)| on.then_some(name))
            .collect();
        kv("output.formats", formats.join(", "));
        kv("output.max_saved_paths", self.output.max_saved_paths.to_string());
        kv("flags.allow_degenerate", self.flags.allow_degenerate.to_string());
        kv("flags.prey_only", self.flags.prey_only.to_string());
        out
    }
}

fn join_numbers(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

const KNOWN_KEYS: &[&str] = &[
    "schema_version",
    "model.a1",
    "model.a2",
    "model.b1",
    "model.c1",
    "model.c2",
    "model.m",
    "model.sigma1",
    "model.sigma2",
    "model.x0",
    "model.channel1.atoms",
    "model.channel1.gamma1",
    "model.channel1.gamma2",
    "model.channel2.atoms",
    "model.channel2.delta1",
    "model.channel2.delta2",
    "sim.horizon",
    "sim.dt",
    "sim.seed",
    "sim.scheme",
    "ensemble.num_paths",
    "ensemble.checkpoints",
    "ensemble.tail_window",
    "analysis.horizon",
    "analysis.tolerance_band",
    "analysis.theta",
    "analysis.p",
    "analysis.epsilon",
    "analysis.occupancy1",
    "analysis.occupancy2",
    "analysis.chi",
    "output.directory",
    "output.formats",
    "output.max_saved_paths",
    "flags.allow_degenerate",
    "flags.prey_only",
];

struct Table {
    entries: BTreeMap<String, String>,
}

impl Table {
    fn parse(text: &str) -> Result<Table, ConfigError> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::schema(&format!("line {}", n + 1), "expected `key = value`"))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::schema(key, "unknown key"));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(ConfigError::schema(key, "key given twice"));
            }
        }
        Ok(Table { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::schema(key, "missing required key"))
    }

    fn number(&self, key: &str, default: Option<f64>) -> Result<f64, ConfigError> {
        match (self.get(key), default) {
            (Some(v), _) => parse_number(key, v),
            (None, Some(d)) => Ok(d),
            (None, None) => Err(ConfigError::schema(key, "missing required key")),
        }
    }

    fn integer<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError> {
        match self.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| ConfigError::schema(key, format!("expected a non-negative integer, got `{v}`"))),
            None => Ok(default),
        }
    }

    fn boolean(&self, key: &str) -> Result<bool, ConfigError> {
        match self.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(ConfigError::schema(key, format!("expected true or false, got `{v}`"))),
        }
    }

    fn function(&self, key: &str) -> Result<TimeFunction, ConfigError> {
        parse_function(key, self.required(key)?)
    }

    fn numbers(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, ConfigError> {
        match self.get(key) {
            Some(v) => parse_list(key, v),
            None => Ok(default.to_vec()),
        }
    }
}

fn parse_number(key: &str, s: &str) -> Result<f64, ConfigError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| ConfigError::schema(key, format!("expected a number, got `{}`", s.trim())))?;
    if !v.is_finite() {
        return Err(ConfigError::schema(key, format!("expected a finite number, got `{}`", s.trim())));
    }
    Ok(v)
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse_number(key, p)).collect()
}

fn call<'a>(key: &str, s: &'a str, name: &str) -> Result<Option<&'a str>, ConfigError> {
    let Some(rest) = s.strip_prefix(name) else {
        return Ok(None);
    };
    let rest = rest.trim_start();
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| ConfigError::schema(key, format!("malformed `{name}(…)` in `{s}`")))?;
    Ok(Some(inner))
}

/// Parses one coefficient function.
pub fn parse_function(key: &str, s: &str) -> Result<TimeFunction, ConfigError> {
    let s = s.trim();
    let model_err = |e: crate::model::ModelError| ConfigError::schema(key, e.to_string());
    if let Some(inner) = call(key, s, "const")? {
        return Ok(TimeFunction::constant(parse_number(key, inner)?));
    }
    if let Some(inner) = call(key, s, "sin")? {
        let v = parse_list(key, inner)?;
        if v.len() != 4 {
            return Err(ConfigError::schema(key, "sin takes base, amplitude, omega, phase"));
        }
        return TimeFunction::sinusoid(v[0], v[1], v[2], v[3]).map_err(model_err);
    }
    if let Some(inner) = call(key, s, "pwl")? {
        let knots = inner
            .split(',')
            .map(|k| {
                let (t, v) = k
                    .split_once(':')
                    .ok_or_else(|| ConfigError::schema(key, format!("knot `{}` is not time:value", k.trim())))?;
                Ok((parse_number(key, t)?, parse_number(key, v)?))
            })
            .collect::<Result<Vec<_>, ConfigError>>()?;
        return TimeFunction::piecewise_linear(knots).map_err(model_err);
    }
    Ok(TimeFunction::constant(parse_number(key, s)?))
}

fn parse_channel(t: &Table, n: u8, amp: &str, compensated: bool) -> Result<JumpChannel, ConfigError> {
    let atoms_key = format!("model.channel{n}.atoms");
    let keys = [
        format!("model.channel{n}.{amp}1"),
        format!("model.channel{n}.{amp}2"),
    ];
    let atoms = match t.get(&atoms_key).map(str::trim) {
        None | Some("") => {
            if let Some(k) = keys.iter().find(|k| t.get(k).is_some()) {
                return Err(ConfigError::schema(k, "amplitudes given for a channel without atoms"));
            }
            return Ok(JumpChannel::empty(compensated));
        }
        Some(list) => list
            .split(',')
            .map(|a| {
                let (mark, mass) = a
                    .split_once(':')
                    .ok_or_else(|| ConfigError::schema(&atoms_key, format!("atom `{}` is not mark:mass", a.trim())))?;
                Ok(Atom {
                    mark: parse_number(&atoms_key, mark)?,
                    mass: parse_number(&atoms_key, mass)?,
                })
            })
            .collect::<Result<Vec<_>, ConfigError>>()?,
    };
    let measure = FiniteJumpMeasure::new(atoms).map_err(|e| ConfigError::schema(&atoms_key, e.to_string()))?;
    let mut amps = Vec::with_capacity(2);
    for key in &keys {
        let fs = t
            .required(key)?
            .split(';')
            .map(|f| parse_function(key, f))
            .collect::<Result<Vec<_>, ConfigError>>()?;
        if fs.len() != measure.len() {
            return Err(ConfigError::schema(
                key,
                format!("{} amplitudes for {} atoms", fs.len(), measure.len()),
            ));
        }
        amps.push(fs);
    }
    let predator = amps.pop().unwrap();
    let prey = amps.pop().unwrap();
    JumpChannel::new(measure, prey, predator, compensated).map_err(|e| ConfigError::schema(&keys[0], e.to_string()))
}

fn parse_checkpoints(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    if let Some(inner) = call(key, s.trim(), "linspace")? {
        let v = parse_list(key, inner)?;
        if v.len() != 3 || v[2] < 1.0 || v[2].fract() != 0.0 {
            return Err(ConfigError::schema(key, "linspace takes start, end, count"));
        }
        let n = v[2] as usize;
        if n == 1 {
            return Ok(vec![v[1]]);
        }
        return Ok((0..n)
            .map(|k| if k + 1 == n { v[1] } else { v[0] + (v[1] - v[0]) * k as f64 / (n - 1) as f64 })
            .collect());
    }
    parse_list(key, s)
}

fn parse_band(key: &str, s: &str) -> Result<Option<Band>, ConfigError> {
    if s.trim() == "pilot" {
        return Ok(None);
    }
    let v = parse_list(key, s)?;
    if v.len() != 2 || !(v[0] < v[1]) {
        return Err(ConfigError::schema(key, "expected `h, H` with h < H"));
    }
    Ok(Some(Band { h: v[0], upper: v[1] }))
}

/// Parses scenario text without the admissibility check.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let t = Table::parse(text)?;
    let version = t.required("schema_version")?;
    if version.trim() != CONFIG_SCHEMA_VERSION.to_string() {
        return Err(ConfigError::schema(
            "schema_version",
            format!("unsupported version `{version}`, expected {CONFIG_SCHEMA_VERSION}"),
        ));
    }

    let flags = Flags {
        allow_degenerate: t.boolean("flags.allow_degenerate")?,
        prey_only: t.boolean("flags.prey_only")?,
    };

    let x0 = parse_list("model.x0", t.required("model.x0")?)?;
    if x0.len() != 2 {
        return Err(ConfigError::schema("model.x0", "expected `x10, x20`"));
    }
    let model = ModelSpec {
        a: [t.function("model.a1")?, t.function("model.a2")?],
        b1: t.function("model.b1")?,
        c: [t.function("model.c1")?, t.function("model.c2")?],
        m: t.function("model.m")?,
        sigma: [t.function("model.sigma1")?, t.function("model.sigma2")?],
        channel1: parse_channel(&t, 1, "gamma", true)?,
        channel2: parse_channel(&t, 2, "delta", false)?,
        x0: [x0[0], x0[1]],
        prey_only: flags.prey_only,
    };

    let scheme = match t.get("sim.scheme") {
        None => Scheme::LogEuler,
        Some(s) => Scheme::from_name(s)
            .ok_or_else(|| ConfigError::schema("sim.scheme", format!("unknown scheme `{s}`")))?,
    };
    let sim = SimParams {
        horizon: t.number("sim.horizon", None)?,
        dt: t.number("sim.dt", None)?,
        seed: t.integer("sim.seed", 0u64)?,
        scheme,
    };
    sim.check().map_err(|e| ConfigError::schema("sim.dt", e.to_string()))?;

    let checkpoints = match t.get("ensemble.checkpoints") {
        Some(s) => parse_checkpoints("ensemble.checkpoints", s)?,
        None => parse_checkpoints("ensemble.checkpoints", &format!("linspace({:?}, {:?}, 10)", sim.horizon / 10.0, sim.horizon))?,
    };
    let ensemble = EnsembleSettings {
        num_paths: t.integer("ensemble.num_paths", 1000usize)?,
        checkpoints,
        tail_window: t.number("ensemble.tail_window", Some(0.5))?,
    };

    let tolerance_band = match t.get("analysis.tolerance_band") {
        None | Some("auto") => None,
        Some(v) => Some(parse_number("analysis.tolerance_band", v)?),
    };
    let occupancy = [
        parse_band("analysis.occupancy1", t.get("analysis.occupancy1").unwrap_or("pilot"))?,
        parse_band("analysis.occupancy2", t.get("analysis.occupancy2").unwrap_or("pilot"))?,
    ];
    let analysis = AnalysisSettings {
        horizon: t.number("analysis.horizon", Some(1000.0))?,
        tolerance_band,
        theta_list: t.numbers("analysis.theta", &[0.5])?,
        p_list: t.numbers("analysis.p", &[1.0, 2.0])?,
        epsilon: t.number("analysis.epsilon", Some(0.05))?,
        occupancy,
        chi: match t.get("analysis.chi") {
            None | Some("pilot") => None,
            Some(v) => Some(parse_number("analysis.chi", v)?),
        },
    };
    if !(analysis.horizon > 0.0) {
        return Err(ConfigError::schema("analysis.horizon", "must be > 0"));
    }
    if !(analysis.epsilon > 0.0 && analysis.epsilon < 1.0) {
        return Err(ConfigError::schema("analysis.epsilon", "must lie in (0, 1)"));
    }

    let mut csv = false;
    let mut json = false;
    for f in t.get("output.formats").unwrap_or("csv, json").split(',').map(str::trim) {
        match f {
            "csv" => csv = true,
            "json" => json = true,
            "" => {}
            other => return Err(ConfigError::schema("output.formats", format!("unknown format `{other}`"))),
        }
    }
    let output = OutputSettings {
        directory: PathBuf::from(t.get("output.directory").unwrap_or("out")),
        csv,
        json,
        max_saved_paths: t.integer("output.max_saved_paths", 10usize)?,
    };

    let config = ScenarioConfig {
        model,
        sim,
        ensemble,
        analysis,
        output,
        flags,
    };
    config
        .ensemble_params()
        .check()
        .map_err(|e| ConfigError::schema("ensemble", e.to_string()))?;
    Ok(config)
}

/// Reads, parses and validates a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_config_str(&text)
}

/// [`load_config`] on text already in memory.
pub fn load_config_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let config = parse_config(text)?;
    config.validated_model()?;
    Ok(config)
}

/// Scenario files shipped with the crate, one per long-time regime plus
/// reference cases.
pub mod presets {
    use super::{load_config_str, ConfigError, ScenarioConfig};

    pub const PRESETS: &[(&str, &str)] = &[
        ("extinction", include_str!("../presets/extinction.cfg")),
        ("knife_edge", include_str!("../presets/knife_edge.cfg")),
        ("predator_nonpersistence", include_str!("../presets/predator_nonpersistence.cfg")),
        ("predator_weak_persistence", include_str!("../presets/predator_weak_persistence.cfg")),
        ("prey_weak_persistence", include_str!("../presets/prey_weak_persistence.cfg")),
        ("predator_permanence", include_str!("../presets/predator_permanence.cfg")),
        ("prey_only_permanence", include_str!("../presets/prey_only_permanence.cfg")),
        ("ultimate_boundedness", include_str!("../presets/ultimate_boundedness.cfg")),
        ("deterministic", include_str!("../presets/deterministic.cfg")),
        ("diffusion_only", include_str!("../presets/diffusion_only.cfg")),
        ("logistic", include_str!("../presets/logistic.cfg")),
        ("linear", include_str!("../presets/linear.cfg")),
    ];

    pub fn names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|p| p.0)
    }

    pub fn text(name: &str) -> Option<&'static str> {
        PRESETS.iter().find(|p| p.0 == name).map(|p| p.1)
    }

    /// Parses and validates a shipped preset.
    pub fn load(name: &str) -> Result<ScenarioConfig, ConfigError> {
        let text = text(name).ok_or_else(|| ConfigError::Schema {
            field: "preset".into(),
            message: format!("no preset named `{name}`"),
        })?;
        load_config_str(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
schema_version = 1
model.a1 = 1
model.a2 = const(0.5)
model.b1 = 1
model.c1 = 0.5
model.c2 = 1
model.m = 1
model.sigma1 = sin(0.2, 0.1, 6.283185307179586, 0)
model.sigma2 = pwl(0:0.1, 10:0.2)
model.x0 = 0.5, 0.5
model.channel1.atoms = 0:1.0, 1:0.5
model.channel1.gamma1 = 0.1; const(-0.2)
model.channel1.gamma2 = 0.1; 0
sim.horizon = 10
sim.dt = 0.01
";

    #[test]
    fn parses_with_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.model.channel1.measure().len(), 2);
        assert!(c.model.channel2.measure().is_empty());
        assert_eq!(c.sim.scheme, Scheme::LogEuler);
        assert_eq!(c.ensemble.num_paths, 1000);
        assert_eq!(c.ensemble.checkpoints.len(), 10);
        assert_eq!(*c.ensemble.checkpoints.last().unwrap(), 10.0);
        assert_eq!(c.analysis.tolerance_band, None);
        assert!(c.output.csv && c.output.json);
        assert_eq!(c.output.max_saved_paths, 10);
    }

    #[test]
    fn round_trip() {
        let c = parse_config(MINIMAL).unwrap();
        let again = parse_config(&c.emit()).unwrap();
        assert_eq!(c, again);
        assert_eq!(c.emit(), again.emit());
    }

    #[test]
    fn missing_b1_is_named() {
        let text = MINIMAL.replace("model.b1 = 1\n", "");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.field(), Some("model.b1"));
    }

    #[test]
    fn zero_protection_is_an_admissibility_error() {
        let text = MINIMAL.replace("model.m = 1", "model.m = const(0)");
        match load_config_str(&text) {
            Err(ConfigError::Admissibility(report)) => assert!(report.to_string().contains("m_inf > 0")),
            other => panic!("{other:?}"),
        }
        let text = text + "flags.allow_degenerate = true\n";
        assert!(load_config_str(&text).is_ok());
    }

    #[test]
    fn schema_errors() {
        let cases = [
            ("model.a1 = 1", "model.a1 = sin(1, 2)", "model.a1"),
            ("model.channel1.gamma2 = 0.1; 0\n", "", "model.channel1.gamma2"),
            ("model.channel1.gamma1 = 0.1; const(-0.2)", "model.channel1.gamma1 = 0.1", "model.channel1.gamma1"),
            ("sim.dt = 0.01", "sim.dt = 0.5", "sim.dt"),
            ("schema_version = 1", "schema_version = 2", "schema_version"),
            ("sim.horizon = 10", "sim.horizon = 10\nsim.horizon = 11", "sim.horizon"),
            ("sim.horizon = 10", "sim.horizon = 10\nsim.colour = red", "sim.colour"),
            ("model.x0 = 0.5, 0.5", "model.x0 = 0.5", "model.x0"),
            ("model.sigma2 = pwl(0:0.1, 10:0.2)", "model.sigma2 = pwl(10:0.1, 0:0.2)", "model.sigma2"),
        ];
        for (from, to, field) in cases {
            let err = parse_config(&MINIMAL.replace(from, to)).unwrap_err();
            assert_eq!(err.field(), Some(field), "{to}: {err}");
        }
    }

    #[test]
    fn linspace_checkpoints() {
        let v = parse_checkpoints("k", "linspace(5, 50, 10)").unwrap();
        assert_eq!(v.len(), 10);
        assert_eq!(v[0], 5.0);
        assert_eq!(v[9], 50.0);
        assert_eq!(v[1], 10.0);
    }

    #[test]
    fn unreadable_file() {
        let err = load_config(Path::new("/nonexistent/scenario.cfg")).unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));
    }
}
