//! The `analyze`, `simulate` and `verify` workflows behind the command-line tool.
//!
//! Machine-readable results go to files under the configured output directory;
//! each workflow also returns a short human-readable summary.
//!
//! Exit codes: 0 on success or agreement, 1 on a disagreement between
//! prediction and simulation or when more than 1% of paths abort, 2 on invalid
//! input.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ScenarioConfig};
use crate::ensemble::{
    self, Band, EnsembleError, EnsembleSummary, PersistenceVerdict, PilotBounds, MAX_FAILURE_FRACTION,
};
use crate::model::Species;
use crate::regime::{self, Regime, RegimeError, RegimeReport};
use crate::sim;

pub const VERIFY_SCHEMA_VERSION: u32 = 1;
/// Required share of extinct paths when extinction is predicted.
pub const EXTINCTION_FRACTION: f64 = 0.99;
/// Largest tolerated `P{|X(T)| > χ}`.
pub const BOUNDEDNESS_LEVEL: f64 = 0.05;

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Regime(#[from] RegimeError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl WorkflowError {
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkflowError::Io { .. } => 1,
            _ => 2,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), WorkflowError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| WorkflowError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| WorkflowError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports are always serializable") + "\n"
}

/// Classifies the configured model and writes `regime_report.json`.
pub fn cmd_analyze(config: &ScenarioConfig) -> Result<RegimeReport, WorkflowError> {
    let model = config.validated_model()?;
    let report = regime::classify(&model, &config.analysis_params(model.is_degenerate()))?;
    write_file(&config.output.directory.join("regime_report.json"), &to_json(&report))?;
    Ok(report)
}

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub summary: EnsembleSummary,
    pub saved_paths: Vec<PathBuf>,
}

impl SimulateOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.summary.too_many_failures() {
            1
        } else {
            0
        }
    }
}

fn simulate_with(
    config: &ScenarioConfig,
    params: &ensemble::EnsembleParams,
    spec: &crate::model::ModelSpec,
) -> Result<SimulateOutcome, WorkflowError> {
    let dir = &config.output.directory;
    let summary = ensemble::run_ensemble(spec, params)?;
    if config.output.json {
        write_file(&dir.join("ensemble_summary.json"), &summary.to_json())?;
    }
    let mut saved_paths = Vec::new();
    if config.output.csv {
        write_file(&dir.join("ensemble_summary.csv"), &summary.to_csv())?;
        let n = config.output.max_saved_paths.min(params.num_paths);
        for k in 0..n as u64 {
            // aborted paths are already counted in the summary
            if let Ok(path) = sim::simulate_path(spec, &params.sim, k) {
                let file = dir.join("paths").join(format!("path_{k:05}.csv"));
                write_file(&file, &path.to_csv())?;
                saved_paths.push(file);
            }
        }
    }
    Ok(SimulateOutcome { summary, saved_paths })
}

/// Runs the configured ensemble and writes `ensemble_summary.{json,csv}` and
/// up to `max_saved_paths` path files.
pub fn cmd_simulate(config: &ScenarioConfig) -> Result<SimulateOutcome, WorkflowError> {
    let model = config.validated_model()?;
    simulate_with(config, &config.ensemble_params(), &model)
}

/// One empirical test of a predicted label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub threshold: f64,
    /// `observed - threshold`, oriented so that positive means the check holds.
    pub margin: f64,
    pub passed: bool,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeciesVerdict {
    pub species: u8,
    pub name: String,
    pub predicted: Regime,
    pub also_implies: Vec<Regime>,
    pub checks: Vec<Check>,
    pub agreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub schema_version: u32,
    pub seed: u64,
    pub pilot: PilotBounds,
    pub bands: [Option<Band>; 2],
    pub chi: f64,
    pub species: Vec<SpeciesVerdict>,
    pub boundedness: Option<Check>,
    pub failure_fraction: f64,
    pub agreement: bool,
}

impl VerifyOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.agreement {
            0
        } else {
            1
        }
    }

    pub fn species(&self, species: Species) -> Option<&SpeciesVerdict> {
        self.species.iter().find(|s| s.species == species.number())
    }

    pub fn warnings(&self) -> impl Iterator<Item = &str> {
        self.species
            .iter()
            .flat_map(|s| s.checks.iter())
            .chain(self.boundedness.iter())
            .filter_map(|c| c.warning.as_deref())
    }
}

fn check(name: &str, observed: f64, threshold: f64, margin: f64) -> Check {
    Check {
        name: name.to_string(),
        observed,
        threshold,
        margin,
        passed: margin >= 0.0,
        warning: None,
    }
}

fn checks_for(
    label: Regime,
    species: Species,
    summary: &EnsembleSummary,
    band: Option<Band>,
    epsilon: f64,
) -> Result<Vec<Check>, WorkflowError> {
    let mut out = Vec::new();
    match label {
        Regime::Extinct => {
            let frac = summary.last().of(species).map_or(0.0, |s| s.extinction_fraction);
            out.push(check("extinction_fraction", frac, EXTINCTION_FRACTION, frac - EXTINCTION_FRACTION));
        }
        Regime::StochasticallyPermanent => {
            if let Some(b) = band {
                let r = ensemble::permanence_check(summary, species, epsilon, b.h, b.upper);
                let m = r.upper_margin.min(r.lower_margin);
                let mut c = check("permanence_occupancy", m + 1.0 - epsilon, 1.0 - epsilon, m);
                c.passed = r.passed;
                out.push(c);
            }
        }
        Regime::WeaklyPersistentInMean => {
            let r = ensemble::persistence_in_mean(summary, species)?;
            let lowest = r.trend.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let mut c = check(
                "weak_persistence_in_mean",
                lowest,
                r.thresholds.weakly_persistent,
                lowest - r.thresholds.weakly_persistent,
            );
            c.passed = r.verdict == PersistenceVerdict::WeaklyPersistent;
            out.push(c);
        }
        Regime::NonPersistentInMean => {
            let r = ensemble::persistence_in_mean(summary, species)?;
            let mut c = check(
                "non_persistence_in_mean",
                r.time_avg_estimate,
                r.thresholds.non_persistent,
                r.thresholds.non_persistent - r.time_avg_estimate,
            );
            match r.verdict {
                PersistenceVerdict::NonPersistent => c.passed = true,
                PersistenceVerdict::Inconclusive => {
                    c.passed = true;
                    c.warning = Some(format!(
                        "species {}: knife-edge prediction, empirical trend inconclusive (slope {:e})",
                        species.number(),
                        r.slope
                    ));
                }
                PersistenceVerdict::WeaklyPersistent => c.passed = false,
            }
            out.push(c);
        }
        Regime::Indeterminate => {}
    }
    Ok(out)
}

/// Runs analysis and simulation and checks every prediction against the
/// ensemble; writes everything `analyze` and `simulate` write plus `verify.json`.
pub fn cmd_verify(config: &ScenarioConfig) -> Result<VerifyOutcome, WorkflowError> {
    let model = config.validated_model()?;
    let report = cmd_analyze(config)?;

    let mut params = config.ensemble_params();
    let pilot = ensemble::pilot_bounds(&model, &params)?;
    for i in 0..2 {
        params.occupancy[i] = params.occupancy[i].or(pilot.bands[i]);
    }
    let chi = params.chi.unwrap_or(pilot.chi);
    params.chi = Some(chi);
    let summary = simulate_with(config, &params, &model)?.summary;

    let mut species = Vec::new();
    for &s in model.active_species() {
        let r = report.species(s);
        let mut checks = Vec::new();
        for label in r.labels() {
            checks.extend(checks_for(
                label,
                s,
                &summary,
                params.occupancy[s.index()],
                config.analysis.epsilon,
            )?);
        }
        species.push(SpeciesVerdict {
            species: s.number(),
            name: s.to_string(),
            predicted: r.classification,
            also_implies: r.also_implies.clone(),
            agreement: checks.iter().all(|c| c.passed),
            checks,
        });
    }

    let boundedness = report.ultimately_bounded.then(|| {
        let p = summary.last().norm_exceedance.map_or(f64::NAN, |n| n.mean);
        check("prob_norm_above_chi", p, BOUNDEDNESS_LEVEL, BOUNDEDNESS_LEVEL - p)
    });
    let boundedness = boundedness.map(|mut c| {
        // strict inequality
        c.passed = c.margin > 0.0;
        c
    });

    let agreement = species.iter().all(|s| s.agreement)
        && boundedness.as_ref().is_none_or(|c| c.passed)
        && summary.failure_fraction <= MAX_FAILURE_FRACTION;
    let outcome = VerifyOutcome {
        schema_version: VERIFY_SCHEMA_VERSION,
        seed: config.sim.seed,
        pilot,
        bands: params.occupancy,
        chi,
        species,
        boundedness,
        failure_fraction: summary.failure_fraction,
        agreement,
    };
    write_file(&config.output.directory.join("verify.json"), &to_json(&outcome))?;
    Ok(outcome)
}

pub fn describe_report(report: &RegimeReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tolerance band {:e}, averaging horizon {}", report.tolerance_band, report.horizon);
    for s in &report.species {
        let _ = write!(
            out,
            "{:<9} p_inf {:+.6} p_bar {:+.6}  {:?}",
            s.name, s.p_inf.value, s.p_bar_star, s.classification
        );
        if !s.also_implies.is_empty() {
            let _ = write!(out, " (also {:?})", s.also_implies);
        }
        out.push('\n');
        for n in &s.notes {
            let _ = writeln!(out, "          note: {n}");
        }
    }
    let _ = writeln!(
        out,
        "ultimately bounded: {}",
        if report.ultimately_bounded { "yes" } else { "no claim" }
    );
    out
}

pub fn describe_summary(summary: &EnsembleSummary) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} paths, {} completed, {} aborted ({:.2}%)",
        summary.num_paths,
        summary.completed,
        summary.failures,
        100.0 * summary.failure_fraction
    );
    let last = summary.last();
    for s in &last.species {
        let m = s.moments.first().map_or(f64::NAN, |m| m.mean);
        let _ = writeln!(
            out,
            "species {} at t = {}: E[x] {:.6} time-average {:.6} ln x/t {:+.6} extinct {:.3}",
            s.species, last.t, m, s.time_average.mean, s.log_rate.mean, s.extinction_fraction
        );
    }
    if summary.too_many_failures() {
        let _ = writeln!(out, "too many aborted paths");
    }
    out
}

pub fn describe_verify(outcome: &VerifyOutcome) -> String {
    let mut out = String::new();
    for s in &outcome.species {
        let _ = writeln!(
            out,
            "{:<9} predicted {:?}: {}",
            s.name,
            s.predicted,
            if s.agreement { "agrees" } else { "DISAGREES" }
        );
        for c in &s.checks {
            let _ = writeln!(
                out,
                "          {} observed {:.6} threshold {:.6} margin {:+.6}",
                c.name, c.observed, c.threshold, c.margin
            );
        }
    }
    if let Some(c) = &outcome.boundedness {
        let _ = writeln!(out, "boundedness: P{{|X| > {:.4}}} = {:.4}", outcome.chi, c.observed);
    }
    for w in outcome.warnings() {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "{}", if outcome.agreement { "agreement" } else { "disagreement" });
    out
}
