//! Monte Carlo ensembles and the estimators behind the long-time regimes.
//!
//! Paths run in parallel on independent streams; every statistic is reduced
//! in path-index order, so a summary depends only on the spec and parameters,
//! never on the thread count.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{ModelSpec, Species};
use crate::sim::{self, JumpEvent, PathObserver, SimError, SimParams};

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;
/// Density below which a population counts as extinct.
pub const EXTINCTION_THRESHOLD: f64 = 1e-3;
/// Largest tolerated fraction of aborted paths.
pub const MAX_FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnsembleError {
    #[error("invalid ensemble parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("the tail window holds {0} checkpoints, at least 3 are needed")]
    TooFewTailCheckpoints(usize),
    #[error("no checkpoint at t = {0}")]
    NoCheckpoint(f64),
}

/// Occupancy band `[h, H]` for one species.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    pub h: f64,
    #[serde(rename = "H")]
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleParams {
    pub num_paths: usize,
    pub sim: SimParams,
    /// Sorted observation times in `(0, T]`.
    pub checkpoints: Vec<f64>,
    /// Fraction of `[0, T]`, counted back from `T`, that stands in for `t → ∞`.
    pub tail_window: f64,
    /// Exponents `p` for `E[x^p]`.
    pub p_list: Vec<f64>,
    /// Exponents `θ ∈ (0, 1)` for `E[x^{-θ}]`.
    pub theta_list: Vec<f64>,
    pub occupancy: [Option<Band>; 2],
    /// Radius for `P{|X| > χ}`.
    pub chi: Option<f64>,
    pub extinction_threshold: f64,
}

impl EnsembleParams {
    /// `num_paths` paths observed at `n` evenly spaced checkpoints up to `T`.
    pub fn new(num_paths: usize, sim: SimParams, n: usize) -> EnsembleParams {
        let n = n.max(1);
        EnsembleParams {
            num_paths,
            sim,
            checkpoints: (1..=n).map(|k| sim.horizon * k as f64 / n as f64).collect(),
            tail_window: 0.5,
            p_list: vec![1.0, 2.0],
            theta_list: vec![0.5],
            occupancy: [None, None],
            chi: None,
            extinction_threshold: EXTINCTION_THRESHOLD,
        }
    }

    pub fn check(&self) -> Result<(), EnsembleError> {
        self.sim.check()?;
        let bad = |m: String| Err(EnsembleError::InvalidParams(m));
        if self.num_paths == 0 {
            return bad("num_paths must be >= 1".into());
        }
        if self.checkpoints.is_empty() {
            return bad("at least one checkpoint is required".into());
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return bad("checkpoints must be strictly increasing".into());
        }
        let last = *self.checkpoints.last().unwrap();
        if !(self.checkpoints[0] > 0.0 && last <= self.sim.horizon * (1.0 + 1e-12)) {
            return bad(format!(
                "checkpoints must lie in (0, {}], got [{}, {}]",
                self.sim.horizon, self.checkpoints[0], last
            ));
        }
        if !(self.tail_window > 0.0 && self.tail_window <= 1.0) {
            return bad(format!("tail_window must lie in (0, 1], got {}", self.tail_window));
        }
        if let Some(t) = self.theta_list.iter().find(|&&t| !(t > 0.0 && t < 1.0)) {
            return bad(format!("theta must lie in (0, 1), got {t}"));
        }
        for band in self.occupancy.iter().flatten() {
            if !(band.h < band.upper) {
                return bad(format!("need h < H, got h = {}, H = {}", band.h, band.upper));
            }
        }
        if !(self.extinction_threshold > 0.0) {
            return bad("extinction threshold must be > 0".into());
        }
        Ok(())
    }

    /// Same ensemble on `[0, 2T]` with every checkpoint doubled.
    pub fn doubled(&self) -> EnsembleParams {
        EnsembleParams {
            sim: SimParams {
                horizon: 2.0 * self.sim.horizon,
                ..self.sim
            },
            checkpoints: self.checkpoints.iter().map(|t| 2.0 * t).collect(),
            ..self.clone()
        }
    }

    fn tail_start(&self) -> f64 {
        (1.0 - self.tail_window) * self.sim.horizon
    }
}

/// State of one path at one checkpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snapshot {
    pub x: [f64; 2],
    /// `(1/t) ∫_0^t x_i ds`.
    pub time_average: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamEstimate {
    pub param: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
    pub q99: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupancy {
    pub band: Band,
    /// `P{x <= H}`.
    pub below_upper: Estimate,
    /// `P{x >= h}`.
    pub above_lower: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeciesStats {
    pub species: u8,
    pub moments: Vec<ParamEstimate>,
    pub inverse_moments: Vec<ParamEstimate>,
    pub time_average: Estimate,
    pub time_average_median: f64,
    /// `ln x(t) / t`.
    pub log_rate: Estimate,
    pub log_rate_quantiles: Quantiles,
    pub occupancy: Option<Occupancy>,
    pub extinction_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckpointStats {
    pub t: f64,
    pub species: Vec<SpeciesStats>,
    /// `P{|X(t)| > χ}`.
    pub norm_exceedance: Option<ParamEstimate>,
}

impl CheckpointStats {
    pub fn of(&self, species: Species) -> Option<&SpeciesStats> {
        self.species.iter().find(|s| s.species == species.number())
    }
}

/// Supremum of a moment curve over the tail window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSup {
    pub species: u8,
    /// `moment` or `inverse_moment`.
    pub stat: &'static str,
    pub param: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub schema_version: u32,
    pub num_paths: usize,
    pub completed: usize,
    pub failures: usize,
    pub failure_fraction: f64,
    /// First few abort messages, by path index.
    pub failure_examples: Vec<String>,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    pub scheme: &'static str,
    pub tail_window: f64,
    pub extinction_threshold: f64,
    pub prey_only: bool,
    /// Smallest density of each active species seen at any stop of any completed path.
    pub min_density: Vec<f64>,
    pub checkpoints: Vec<CheckpointStats>,
    pub tail_suprema: Vec<TailSup>,
    #[serde(skip)]
    pub params: EnsembleParams,
    /// Per completed path, one snapshot per checkpoint.
    #[serde(skip)]
    pub snapshots: Vec<Vec<Snapshot>>,
}

struct Tracker<'a> {
    checkpoints: &'a [f64],
    tol: f64,
    next: usize,
    last_t: f64,
    last_x: [f64; 2],
    integral: [f64; 2],
    min: [f64; 2],
    snaps: Vec<Snapshot>,
}

impl PathObserver for Tracker<'_> {
    fn start(&mut self, x0: [f64; 2]) {
        self.last_x = x0;
        self.min = x0;
    }

    fn stop(&mut self, t: f64, pre: [f64; 2], post: [f64; 2], _event: Option<&JumpEvent>) {
        let h = t - self.last_t;
        for i in 0..2 {
            self.integral[i] += 0.5 * h * (self.last_x[i] + pre[i]);
            self.min[i] = self.min[i].min(pre[i]).min(post[i]);
        }
        while self.next < self.checkpoints.len() && t >= self.checkpoints[self.next] - self.tol {
            self.snaps.push(Snapshot {
                x: post,
                time_average: [self.integral[0] / t, self.integral[1] / t],
            });
            self.next += 1;
        }
        self.last_t = t;
        self.last_x = post;
    }
}

struct PathOutcome {
    snaps: Vec<Snapshot>,
    min: [f64; 2],
}

fn run_path(spec: &ModelSpec, params: &EnsembleParams, index: u64) -> Result<PathOutcome, SimError> {
    let mut rng = sim::rng_stream_for_path(params.sim.seed, index);
    let mut tracker = Tracker {
        checkpoints: &params.checkpoints,
        tol: 1e-9 * params.sim.dt,
        next: 0,
        last_t: 0.0,
        last_x: [0.0; 2],
        integral: [0.0; 2],
        min: [f64::INFINITY; 2],
        snaps: Vec::with_capacity(params.checkpoints.len()),
    };
    sim::integrate(spec, &params.sim, &params.checkpoints, &mut rng, &mut tracker)?;
    debug_assert_eq!(tracker.snaps.len(), params.checkpoints.len());
    Ok(PathOutcome {
        snaps: tracker.snaps,
        min: tracker.min,
    })
}

fn estimate(values: impl Iterator<Item = f64>) -> Estimate {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    if v.is_empty() {
        return Estimate {
            mean: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let mean = v.iter().sum::<f64>() / n;
    let stderr = if v.len() > 1 {
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    Estimate { mean, stderr }
}

fn proportion(values: impl Iterator<Item = bool>) -> Estimate {
    estimate(values.map(|b| if b { 1.0 } else { 0.0 }))
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn species_stats(
    params: &EnsembleParams,
    snaps: &[Vec<Snapshot>],
    k: usize,
    t: f64,
    species: Species,
) -> SpeciesStats {
    let i = species.index();
    let xs = || snaps.iter().map(move |s| s[k].x[i]);
    let moments = params
        .p_list
        .iter()
        .map(|&p| {
            let e = estimate(xs().map(|x| x.powf(p)));
            ParamEstimate {
                param: p,
                mean: e.mean,
                stderr: e.stderr,
            }
        })
        .collect();
    let inverse_moments = params
        .theta_list
        .iter()
        .map(|&th| {
            let e = estimate(xs().map(|x| x.powf(-th)));
            ParamEstimate {
                param: th,
                mean: e.mean,
                stderr: e.stderr,
            }
        })
        .collect();
    let averages: Vec<f64> = snaps.iter().map(|s| s[k].time_average[i]).collect();
    let time_average = estimate(averages.iter().copied());
    let time_average_median = quantile_sorted(&sorted(averages), 0.5);
    let rates: Vec<f64> = xs().map(|x| x.ln() / t).collect();
    let log_rate = estimate(rates.iter().copied());
    let rates = sorted(rates);
    let occupancy = params.occupancy[i].map(|band| Occupancy {
        band,
        below_upper: proportion(xs().map(|x| x <= band.upper)),
        above_lower: proportion(xs().map(|x| x >= band.h)),
    });
    SpeciesStats {
        species: species.number(),
        moments,
        inverse_moments,
        time_average,
        time_average_median,
        log_rate,
        log_rate_quantiles: Quantiles {
            q05: quantile_sorted(&rates, 0.05),
            q50: quantile_sorted(&rates, 0.5),
            q95: quantile_sorted(&rates, 0.95),
            q99: quantile_sorted(&rates, 0.99),
        },
        occupancy,
        extinction_fraction: proportion(xs().map(|x| x < params.extinction_threshold)).mean,
    }
}

fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// Simulates `params.num_paths` paths and aggregates them.
///
/// Aborted paths are excluded from every statistic and counted in
/// `failures`; callers decide what failure fraction is acceptable.
pub fn run_ensemble(spec: &ModelSpec, params: &EnsembleParams) -> Result<EnsembleSummary, EnsembleError> {
    params.check()?;
    let outcomes: Vec<Result<PathOutcome, SimError>> = (0..params.num_paths as u64)
        .into_par_iter()
        .map(|k| run_path(spec, params, k))
        .collect();

    let active = spec.active_species();
    let mut snapshots = Vec::with_capacity(outcomes.len());
    let mut min_density = vec![f64::INFINITY; active.len()];
    let mut failures = 0;
    let mut failure_examples = Vec::new();
    for (k, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok(o) => {
                for (m, s) in min_density.iter_mut().zip(active) {
                    *m = m.min(o.min[s.index()]);
                }
                snapshots.push(o.snaps);
            }
            Err(e) => {
                failures += 1;
                if failure_examples.len() < 5 {
                    failure_examples.push(format!("path {k}: {e}"));
                }
            }
        }
    }

    let checkpoints: Vec<CheckpointStats> = params
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &t)| CheckpointStats {
            t,
            species: active
                .iter()
                .map(|&s| species_stats(params, &snapshots, k, t, s))
                .collect(),
            norm_exceedance: params.chi.map(|chi| {
                let e = proportion(snapshots.iter().map(|s| norm(s[k].x) > chi));
                ParamEstimate {
                    param: chi,
                    mean: e.mean,
                    stderr: e.stderr,
                }
            }),
        })
        .collect();

    let tail_start = params.tail_start();
    let tail: Vec<&CheckpointStats> = checkpoints
        .iter()
        .filter(|c| c.t >= tail_start - 1e-9 * params.sim.dt)
        .collect();
    let mut tail_suprema = Vec::new();
    for s in active {
        let sup = |pick: &dyn Fn(&SpeciesStats) -> f64| {
            tail.iter()
                .filter_map(|c| c.of(*s))
                .map(pick)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        for (j, &p) in params.p_list.iter().enumerate() {
            tail_suprema.push(TailSup {
                species: s.number(),
                stat: "moment",
                param: p,
                value: sup(&|st| st.moments[j].mean),
            });
        }
        for (j, &th) in params.theta_list.iter().enumerate() {
            tail_suprema.push(TailSup {
                species: s.number(),
                stat: "inverse_moment",
                param: th,
                value: sup(&|st| st.inverse_moments[j].mean),
            });
        }
    }

    Ok(EnsembleSummary {
        schema_version: SUMMARY_SCHEMA_VERSION,
        num_paths: params.num_paths,
        completed: snapshots.len(),
        failures,
        failure_fraction: failures as f64 / params.num_paths as f64,
        failure_examples,
        horizon: params.sim.horizon,
        dt: params.sim.dt,
        seed: params.sim.seed,
        scheme: params.sim.scheme.name(),
        tail_window: params.tail_window,
        extinction_threshold: params.extinction_threshold,
        prey_only: spec.prey_only,
        min_density,
        checkpoints,
        tail_suprema,
        params: params.clone(),
        snapshots,
    })
}

impl EnsembleSummary {
    pub fn too_many_failures(&self) -> bool {
        self.failure_fraction > MAX_FAILURE_FRACTION
    }

    pub fn checkpoint(&self, t: f64) -> Option<&CheckpointStats> {
        let tol = 1e-9 * self.dt.max(t.abs());
        self.checkpoints.iter().find(|c| (c.t - t).abs() <= tol)
    }

    pub fn last(&self) -> &CheckpointStats {
        self.checkpoints.last().expect("checkpoints are never empty")
    }

    /// Indices of the checkpoints inside the tail window.
    pub fn tail_indices(&self) -> Vec<usize> {
        let start = self.params.tail_start() - 1e-9 * self.dt;
        (0..self.checkpoints.len())
            .filter(|&k| self.checkpoints[k].t >= start)
            .collect()
    }

    pub fn tail_sup(&self, species: Species, stat: &str, param: f64) -> Option<f64> {
        self.tail_suprema
            .iter()
            .find(|s| s.species == species.number() && s.stat == stat && s.param == param)
            .map(|s| s.value)
    }

    /// Final densities of the completed paths.
    pub fn final_values(&self, species: Species) -> Vec<f64> {
        let k = self.checkpoints.len() - 1;
        self.snapshots.iter().map(|s| s[k].x[species.index()]).collect()
    }

    /// Plot-ready CSV: `t,species,stat,param,value,stderr`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,species,stat,param,value,stderr\n");
        let mut row = |t: f64, sp: &str, stat: &str, param: Option<f64>, value: f64, se: Option<f64>| {
            let param = param.map_or(String::new(), |p| format!("{p:?}"));
            let se = se.map_or(String::new(), |s| format!("{s:.16e}"));
            let _ = writeln!(out, "{t:?},{sp},{stat},{param},{value:.16e},{se}");
        };
        for c in &self.checkpoints {
            for s in &c.species {
                let sp = s.species.to_string();
                for m in &s.moments {
                    row(c.t, &sp, "moment", Some(m.param), m.mean, Some(m.stderr));
                }
                for m in &s.inverse_moments {
                    row(c.t, &sp, "inverse_moment", Some(m.param), m.mean, Some(m.stderr));
                }
                row(c.t, &sp, "time_average_mean", None, s.time_average.mean, Some(s.time_average.stderr));
                row(c.t, &sp, "time_average_median", None, s.time_average_median, None);
                row(c.t, &sp, "log_rate_mean", None, s.log_rate.mean, Some(s.log_rate.stderr));
                let q = s.log_rate_quantiles;
                for (p, v) in [(0.05, q.q05), (0.5, q.q50), (0.95, q.q95), (0.99, q.q99)] {
                    row(c.t, &sp, "log_rate_quantile", Some(p), v, None);
                }
                if let Some(o) = s.occupancy {
                    row(c.t, &sp, "prob_below_H", Some(o.band.upper), o.below_upper.mean, Some(o.below_upper.stderr));
                    row(c.t, &sp, "prob_above_h", Some(o.band.h), o.above_lower.mean, Some(o.above_lower.stderr));
                }
                row(c.t, &sp, "extinction_fraction", Some(self.extinction_threshold), s.extinction_fraction, None);
            }
            if let Some(n) = c.norm_exceedance {
                row(c.t, "all", "prob_norm_above_chi", Some(n.param), n.mean, Some(n.stderr));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary is always serializable") + "\n"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGrowthRate {
    pub t: f64,
    pub mean: f64,
    pub stderr: f64,
    pub p95: f64,
}

/// Ensemble mean and 95th percentile of `ln x(t) / t`.
pub fn log_growth_rate(summary: &EnsembleSummary, species: Species, t: f64) -> Result<LogGrowthRate, EnsembleError> {
    let s = summary
        .checkpoint(t)
        .and_then(|c| c.of(species))
        .ok_or(EnsembleError::NoCheckpoint(t))?;
    Ok(LogGrowthRate {
        t,
        mean: s.log_rate.mean,
        stderr: s.log_rate.stderr,
        p95: s.log_rate_quantiles.q95,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PermanenceCheck {
    pub passed: bool,
    pub epsilon: f64,
    pub band: Band,
    /// Smallest `P{x <= H} - (1 - ε)` over the tail window.
    pub upper_margin: f64,
    /// Smallest `P{x >= h} - (1 - ε)` over the tail window.
    pub lower_margin: f64,
    /// `(t, P{x <= H}, P{x >= h})` per tail checkpoint.
    pub per_checkpoint: Vec<(f64, f64, f64)>,
}

/// Passes when every tail checkpoint has `P{x <= H} >= 1 - ε` and `P{x >= h} >= 1 - ε`.
pub fn permanence_check(summary: &EnsembleSummary, species: Species, epsilon: f64, h: f64, upper: f64) -> PermanenceCheck {
    let i = species.index();
    let per_checkpoint: Vec<(f64, f64, f64)> = summary
        .tail_indices()
        .into_iter()
        .map(|k| {
            let xs = || summary.snapshots.iter().map(move |s| s[k].x[i]);
            (
                summary.checkpoints[k].t,
                proportion(xs().map(|x| x <= upper)).mean,
                proportion(xs().map(|x| x >= h)).mean,
            )
        })
        .collect();
    let need = 1.0 - epsilon;
    let upper_margin = per_checkpoint.iter().map(|c| c.1 - need).fold(f64::INFINITY, f64::min);
    let lower_margin = per_checkpoint.iter().map(|c| c.2 - need).fold(f64::INFINITY, f64::min);
    PermanenceCheck {
        passed: !per_checkpoint.is_empty() && upper_margin >= 0.0 && lower_margin >= 0.0,
        epsilon,
        band: Band { h, upper },
        upper_margin,
        lower_margin,
        per_checkpoint,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PersistenceVerdict {
    NonPersistent,
    WeaklyPersistent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PersistenceThresholds {
    /// Time-averages below this count as vanishing.
    pub non_persistent: f64,
    /// Time-averages above this count as bounded away from zero.
    pub weakly_persistent: f64,
}

impl Default for PersistenceThresholds {
    fn default() -> Self {
        PersistenceThresholds {
            non_persistent: 1e-3,
            weakly_persistent: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceResult {
    /// Mean of `(1/t) ∫_0^t x` at the last checkpoint.
    pub time_avg_estimate: f64,
    /// `(t, mean time-average)` over the tail window.
    pub trend: Vec<(f64, f64)>,
    /// Least-squares slope of the trend.
    pub slope: f64,
    /// Share of paths whose own time-average at `T` is below / above the thresholds.
    pub path_fraction_below: f64,
    pub path_fraction_above: f64,
    pub thresholds: PersistenceThresholds,
    pub verdict: PersistenceVerdict,
}

pub fn persistence_in_mean(summary: &EnsembleSummary, species: Species) -> Result<PersistenceResult, EnsembleError> {
    persistence_in_mean_with(summary, species, PersistenceThresholds::default())
}

/// NonPersistent when the tail trend decreases and ends below the lower
/// threshold; WeaklyPersistent when it never drops below the upper one.
pub fn persistence_in_mean_with(
    summary: &EnsembleSummary,
    species: Species,
    thresholds: PersistenceThresholds,
) -> Result<PersistenceResult, EnsembleError> {
    let tail = summary.tail_indices();
    if tail.len() < 3 {
        return Err(EnsembleError::TooFewTailCheckpoints(tail.len()));
    }
    let trend: Vec<(f64, f64)> = tail
        .iter()
        .map(|&k| {
            let c = &summary.checkpoints[k];
            let mean = c.of(species).map_or(0.0, |s| s.time_average.mean);
            (c.t, mean)
        })
        .collect();
    let n = trend.len() as f64;
    let tbar = trend.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = trend.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = trend.iter().map(|p| (p.0 - tbar) * (p.1 - ybar)).sum();
    let sxx: f64 = trend.iter().map(|p| (p.0 - tbar) * (p.0 - tbar)).sum();
    let slope = sxy / sxx;
    let last = trend.last().unwrap().1;
    let lowest = trend.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);

    let k = summary.checkpoints.len() - 1;
    let i = species.index();
    let own = || summary.snapshots.iter().map(|s| s[k].time_average[i]);
    let path_fraction_below = proportion(own().map(|a| a < thresholds.non_persistent)).mean;
    let path_fraction_above = proportion(own().map(|a| a >= thresholds.weakly_persistent)).mean;

    let verdict = if last < thresholds.non_persistent && slope < 0.0 {
        PersistenceVerdict::NonPersistent
    } else if lowest >= thresholds.weakly_persistent {
        PersistenceVerdict::WeaklyPersistent
    } else {
        PersistenceVerdict::Inconclusive
    };
    Ok(PersistenceResult {
        time_avg_estimate: last,
        trend,
        slope,
        path_fraction_below,
        path_fraction_above,
        thresholds,
        verdict,
    })
}

/// Occupancy bands and norm radius estimated from a pilot ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PilotBounds {
    /// Per species: 1st and 99th percentiles of `x`.
    pub bands: [Option<Band>; 2],
    /// 99th percentile of `|X|`.
    pub chi: f64,
    pub horizon: f64,
    pub seed: u64,
}

/// Seed of the pilot ensemble belonging to `master_seed`.
pub fn pilot_seed(master_seed: u64) -> u64 {
    master_seed ^ 0x9E37_79B9_7F4A_7C15
}

/// Runs `params` on `[0, T/2]` under [`pilot_seed`] and pools the tail-window
/// checkpoints into percentiles.
pub fn pilot_bounds(spec: &ModelSpec, params: &EnsembleParams) -> Result<PilotBounds, EnsembleError> {
    let horizon = 0.5 * params.sim.horizon;
    let mut pilot = params.clone();
    pilot.sim.horizon = horizon;
    pilot.sim.dt = params.sim.dt.min(horizon);
    pilot.sim.seed = pilot_seed(params.sim.seed);
    pilot.checkpoints = params.checkpoints.iter().map(|t| 0.5 * t).collect();
    pilot.occupancy = [None, None];
    pilot.chi = None;
    let summary = run_ensemble(spec, &pilot)?;
    let tail = summary.tail_indices();
    let pooled = |f: &dyn Fn(&Snapshot) -> f64| {
        sorted(
            summary
                .snapshots
                .iter()
                .flat_map(|s| tail.iter().map(move |&k| f(&s[k])))
                .collect(),
        )
    };
    let mut bands = [None, None];
    for &s in spec.active_species() {
        let xs = pooled(&|snap| snap.x[s.index()]);
        bands[s.index()] = Some(Band {
            h: quantile_sorted(&xs, 0.01),
            upper: quantile_sorted(&xs, 0.99),
        });
    }
    let norms = pooled(&|snap| norm(snap.x));
    Ok(PilotBounds {
        bands,
        chi: quantile_sorted(&norms, 0.99),
        horizon,
        seed: pilot.sim.seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRow {
    pub species: u8,
    pub stat: &'static str,
    pub param: f64,
    pub sup_short: f64,
    pub sup_long: f64,
    pub relative_change: f64,
    pub stable: bool,
}

/// Compares tail-window suprema of two runs whose horizons differ by a factor 2.
///
/// The change is measured relative to the larger supremum, but never relative
/// to less than `floor`, so curves decaying to zero do not count as unstable.
pub fn tail_stability(short: &EnsembleSummary, long: &EnsembleSummary, tolerance: f64, floor: f64) -> Vec<StabilityRow> {
    short
        .tail_suprema
        .iter()
        .filter_map(|a| {
            let b = long
                .tail_suprema
                .iter()
                .find(|b| b.species == a.species && b.stat == a.stat && b.param == a.param)?;
            let scale = a.value.abs().max(b.value.abs()).max(floor);
            let rel = (b.value - a.value).abs() / scale;
            Some(StabilityRow {
                species: a.species,
                stat: a.stat,
                param: a.param,
                sup_short: a.value,
                sup_long: b.value,
                relative_change: rel,
                stable: rel < tolerance,
            })
        })
        .collect()
}
