//! Net-growth functionals and the long-time regime they predict.
//!
//! For species `i`:
//!
//! ```text
//! alpha_i(t) = a_i(t) + Σ_{Π2} mass * delta_i(t, z)
//! beta_i(t)  = sigma_i(t)^2 / 2
//!            + Σ_{Π1} mass * (gamma_i(t, z) - ln(1 + gamma_i(t, z)))
//!            - Σ_{Π2} mass * ln(1 + delta_i(t, z))
//! p_i(t)     = a_i(t) - beta_i(t)
//! ```
//!
//! The signs of `inf p_i` and of the long-run average of `p_i` decide which
//! long-time behaviour (extinction, non-persistence or weak persistence in the
//! mean, stochastic permanence) is guaranteed.

use serde::Serialize;
use thiserror::Error;

use crate::model::{Bounds, ModelSpec, Species, TimeFunction};
use crate::quadrature;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Absolute tolerance for integrals without a closed form.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// Default sign band for all-constant specs.
pub const CONSTANT_SPEC_BAND: f64 = 1e-6;
/// Default sign band when some coefficient depends on time.
pub const TIME_VARYING_BAND: f64 = 1e-3;

#[derive(Debug, Error, PartialEq)]
pub enum RegimeError {
    #[error("averaging horizon must be > 0, got {0}")]
    NonPositiveHorizon(f64),
    #[error("tolerance band must be finite and >= 0, got {0}")]
    BadBand(f64),
}

pub fn alpha(spec: &ModelSpec, species: Species, t: f64) -> f64 {
    let i = species.index();
    spec.a[i].eval(t)
        + spec
            .channel2
            .weighted(species)
            .map(|(mass, d)| mass * d.eval(t))
            .sum::<f64>()
}

pub fn beta(spec: &ModelSpec, species: Species, t: f64) -> f64 {
    let sigma = spec.sigma[species.index()].eval(t);
    let centred: f64 = spec
        .channel1
        .weighted(species)
        .map(|(mass, g)| {
            let g = g.eval(t);
            mass * (g - g.ln_1p())
        })
        .sum();
    let large: f64 = spec
        .channel2
        .weighted(species)
        .map(|(mass, d)| mass * d.eval(t).ln_1p())
        .sum();
    0.5 * sigma * sigma + centred - large
}

pub fn p(spec: &ModelSpec, species: Species, t: f64) -> f64 {
    spec.a[species.index()].eval(t) - beta(spec, species, t)
}

fn all_constant(spec: &ModelSpec, species: Species) -> bool {
    let i = species.index();
    spec.a[i].is_constant()
        && spec.sigma[i].is_constant()
        && spec.channel1.amplitudes(species).iter().all(TimeFunction::is_constant)
        && spec.channel2.amplitudes(species).iter().all(TimeFunction::is_constant)
}

/// True when every coefficient of the spec is time-independent.
pub fn spec_is_constant(spec: &ModelSpec) -> bool {
    spec.coefficients().iter().all(|(_, f)| f.is_constant())
}

/// An extremum of `p_i` over `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PExtremum {
    /// Exact when `exact`, otherwise equal to `certified`.
    pub value: f64,
    pub exact: bool,
    /// Guaranteed bound: a lower bound for the infimum, an upper bound for the supremum.
    pub certified: f64,
    /// Extremum over a dense sample of times; tighter but not guaranteed.
    pub sampled: f64,
}

/// `g(x) = x - ln(1 + x)`, convex with minimum 0 at `x = 0`.
fn centred_penalty(x: f64) -> f64 {
    x - x.ln_1p()
}

fn centred_penalty_range(b: Bounds) -> Bounds {
    let sup = centred_penalty(b.inf).max(centred_penalty(b.sup));
    let inf = if b.contains(0.0) {
        0.0
    } else if b.inf > 0.0 {
        centred_penalty(b.inf)
    } else {
        centred_penalty(b.sup)
    };
    Bounds { inf, sup }
}

fn square_range(b: Bounds) -> Bounds {
    let sup = (b.inf * b.inf).max(b.sup * b.sup);
    let inf = if b.contains(0.0) {
        0.0
    } else {
        (b.inf * b.inf).min(b.sup * b.sup)
    };
    Bounds { inf, sup }
}

/// Interval enclosure of `beta_i(t)` over all `t`, from per-term extrema.
fn beta_range(spec: &ModelSpec, species: Species) -> Bounds {
    let sq = square_range(spec.sigma[species.index()].bounds());
    let mut lo = 0.5 * sq.inf;
    let mut hi = 0.5 * sq.sup;
    for (mass, g) in spec.channel1.weighted(species) {
        let r = centred_penalty_range(g.bounds());
        lo += mass * r.inf;
        hi += mass * r.sup;
    }
    for (mass, d) in spec.channel2.weighted(species) {
        let b = d.bounds();
        lo -= mass * b.sup.ln_1p();
        hi -= mass * b.inf.ln_1p();
    }
    Bounds { inf: lo, sup: hi }
}

/// Horizon over which `p_i` is sampled: long enough to cover every knot and a
/// couple of periods of every sinusoid.
fn sampling_horizon(spec: &ModelSpec, species: Species) -> f64 {
    let i = species.index();
    let mut fs: Vec<&TimeFunction> = vec![&spec.a[i], &spec.sigma[i]];
    fs.extend(spec.channel1.amplitudes(species));
    fs.extend(spec.channel2.amplitudes(species));
    fs.iter()
        .map(|f| match f {
            TimeFunction::Constant { .. } => 0.0,
            TimeFunction::Sinusoid {
                angular_frequency, ..
            } if *angular_frequency > 0.0 => 2.0 * std::f64::consts::TAU / angular_frequency,
            TimeFunction::Sinusoid { .. } => 0.0,
            TimeFunction::PiecewiseLinear(k) => k.as_slice().last().map_or(0.0, |&(t, _)| t),
        })
        .fold(1.0, f64::max)
}

fn sample_times(spec: &ModelSpec, species: Species) -> Vec<f64> {
    const SAMPLES: usize = 20_000;
    let horizon = sampling_horizon(spec, species);
    let mut ts: Vec<f64> = (0..=SAMPLES)
        .map(|k| horizon * k as f64 / SAMPLES as f64)
        .collect();
    let i = species.index();
    let mut fs: Vec<&TimeFunction> = vec![&spec.a[i], &spec.sigma[i]];
    fs.extend(spec.channel1.amplitudes(species));
    fs.extend(spec.channel2.amplitudes(species));
    for f in fs {
        if let TimeFunction::PiecewiseLinear(k) = f {
            ts.extend(k.as_slice().iter().map(|&(t, _)| t));
        }
    }
    ts
}

/// Infimum of `p_i`: exact for all-constant coefficients, otherwise a certified
/// lower bound `a_inf - sup beta` plus a sampled estimate.
pub fn p_inf(spec: &ModelSpec, species: Species) -> PExtremum {
    if all_constant(spec, species) {
        let v = p(spec, species, 0.0);
        return PExtremum {
            value: v,
            exact: true,
            certified: v,
            sampled: v,
        };
    }
    let certified = spec.a[species.index()].bounds().inf - beta_range(spec, species).sup;
    let sampled = sample_times(spec, species)
        .into_iter()
        .map(|t| p(spec, species, t))
        .fold(f64::INFINITY, f64::min);
    PExtremum {
        value: certified,
        exact: false,
        certified,
        sampled,
    }
}

/// Supremum of `p_i`; mirror image of [`p_inf`].
pub fn p_sup(spec: &ModelSpec, species: Species) -> PExtremum {
    if all_constant(spec, species) {
        let v = p(spec, species, 0.0);
        return PExtremum {
            value: v,
            exact: true,
            certified: v,
            sampled: v,
        };
    }
    let certified = spec.a[species.index()].bounds().sup - beta_range(spec, species).inf;
    let sampled = sample_times(spec, species)
        .into_iter()
        .map(|t| p(spec, species, t))
        .fold(f64::NEG_INFINITY, f64::max);
    PExtremum {
        value: certified,
        exact: false,
        certified,
        sampled,
    }
}

/// `∫_0^T ln(1 + f(s)) ds`.
fn integral_of_log1p(f: &TimeFunction, horizon: f64) -> f64 {
    if let Some(v) = f.constant_value() {
        return v.ln_1p() * horizon;
    }
    let (breaks, panel) = f.quadrature_hints(0.0, horizon);
    quadrature::integrate(
        |t| f.eval(t).ln_1p(),
        0.0,
        horizon,
        QUADRATURE_TOLERANCE,
        &breaks,
        panel,
    )
}

/// `∫_0^T p_i(s) ds`: closed form for the polynomial and trigonometric parts,
/// quadrature for logarithms of time-varying amplitudes.
pub fn integral_of_p(spec: &ModelSpec, species: Species, horizon: f64) -> f64 {
    let i = species.index();
    let mut total = spec.a[i].integral(0.0, horizon) - 0.5 * spec.sigma[i].integral_of_square(0.0, horizon);
    for (mass, g) in spec.channel1.weighted(species) {
        total -= mass * (g.integral(0.0, horizon) - integral_of_log1p(g, horizon));
    }
    for (mass, d) in spec.channel2.weighted(species) {
        total += mass * integral_of_log1p(d, horizon);
    }
    total
}

/// Finite-horizon surrogate for `limsup (1/t) ∫_0^t p_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeAverage {
    /// `(1/T) ∫_0^T p_i`.
    pub estimate: f64,
    /// `(horizon, average)` at `T / 2^k`, shortest horizon first.
    pub trace: Vec<(f64, f64)>,
}

pub fn p_bar_star(
    spec: &ModelSpec,
    species: Species,
    horizon: f64,
    num_horizons: usize,
) -> Result<TimeAverage, RegimeError> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(RegimeError::NonPositiveHorizon(horizon));
    }
    let estimate = integral_of_p(spec, species, horizon) / horizon;
    let mut trace: Vec<(f64, f64)> = (0..num_horizons.max(1))
        .map(|k| {
            let h = horizon / 2f64.powi(k as i32);
            let avg = if k == 0 {
                estimate
            } else {
                integral_of_p(spec, species, h) / h
            };
            (h, avg)
        })
        .collect();
    trace.reverse();
    Ok(TimeAverage { estimate, trace })
}

/// Functionals of one species bound to a spec.
#[derive(Debug, Clone)]
pub struct FunctionalProfile<'a> {
    spec: &'a ModelSpec,
    pub species: Species,
    pub p_inf: PExtremum,
    pub p_sup: PExtremum,
}

impl<'a> FunctionalProfile<'a> {
    pub fn new(spec: &'a ModelSpec, species: Species) -> FunctionalProfile<'a> {
        FunctionalProfile {
            spec,
            species,
            p_inf: p_inf(spec, species),
            p_sup: p_sup(spec, species),
        }
    }

    pub fn alpha(&self, t: f64) -> f64 {
        alpha(self.spec, self.species, t)
    }

    pub fn beta(&self, t: f64) -> f64 {
        beta(self.spec, self.species, t)
    }

    pub fn p(&self, t: f64) -> f64 {
        p(self.spec, self.species, t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Regime {
    Extinct,
    NonPersistentInMean,
    WeaklyPersistentInMean,
    StochasticallyPermanent,
    Indeterminate,
}

impl Regime {
    /// Whether two labels can hold at once for the same species.
    pub fn compatible_with(self, other: Regime) -> bool {
        use Regime::*;
        let dying = |r: Regime| matches!(r, Extinct | NonPersistentInMean);
        let living = |r: Regime| matches!(r, WeaklyPersistentInMean | StochasticallyPermanent);
        !((dying(self) && living(other)) || (living(self) && dying(other)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisParams {
    /// Averaging horizon for the time-average of `p_i`.
    pub horizon: f64,
    /// Sign band; `None` picks the default for the spec.
    pub tolerance_band: Option<f64>,
    /// Number of dyadic horizons in the convergence trace.
    pub num_horizons: usize,
    /// The spec is outside the admissible set; no prediction is made.
    pub degenerate: bool,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            horizon: 1000.0,
            tolerance_band: None,
            num_horizons: 8,
            degenerate: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeciesRegime {
    pub species: u8,
    pub name: String,
    pub p_inf: PExtremum,
    pub p_sup: PExtremum,
    pub p_bar_star: f64,
    pub p_bar_star_trace: Vec<(f64, f64)>,
    /// Strongest applicable label.
    pub classification: Regime,
    /// Further labels guaranteed under the same conditions.
    pub also_implies: Vec<Regime>,
    pub rule_citations: Vec<String>,
    pub tolerance_band: f64,
    pub notes: Vec<String>,
}

impl SpeciesRegime {
    /// Primary label followed by the implied ones.
    pub fn labels(&self) -> Vec<Regime> {
        let mut out = vec![self.classification];
        out.extend(self.also_implies.iter().copied());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub schema_version: u32,
    pub horizon: f64,
    pub tolerance_band: f64,
    pub prey_only: bool,
    pub admissible: bool,
    /// Unconditional under the admissibility clauses.
    pub ultimately_bounded: bool,
    pub boundedness_citation: Option<String>,
    pub species: Vec<SpeciesRegime>,
}

impl RegimeReport {
    pub fn species(&self, species: Species) -> &SpeciesRegime {
        &self.species[species.index()]
    }
}

const CITE_EXTINCTION: &str = "extinction: limsup of the time-average of p_i is negative";
const CITE_PREDATOR_PERMANENCE: &str = "predator stochastic permanence: inf p_2 > 0";
const CITE_PREY_PERMANENCE: &str = "prey stochastic permanence with predator absent: inf p_1 > 0";
const CITE_PREY_NON_PERSISTENCE: &str = "prey non-persistence in the mean: time-average of p_1 is zero";
const CITE_PREDATOR_NON_PERSISTENCE: &str =
    "predator non-persistence in the mean: time-average of p_2 is zero and that of p_1 is negative";
const CITE_PREDATOR_WEAK_PERSISTENCE: &str =
    "predator weak persistence in the mean: time-average of p_2 is positive";
const CITE_PREY_WEAK_PERSISTENCE: &str =
    "prey weak persistence in the mean: time-average of p_1 positive, of p_2 negative";
const CITE_BOUNDEDNESS: &str = "stochastic ultimate boundedness: holds for every admissible spec";

/// Maps the signs of the functionals to regime labels.
///
/// A quantity counts as positive (negative) when it exceeds `band` (`-band`)
/// and as zero when its magnitude is at most `band / 2`; values in between
/// support no sign call at all.
pub fn classify(spec: &ModelSpec, params: &AnalysisParams) -> Result<RegimeReport, RegimeError> {
    let band = params.tolerance_band.unwrap_or(if spec_is_constant(spec) {
        CONSTANT_SPEC_BAND
    } else {
        TIME_VARYING_BAND
    });
    if !(band.is_finite() && band >= 0.0) {
        return Err(RegimeError::BadBand(band));
    }
    let zero = 0.5 * band;

    let averages = [
        p_bar_star(spec, Species::Prey, params.horizon, params.num_horizons)?,
        p_bar_star(spec, Species::Predator, params.horizon, params.num_horizons)?,
    ];
    let pbar = [averages[0].estimate, averages[1].estimate];
    let profiles = [
        FunctionalProfile::new(spec, Species::Prey),
        FunctionalProfile::new(spec, Species::Predator),
    ];

    let mut species = Vec::with_capacity(2);
    for s in Species::ALL {
        let i = s.index();
        let mut labels: Vec<(Regime, &str)> = Vec::new();
        let mut notes = Vec::new();

        if params.degenerate {
            notes.push("spec violates the admissibility clauses; no long-time guarantee applies".into());
        } else if spec.prey_only && s == Species::Predator {
            notes.push("predator absent in the reduced model".into());
        } else {
            if pbar[i] < -band {
                labels.push((Regime::Extinct, CITE_EXTINCTION));
            }
            match s {
                Species::Predator if profiles[1].p_inf.value > band => {
                    labels.push((Regime::StochasticallyPermanent, CITE_PREDATOR_PERMANENCE));
                }
                Species::Prey if spec.prey_only && profiles[0].p_inf.value > band => {
                    labels.push((Regime::StochasticallyPermanent, CITE_PREY_PERMANENCE));
                }
                _ => {}
            }
            match s {
                Species::Prey if pbar[0].abs() <= zero => {
                    labels.push((Regime::NonPersistentInMean, CITE_PREY_NON_PERSISTENCE));
                }
                Species::Predator if pbar[1].abs() <= zero && pbar[0] < -band => {
                    labels.push((Regime::NonPersistentInMean, CITE_PREDATOR_NON_PERSISTENCE));
                }
                _ => {}
            }
            match s {
                Species::Predator if pbar[1] > band => {
                    labels.push((Regime::WeaklyPersistentInMean, CITE_PREDATOR_WEAK_PERSISTENCE));
                }
                Species::Prey if pbar[0] > band && (spec.prey_only || pbar[1] < -band) => {
                    labels.push((Regime::WeaklyPersistentInMean, CITE_PREY_WEAK_PERSISTENCE));
                }
                _ => {}
            }
            if labels.is_empty() {
                notes.push(format!(
                    "no sign condition decided at band {band:e} (p_bar_star = {:e})",
                    pbar[i]
                ));
            }
        }

        let (classification, also_implies, rule_citations) = match labels.split_first() {
            None => (Regime::Indeterminate, Vec::new(), Vec::new()),
            Some((first, rest)) => (
                first.0,
                rest.iter().map(|l| l.0).collect(),
                labels.iter().map(|l| l.1.to_string()).collect(),
            ),
        };

        species.push(SpeciesRegime {
            species: s.number(),
            name: s.to_string(),
            p_inf: profiles[i].p_inf,
            p_sup: profiles[i].p_sup,
            p_bar_star: pbar[i],
            p_bar_star_trace: averages[i].trace.clone(),
            classification,
            also_implies,
            rule_citations,
            tolerance_band: band,
            notes,
        });
    }

    Ok(RegimeReport {
        schema_version: REPORT_SCHEMA_VERSION,
        horizon: params.horizon,
        tolerance_band: band,
        prey_only: spec.prey_only,
        admissible: !params.degenerate,
        ultimately_bounded: !params.degenerate,
        boundedness_citation: (!params.degenerate).then(|| CITE_BOUNDEDNESS.to_string()),
        species,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, FiniteJumpMeasure, JumpChannel};
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    // High-precision reference values (40-digit arithmetic):
    // beta = 0.02 + (0.1 - ln 1.1) - 0.5 ln 1.05
    const BETA_FIXTURE: f64 = 0.000_294_738_110_959_138_4;
    const P_FIXTURE: f64 = 0.299_705_261_889_040_9;

    fn fixture() -> ModelSpec {
        ModelSpec::constant([0.3, 0.3], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.5, 0.5])
            .with_channel1(JumpChannel::single_atom(1.0, 0.1, 0.1, true))
            .with_channel2(JumpChannel::single_atom(0.5, 0.05, 0.05, false))
    }

    fn noise_free(a: TimeFunction) -> ModelSpec {
        let mut spec = ModelSpec::constant([0.4, 0.4], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5]);
        spec.a[0] = a;
        spec
    }

    #[test]
    fn alpha_examples() {
        let spec = fixture();
        assert!((alpha(&spec, Species::Prey, 3.0) - 0.325).abs() < 1e-15);
        let bare = ModelSpec::constant([0.3, 0.3], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.5, 0.5]);
        assert_eq!(alpha(&bare, Species::Prey, 1.0), 0.3);
        let zero_amp = bare.with_channel2(JumpChannel::single_atom(2.0, 0.0, 0.0, false));
        assert_eq!(alpha(&zero_amp, Species::Predator, 1.0), 0.3);
    }

    #[test]
    fn beta_examples() {
        assert!((beta(&fixture(), Species::Prey, 0.0) - BETA_FIXTURE).abs() < 1e-15);
        let quiet = ModelSpec::constant([0.3, 0.3], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5]);
        assert_eq!(beta(&quiet, Species::Prey, 2.0), 0.0);
        let zero_gamma = ModelSpec::constant([0.3, 0.3], 1.0, [0.5, 1.0], 1.0, [0.3, 0.3], [0.5, 0.5])
            .with_channel1(JumpChannel::single_atom(1.0, 0.0, 0.0, true))
            .with_channel2(JumpChannel::single_atom(1.0, 0.0, 0.0, false));
        assert!((beta(&zero_gamma, Species::Predator, 5.0) - 0.045).abs() < 1e-16);
    }

    #[test]
    fn p_examples() {
        let spec = noise_free(TimeFunction::constant(0.4));
        assert_eq!(p(&spec, Species::Prey, 1.0), 0.4);
        assert!((p(&fixture(), Species::Prey, 0.0) - P_FIXTURE).abs() < 1e-15);
        let spec = noise_free(TimeFunction::sinusoid(0.5, 0.1, 1.0, 0.0).unwrap());
        for t in [0.0, 0.7, 2.0, 11.0] {
            assert_eq!(p(&spec, Species::Prey, t), 0.5 + 0.1 * t.sin());
        }
    }

    #[test]
    fn p_inf_examples() {
        let exact = p_inf(&fixture(), Species::Prey);
        assert!(exact.exact);
        assert!((exact.value - P_FIXTURE).abs() < 1e-15);

        let spec = noise_free(TimeFunction::sinusoid(0.5, 0.1, 1.0, 0.0).unwrap());
        let r = p_inf(&spec, Species::Prey);
        assert!(!r.exact);
        assert!((r.certified - 0.4).abs() < 1e-15);
        assert!((r.sampled - 0.4).abs() < 1e-6);

        let mut spec = ModelSpec::constant([0.3, 0.3], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5]);
        spec.sigma[0] = TimeFunction::sinusoid(0.2, 0.1, 1.0, 0.0).unwrap();
        let r = p_inf(&spec, Species::Prey);
        assert!((r.certified - 0.255).abs() < 1e-15);
        assert!(r.sampled >= r.certified);
    }

    #[test]
    fn p_bar_star_examples() {
        let r = p_bar_star(&fixture(), Species::Prey, 64.0, 5).unwrap();
        assert!(r.trace.iter().all(|&(_, v)| (v - P_FIXTURE).abs() < 1e-14));
        assert_eq!(r.trace.len(), 5);
        assert_eq!(r.trace[0].0, 4.0);
        assert_eq!(r.trace[4].0, 64.0);

        let spec = noise_free(TimeFunction::sinusoid(0.5, 0.1, TAU, 0.0).unwrap());
        for t in [1.0, 7.0, 40.0] {
            let v = p_bar_star(&spec, Species::Prey, t, 1).unwrap().estimate;
            assert!((v - 0.5).abs() < 1e-14, "{v}");
        }

        let spec = noise_free(TimeFunction::piecewise_linear(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap());
        let v = p_bar_star(&spec, Species::Prey, 2.0, 1).unwrap().estimate;
        assert!((v - 0.75).abs() < 1e-15);

        assert_eq!(
            p_bar_star(&spec, Species::Prey, 0.0, 1),
            Err(RegimeError::NonPositiveHorizon(0.0))
        );
    }

    #[test]
    fn log_terms_use_quadrature() {
        // ∫ ln(1 + 0.5 sin(2πt)) over whole periods is ln((1 + √0.75) / 2) per period
        let measure = FiniteJumpMeasure::new(vec![Atom { mark: 0.0, mass: 1.0 }]).unwrap();
        let ch2 = JumpChannel::new(
            measure,
            vec![TimeFunction::sinusoid(0.0, 0.5, TAU, 0.0).unwrap()],
            vec![TimeFunction::zero()],
            false,
        )
        .unwrap();
        let spec = ModelSpec::constant([0.3, 0.3], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5])
            .with_channel2(ch2);
        let v = p_bar_star(&spec, Species::Prey, 100.0, 1).unwrap().estimate;
        let exact = 0.3 + ((1.0 + 0.75f64.sqrt()) / 2.0).ln();
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    fn constant_with_p(p1: f64, p2: f64) -> ModelSpec {
        // no jumps, sigma = 0.2: beta = 0.02
        ModelSpec::constant([p1 + 0.02, p2 + 0.02], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.5, 0.5])
    }

    #[test]
    fn classify_extinct() {
        let r = classify(&constant_with_p(-0.1, -0.1), &AnalysisParams::default()).unwrap();
        for s in &r.species {
            assert_eq!(s.classification, Regime::Extinct);
            assert!(!s.rule_citations.is_empty());
        }
        assert!(r.ultimately_bounded);
    }

    #[test]
    fn classify_predator_permanent() {
        let r = classify(&constant_with_p(0.2, 0.5), &AnalysisParams::default()).unwrap();
        let pred = r.species(Species::Predator);
        assert_eq!(pred.classification, Regime::StochasticallyPermanent);
        assert_eq!(pred.also_implies, vec![Regime::WeaklyPersistentInMean]);
        assert_eq!(pred.rule_citations.len(), 2);
        // full two-species model never claims prey permanence
        assert_eq!(r.species(Species::Prey).classification, Regime::Indeterminate);
    }

    #[test]
    fn classify_knife_edge_prey() {
        // sigma^2 / 2 is exactly 0.125 for sigma = 0.5
        let spec = ModelSpec::constant([0.125, 0.02], 1.0, [0.5, 1.0], 1.0, [0.5, 0.2], [0.5, 0.5]);
        let params = AnalysisParams {
            tolerance_band: Some(1e-9),
            ..AnalysisParams::default()
        };
        let r = classify(&spec, &params).unwrap();
        assert_eq!(r.species(Species::Prey).p_bar_star, 0.0);
        assert_eq!(r.species(Species::Prey).classification, Regime::NonPersistentInMean);
    }

    #[test]
    fn classify_predator_non_persistent() {
        let spec = ModelSpec::constant([0.02 - 0.1, 0.125], 1.0, [0.5, 1.0], 1.0, [0.2, 0.5], [0.5, 0.5]);
        let r = classify(&spec, &AnalysisParams::default()).unwrap();
        assert_eq!(r.species(Species::Predator).classification, Regime::NonPersistentInMean);
        assert_eq!(r.species(Species::Prey).classification, Regime::Extinct);
    }

    #[test]
    fn classify_prey_weakly_persistent() {
        let r = classify(&constant_with_p(0.3, -0.1), &AnalysisParams::default()).unwrap();
        assert_eq!(r.species(Species::Prey).classification, Regime::WeaklyPersistentInMean);
        assert_eq!(r.species(Species::Predator).classification, Regime::Extinct);
    }

    #[test]
    fn prey_only_permanence() {
        let spec = constant_with_p(0.4, 0.4).with_prey_only(true);
        let r = classify(&spec, &AnalysisParams::default()).unwrap();
        let prey = r.species(Species::Prey);
        assert_eq!(prey.classification, Regime::StochasticallyPermanent);
        assert!(prey.also_implies.contains(&Regime::WeaklyPersistentInMean));
        assert_eq!(r.species(Species::Predator).classification, Regime::Indeterminate);
    }

    #[test]
    fn degenerate_spec_has_no_prediction() {
        let params = AnalysisParams {
            degenerate: true,
            ..AnalysisParams::default()
        };
        let r = classify(&constant_with_p(-0.1, 0.5), &params).unwrap();
        assert!(r.species.iter().all(|s| s.classification == Regime::Indeterminate));
        assert!(!r.ultimately_bounded);
    }

    #[test]
    fn inside_band_is_indeterminate() {
        let params = AnalysisParams {
            tolerance_band: Some(1e-2),
            ..AnalysisParams::default()
        };
        // 0.007 is inside the band but outside the zero zone
        let r = classify(&constant_with_p(0.3, 0.007), &params).unwrap();
        let pred = r.species(Species::Predator);
        assert_eq!(pred.classification, Regime::Indeterminate);
        assert!(pred.rule_citations.is_empty());
    }

    #[test]
    fn constant_spec_matches_frozen_coefficients() {
        let mut spec = fixture();
        spec.a[0] = TimeFunction::sinusoid(0.3, 0.0, 2.0, 0.0).unwrap();
        spec.sigma[1] = TimeFunction::piecewise_linear(vec![(0.0, 0.2), (5.0, 0.2)]).unwrap();
        let params = AnalysisParams {
            tolerance_band: Some(1e-6),
            ..AnalysisParams::default()
        };
        let a = classify(&spec, &params).unwrap();
        let b = classify(&fixture(), &params).unwrap();
        for s in Species::ALL {
            assert_eq!(a.species(s).labels(), b.species(s).labels());
        }
    }

    fn arb_spec() -> impl Strategy<Value = ModelSpec> {
        (
            0.05..1.0f64,
            0.0..0.05f64,
            0.0..0.5f64,
            0.0..0.5f64,
            -0.5..1.0f64,
            -0.5..1.0f64,
            0.0..2.0f64,
            0.0..2.0f64,
        )
            .prop_map(|(a, amp, s1, s2, g, d, m1, m2)| {
                let mut spec =
                    ModelSpec::constant([a, a], 1.0, [0.5, 1.0], 1.0, [s1, s2], [0.5, 0.5]);
                spec.a[0] = TimeFunction::sinusoid(a, amp.min(a * 0.9), 1.3, 0.2).unwrap();
                spec.sigma[1] = TimeFunction::piecewise_linear(vec![(0.0, s2), (3.0, s1), (7.0, s2)]).unwrap();
                if m1 > 0.0 {
                    spec = spec.with_channel1(JumpChannel::single_atom(m1, g, -g * 0.5, true));
                }
                if m2 > 0.0 {
                    spec = spec.with_channel2(JumpChannel::single_atom(m2, d, d * 0.3, false));
                }
                spec
            })
    }

    proptest! {
        #[test]
        fn p_is_a_minus_beta(spec in arb_spec(), t in 0.0..100.0f64) {
            for s in Species::ALL {
                prop_assert_eq!(p(&spec, s, t), spec.a[s.index()].eval(t) - beta(&spec, s, t));
            }
        }

        #[test]
        fn beta_lower_bound(spec in arb_spec(), t in 0.0..100.0f64) {
            for s in Species::ALL {
                let sig = spec.sigma[s.index()].eval(t);
                let floor = 0.5 * sig * sig
                    - spec.channel2.weighted(s).map(|(m, d)| m * d.eval(t).ln_1p()).sum::<f64>();
                prop_assert!(beta(&spec, s, t) >= floor - 1e-15);
            }
        }

        #[test]
        fn beta_monotone_in_sigma(spec in arb_spec(), t in 0.0..100.0f64, bump in 0.0..0.5f64) {
            let mut louder = spec.clone();
            let old = spec.sigma[0].eval(t);
            louder.sigma[0] = TimeFunction::constant(old.abs() + bump);
            prop_assert!(beta(&louder, Species::Prey, t) >= beta(&spec, Species::Prey, t) - 1e-15);
        }

        #[test]
        fn extra_centred_atom_raises_beta(spec in arb_spec(), t in 0.0..100.0f64, g in -0.8..3.0f64, mass in 0.01..2.0f64) {
            prop_assume!(g.abs() > 1e-3);
            let mut atoms = spec.channel1.measure().atoms().to_vec();
            atoms.push(Atom { mark: 99.0, mass });
            let mut prey: Vec<TimeFunction> = spec.channel1.amplitudes(Species::Prey).to_vec();
            let mut pred: Vec<TimeFunction> = spec.channel1.amplitudes(Species::Predator).to_vec();
            prey.push(TimeFunction::constant(g));
            pred.push(TimeFunction::zero());
            let ch = JumpChannel::new(FiniteJumpMeasure::new(atoms).unwrap(), prey, pred, true).unwrap();
            let more = spec.clone().with_channel1(ch);
            prop_assert!(beta(&more, Species::Prey, t) > beta(&spec, Species::Prey, t));
        }

        #[test]
        fn zero_noise_reduces_to_growth_rate(a in 0.01..2.0f64, amp in 0.0..0.009f64, t in 0.0..50.0f64) {
            let mut spec = ModelSpec::constant([a, a], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5]);
            spec.a[1] = TimeFunction::sinusoid(a, amp, 2.0, 0.0).unwrap();
            for s in Species::ALL {
                prop_assert_eq!(beta(&spec, s, t), 0.0);
                prop_assert_eq!(p(&spec, s, t), spec.a[s.index()].eval(t));
                prop_assert_eq!(alpha(&spec, s, t), spec.a[s.index()].eval(t));
            }
        }

        #[test]
        fn average_between_inf_and_sup(spec in arb_spec(), horizon in 0.5..200.0f64) {
            for s in Species::ALL {
                let avg = p_bar_star(&spec, s, horizon, 1).unwrap().estimate;
                let lo = p_inf(&spec, s).value;
                let hi = p_sup(&spec, s).value;
                prop_assert!(lo - 1e-9 <= avg && avg <= hi + 1e-9, "{} <= {} <= {}", lo, avg, hi);
            }
        }

        #[test]
        fn halving_band_never_contradicts(p1 in -0.01..0.01f64, p2 in -0.01..0.01f64, band in 1e-4..1e-2f64) {
            let spec = constant_with_p(p1, p2);
            let wide = classify(&spec, &AnalysisParams { tolerance_band: Some(band), ..AnalysisParams::default() }).unwrap();
            let narrow = classify(&spec, &AnalysisParams { tolerance_band: Some(0.5 * band), ..AnalysisParams::default() }).unwrap();
            for s in Species::ALL {
                for x in wide.species(s).labels() {
                    for y in narrow.species(s).labels() {
                        prop_assert!(x.compatible_with(y), "{:?} vs {:?} for {}", x, y, s);
                    }
                }
            }
        }
    }
}
