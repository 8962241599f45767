//! Coefficient functions, finite jump measures and the admissibility check.
//!
//! Every coefficient of the model is a [`TimeFunction`]: a bounded continuous
//! function on `[0, ∞)` with an exact infimum and supremum. Jump noise is
//! described by two [`JumpChannel`]s, each built on a finite atomic measure
//! over the mark space. Channel 1 is compensated (centred Poisson noise),
//! channel 2 is not.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// The two populations of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Species {
    Prey,
    Predator,
}

impl Species {
    pub const ALL: [Species; 2] = [Species::Prey, Species::Predator];

    pub fn index(self) -> usize {
        match self {
            Species::Prey => 0,
            Species::Predator => 1,
        }
    }

    /// 1 for prey, 2 for predator.
    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }

    pub fn from_number(n: u8) -> Option<Species> {
        match n {
            1 => Some(Species::Prey),
            2 => Some(Species::Predator),
            _ => None,
        }
    }
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Species::Prey => f.write_str("prey"),
            Species::Predator => f.write_str("predator"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("non-finite parameter in {0}")]
    NonFinite(&'static str),
    #[error("angular frequency must be >= 0, got {0}")]
    NegativeFrequency(f64),
    #[error("piecewise-linear function needs at least one knot")]
    NoKnots,
    #[error("knot times must be >= 0 and strictly increasing (knot {index})")]
    KnotOrder { index: usize },
    #[error("atom {index} has mass {mass}; masses must be finite and > 0")]
    AtomMass { index: usize, mass: f64 },
    #[error("duplicate mark {mark} in jump measure")]
    DuplicateMark { mark: f64 },
    #[error("species {species} has {got} amplitude functions but the measure has {atoms} atoms")]
    AmplitudeCount {
        species: Species,
        got: usize,
        atoms: usize,
    },
}

/// Exact infimum and supremum of a function over `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub inf: f64,
    pub sup: f64,
}

impl Bounds {
    pub fn point(v: f64) -> Bounds {
        Bounds { inf: v, sup: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.inf <= v && v <= self.sup
    }
}

/// Knots of a piecewise-linear function: strictly increasing times, at least one knot.
#[derive(Debug, Clone, PartialEq)]
pub struct Knots(Vec<(f64, f64)>);

impl Knots {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Knots, ModelError> {
        if knots.is_empty() {
            return Err(ModelError::NoKnots);
        }
        for (i, &(t, v)) in knots.iter().enumerate() {
            if !t.is_finite() || !v.is_finite() {
                return Err(ModelError::NonFinite("piecewise-linear knot"));
            }
            if t < 0.0 || (i > 0 && t <= knots[i - 1].0) {
                return Err(ModelError::KnotOrder { index: i });
            }
        }
        Ok(Knots(knots))
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.0
    }
}

/// A bounded continuous coefficient `f(t)`, `t >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeFunction {
    Constant {
        value: f64,
    },
    /// `base + amplitude * sin(angular_frequency * t + phase)`
    Sinusoid {
        base: f64,
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    },
    /// Linear interpolation between knots, constant outside them.
    PiecewiseLinear(Knots),
}

impl TimeFunction {
    pub fn constant(value: f64) -> TimeFunction {
        TimeFunction::Constant { value }
    }

    pub fn zero() -> TimeFunction {
        TimeFunction::constant(0.0)
    }

    pub fn sinusoid(
        base: f64,
        amplitude: f64,
        angular_frequency: f64,
        phase: f64,
    ) -> Result<TimeFunction, ModelError> {
        if ![base, amplitude, angular_frequency, phase]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(ModelError::NonFinite("sinusoid"));
        }
        if angular_frequency < 0.0 {
            return Err(ModelError::NegativeFrequency(angular_frequency));
        }
        Ok(TimeFunction::Sinusoid {
            base,
            amplitude,
            angular_frequency,
            phase,
        })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<TimeFunction, ModelError> {
        Ok(TimeFunction::PiecewiseLinear(Knots::new(knots)?))
    }

    /// Checks the invariants of a value that may have been assembled by hand.
    pub fn check(&self) -> Result<(), ModelError> {
        match self {
            TimeFunction::Constant { value } if !value.is_finite() => {
                Err(ModelError::NonFinite("constant"))
            }
            TimeFunction::Constant { .. } => Ok(()),
            TimeFunction::Sinusoid {
                base,
                amplitude,
                angular_frequency,
                phase,
            } => TimeFunction::sinusoid(*base, *amplitude, *angular_frequency, *phase).map(|_| ()),
            TimeFunction::PiecewiseLinear(k) => Knots::new(k.0.clone()).map(|_| ()),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    /// The value if the function does not depend on time.
    pub fn constant_value(&self) -> Option<f64> {
        match self {
            TimeFunction::Constant { value } => Some(*value),
            TimeFunction::Sinusoid {
                base,
                amplitude,
                angular_frequency,
                phase,
            } if *amplitude == 0.0 || *angular_frequency == 0.0 => {
                Some(base + amplitude * phase.sin())
            }
            TimeFunction::Sinusoid { .. } => None,
            TimeFunction::PiecewiseLinear(k) => {
                let v0 = k.0[0].1;
                k.0.iter().all(|&(_, v)| v == v0).then_some(v0)
            }
        }
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant { value } => *value,
            TimeFunction::Sinusoid {
                base,
                amplitude,
                angular_frequency,
                phase,
            } => base + amplitude * (angular_frequency * t + phase).sin(),
            TimeFunction::PiecewiseLinear(k) => eval_pwl(&k.0, t),
        }
    }

    pub fn bounds(&self) -> Bounds {
        if let Some(v) = self.constant_value() {
            return Bounds::point(v);
        }
        match self {
            TimeFunction::Constant { value } => Bounds::point(*value),
            TimeFunction::Sinusoid {
                base, amplitude, ..
            } => Bounds {
                inf: base - amplitude.abs(),
                sup: base + amplitude.abs(),
            },
            TimeFunction::PiecewiseLinear(k) => k.0.iter().fold(
                Bounds {
                    inf: f64::INFINITY,
                    sup: f64::NEG_INFINITY,
                },
                |b, &(_, v)| Bounds {
                    inf: b.inf.min(v),
                    sup: b.sup.max(v),
                },
            ),
        }
    }

    /// `∫_{t0}^{t1} f(s) ds`, exact.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match self {
            TimeFunction::Constant { value } => value * (t1 - t0),
            TimeFunction::Sinusoid {
                base,
                amplitude,
                angular_frequency,
                phase,
            } => {
                let w = *angular_frequency;
                if w == 0.0 {
                    (base + amplitude * phase.sin()) * (t1 - t0)
                } else {
                    base * (t1 - t0)
                        + amplitude / w * ((w * t0 + phase).cos() - (w * t1 + phase).cos())
                }
            }
            TimeFunction::PiecewiseLinear(k) => {
                pwl_segments(&k.0, t0, t1)
                    .map(|(a, b, fa, fb)| 0.5 * (fa + fb) * (b - a))
                    .sum()
            }
        }
    }

    /// `∫_{t0}^{t1} f(s)^2 ds`, exact.
    pub fn integral_of_square(&self, t0: f64, t1: f64) -> f64 {
        match self {
            TimeFunction::Constant { value } => value * value * (t1 - t0),
            TimeFunction::Sinusoid {
                base,
                amplitude,
                angular_frequency,
                phase,
            } => {
                let w = *angular_frequency;
                if w == 0.0 {
                    let v = base + amplitude * phase.sin();
                    return v * v * (t1 - t0);
                }
                // (B + A sin u)^2 = B^2 + 2AB sin u + A^2 (1 - cos 2u) / 2
                let (u0, u1) = (w * t0 + phase, w * t1 + phase);
                base * base * (t1 - t0)
                    + 2.0 * amplitude * base / w * (u0.cos() - u1.cos())
                    + amplitude * amplitude
                        * (0.5 * (t1 - t0) - ((2.0 * u1).sin() - (2.0 * u0).sin()) / (4.0 * w))
            }
            TimeFunction::PiecewiseLinear(k) => pwl_segments(&k.0, t0, t1)
                .map(|(a, b, fa, fb)| (fa * fa + fa * fb + fb * fb) * (b - a) / 3.0)
                .sum(),
        }
    }

    /// Points in `(t0, t1)` where the function is not smooth, plus a panel length
    /// short enough that a composite rule cannot alias an oscillation.
    pub(crate) fn quadrature_hints(&self, t0: f64, t1: f64) -> (Vec<f64>, Option<f64>) {
        match self {
            TimeFunction::Constant { .. } => (Vec::new(), None),
            TimeFunction::Sinusoid {
                angular_frequency, ..
            } => {
                let panel = (*angular_frequency > 0.0)
                    .then(|| std::f64::consts::TAU / angular_frequency / 8.0);
                (Vec::new(), panel)
            }
            TimeFunction::PiecewiseLinear(k) => (
                k.0.iter()
                    .map(|&(t, _)| t)
                    .filter(|&t| t > t0 && t < t1)
                    .collect(),
                None,
            ),
        }
    }
}

fn eval_pwl(knots: &[(f64, f64)], t: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    // first knot with time > t; it exists and is > 0 given the checks above
    let i = knots.partition_point(|&(kt, _)| kt <= t);
    let (ta, va) = knots[i - 1];
    let (tb, vb) = knots[i];
    va + (vb - va) * (t - ta) / (tb - ta)
}

/// Linear pieces `(a, b, f(a), f(b))` covering `[t0, t1]`.
fn pwl_segments(
    knots: &[(f64, f64)],
    t0: f64,
    t1: f64,
) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
    let mut cuts = vec![t0];
    cuts.extend(knots.iter().map(|&(t, _)| t).filter(|&t| t > t0 && t < t1));
    cuts.push(t1);
    (0..cuts.len() - 1).map(move |i| {
        let (a, b) = (cuts[i], cuts[i + 1]);
        (a, b, eval_pwl(knots, a), eval_pwl(knots, b))
    })
}

impl fmt::Display for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFunction::Constant { value } => write!(f, "const({value:?})"),
            TimeFunction::Sinusoid {
                base,
                amplitude,
                angular_frequency,
                phase,
            } => write!(f, "sin({base:?}, {amplitude:?}, {angular_frequency:?}, {phase:?})"),
            TimeFunction::PiecewiseLinear(k) => {
                f.write_str("pwl(")?;
                for (i, (t, v)) in k.0.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{t:?}:{v:?}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Mark `z`; only a label.
    pub mark: f64,
    /// Intensity contribution, per unit time.
    pub mass: f64,
}

/// A finite measure on the mark space made of finitely many weighted atoms.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteJumpMeasure {
    atoms: Vec<Atom>,
}

impl FiniteJumpMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<FiniteJumpMeasure, ModelError> {
        for (index, atom) in atoms.iter().enumerate() {
            if !atom.mark.is_finite() {
                return Err(ModelError::NonFinite("atom mark"));
            }
            if !(atom.mass.is_finite() && atom.mass > 0.0) {
                return Err(ModelError::AtomMass {
                    index,
                    mass: atom.mass,
                });
            }
            if atoms[..index].iter().any(|a| a.mark == atom.mark) {
                return Err(ModelError::DuplicateMark { mark: atom.mark });
            }
        }
        Ok(FiniteJumpMeasure { atoms })
    }

    pub fn empty() -> FiniteJumpMeasure {
        FiniteJumpMeasure::default()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }
}

/// A Poisson jump source together with the relative jump size each atom
/// inflicts on each species: `x -> x * (1 + amplitude(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpChannel {
    measure: FiniteJumpMeasure,
    amplitudes: [Vec<TimeFunction>; 2],
    compensated: bool,
}

impl JumpChannel {
    pub fn new(
        measure: FiniteJumpMeasure,
        prey: Vec<TimeFunction>,
        predator: Vec<TimeFunction>,
        compensated: bool,
    ) -> Result<JumpChannel, ModelError> {
        for (species, amps) in [(Species::Prey, &prey), (Species::Predator, &predator)] {
            if amps.len() != measure.len() {
                return Err(ModelError::AmplitudeCount {
                    species,
                    got: amps.len(),
                    atoms: measure.len(),
                });
            }
            for f in amps {
                f.check()?;
            }
        }
        Ok(JumpChannel {
            measure,
            amplitudes: [prey, predator],
            compensated,
        })
    }

    pub fn empty(compensated: bool) -> JumpChannel {
        JumpChannel {
            measure: FiniteJumpMeasure::empty(),
            amplitudes: [Vec::new(), Vec::new()],
            compensated,
        }
    }

    /// Single-atom channel with constant amplitudes; handy for fixtures.
    pub fn single_atom(mass: f64, prey: f64, predator: f64, compensated: bool) -> JumpChannel {
        let measure = FiniteJumpMeasure::new(vec![Atom { mark: 0.0, mass }])
            .expect("single atom with positive mass");
        JumpChannel::new(
            measure,
            vec![TimeFunction::constant(prey)],
            vec![TimeFunction::constant(predator)],
            compensated,
        )
        .expect("one amplitude per atom")
    }

    pub fn measure(&self) -> &FiniteJumpMeasure {
        &self.measure
    }

    pub fn amplitudes(&self, species: Species) -> &[TimeFunction] {
        &self.amplitudes[species.index()]
    }

    pub fn amplitude(&self, species: Species, atom: usize) -> &TimeFunction {
        &self.amplitudes[species.index()][atom]
    }

    pub fn is_compensated(&self) -> bool {
        self.compensated
    }

    /// Iterator over `(mass, amplitude)` pairs for one species.
    pub fn weighted(&self, species: Species) -> impl Iterator<Item = (f64, &TimeFunction)> {
        self.measure
            .atoms()
            .iter()
            .map(|a| a.mass)
            .zip(self.amplitudes[species.index()].iter())
    }

    /// Copy of the channel without atom `index`.
    pub fn without_atom(&self, index: usize) -> JumpChannel {
        let mut atoms = self.measure.atoms.clone();
        atoms.remove(index);
        let mut amplitudes = self.amplitudes.clone();
        for a in &mut amplitudes {
            a.remove(index);
        }
        JumpChannel {
            measure: FiniteJumpMeasure { atoms },
            amplitudes,
            compensated: self.compensated,
        }
    }
}

/// Full coefficient set and initial state. The predator has no intraspecific
/// competition term, so there is no field for it.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Growth rates `a_1, a_2`.
    pub a: [TimeFunction; 2],
    /// Prey intraspecific competition.
    pub b1: TimeFunction,
    /// Interaction maxima `c_1` (predation) and `c_2` (Leslie-Gower).
    pub c: [TimeFunction; 2],
    /// Environmental protection.
    pub m: TimeFunction,
    /// White-noise intensities.
    pub sigma: [TimeFunction; 2],
    /// Centred jumps.
    pub channel1: JumpChannel,
    /// Non-centred jumps.
    pub channel2: JumpChannel,
    pub x0: [f64; 2],
    /// Reduced model with the predator absent (`x_2 ≡ 0`).
    pub prey_only: bool,
}

impl ModelSpec {
    /// All-constant spec without jumps.
    pub fn constant(a: [f64; 2], b1: f64, c: [f64; 2], m: f64, sigma: [f64; 2], x0: [f64; 2]) -> ModelSpec {
        ModelSpec {
            a: a.map(TimeFunction::constant),
            b1: TimeFunction::constant(b1),
            c: c.map(TimeFunction::constant),
            m: TimeFunction::constant(m),
            sigma: sigma.map(TimeFunction::constant),
            channel1: JumpChannel::empty(true),
            channel2: JumpChannel::empty(false),
            x0,
            prey_only: false,
        }
    }

    pub fn with_channel1(mut self, channel: JumpChannel) -> ModelSpec {
        self.channel1 = channel;
        self
    }

    pub fn with_channel2(mut self, channel: JumpChannel) -> ModelSpec {
        self.channel2 = channel;
        self
    }

    pub fn with_prey_only(mut self, prey_only: bool) -> ModelSpec {
        self.prey_only = prey_only;
        self
    }

    pub fn channels(&self) -> [&JumpChannel; 2] {
        [&self.channel1, &self.channel2]
    }

    /// Species whose dynamics are simulated.
    pub fn active_species(&self) -> &'static [Species] {
        if self.prey_only {
            &Species::ALL[..1]
        } else {
            &Species::ALL
        }
    }

    /// Every coefficient function, labelled.
    pub fn coefficients(&self) -> Vec<(String, &TimeFunction)> {
        let mut out = vec![
            ("a1".to_string(), &self.a[0]),
            ("a2".to_string(), &self.a[1]),
            ("b1".to_string(), &self.b1),
            ("c1".to_string(), &self.c[0]),
            ("c2".to_string(), &self.c[1]),
            ("m".to_string(), &self.m),
            ("sigma1".to_string(), &self.sigma[0]),
            ("sigma2".to_string(), &self.sigma[1]),
        ];
        for (ci, ch) in self.channels().into_iter().enumerate() {
            for s in Species::ALL {
                for (k, f) in ch.amplitudes(s).iter().enumerate() {
                    out.push((format!("channel{}.species{}.atom{}", ci + 1, s.number(), k), f));
                }
            }
        }
        out
    }

    /// Runs every admissibility clause and collects one finding per violation.
    pub fn validate(&self) -> ValidationReport {
        let mut findings = Vec::new();
        for (name, f) in self.coefficients() {
            if let Err(e) = f.check() {
                findings.push(Finding::new(Clause::WellFormed, format!("{name}: {e}")));
            }
        }
        if !findings.is_empty() {
            return ValidationReport { findings };
        }

        for s in Species::ALL {
            let i = s.index();
            let a = self.a[i].bounds();
            if !(a.inf > 0.0) {
                findings.push(Finding::new(
                    Clause::GrowthRatePositive(s),
                    format!("a{}_inf > 0 violated (a{}_inf = {})", i + 1, i + 1, a.inf),
                ));
            }
        }
        let b1 = self.b1.bounds();
        if !(b1.inf > 0.0) {
            findings.push(Finding::new(
                Clause::CompetitionPositive,
                format!("b1_inf > 0 violated (b1_inf = {})", b1.inf),
            ));
        }
        for s in Species::ALL {
            let i = s.index();
            let c = self.c[i].bounds();
            if !(c.inf > 0.0) {
                findings.push(Finding::new(
                    Clause::InteractionPositive(s),
                    format!("c{}_inf > 0 violated (c{}_inf = {})", i + 1, i + 1, c.inf),
                ));
            }
        }
        let m = self.m.bounds();
        if !(m.inf > 0.0) {
            findings.push(Finding::new(
                Clause::ProtectionPositive,
                format!("m_inf > 0 violated (m_inf = {})", m.inf),
            ));
        }
        for (ci, ch) in self.channels().into_iter().enumerate() {
            let total = ch.measure().total_mass();
            if !total.is_finite() {
                findings.push(Finding::new(
                    Clause::MeasureFinite { channel: ci as u8 + 1 },
                    format!("channel {} total mass is not finite", ci + 1),
                ));
            }
            for s in Species::ALL {
                for (atom, f) in ch.amplitudes(s).iter().enumerate() {
                    let inf = f.bounds().inf;
                    if !(1.0 + inf > 0.0) {
                        findings.push(Finding::new(
                            Clause::JumpAmplitude {
                                channel: ci as u8 + 1,
                                species: s,
                                atom,
                            },
                            format!(
                                "1 + amplitude > 0 violated on channel {} species {} atom {} (inf amplitude = {})",
                                ci + 1,
                                s.number(),
                                atom,
                                inf
                            ),
                        ));
                    }
                }
            }
        }
        for &s in self.active_species() {
            let x = self.x0[s.index()];
            if !(x.is_finite() && x > 0.0) {
                findings.push(Finding::new(
                    Clause::InitialPositive(s),
                    format!("x{}0 > 0 violated (x{}0 = {})", s.number(), s.number(), x),
                ));
            }
        }
        ValidationReport { findings }
    }
}

/// Which admissibility requirement a finding refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    WellFormed,
    GrowthRatePositive(Species),
    CompetitionPositive,
    InteractionPositive(Species),
    ProtectionPositive,
    JumpAmplitude {
        channel: u8,
        species: Species,
        atom: usize,
    },
    MeasureFinite {
        channel: u8,
    },
    InitialPositive(Species),
}

impl Clause {
    /// Clauses the simulator itself depends on; these cannot be bypassed.
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Clause::WellFormed
                | Clause::JumpAmplitude { .. }
                | Clause::MeasureFinite { .. }
                | Clause::InitialPositive(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Finding {
    pub clause: Clause,
    pub message: String,
}

impl Finding {
    fn new(clause: Clause, message: String) -> Finding {
        Finding { clause, message }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has(&self, clause: Clause) -> bool {
        self.findings.iter().any(|f| f.clause == clause)
    }

    pub fn structural_only(&self) -> ValidationReport {
        ValidationReport {
            findings: self
                .findings
                .iter()
                .filter(|f| f.clause.is_structural())
                .cloned()
                .collect(),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed() {
            return f.write_str("all admissibility clauses hold");
        }
        for (i, finding) in self.findings.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            f.write_str(&finding.message)?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// A spec that may be simulated: either fully admissible, or admitted through
/// the degenerate bypass (structural clauses still enforced).
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedModel {
    spec: ModelSpec,
    degenerate: bool,
}

impl ValidatedModel {
    pub fn new(spec: ModelSpec) -> Result<ValidatedModel, ValidationReport> {
        let report = spec.validate();
        if report.passed() {
            Ok(ValidatedModel {
                spec,
                degenerate: false,
            })
        } else {
            Err(report)
        }
    }

    /// Admits specs that break the positivity clauses on a, b1, c or m.
    pub fn allow_degenerate(spec: ModelSpec) -> Result<ValidatedModel, ValidationReport> {
        let report = spec.validate();
        let structural = report.structural_only();
        if structural.passed() {
            Ok(ValidatedModel {
                spec,
                degenerate: !report.passed(),
            })
        } else {
            Err(structural)
        }
    }

    /// True when the spec is outside the admissible set.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn into_spec(self) -> ModelSpec {
        self.spec
    }
}

impl std::ops::Deref for ValidatedModel {
    type Target = ModelSpec;

    fn deref(&self) -> &ModelSpec {
        &self.spec
    }
}
