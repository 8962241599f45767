//! Path simulation: exact compound-Poisson jump skeletons and two integrators.
//!
//! The default [`Scheme::LogEuler`] integrates `ξ_i = ln x_i` with explicit
//! Euler–Maruyama between stops and applies each jump exactly as
//! `ξ_i += ln(1 + amplitude)`. Between jumps the log-drift is
//!
//! ```text
//! a_i - b_i x_i - c_i x_2 / (m + x_1) - sigma_i^2 / 2 - Σ_{Π1} mass * gamma_i
//! ```
//!
//! where the last sum is the compensator of the centred channel; channel 2
//! has none. Densities are `exp(ξ_i)` and so stay positive by construction.
//!
//! [`Scheme::DirectEuler`] steps `x_i` itself and exists for cross-checks; it can
//! leave the positive quadrant, which is reported as an error.
//!
//! The stop grid of a path is the union of the uniform grid `k * dt` (ending
//! exactly at `T`), all jump times and any caller-supplied observation times.
//! Coefficients are frozen at the left end of every substep.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{JumpChannel, ModelSpec, Species};

/// Largest step accepted by [`SimParams`].
pub const MAX_DT: f64 = 0.1;
/// `|ln x|` beyond which a path is aborted instead of overflowing.
pub const LOG_STATE_LIMIT: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    LogEuler,
    DirectEuler,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::LogEuler => "log_euler",
            Scheme::DirectEuler => "direct_euler",
        }
    }

    pub fn from_name(name: &str) -> Option<Scheme> {
        match name {
            "log_euler" => Some(Scheme::LogEuler),
            "direct_euler" => Some(Scheme::DirectEuler),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error("{species} left the positive half-line at t = {time} (x = {value})")]
    NonPositiveExcursion { time: f64, species: Species, value: f64 },
    #[error("{species} overflowed at t = {time} (ln x = {log_value})")]
    Overflow { time: f64, species: Species, log_value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    pub scheme: Scheme,
}

impl SimParams {
    pub fn new(horizon: f64, dt: f64, seed: u64, scheme: Scheme) -> Result<SimParams, SimError> {
        let p = SimParams {
            horizon,
            dt,
            seed,
            scheme,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), SimError> {
        if !(self.horizon.is_finite() && self.dt > 0.0 && self.dt <= self.horizon) {
            return Err(SimError::InvalidParams(format!(
                "need 0 < dt <= T, got dt = {}, T = {}",
                self.dt, self.horizon
            )));
        }
        if self.dt > MAX_DT {
            return Err(SimError::InvalidParams(format!(
                "dt = {} exceeds the cap {MAX_DT}",
                self.dt
            )));
        }
        Ok(())
    }

    pub fn with_scheme(self, scheme: Scheme) -> SimParams {
        SimParams { scheme, ..self }
    }
}

/// Random stream of path `path_index` under `master_seed`.
///
/// The ChaCha8 key comes from `master_seed` (expanded by `seed_from_u64`) and
/// the path index selects the 64-bit stream, so distinct indices can never
/// share a keystream. Output is identical on every platform.
pub fn rng_stream_for_path(master_seed: u64, path_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(path_index);
    rng
}

/// One jump of either channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JumpEvent {
    pub time: f64,
    /// 1 (centred) or 2 (non-centred).
    pub channel: u8,
    pub atom_index: usize,
    /// Amplitudes at the event time; species `i` is multiplied by `1 + relative_sizes[i]`.
    pub relative_sizes: [f64; 2],
}

/// Samples the events of one channel on `[0, horizon]`.
///
/// Interarrival times are exponential with rate equal to the total mass and
/// each event picks atom `k` with probability `mass_k / total_mass`.
pub fn sample_jump_skeleton<R: Rng + ?Sized>(
    channel: &JumpChannel,
    channel_number: u8,
    horizon: f64,
    rng: &mut R,
) -> Vec<JumpEvent> {
    let atoms = channel.measure().atoms();
    let rate = channel.measure().total_mass();
    let mut events = Vec::new();
    if atoms.is_empty() || rate <= 0.0 || horizon <= 0.0 {
        return events;
    }
    let mut t = 0.0;
    loop {
        let gap: f64 = rng.sample(Exp1);
        t += gap / rate;
        if t > horizon {
            return events;
        }
        let u: f64 = rng.random::<f64>() * rate;
        let mut acc = 0.0;
        let mut atom_index = atoms.len() - 1;
        for (k, a) in atoms.iter().enumerate() {
            acc += a.mass;
            if u < acc {
                atom_index = k;
                break;
            }
        }
        events.push(JumpEvent {
            time: t,
            channel: channel_number,
            atom_index,
            relative_sizes: [
                channel.amplitude(Species::Prey, atom_index).eval(t),
                channel.amplitude(Species::Predator, atom_index).eval(t),
            ],
        });
    }
}

/// Both skeletons of a path merged in time order; channel 1 is drawn first.
pub fn sample_events<R: Rng + ?Sized>(spec: &ModelSpec, horizon: f64, rng: &mut R) -> Vec<JumpEvent> {
    let mut events = sample_jump_skeleton(&spec.channel1, 1, horizon, rng);
    events.extend(sample_jump_skeleton(&spec.channel2, 2, horizon, rng));
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    events
}

/// Receives the state at every stop of the grid.
pub trait PathObserver {
    /// Called once with the initial state at `t = 0`.
    fn start(&mut self, x0: [f64; 2]);
    /// Called at each later stop with the states just before and just after it;
    /// they differ only when `event` is set.
    fn stop(&mut self, t: f64, pre: [f64; 2], post: [f64; 2], event: Option<&JumpEvent>);
}

struct Stop {
    time: f64,
    event: Option<usize>,
}

fn stop_grid(horizon: f64, dt: f64, extra: &[f64], events: &[JumpEvent]) -> Vec<Stop> {
    let tol = 1e-9 * dt;
    let n = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let mut plain: Vec<f64> = (1..n).map(|k| k as f64 * dt).collect();
    plain.push(horizon);
    plain.extend(extra.iter().copied().filter(|&t| t > tol && t <= horizon));
    plain.sort_by(f64::total_cmp);
    plain.dedup_by(|b, a| *b - *a <= tol);

    let mut stops = Vec::with_capacity(plain.len() + events.len());
    let mut e = 0;
    for &t in &plain {
        while e < events.len() && events[e].time < t - tol {
            stops.push(Stop {
                time: events[e].time,
                event: Some(e),
            });
            e += 1;
        }
        if e < events.len() && (events[e].time - t).abs() <= tol {
            // a plain stop that lands on a jump is served by the jump itself
            stops.push(Stop {
                time: events[e].time,
                event: Some(e),
            });
            e += 1;
            continue;
        }
        stops.push(Stop { time: t, event: None });
    }
    stops
}

#[derive(Clone, Copy)]
struct Frozen {
    a: [f64; 2],
    b1: f64,
    c: [f64; 2],
    m: f64,
    sigma: [f64; 2],
    compensator: [f64; 2],
}

impl Frozen {
    fn at(spec: &ModelSpec, t: f64) -> Frozen {
        let comp = |s: Species| -> f64 {
            spec.channel1
                .weighted(s)
                .map(|(mass, g)| mass * g.eval(t))
                .sum()
        };
        Frozen {
            a: [spec.a[0].eval(t), spec.a[1].eval(t)],
            b1: spec.b1.eval(t),
            c: [spec.c[0].eval(t), spec.c[1].eval(t)],
            m: spec.m.eval(t),
            sigma: [spec.sigma[0].eval(t), spec.sigma[1].eval(t)],
            compensator: [comp(Species::Prey), comp(Species::Predator)],
        }
    }

    /// Per-capita drift at `x`, including the channel-1 compensator.
    fn growth(&self, x: [f64; 2]) -> [f64; 2] {
        let shared = x[1] / (self.m + x[0]);
        [
            self.a[0] - self.b1 * x[0] - self.c[0] * shared - self.compensator[0],
            self.a[1] - self.c[1] * shared - self.compensator[1],
        ]
    }
}

/// Runs one path through `observer`.
///
/// `extra_stops` are observation times added to the grid (values outside
/// `(0, T]` are ignored). Draw order: channel-1 skeleton, channel-2 skeleton,
/// then two standard normals per substep, so both schemes see the same noise.
pub fn integrate<R: Rng + ?Sized, O: PathObserver + ?Sized>(
    spec: &ModelSpec,
    params: &SimParams,
    extra_stops: &[f64],
    rng: &mut R,
    observer: &mut O,
) -> Result<Vec<JumpEvent>, SimError> {
    params.check()?;
    let events = sample_events(spec, params.horizon, rng);
    let stops = stop_grid(params.horizon, params.dt, extra_stops, &events);
    let active = if spec.prey_only { 1 } else { 2 };

    let mut x = spec.x0;
    if spec.prey_only {
        x[1] = 0.0;
    }
    let mut xi = [x[0].ln(), if active == 2 { x[1].ln() } else { 0.0 }];
    observer.start(x);

    let mut t = 0.0;
    for stop in &stops {
        let h = stop.time - t;
        if h > 0.0 {
            let f = Frozen::at(spec, t);
            let z: [f64; 2] = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
            let g = f.growth(x);
            let sq = h.sqrt();
            for i in 0..active {
                match params.scheme {
                    Scheme::LogEuler => {
                        let s = f.sigma[i];
                        xi[i] += (g[i] - 0.5 * s * s) * h + s * sq * z[i];
                    }
                    Scheme::DirectEuler => {
                        x[i] += x[i] * (g[i] * h + f.sigma[i] * sq * z[i]);
                    }
                }
            }
            settle(params.scheme, &mut x, &mut xi, active, stop.time)?;
        }
        let pre = x;
        let event = stop.event.map(|k| &events[k]);
        if let Some(ev) = event {
            for i in 0..active {
                match params.scheme {
                    Scheme::LogEuler => xi[i] += ev.relative_sizes[i].ln_1p(),
                    Scheme::DirectEuler => x[i] *= 1.0 + ev.relative_sizes[i],
                }
            }
            settle(params.scheme, &mut x, &mut xi, active, stop.time)?;
        }
        observer.stop(stop.time, pre, x, event);
        t = stop.time;
    }
    Ok(events)
}

/// Syncs `x` and `ξ` after an update and enforces the state guards.
fn settle(scheme: Scheme, x: &mut [f64; 2], xi: &mut [f64; 2], active: usize, t: f64) -> Result<(), SimError> {
    for i in 0..active {
        let species = Species::ALL[i];
        match scheme {
            Scheme::LogEuler => {
                if !(xi[i].abs() <= LOG_STATE_LIMIT) {
                    return Err(SimError::Overflow {
                        time: t,
                        species,
                        log_value: xi[i],
                    });
                }
                x[i] = xi[i].exp();
            }
            Scheme::DirectEuler => {
                if !(x[i] > 0.0) {
                    return Err(SimError::NonPositiveExcursion {
                        time: t,
                        species,
                        value: x[i],
                    });
                }
                xi[i] = x[i].ln();
                if xi[i] > LOG_STATE_LIMIT {
                    return Err(SimError::Overflow {
                        time: t,
                        species,
                        log_value: xi[i],
                    });
                }
            }
        }
    }
    Ok(())
}

/// A fully stored path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    /// `0 = t_0 < … < t_N = T`.
    pub grid: Vec<f64>,
    /// Post-jump densities at each grid point.
    pub x: Vec<[f64; 2]>,
    /// Index into `jumps` for grid points that are jump times.
    pub jump_at: Vec<Option<usize>>,
    pub jumps: Vec<JumpEvent>,
    pub seed: u64,
    pub path_index: u64,
    pub scheme: Scheme,
}

#[derive(Default)]
struct Recorder {
    grid: Vec<f64>,
    x: Vec<[f64; 2]>,
    jump_at: Vec<Option<usize>>,
    seen: usize,
}

impl PathObserver for Recorder {
    fn start(&mut self, x0: [f64; 2]) {
        self.grid.push(0.0);
        self.x.push(x0);
        self.jump_at.push(None);
    }

    fn stop(&mut self, t: f64, _pre: [f64; 2], post: [f64; 2], event: Option<&JumpEvent>) {
        self.grid.push(t);
        self.x.push(post);
        self.jump_at.push(event.map(|_| {
            self.seen += 1;
            self.seen - 1
        }));
    }
}

impl PathRecord {
    /// State just before grid point `k`.
    pub fn pre_jump(&self, k: usize) -> [f64; 2] {
        match self.jump_at[k] {
            None => self.x[k],
            Some(j) => {
                let r = self.jumps[j].relative_sizes;
                [self.x[k][0] / (1.0 + r[0]), self.x[k][1] / (1.0 + r[1])]
            }
        }
    }

    /// Smallest density of `species` along the path.
    pub fn min(&self, species: Species) -> f64 {
        self.x
            .iter()
            .map(|x| x[species.index()])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn final_state(&self) -> [f64; 2] {
        *self.x.last().expect("grid always holds t = 0")
    }

    /// Density of `species` at the grid point closest to `t`.
    pub fn at(&self, t: f64, species: Species) -> f64 {
        let k = self.grid.partition_point(|&g| g < t).min(self.grid.len() - 1);
        let k = if k > 0 && (self.grid[k] - t).abs() > (t - self.grid[k - 1]).abs() {
            k - 1
        } else {
            k
        };
        self.x[k][species.index()]
    }

    /// CSV with columns `t,x1,x2,is_jump,channel,atom`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.grid.len() * 80);
        out.push_str("t,x1,x2,is_jump,channel,atom\n");
        for (k, &t) in self.grid.iter().enumerate() {
            let [x1, x2] = self.x[k];
            let _ = write!(out, "{t:.16e},{x1:.16e},{x2:.16e},");
            match self.jump_at[k] {
                Some(j) => {
                    let e = &self.jumps[j];
                    let _ = writeln!(out, "1,{},{}", e.channel, e.atom_index);
                }
                None => out.push_str("0,,\n"),
            }
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_csv())
    }
}

/// Simulates path `path_index` of the ensemble seeded by `params.seed`.
pub fn simulate_path(spec: &ModelSpec, params: &SimParams, path_index: u64) -> Result<PathRecord, SimError> {
    let mut rng = rng_stream_for_path(params.seed, path_index);
    let mut rec = Recorder::default();
    let jumps = integrate(spec, params, &[], &mut rng, &mut rec)?;
    Ok(PathRecord {
        grid: rec.grid,
        x: rec.x,
        jump_at: rec.jump_at,
        jumps,
        seed: params.seed,
        path_index,
        scheme: params.scheme,
    })
}

/// Path 0 of `params.seed` with the log-Euler scheme.
pub fn simulate_path_log_euler(spec: &ModelSpec, params: &SimParams) -> Result<PathRecord, SimError> {
    simulate_path(spec, &params.with_scheme(Scheme::LogEuler), 0)
}

/// Path 0 of `params.seed` with the direct scheme.
pub fn simulate_path_direct(spec: &ModelSpec, params: &SimParams) -> Result<PathRecord, SimError> {
    simulate_path(spec, &params.with_scheme(Scheme::DirectEuler), 0)
}

/// Classical RK4 for the noise-free model, used as a reference solution.
pub fn rk4_deterministic(spec: &ModelSpec, horizon: f64, dt: f64) -> Vec<(f64, [f64; 2])> {
    let rhs = |t: f64, x: [f64; 2]| -> [f64; 2] {
        let f = Frozen::at(spec, t);
        let g = f.growth(x);
        let g = [g[0], if spec.prey_only { 0.0 } else { g[1] }];
        [x[0] * g[0], x[1] * g[1]]
    };
    let n = (horizon / dt).round() as usize;
    let mut x = spec.x0;
    if spec.prey_only {
        x[1] = 0.0;
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push((0.0, x));
    for k in 0..n {
        let t = k as f64 * dt;
        let add = |x: [f64; 2], k: [f64; 2], s: f64| [x[0] + s * k[0], x[1] + s * k[1]];
        let k1 = rhs(t, x);
        let k2 = rhs(t + 0.5 * dt, add(x, k1, 0.5 * dt));
        let k3 = rhs(t + 0.5 * dt, add(x, k2, 0.5 * dt));
        let k4 = rhs(t + dt, add(x, k3, dt));
        for i in 0..2 {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(((k + 1) as f64 * dt, x));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, FiniteJumpMeasure, TimeFunction};
    use proptest::prelude::*;
    use rand::RngCore;

    fn logistic() -> ModelSpec {
        ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5]).with_prey_only(true)
    }

    fn noisy() -> ModelSpec {
        ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.3, 0.3], [0.5, 0.5])
            .with_channel1(JumpChannel::single_atom(1.0, 0.4, -0.3, true))
            .with_channel2(JumpChannel::single_atom(0.5, -0.2, 0.1, false))
    }

    #[test]
    fn params_checked() {
        assert!(SimParams::new(1.0, 0.0, 1, Scheme::LogEuler).is_err());
        assert!(SimParams::new(1.0, 2.0, 1, Scheme::LogEuler).is_err());
        assert!(SimParams::new(10.0, 0.2, 1, Scheme::LogEuler).is_err());
        assert!(SimParams::new(0.05, 0.05, 1, Scheme::LogEuler).is_ok());
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = rng_stream_for_path(42, 0);
        let mut b = rng_stream_for_path(42, 0);
        let mut c = rng_stream_for_path(42, 1);
        let xs: Vec<u64> = (0..4).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..4).map(|_| b.next_u64()).collect();
        let zs: Vec<u64> = (0..4).map(|_| c.next_u64()).collect();
        assert_eq!(xs, ys);
        assert!(xs.iter().zip(&zs).all(|(x, z)| x != z));
    }

    #[test]
    fn empty_channel_has_no_events() {
        let mut rng = rng_stream_for_path(1, 0);
        let ev = sample_jump_skeleton(&JumpChannel::empty(true), 1, 100.0, &mut rng);
        assert!(ev.is_empty());
    }

    #[test]
    fn grid_contains_jumps_and_ends_at_horizon() {
        let params = SimParams::new(3.0, 0.1, 7, Scheme::LogEuler).unwrap();
        let path = simulate_path(&noisy(), &params, 0).unwrap();
        assert_eq!(path.grid[0], 0.0);
        assert_eq!(*path.grid.last().unwrap(), 3.0);
        assert!(path.grid.windows(2).all(|w| w[0] < w[1]));
        assert!(!path.jumps.is_empty());
        for (j, e) in path.jumps.iter().enumerate() {
            let k = path.grid.iter().position(|&t| t == e.time).unwrap();
            assert_eq!(path.jump_at[k], Some(j));
            let pre = path.pre_jump(k);
            for i in 0..2 {
                let want = pre[i] * (1.0 + e.relative_sizes[i]);
                assert!((path.x[k][i] - want).abs() <= 1e-12 * want);
            }
        }
        // 30 uniform steps plus one stop per jump
        assert_eq!(path.grid.len(), 31 + path.jumps.len());
    }

    #[test]
    fn uneven_horizon_keeps_last_short_step() {
        let params = SimParams::new(0.25, 0.1, 7, Scheme::LogEuler).unwrap();
        let path = simulate_path(&logistic(), &params, 0).unwrap();
        assert_eq!(path.grid.len(), 4);
        assert_eq!(path.grid[3], 0.25);
    }

    #[test]
    fn same_seed_same_path() {
        let params = SimParams::new(2.0, 0.01, 42, Scheme::LogEuler).unwrap();
        let a = simulate_path(&noisy(), &params, 0).unwrap();
        let b = simulate_path(&noisy(), &params, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = simulate_path(&noisy(), &params, 1).unwrap();
        assert_ne!(a.x, c.x);
    }

    #[test]
    fn logistic_matches_closed_form() {
        let params = SimParams::new(1.0, 1e-4, 0, Scheme::LogEuler).unwrap();
        let path = simulate_path_log_euler(&logistic(), &params).unwrap();
        let e = std::f64::consts::E;
        let exact = 0.5 * e / (1.0 + 0.5 * (e - 1.0));
        assert!((path.final_state()[0] - exact).abs() < 5e-4);
        assert_eq!(path.final_state()[1], 0.0);

        let rk = rk4_deterministic(&logistic(), 1.0, 1e-3);
        assert!((rk.last().unwrap().1[0] - exact).abs() < 1e-12);
    }

    #[test]
    fn schemes_agree_without_noise() {
        let spec = ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.0, 0.0], [0.5, 0.5]);
        let dt = 1e-3;
        let params = SimParams::new(1.0, dt, 3, Scheme::LogEuler).unwrap();
        let a = simulate_path_log_euler(&spec, &params).unwrap();
        let b = simulate_path_direct(&spec, &params).unwrap();
        let rk = rk4_deterministic(&spec, 1.0, dt);
        for k in 0..a.grid.len() {
            for i in 0..2 {
                assert!((a.x[k][i] - b.x[k][i]).abs() < 10.0 * dt);
                assert!((a.x[k][i] - rk[k].1[i]).abs() < 10.0 * dt);
            }
        }
    }

    #[test]
    fn direct_scheme_can_go_negative() {
        let spec = ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [5.0, 5.0], [0.5, 0.5]);
        let params = SimParams::new(1.0, 0.1, 0, Scheme::DirectEuler).unwrap();
        let failures = (0..200)
            .filter(|&k| {
                matches!(
                    simulate_path(&spec, &params, k),
                    Err(SimError::NonPositiveExcursion { .. })
                )
            })
            .count();
        assert!(failures > 20, "{failures}");
        // the log scheme never does
        let log = params.with_scheme(Scheme::LogEuler);
        assert!((0..200).all(|k| simulate_path(&spec, &log, k).is_ok()));
    }

    #[test]
    fn overflow_is_reported() {
        let spec = ModelSpec::constant([100.0, 0.5], 0.0, [0.5, 1.0], 1.0, [0.0, 0.0], [1.0, 0.5]).with_prey_only(true);
        let params = SimParams::new(10.0, 0.1, 0, Scheme::LogEuler).unwrap();
        assert!(matches!(
            simulate_path(&spec, &params, 0),
            Err(SimError::Overflow { species: Species::Prey, .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let params = SimParams::new(0.3, 0.1, 5, Scheme::LogEuler).unwrap();
        let path = simulate_path(&noisy(), &params, 0).unwrap();
        let csv = path.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1,x2,is_jump,channel,atom"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("0.0000000000000000e0,5.0000000000000000e-1,"));
        assert!(first.ends_with(",0,,"));
        assert_eq!(csv.lines().count(), path.grid.len() + 1);
        for line in csv.lines().skip(1) {
            let v: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            assert!(v > 0.0);
        }
    }

    #[test]
    fn atom_frequencies() {
        let measure = FiniteJumpMeasure::new(vec![
            Atom { mark: 0.0, mass: 1.0 },
            Atom { mark: 1.0, mass: 3.0 },
        ])
        .unwrap();
        let z = || vec![TimeFunction::zero(), TimeFunction::zero()];
        let ch = JumpChannel::new(measure, z(), z(), true).unwrap();
        let mut rng = rng_stream_for_path(9, 0);
        let mut n = 0usize;
        let mut second = 0usize;
        while n < 100_000 {
            for e in sample_jump_skeleton(&ch, 1, 100.0, &mut rng) {
                n += 1;
                second += e.atom_index;
            }
        }
        let f = second as f64 / n as f64;
        let se = (0.75 * 0.25 / n as f64).sqrt();
        assert!((f - 0.75).abs() < 3.0 * se, "{f}");
    }

    #[test]
    fn relative_sizes_follow_time() {
        let measure = FiniteJumpMeasure::new(vec![Atom { mark: 0.0, mass: 5.0 }]).unwrap();
        let ch = JumpChannel::new(
            measure,
            vec![TimeFunction::sinusoid(0.0, 0.5, 1.0, 0.0).unwrap()],
            vec![TimeFunction::constant(0.2)],
            false,
        )
        .unwrap();
        let mut rng = rng_stream_for_path(1, 0);
        for e in sample_jump_skeleton(&ch, 2, 20.0, &mut rng) {
            assert_eq!(e.relative_sizes, [0.5 * e.time.sin(), 0.2]);
            assert_eq!(e.channel, 2);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn log_scheme_stays_positive(
            seed in any::<u64>(),
            sigma in 0.0..2.0f64,
            gamma in -0.95..3.0f64,
            delta in -0.95..3.0f64,
            mass in 0.0..5.0f64,
        ) {
            let spec = ModelSpec::constant([0.5, 0.3], 1.0, [0.5, 1.0], 1.0, [sigma, sigma], [0.5, 0.5])
                .with_channel1(JumpChannel::single_atom(mass, gamma, -gamma.min(0.9), true))
                .with_channel2(JumpChannel::single_atom(mass, delta, delta, false));
            let params = SimParams::new(5.0, 0.05, seed, Scheme::LogEuler).unwrap();
            let path = simulate_path(&spec, &params, 0).unwrap();
            prop_assert!(path.x.iter().all(|x| x[0] > 0.0 && x[1] > 0.0));
        }

        #[test]
        fn skeleton_times_sorted_inside_horizon(seed in any::<u64>(), rate in 0.01..20.0f64, horizon in 0.1..50.0f64) {
            let ch = JumpChannel::single_atom(rate, 0.1, 0.1, true);
            let mut rng = rng_stream_for_path(seed, 0);
            let ev = sample_jump_skeleton(&ch, 1, horizon, &mut rng);
            prop_assert!(ev.windows(2).all(|w| w[0].time < w[1].time));
            prop_assert!(ev.iter().all(|e| e.time > 0.0 && e.time <= horizon));
        }
    }
}
