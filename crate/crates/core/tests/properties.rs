use std::collections::HashSet;

use proptest::prelude::*;
use rand::RngCore;

use stochastic_predprey::config::presets;
use stochastic_predprey::ensemble::{run_ensemble, Band, EnsembleParams};
use stochastic_predprey::sim::{self, Scheme, SimParams};
use stochastic_predprey::{JumpChannel, ModelSpec, Species, TimeFunction};

fn moderate() -> ModelSpec {
    ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.75, 0.875])
        .with_channel1(JumpChannel::single_atom(1.0, 0.1, 0.1, true))
        .with_channel2(JumpChannel::single_atom(0.5, 0.05, 0.05, false))
}

#[test]
fn first_outputs_of_a_million_streams_are_distinct() {
    let n = 1_000_000u64;
    let firsts: HashSet<u64> = (0..n).map(|k| sim::rng_stream_for_path(42, k).next_u64()).collect();
    // Birthday bound for 10^6 draws out of 2^64 is about 3e-8.
    assert_eq!(firsts.len() as u64, n);
}

#[test]
fn mean_error_halves_with_dt() {
    let mut spec = ModelSpec::constant([0.3, 0.3], 0.0, [0.0, 0.0], 1.0, [0.2, 0.2], [1.0, 1.0])
        .with_channel1(JumpChannel::single_atom(1.0, 0.1, 0.1, true))
        .with_channel2(JumpChannel::single_atom(0.5, 0.05, 0.05, false))
        .with_prey_only(true);
    spec.a[0] = TimeFunction::piecewise_linear(vec![(0.0, 0.1), (1.0, 0.5)]).unwrap();
    // ∫a = 0.3 and the channel-2 mean adds 0.5 · 0.05.
    let exact = (0.3f64 + 0.025).exp();
    let errors: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&dt| {
            let sim = SimParams::new(1.0, dt, 2024, Scheme::LogEuler).unwrap();
            let mut params = EnsembleParams::new(1_000_000, sim, 1);
            params.p_list = vec![1.0];
            params.theta_list.clear();
            let s = run_ensemble(&spec, &params).unwrap();
            (s.last().of(Species::Prey).unwrap().moments[0].mean - exact).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((1.5..=3.0).contains(&ratio), "errors {errors:?}");
    }
}

#[test]
fn fresh_seed_with_doubled_paths_agrees() {
    let spec = moderate();
    let sim = SimParams::new(5.0, 0.01, 11, Scheme::LogEuler).unwrap();
    let small = run_ensemble(&spec, &EnsembleParams::new(2000, sim, 5)).unwrap();
    let sim = SimParams { seed: 12, ..sim };
    let large = run_ensemble(&spec, &EnsembleParams::new(4000, sim, 5)).unwrap();
    let mut total = 0;
    let mut outside = 0;
    for (a, b) in small.checkpoints.iter().zip(&large.checkpoints) {
        for s in Species::ALL {
            let (a, b) = (a.of(s).unwrap(), b.of(s).unwrap());
            let pairs = a
                .moments
                .iter()
                .chain(&a.inverse_moments)
                .map(|e| (e.mean, e.stderr))
                .zip(b.moments.iter().chain(&b.inverse_moments).map(|e| (e.mean, e.stderr)))
                .chain([(
                    (a.time_average.mean, a.time_average.stderr),
                    (b.time_average.mean, b.time_average.stderr),
                )]);
            for ((ma, sa), (mb, sb)) in pairs {
                total += 1;
                if (ma - mb).abs() >= 4.0 * sa.hypot(sb) {
                    outside += 1;
                }
            }
        }
    }
    assert!(outside as f64 <= 0.01 * total as f64, "{outside} of {total}");
}

#[test]
fn long_run_log_rates_are_small_on_presets() {
    for name in presets::names() {
        let cfg = presets::load(name).unwrap();
        if cfg.flags.allow_degenerate || cfg.sim.horizon < 200.0 {
            continue;
        }
        let spec = cfg.validated_model().unwrap().into_spec();
        let s = run_ensemble(&spec, &cfg.ensemble_params()).unwrap();
        for st in &s.last().species {
            assert!(st.log_rate_quantiles.q99 <= 0.05, "{name}: {:?}", st.log_rate_quantiles);
        }
    }
}

#[test]
fn verify_agrees_on_every_preset() {
    let tmp = tempfile::tempdir().unwrap();
    for name in presets::names() {
        let mut cfg = presets::load(name).unwrap();
        cfg.output.directory = tmp.path().join(name);
        let outcome = stochastic_predprey::workflow::cmd_verify(&cfg).unwrap();
        assert!(outcome.agreement, "{name}: {outcome:?}");
        assert_eq!(outcome.exit_code(), 0);
        if name == "knife_edge" {
            let prey = outcome.species(Species::Prey).unwrap();
            assert_eq!(prey.predicted, stochastic_predprey::Regime::NonPersistentInMean);
        }
    }
}

#[test]
fn logistic_preset_reports_closed_form_mean() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = presets::load("logistic").unwrap();
    cfg.output.directory = tmp.path().to_path_buf();
    let out = stochastic_predprey::workflow::cmd_simulate(&cfg).unwrap();
    let m = out.summary.checkpoint(1.0).unwrap().of(Species::Prey).unwrap().moments[0].mean;
    assert!((m - 0.731059).abs() <= 5e-4, "{m}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ensemble_moments_and_occupancy_are_ordered(
        seed in any::<u64>(),
        sigma in 0.0..0.6f64,
        gamma in -0.5..0.5f64,
        uppers in proptest::collection::vec(0.05..3.0f64, 2..6),
    ) {
        let spec = ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [sigma, sigma], [0.5, 0.5])
            .with_channel1(JumpChannel::single_atom(1.0, gamma, gamma, true));
        let sim = SimParams::new(2.0, 0.02, seed, Scheme::LogEuler).unwrap();
        let mut uppers = uppers;
        uppers.sort_by(f64::total_cmp);
        let mut previous = [-1.0f64; 2];
        for upper in uppers {
            let mut params = EnsembleParams::new(64, sim, 4);
            params.occupancy = [Some(Band { h: 0.01, upper }), Some(Band { h: 0.01, upper })];
            let s = run_ensemble(&spec, &params).unwrap();
            for c in &s.checkpoints {
                for st in &c.species {
                    let (m1, m2) = (st.moments[0].mean, st.moments[1].mean);
                    prop_assert!(m2 >= m1 * m1 * (1.0 - 1e-12));
                }
            }
            for s_ in Species::ALL {
                let p = s.last().of(s_).unwrap().occupancy.unwrap().below_upper.mean;
                prop_assert!(p >= previous[s_.index()]);
                previous[s_.index()] = p;
            }
        }
    }
}

#[test]
fn every_preset_round_trips_through_emit() {
    for name in presets::names() {
        let cfg = presets::load(name).unwrap();
        let again = stochastic_predprey::config::parse_config(&cfg.emit()).unwrap();
        assert_eq!(cfg, again, "{name}");
    }
}
