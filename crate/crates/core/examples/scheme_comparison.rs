//! Log-coordinate and direct Euler schemes driven by the same noise.

use stochastic_predprey::ensemble::{run_ensemble, EnsembleParams};
use stochastic_predprey::sim::{simulate_path_direct, simulate_path_log_euler, Scheme, SimParams};
use stochastic_predprey::{JumpChannel, ModelSpec, Species};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.75, 0.875])
        .with_channel1(JumpChannel::single_atom(1.0, 0.1, 0.1, true))
        .with_channel2(JumpChannel::single_atom(0.5, 0.05, 0.05, false));
    let sim = SimParams::new(1.0, 1e-3, 3, Scheme::LogEuler)?;

    let log = simulate_path_log_euler(&spec, &sim)?;
    let direct = simulate_path_direct(&spec, &sim)?;
    println!("single path at t = 1: log {:?}  direct {:?}", log.final_state(), direct.final_state());

    let mut params = EnsembleParams::new(20_000, sim, 1);
    params.p_list = vec![1.0];
    for scheme in [Scheme::LogEuler, Scheme::DirectEuler] {
        params.sim.scheme = scheme;
        let s = run_ensemble(&spec, &params)?;
        for sp in Species::ALL {
            let m = &s.last().of(sp).unwrap().moments[0];
            println!("{:12} E[x{}(1)] = {:.5} ± {:.5}", scheme.name(), sp.number(), m.mean, m.stderr);
        }
    }
    Ok(())
}
