//! Scenario files: parse, inspect and re-emit.

use stochastic_predprey::config::parse_config;
use stochastic_predprey::regime::p_bar_star;
use stochastic_predprey::Species;

const TEXT: &str = "\
schema_version = 1
model.a1 = sin(0.8, 0.3, 0.6283185307179586, 0)
model.a2 = pwl(0:0.4, 50:0.6)
model.b1 = 1
model.c1 = 0.3
model.c2 = 1
model.m = 1
model.sigma1 = 0.1
model.sigma2 = 0.1
model.x0 = 0.5, 0.3
model.channel1.atoms = 0:0.5, 1:0.25
model.channel1.gamma1 = 0.1; -0.2
model.channel1.gamma2 = 0.1; 0
sim.horizon = 100
sim.dt = 0.01
sim.seed = 99
ensemble.num_paths = 200
ensemble.checkpoints = linspace(10, 100, 10)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = parse_config(TEXT)?;
    let spec = cfg.validated_model()?;
    for s in Species::ALL {
        let avg = p_bar_star(&spec, s, cfg.analysis.horizon, 4)?;
        println!("{s}: long-run mean of p = {:.5}, trace {:?}", avg.estimate, avg.trace);
    }
    println!("--- canonical form ---\n{}", cfg.emit());

    let broken = TEXT.replace("model.m = 1", "model.m = 0");
    match parse_config(&broken).and_then(|c| c.validated_model().map(|_| ())) {
        Ok(()) => println!("unexpectedly admissible"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}
