//! Ensemble moments, time averages and persistence verdicts for a preset.
//!
//! `cargo run --release --example ensemble_moments -- [preset]`

use stochastic_predprey::config::presets;
use stochastic_predprey::ensemble::{persistence_in_mean, run_ensemble};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "predator_weak_persistence".into());
    let cfg = presets::load(&name)?;
    let spec = cfg.validated_model()?;
    let summary = run_ensemble(&spec, &cfg.ensemble_params())?;

    println!("{:>8} {:>3} {:>10} {:>10} {:>10} {:>8}", "t", "sp", "E[x]", "E[x^2]", "avg", "extinct");
    for c in &summary.checkpoints {
        for st in &c.species {
            println!(
                "{:8.2} {:>3} {:10.5} {:10.5} {:10.5} {:8.3}",
                c.t, st.species, st.moments[0].mean, st.moments[1].mean, st.time_average.mean, st.extinction_fraction
            );
        }
    }
    for &s in spec.active_species() {
        match persistence_in_mean(&summary, s) {
            Ok(r) => println!("{s}: {:?} (slope {:.2e})", r.verdict, r.slope),
            Err(e) => println!("{s}: {e}"),
        }
    }
    Ok(())
}
