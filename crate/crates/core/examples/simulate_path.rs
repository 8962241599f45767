//! One stored path of a preset, optionally written as CSV.
//!
//! `cargo run --example simulate_path -- [preset] [out.csv]`

use stochastic_predprey::config::presets;
use stochastic_predprey::sim::simulate_path;
use stochastic_predprey::Species;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "predator_permanence".into());
    let cfg = presets::load(&name)?;
    let spec = cfg.validated_model()?;
    let path = simulate_path(&spec, &cfg.sim, 0)?;

    println!("{name}: {} grid points, {} jumps", path.grid.len(), path.jumps.len());
    let step = (path.grid.len() / 10).max(1);
    for k in (0..path.grid.len()).step_by(step) {
        println!("t = {:7.2}  x1 = {:.5}  x2 = {:.5}", path.grid[k], path.x[k][0], path.x[k][1]);
    }
    println!("min x1 = {:.3e}", path.min(Species::Prey));
    if let Some(out) = args.next() {
        path.write_csv(out.as_ref())?;
        println!("wrote {out}");
    }
    Ok(())
}
