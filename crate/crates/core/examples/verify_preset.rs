//! Full analyze, simulate and compare cycle for a preset.
//!
//! `cargo run --release --example verify_preset -- [preset] [out-dir]`

use stochastic_predprey::config::presets;
use stochastic_predprey::workflow;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "extinction".into());
    let mut cfg = presets::load(&name)?;
    cfg.output.directory = args.next().unwrap_or_else(|| format!("out/{name}")).into();

    let outcome = workflow::cmd_verify(&cfg)?;
    print!("{}", workflow::describe_verify(&outcome));
    println!("outputs in {}", cfg.output.directory.display());
    std::process::exit(outcome.exit_code());
}
