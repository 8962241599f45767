//! Growth functionals and the predicted long-time regime of a hand-built model.

use stochastic_predprey::regime::{self, AnalysisParams};
use stochastic_predprey::{classify, JumpChannel, ModelSpec, Species, TimeFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut spec = ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.75, 0.875])
        .with_channel1(JumpChannel::single_atom(1.0, 0.1, 0.1, true))
        .with_channel2(JumpChannel::single_atom(0.5, 0.05, 0.05, false));
    // Seasonal prey growth.
    spec.a[0] = TimeFunction::sinusoid(1.0, 0.3, std::f64::consts::TAU / 5.0, 0.0)?;

    for s in Species::ALL {
        let profile = regime::FunctionalProfile::new(&spec, s);
        println!(
            "{s}: alpha(0) = {:.6}  beta(0) = {:.6}  p(0) = {:.6}  p_inf = {:.6}",
            profile.alpha(0.0),
            profile.beta(0.0),
            profile.p(0.0),
            regime::p_inf(&spec, s).value
        );
    }

    let report = classify(&spec, &AnalysisParams::default())?;
    for s in Species::ALL {
        let r = report.species(s);
        println!("{s}: {:?} (also {:?}) via {:?}", r.classification, r.also_implies, r.rule_citations);
    }
    println!("ultimately bounded: {}", report.ultimately_bounded);
    Ok(())
}
