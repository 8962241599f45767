//! Poisson jump times of both channels for one path.

use stochastic_predprey::sim::{rng_stream_for_path, sample_events};
use stochastic_predprey::{JumpChannel, ModelSpec};

fn main() {
    let spec = ModelSpec::constant([1.0, 0.5], 1.0, [0.5, 1.0], 1.0, [0.2, 0.2], [0.5, 0.5])
        .with_channel1(JumpChannel::single_atom(2.0, 0.1, -0.05, true))
        .with_channel2(JumpChannel::single_atom(0.5, -0.3, 0.2, false));
    let mut rng = rng_stream_for_path(7, 0);
    let events = sample_events(&spec, 10.0, &mut rng);
    println!("{} events on [0, 10]", events.len());
    for e in &events {
        println!(
            "t = {:8.4}  channel {}  x1 *= {:.3}  x2 *= {:.3}",
            e.time,
            e.channel,
            1.0 + e.relative_sizes[0],
            1.0 + e.relative_sizes[1]
        );
    }
}
