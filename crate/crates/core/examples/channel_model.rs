//! Builds the lowest-energy channel model on T² and inspects it.

use mather::channel::{barrier_check, ChannelKind};
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ChannelModelSpec::lowest_energy(2).resolved();
    let model = build_channel_model(&spec)?;
    println!("{}", serde_json::to_string_pretty(&spec)?);

    let check = barrier_check(&spec, 1e-3);
    println!(
        "barrier: {:.3} > {:.3} is {}",
        check.lhs, check.rhs, check.satisfied
    );

    let info = model.channels().expect("channel model");
    for kind in [ChannelKind::A, ChannelKind::B(1), ChannelKind::C(1)] {
        let Some(y) = info.layout.center(kind) else {
            continue;
        };
        let x = [0.0, y];
        println!(
            "{:>3} at x_2 = {y:.4}: U = {:8.3}, metric = {:?}",
            kind.to_string(),
            model.potential().value(&x),
            model.metric_coefficients(&x)
        );
    }
    let (at, value) = model.rest_minimum();
    println!("fixed point {at:?} with L(x, 0) = {value}");

    let weak = ChannelModelSpec::lowest_energy(2).with_barrier(1.0);
    println!(
        "K = 1 satisfies the barrier inequality: {}",
        barrier_check(&weak, 1e-3).satisfied
    );
    Ok(())
}
