//! Minimizes the action of a closed loop in a fixed homology class and
//! reports the stopping data.

use mather::engine::{discrete_action, minimize_loop, Loop, MinimizeOptions, TimeStepping};
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_channel_model(&ChannelModelSpec::lowest_energy(2))?;
    let c = [0.5, 0.0];
    let mut start = Loop::straight(&[0.0, 0.05], &[1, 0], 2.0, 64);
    for (idx, q) in start.points_mut().iter_mut().enumerate() {
        *q += 0.02 * (idx as f64).sin();
    }
    println!("start: action {:.6}", discrete_action(&start, &model, &c));

    for stepping in [TimeStepping::EnergyBalanced, TimeStepping::Uniform] {
        let opts = MinimizeOptions {
            stepping,
            ..MinimizeOptions::default()
        };
        let rep = minimize_loop(start.clone(), &model, &c, &opts)?;
        println!(
            "{stepping:?}: action {:.8} (mean {:.8}), |g| {:.1e} after {} iterations, {:?}, energy drift {:.1e}, {} re-spacings",
            rep.action,
            rep.average_action,
            rep.gradient_norm,
            rep.iterations,
            rep.stop,
            rep.energy_drift,
            rep.respacings
        );
        assert_eq!(rep.final_loop.homology(), start.homology());
    }

    // Loops serialize to JSON, so minimizers can be stored and reloaded.
    let rep = minimize_loop(start, &model, &c, &MinimizeOptions::default())?;
    let text = serde_json::to_string(&rep.final_loop)?;
    let back: Loop = serde_json::from_str(&text)?;
    println!("JSON round trip exact: {}", back == rep.final_loop);
    Ok(())
}
