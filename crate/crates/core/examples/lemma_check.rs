//! α equals the largest of the channel-restricted α values.

use mather::analysis::{verify_max_formula, Lattice};
use mather::engine::{AlphaSolver, HomologyBudget, SolverOptions};
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_channel_model(&ChannelModelSpec::lowest_energy(2))?;
    let solver = AlphaSolver::new(
        &model,
        HomologyBudget::for_model(&model),
        SolverOptions::default(),
    )?;
    let report = verify_max_formula(&solver, &Lattice::slice(2, 0, -2.0, 2.0, 17)?)?;
    for p in &report.points {
        let parts: Vec<String> = p
            .restricted
            .iter()
            .map(|(label, v)| format!("{label} {:.4}", v.unwrap_or(f64::NAN)))
            .collect();
        println!(
            "c = {:+.2?}: α {:.4} from {:<3} | {}",
            p.c,
            p.direct.unwrap_or(f64::NAN),
            p.winner_channel.as_deref().unwrap_or("-"),
            parts.join(", ")
        );
    }
    println!(
        "restricted values from {:?}; max error {:.2e}, {} holes, winners in A or B: {}",
        report.source, report.max_error, report.holes, report.winners_in_a_or_b
    );
    Ok(())
}
