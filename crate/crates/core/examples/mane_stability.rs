//! Adds small random trigonometric potentials and checks that the corner of
//! the flat survives nearby.

use mather::analysis::{mane_stability_sweep, StabilityOptions};
use mather::engine::{BudgetConfig, SolverOptions};
use mather::ChannelModelSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let opts = StabilityOptions {
        trials: 3,
        seed: 11,
        ..StabilityOptions::default()
    };
    let report = mane_stability_sweep(
        &ChannelModelSpec::lowest_energy(2),
        &BudgetConfig::default(),
        &SolverOptions::default(),
        &opts,
    )?;
    println!("unperturbed corner {:?}", report.analytic_corner);
    for t in &report.results {
        println!(
            "trial {}: |V|_C1 ≤ {:.1e}, corner {:.5?}, moved {:.1e}, gap {:.4?}, persists {}",
            t.trial,
            t.norm_bound,
            t.location,
            t.displacement.unwrap_or(f64::NAN),
            t.gap,
            t.persists
        );
    }
    println!(
        "{} of {} persisted at eps = {}; displacement/eps {:?}",
        report.persisted, report.trials, report.eps, report.displacement_per_eps
    );
    Ok(())
}
