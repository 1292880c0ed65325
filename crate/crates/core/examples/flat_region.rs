//! The flat of α around c = 0 is a full-dimensional region of H¹(T², ℝ).
//! Transverse classes must be in the budget, or the c_2 direction is blind.

use mather::analysis::{build_alpha_field, flat_detect, Axis, Lattice, TOL_FLAT};
use mather::engine::{AlphaSolver, BudgetConfig, HomologyBudget, SolverOptions};
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lattice = Lattice::new(vec![Axis::new(-0.05, 0.05, 9); 2])?;
    lattice.validate()?;
    let model = build_channel_model(&ChannelModelSpec::lowest_energy(2))?;
    let config = BudgetConfig {
        bound: Some(1),
        transverse: true,
        ..BudgetConfig::default()
    };
    let budget = HomologyBudget::from_config(&model, &config)?;
    println!(
        "{} homology classes, {} periods",
        budget.classes.len(),
        budget.periods.len()
    );
    let solver = AlphaSolver::new(&model, budget, SolverOptions::default())?;

    let field = build_alpha_field(&solver, &lattice)?;
    let report = flat_detect(&field, None, TOL_FLAT)?;
    println!(
        "flat: {} of {} points, dimension {}, box {:?}, spread {:.3?}",
        report.member_count,
        lattice.len(),
        report.dimension,
        report.bounding_box,
        report.spread
    );
    Ok(())
}
