//! The drift model on T³: a flat segment on the c_2 axis that ends in a
//! one-sided kink of slope √δ.

use mather::analysis::{build_alpha_field, directional_derivative, Axis, Lattice, Side, TOL_FLAT};
use mather::engine::{AlphaSolver, HomologyBudget, SolverOptions};
use mather::oracle::restricted_alphas;
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let delta = 0.04;
    let spec = ChannelModelSpec::higher_energy(delta);
    let e2 = [0.0, 1.0, 0.0];
    let corner = [0.0, 2.0 * delta.sqrt(), 0.0];

    let oracle = |c: &[f64]| restricted_alphas(&spec, c).map(|r| r.max());
    let plus = directional_derivative(oracle, &corner, &e2, Side::Plus, 1e-3)?;
    let minus = directional_derivative(oracle, &corner, &e2, Side::Minus, 1e-3)?;
    println!(
        "closed form at {corner:?}: D+ {:.6}, D- {:.1e}",
        plus.value, minus.value
    );

    let model = build_channel_model(&spec)?;
    let solver = AlphaSolver::new(
        &model,
        HomologyBudget::for_model(&model),
        SolverOptions::default(),
    )?;
    let lattice = Lattice::new(vec![
        Axis::fixed(0.0),
        Axis::new(-0.6, 0.6, 25),
        Axis::fixed(0.0),
    ])?;
    let field = build_alpha_field(&solver, &lattice)?;
    let (lo, hi) = field.level_crossings(0.0, TOL_FLAT)?;
    println!(
        "variational flat on the c_2 axis: {lo:.4?} to {hi:.4?}, expected ±{}",
        corner[1]
    );

    let alpha = |c: &[f64]| solver.alpha(c).map(|v| v.alpha);
    let plus = directional_derivative(alpha, &corner, &e2, Side::Plus, 1e-2)?;
    let minus = directional_derivative(alpha, &corner, &e2, Side::Minus, 1e-2)?;
    println!(
        "variational D+ {:.5} (√δ = {}), D- {:.1e}",
        plus.value,
        delta.sqrt(),
        minus.value
    );
    Ok(())
}
