//! Closed-form pendulum α against a direct variational evaluation.

use std::sync::Arc;

use mather::engine::{min_average_action, SolverOptions};
use mather::model::CosinePotential;
use mather::oracle::{pendulum_alpha, pendulum_flat_boundary, PendulumSpec};
use mather::MechanicalLagrangian;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = PendulumSpec::new(1.0, 1.0)?;
    let edge = pendulum_flat_boundary(spec)?;
    println!("flat of α is [-{edge:.12}, {edge:.12}]");
    println!(
        "4√2/π        = {:.12}",
        4.0 * 2f64.sqrt() / std::f64::consts::PI
    );

    // The same pendulum in x_1 with x_2 free, so loops of class (1, 0) are
    // pendulum rotations.
    let model = MechanicalLagrangian::with_potential(
        2,
        Arc::new(CosinePotential {
            amplitude: 1.0,
            axes: vec![0],
        }),
    )?;
    let opts = SolverOptions::default();
    let rest = 0.0 - model.rest_minimum().1;
    for c in [1.0, 1.5, 2.0, 3.0] {
        let exact = pendulum_alpha(spec, c)?;
        // Each loop bounds α from below by −A_c(γ)/T; so does the fixed point.
        let mut best = rest;
        for t in [0.5, 1.0, 2.0, 4.0, 8.0] {
            best = best.max(-min_average_action(&model, &[c, 0.0], &[1, 0], t, 4, &opts)?.value);
        }
        println!("c = {c}: oracle α = {exact:.6}, variational bound {best:.6}");
    }
    Ok(())
}
