//! β from the solver table, its discrete conjugate, and the comparison with
//! α computed directly. Also the textbook pair β(h) = h², α(c) = c²/4.

use mather::analysis::{fenchel_conjugate, BetaGrid, SampledFunction};
use mather::engine::{AlphaSolver, HomologyBudget, SolverOptions};
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let parabola = SampledFunction::on_line(-4.0, 4.0, 8001, |h| h * h)?;
    let duals: Vec<Vec<f64>> = (0..=8).map(|i| vec![-2.0 + 0.5 * i as f64]).collect();
    let star = fenchel_conjugate(&parabola, &duals)?;
    for (d, v) in duals.iter().zip(&star.function.values) {
        println!(
            "(h²)*({:+.1}) = {v:.6}, c²/4 = {:.6}",
            d[0],
            d[0] * d[0] / 4.0
        );
    }

    let model = build_channel_model(&ChannelModelSpec::lowest_energy(2))?;
    let solver = AlphaSolver::new(
        &model,
        HomologyBudget::for_model(&model),
        SolverOptions::default(),
    )?;
    let grid = BetaGrid::from_solver(&solver);
    println!(
        "{} β samples, β(0) = {}, convex along rays: {}",
        grid.samples.len(),
        grid.origin(),
        grid.ray_convexity(1e-8).passed()
    );
    let beta = grid.as_sampled()?;
    let points: Vec<Vec<f64>> = (0..=6).map(|i| vec![0.25 * i as f64, 0.0]).collect();
    let conj = fenchel_conjugate(&beta, &points)?;
    for ((c, lower), arg) in points.iter().zip(&conj.function.values).zip(&conj.argmax) {
        let direct = solver.alpha(c)?;
        let s = &grid.samples[*arg];
        println!(
            "c = {c:?}: β* = {lower:.5} at ρ = {:.3?}, direct α = {:.5}",
            s.rotation, direct.alpha
        );
    }
    Ok(())
}
