//! α along the c_2 = 0 slice of the n = 2 model, against the closed forms.
//! Writes the field as CSV to stdout.

use mather::analysis::export::write_alpha_csv;
use mather::analysis::{build_alpha_field, Lattice, TOL_FLAT};
use mather::engine::{AlphaSolver, HomologyBudget, SolverOptions};
use mather::oracle::restricted_alphas;
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = ChannelModelSpec::lowest_energy(2);
    let model = build_channel_model(&spec)?;
    let solver = AlphaSolver::new(
        &model,
        HomologyBudget::for_model(&model),
        SolverOptions::default(),
    )?;
    let lattice = Lattice::slice(2, 0, -1.0, 1.0, 21)?;
    let field = build_alpha_field(&solver, &lattice)?;

    for s in &field.samples {
        let exact = restricted_alphas(&spec, &s.c)?.max();
        let got = s.alpha;
        eprintln!(
            "c_1 = {:+.2}: α = {got:.5?}, closed form {exact:.5}",
            s.c[0]
        );
    }
    let (_, min) = field.minimum().expect("no holes");
    let (lo, hi) = field.level_crossings(min, TOL_FLAT)?;
    eprintln!(
        "minimum {min:.2e}; flat ends near {lo:.4?} and {hi:.4?} (±1/√8 = ±{:.4})",
        8f64.sqrt().recip()
    );
    eprintln!(
        "convex: {}, even: {}, Fenchel–Young: {}",
        field.convexity(1e-6, 4).passed(),
        field.symmetry(1e-8).passed(),
        field.fenchel_young(1e-8).passed()
    );
    write_alpha_csv(std::io::stdout().lock(), &field)?;
    Ok(())
}
