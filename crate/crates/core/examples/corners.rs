//! Scans the boundary corners of the flat for a kink in α and records the
//! minimizers on either side.

use mather::analysis::corner::{default_candidates, default_directions};
use mather::analysis::{corner_scan, CornerOptions};
use mather::engine::{AlphaSolver, HomologyBudget, SolverOptions};
use mather::{build_channel_model, ChannelModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = build_channel_model(&ChannelModelSpec::lowest_energy(2))?;
    let solver = AlphaSolver::new(
        &model,
        HomologyBudget::for_model(&model),
        SolverOptions::default(),
    )?;

    let mut candidates = default_candidates(&solver)?;
    // An interior point of the flat, which should not be flagged.
    candidates.push(vec![0.1, 0.0]);
    let reports = corner_scan(
        &solver,
        &candidates,
        &default_directions(&solver),
        &CornerOptions::default(),
    )?;

    for cand in &reports {
        println!("candidate {:?}: flagged {}", cand.location, cand.flagged);
        for r in &cand.reports {
            println!(
                "  e = {:?}: D+ {:.5}, D- {:.5}, gap {:.5} ± {:.1e}",
                r.direction, r.plus.value, r.minus.value, r.gap, r.gap_error
            );
        }
        for s in &cand.distinct {
            println!(
                "  support {:<12} h = {:?}, ρ = {:.4?}",
                s.label, s.h, s.rotation
            );
        }
        println!(
            "  channel rotation vectors distinct: {}",
            cand.channel_rotations_distinct()
        );
    }
    Ok(())
}
