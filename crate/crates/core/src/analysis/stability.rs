use std::f64::consts::PI;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::corner::{corner_scan, default_directions, CandidateReport, CornerOptions};
use crate::channel::{build_channel_model, ChannelModelSpec};
use crate::engine::{AlphaSolver, BudgetConfig, HomologyBudget, SolverOptions};
use crate::error::{Error, Result};
use crate::field::TrigPolynomial;
use crate::model::MechanicalLagrangian;
use crate::oracle::model_corners;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityOptions {
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub max_harmonic: i32,
    /// Which analytic corner to follow.
    pub corner_index: usize,
    /// Half-length of the radial bracket searched for the perturbed corner.
    pub search_radius: f64,
    /// A corner persists if it is flagged within this distance.
    pub persistence_radius: f64,
    pub bisection_iterations: usize,
    pub corner: CornerOptions,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            trials: 20,
            seed: 0,
            max_harmonic: 3,
            corner_index: 0,
            search_radius: 0.05,
            persistence_radius: 1e-2,
            bisection_iterations: 12,
            corner: CornerOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityTrial {
    pub trial: usize,
    /// Closed-form bound on `max(sup|V|, sup|∇V|)`.
    pub norm_bound: f64,
    /// Constant added so that `min(U + V) = 0`.
    pub shift: f64,
    pub location: Option<Vec<f64>>,
    pub displacement: Option<f64>,
    pub gap: Option<f64>,
    pub flagged: bool,
    pub persists: bool,
    pub identical_to_baseline: bool,
    pub report: Option<CandidateReport>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub eps: f64,
    pub trials: usize,
    pub seed: u64,
    pub analytic_corner: Vec<f64>,
    pub baseline: CandidateReport,
    pub results: Vec<StabilityTrial>,
    pub persisted: usize,
    /// Largest displacement among persisting corners, divided by `eps`.
    pub displacement_per_eps: Option<f64>,
}

/// `eps` must stay below `δ/10` and below `(π/8)²`.
pub fn check_eps(spec: &ChannelModelSpec, eps: f64) -> Result<()> {
    let delta = spec.delta.iter().copied().fold(f64::INFINITY, f64::min);
    if !(eps >= 0.0) {
        return Err(Error::config("eps must be non-negative"));
    }
    if eps > delta / 10.0 {
        return Err(Error::config(format!(
            "eps {eps} exceeds δ/10 = {}",
            delta / 10.0
        )));
    }
    let tau = PI / 8.0;
    if eps >= tau * tau {
        return Err(Error::config(format!(
            "eps {eps} is not below (π/8)² = {}",
            tau * tau
        )));
    }
    Ok(())
}

/// Locates the corner on the ray through `analytic`, then scans it.
fn locate_and_scan(
    model: &MechanicalLagrangian,
    budget: &HomologyBudget,
    solver_opts: &SolverOptions,
    analytic: &[f64],
    opts: &StabilityOptions,
) -> Result<CandidateReport> {
    let solver = AlphaSolver::new(model, budget.clone(), solver_opts.clone())?;
    let radius = analytic.iter().map(|v| v * v).sum::<f64>().sqrt();
    let unit: Vec<f64> = analytic.iter().map(|v| v / radius).collect();
    let level = -solver.rest().1;
    let outside = |s: f64| -> Result<bool> {
        let c: Vec<f64> = unit.iter().map(|u| u * s).collect();
        let level = level + 1e-10;
        Ok(solver.table_exceeds(&c, level) || solver.alpha(&c)?.alpha > level)
    };
    let mut lo = (radius - opts.search_radius).max(0.0);
    let mut hi = radius + opts.search_radius;
    if outside(lo)? || !outside(hi)? {
        return Err(Error::Probe {
            point: analytic.to_vec(),
            reason: "flat boundary not bracketed on the radial search interval".into(),
        });
    }
    for _ in 0..opts.bisection_iterations {
        let mid = 0.5 * (lo + hi);
        if outside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let s = 0.5 * (lo + hi);
    let c: Vec<f64> = unit.iter().map(|u| u * s).collect();
    let directions = default_directions(&solver);
    let mut reports = corner_scan(&solver, &[c], &directions, &opts.corner)?;
    Ok(reports.remove(0))
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Random trigonometric perturbations of a channel model, each followed by
/// a corner scan near the tracked unperturbed corner.
pub fn mane_stability_sweep(
    spec: &ChannelModelSpec,
    budget: &BudgetConfig,
    solver_opts: &SolverOptions,
    opts: &StabilityOptions,
) -> Result<StabilityReport> {
    check_eps(spec, opts.eps)?;
    if opts.trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    let model = build_channel_model(spec)?;
    let budget = HomologyBudget::from_config(&model, budget)?;
    let corners = model_corners(spec)?;
    let analytic = corners
        .get(opts.corner_index)
        .ok_or_else(|| Error::config(format!("corner index {} out of range", opts.corner_index)))?
        .clone();
    let baseline = locate_and_scan(&model, &budget, solver_opts, &analytic, opts)?;
    let baseline_location = baseline.location.clone();
    let baseline_json = serde_json::to_string(&baseline)?;

    let results: Vec<StabilityTrial> = (0..opts.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(trial as u64));
            let poly = TrigPolynomial::random(spec.n, opts.max_harmonic, opts.eps, &mut rng);
            let norm_bound = poly.c1_bound();
            let prepared = if opts.eps == 0.0 {
                Ok((model.clone(), 0.0))
            } else {
                model.perturb(Arc::new(poly), opts.eps).and_then(|m| {
                    let (_, min) = m.potential_minimum();
                    if min.is_finite() {
                        Ok((m.shift_potential(-min), -min))
                    } else {
                        Err(Error::input("renormalization failed: non-finite minimum"))
                    }
                })
            };
            let outcome = prepared.and_then(|(m, shift)| {
                locate_and_scan(&m, &budget, solver_opts, &analytic, opts).map(|r| (r, shift))
            });
            match outcome {
                Ok((report, shift)) => {
                    let displacement = distance(&report.location, &baseline_location);
                    let gap = report
                        .reports
                        .iter()
                        .map(|r| r.gap)
                        .fold(f64::NEG_INFINITY, f64::max);
                    let identical = serde_json::to_string(&report).ok().as_deref()
                        == Some(baseline_json.as_str());
                    StabilityTrial {
                        trial,
                        norm_bound,
                        shift,
                        location: Some(report.location.clone()),
                        displacement: Some(displacement),
                        gap: Some(gap),
                        flagged: report.flagged,
                        persists: report.flagged && displacement <= opts.persistence_radius,
                        identical_to_baseline: identical,
                        report: Some(report),
                        failure: None,
                    }
                }
                Err(e) => StabilityTrial {
                    trial,
                    norm_bound,
                    shift: 0.0,
                    location: None,
                    displacement: None,
                    gap: None,
                    flagged: false,
                    persists: false,
                    identical_to_baseline: false,
                    report: None,
                    failure: Some(e.to_string()),
                },
            }
        })
        .collect();
    let persisted = results.iter().filter(|r| r.persists).count();
    let displacement_per_eps = (opts.eps > 0.0)
        .then(|| {
            results
                .iter()
                .filter(|r| r.persists)
                .filter_map(|r| r.displacement)
                .fold(None, |m: Option<f64>, d| Some(m.map_or(d, |m| m.max(d))))
                .map(|d| d / opts.eps)
        })
        .flatten();
    Ok(StabilityReport {
        eps: opts.eps,
        trials: opts.trials,
        seed: opts.seed,
        analytic_corner: analytic,
        baseline,
        results,
        persisted,
        displacement_per_eps,
    })
}
