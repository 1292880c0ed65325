use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::derivative::{
    check_direction, probe_points, richardson, DerivativeEstimate, Side, DEFAULT_T0,
};
use crate::engine::{AlphaSolver, AlphaValue, Winner};
use crate::error::{Error, Result};
use crate::oracle::model_corners;

pub const TOL_CORNER: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CornerOptions {
    pub t0: f64,
    pub tol_corner: f64,
}

impl Default for CornerOptions {
    fn default() -> Self {
        Self {
            t0: DEFAULT_T0,
            tol_corner: TOL_CORNER,
        }
    }
}

/// A minimizing orbit family seen near a candidate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Support {
    /// `"fixed point"` or the channel label of the winning loop.
    pub label: String,
    pub h: Vec<i64>,
    /// Rotation vector at the probe closest to the candidate.
    pub rotation: Vec<f64>,
}

impl Support {
    fn of(w: &Winner) -> Self {
        Self {
            label: if w.fixed_point {
                "fixed point".into()
            } else {
                w.channel.clone()
            },
            h: w.h.clone(),
            rotation: w.rotation.clone(),
        }
    }

    fn same_family(&self, other: &Support) -> bool {
        self.label == other.label && self.h == other.h
    }

    pub fn is_rest(&self) -> bool {
        self.rotation.iter().all(|&r| r == 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CornerReport {
    pub location: Vec<f64>,
    pub direction: Vec<f64>,
    pub plus: DerivativeEstimate,
    /// Left derivative `lim (α(c) − α(c − te))/t`.
    pub minus: DerivativeEstimate,
    /// `D⁺ − D⁻`; non-negative for a convex function.
    pub gap: f64,
    pub gap_error: f64,
    pub plus_support: Vec<Support>,
    pub minus_support: Vec<Support>,
    /// Distinct families over the centre and both sides.
    pub distinct: Vec<Support>,
    pub flagged: bool,
}

/// All directions probed at one candidate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CandidateReport {
    pub location: Vec<f64>,
    pub reports: Vec<CornerReport>,
    /// Distinct families over every direction.
    pub distinct: Vec<Support>,
    pub flagged_directions: usize,
    pub flagged: bool,
    pub failures: Vec<String>,
}

impl CandidateReport {
    /// Whether the rotation vectors of the non-rest families are pairwise
    /// different and non-zero.
    pub fn channel_rotations_distinct(&self) -> bool {
        let moving: Vec<&Support> = self.distinct.iter().filter(|s| !s.is_rest()).collect();
        moving.iter().enumerate().all(|(i, a)| {
            moving[i + 1..].iter().all(|b| {
                a.rotation
                    .iter()
                    .zip(&b.rotation)
                    .any(|(x, y)| (x - y).abs() > 1e-6 * (1.0 + x.abs().max(y.abs())))
            })
        })
    }
}

fn push_distinct(set: &mut Vec<Support>, s: Support) {
    if !set.iter().any(|t| t.same_family(&s)) {
        set.push(s);
    }
}

/// Default probe directions: the unit axes of the subspace `c_n = 0` for
/// channel models, all unit axes otherwise.
pub fn default_directions(solver: &AlphaSolver) -> Vec<Vec<f64>> {
    let n = solver.model().n();
    let m = if solver.model().channels().is_some() && n > 1 {
        n - 1
    } else {
        n
    };
    (0..m)
        .map(|k| (0..n).map(|j| if j == k { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Analytic corners of the solver's channel model.
pub fn default_candidates(solver: &AlphaSolver) -> Result<Vec<Vec<f64>>> {
    let info = solver
        .model()
        .channels()
        .ok_or_else(|| Error::input("default candidates need a channel model"))?;
    model_corners(&info.spec)
}

/// One-sided derivatives of α and the supporting minimizers at each
/// candidate, along each direction.
pub fn corner_scan(
    solver: &AlphaSolver,
    candidates: &[Vec<f64>],
    directions: &[Vec<f64>],
    opts: &CornerOptions,
) -> Result<Vec<CandidateReport>> {
    if candidates.is_empty() || directions.is_empty() {
        return Err(Error::input("corner_scan needs candidates and directions"));
    }
    if !(opts.t0 > 0.0 && opts.tol_corner >= 0.0) {
        return Err(Error::input(
            "t0 must be positive and tol_corner non-negative",
        ));
    }
    for c in candidates {
        for e in directions {
            check_direction(c, e)?;
        }
    }
    // Every probe of every candidate, evaluated as one batch.
    let mut points: Vec<Vec<f64>> = Vec::new();
    for c in candidates {
        points.push(c.clone());
        for e in directions {
            for side in [Side::Plus, Side::Minus] {
                points.extend(probe_points(c, e, opts.t0, side));
            }
        }
    }
    let values: Vec<Result<AlphaValue>> = points.par_iter().map(|p| solver.alpha(p)).collect();
    let mut values = values.into_iter();

    let mut out = Vec::with_capacity(candidates.len());
    for c in candidates {
        let mut failures = Vec::new();
        let mut take = |values: &mut std::vec::IntoIter<Result<AlphaValue>>| match values.next() {
            Some(Ok(v)) => Some(v),
            Some(Err(e)) => {
                failures.push(e.to_string());
                None
            }
            None => None,
        };
        let center = take(&mut values);
        let mut reports = Vec::new();
        let mut distinct = Vec::new();
        if let Some(cv) = &center {
            push_distinct(&mut distinct, Support::of(&cv.winner));
        }
        for e in directions {
            let plus: Vec<Option<AlphaValue>> = (0..3).map(|_| take(&mut values)).collect();
            let minus: Vec<Option<AlphaValue>> = (0..3).map(|_| take(&mut values)).collect();
            let (Some(cv), true, true) = (
                &center,
                plus.iter().all(Option::is_some),
                minus.iter().all(Option::is_some),
            ) else {
                continue;
            };
            let plus: Vec<AlphaValue> = plus.into_iter().flatten().collect();
            let minus: Vec<AlphaValue> = minus.into_iter().flatten().collect();
            let dp = richardson(
                cv.alpha,
                [plus[0].alpha, plus[1].alpha, plus[2].alpha],
                opts.t0,
                Side::Plus,
            );
            let dm = richardson(
                cv.alpha,
                [minus[0].alpha, minus[1].alpha, minus[2].alpha],
                opts.t0,
                Side::Minus,
            );
            let mut plus_support = Vec::new();
            let mut minus_support = Vec::new();
            // Closest probes first so the recorded rotation is the nearest one.
            for v in plus.iter().rev() {
                push_distinct(&mut plus_support, Support::of(&v.winner));
            }
            for v in minus.iter().rev() {
                push_distinct(&mut minus_support, Support::of(&v.winner));
            }
            let mut local = vec![Support::of(&cv.winner)];
            for s in plus_support.iter().chain(&minus_support) {
                push_distinct(&mut local, s.clone());
            }
            for s in &local {
                push_distinct(&mut distinct, s.clone());
            }
            let gap = dp.value - dm.value;
            let flagged = gap > opts.tol_corner && local.len() >= 2;
            reports.push(CornerReport {
                location: c.clone(),
                direction: e.clone(),
                gap_error: dp.error + dm.error,
                plus: dp,
                minus: dm,
                gap,
                plus_support,
                minus_support,
                distinct: local,
                flagged,
            });
        }
        let flagged_directions = reports.iter().filter(|r| r.flagged).count();
        out.push(CandidateReport {
            location: c.clone(),
            reports,
            distinct,
            flagged_directions,
            flagged: flagged_directions > 0,
            failures,
        });
    }
    Ok(out)
}
