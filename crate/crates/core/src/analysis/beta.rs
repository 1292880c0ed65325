use serde::Serialize;

use crate::analysis::alpha::CheckSummary;
use crate::analysis::conjugate::SampledFunction;
use crate::engine::{AlphaSolver, BetaSample};
use crate::error::Result;

/// β at the rotation vectors `2πh/T` of the solver's budget, plus `β(0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaGrid {
    pub samples: Vec<BetaSample>,
}

impl BetaGrid {
    /// Samples from the solver table, convexified along each ray from the
    /// origin. Every orbit value bounds β from above and β is convex, so the
    /// lower convex envelope of a ray is a tighter bound.
    pub fn from_solver(solver: &AlphaSolver) -> Self {
        let mut samples = solver.beta_samples();
        for members in rays(&samples) {
            let mut ray: Vec<(f64, f64, usize)> = members
                .iter()
                .map(|&i| (radius(&samples[i]), samples[i].orbit_beta, i))
                .collect();
            ray.push((0.0, samples[0].orbit_beta, 0));
            ray.sort_by(|a, b| a.0.total_cmp(&b.0));
            let hull = lower_hull(&ray);
            for &(s, _, i) in &ray {
                if i != 0 {
                    samples[i].beta = samples[i].orbit_beta.min(hull_value(&hull, s));
                }
            }
        }
        Self { samples }
    }

    /// The fixed-point value, `min_x L(x, 0)`.
    pub fn origin(&self) -> f64 {
        self.samples[0].beta
    }

    /// Convexity along each ray `ρ ∈ ℝ₊ h` (origin included), checked on
    /// consecutive triples.
    pub fn ray_convexity(&self, tol: f64) -> CheckSummary {
        let mut summary = CheckSummary::default();
        for members in rays(&self.samples) {
            let mut ray: Vec<(f64, f64)> = vec![(0.0, self.origin())];
            ray.extend(
                members
                    .iter()
                    .map(|&i| (radius(&self.samples[i]), self.samples[i].beta)),
            );
            ray.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in ray.windows(3) {
                let [(sa, ba), (sb, bb), (sc, bc)] = [w[0], w[1], w[2]];
                if sc - sa <= 0.0 {
                    continue;
                }
                let chord = ba + (bc - ba) * (sb - sa) / (sc - sa);
                summary.record_excess(bb - chord, tol);
            }
        }
        summary
    }

    pub fn as_sampled(&self) -> Result<SampledFunction> {
        SampledFunction::new(
            self.samples.iter().map(|s| s.rotation.clone()).collect(),
            self.samples.iter().map(|s| s.beta).collect(),
        )
    }
}

fn radius(s: &BetaSample) -> f64 {
    s.rotation.iter().map(|r| r * r).sum::<f64>().sqrt()
}

fn primitive(h: &[i64]) -> Vec<i64> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = h.iter().fold(0, |g, &v| gcd(g, v));
    h.iter().map(|&v| v / g.max(1)).collect()
}

/// Indices of the non-origin samples grouped by primitive direction.
fn rays(samples: &[BetaSample]) -> Vec<Vec<usize>> {
    let mut keys: Vec<Vec<i64>> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, s) in samples.iter().enumerate().skip(1) {
        let key = primitive(&s.h);
        match keys.iter().position(|k| *k == key) {
            Some(j) => groups[j].push(i),
            None => {
                keys.push(key);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Lower convex hull of points sorted by abscissa.
fn lower_hull(points: &[(f64, f64, usize)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &(x, y, _) in points {
        if hull.last().is_some_and(|&(hx, _)| hx == x) {
            let last = hull.last_mut().unwrap();
            last.1 = last.1.min(y);
            continue;
        }
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            if (y2 - y1) * (x - x1) >= (y - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

fn hull_value(hull: &[(f64, f64)], x: f64) -> f64 {
    let k = hull.partition_point(|p| p.0 < x);
    if k < hull.len() && hull[k].0 == x {
        return hull[k].1;
    }
    let (x1, y1) = hull[k - 1];
    let (x2, y2) = hull[k];
    y1 + (y2 - y1) * (x - x1) / (x2 - x1)
}
