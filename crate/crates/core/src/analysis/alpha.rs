use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::lattice::Lattice;
use crate::engine::{AlphaSolver, Winner};
use crate::error::{Error, Result};
use crate::model::dot;

pub const MIN_RESOLUTION: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaSample {
    pub c: Vec<f64>,
    pub alpha: Option<f64>,
    pub winner: Option<Winner>,
    /// Why the sample is a hole.
    pub error: Option<String>,
}

/// α sampled on a lattice, with winner metadata per point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaField {
    pub lattice: Lattice,
    pub samples: Vec<AlphaSample>,
}

/// Evaluates `solver.alpha` at every lattice point. Failed points become
/// holes; the field is returned regardless.
pub fn build_alpha_field(solver: &AlphaSolver, lattice: &Lattice) -> Result<AlphaField> {
    lattice.validate()?;
    if lattice.dim() != solver.model().n() {
        return Err(Error::config(format!(
            "lattice has {} axes, model dimension is {}",
            lattice.dim(),
            solver.model().n()
        )));
    }
    if let Some(a) = lattice
        .axes
        .iter()
        .find(|a| a.count > 1 && a.count < MIN_RESOLUTION)
    {
        return Err(Error::config(format!(
            "resolution {} is below the minimum of {MIN_RESOLUTION} per axis",
            a.count
        )));
    }
    let samples = lattice
        .points()
        .into_par_iter()
        .map(|c| match solver.alpha(&c) {
            Ok(v) if v.alpha.is_finite() => AlphaSample {
                c,
                alpha: Some(v.alpha),
                winner: Some(v.winner),
                error: None,
            },
            Ok(v) => AlphaSample {
                c,
                alpha: None,
                winner: None,
                error: Some(format!("non-finite value {}", v.alpha)),
            },
            Err(e) => AlphaSample {
                c,
                alpha: None,
                winner: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(AlphaField {
        lattice: lattice.clone(),
        samples,
    })
}

/// Largest violation found by one of the structural checks.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CheckSummary {
    pub checked: usize,
    pub violations: usize,
    pub worst: f64,
}

impl CheckSummary {
    pub(crate) fn record_excess(&mut self, excess: f64, tol: f64) {
        self.checked += 1;
        self.worst = self.worst.max(excess);
        if excess > tol {
            self.violations += 1;
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

impl AlphaField {
    /// Builds a field from precomputed values, e.g. an oracle.
    pub fn from_values(lattice: Lattice, mut f: impl FnMut(&[f64]) -> Option<f64>) -> Self {
        let samples = lattice
            .points()
            .into_iter()
            .map(|c| {
                let alpha = f(&c).filter(|v| v.is_finite());
                AlphaSample {
                    error: alpha.is_none().then(|| "no value".to_string()),
                    c,
                    alpha,
                    winner: None,
                }
            })
            .collect();
        Self { lattice, samples }
    }

    pub fn value(&self, idx: usize) -> Option<f64> {
        self.samples[idx].alpha
    }

    pub fn holes(&self) -> usize {
        self.samples.iter().filter(|s| s.alpha.is_none()).count()
    }

    pub fn hole_fraction(&self) -> f64 {
        self.holes() as f64 / self.samples.len().max(1) as f64
    }

    /// Smallest sample and its index; the first one wins ties.
    pub fn minimum(&self) -> Option<(usize, f64)> {
        self.samples
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.alpha.map(|a| (i, a)))
            .fold(None, |best, (i, a)| match best {
                Some((_, b)) if b <= a => best,
                _ => Some((i, a)),
            })
    }

    /// `α(m) ≤ ½(α(a) + α(b)) + tol` over aligned lattice triples.
    pub fn convexity(&self, tol: f64, max_stride: usize) -> CheckSummary {
        let mut out = CheckSummary::default();
        for (a, m, b) in self.lattice.midpoint_triples(max_stride) {
            if let (Some(va), Some(vm), Some(vb)) = (self.value(a), self.value(m), self.value(b)) {
                out.record_excess(vm - 0.5 * (va + vb), tol);
            }
        }
        out
    }

    /// `|α(c) − α(−c)|` on the mirrored points of the lattice.
    pub fn symmetry(&self, tol: f64) -> CheckSummary {
        let mut out = CheckSummary::default();
        for i in 0..self.samples.len() {
            if let Some(j) = self.lattice.mirror(i) {
                if j > i {
                    if let (Some(a), Some(b)) = (self.value(i), self.value(j)) {
                        out.record_excess((a - b).abs(), tol);
                    }
                }
            }
        }
        out
    }

    /// `α(c) + β_win ≥ ⟨c, ρ_win⟩ − tol` for every sample with a winner.
    pub fn fenchel_young(&self, tol: f64) -> CheckSummary {
        let mut out = CheckSummary::default();
        for s in &self.samples {
            if let (Some(a), Some(w)) = (s.alpha, &s.winner) {
                out.record_excess(dot(&s.c, &w.rotation) - w.mean_lagrangian - a, tol);
            }
        }
        out
    }

    /// On a slice with one free axis, the lower and upper ends of the
    /// connected set `{α ≤ level + tol}` around the minimum, located between
    /// lattice points by fitting the first samples outside.
    pub fn level_crossings(&self, level: f64, tol: f64) -> Result<(Option<f64>, Option<f64>)> {
        let free = self.lattice.free_axes();
        if free.len() != 1 {
            return Err(Error::input("level crossings need exactly one free axis"));
        }
        let axis = free[0];
        let (start, _) = self.minimum().ok_or(Error::EmptyGrid)?;
        let xs: Vec<f64> = self.samples.iter().map(|s| s.c[axis]).collect();
        let inside = |i: usize| self.value(i).is_some_and(|v| v <= level + tol);
        let count = self.samples.len();
        let mut lo = start;
        while lo > 0 && inside(lo - 1) {
            lo -= 1;
        }
        let mut hi = start;
        while hi + 1 < count && inside(hi + 1) {
            hi += 1;
        }
        let fit = |edge: usize, outward: &[usize]| -> Option<f64> {
            let pts: Vec<(f64, f64)> = outward
                .iter()
                .filter_map(|&i| self.value(i).map(|v| (xs[i], v - level)))
                .collect();
            let first = *pts.first()?;
            let x_edge = xs[edge];
            crossing_estimate(&pts)
                .or_else(|| {
                    let v_edge = self.value(edge)? - level;
                    let t = (0.0 - v_edge) / (first.1 - v_edge);
                    Some(x_edge + t.clamp(0.0, 1.0) * (first.0 - x_edge))
                })
                .map(|x| {
                    let (a, b) = if x_edge < first.0 {
                        (x_edge, first.0)
                    } else {
                        (first.0, x_edge)
                    };
                    x.clamp(a, b)
                })
        };
        let lower = (lo > 0).then(|| {
            let out: Vec<usize> = (0..lo).rev().take(3).collect();
            fit(lo, &out)
        });
        let upper = (hi + 1 < count).then(|| {
            let out: Vec<usize> = (hi + 1..count).take(3).collect();
            fit(hi, &out)
        });
        Ok((lower.flatten(), upper.flatten()))
    }
}

/// Root of the quadratic through the first three points on the inner side of
/// the first one.
fn crossing_estimate(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 3 {
        return None;
    }
    let (x0, y0) = pts[0];
    let (x1, y1) = pts[1];
    let (x2, y2) = pts[2];
    // Newton form y = y0 + d1 (x − x0) + d2 (x − x0)(x − x1).
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let d2 = (d12 - d01) / (x2 - x0);
    let a = d2;
    let b = d01 - d2 * (x0 + x1);
    let cst = y0 - d01 * x0 + d2 * x0 * x1;
    let roots = if a.abs() < 1e-14 {
        if b == 0.0 {
            return None;
        }
        vec![-cst / b]
    } else {
        let disc = b * b - 4.0 * a * cst;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
    };
    // The wanted root lies on the inner side of x0 (away from x1).
    let inward = (x0 - x1).signum();
    roots
        .into_iter()
        .filter(|r| (r - x0) * inward >= -1e-12)
        .min_by(|p, q| (p - x0).abs().total_cmp(&(q - x0).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::lattice::Axis;

    #[test]
    fn crossings_of_a_kinked_profile() {
        let l = Lattice::new(vec![Axis::new(-2.0, 2.0, 41)]).unwrap();
        let f = AlphaField::from_values(l, |c| Some((4.0 * c[0] * c[0] - 0.5).max(0.0)));
        let (lo, hi) = f.level_crossings(0.0, 1e-3).unwrap();
        let r = 1.0 / 8f64.sqrt();
        assert!((hi.unwrap() - r).abs() < 1e-9);
        assert!((lo.unwrap() + r).abs() < 1e-9);
        assert!(f.convexity(1e-12, 4).passed());
        assert!(f.symmetry(1e-12).passed());
    }

    #[test]
    fn convexity_detects_concave_bump() {
        let l = Lattice::new(vec![Axis::new(-1.0, 1.0, 9)]).unwrap();
        let f = AlphaField::from_values(l, |c| Some(-c[0] * c[0]));
        assert!(!f.convexity(1e-6, 1).passed());
    }
}
