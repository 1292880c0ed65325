use nalgebra::DMatrix;
use serde::Serialize;

use crate::analysis::alpha::AlphaField;
use crate::error::{Error, Result};

pub const TOL_FLAT: f64 = 1e-3;
/// Covariance eigenvalues (in squared lattice steps) counted toward the rank.
pub const RANK_THRESHOLD: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatReport {
    pub level: f64,
    pub tol: f64,
    /// One entry per lattice point.
    pub members: Vec<bool>,
    pub member_count: usize,
    /// `(min, max)` per axis over the members.
    pub bounding_box: Vec<(f64, f64)>,
    pub dimension: usize,
    /// Eigenvalues of the member covariance in lattice units, descending.
    pub spread: Vec<f64>,
}

/// Connected component of `{|α − level| ≤ tol}` through the field minimum.
/// `level` defaults to the minimum value.
pub fn flat_detect(field: &AlphaField, level: Option<f64>, tol: f64) -> Result<FlatReport> {
    if !(tol > 0.0) {
        return Err(Error::input("tol_flat must be positive"));
    }
    let (start, min) = field.minimum().ok_or(Error::EmptyGrid)?;
    let level = level.unwrap_or(min);
    let near = |i: usize| field.value(i).is_some_and(|v| (v - level).abs() <= tol);
    if !near(start) {
        return Err(Error::EmptyMembership);
    }
    let lattice = &field.lattice;
    let mut members = vec![false; lattice.len()];
    members[start] = true;
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for j in lattice.neighbours(i) {
            if !members[j] && near(j) {
                members[j] = true;
                stack.push(j);
            }
        }
    }

    let dim = lattice.dim();
    let idx: Vec<usize> = (0..members.len()).filter(|&i| members[i]).collect();
    let mut bounding_box = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
    let mut mean = vec![0.0; dim];
    let coords: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| lattice.unravel(i).into_iter().map(|v| v as f64).collect())
        .collect();
    for (&i, x) in idx.iter().zip(&coords) {
        let c = lattice.point(i);
        for k in 0..dim {
            bounding_box[k].0 = bounding_box[k].0.min(c[k]);
            bounding_box[k].1 = bounding_box[k].1.max(c[k]);
            mean[k] += x[k] / idx.len() as f64;
        }
    }
    let mut cov = DMatrix::<f64>::zeros(dim, dim);
    for x in &coords {
        for a in 0..dim {
            for b in 0..dim {
                cov[(a, b)] += (x[a] - mean[a]) * (x[b] - mean[b]) / idx.len() as f64;
            }
        }
    }
    let mut spread: Vec<f64> = cov.symmetric_eigen().eigenvalues.iter().copied().collect();
    spread.sort_by(|a, b| b.total_cmp(a));
    let dimension = spread.iter().filter(|&&v| v >= RANK_THRESHOLD).count();
    Ok(FlatReport {
        level,
        tol,
        member_count: idx.len(),
        members,
        bounding_box,
        dimension,
        spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::lattice::{Axis, Lattice};

    fn square(count: usize) -> Lattice {
        Lattice::new(vec![
            Axis::new(-1.0, 1.0, count),
            Axis::new(-1.0, 1.0, count),
        ])
        .unwrap()
    }

    #[test]
    fn quadratic_has_point_flat() {
        let f = AlphaField::from_values(square(21), |c| Some(c[0] * c[0] + c[1] * c[1]));
        let r = flat_detect(&f, None, TOL_FLAT).unwrap();
        assert_eq!(r.member_count, 1);
        assert_eq!(r.dimension, 0);
    }

    #[test]
    fn segment_and_disc() {
        let seg = AlphaField::from_values(square(21), |c| {
            Some((c[0].abs() - 0.5).max(0.0) + c[1].abs())
        });
        let r = flat_detect(&seg, None, TOL_FLAT).unwrap();
        assert_eq!(r.dimension, 1);
        assert_eq!(r.bounding_box[0], (-0.5, 0.5));
        let disc = AlphaField::from_values(square(21), |c| Some((c[0].hypot(c[1]) - 0.5).max(0.0)));
        assert_eq!(flat_detect(&disc, None, TOL_FLAT).unwrap().dimension, 2);
    }

    #[test]
    fn level_away_from_minimum_is_empty() {
        let f = AlphaField::from_values(square(9), |c| Some(c[0] * c[0]));
        assert!(matches!(
            flat_detect(&f, Some(5.0), TOL_FLAT),
            Err(Error::EmptyMembership)
        ));
    }
}
