use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::dot;

/// Scattered samples of a function on ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledFunction {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.len() != values.len() {
            return Err(Error::input(format!(
                "{} points but {} values",
                points.len(),
                values.len()
            )));
        }
        let dim = points[0].len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::input("points must share one dimension"));
        }
        Ok(Self { points, values })
    }

    /// Samples `f` at `points`.
    pub fn from_fn(points: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = points.iter().map(|p| f(p)).collect();
        Self::new(points, values)
    }

    /// Equally spaced samples of a function of one variable.
    pub fn on_line(min: f64, max: f64, count: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyGrid);
        }
        let points: Vec<Vec<f64>> = (0..count)
            .map(|i| {
                let t = if count > 1 {
                    i as f64 / (count - 1) as f64
                } else {
                    0.0
                };
                vec![min * (1.0 - t) + max * t]
            })
            .collect();
        Self::from_fn(points, |p| f(p[0]))
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Discrete Legendre–Fenchel transform with the maximizing sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conjugate {
    pub function: SampledFunction,
    /// Index into the input samples attaining the maximum, per dual point.
    pub argmax: Vec<usize>,
}

/// `f*(d) = max_p ⟨d, p⟩ − f(p)` over the input samples, exactly.
pub fn fenchel_conjugate(input: &SampledFunction, dual: &[Vec<f64>]) -> Result<Conjugate> {
    if input.is_empty() || dual.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let dim = input.dim();
    if dual.iter().any(|d| d.len() != dim) {
        return Err(Error::input("dual points must match the input dimension"));
    }
    let (values, argmax): (Vec<f64>, Vec<usize>) = dual
        .par_iter()
        .map(|d| {
            input.points.iter().zip(&input.values).enumerate().fold(
                (f64::NEG_INFINITY, 0),
                |(best, arg), (i, (p, &v))| {
                    let s = dot(d, p) - v;
                    if s > best {
                        (s, i)
                    } else {
                        (best, arg)
                    }
                },
            )
        })
        .unzip();
    Ok(Conjugate {
        function: SampledFunction::new(dual.to_vec(), values)?,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_conjugate() {
        let beta = SampledFunction::on_line(-4.0, 4.0, 8001, |h| h * h).unwrap();
        let dual: Vec<Vec<f64>> = (0..41).map(|i| vec![-2.0 + 0.1 * i as f64]).collect();
        let alpha = fenchel_conjugate(&beta, &dual).unwrap();
        for (d, v) in dual.iter().zip(&alpha.function.values) {
            assert!((v - d[0] * d[0] / 4.0).abs() < 1e-3);
        }
    }

    #[test]
    fn constant_conjugate_hits_the_boundary() {
        let f = SampledFunction::on_line(-1.0, 1.0, 21, |_| 3.0).unwrap();
        let out = fenchel_conjugate(&f, &[vec![0.0], vec![2.0]]).unwrap();
        assert_eq!(out.function.values[0], -3.0);
        assert_eq!(out.argmax[1], 20);
        assert!((out.function.values[1] - -1.0).abs() < 1e-15);
    }
}
