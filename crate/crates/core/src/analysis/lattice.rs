use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One lattice axis; `count = 1` pins the coordinate at `min`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn fixed(value: f64) -> Self {
        Self::new(value, value, 1)
    }

    pub fn step(&self) -> f64 {
        if self.count > 1 {
            (self.max - self.min) / (self.count - 1) as f64
        } else {
            0.0
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count > 1 {
            // Symmetric formula so that mirrored grids are exactly mirrored.
            let t = i as f64 / (self.count - 1) as f64;
            self.min * (1.0 - t) + self.max * t
        } else {
            self.min
        }
    }
}

/// Axis-aligned lattice in cohomology space, row-major with the first axis
/// varying slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lattice {
    pub axes: Vec<Axis>,
}

impl Lattice {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        let lattice = Self { axes };
        lattice.validate()?;
        Ok(lattice)
    }

    /// Slice along coordinate `axis` with the others pinned at zero.
    pub fn slice(dim: usize, axis: usize, min: f64, max: f64, count: usize) -> Result<Self> {
        Self::new(
            (0..dim)
                .map(|k| {
                    if k == axis {
                        Axis::new(min, max, count)
                    } else {
                        Axis::fixed(0.0)
                    }
                })
                .collect(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() {
            return Err(Error::EmptyGrid);
        }
        for (k, a) in self.axes.iter().enumerate() {
            if !(a.min.is_finite() && a.max.is_finite()) || a.count == 0 || a.max < a.min {
                return Err(Error::config(format!(
                    "axis {k}: need finite min ≤ max and count ≥ 1, got {a:?}"
                )));
            }
            if a.count == 1 && a.max != a.min {
                return Err(Error::config(format!(
                    "axis {k}: a single point needs min = max"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            out[k] = idx % self.axes[k].count;
            idx /= self.axes[k].count;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.count + i)
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.value(i))
            .collect()
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Axes with more than one point.
    pub fn free_axes(&self) -> Vec<usize> {
        (0..self.dim())
            .filter(|&k| self.axes[k].count > 1)
            .collect()
    }

    /// Lattice neighbours differing by one step along one axis.
    pub fn neighbours(&self, idx: usize) -> Vec<usize> {
        let multi = self.unravel(idx);
        let mut out = Vec::new();
        for k in 0..self.dim() {
            for delta in [-1i64, 1] {
                let j = multi[k] as i64 + delta;
                if j >= 0 && (j as usize) < self.axes[k].count {
                    let mut m = multi.clone();
                    m[k] = j as usize;
                    out.push(self.ravel(&m));
                }
            }
        }
        out
    }

    /// Index of the point mirrored through the origin, if it is on the
    /// lattice.
    pub fn mirror(&self, idx: usize) -> Option<usize> {
        let multi = self.unravel(idx);
        let mut out = Vec::with_capacity(multi.len());
        for (&i, a) in multi.iter().zip(&self.axes) {
            if a.count == 1 {
                if a.min != 0.0 {
                    return None;
                }
                out.push(0);
            } else {
                if (a.min + a.max).abs() > 1e-12 * (1.0 + a.max.abs()) {
                    return None;
                }
                out.push(a.count - 1 - i);
            }
        }
        Some(self.ravel(&out))
    }

    /// All aligned triples `(a, m, b)` with `m` the midpoint of `a` and `b`,
    /// along lattice lines and diagonals with spacing up to `max_stride`.
    pub fn midpoint_triples(&self, max_stride: usize) -> Vec<(usize, usize, usize)> {
        let dim = self.dim();
        let mut dirs: Vec<Vec<i64>> = Vec::new();
        for code in 0..3usize.pow(dim as u32) {
            let mut d = vec![0i64; dim];
            let mut rem = code;
            for v in d.iter_mut() {
                *v = (rem % 3) as i64 - 1;
                rem /= 3;
            }
            // Keep one of ±d.
            if d.iter().find(|&&v| v != 0) == Some(&1) {
                dirs.push(d);
            }
        }
        let mut out = Vec::new();
        for idx in 0..self.len() {
            let multi = self.unravel(idx);
            for d in &dirs {
                for s in 1..=max_stride as i64 {
                    let lo: Vec<i64> = multi
                        .iter()
                        .zip(d)
                        .map(|(&m, &v)| m as i64 - s * v)
                        .collect();
                    let hi: Vec<i64> = multi
                        .iter()
                        .zip(d)
                        .map(|(&m, &v)| m as i64 + s * v)
                        .collect();
                    let inside = |p: &[i64]| {
                        p.iter()
                            .zip(&self.axes)
                            .all(|(&v, a)| v >= 0 && (v as usize) < a.count)
                    };
                    if inside(&lo) && inside(&hi) {
                        let lo: Vec<usize> = lo.into_iter().map(|v| v as usize).collect();
                        let hi: Vec<usize> = hi.into_iter().map(|v| v as usize).collect();
                        out.push((self.ravel(&lo), idx, self.ravel(&hi)));
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ravel_round_trip() {
        let l = Lattice::new(vec![Axis::new(-1.0, 1.0, 3), Axis::new(0.0, 2.0, 5)]).unwrap();
        for i in 0..l.len() {
            assert_eq!(l.ravel(&l.unravel(i)), i);
        }
        assert_eq!(l.point(7), vec![0.0, 1.0]);
    }

    #[test]
    fn mirror_and_triples() {
        let l = Lattice::slice(2, 0, -2.0, 2.0, 5).unwrap();
        assert_eq!(l.mirror(0), Some(4));
        assert_eq!(l.point(2), vec![0.0, 0.0]);
        let t = l.midpoint_triples(2);
        assert!(t.contains(&(0, 2, 4)));
        assert!(t.contains(&(1, 2, 3)));
        assert_eq!(t.len(), 4);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Lattice::new(vec![Axis::new(1.0, 0.0, 3)]).is_err());
        assert!(Lattice::new(vec![Axis::new(0.0, 1.0, 1)]).is_err());
        assert!(Lattice::new(vec![]).is_err());
    }
}
