use std::f64::consts::TAU;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Closed discrete curve on the lift of the torus.
///
/// Points `q_0 … q_{N−1}` are stored row-major; the closing point is
/// `q_N = q_0 + 2π h`, so the homology class can never drift.
#[derive(Clone, Debug, PartialEq)]
pub struct Loop {
    dim: usize,
    h: Vec<i64>,
    period: f64,
    points: Vec<f64>,
}

impl Loop {
    pub fn from_flat(dim: usize, h: Vec<i64>, period: f64, points: Vec<f64>) -> Result<Self> {
        if dim == 0 || h.len() != dim {
            return Err(Error::input(format!(
                "homology has {} entries for dimension {dim}",
                h.len()
            )));
        }
        if points.len() % dim != 0 || points.len() / dim < 2 {
            return Err(Error::input("a loop needs at least two points"));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::input(format!(
                "period must be positive, got {period}"
            )));
        }
        Ok(Self {
            dim,
            h,
            period,
            points,
        })
    }

    pub fn new(h: Vec<i64>, period: f64, points: &[Vec<f64>]) -> Result<Self> {
        let dim = h.len();
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::input(
                "every point must have one entry per coordinate",
            ));
        }
        Self::from_flat(dim, h, period, points.concat())
    }

    /// `q_j = start + 2π h j / N`, traversed at constant speed.
    pub fn straight(start: &[f64], h: &[i64], period: f64, segments: usize) -> Self {
        let dim = start.len();
        let mut points = Vec::with_capacity(dim * segments);
        for j in 0..segments {
            let t = j as f64 / segments as f64;
            points.extend(start.iter().zip(h).map(|(s, &k)| s + TAU * k as f64 * t));
        }
        Self {
            dim,
            h: h.to_vec(),
            period,
            points,
        }
    }

    /// `N` copies of `x` with `h = 0`.
    pub fn constant(x: &[f64], period: f64, segments: usize) -> Self {
        Self::straight(x, &vec![0; x.len()], period, segments)
    }

    pub fn segments(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn homology(&self) -> &[i64] {
        &self.h
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn set_period(&mut self, period: f64) {
        assert!(
            period.is_finite() && period > 0.0,
            "period must be positive"
        );
        self.period = period;
    }

    pub fn with_period(mut self, period: f64) -> Self {
        self.set_period(period);
        self
    }

    pub fn point(&self, j: usize) -> &[f64] {
        &self.points[j * self.dim..(j + 1) * self.dim]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn points_mut(&mut self) -> &mut [f64] {
        &mut self.points
    }

    /// `q_j` for any `j`, applying the closure shift across the seam.
    pub fn lifted(&self, j: usize, k: usize) -> f64 {
        let n = self.segments();
        let wraps = (j / n) as f64;
        self.points[(j % n) * self.dim + k] + wraps * TAU * self.h[k] as f64
    }

    /// `ρ = 2π h / T`.
    pub fn rotation_vector(&self) -> Vec<f64> {
        self.h
            .iter()
            .map(|&k| TAU * k as f64 / self.period)
            .collect()
    }

    /// Same curve started at `q_shift`.
    pub fn relabel(&self, shift: usize) -> Self {
        let n = self.segments();
        let mut points = Vec::with_capacity(self.points.len());
        for j in 0..n {
            points.extend((0..self.dim).map(|k| self.lifted(j + shift % n, k)));
        }
        Self {
            points,
            ..self.clone()
        }
    }

    /// Translates every point by `2π m`.
    pub fn deck(&self, m: &[i64]) -> Self {
        let mut out = self.clone();
        for (idx, q) in out.points.iter_mut().enumerate() {
            *q += TAU * m[idx % self.dim] as f64;
        }
        out
    }

    /// Piecewise-linear resampling to `segments` equally spaced parameters.
    pub fn resample(&self, segments: usize) -> Self {
        let n = self.segments();
        let mut points = Vec::with_capacity(segments * self.dim);
        for j in 0..segments {
            let s = j as f64 * n as f64 / segments as f64;
            let i = s.floor() as usize;
            let frac = s - i as f64;
            for k in 0..self.dim {
                let a = self.lifted(i, k);
                let b = self.lifted(i + 1, k);
                points.push(a + frac * (b - a));
            }
        }
        Self {
            points,
            ..self.clone()
        }
    }

    /// Euclidean length of the lifted polygon, closing segment included.
    pub fn length(&self) -> f64 {
        let n = self.segments();
        (0..n)
            .map(|j| {
                (0..self.dim)
                    .map(|k| {
                        let d = self.lifted(j + 1, k) - self.lifted(j, k);
                        d * d
                    })
                    .sum::<f64>()
                    .sqrt()
            })
            .sum()
    }

    /// Moves the points along the polygon so that consecutive points are
    /// equally spaced in arc length; `q_0` stays put. Degenerate (constant)
    /// loops are left untouched.
    pub fn equalize_arc_length(&mut self) {
        let n = self.segments();
        let dim = self.dim;
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        for j in 0..n {
            let len = (0..dim)
                .map(|k| {
                    let d = self.lifted(j + 1, k) - self.lifted(j, k);
                    d * d
                })
                .sum::<f64>()
                .sqrt();
            cumulative.push(cumulative[j] + len);
        }
        let total = cumulative[n];
        if !(total > 1e-12) {
            return;
        }
        let old = self.clone();
        let mut edge = 0;
        for i in 1..n {
            let target = total * i as f64 / n as f64;
            while edge + 1 < n && cumulative[edge + 1] < target {
                edge += 1;
            }
            let span = cumulative[edge + 1] - cumulative[edge];
            let frac = if span > 0.0 {
                ((target - cumulative[edge]) / span).clamp(0.0, 1.0)
            } else {
                0.0
            };
            for k in 0..dim {
                let a = old.lifted(edge, k);
                let b = old.lifted(edge + 1, k);
                self.points[i * dim + k] = a + frac * (b - a);
            }
        }
    }

    /// Unit tangents `(q_{j+1} − q_{j−1})/|·|`; zero where undefined.
    pub fn tangents(&self) -> Vec<f64> {
        let n = self.segments();
        let dim = self.dim;
        let mut out = vec![0.0; n * dim];
        for j in 0..n {
            let mut norm = 0.0;
            for k in 0..dim {
                let d = self.lifted(j + 1, k) - self.lifted(j + n - 1, k) + TAU * self.h[k] as f64;
                out[j * dim + k] = d;
                norm += d * d;
            }
            let norm = norm.sqrt();
            for v in &mut out[j * dim..(j + 1) * dim] {
                *v = if norm > 1e-300 { *v / norm } else { 0.0 };
            }
        }
        out
    }

    /// Points reduced to `[0, 2π)`, e.g. for plotting.
    pub fn reduced_points(&self) -> Vec<Vec<f64>> {
        self.points
            .chunks(self.dim)
            .map(|p| p.iter().map(|v| v.rem_euclid(TAU)).collect())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopDoc {
    #[serde(rename = "N")]
    segments: usize,
    #[serde(rename = "T")]
    period: f64,
    h: Vec<i64>,
    points: Vec<Vec<f64>>,
}

impl Serialize for Loop {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LoopDoc {
            segments: self.segments(),
            period: self.period,
            h: self.h.clone(),
            points: self.points.chunks(self.dim).map(<[f64]>::to_vec).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Loop {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = LoopDoc::deserialize(deserializer)?;
        if doc.points.len() != doc.segments {
            return Err(serde::de::Error::custom(format!(
                "N = {} but {} points given",
                doc.segments,
                doc.points.len()
            )));
        }
        Loop::new(doc.h, doc.period, &doc.points).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_loop_closes() {
        let lp = Loop::straight(&[0.0, 1.0], &[1, 0], 2.0, 8);
        assert_eq!(lp.segments(), 8);
        assert!((lp.lifted(8, 0) - TAU).abs() < 1e-15);
        assert_eq!(lp.lifted(8, 1), 1.0);
        let rho = lp.rotation_vector();
        assert!((rho[0] - TAU / 2.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let lp = Loop::straight(&[0.1, 0.2], &[1, -1], 3.0, 8);
        let text = serde_json::to_string(&lp).unwrap();
        assert!(text.starts_with("{\"N\":8,\"T\":3.0"));
        let back: Loop = serde_json::from_str(&text).unwrap();
        assert_eq!(back, lp);
        let bad = text.replace("\"N\":8", "\"N\":9");
        assert!(serde_json::from_str::<Loop>(&bad).is_err());
    }

    #[test]
    fn relabel_preserves_class() {
        let lp = Loop::straight(&[0.0], &[2], 1.0, 10);
        let r = lp.relabel(3);
        assert_eq!(r.homology(), &[2]);
        assert!((r.point(0)[0] - lp.point(3)[0]).abs() < 1e-15);
        assert!((r.point(9)[0] - lp.lifted(12, 0)).abs() < 1e-12);
    }

    #[test]
    fn resample_keeps_straight_lines() {
        let lp = Loop::straight(&[0.5], &[1], 1.0, 16).resample(32);
        let expected = Loop::straight(&[0.5], &[1], 1.0, 32);
        for (a, b) in lp.points().iter().zip(expected.points()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
