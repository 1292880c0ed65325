//! Closed-form and quadrature values of the restricted α functions.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelKind, ChannelModelSpec, Variant};
use crate::error::{Error, Result};
use crate::quadrature::integrate;

const QUAD_TOL: f64 = 1e-12;

/// Relative slack on the flat test, absorbing quadrature rounding.
pub const FLAT_REL_TOL: f64 = 1e-12;

/// `L = m v² + u (1 − cos x)` on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PendulumSpec {
    pub m: f64,
    pub u: f64,
}

impl PendulumSpec {
    pub const UNIT: Self = Self { m: 1.0, u: 1.0 };

    pub fn new(m: f64, u: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::input(format!(
                "pendulum mass must be positive, got {m}"
            )));
        }
        if !(u.is_finite() && u >= 0.0) {
            return Err(Error::input(format!(
                "pendulum amplitude must be non-negative, got {u}"
            )));
        }
        Ok(Self { m, u })
    }

    /// Momentum `p = ∂L/∂v` on the energy level `H = E`.
    pub fn momentum(&self, x: f64, energy: f64) -> f64 {
        2.0 * (self.m * (energy + self.u * (1.0 - x.cos())))
            .max(0.0)
            .sqrt()
    }

    /// `H(x, p) = p²/(4m) − u (1 − cos x)`.
    pub fn hamiltonian(&self, x: f64, p: f64) -> f64 {
        p * p / (4.0 * self.m) - self.u * (1.0 - x.cos())
    }

    /// Mean momentum `(1/2π) ∮ p dx` over a rotating orbit of energy `E ≥ 0`.
    pub fn mean_momentum(&self, energy: f64) -> f64 {
        integrate(|x| self.momentum(x, energy), 0.0, TAU, QUAD_TOL) / TAU
    }
}

/// Quadric geodesic channel `α(c) = −δ + Σ q_k c_k²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicChannelSpec {
    pub q: Vec<f64>,
    pub offset: f64,
}

impl GeodesicChannelSpec {
    pub fn new(q: Vec<f64>, offset: f64) -> Result<Self> {
        if q.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
            return Err(Error::input("geodesic coefficients must be positive"));
        }
        Ok(Self { q, offset })
    }

    pub fn alpha(&self, c: &[f64]) -> f64 {
        -self.offset + self.q.iter().zip(c).map(|(q, c)| q * c * c).sum::<f64>()
    }

    pub fn gradient(&self, c: &[f64]) -> Vec<f64> {
        self.q.iter().zip(c).map(|(q, c)| 2.0 * q * c).collect()
    }
}

/// Half-length `c*` of the pendulum flat, the mean separatrix momentum.
pub fn pendulum_flat_boundary(spec: PendulumSpec) -> Result<f64> {
    if spec.u == 0.0 {
        return Err(Error::DegenerateFlat(
            "without potential the pendulum flat collapses to a point".into(),
        ));
    }
    let spec = PendulumSpec::new(spec.m, spec.u)?;
    Ok(spec.mean_momentum(0.0))
}

/// `α(c)` of the pendulum: 0 on the flat, otherwise the energy whose rotating
/// orbit has mean momentum `|c|`.
pub fn pendulum_alpha(spec: PendulumSpec, c: f64) -> Result<f64> {
    if !c.is_finite() {
        return Err(Error::input(format!("non-finite cohomology value {c}")));
    }
    let spec = PendulumSpec::new(spec.m, spec.u)?;
    let target = c.abs();
    if target <= spec.mean_momentum(0.0) * (1.0 + FLAT_REL_TOL) {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = (target + 1.0).powi(2) * 1f64.max(1.0 / (4.0 * spec.m));
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if spec.mean_momentum(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Derivative of [`pendulum_alpha`]: the rotation number on the energy level.
pub fn pendulum_alpha_derivative(spec: PendulumSpec, c: f64) -> Result<f64> {
    let e = pendulum_alpha(spec, c)?;
    if e == 0.0 {
        return Ok(0.0);
    }
    // dI/dE = (1/2π) ∮ 2m/p dx, and dα/dc = 1 / (dI/dE).
    let inv = integrate(|x| 2.0 * spec.m / spec.momentum(x, e), 0.0, TAU, QUAD_TOL) / TAU;
    Ok(c.signum() / inv)
}

fn check_subspace(c: &[f64]) -> Result<()> {
    match c.last() {
        Some(&last) if last != 0.0 => Err(Error::SubspaceViolation(c.to_vec())),
        _ => Ok(()),
    }
}

/// Pendulum-channel α of the lowest-energy model on `c_n = 0`.
pub fn alpha_a(c: &[f64]) -> Result<f64> {
    check_subspace(c)?;
    let mut total = 0.0;
    for &ci in &c[..c.len().saturating_sub(1)] {
        total += pendulum_alpha(PendulumSpec::UNIT, ci)?;
    }
    Ok(total)
}

/// `α_{B_i}(c) = −δ_i + Σ_k 16 c_k² − 12 c_i²` for 1-based `i`.
pub fn alpha_b(i: usize, c: &[f64], delta: &[f64]) -> Result<f64> {
    check_subspace(c)?;
    let count = c.len().saturating_sub(1);
    if i == 0 || i > count || i > delta.len() {
        return Err(Error::ChannelIndex { index: i, count });
    }
    let sum: f64 = c[..count].iter().map(|v| 16.0 * v * v).sum();
    Ok(-delta[i - 1] + sum - 12.0 * c[i - 1] * c[i - 1])
}

/// Geodesic channel of the drift model: `c₁ + c₁²/2 + c₂²/4 − δ`.
pub fn alpha_b_drift(c: &[f64], delta: f64) -> Result<f64> {
    check_subspace(c)?;
    if c.len() != 3 {
        return Err(Error::input("the drift model lives in dimension 3"));
    }
    Ok(c[0] + 0.5 * c[0] * c[0] + 0.25 * c[1] * c[1] - delta)
}

/// Pendulum channel of the drift model: `c₁ + c₁²/2 + α_pend(½, 1; c₂)`.
pub fn alpha_a_drift(c: &[f64]) -> Result<f64> {
    check_subspace(c)?;
    if c.len() != 3 {
        return Err(Error::input("the drift model lives in dimension 3"));
    }
    let pend = pendulum_alpha(PendulumSpec { m: 0.5, u: 1.0 }, c[1])?;
    Ok(c[0] + 0.5 * c[0] * c[0] + pend)
}

/// The `2^{n−1}` points where every `α_{B_i}` vanishes with equal `|c_k|`.
pub fn corner_coordinates(n: usize, delta: f64) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::input("corners need n >= 2"));
    }
    let r = (delta / (4.0 * (4.0 * n as f64 - 7.0))).sqrt();
    let m = n - 1;
    Ok((0..1usize << m)
        .map(|mask| {
            let mut p: Vec<f64> = (0..m)
                .map(|k| if mask >> k & 1 == 1 { -r } else { r })
                .collect();
            p.push(0.0);
            p
        })
        .collect())
}

/// Crossings `(0, ±2√δ, 0)` of the drift model's two restricted zero sets.
pub fn drift_corner_coordinates(delta: f64) -> Vec<Vec<f64>> {
    let r = 2.0 * delta.sqrt();
    vec![vec![0.0, r, 0.0], vec![0.0, -r, 0.0]]
}

/// Restricted α values of a channel model on `c_n = 0`, derived from the
/// metric plateaus in `spec`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictedAlphas {
    pub a: f64,
    /// `(channel, α_B)` for each geodesic channel.
    pub b: Vec<(ChannelKind, f64)>,
}

impl RestrictedAlphas {
    pub fn max(&self) -> f64 {
        self.b.iter().fold(self.a, |m, &(_, v)| m.max(v))
    }

    /// Label of the largest restricted value; `A` wins ties.
    pub fn argmax(&self) -> ChannelKind {
        let mut best = (ChannelKind::A, self.a);
        for &(k, v) in &self.b {
            if v > best.1 {
                best = (k, v);
            }
        }
        best.0
    }
}

/// Geodesic channel of `spec` as a quadric in `(c_1, …, c_{n−1})`, including
/// the linear drift term when present: `Σ (c_k²/(4κg_k) + c_k w_k) − δ`.
pub fn geodesic_alpha(spec: &ChannelModelSpec, kind: ChannelKind, c: &[f64]) -> Result<f64> {
    check_subspace(c)?;
    let i = match kind {
        ChannelKind::B(i) if i >= 1 && i <= spec.geodesic_count() => i,
        ChannelKind::B(i) => {
            return Err(Error::ChannelIndex {
                index: i,
                count: spec.geodesic_count(),
            })
        }
        _ => return Err(Error::input("geodesic_alpha needs a B channel")),
    };
    let g = spec.metric_plateau(kind);
    let kappa = spec.kinetic_weight();
    let w = spec.drift();
    let mut total = -spec.delta[i - 1];
    for k in 0..spec.n - 1 {
        total += c[k] * c[k] / (4.0 * kappa[k] * g[k]) + c[k] * w[k];
    }
    Ok(total)
}

/// Pendulum channel of `spec`: a pendulum on each pendulum axis, free motion
/// elsewhere.
pub fn pendulum_channel_alpha(spec: &ChannelModelSpec, c: &[f64]) -> Result<f64> {
    check_subspace(c)?;
    let g = spec.metric_plateau(ChannelKind::A);
    let kappa = spec.kinetic_weight();
    let w = spec.drift();
    let axes = spec.pendulum_axes();
    let mut total = 0.0;
    for k in 0..spec.n - 1 {
        let m = kappa[k] * g[k];
        if axes.contains(&k) {
            // The drift only adds the exact form −2m w dx to L.
            total += pendulum_alpha(PendulumSpec { m, u: 1.0 }, c[k] + 2.0 * m * w[k])?
                - m * w[k] * w[k];
        } else {
            total += c[k] * c[k] / (4.0 * m) + c[k] * w[k];
        }
    }
    Ok(total)
}

pub fn restricted_alphas(spec: &ChannelModelSpec, c: &[f64]) -> Result<RestrictedAlphas> {
    let a = pendulum_channel_alpha(spec, c)?;
    let b = (1..=spec.geodesic_count())
        .map(|i| {
            let kind = ChannelKind::B(i);
            geodesic_alpha(spec, kind, c).map(|v| (kind, v))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RestrictedAlphas { a, b })
}

/// Analytic corner points of a channel model.
pub fn model_corners(spec: &ChannelModelSpec) -> Result<Vec<Vec<f64>>> {
    match spec.variant {
        Variant::LowestEnergy => {
            let delta = spec.delta.first().copied().unwrap_or(0.5);
            if spec.delta.iter().any(|&d| d != delta) {
                return Err(Error::input("analytic corners assume equal delta values"));
            }
            // Equal |c_k| on every vanishing quadric: Σ_k c²/(4 κ g_k) = δ.
            let g = spec.metric_plateau(ChannelKind::B(1));
            let q_sum: f64 = (0..spec.n - 1).map(|k| 1.0 / (4.0 * g[k])).sum();
            let r = (delta / q_sum).sqrt();
            let m = spec.n - 1;
            Ok((0..1usize << m)
                .map(|mask| {
                    let mut p: Vec<f64> = (0..m)
                        .map(|k| if mask >> k & 1 == 1 { -r } else { r })
                        .collect();
                    p.push(0.0);
                    p
                })
                .collect())
        }
        Variant::HigherEnergyDrift => Ok(drift_corner_coordinates(spec.delta[0])),
    }
}

/// `4√2/π`.
pub fn unit_flat_boundary() -> f64 {
    4.0 * 2f64.sqrt() / PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_boundary_unit() {
        let c = pendulum_flat_boundary(PendulumSpec::UNIT).unwrap();
        assert!((c - unit_flat_boundary()).abs() < 1e-11);
        assert!((c - 1.800_632).abs() < 1e-6);
    }

    #[test]
    fn flat_boundary_errors_without_potential() {
        assert!(matches!(
            pendulum_flat_boundary(PendulumSpec { m: 1.0, u: 0.0 }),
            Err(Error::DegenerateFlat(_))
        ));
    }

    #[test]
    fn flat_boundary_scaling() {
        let c = pendulum_flat_boundary(PendulumSpec { m: 0.25, u: 1.0 }).unwrap();
        assert!((c - 0.5 * unit_flat_boundary()).abs() < 1e-11);
        let c = pendulum_flat_boundary(PendulumSpec { m: 2.0, u: 3.0 }).unwrap();
        assert!((c - 6f64.sqrt() * unit_flat_boundary()).abs() < 1e-10);
    }

    #[test]
    fn pendulum_alpha_round_trip() {
        let spec = PendulumSpec::UNIT;
        assert_eq!(pendulum_alpha(spec, 0.0).unwrap(), 0.0);
        assert_eq!(
            pendulum_alpha(spec, unit_flat_boundary() * (1.0 - 1e-12)).unwrap(),
            0.0
        );
        let e = pendulum_alpha(spec, 2.5).unwrap();
        assert!(e > 0.0);
        assert!((spec.mean_momentum(e) - 2.5).abs() < 1e-8);
        assert!(pendulum_alpha(spec, f64::NAN).is_err());
    }

    #[test]
    fn free_particle_limit() {
        let e = pendulum_alpha(PendulumSpec { m: 1.0, u: 0.0 }, 3.0).unwrap();
        assert!((e - 2.25).abs() < 1e-9);
    }

    #[test]
    fn derivative_matches_differences() {
        let spec = PendulumSpec::UNIT;
        let c = 2.4;
        let h = 1e-5;
        let fd = (pendulum_alpha(spec, c + h).unwrap() - pendulum_alpha(spec, c - h).unwrap())
            / (2.0 * h);
        assert!((fd - pendulum_alpha_derivative(spec, c).unwrap()).abs() < 1e-5);
    }

    #[test]
    fn alpha_a_examples() {
        assert_eq!(alpha_a(&[0.0, 0.0]).unwrap(), 0.0);
        assert_eq!(alpha_a(&[unit_flat_boundary(), 0.0]).unwrap(), 0.0);
        let v = alpha_a(&[2.5, 0.1, 0.0]).unwrap();
        assert_eq!(v, pendulum_alpha(PendulumSpec::UNIT, 2.5).unwrap());
        assert!(matches!(
            alpha_a(&[0.0, 1.0]),
            Err(Error::SubspaceViolation(_))
        ));
    }

    #[test]
    fn alpha_b_examples() {
        let c2 = [1.0 / 8f64.sqrt(), 0.0];
        assert!(alpha_b(1, &c2, &[0.5]).unwrap().abs() < 1e-15);
        assert_eq!(alpha_b(1, &[0.0, 0.0], &[0.5]).unwrap(), -0.5);
        let r = 1.0 / 40f64.sqrt();
        assert!(alpha_b(1, &[r, r, 0.0], &[0.5, 0.5]).unwrap().abs() < 1e-15);
        assert!(matches!(
            alpha_b(2, &c2, &[0.5]),
            Err(Error::ChannelIndex { index: 2, count: 1 })
        ));
    }

    #[test]
    fn drift_examples() {
        let d = 0.04f64;
        assert!(alpha_b_drift(&[0.0, 2.0 * d.sqrt(), 0.0], d).unwrap().abs() < 1e-15);
        assert_eq!(alpha_b_drift(&[0.0, 0.0, 0.0], d).unwrap(), -d);
    }

    #[test]
    fn corners_vanish_every_b() {
        for n in 2..=4 {
            let delta = vec![0.5; n - 1];
            let pts = corner_coordinates(n, 0.5).unwrap();
            assert_eq!(pts.len(), 1 << (n - 1));
            for p in &pts {
                for i in 1..n {
                    assert!(alpha_b(i, p, &delta).unwrap().abs() < 1e-12);
                }
                assert!(p[..n - 1].iter().all(|v| v.abs() < unit_flat_boundary()));
            }
        }
        let p = corner_coordinates(3, 0.5).unwrap();
        assert!((p[0][0] - 0.158_114).abs() < 1e-6);
        assert!(corner_coordinates(1, 0.5).is_err());
    }

    #[test]
    fn generic_quadric_matches_closed_form() {
        let spec = ChannelModelSpec::lowest_energy(3);
        let c = [0.3, -0.2, 0.0];
        for i in 1..=2 {
            let g = geodesic_alpha(&spec, ChannelKind::B(i), &c).unwrap();
            assert!((g - alpha_b(i, &c, &[0.5, 0.5]).unwrap()).abs() < 1e-14);
        }
        let drift = ChannelModelSpec::higher_energy(0.04);
        let c = [0.1, 0.3, 0.0];
        let g = geodesic_alpha(&drift, ChannelKind::B(1), &c).unwrap();
        assert!((g - alpha_b_drift(&c, 0.04).unwrap()).abs() < 1e-14);
        let a = pendulum_channel_alpha(&drift, &c).unwrap();
        assert!((a - alpha_a_drift(&c).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn model_corners_match() {
        let spec = ChannelModelSpec::lowest_energy(2);
        let pts = model_corners(&spec).unwrap();
        assert!((pts[0][0] - 1.0 / 8f64.sqrt()).abs() < 1e-15);
    }
}
