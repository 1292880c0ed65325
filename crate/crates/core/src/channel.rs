//! Channel constructions along the last torus coordinate.
//!
//! The last coordinate `x_n` is split into plateaus: a pendulum channel `A`,
//! geodesic channels `B_i` and barrier channels `C_j`. Every field of a
//! channel model depends on `x_n` only through a [`ChannelProfile`].

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{smoothstep, ScalarField, SharedField};
use crate::model::MechanicalLagrangian;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Pendulum channel on every `x_i`, `i < n`; `α` has its lowest flat at 0.
    LowestEnergy,
    /// `n = 3` model with unit drift along `x_1` and one geodesic channel.
    HigherEnergyDrift,
}

/// How the diagonal metric entries of a channel are read.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricProfile {
    /// Listed entries are the amplitudes `a_k`; the metric holds `a_k²`.
    #[default]
    Amplitude,
    /// Listed entries are the metric coefficients `a_k²` themselves.
    Squared,
}

/// Parameters of a channel Lagrangian.
///
/// `half_width` and `smoothing` fall back to `π/(8m)` and a quarter of the
/// half width, where `m` is the number of channels of type `A` plus `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelModelSpec {
    pub n: usize,
    #[serde(rename = "K", default = "default_barrier")]
    pub barrier: f64,
    #[serde(default)]
    pub delta: Vec<f64>,
    #[serde(default)]
    pub half_width: Option<f64>,
    #[serde(default)]
    pub smoothing: Option<f64>,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    #[serde(default)]
    pub metric_profile: MetricProfile,
}

fn default_barrier() -> f64 {
    100.0
}

fn default_variant() -> Variant {
    Variant::LowestEnergy
}

impl ChannelModelSpec {
    /// Lowest-energy model in dimension `n` with `K = 100` and `δ_i = ½`.
    pub fn lowest_energy(n: usize) -> Self {
        Self {
            n,
            barrier: default_barrier(),
            delta: vec![0.5; n.saturating_sub(1)],
            half_width: None,
            smoothing: None,
            variant: Variant::LowestEnergy,
            metric_profile: MetricProfile::Amplitude,
        }
    }

    /// Three-dimensional drift model with a single geodesic channel.
    pub fn higher_energy(delta: f64) -> Self {
        Self {
            n: 3,
            barrier: default_barrier(),
            delta: vec![delta],
            half_width: None,
            smoothing: None,
            variant: Variant::HigherEnergyDrift,
            metric_profile: MetricProfile::Amplitude,
        }
    }

    pub fn with_barrier(mut self, k: f64) -> Self {
        self.barrier = k;
        self
    }

    pub fn with_widths(mut self, half_width: f64, smoothing: f64) -> Self {
        self.half_width = Some(half_width);
        self.smoothing = Some(smoothing);
        self
    }

    /// Number of geodesic channels `B_i`.
    pub fn geodesic_count(&self) -> usize {
        match self.variant {
            Variant::LowestEnergy => self.n.saturating_sub(1),
            Variant::HigherEnergyDrift => 1,
        }
    }

    /// Number of channels of type `A` or `B`; also the number of `C` channels.
    pub fn slot_count(&self) -> usize {
        self.geodesic_count() + 1
    }

    pub fn resolved_half_width(&self) -> f64 {
        self.half_width
            .unwrap_or(PI / (8.0 * self.slot_count() as f64))
    }

    pub fn resolved_smoothing(&self) -> f64 {
        self.smoothing.unwrap_or(self.resolved_half_width() / 4.0)
    }

    /// Copy with the default widths written out explicitly; an empty `delta`
    /// becomes `½` for every geodesic channel.
    pub fn resolved(&self) -> Self {
        let mut out = self.clone();
        if out.delta.is_empty() && self.n > 1 {
            out.delta = vec![0.5; self.geodesic_count()];
        }
        out.half_width = Some(self.resolved_half_width());
        out.smoothing = Some(self.resolved_smoothing());
        out
    }

    /// Coordinates carrying the pendulum term `u₂(x_n)(1 − cos x_i)`.
    pub fn pendulum_axes(&self) -> Vec<usize> {
        match self.variant {
            Variant::LowestEnergy => (0..self.n - 1).collect(),
            Variant::HigherEnergyDrift => vec![1],
        }
    }

    pub fn kinetic_weight(&self) -> Vec<f64> {
        match self.variant {
            Variant::LowestEnergy => vec![1.0; self.n],
            Variant::HigherEnergyDrift => vec![0.5; self.n],
        }
    }

    pub fn drift(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n];
        if self.variant == Variant::HigherEnergyDrift {
            w[0] = 1.0;
        }
        w
    }

    /// Plateau values of the metric coefficients `g_k = a_k²` in each channel.
    pub fn metric_plateau(&self, kind: ChannelKind) -> Vec<f64> {
        let n = self.n;
        let k = self.barrier;
        let (barrier_g, read): (f64, fn(f64) -> f64) = match self.metric_profile {
            MetricProfile::Amplitude => (k * k, |a| a * a),
            MetricProfile::Squared => (k, |a| a),
        };
        match (self.variant, kind) {
            (_, ChannelKind::A) => vec![1.0; n],
            (_, ChannelKind::C(_)) => vec![barrier_g; n],
            (Variant::LowestEnergy, ChannelKind::B(i)) => (0..n)
                .map(|slot| read(if slot + 1 == i { 0.25 } else { 0.125 }))
                .collect(),
            (Variant::HigherEnergyDrift, ChannelKind::B(_)) => {
                let mut g = vec![1.0; n];
                g[1] = 2.0;
                g
            }
        }
    }

    /// Barrier metric coefficient `a_n²` inside the `C` channels.
    pub fn barrier_metric(&self) -> f64 {
        self.metric_plateau(ChannelKind::C(1))[self.n - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::config("dimension n must be positive"));
        }
        if !(self.barrier.is_finite() && self.barrier > 0.0) {
            return Err(Error::config(format!(
                "K must be positive, got {}",
                self.barrier
            )));
        }
        if self.variant == Variant::HigherEnergyDrift && self.n != 3 {
            return Err(Error::config("the drift variant is defined for n = 3"));
        }
        let expected = if self.n == 1 {
            0
        } else {
            self.geodesic_count()
        };
        if self.delta.len() != expected {
            return Err(Error::config(format!(
                "expected {expected} delta values, got {}",
                self.delta.len()
            )));
        }
        for &d in &self.delta {
            if !(d > 0.0 && d <= 0.5) {
                return Err(Error::config(format!(
                    "delta must lie in (0, 1/2], got {d}"
                )));
            }
        }
        let w = self.resolved_half_width();
        let s = self.resolved_smoothing();
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::config(format!(
                "half_width must be positive, got {w}"
            )));
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::config(format!(
                "smoothing must be positive, got {s}"
            )));
        }
        if s >= w / 2.0 {
            return Err(Error::config(format!(
                "smoothing {s} must be smaller than half of half_width {w}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelKind {
    A,
    /// Geodesic channel, 1-based.
    B(usize),
    /// Barrier channel, 1-based.
    C(usize),
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelKind::A => write!(f, "A"),
            ChannelKind::B(i) => write!(f, "B{i}"),
            ChannelKind::C(j) => write!(f, "C{j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Channel {
    pub kind: ChannelKind,
    pub center: f64,
    pub half_width: f64,
}

/// Positions of all channels on the circle `x_n ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelLayout {
    pub channels: Vec<Channel>,
    pub smoothing: f64,
    /// Index of the coordinate the channels live on.
    pub axis: usize,
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

impl ChannelLayout {
    /// `A` at 0, `B_i` at `2πi/m`, `C_j` at `(2j − 1)π/m` with `m` slots.
    pub fn new(slots: usize, half_width: f64, smoothing: f64, axis: usize) -> Result<Self> {
        let m = slots as f64;
        let mut channels = vec![Channel {
            kind: ChannelKind::A,
            center: 0.0,
            half_width,
        }];
        for i in 1..slots {
            channels.push(Channel {
                kind: ChannelKind::B(i),
                center: TAU * i as f64 / m,
                half_width,
            });
        }
        for j in 1..=slots {
            channels.push(Channel {
                kind: ChannelKind::C(j),
                center: (2 * j - 1) as f64 * PI / m,
                half_width,
            });
        }
        channels.sort_by(|a, b| a.center.total_cmp(&b.center));
        let layout = Self {
            channels,
            smoothing,
            axis,
        };
        layout.check_overlap()?;
        Ok(layout)
    }

    fn check_overlap(&self) -> Result<()> {
        let count = self.channels.len();
        if count < 2 {
            return Ok(());
        }
        for idx in 0..count {
            let a = &self.channels[idx];
            let b = &self.channels[(idx + 1) % count];
            let reach = a.half_width + b.half_width + 2.0 * self.smoothing;
            let gap = circle_distance(a.center, b.center) - reach;
            if gap <= 0.0 {
                return Err(Error::ChannelOverlap {
                    first: a.kind.to_string(),
                    second: b.kind.to_string(),
                    gap,
                });
            }
        }
        Ok(())
    }

    pub fn channel(&self, kind: ChannelKind) -> Option<&Channel> {
        self.channels.iter().find(|c| c.kind == kind)
    }

    pub fn center(&self, kind: ChannelKind) -> Option<f64> {
        self.channel(kind).map(|c| c.center)
    }

    /// Channel whose core contains `y`, if any.
    pub fn core_at(&self, y: f64) -> Option<ChannelKind> {
        self.channels
            .iter()
            .find(|c| circle_distance(y, c.center) <= c.half_width)
            .map(|c| c.kind)
    }

    /// Weight of channel `idx` at `y` and its derivative in `y`.
    fn bump(&self, idx: usize, y: f64) -> (f64, f64) {
        let ch = &self.channels[idx];
        let raw = (y - ch.center).rem_euclid(TAU);
        let (d, sign) = if raw <= PI {
            (raw, 1.0)
        } else {
            (TAU - raw, -1.0)
        };
        if d <= ch.half_width {
            return (1.0, 0.0);
        }
        let t = (d - ch.half_width) / self.smoothing;
        if t >= 1.0 {
            return (0.0, 0.0);
        }
        let (s, ds) = smoothstep(t);
        (1.0 - s, -ds * sign / self.smoothing)
    }

    /// Profile equal to `values[kind]` on each listed core and `background`
    /// elsewhere.
    pub fn profile(&self, background: f64, values: &[(ChannelKind, f64)]) -> ChannelProfile {
        let plateaus = values
            .iter()
            .filter_map(|&(kind, v)| {
                self.channels
                    .iter()
                    .position(|c| c.kind == kind)
                    .map(|idx| (idx, v))
            })
            .filter(|&(_, v)| v != background)
            .collect();
        ChannelProfile {
            layout: Arc::new(self.clone()),
            background,
            plateaus,
        }
    }
}

/// Smooth function of `x_axis` built from channel plateaus.
#[derive(Clone, Debug)]
pub struct ChannelProfile {
    layout: Arc<ChannelLayout>,
    background: f64,
    /// `(channel index, plateau)`.
    plateaus: Vec<(usize, f64)>,
}

impl ChannelProfile {
    /// Value and derivative at `y = x_axis`.
    pub fn eval(&self, y: f64) -> (f64, f64) {
        // Cores are disjoint, so at most one bump is nonzero.
        for &(idx, plateau) in &self.plateaus {
            let (b, db) = self.layout.bump(idx, y);
            if b > 0.0 {
                let v = (1.0 - b) * self.background + b * plateau;
                return (v, (plateau - self.background) * db);
            }
        }
        (self.background, 0.0)
    }

    pub fn axis(&self) -> usize {
        self.layout.axis
    }
}

impl ScalarField for ChannelProfile {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x[self.layout.axis]).0
    }

    fn value_grad(&self, x: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let axis = self.layout.axis;
        let (v, dv) = self.eval(x[axis]);
        grad[axis] += scale * dv;
        v
    }
}

/// `U(x) = u₁(x_n) + u₂(x_n) Σ_{i ∈ axes} (1 − cos x_i)`.
#[derive(Clone, Debug)]
pub struct ChannelPotential {
    pub u1: ChannelProfile,
    pub u2: ChannelProfile,
    pub pendulum_axes: Vec<usize>,
}

impl ScalarField for ChannelPotential {
    fn value(&self, x: &[f64]) -> f64 {
        let axis = self.u1.axis();
        let (u1, _) = self.u1.eval(x[axis]);
        let (u2, _) = self.u2.eval(x[axis]);
        let sum: f64 = self.pendulum_axes.iter().map(|&i| 1.0 - x[i].cos()).sum();
        u1 + u2 * sum
    }

    fn value_grad(&self, x: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let axis = self.u1.axis();
        let (u1, du1) = self.u1.eval(x[axis]);
        let (u2, du2) = self.u2.eval(x[axis]);
        let mut sum = 0.0;
        for &i in &self.pendulum_axes {
            let (s, c) = x[i].sin_cos();
            sum += 1.0 - c;
            grad[i] += scale * u2 * s;
        }
        grad[axis] += scale * (du1 + du2 * sum);
        u1 + u2 * sum
    }
}

/// Channel structure attached to a built model.
#[derive(Clone, Debug)]
pub struct ChannelInfo {
    pub spec: ChannelModelSpec,
    pub layout: ChannelLayout,
}

impl ChannelInfo {
    pub fn geodesic_kinds(&self) -> Vec<ChannelKind> {
        (1..=self.spec.geodesic_count())
            .map(ChannelKind::B)
            .collect()
    }

    pub fn delta(&self, i: usize) -> f64 {
        self.spec.delta[i - 1]
    }
}

/// Builds the channel Lagrangian described by `spec`.
///
/// Outside the cores every field takes its barrier value, so the cores are the
/// only places where a loop can travel cheaply.
pub fn build_channel_model(spec: &ChannelModelSpec) -> Result<MechanicalLagrangian> {
    spec.validate()?;
    let n = spec.n;
    if n == 1 {
        return Ok(MechanicalLagrangian::pendulum(1.0, 1.0));
    }
    let layout = ChannelLayout::new(
        spec.slot_count(),
        spec.resolved_half_width(),
        spec.resolved_smoothing(),
        n - 1,
    )?;
    let b_kinds: Vec<ChannelKind> = (1..=spec.geodesic_count()).map(ChannelKind::B).collect();

    let mut u1_values = vec![(ChannelKind::A, 0.0)];
    for &kind in &b_kinds {
        if let ChannelKind::B(i) = kind {
            u1_values.push((kind, spec.delta[i - 1]));
        }
    }
    let u1 = layout.profile(spec.barrier, &u1_values);
    let u2 = layout.profile(0.0, &[(ChannelKind::A, 1.0)]);
    let potential = ChannelPotential {
        u1,
        u2,
        pendulum_axes: spec.pendulum_axes(),
    };

    let barrier_g = spec.metric_plateau(ChannelKind::C(1));
    let a_plateau = spec.metric_plateau(ChannelKind::A);
    let b_plateaus: Vec<Vec<f64>> = b_kinds.iter().map(|&k| spec.metric_plateau(k)).collect();
    let metric: Vec<SharedField> = (0..n)
        .map(|k| {
            let mut values = vec![(ChannelKind::A, a_plateau[k].sqrt())];
            for (kind, g) in b_kinds.iter().zip(&b_plateaus) {
                values.push((*kind, g[k].sqrt()));
            }
            Arc::new(layout.profile(barrier_g[k].sqrt(), &values)) as SharedField
        })
        .collect();

    MechanicalLagrangian::new(
        metric,
        spec.kinetic_weight(),
        spec.drift(),
        Arc::new(potential),
    )
    .map(|m| {
        m.with_channels(ChannelInfo {
            spec: spec.resolved(),
            layout,
        })
    })
}

/// Outcome of the barrier-height check `2√(K₁K₂)·width(C) > n + 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BarrierCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Compares `2√(K₁K₂)·width(C)` against `n + 1 + eps`, where `K₁` is the
/// kinetic coefficient of `x_n` inside a barrier channel, `K₂ = K` is the
/// barrier potential and `width(C)` is the core width.
pub fn barrier_check(spec: &ChannelModelSpec, eps: f64) -> BarrierCheck {
    let k1 = spec.kinetic_weight()[spec.n - 1] * spec.barrier_metric();
    let lhs = 2.0 * (k1 * spec.barrier).sqrt() * 2.0 * spec.resolved_half_width();
    let rhs = spec.n as f64 + 1.0 + eps;
    BarrierCheck {
        lhs,
        rhs,
        satisfied: lhs > rhs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n2() -> MechanicalLagrangian {
        build_channel_model(&ChannelModelSpec::lowest_energy(2)).unwrap()
    }

    #[test]
    fn u1_plateaus() {
        let m = n2();
        let pot = |x2: f64| m.potential().value(&[0.0, x2]);
        assert_eq!(pot(0.0), 0.0);
        assert_eq!(pot(PI / 2.0), 100.0);
        assert_eq!(pot(PI), 0.5);
        assert_eq!(pot(3.0 * PI / 2.0), 100.0);
    }

    #[test]
    fn u2_vanishes_away_from_a() {
        let m = n2();
        let spec = ChannelModelSpec::lowest_energy(2);
        let edge = spec.resolved_half_width() + spec.resolved_smoothing();
        assert_eq!(m.potential().value(&[PI, 0.0]), 2.0);
        let just_out = m.potential().value(&[PI, edge + 1e-9]);
        assert_eq!(just_out, m.potential().value(&[0.0, edge + 1e-9]));
    }

    #[test]
    fn metric_plateaus_follow_profile() {
        let m = n2();
        assert_eq!(m.metric_coefficients(&[0.3, 0.0]), vec![1.0, 1.0]);
        let b = m.metric_coefficients(&[0.3, PI]);
        assert!((b[0] - 1.0 / 16.0).abs() < 1e-15);
        assert!((b[1] - 1.0 / 64.0).abs() < 1e-15);
        let c = m.metric_coefficients(&[0.3, PI / 2.0]);
        assert!((c[0] - 1e4).abs() < 1e-9);
    }

    #[test]
    fn squared_profile_uses_raw_entries() {
        let mut spec = ChannelModelSpec::lowest_energy(3);
        spec.metric_profile = MetricProfile::Squared;
        assert_eq!(
            spec.metric_plateau(ChannelKind::B(2)),
            vec![0.125, 0.25, 0.125]
        );
        assert_eq!(spec.barrier_metric(), 100.0);
    }

    #[test]
    fn overlap_is_reported_with_names() {
        let spec = ChannelModelSpec::lowest_energy(2).with_widths(0.7, 0.3);
        match build_channel_model(&spec) {
            Err(Error::ChannelOverlap { first, second, .. }) => {
                assert!(first.starts_with('A') || first.starts_with('C'));
                assert_ne!(first, second);
            }
            other => panic!("expected overlap, got {other:?}"),
        }
    }

    #[test]
    fn smoothing_must_be_small() {
        let spec = ChannelModelSpec::lowest_energy(2).with_widths(0.2, 0.15);
        assert!(matches!(build_channel_model(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn barrier_check_flags_small_k() {
        let ok = barrier_check(&ChannelModelSpec::lowest_energy(2), 0.0);
        assert!(ok.satisfied);
        let weak = barrier_check(&ChannelModelSpec::lowest_energy(2).with_barrier(1.0), 0.0);
        assert!(!weak.satisfied);
        assert!((weak.lhs - PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn profile_gradient_matches_fd() {
        let m = n2();
        let spec = ChannelModelSpec::lowest_energy(2);
        let y = spec.resolved_half_width() + 0.4 * spec.resolved_smoothing();
        let x = [0.7, y];
        let mut g = [0.0; 2];
        m.potential().value_grad(&x, 1.0, &mut g);
        let h = 1e-7;
        let fd =
            (m.potential().value(&[0.7, y + h]) - m.potential().value(&[0.7, y - h])) / (2.0 * h);
        assert!((fd - g[1]).abs() < 1e-4 * fd.abs().max(1.0));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ChannelModelSpec::lowest_energy(2).resolved();
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"K\""));
        assert!(text.contains("\"lowest_energy\""));
        let back: ChannelModelSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<ChannelModelSpec>(r#"{"n":2,"bogus":1}"#).is_err());
    }
}
