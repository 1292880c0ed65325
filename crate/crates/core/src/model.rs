//! Mechanical Tonelli Lagrangians with a diagonal metric on the n-torus.

use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelInfo, ChannelModelSpec};
use crate::error::{Error, Result};
use crate::field::{
    grid_resolution, sampled_c1_norm, torus_grid, ConstantField, ScalarField, SharedField, SumField,
};

/// `L(x, v) = Σ κ_k a_k(x)² (v_k − w_k)² + U(x)`.
#[derive(Clone, Debug)]
pub struct MechanicalLagrangian {
    n: usize,
    metric: Vec<SharedField>,
    kinetic_weight: Vec<f64>,
    drift: Vec<f64>,
    potential: SharedField,
    channels: Option<ChannelInfo>,
    /// Set once the potential departs from the channel spec.
    modified: bool,
}

/// Fields of a Lagrangian evaluated at one point.
#[derive(Clone, Debug)]
pub struct PointData {
    pub potential: f64,
    pub potential_grad: Vec<f64>,
    /// Metric coefficients `g_k = a_k²`.
    pub metric: Vec<f64>,
    /// `∂g_k/∂x_i` stored at `k * n + i`.
    pub metric_grad: Vec<f64>,
}

impl PointData {
    pub fn new(n: usize) -> Self {
        Self {
            potential: 0.0,
            potential_grad: vec![0.0; n],
            metric: vec![0.0; n],
            metric_grad: vec![0.0; n * n],
        }
    }
}

impl MechanicalLagrangian {
    /// `metric` holds the amplitudes `a_k`, not their squares.
    pub fn new(
        metric: Vec<SharedField>,
        kinetic_weight: Vec<f64>,
        drift: Vec<f64>,
        potential: SharedField,
    ) -> Result<Self> {
        let n = metric.len();
        if n == 0 {
            return Err(Error::input("a Lagrangian needs at least one coordinate"));
        }
        if kinetic_weight.len() != n || drift.len() != n {
            return Err(Error::input(format!(
                "dimension mismatch: {n} metric fields, {} weights, {} drift entries",
                kinetic_weight.len(),
                drift.len()
            )));
        }
        if let Some(k) = kinetic_weight
            .iter()
            .find(|k| !(k.is_finite() && **k > 0.0))
        {
            return Err(Error::input(format!(
                "kinetic weight must be positive, got {k}"
            )));
        }
        if drift.iter().any(|w| !w.is_finite()) {
            return Err(Error::input("drift must be finite"));
        }
        Ok(Self {
            n,
            metric,
            kinetic_weight,
            drift,
            potential,
            channels: None,
            modified: false,
        })
    }

    /// Euclidean metric with unit weights, no drift.
    pub fn with_potential(n: usize, potential: SharedField) -> Result<Self> {
        let metric = (0..n)
            .map(|_| Arc::new(ConstantField(1.0)) as SharedField)
            .collect();
        Self::new(metric, vec![1.0; n], vec![0.0; n], potential)
    }

    /// One-dimensional pendulum `m v² + u (1 − cos x)`.
    pub fn pendulum(m: f64, u: f64) -> Self {
        Self {
            n: 1,
            metric: vec![Arc::new(ConstantField(m.sqrt()))],
            kinetic_weight: vec![1.0],
            drift: vec![0.0],
            potential: Arc::new(CosinePotential {
                amplitude: u,
                axes: vec![0],
            }),
            channels: None,
            modified: false,
        }
    }

    pub(crate) fn with_channels(mut self, info: ChannelInfo) -> Self {
        self.channels = Some(info);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn potential(&self) -> &dyn ScalarField {
        self.potential.as_ref()
    }

    pub fn metric_fields(&self) -> &[SharedField] {
        &self.metric
    }

    pub fn kinetic_weight(&self) -> &[f64] {
        &self.kinetic_weight
    }

    pub fn drift(&self) -> &[f64] {
        &self.drift
    }

    pub fn has_drift(&self) -> bool {
        self.drift.iter().any(|&w| w != 0.0)
    }

    /// Channel structure, present only for models built from a channel spec.
    pub fn channels(&self) -> Option<&ChannelInfo> {
        self.channels.as_ref()
    }

    /// The channel spec, if the model is still exactly the one it describes
    /// (no perturbation or shift applied).
    pub fn exact_channel_spec(&self) -> Option<&ChannelModelSpec> {
        self.channels
            .as_ref()
            .filter(|_| !self.modified)
            .map(|c| &c.spec)
    }

    pub fn metric_coefficients(&self, x: &[f64]) -> Vec<f64> {
        self.metric
            .iter()
            .map(|a| {
                let v = a.value(x);
                v * v
            })
            .collect()
    }

    /// Evaluates potential, metric and their gradients at `x`.
    pub fn point_data(&self, x: &[f64], out: &mut PointData) {
        let n = self.n;
        out.potential_grad.iter_mut().for_each(|g| *g = 0.0);
        out.metric_grad.iter_mut().for_each(|g| *g = 0.0);
        out.potential = self.potential.value_grad(x, 1.0, &mut out.potential_grad);
        for k in 0..n {
            let row = &mut out.metric_grad[k * n..(k + 1) * n];
            let a = self.metric[k].value_grad(x, 1.0, row);
            for r in row.iter_mut() {
                *r *= 2.0 * a;
            }
            out.metric[k] = a * a;
        }
    }

    pub fn eval(&self, x: &[f64], v: &[f64]) -> f64 {
        let mut kinetic = 0.0;
        for k in 0..self.n {
            let a = self.metric[k].value(x);
            let dv = v[k] - self.drift[k];
            kinetic += self.kinetic_weight[k] * a * a * dv * dv;
        }
        kinetic + self.potential.value(x)
    }

    /// `L(x, v) − ⟨c, v⟩`.
    pub fn eval_modified(&self, c: &[f64], x: &[f64], v: &[f64]) -> f64 {
        self.eval(x, v) - dot(c, v)
    }

    /// `∂L/∂v`.
    pub fn momentum(&self, x: &[f64], v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|k| {
                let a = self.metric[k].value(x);
                2.0 * self.kinetic_weight[k] * a * a * (v[k] - self.drift[k])
            })
            .collect()
    }

    /// `⟨∂L/∂v, v⟩ − L`.
    pub fn hamiltonian(&self, x: &[f64], v: &[f64]) -> f64 {
        dot(&self.momentum(x, v), v) - self.eval(x, v)
    }

    /// Lagrangian at rest, `L(x, 0)`.
    pub fn rest_value(&self, x: &[f64]) -> f64 {
        self.eval(x, &vec![0.0; self.n])
    }

    /// Adds the potential perturbation `V` after checking its sampled sup norm
    /// and gradient norm against `eps_bound`.
    pub fn perturb(&self, v: SharedField, eps_bound: f64) -> Result<Self> {
        if v.is_zero() {
            return Ok(self.clone());
        }
        let per_axis = grid_resolution(self.n, 1 << 14);
        let (sup, sup_grad) = sampled_c1_norm(v.as_ref(), self.n, per_axis);
        let measured = sup.max(sup_grad);
        if !(measured <= eps_bound * (1.0 + 1e-12)) {
            return Err(Error::NormViolation {
                measured,
                bound: eps_bound,
            });
        }
        let mut out = self.clone();
        out.potential = Arc::new(SumField::new(vec![self.potential.clone(), v]));
        out.modified = true;
        Ok(out)
    }

    /// Shifts the potential by a constant.
    pub fn shift_potential(&self, offset: f64) -> Self {
        if offset == 0.0 {
            return self.clone();
        }
        let mut out = self.clone();
        out.potential = Arc::new(SumField::new(vec![
            self.potential.clone(),
            Arc::new(ConstantField(offset)),
        ]));
        out.modified = true;
        out
    }

    /// Global minimum of `U` by grid search followed by local descent.
    pub fn potential_minimum(&self) -> (Vec<f64>, f64) {
        let n = self.n;
        minimize_on_torus(n, |x, grad| {
            grad.iter_mut().for_each(|g| *g = 0.0);
            self.potential.value_grad(x, 1.0, grad)
        })
    }

    /// Global minimum of `L(x, 0)`, the action density of a fixed point.
    pub fn rest_minimum(&self) -> (Vec<f64>, f64) {
        let n = self.n;
        let mut data = PointData::new(n);
        minimize_on_torus(n, move |x, grad| {
            self.point_data(x, &mut data);
            let mut value = data.potential;
            grad.copy_from_slice(&data.potential_grad);
            for k in 0..n {
                let w2 = self.kinetic_weight[k] * self.drift[k] * self.drift[k];
                if w2 != 0.0 {
                    value += w2 * data.metric[k];
                    for (i, g) in grad.iter_mut().enumerate() {
                        *g += w2 * data.metric_grad[k * n + i];
                    }
                }
            }
            value
        })
    }
}

fn default_grid(n: usize) -> usize {
    match n {
        1 => 256,
        2 => 64,
        3 => 24,
        _ => grid_resolution(n, 20_000),
    }
}

fn minimize_on_torus<F>(n: usize, mut f: F) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64], &mut [f64]) -> f64,
{
    let mut grad = vec![0.0; n];
    let mut best = (vec![0.0; n], f64::INFINITY);
    for x in torus_grid(n, default_grid(n)) {
        let v = f(&x, &mut grad);
        if v < best.1 {
            best = (x, v);
        }
    }
    let mut x = best.0;
    let mut value = f(&x, &mut grad);
    let mut step = 1.0;
    let mut trial = vec![0.0; n];
    let mut trial_grad = vec![0.0; n];
    for _ in 0..2000 {
        let gnorm2: f64 = grad.iter().map(|g| g * g).sum();
        if gnorm2.sqrt() <= 1e-13 {
            break;
        }
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                trial[i] = x[i] - step * grad[i];
            }
            let tv = f(&trial, &mut trial_grad);
            if tv <= value - 1e-4 * step * gnorm2 {
                x.copy_from_slice(&trial);
                grad.copy_from_slice(&trial_grad);
                value = tv;
                accepted = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (x, value)
}

/// `u Σ_{i ∈ axes} (1 − cos x_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosinePotential {
    pub amplitude: f64,
    pub axes: Vec<usize>,
}

impl ScalarField for CosinePotential {
    fn value(&self, x: &[f64]) -> f64 {
        self.amplitude * self.axes.iter().map(|&i| 1.0 - x[i].cos()).sum::<f64>()
    }

    fn value_grad(&self, x: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let mut sum = 0.0;
        for &i in &self.axes {
            let (s, c) = x[i].sin_cos();
            sum += 1.0 - c;
            grad[i] += scale * self.amplitude * s;
        }
        self.amplitude * sum
    }

    fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.axes.is_empty()
    }
}

/// De Rham class of the constant 1-form `Σ c_k dx_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CohomologyClass(pub Vec<f64>);

impl CohomologyClass {
    pub fn zero(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// `⟨c, ρ⟩`.
    pub fn pairing(&self, rho: &[f64]) -> f64 {
        dot(&self.0, rho)
    }

    /// True when the last coordinate vanishes.
    pub fn in_subspace(&self) -> bool {
        self.0.last().is_none_or(|&c| c == 0.0)
    }

    pub fn require_subspace(&self) -> Result<()> {
        if self.in_subspace() {
            Ok(())
        } else {
            Err(Error::SubspaceViolation(self.0.clone()))
        }
    }
}

impl Deref for CohomologyClass {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for CohomologyClass {
    fn from(c: Vec<f64>) -> Self {
        Self(c)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_model, ChannelModelSpec};
    use crate::field::TrigPolynomial;
    use std::f64::consts::{PI, TAU};

    fn n2() -> MechanicalLagrangian {
        build_channel_model(&ChannelModelSpec::lowest_energy(2)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let m = n2();
        assert_eq!(m.eval(&[0.0, 0.0], &[0.0, 0.0]), 0.0);
        assert_eq!(m.eval(&[PI, 0.0], &[0.0, 0.0]), 2.0);
        assert_eq!(m.eval_modified(&[1.0, 0.0], &[0.0, 0.0], &[1.0, 0.0]), 0.0);
    }

    #[test]
    fn drift_model_at_b_center() {
        let m = build_channel_model(&ChannelModelSpec::higher_energy(0.04)).unwrap();
        let v = m.eval(&[0.3, 1.1, PI], &[1.0, 0.0, 0.0]);
        assert!((v - 0.04).abs() < 1e-15);
    }

    #[test]
    fn pendulum_hamiltonian() {
        let p = MechanicalLagrangian::pendulum(1.0, 1.0);
        assert_eq!(p.hamiltonian(&[PI], &[0.0]), -2.0);
        let x = [0.4f64];
        let v = [1.3];
        let expected = v[0] * v[0] - (1.0 - x[0].cos());
        assert!((p.hamiltonian(&x, &v) - expected).abs() < 1e-14);
    }

    #[test]
    fn periodic_in_every_coordinate() {
        let m = n2();
        let x = [0.37, 0.21];
        let v = [0.5, -0.2];
        for k in 0..2 {
            let mut y = x;
            y[k] += TAU;
            assert!((m.eval(&x, &v) - m.eval(&y, &v)).abs() < 1e-12);
        }
    }

    #[test]
    fn perturb_checks_norm() {
        let m = n2();
        let v = TrigPolynomial::single(vec![1, 2], 1e-3, 0.0);
        assert!(matches!(
            m.perturb(Arc::new(v.clone()), 1e-3),
            Err(Error::NormViolation { .. })
        ));
        let bound = v.c1_bound();
        let p = m.perturb(Arc::new(v), bound).unwrap();
        assert!((p.potential().value(&[0.0, 0.0]) - 1e-3).abs() < 1e-15);
        let same = m
            .perturb(Arc::new(TrigPolynomial::default()), 1e-3)
            .unwrap();
        assert_eq!(
            same.potential().value(&[0.4, 0.1]),
            m.potential().value(&[0.4, 0.1])
        );
    }

    #[test]
    fn rest_minimum_of_channel_models() {
        let (_, lo) = n2().rest_minimum();
        assert_eq!(lo, 0.0);
        let drift = build_channel_model(&ChannelModelSpec::higher_energy(0.04)).unwrap();
        let (_, lo) = drift.rest_minimum();
        assert!((lo - 0.5).abs() < 1e-12);
    }

    #[test]
    fn point_data_matches_eval() {
        let m = build_channel_model(&ChannelModelSpec::lowest_energy(3)).unwrap();
        let x = [0.2, 1.1, 0.25];
        let mut d = PointData::new(3);
        m.point_data(&x, &mut d);
        assert_eq!(d.metric, m.metric_coefficients(&x));
        assert!((d.potential - m.potential().value(&x)).abs() < 1e-15);
    }

    #[test]
    fn subspace_check() {
        assert!(CohomologyClass(vec![1.0, 0.0]).require_subspace().is_ok());
        assert!(matches!(
            CohomologyClass(vec![1.0, 0.1]).require_subspace(),
            Err(Error::SubspaceViolation(_))
        ));
    }
}
