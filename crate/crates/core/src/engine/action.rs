//! Midpoint discretization of the loop action and its exact gradient.
//!
//! For segment `j` with increment `Δq` and midpoint `m` write
//! `A_j = Σ κ_k g_k(m) Δq_k²`, `B_j = Σ κ_k g_k(m) w_k Δq_k` and
//! `Ũ_j = U(m) + Σ κ_k g_k(m) w_k²`. With time step `τ_j` the segment
//! contributes `A_j/τ_j − 2B_j + Ũ_j τ_j`, which is `L(m, Δq/τ_j)·τ_j`.
//! The closed-form term `−⟨c, Δq⟩` sums to `−2π⟨c, h⟩` and is added exactly.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::engine::Loop;
use crate::model::{dot, MechanicalLagrangian, PointData};

/// How the period is split among segments.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeStepping {
    /// `τ_j = T/N`.
    Uniform,
    /// `τ_j` minimizes the action for fixed points subject to `Σ τ_j = T`.
    /// Every moving segment then carries the same discrete energy.
    #[default]
    EnergyBalanced,
}

/// Action, time steps and (optionally) gradient of one loop.
#[derive(Clone, Debug)]
pub struct LoopEvaluation {
    /// Action at `c = 0`.
    pub action: f64,
    pub steps: Vec<f64>,
    /// Common discrete energy for balanced stepping.
    pub energy: Option<f64>,
    /// `∂S/∂q_j`, row-major like the loop points.
    pub gradient: Vec<f64>,
    /// Per-segment `2κ_k g_k(m_j)`, kept for preconditioning.
    pub stiffness: Vec<f64>,
}

/// Reusable buffers for evaluating loops of one model.
pub struct ActionEvaluator<'a> {
    model: &'a MechanicalLagrangian,
    stepping: TimeStepping,
    data: PointData,
    mid: Vec<f64>,
    dq: Vec<f64>,
    seg_a: Vec<f64>,
    seg_b: Vec<f64>,
    seg_u: Vec<f64>,
    d_a: Vec<f64>,
    d_b: Vec<f64>,
    d_u: Vec<f64>,
    metric: Vec<f64>,
    increments: Vec<f64>,
}

impl<'a> ActionEvaluator<'a> {
    pub fn new(model: &'a MechanicalLagrangian, stepping: TimeStepping) -> Self {
        let n = model.n();
        Self {
            model,
            stepping,
            data: PointData::new(n),
            mid: vec![0.0; n],
            dq: vec![0.0; n],
            seg_a: Vec::new(),
            seg_b: Vec::new(),
            seg_u: Vec::new(),
            d_a: Vec::new(),
            d_b: Vec::new(),
            d_u: Vec::new(),
            metric: Vec::new(),
            increments: Vec::new(),
        }
    }

    pub fn model(&self) -> &MechanicalLagrangian {
        self.model
    }

    pub fn stepping(&self) -> TimeStepping {
        self.stepping
    }

    fn resize(&mut self, segments: usize) {
        let n = self.model.n();
        for v in [&mut self.seg_a, &mut self.seg_b, &mut self.seg_u] {
            v.resize(segments, 0.0);
        }
        for v in [
            &mut self.d_a,
            &mut self.d_b,
            &mut self.d_u,
            &mut self.metric,
            &mut self.increments,
        ] {
            v.resize(segments * n, 0.0);
        }
    }

    /// Fills the per-segment quantities; `with_grad` also stores their
    /// derivatives with respect to the midpoint.
    fn sweep(&mut self, lp: &Loop, with_grad: bool) {
        let n = self.model.n();
        let segs = lp.segments();
        self.resize(segs);
        let kappa = self.model.kinetic_weight();
        let drift = self.model.drift();
        for j in 0..segs {
            for k in 0..n {
                let a = lp.lifted(j, k);
                let b = lp.lifted(j + 1, k);
                self.dq[k] = b - a;
                self.mid[k] = 0.5 * (a + b);
            }
            if with_grad {
                self.model.point_data(&self.mid, &mut self.data);
            } else {
                self.data.potential = self.model.potential().value(&self.mid);
                for k in 0..n {
                    let a = self.model.metric_fields()[k].value(&self.mid);
                    self.data.metric[k] = a * a;
                }
            }
            let mut seg_a = 0.0;
            let mut seg_b = 0.0;
            let mut seg_u = self.data.potential;
            for k in 0..n {
                let kg = kappa[k] * self.data.metric[k];
                let dqk = self.dq[k];
                seg_a += kg * dqk * dqk;
                seg_b += kg * drift[k] * dqk;
                seg_u += kg * drift[k] * drift[k];
                self.metric[j * n + k] = kg;
                self.increments[j * n + k] = dqk;
            }
            self.seg_a[j] = seg_a;
            self.seg_b[j] = seg_b;
            self.seg_u[j] = seg_u;
            if with_grad {
                let da = &mut self.d_a[j * n..(j + 1) * n];
                let db = &mut self.d_b[j * n..(j + 1) * n];
                let du = &mut self.d_u[j * n..(j + 1) * n];
                du.copy_from_slice(&self.data.potential_grad);
                da.iter_mut().for_each(|v| *v = 0.0);
                db.iter_mut().for_each(|v| *v = 0.0);
                for k in 0..n {
                    let dqk = self.dq[k];
                    let wk = drift[k];
                    let row = &self.data.metric_grad[k * n..(k + 1) * n];
                    for i in 0..n {
                        let dg = kappa[k] * row[i];
                        if dg != 0.0 {
                            da[i] += dg * dqk * dqk;
                            db[i] += dg * wk * dqk;
                            du[i] += dg * wk * wk;
                        }
                    }
                }
            }
        }
    }

    fn steps(&self, period: f64) -> (Vec<f64>, Option<f64>) {
        let segs = self.seg_a.len();
        match self.stepping {
            TimeStepping::Uniform => (vec![period / segs as f64; segs], None),
            TimeStepping::EnergyBalanced => match balance_steps(&self.seg_a, &self.seg_u, period) {
                Some((steps, energy)) => (steps, Some(energy)),
                None => (vec![period / segs as f64; segs], None),
            },
        }
    }

    fn total(&self, steps: &[f64]) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for j in 0..steps.len() {
            let tau = steps[j];
            let kinetic = if self.seg_a[j] == 0.0 {
                0.0
            } else {
                self.seg_a[j] / tau
            };
            let term = kinetic - 2.0 * self.seg_b[j] + self.seg_u[j] * tau;
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Action at `c = 0`.
    pub fn action(&mut self, lp: &Loop) -> f64 {
        self.sweep(lp, false);
        let (steps, _) = self.steps(lp.period());
        self.total(&steps)
    }

    pub fn evaluate(&mut self, lp: &Loop) -> LoopEvaluation {
        let n = self.model.n();
        let segs = lp.segments();
        self.sweep(lp, true);
        let (steps, energy) = self.steps(lp.period());
        let action = self.total(&steps);
        let drift = self.model.drift();

        // f_j = ∂(segment)/∂m and p_j = ∂(segment)/∂Δq.
        let mut gradient = vec![0.0; segs * n];
        let mut stiffness = vec![0.0; segs * n];
        for j in 0..segs {
            let tau = steps[j];
            let inv = if self.seg_a[j] == 0.0 || tau == 0.0 {
                0.0
            } else {
                1.0 / tau
            };
            let next = (j + 1) % segs;
            for k in 0..n {
                let idx = j * n + k;
                let f = self.d_a[idx] * inv - 2.0 * self.d_b[idx] + self.d_u[idx] * tau;
                let kg = self.metric[idx];
                let p = 2.0 * kg * (self.increments[idx] * inv - drift[k]);
                gradient[idx] += 0.5 * f - p;
                gradient[next * n + k] += 0.5 * f + p;
                stiffness[idx] = 2.0 * kg;
            }
        }
        LoopEvaluation {
            action,
            steps,
            energy,
            gradient,
            stiffness,
        }
    }
}

/// Splits `period` so that `A_j/τ_j² − Ũ_j` takes one common value `λ` on
/// every segment with `A_j > 0`; returns the steps and `λ`.
///
/// If moving segments cannot absorb the whole period at the smallest
/// admissible `λ = −min Ũ`, the remainder rests on stationary segments of
/// minimal `Ũ`. Returns `None` when no segment moves.
pub fn balance_steps(seg_a: &[f64], seg_u: &[f64], period: f64) -> Option<(Vec<f64>, f64)> {
    let segs = seg_a.len();
    if seg_a.iter().all(|&a| a == 0.0) {
        return None;
    }
    let u_min = seg_u.iter().copied().fold(f64::INFINITY, f64::min);
    let moving_at_min = seg_a
        .iter()
        .zip(seg_u)
        .any(|(&a, &u)| a > 0.0 && u == u_min);
    let total = |mu: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut dg = 0.0;
        for (&a, &u) in seg_a.iter().zip(seg_u) {
            if a > 0.0 {
                let d = u - u_min + mu;
                let t = (a / d).sqrt();
                g += t;
                dg -= 0.5 * t / d;
            }
        }
        (g, dg)
    };
    let mut steps = vec![0.0; segs];
    if !moving_at_min {
        let (g0, _) = total(0.0);
        if g0 <= period {
            let rest: Vec<usize> = (0..segs)
                .filter(|&j| seg_a[j] == 0.0 && seg_u[j] == u_min)
                .collect();
            for j in 0..segs {
                if seg_a[j] > 0.0 {
                    steps[j] = (seg_a[j] / (seg_u[j] - u_min)).sqrt();
                }
            }
            let share = (period - g0) / rest.len() as f64;
            for &j in &rest {
                steps[j] = share;
            }
            return Some((steps, -u_min));
        }
    }

    // Solve ln G(e^s) = ln T; ln G is decreasing and close to linear in s.
    let root_a: f64 = seg_a.iter().map(|a| a.sqrt()).sum();
    let mut s = 2.0 * (root_a / period).ln();
    let target = period.ln();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for _ in 0..200 {
        let mu = s.exp();
        let (g, dg) = total(mu);
        let phi = g.ln() - target;
        if phi.abs() <= 1e-15 {
            break;
        }
        if phi > 0.0 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
        let slope = mu * dg / g;
        let mut next = s - phi / slope;
        if !next.is_finite() || next <= lo || next >= hi {
            next = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 2.0,
                (false, true) => hi - 2.0,
                (false, false) => s,
            };
        }
        if (next - s).abs() <= 1e-16 * s.abs().max(1.0) {
            s = next;
            break;
        }
        s = next;
    }
    let mu = s.exp();
    for j in 0..segs {
        if seg_a[j] > 0.0 {
            steps[j] = (seg_a[j] / (seg_u[j] - u_min + mu)).sqrt();
        }
    }
    // Remove the residual so the steps sum to the period exactly.
    let sum: f64 = steps.iter().sum();
    let scale = period / sum;
    steps.iter_mut().for_each(|t| *t *= scale);
    Some((steps, mu - u_min))
}

/// Action of `lp` for the class `c`, default stepping.
pub fn discrete_action(lp: &Loop, model: &MechanicalLagrangian, c: &[f64]) -> f64 {
    discrete_action_with(lp, model, c, TimeStepping::default())
}

pub fn discrete_action_with(
    lp: &Loop,
    model: &MechanicalLagrangian,
    c: &[f64],
    stepping: TimeStepping,
) -> f64 {
    ActionEvaluator::new(model, stepping).action(lp) - closed_form_term(lp, c)
}

/// `2π ⟨c, h⟩`.
pub fn closed_form_term(lp: &Loop, c: &[f64]) -> f64 {
    let h: Vec<f64> = lp.homology().iter().map(|&k| k as f64).collect();
    TAU * dot(c, &h)
}

/// Gradient with respect to every point; independent of `c`.
pub fn action_gradient(lp: &Loop, model: &MechanicalLagrangian, _c: &[f64]) -> Vec<f64> {
    ActionEvaluator::new(model, TimeStepping::default())
        .evaluate(lp)
        .gradient
}

/// Time steps used for `lp`.
pub fn time_steps(lp: &Loop, model: &MechanicalLagrangian, stepping: TimeStepping) -> Vec<f64> {
    ActionEvaluator::new(model, stepping).evaluate(lp).steps
}

/// `max − min` of the Hamiltonian over segments that carry time.
pub fn energy_drift(lp: &Loop, model: &MechanicalLagrangian, steps: &[f64]) -> f64 {
    let (lo, hi) = segment_energies(lp, model, steps)
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
            (lo.min(e), hi.max(e))
        });
    if lo.is_finite() {
        hi - lo
    } else {
        0.0
    }
}

/// Hamiltonian at each segment midpoint with velocity `Δq/τ`.
pub fn segment_energies(lp: &Loop, model: &MechanicalLagrangian, steps: &[f64]) -> Vec<f64> {
    let n = lp.dim();
    let mut mid = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut out = Vec::with_capacity(steps.len());
    for (j, &tau) in steps.iter().enumerate() {
        if tau <= 0.0 {
            continue;
        }
        for k in 0..n {
            let a = lp.lifted(j, k);
            let b = lp.lifted(j + 1, k);
            mid[k] = 0.5 * (a + b);
            v[k] = (b - a) / tau;
        }
        out.push(model.hamiltonian(&mid, &v));
    }
    out
}

/// `(1/T) ∫ L dt` along the loop.
pub fn mean_lagrangian(lp: &Loop, model: &MechanicalLagrangian, stepping: TimeStepping) -> f64 {
    ActionEvaluator::new(model, stepping).action(lp) / lp.period()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_channel_model, ChannelModelSpec};
    use crate::field::ConstantField;
    use std::sync::Arc;

    fn free(n: usize) -> MechanicalLagrangian {
        MechanicalLagrangian::with_potential(n, Arc::new(ConstantField(0.0))).unwrap()
    }

    #[test]
    fn constant_loop_at_origin() {
        let m = build_channel_model(&ChannelModelSpec::lowest_energy(2)).unwrap();
        let lp = Loop::constant(&[0.0, 0.0], 3.0, 16);
        assert_eq!(discrete_action(&lp, &m, &[0.0, 0.0]), 0.0);
        assert!(action_gradient(&lp, &m, &[0.0, 0.0])
            .iter()
            .all(|&g| g == 0.0));
    }

    #[test]
    fn uniform_kinetic_loop() {
        let m = free(2);
        let t = 1.7;
        let lp = Loop::straight(&[0.0, 0.0], &[1, 0], t, 32);
        for stepping in [TimeStepping::Uniform, TimeStepping::EnergyBalanced] {
            let s = discrete_action_with(&lp, &m, &[0.0, 0.0], stepping);
            assert!((s - TAU * TAU / t).abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_steps_equalize_energy() {
        let m = MechanicalLagrangian::pendulum(1.0, 1.0);
        let lp = Loop::straight(&[0.3], &[1], 5.0, 64);
        let steps = time_steps(&lp, &m, TimeStepping::EnergyBalanced);
        assert!((steps.iter().sum::<f64>() - 5.0).abs() < 1e-12);
        assert!(energy_drift(&lp, &m, &steps) < 1e-12);
        let uniform = time_steps(&lp, &m, TimeStepping::Uniform);
        assert!(energy_drift(&lp, &m, &uniform) > 1e-3);
    }

    #[test]
    fn long_period_rests_on_minimum() {
        let a = [1.0, 1.0, 0.0, 0.0];
        let u = [1.0, 1.0, 0.0, 0.5];
        let (steps, energy) = balance_steps(&a, &u, 100.0).unwrap();
        assert_eq!(energy, 0.0);
        assert_eq!(steps[3], 0.0);
        assert!((steps[2] - 98.0).abs() < 1e-12);
    }

    #[test]
    fn balanced_action_is_minimal_over_steps() {
        let m = MechanicalLagrangian::pendulum(1.0, 1.0);
        let lp = Loop::straight(&[0.0], &[1], 4.0, 32);
        let balanced = discrete_action_with(&lp, &m, &[0.0], TimeStepping::EnergyBalanced);
        let uniform = discrete_action_with(&lp, &m, &[0.0], TimeStepping::Uniform);
        assert!(balanced < uniform);
    }
}
