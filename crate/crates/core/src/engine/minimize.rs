//! Descent on the loop points with a fixed homology class and period.
//!
//! Directions come from limited-memory BFGS whose initial inverse Hessian is a
//! cyclic tridiagonal approximation of the kinetic Hessian. Steps are
//! accepted by backtracking (halving) under the Armijo condition.
//!
//! With energy-balanced steps the time spent on each segment is free, so
//! sliding points along the curve costs nothing in the continuum and the
//! discrete action would happily exploit quadrature error by bunching them.
//! That mode is fixed by keeping consecutive points at equal arc length:
//! gradients are projected onto the normal space of the polygon, and the
//! points are re-spaced (dropping the curvature history) whenever the edge
//! lengths spread by more than a factor of two. When re-spacing is needed
//! again within a few iterations the descent and the gauge are fighting, and
//! the trigger ratio is doubled.

use serde::{Deserialize, Serialize};

use crate::engine::action::{
    closed_form_term, energy_drift, ActionEvaluator, LoopEvaluation, TimeStepping,
};
use crate::engine::Loop;
use crate::error::{Error, Result};
use crate::model::MechanicalLagrangian;

pub const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;
/// Edge-length spread that triggers re-spacing.
const RESPACE_RATIO: f64 = 2.0;
/// Re-spacings closer together than this many iterations raise the trigger.
const RESPACE_GAP: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MinimizeOptions {
    /// Exit threshold on the max-norm of the gradient.
    pub tol: f64,
    pub max_iter: usize,
    pub stepping: TimeStepping,
    /// Stored curvature pairs; 0 gives preconditioned gradient descent.
    pub memory: usize,
    /// Diagonal curvature added to the preconditioner per unit time.
    pub potential_shift: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 5000,
            stepping: TimeStepping::EnergyBalanced,
            memory: 8,
            potential_shift: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIterations,
    LineSearchStalled,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizeReport {
    pub final_loop: Loop,
    /// Action including the closed-form term for `c`.
    pub action: f64,
    pub average_action: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub stop: StopReason,
    /// `max − min` of the segment Hamiltonians.
    pub energy_drift: f64,
    /// Action at `c = 0`.
    pub action_at_zero: f64,
    /// Times the points were re-spaced to equal arc length.
    pub respacings: usize,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Longest over shortest edge of the lifted polygon.
fn spacing_ratio(lp: &Loop) -> f64 {
    let dim = lp.dim();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for j in 0..lp.segments() {
        let len: f64 = (0..dim)
            .map(|k| (lp.lifted(j + 1, k) - lp.lifted(j, k)).powi(2))
            .sum::<f64>()
            .sqrt();
        lo = lo.min(len);
        hi = hi.max(len);
    }
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Removes the component of each per-point block along the unit tangent.
fn project_normal(v: &mut [f64], tangents: &[f64], dim: usize) {
    for (block, t) in v.chunks_mut(dim).zip(tangents.chunks(dim)) {
        let along = dot(block, t);
        for (b, ti) in block.iter_mut().zip(t) {
            *b -= along * ti;
        }
    }
}

/// Solves the cyclic tridiagonal system with diagonal `diag`, off-diagonal
/// `-w_j` between rows `j` and `j+1` (wrapping), right-hand side `rhs`.
fn solve_cyclic(w: &[f64], diag: &[f64], rhs: &mut [f64], scratch: &mut Vec<f64>) {
    let n = diag.len();
    if n == 1 {
        rhs[0] /= diag[0];
        return;
    }
    if n == 2 {
        let off = -(w[0] + w[1]);
        let det = diag[0] * diag[1] - off * off;
        let (r0, r1) = (rhs[0], rhs[1]);
        rhs[0] = (diag[1] * r0 - off * r1) / det;
        rhs[1] = (diag[0] * r1 - off * r0) / det;
        return;
    }
    // Sherman–Morrison on top of the Thomas algorithm.
    let corner = -w[n - 1];
    let gamma = -diag[0];
    scratch.clear();
    scratch.resize(3 * n, 0.0);
    let (bb, rest) = scratch.split_at_mut(n);
    let (cp, z) = rest.split_at_mut(n);
    bb.copy_from_slice(diag);
    bb[0] -= gamma;
    bb[n - 1] -= corner * corner / gamma;
    for (j, zj) in z.iter_mut().enumerate() {
        *zj = if j == 0 {
            gamma
        } else if j == n - 1 {
            corner
        } else {
            0.0
        };
    }
    // Forward sweep on both right-hand sides.
    let sup = |j: usize| -w[j];
    let sub = |j: usize| -w[j - 1];
    cp[0] = sup(0) / bb[0];
    rhs[0] /= bb[0];
    z[0] /= bb[0];
    for j in 1..n {
        let denom = bb[j] - sub(j) * cp[j - 1];
        if j < n - 1 {
            cp[j] = sup(j) / denom;
        }
        rhs[j] = (rhs[j] - sub(j) * rhs[j - 1]) / denom;
        z[j] = (z[j] - sub(j) * z[j - 1]) / denom;
    }
    for j in (0..n - 1).rev() {
        rhs[j] -= cp[j] * rhs[j + 1];
        z[j] -= cp[j] * z[j + 1];
    }
    let fact = (rhs[0] + corner * rhs[n - 1] / gamma) / (1.0 + z[0] + corner * z[n - 1] / gamma);
    for j in 0..n {
        rhs[j] -= fact * z[j];
    }
}

struct Preconditioner {
    weights: Vec<Vec<f64>>,
    diag: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    column: Vec<f64>,
}

impl Preconditioner {
    fn new(eval: &LoopEvaluation, dim: usize, period: f64, shift: f64) -> Self {
        let segs = eval.steps.len();
        let floor = 1e-3 * period / segs as f64;
        let mut weights = vec![vec![0.0; segs]; dim];
        let mut diag = vec![vec![0.0; segs]; dim];
        for k in 0..dim {
            for j in 0..segs {
                weights[k][j] = eval.stiffness[j * dim + k] / eval.steps[j].max(floor);
            }
            for j in 0..segs {
                let prev = (j + segs - 1) % segs;
                let dwell = (0.5 * (eval.steps[prev] + eval.steps[j])).max(floor);
                diag[k][j] = weights[k][prev] + weights[k][j] + shift * dwell;
            }
        }
        Self {
            weights,
            diag,
            scratch: Vec::new(),
            column: vec![0.0; segs],
        }
    }

    fn apply(&mut self, v: &mut [f64]) {
        let dim = self.weights.len();
        let segs = self.column.len();
        for k in 0..dim {
            for j in 0..segs {
                self.column[j] = v[j * dim + k];
            }
            solve_cyclic(
                &self.weights[k],
                &self.diag[k],
                &mut self.column,
                &mut self.scratch,
            );
            for j in 0..segs {
                v[j * dim + k] = self.column[j];
            }
        }
    }
}

/// Minimizes the action of `initial` over its points; `c` only shifts the
/// reported action.
pub fn minimize_loop(
    initial: Loop,
    model: &MechanicalLagrangian,
    c: &[f64],
    opts: &MinimizeOptions,
) -> Result<MinimizeReport> {
    if !(opts.tol > 0.0) {
        return Err(Error::input("tol must be positive"));
    }
    let dim = initial.dim();
    if dim != model.n() {
        return Err(Error::input(format!(
            "loop dimension {dim} does not match model dimension {}",
            model.n()
        )));
    }
    let mut evaluator = ActionEvaluator::new(model, opts.stepping);
    let gauge = opts.stepping == TimeStepping::EnergyBalanced;
    let mut current = initial;
    if gauge {
        current.equalize_arc_length();
    }
    let mut eval = evaluator.evaluate(&current);
    if !eval.action.is_finite() {
        return Err(Error::Divergence {
            iterations: 0,
            reason: "initial action is not finite".into(),
            last_valid: Box::new(current),
        });
    }
    let period = current.period();
    let size = current.points().len();
    let mut history: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut iterations = 0;
    let mut stop = StopReason::MaxIterations;
    let mut respacings = 0;
    let mut respace_at = RESPACE_RATIO;
    let mut last_respace: Option<usize> = None;
    let mut trial = current.clone();
    let mut direction = vec![0.0; size];
    let mut tangents = vec![0.0; size];
    let mut grad = eval.gradient.clone();
    if gauge {
        tangents = current.tangents();
        project_normal(&mut grad, &tangents, dim);
    }

    loop {
        let gnorm = max_norm(&grad);
        if gnorm <= opts.tol {
            stop = StopReason::Converged;
            break;
        }
        if iterations >= opts.max_iter {
            break;
        }
        if gauge
            && last_respace.is_some_and(|k| iterations < k + RESPACE_GAP)
            && spacing_ratio(&current) > respace_at
        {
            respace_at *= 2.0;
        }
        if gauge
            && respacings < opts.max_iter
            && spacing_ratio(&current) > respace_at
            && current.length() > 1e-9
        {
            last_respace = Some(iterations);
            // A new gauge slice: the descent restarts from the re-spaced loop.
            current.equalize_arc_length();
            eval = evaluator.evaluate(&current);
            tangents = current.tangents();
            grad.copy_from_slice(&eval.gradient);
            project_normal(&mut grad, &tangents, dim);
            history.clear();
            respacings += 1;
            continue;
        }
        let mut pre = Preconditioner::new(&eval, dim, period, opts.potential_shift);
        lbfgs_direction(&grad, &history, &mut pre, &mut direction);
        if gauge {
            project_normal(&mut direction, &tangents, dim);
        }
        let mut slope = dot(&grad, &direction);
        if !(slope < 0.0) {
            history.clear();
            direction.copy_from_slice(&grad);
            pre.apply(&mut direction);
            if gauge {
                project_normal(&mut direction, &tangents, dim);
            }
            direction.iter_mut().for_each(|d| *d = -*d);
            slope = dot(&grad, &direction);
        }

        let noise = 1e-13 * (1.0 + eval.action.abs());
        let mut step = 1.0;
        let mut accepted = None;
        let mut finite_seen = false;
        for _ in 0..MAX_HALVINGS {
            for (t, (&x, &d)) in trial
                .points_mut()
                .iter_mut()
                .zip(current.points().iter().zip(&direction))
            {
                *t = x + step * d;
            }
            let value = evaluator.action(&trial);
            if value.is_finite() {
                finite_seen = true;
                if value <= eval.action + ARMIJO * step * slope {
                    accepted = Some(evaluator.evaluate(&trial));
                    break;
                }
                if value <= eval.action + noise {
                    // Below the rounding floor the decrease test is
                    // meaningless; accept when the slope along the ray
                    // has dropped to the approximate Wolfe window.
                    let next = evaluator.evaluate(&trial);
                    let mut next_grad = next.gradient.clone();
                    if gauge {
                        project_normal(&mut next_grad, &trial.tangents(), dim);
                    }
                    let new_slope = dot(&next_grad, &direction);
                    if new_slope >= 0.9 * slope && new_slope <= (2.0 * ARMIJO - 1.0) * slope {
                        accepted = Some(next);
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            if !finite_seen {
                return Err(Error::Divergence {
                    iterations,
                    reason: "every trial step produced a non-finite action".into(),
                    last_valid: Box::new(current),
                });
            }
            stop = StopReason::LineSearchStalled;
            break;
        };
        assert!(
            next.action <= eval.action + noise,
            "descent step increased the action"
        );
        let mut next_grad = next.gradient.clone();
        if gauge {
            tangents = trial.tangents();
            project_normal(&mut next_grad, &tangents, dim);
        }
        let s: Vec<f64> = trial
            .points()
            .iter()
            .zip(current.points())
            .map(|(a, b)| a - b)
            .collect();
        let y: Vec<f64> = next_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if opts.memory > 0 && sy > 1e-14 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == opts.memory {
                history.remove(0);
            }
            history.push((s, y, 1.0 / sy));
        }
        std::mem::swap(&mut current, &mut trial);
        eval = next;
        grad = next_grad;
        iterations += 1;
    }

    let gradient_norm = max_norm(&grad);
    let converged = gradient_norm <= opts.tol;
    let drift = energy_drift(&current, model, &eval.steps);
    let action = eval.action - closed_form_term(&current, c);
    Ok(MinimizeReport {
        average_action: action / period,
        action,
        action_at_zero: eval.action,
        gradient_norm,
        iterations,
        converged,
        stop: if converged {
            StopReason::Converged
        } else {
            stop
        },
        energy_drift: drift,
        respacings,
        final_loop: current,
    })
}

fn lbfgs_direction(
    gradient: &[f64],
    history: &[(Vec<f64>, Vec<f64>, f64)],
    pre: &mut Preconditioner,
    out: &mut [f64],
) {
    out.copy_from_slice(gradient);
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * dot(s, out);
        for (o, yi) in out.iter_mut().zip(y) {
            *o -= a * yi;
        }
        alphas.push(a);
    }
    pre.apply(out);
    if let Some((s, y, _)) = history.last() {
        let mut hy = y.clone();
        pre.apply(&mut hy);
        let yhy = dot(y, &hy);
        if yhy > 0.0 {
            let gamma = dot(s, y) / yhy;
            out.iter_mut().for_each(|o| *o *= gamma);
        }
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, out);
        for (o, si) in out.iter_mut().zip(s) {
            *o += (a - b) * si;
        }
    }
    out.iter_mut().for_each(|o| *o = -*o);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_solver_matches_dense() {
        let n = 7;
        let w: Vec<f64> = (0..n).map(|j| 1.0 + 0.3 * j as f64).collect();
        let diag: Vec<f64> = (0..n)
            .map(|j| w[(j + n - 1) % n] + w[j] + 0.5 + 0.1 * j as f64)
            .collect();
        let x: Vec<f64> = (0..n).map(|j| (j as f64 * 0.7).sin()).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|j| {
                diag[j] * x[j] - w[j] * x[(j + 1) % n] - w[(j + n - 1) % n] * x[(j + n - 1) % n]
            })
            .collect();
        let mut scratch = Vec::new();
        solve_cyclic(&w, &diag, &mut rhs, &mut scratch);
        for j in 0..n {
            assert!((rhs[j] - x[j]).abs() < 1e-12, "{j}: {} vs {}", rhs[j], x[j]);
        }
    }
}
