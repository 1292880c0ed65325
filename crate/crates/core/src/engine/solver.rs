//! Minimal average actions over homology classes and periods, and direct
//! evaluation of α from them.
//!
//! The action at `c = 0` of a loop class does not depend on `c`, so the
//! solver first tabulates converged loops for every (class, seed, period) in
//! the budget. A query for `α(c)` scores the table with the exact closed-form
//! term, then refines the period of the best few candidates by golden-section
//! search in `ln T`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::ChannelKind;
use crate::engine::action::ActionEvaluator;
use crate::engine::{minimize_loop, HomologyBudget, Loop, MinimizeOptions};
use crate::error::{Error, Result};
use crate::model::{dot, MechanicalLagrangian};

/// Scores closer than this are ties.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    pub segments: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Candidates whose period is refined per query.
    pub refine_count: usize,
    pub refine_iterations: usize,
    /// Only candidates whose grid score is within this of the best one are
    /// refined.
    pub refine_window: f64,
    /// Iteration cap while tabulating; entries that hit it are kept and
    /// marked unconverged.
    pub table_max_iter: usize,
    pub minimize: MinimizeOptions,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            segments: 256,
            restarts: 4,
            seed: 0,
            refine_count: 3,
            refine_iterations: 18,
            refine_window: 1.0,
            table_max_iter: 500,
            minimize: MinimizeOptions::default(),
        }
    }
}

/// Where a loop spends most of its time.
pub fn loop_channel(model: &MechanicalLagrangian, lp: &Loop, steps: &[f64]) -> String {
    let Some(info) = model.channels() else {
        return "-".into();
    };
    let axis = info.layout.axis;
    let mut weights: Vec<(String, f64)> = Vec::new();
    for (j, &tau) in steps.iter().enumerate() {
        let y = 0.5 * (lp.lifted(j, axis) + lp.lifted(j + 1, axis));
        let label = location_label(model, y);
        match weights.iter_mut().find(|(l, _)| *l == label) {
            Some(entry) => entry.1 += tau,
            None => weights.push((label, tau)),
        }
    }
    weights
        .into_iter()
        .fold(None::<(String, f64)>, |best, (l, w)| match best {
            Some((bl, bw)) if bw >= w => Some((bl, bw)),
            _ => Some((l, w)),
        })
        .map(|(l, _)| l)
        .unwrap_or_else(|| "-".into())
}

fn location_label(model: &MechanicalLagrangian, y: f64) -> String {
    match model.channels().and_then(|info| info.layout.core_at(y)) {
        Some(kind) => kind.to_string(),
        None if model.channels().is_some() => "background".into(),
        None => "-".into(),
    }
}

/// Seeds for one class: straight loops through each A/B channel center, then
/// jittered loops with a low-frequency Fourier perturbation.
pub fn seed_loops(
    model: &MechanicalLagrangian,
    h: &[i64],
    period: f64,
    segments: usize,
    restarts: usize,
    seed: u64,
) -> Vec<Loop> {
    let n = model.n();
    let mut bases: Vec<Vec<f64>> = Vec::new();
    let mut jitter_centers: Vec<(f64, f64)> = Vec::new();
    match model.channels() {
        Some(info) => {
            let axis = info.layout.axis;
            let mut kinds = vec![ChannelKind::A];
            kinds.extend(info.geodesic_kinds());
            for kind in kinds {
                if let Some(ch) = info.layout.channel(kind) {
                    let mut base = vec![0.0; n];
                    base[axis] = ch.center;
                    bases.push(base);
                    jitter_centers.push((ch.center, ch.half_width));
                }
            }
        }
        None => bases.push(vec![0.0; n]),
    }
    let mut out: Vec<Loop> = bases
        .iter()
        .map(|b| Loop::straight(b, h, period, segments))
        .collect();
    let axis = model.channels().map(|info| info.layout.axis);
    let class_key = h.iter().fold(0xcbf2_9ce4_8422_2325u64, |acc, &v| {
        (acc ^ v as u64).wrapping_mul(0x100_0000_01b3)
    });
    for r in out.len()..restarts.max(out.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ class_key ^ (r as u64).rotate_left(32));
        let mut base: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..TAU)).collect();
        let mut amp = vec![0.5; n];
        if let Some(axis) = axis {
            let (center, half) = jitter_centers[rng.gen_range(0..jitter_centers.len())];
            base[axis] = center;
            amp[axis] = 0.5 * half;
        }
        let modes: Vec<[f64; 2]> = (0..n * 3)
            .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
            .collect();
        let mut lp = Loop::straight(&base, h, period, segments);
        for (j, p) in lp.points_mut().chunks_mut(n).enumerate() {
            let s = TAU * j as f64 / segments as f64;
            for (k, x) in p.iter_mut().enumerate() {
                let mut v = 0.0;
                for m in 0..3 {
                    let [a, b] = modes[k * 3 + m];
                    let f = (m + 1) as f64;
                    v += (a * (f * s).cos() + b * (f * s).sin()) / f;
                }
                *x += amp[k] * v / 3.0;
            }
        }
        if !out.iter().any(|o| o == &lp) {
            out.push(lp);
        }
    }
    out
}

/// Result of [`min_average_action`].
#[derive(Clone, Debug, Serialize)]
pub struct MinAverage {
    /// `(1/T)` times the action including the closed-form term.
    pub value: f64,
    pub seed_index: usize,
    pub converged: bool,
    pub final_loop: Loop,
}

/// Minimum over restart seeds of the average action of converged loops in
/// class `h` with period `T`.
pub fn min_average_action(
    model: &MechanicalLagrangian,
    c: &[f64],
    h: &[i64],
    period: f64,
    restarts: usize,
    options: &SolverOptions,
) -> Result<MinAverage> {
    if restarts == 0 {
        return Err(Error::input("restarts must be at least 1"));
    }
    if h.len() != model.n() || c.len() != model.n() {
        return Err(Error::input(
            "class and cohomology must match the model dimension",
        ));
    }
    if h.iter().all(|&v| v == 0) {
        let (x, value) = model.rest_minimum();
        let lp = Loop::constant(&x, period, options.segments);
        return Ok(MinAverage {
            value,
            seed_index: 0,
            converged: true,
            final_loop: lp,
        });
    }
    let seeds = seed_loops(model, h, period, options.segments, restarts, options.seed);
    let results: Vec<Result<_>> = seeds
        .into_par_iter()
        .map(|s| minimize_loop(s, model, c, &options.minimize))
        .collect();
    let mut best: Option<MinAverage> = None;
    let mut diagnostics = Vec::new();
    for (idx, res) in results.into_iter().enumerate() {
        match res {
            Ok(rep) => {
                if best
                    .as_ref()
                    .is_none_or(|b| rep.average_action < b.value - TIE_TOL)
                {
                    best = Some(MinAverage {
                        value: rep.average_action,
                        seed_index: idx,
                        converged: rep.converged,
                        final_loop: rep.final_loop,
                    });
                }
            }
            Err(e) => diagnostics.push(format!("seed {idx}: {e}")),
        }
    }
    best.ok_or(Error::AllRestartsFailed {
        h: h.to_vec(),
        attempts: restarts,
        diagnostics: diagnostics.join("; "),
    })
}

/// One converged loop of the coarse table.
#[derive(Clone, Debug)]
pub struct ProfileEntry {
    pub class_index: usize,
    pub seed_index: usize,
    pub period: f64,
    /// Action at `c = 0`.
    pub action: f64,
    pub converged: bool,
    pub channel: String,
    pub final_loop: Loop,
}

/// Minimizer behind a value of α.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Winner {
    pub h: Vec<i64>,
    /// Infinite for the fixed point.
    pub period: f64,
    pub rotation: Vec<f64>,
    pub channel: String,
    /// `(1/T) ∫ L` at `c = 0`; for the fixed point, `L(x, 0)`.
    pub mean_lagrangian: f64,
    pub fixed_point: bool,
    pub budget_boundary: bool,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaValue {
    pub alpha: f64,
    pub winner: Winner,
    /// Refinement minimizations that failed; the value is still a valid
    /// lower bound of the budget maximum.
    pub failures: usize,
}

/// Tabulated budget for one model.
#[derive(Clone, Debug)]
pub struct AlphaSolver {
    model: MechanicalLagrangian,
    budget: HomologyBudget,
    options: SolverOptions,
    entries: Vec<ProfileEntry>,
    rest_point: Vec<f64>,
    rest_value: f64,
    failures: Vec<String>,
    probes: ProbeCache,
}

/// Refinement minimizers keyed by entry and period bits. The minimizer does
/// not depend on `c`, so repeated queries reuse them.
#[derive(Debug, Default)]
struct ProbeCache(Mutex<HashMap<(usize, u64), Option<(f64, Loop)>>>);

impl Clone for ProbeCache {
    fn clone(&self) -> Self {
        ProbeCache(Mutex::new(self.0.lock().expect("probe cache").clone()))
    }
}

impl AlphaSolver {
    pub fn new(
        model: &MechanicalLagrangian,
        budget: HomologyBudget,
        options: SolverOptions,
    ) -> Result<Self> {
        if options.segments < 8 {
            return Err(Error::config("loops need at least 8 segments"));
        }
        if options.restarts == 0 || options.refine_count == 0 {
            return Err(Error::config(
                "restarts and refine_count must be at least 1",
            ));
        }
        if !(options.refine_window >= 0.0) || options.table_max_iter == 0 {
            return Err(Error::config(
                "refine_window must be non-negative and table_max_iter positive",
            ));
        }
        if budget.periods.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let n = model.n();
        if let Some(h) = budget.classes.iter().find(|h| h.len() != n) {
            return Err(Error::config(format!(
                "class {h:?} does not match dimension {n}"
            )));
        }
        let mut periods = budget.periods.clone();
        periods.sort_by(f64::total_cmp);
        let budget = HomologyBudget { periods, ..budget };

        let jobs: Vec<(usize, usize, Loop)> = budget
            .classes
            .iter()
            .enumerate()
            .flat_map(|(ci, h)| {
                seed_loops(
                    model,
                    h,
                    budget.periods[0],
                    options.segments,
                    options.restarts,
                    options.seed,
                )
                .into_iter()
                .enumerate()
                .map(move |(si, lp)| (ci, si, lp))
            })
            .collect();
        let chains: Vec<(Vec<ProfileEntry>, Vec<String>)> = jobs
            .into_par_iter()
            .map(|(ci, si, seed)| Self::chain(model, &budget.periods, &options, ci, si, seed))
            .collect();
        let mut entries = Vec::new();
        let mut failures = Vec::new();
        for (e, f) in chains {
            entries.extend(e);
            failures.extend(f);
        }
        let (rest_point, rest_value) = model.rest_minimum();
        Ok(Self {
            model: model.clone(),
            budget,
            options,
            entries,
            rest_point,
            rest_value,
            failures,
            probes: ProbeCache::default(),
        })
    }

    /// Follows one seed up the period grid, warm-starting each period from
    /// the previous minimizer.
    fn chain(
        model: &MechanicalLagrangian,
        periods: &[f64],
        options: &SolverOptions,
        class_index: usize,
        seed_index: usize,
        seed: Loop,
    ) -> (Vec<ProfileEntry>, Vec<String>) {
        let zero = vec![0.0; model.n()];
        let table_opts = MinimizeOptions {
            max_iter: options.table_max_iter.min(options.minimize.max_iter),
            ..options.minimize.clone()
        };
        let mut entries = Vec::with_capacity(periods.len());
        let mut failures = Vec::new();
        let mut start = seed;
        for &t in periods {
            start.set_period(t);
            match minimize_loop(start.clone(), model, &zero, &table_opts) {
                Ok(rep) => {
                    let steps = ActionEvaluator::new(model, options.minimize.stepping)
                        .evaluate(&rep.final_loop)
                        .steps;
                    entries.push(ProfileEntry {
                        class_index,
                        seed_index,
                        period: t,
                        action: rep.action_at_zero,
                        converged: rep.converged,
                        channel: loop_channel(model, &rep.final_loop, &steps),
                        final_loop: rep.final_loop.clone(),
                    });
                    start = rep.final_loop;
                }
                Err(Error::Divergence {
                    last_valid, reason, ..
                }) => {
                    failures.push(format!(
                        "class {class_index} seed {seed_index} T {t}: {reason}"
                    ));
                    start = *last_valid;
                }
                Err(e) => {
                    failures.push(format!("class {class_index} seed {seed_index} T {t}: {e}"))
                }
            }
        }
        (entries, failures)
    }

    pub fn model(&self) -> &MechanicalLagrangian {
        &self.model
    }

    pub fn budget(&self) -> &HomologyBudget {
        &self.budget
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn entries(&self) -> &[ProfileEntry] {
        &self.entries
    }

    /// Table-building failures, one line each.
    pub fn failures(&self) -> &[String] {
        &self.failures
    }

    /// `(x*, min_x L(x, 0))`.
    pub fn rest(&self) -> (&[f64], f64) {
        (&self.rest_point, self.rest_value)
    }

    fn class(&self, idx: usize) -> &[i64] {
        &self.budget.classes[idx]
    }

    fn pairing(&self, c: &[f64], class_index: usize) -> f64 {
        let h: Vec<f64> = self.class(class_index).iter().map(|&v| v as f64).collect();
        TAU * dot(c, &h)
    }

    fn fixed_point_winner(&self) -> AlphaValue {
        AlphaValue {
            alpha: 0.0 - self.rest_value,
            winner: Winner {
                h: vec![0; self.model.n()],
                period: f64::INFINITY,
                rotation: vec![0.0; self.model.n()],
                channel: match self.model.channels() {
                    Some(info) => location_label(&self.model, self.rest_point[info.layout.axis]),
                    None => "-".into(),
                },
                mean_lagrangian: self.rest_value,
                fixed_point: true,
                budget_boundary: false,
                converged: true,
            },
            failures: 0,
        }
    }

    fn winner_from(
        &self,
        class_index: usize,
        period: f64,
        action: f64,
        channel: String,
        converged: bool,
    ) -> Winner {
        let h = self.class(class_index).to_vec();
        Winner {
            rotation: h.iter().map(|&v| TAU * v as f64 / period).collect(),
            budget_boundary: self.budget.on_boundary(&h),
            h,
            period,
            channel,
            mean_lagrangian: action / period,
            fixed_point: false,
            converged,
        }
    }

    /// α(c) over the budget, optionally restricted to loops that start and
    /// stay in one channel.
    fn evaluate(&self, c: &[f64], restrict: Option<&str>) -> Result<AlphaValue> {
        let n = self.model.n();
        if c.len() != n {
            return Err(Error::input(format!(
                "c has {} entries, model dimension {n}",
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::input("c must be finite"));
        }
        let fp = self.fixed_point_winner();
        let mut best = match restrict {
            Some(label) if fp.winner.channel != label => None,
            _ => Some(fp),
        };

        // Best grid period per (class, seed) chain.
        let mut chains: Vec<(f64, usize)> = Vec::new();
        let mut last_key = None;
        for (idx, e) in self.entries.iter().enumerate() {
            if let Some(label) = restrict {
                if e.channel != label || self.seed_channel(e.seed_index).as_deref() != Some(label) {
                    continue;
                }
            }
            let score = (self.pairing(c, e.class_index) - e.action) / e.period;
            let key = (e.class_index, e.seed_index);
            if last_key == Some(key) {
                let top = chains.last_mut().expect("chain started");
                if score > top.0 + TIE_TOL {
                    *top = (score, idx);
                }
            } else {
                chains.push((score, idx));
                last_key = Some(key);
            }
        }
        // Highest score first; ties keep budget order.
        let mut order: Vec<usize> = (0..chains.len()).collect();
        order.sort_by(|&a, &b| chains[b].0.total_cmp(&chains[a].0).then(a.cmp(&b)));
        let mut seen_classes = Vec::new();
        let mut picked = Vec::new();
        let floor = order
            .first()
            .map(|&i| chains[i].0)
            .into_iter()
            .chain(best.as_ref().map(|b| b.alpha))
            .fold(f64::NEG_INFINITY, f64::max)
            - self.options.refine_window;
        for &i in &order {
            if chains[i].0 < floor {
                break;
            }
            let e = &self.entries[chains[i].1];
            if seen_classes.contains(&e.class_index) {
                continue;
            }
            seen_classes.push(e.class_index);
            picked.push(chains[i].1);
            if picked.len() == self.options.refine_count {
                break;
            }
        }

        let refined: Vec<(Option<(f64, f64, Loop)>, usize)> =
            picked.par_iter().map(|&idx| self.refine(c, idx)).collect();
        let mut failures = 0;
        let mut candidates: Vec<(f64, usize, Winner)> = Vec::new();
        for (&idx, (res, fails)) in picked.iter().zip(refined) {
            failures += fails;
            let e = &self.entries[idx];
            let grid_score = (self.pairing(c, e.class_index) - e.action) / e.period;
            let mut winner = self.winner_from(
                e.class_index,
                e.period,
                e.action,
                e.channel.clone(),
                e.converged,
            );
            let mut score = grid_score;
            if let Some((t, action, lp)) = res {
                let s = (self.pairing(c, e.class_index) - action) / t;
                if s > score {
                    let steps = ActionEvaluator::new(&self.model, self.options.minimize.stepping)
                        .evaluate(&lp)
                        .steps;
                    let channel = loop_channel(&self.model, &lp, &steps);
                    if restrict.is_none_or(|label| label == channel) {
                        score = s;
                        winner = self.winner_from(e.class_index, t, action, channel, true);
                    }
                }
            }
            candidates.push((score, idx, winner));
        }
        candidates.sort_by(|a, b| a.1.cmp(&b.1));
        for (score, _, winner) in candidates {
            let better = best.as_ref().is_none_or(|b| score > b.alpha + TIE_TOL);
            if better {
                best = Some(AlphaValue {
                    alpha: score,
                    winner,
                    failures,
                });
            }
        }
        match best {
            Some(mut v) => {
                v.failures = failures;
                v.alpha += 0.0;
                Ok(v)
            }
            None => Err(Error::Probe {
                point: c.to_vec(),
                reason: format!("no admissible loop for channel {}", restrict.unwrap_or("-")),
            }),
        }
    }

    fn seed_channel(&self, seed_index: usize) -> Option<String> {
        let info = self.model.channels()?;
        let mut kinds = vec![ChannelKind::A];
        kinds.extend(info.geodesic_kinds());
        kinds.get(seed_index).map(ChannelKind::to_string)
    }

    /// Golden-section search in `ln T` around a grid entry. Returns the best
    /// `(T, action at c = 0, loop)` found and the number of failed
    /// minimizations.
    fn refine(&self, c: &[f64], entry_index: usize) -> (Option<(f64, f64, Loop)>, usize) {
        let e = &self.entries[entry_index];
        let periods = &self.budget.periods;
        let k = periods
            .iter()
            .position(|&t| t == e.period)
            .expect("entry period is on the grid");
        let lo = periods[k.saturating_sub(1)].ln();
        let hi = periods[(k + 1).min(periods.len() - 1)].ln();
        if hi - lo <= 0.0 || self.options.refine_iterations == 0 {
            return (None, 0);
        }
        let pair = self.pairing(c, e.class_index);
        let mut failures = 0;
        let mut best: Option<(f64, f64, Loop)> = None;
        let probe_opts = MinimizeOptions {
            max_iter: self
                .options
                .table_max_iter
                .min(self.options.minimize.max_iter),
            ..self.options.minimize.clone()
        };
        let mut probe = |log_t: f64| -> f64 {
            let t = log_t.exp();
            let key = (entry_index, t.to_bits());
            let cached = self
                .probes
                .0
                .lock()
                .expect("probe cache")
                .get(&key)
                .cloned();
            let result = cached.unwrap_or_else(|| {
                let start = e.final_loop.clone().with_period(t);
                let fresh = minimize_loop(start, &self.model, c, &probe_opts)
                    .ok()
                    .map(|rep| (rep.action_at_zero, rep.final_loop));
                self.probes
                    .0
                    .lock()
                    .expect("probe cache")
                    .insert(key, fresh.clone());
                fresh
            });
            match result {
                Some((action, lp)) => {
                    let score = (pair - action) / t;
                    if best.as_ref().is_none_or(|b| score > (pair - b.1) / b.0) {
                        best = Some((t, action, lp));
                    }
                    score
                }
                None => {
                    failures += 1;
                    f64::NEG_INFINITY
                }
            }
        };
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - ratio * (b - a);
        let mut x2 = a + ratio * (b - a);
        let mut f1 = probe(x1);
        let mut f2 = probe(x2);
        for _ in 0..self.options.refine_iterations {
            if f1 >= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ratio * (b - a);
                f1 = probe(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ratio * (b - a);
                f2 = probe(x2);
            }
        }
        (best, failures)
    }

    /// Whether some grid entry alone already gives `α(c) > level`. Cheap:
    /// no minimization is run.
    pub fn table_exceeds(&self, c: &[f64], level: f64) -> bool {
        -self.rest_value > level
            || self
                .entries
                .iter()
                .any(|e| (self.pairing(c, e.class_index) - e.action) / e.period > level)
    }

    /// `α(c)` as the larger of the fixed-point value and the best loop in
    /// the budget.
    pub fn alpha(&self, c: &[f64]) -> Result<AlphaValue> {
        self.evaluate(c, None)
    }

    /// α restricted to loops seeded in and confined to channel `label`
    /// (`"A"`, `"B1"`, …). The fixed point counts for the channel it sits in.
    pub fn restricted_alpha(&self, c: &[f64], label: &str) -> Result<AlphaValue> {
        self.evaluate(c, Some(label))
    }

    /// `β` samples: for each grid entry, the rotation vector `2πh/T` and the
    /// least mean Lagrangian over seeds, plus the fixed point at `ρ = 0`.
    pub fn beta_samples(&self) -> Vec<BetaSample> {
        let n = self.model.n();
        let mut out = vec![BetaSample {
            rotation: vec![0.0; n],
            beta: self.rest_value,
            orbit_beta: self.rest_value,
            h: vec![0; n],
            period: f64::INFINITY,
            channel: self.fixed_point_winner().winner.channel,
        }];
        for (ci, h) in self.budget.classes.iter().enumerate() {
            for &t in &self.budget.periods {
                let best = self
                    .entries
                    .iter()
                    .filter(|e| e.class_index == ci && e.period == t)
                    .fold(None::<&ProfileEntry>, |b, e| match b {
                        Some(b) if b.action <= e.action + TIE_TOL => Some(b),
                        _ => Some(e),
                    });
                if let Some(e) = best {
                    out.push(BetaSample {
                        rotation: h.iter().map(|&v| TAU * v as f64 / t).collect(),
                        beta: e.action / t,
                        orbit_beta: e.action / t,
                        h: h.clone(),
                        period: t,
                        channel: e.channel.clone(),
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaSample {
    pub rotation: Vec<f64>,
    pub beta: f64,
    /// Mean action of the sampled orbit itself; `beta` may be lower once
    /// convexified along its ray.
    pub orbit_beta: f64,
    pub h: Vec<i64>,
    pub period: f64,
    pub channel: String,
}

/// One-shot `α(c)`; build an [`AlphaSolver`] to evaluate many classes.
pub fn alpha_direct(
    model: &MechanicalLagrangian,
    c: &[f64],
    budget: &HomologyBudget,
    options: &SolverOptions,
) -> Result<AlphaValue> {
    AlphaSolver::new(model, budget.clone(), options.clone())?.alpha(c)
}
