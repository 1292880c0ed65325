use std::f64::consts::TAU;
use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use mather::analysis::{
    directional_derivative, fenchel_conjugate, BetaGrid, Lattice, SampledFunction, Side,
};
use mather::engine::action::{energy_drift, time_steps};
use mather::engine::{
    action_gradient, discrete_action, discrete_action_with, minimize_loop, AlphaSolver,
    HomologyBudget, Loop, MinimizeOptions, SolverOptions, TimeStepping,
};
use mather::model::CosinePotential;
use mather::{build_channel_model, ChannelModelSpec, MechanicalLagrangian};

fn n2_model() -> &'static MechanicalLagrangian {
    static MODEL: OnceLock<MechanicalLagrangian> = OnceLock::new();
    MODEL.get_or_init(|| build_channel_model(&ChannelModelSpec::lowest_energy(2)).unwrap())
}

fn n2_solver() -> &'static AlphaSolver {
    static SOLVER: OnceLock<AlphaSolver> = OnceLock::new();
    SOLVER.get_or_init(|| {
        let m = n2_model();
        AlphaSolver::new(m, HomologyBudget::for_model(m), SolverOptions::default()).unwrap()
    })
}

fn pendulum_2d() -> MechanicalLagrangian {
    let potential = Arc::new(CosinePotential {
        amplitude: 1.0,
        axes: vec![0],
    });
    MechanicalLagrangian::with_potential(2, potential).unwrap()
}

/// Straight loop plus a smooth two-mode wiggle.
fn wiggly(start: [f64; 2], h: [i64; 2], period: f64, segments: usize, amp: [f64; 2]) -> Loop {
    let mut lp = Loop::straight(&start, &h, period, segments);
    for (idx, q) in lp.points_mut().iter_mut().enumerate() {
        let s = TAU * (idx / 2) as f64 / segments as f64;
        *q += amp[idx % 2]
            * if idx % 2 == 0 {
                s.sin()
            } else {
                (2.0 * s).cos()
            };
    }
    lp
}

fn stepping() -> impl Strategy<Value = TimeStepping> {
    prop_oneof![
        Just(TimeStepping::Uniform),
        Just(TimeStepping::EnergyBalanced)
    ]
}

fn arb_loop() -> impl Strategy<Value = Loop> {
    (
        -1.0..1.0f64,
        -0.3..0.3f64,
        prop_oneof![Just([1i64, 0]), Just([2, 0]), Just([-1, 0]), Just([1, 1])],
        0.5..8.0f64,
        -0.1..0.1f64,
        -0.05..0.05f64,
    )
        .prop_map(|(x, y, h, t, a, b)| wiggly([x, y], h, t, 32, [a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gradient_matches_finite_differences(lp in arb_loop(), idx in 0usize..64, mode in stepping()) {
        let m = pendulum_2d();
        let grad = mather::engine::ActionEvaluator::new(&m, mode).evaluate(&lp).gradient;
        let h = 1e-6;
        let mut a = lp.clone();
        let mut b = lp.clone();
        a.points_mut()[idx] += h;
        b.points_mut()[idx] -= h;
        let zero = [0.0, 0.0];
        let fd = (discrete_action_with(&a, &m, &zero, mode) - discrete_action_with(&b, &m, &zero, mode)) / (2.0 * h);
        prop_assert!((grad[idx] - fd).abs() <= 1e-5 * grad[idx].abs().max(1.0), "{} vs {}", grad[idx], fd);
    }

    #[test]
    fn channel_model_gradient(lp in arb_loop(), idx in 0usize..64) {
        let m = n2_model();
        let grad = action_gradient(&lp, m, &[0.0, 0.0]);
        // Barrier crossings make the action large, so cancellation sets a
        // floor that depends on the step; the best step must agree.
        let zero = [0.0, 0.0];
        let scale = discrete_action(&lp, m, &zero).abs();
        let ok = [1e-4, 1e-5, 1e-6].iter().any(|&h| {
            let mut a = lp.clone();
            let mut b = lp.clone();
            a.points_mut()[idx] += h;
            b.points_mut()[idx] -= h;
            let fd = (discrete_action(&a, m, &zero) - discrete_action(&b, m, &zero)) / (2.0 * h);
            let floor = 4.0 * f64::EPSILON * scale / h;
            (grad[idx] - fd).abs() <= 1e-5 * grad[idx].abs().max(1.0) + floor
        });
        prop_assert!(ok, "gradient {} at {}", grad[idx], idx);
    }

    #[test]
    fn c_term_telescopes(lp in arb_loop(), c1 in -2.0..2.0f64, c2 in -1.0..1.0f64) {
        let m = pendulum_2d();
        let c = [c1, c2];
        let steps = time_steps(&lp, &m, TimeStepping::default());
        let mut literal = 0.0;
        for (j, &tau) in steps.iter().enumerate() {
            let mid: Vec<f64> = (0..2).map(|k| 0.5 * (lp.lifted(j, k) + lp.lifted(j + 1, k))).collect();
            let v: Vec<f64> = (0..2).map(|k| (lp.lifted(j + 1, k) - lp.lifted(j, k)) / tau).collect();
            literal += m.eval_modified(&c, &mid, &v) * tau;
        }
        let fast = discrete_action(&lp, &m, &c);
        prop_assert!((literal - fast).abs() <= 1e-10 * fast.abs().max(1.0));
        let shift = discrete_action(&lp, &m, &[0.0, 0.0]) - fast;
        let h = lp.homology();
        let exact = TAU * (c1 * h[0] as f64 + c2 * h[1] as f64);
        prop_assert!((shift - exact).abs() <= 1e-10 * exact.abs().max(1.0));
    }

    #[test]
    fn deck_and_relabel_invariance(lp in arb_loop(), m0 in -3i64..3, m1 in -3i64..3, shift in 0usize..32) {
        let m = n2_model();
        let base = discrete_action(&lp, m, &[0.0, 0.0]);
        let deck = discrete_action(&lp.deck(&[m0, m1]), m, &[0.0, 0.0]);
        let rel = discrete_action(&lp.relabel(shift), m, &[0.0, 0.0]);
        prop_assert!((deck - base).abs() <= 1e-9 * base.abs().max(1.0));
        prop_assert!((rel - base).abs() <= 1e-9 * base.abs().max(1.0));
    }

    #[test]
    fn loop_json_round_trip(lp in arb_loop()) {
        let text = serde_json::to_string(&lp).unwrap();
        let back: Loop = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, lp);
    }

    #[test]
    fn alpha_is_even(c in -2.0..2.0f64) {
        let s = n2_solver();
        let a = s.alpha(&[c, 0.0]).unwrap().alpha;
        let b = s.alpha(&[-c, 0.0]).unwrap().alpha;
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn alpha_midpoint_convexity(a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let s = n2_solver();
        let f = |c: f64| s.alpha(&[c, 0.0]).unwrap().alpha;
        let mid = f(0.5 * (a + b));
        prop_assert!(mid <= 0.5 * (f(a) + f(b)) + 1e-6, "{} > {}", mid, 0.5 * (f(a) + f(b)));
    }

    #[test]
    fn fenchel_young(c in -2.0..2.0f64, pick in 0usize..1000) {
        let s = n2_solver();
        let grid = BetaGrid::from_solver(s);
        let sample = &grid.samples[pick % grid.samples.len()];
        let a = s.alpha(&[c, 0.0]).unwrap().alpha;
        let pairing = c * sample.rotation[0];
        prop_assert!(a + sample.beta >= pairing - 1e-8, "{} + {} < {}", a, sample.beta, pairing);
    }

    #[test]
    fn conjugate_round_trip(curv in 0.2..3.0f64, slope in -1.0..1.0f64) {
        let f = |x: f64| curv * x * x + slope * x;
        let input = SampledFunction::on_line(-2.0, 2.0, 401, f).unwrap();
        let dual: Vec<Vec<f64>> = (0..401).map(|i| vec![-8.0 + 16.0 * i as f64 / 400.0]).collect();
        let star = fenchel_conjugate(&input, &dual).unwrap();
        let back_points: Vec<Vec<f64>> = (0..21).map(|i| vec![-1.0 + 0.1 * i as f64]).collect();
        let back = fenchel_conjugate(&star.function, &back_points).unwrap();
        for (p, v) in back_points.iter().zip(&back.function.values) {
            prop_assert!((v - f(p[0])).abs() < 5e-3, "at {}: {} vs {}", p[0], v, f(p[0]));
        }
    }

    #[test]
    fn derivative_calibration(a in -2.0..2.0f64, b in -2.0..2.0f64, c0 in -1.0..1.0f64) {
        // A kink of known size between two affine pieces.
        let f = |x: &[f64]| Ok((a * x[0]).max(b * x[0]) + 0.3 * x[0] * x[0]);
        let plus = directional_derivative(f, &[0.0], &[1.0], Side::Plus, 1e-2).unwrap();
        let minus = directional_derivative(f, &[0.0], &[1.0], Side::Minus, 1e-2).unwrap();
        prop_assert!((plus.value - a.max(b)).abs() < 1e-9);
        prop_assert!((minus.value - a.min(b)).abs() < 1e-9);
        let g = |x: &[f64]| Ok((x[0] - c0).powi(3));
        let d = directional_derivative(g, &[0.0], &[1.0], Side::Plus, 1e-2).unwrap();
        prop_assert!((d.value - 3.0 * c0 * c0).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn minimization_descends_and_keeps_class(lp in arb_loop()) {
        let m = pendulum_2d();
        let h = lp.homology().to_vec();
        let period = lp.period();
        // Re-spacing may raise the action, so monotone descent is a property
        // of uniform steps only.
        let uniform = MinimizeOptions { stepping: TimeStepping::Uniform, ..MinimizeOptions::default() };
        let before = discrete_action_with(&lp, &m, &[0.0, 0.0], TimeStepping::Uniform);
        let plain = minimize_loop(lp.clone(), &m, &[0.0, 0.0], &uniform).unwrap();
        prop_assert!(plain.action_at_zero <= before + 1e-12);
        prop_assert_eq!(plain.final_loop.homology(), &h[..]);
        let rep = minimize_loop(lp, &m, &[0.0, 0.0], &MinimizeOptions::default()).unwrap();
        prop_assert_eq!(rep.final_loop.homology(), &h[..]);
        if rep.converged {
            prop_assert!(rep.energy_drift < 10.0 * MinimizeOptions::default().tol * period);
            let steps = time_steps(&rep.final_loop, &m, TimeStepping::default());
            prop_assert!((energy_drift(&rep.final_loop, &m, &steps) - rep.energy_drift).abs() < 1e-15);
        }
    }
}

#[test]
fn beta_rays_are_convex_and_origin_matches_alpha() {
    let s = n2_solver();
    let grid = BetaGrid::from_solver(s);
    assert!(grid.ray_convexity(1e-8).passed());
    let field =
        mather::analysis::build_alpha_field(s, &Lattice::slice(2, 0, -1.0, 1.0, 21).unwrap())
            .unwrap();
    let (_, min_alpha) = field.minimum().unwrap();
    assert!((grid.origin() + min_alpha).abs() < 1e-12);
}

/// Second-order convergence of the discrete minimal action in `N` under
/// uniform steps. Energy-balanced steps turn this loop into a midpoint sum of
/// a smooth periodic integrand, which converges far faster.
#[test]
fn refinement_order() {
    let m = pendulum_2d();
    let opts = MinimizeOptions {
        tol: 1e-11,
        stepping: TimeStepping::Uniform,
        ..MinimizeOptions::default()
    };
    let action = |n: usize| {
        let start = wiggly([0.0, 0.0], [1, 0], 4.0, n, [0.05, 0.0]);
        let rep = minimize_loop(start, &m, &[0.0, 0.0], &opts).unwrap();
        assert!(rep.converged, "N = {n} did not converge");
        rep.action_at_zero
    };
    let (a, b, c) = (action(32), action(64), action(128));
    let order = ((a - b) / (b - c)).abs().log2();
    assert!(order >= 1.8, "observed order {order} from {a}, {b}, {c}");
    let balanced = |n: usize| {
        let start = wiggly([0.0, 0.0], [1, 0], 4.0, n, [0.05, 0.0]);
        minimize_loop(
            start,
            &m,
            &[0.0, 0.0],
            &MinimizeOptions {
                tol: 1e-11,
                ..MinimizeOptions::default()
            },
        )
        .unwrap()
        .action_at_zero
    };
    assert!((balanced(32) - c).abs() <= (a - c).abs());
}
