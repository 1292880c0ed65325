//! Discrete variational computation of minimal average actions.

pub mod action;
pub mod budget;
pub mod loops;
pub mod minimize;
pub mod solver;

pub use action::{
    action_gradient, discrete_action, discrete_action_with, ActionEvaluator, TimeStepping,
};
pub use budget::{BudgetConfig, HomologyBudget};
pub use loops::Loop;
pub use minimize::{minimize_loop, MinimizeOptions, MinimizeReport, StopReason};
pub use solver::{
    alpha_direct, min_average_action, AlphaSolver, AlphaValue, BetaSample, MinAverage,
    SolverOptions, Winner,
};
