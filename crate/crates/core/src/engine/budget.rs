use serde::{Deserialize, Serialize};

use crate::channel::Variant;
use crate::error::{Error, Result};
use crate::model::MechanicalLagrangian;

/// Search space of `alpha_direct`: homology classes and a log-spaced period
/// grid around which the period is refined.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HomologyBudget {
    pub classes: Vec<Vec<i64>>,
    pub periods: Vec<f64>,
    /// Max-norm bound used to generate `classes`.
    pub bound: i64,
}

/// Serialized form of a budget.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub bound: Option<i64>,
    /// Also search classes with `h_n ≠ 0`.
    pub transverse: bool,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_ratio: Option<f64>,
    /// Explicit class list; overrides `bound`.
    pub classes: Option<Vec<Vec<i64>>>,
}

pub const DEFAULT_T_MIN: f64 = 0.25;
pub const DEFAULT_T_MAX: f64 = 64.0;
pub const DEFAULT_T_RATIO: f64 = std::f64::consts::SQRT_2;

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl HomologyBudget {
    /// Primitive classes with `‖h‖_∞ ≤ bound`; the last entry vanishes unless
    /// `transverse` is set.
    pub fn primitive_classes(n: usize, bound: i64, transverse: bool) -> Vec<Vec<i64>> {
        let side = (2 * bound + 1) as usize;
        let free = if transverse || n == 1 { n } else { n - 1 };
        let mut out = Vec::new();
        for idx in 0..side.pow(free as u32) {
            let mut rem = idx;
            let mut h = vec![0i64; n];
            for slot in h.iter_mut().take(free) {
                *slot = (rem % side) as i64 - bound;
                rem /= side;
            }
            let g = h.iter().fold(0, |g, &v| gcd(g, v));
            if g == 1 {
                out.push(h);
            }
        }
        out.sort_by_key(|h| (h.iter().map(|v| v.abs()).max().unwrap_or(0), h.clone()));
        out
    }

    pub fn log_periods(t_min: f64, t_max: f64, ratio: f64) -> Result<Vec<f64>> {
        if !(t_min > 0.0 && t_max >= t_min && ratio > 1.0) {
            return Err(Error::config(format!(
                "invalid period grid: t_min {t_min}, t_max {t_max}, ratio {ratio}"
            )));
        }
        let count = ((t_max / t_min).ln() / ratio.ln() + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|k| t_min * ratio.powi(k as i32)).collect())
    }

    pub fn new(n: usize, bound: i64, transverse: bool) -> Self {
        Self {
            classes: Self::primitive_classes(n, bound, transverse),
            periods: Self::log_periods(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_T_RATIO)
                .expect("default grid is valid"),
            bound,
        }
    }

    /// Default bound: 2 in dimension ≤ 2, 4 for the lowest-energy model in
    /// higher dimension, 5 for the drift model.
    pub fn default_bound(model: &MechanicalLagrangian) -> i64 {
        match model.channels().map(|c| c.spec.variant) {
            Some(Variant::HigherEnergyDrift) => 5,
            _ if model.n() <= 2 => 2,
            _ => 4,
        }
    }

    pub fn for_model(model: &MechanicalLagrangian) -> Self {
        Self::new(model.n(), Self::default_bound(model), false)
    }

    pub fn from_config(model: &MechanicalLagrangian, cfg: &BudgetConfig) -> Result<Self> {
        let n = model.n();
        let bound = cfg.bound.unwrap_or_else(|| Self::default_bound(model));
        if bound < 1 {
            return Err(Error::config("budget bound must be at least 1"));
        }
        let classes = match &cfg.classes {
            Some(list) => {
                for h in list {
                    if h.len() != n || h.iter().all(|&v| v == 0) {
                        return Err(Error::config(format!("invalid homology class {h:?}")));
                    }
                }
                list.clone()
            }
            None => Self::primitive_classes(n, bound, cfg.transverse),
        };
        let periods = Self::log_periods(
            cfg.t_min.unwrap_or(DEFAULT_T_MIN),
            cfg.t_max.unwrap_or(DEFAULT_T_MAX),
            cfg.t_ratio.unwrap_or(DEFAULT_T_RATIO),
        )?;
        let bound = match &cfg.classes {
            Some(list) => list
                .iter()
                .flatten()
                .map(|v| v.abs())
                .max()
                .unwrap_or(bound),
            None => bound,
        };
        Ok(Self {
            classes,
            periods,
            bound,
        })
    }

    pub fn with_classes(mut self, classes: Vec<Vec<i64>>) -> Self {
        self.bound = classes
            .iter()
            .flatten()
            .map(|v| v.abs())
            .max()
            .unwrap_or(self.bound);
        self.classes = classes;
        self
    }

    pub fn with_periods(mut self, periods: Vec<f64>) -> Self {
        self.periods = periods;
        self
    }

    /// True when `h` lies on the boundary of the class box.
    pub fn on_boundary(&self, h: &[i64]) -> bool {
        h.iter().map(|v| v.abs()).max().unwrap_or(0) >= self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n2_classes() {
        let c = HomologyBudget::primitive_classes(2, 2, false);
        assert_eq!(c, vec![vec![-1, 0], vec![1, 0]]);
        let t = HomologyBudget::primitive_classes(2, 1, true);
        assert_eq!(t.len(), 8);
    }

    #[test]
    fn n3_classes_are_primitive() {
        let c = HomologyBudget::primitive_classes(3, 4, false);
        assert!(c.contains(&vec![1, 4, 0]));
        assert!(c.contains(&vec![-4, 1, 0]));
        assert!(!c.contains(&vec![2, 4, 0]));
        assert!(c.iter().all(|h| h[2] == 0));
    }

    #[test]
    fn default_periods() {
        let p = HomologyBudget::log_periods(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_T_RATIO).unwrap();
        assert_eq!(p.len(), 17);
        assert!((p[16] - 64.0).abs() < 1e-9);
    }
}
