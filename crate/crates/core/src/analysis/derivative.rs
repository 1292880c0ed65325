use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_T0: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `lim (f(c + te) − f(c)) / t`.
    Plus,
    /// `lim (f(c) − f(c − te)) / t`.
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// Gap between the last two extrapolation levels.
    pub error: f64,
    pub steps: [f64; 3],
    /// Raw one-sided difference quotients at `steps`.
    pub quotients: [f64; 3],
}

/// Two-level Richardson extrapolation of one-sided quotients at
/// `t0, t0/2, t0/4`, given `f(c)` and `f(c ± t e)` at those steps.
pub fn richardson(center: f64, probes: [f64; 3], t0: f64, side: Side) -> DerivativeEstimate {
    let steps = [t0, t0 / 2.0, t0 / 4.0];
    let s = side.sign();
    let q: [f64; 3] = std::array::from_fn(|i| s * (probes[i] - center) / steps[i]);
    let r1a = 2.0 * q[1] - q[0];
    let r1b = 2.0 * q[2] - q[1];
    let value = (4.0 * r1b - r1a) / 3.0;
    DerivativeEstimate {
        value,
        error: (value - r1b).abs(),
        steps,
        quotients: q,
    }
}

pub fn probe_points(c: &[f64], e: &[f64], t0: f64, side: Side) -> [Vec<f64>; 3] {
    let s = side.sign();
    std::array::from_fn(|i| {
        let t = t0 / (1 << i) as f64;
        c.iter().zip(e).map(|(ci, ei)| ci + s * t * ei).collect()
    })
}

pub(crate) fn check_direction(c: &[f64], e: &[f64]) -> Result<()> {
    if c.len() != e.len() {
        return Err(Error::input("direction and point differ in dimension"));
    }
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::input(format!(
            "direction must be a unit vector, |e| = {norm}"
        )));
    }
    Ok(())
}

/// One-sided directional derivative of `f` at `c` along unit `e`.
pub fn directional_derivative<F>(
    f: F,
    c: &[f64],
    e: &[f64],
    side: Side,
    t0: f64,
) -> Result<DerivativeEstimate>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    check_direction(c, e)?;
    if !(t0 > 0.0) {
        return Err(Error::input("t0 must be positive"));
    }
    let eval = |x: &[f64]| {
        f(x).map_err(|err| Error::Probe {
            point: x.to_vec(),
            reason: err.to_string(),
        })
    };
    let center = eval(c)?;
    let pts = probe_points(c, e, t0, side);
    let probes = [eval(&pts[0])?, eval(&pts[1])?, eval(&pts[2])?];
    Ok(richardson(center, probes, t0, side))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_function_has_no_gap() {
        let f = |x: &[f64]| Ok(x[0] * x[0] + 3.0 * x[0] * x[1] + x[1].powi(3));
        let c = [0.3, -0.2];
        let e = [0.6, 0.8];
        let plus = directional_derivative(f, &c, &e, Side::Plus, DEFAULT_T0).unwrap();
        let minus = directional_derivative(f, &c, &e, Side::Minus, DEFAULT_T0).unwrap();
        let exact = 2.0 * 0.3 * 0.6 + 3.0 * (-0.2 * 0.6 + 0.3 * 0.8) + 3.0 * 0.04 * 0.8;
        assert!((plus.value - exact).abs() < 1e-6);
        assert!((plus.value - minus.value).abs() < 1e-6);
    }

    #[test]
    fn kink_is_one_sided() {
        let f = |x: &[f64]| Ok(x[0].max(0.0) * 2.0);
        let plus = directional_derivative(f, &[0.0], &[1.0], Side::Plus, DEFAULT_T0).unwrap();
        let minus = directional_derivative(f, &[0.0], &[1.0], Side::Minus, DEFAULT_T0).unwrap();
        assert!((plus.value - 2.0).abs() < 1e-12);
        assert_eq!(minus.value, 0.0);
    }

    #[test]
    fn rejects_non_unit_direction() {
        let f = |x: &[f64]| Ok(x[0]);
        assert!(directional_derivative(f, &[0.0], &[2.0], Side::Plus, DEFAULT_T0).is_err());
    }
}
