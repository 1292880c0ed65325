//! Smooth scalar fields on the n-torus.
//!
//! Every field is 2π-periodic in each coordinate and is evaluated on lifted
//! coordinates, so callers never have to reduce points modulo 2π themselves.

use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Central-difference step used for fields without an analytic gradient.
pub const FD_STEP: f64 = 1e-6;

pub type SharedField = Arc<dyn ScalarField>;

pub trait ScalarField: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;

    /// Returns `f(x)` and adds `scale * ∇f(x)` into `grad`.
    ///
    /// The default uses central differences with step [`FD_STEP`].
    fn value_grad(&self, x: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let mut probe = x.to_vec();
        for k in 0..x.len() {
            probe[k] = x[k] + FD_STEP;
            let up = self.value(&probe);
            probe[k] = x[k] - FD_STEP;
            let down = self.value(&probe);
            probe[k] = x[k];
            grad[k] += scale * (up - down) / (2.0 * FD_STEP);
        }
        self.value(x)
    }

    /// True when the field is identically zero.
    fn is_zero(&self) -> bool {
        false
    }
}

/// C^∞ step from 0 (t ≤ 0) to 1 (t ≥ 1), built from `exp(-1/t)`.
///
/// Returns `(s(t), s'(t))`. Both are exact constants outside (0, 1).
pub fn smoothstep(t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0);
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    let da = a / (t * t);
    let db = -b / ((1.0 - t) * (1.0 - t));
    let sum = a + b;
    let s = a / sum;
    let ds = (da * sum - a * (da + db)) / (sum * sum);
    (s, ds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField(pub f64);

impl ScalarField for ConstantField {
    fn value(&self, _x: &[f64]) -> f64 {
        self.0
    }

    fn value_grad(&self, _x: &[f64], _scale: f64, _grad: &mut [f64]) -> f64 {
        self.0
    }

    fn is_zero(&self) -> bool {
        self.0 == 0.0
    }
}

/// A user-supplied field; its gradient comes from central differences.
pub struct FnField<F> {
    f: F,
    label: &'static str,
}

impl<F> FnField<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(label: &'static str, f: F) -> Self {
        Self { f, label }
    }
}

impl<F> fmt::Debug for FnField<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnField({})", self.label)
    }
}

impl<F> ScalarField for FnField<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

#[derive(Debug, Clone)]
pub struct SumField {
    parts: Vec<SharedField>,
}

impl SumField {
    pub fn new(parts: Vec<SharedField>) -> Self {
        Self { parts }
    }
}

impl ScalarField for SumField {
    fn value(&self, x: &[f64]) -> f64 {
        self.parts.iter().map(|p| p.value(x)).sum()
    }

    fn value_grad(&self, x: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        self.parts
            .iter()
            .map(|p| p.value_grad(x, scale, grad))
            .sum()
    }

    fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: Vec<i32>,
    pub cos: f64,
    pub sin: f64,
}

/// `V(x) = Σ a_k cos(k·x) + b_k sin(k·x)` over a finite set of wave vectors.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    pub terms: Vec<TrigTerm>,
}

impl TrigPolynomial {
    pub fn single(k: Vec<i32>, cos: f64, sin: f64) -> Self {
        Self {
            terms: vec![TrigTerm { k, cos, sin }],
        }
    }

    /// Wave vectors with `‖k‖_∞ ≤ max_harmonic`, one representative of each
    /// `±k` pair (first nonzero entry positive).
    pub fn half_lattice(dim: usize, max_harmonic: i32) -> Vec<Vec<i32>> {
        let side = (2 * max_harmonic + 1) as usize;
        let total = side.pow(dim as u32);
        let mut out = Vec::new();
        for idx in 0..total {
            let mut rem = idx;
            let mut k = vec![0i32; dim];
            for slot in k.iter_mut() {
                *slot = (rem % side) as i32 - max_harmonic;
                rem /= side;
            }
            if let Some(first) = k.iter().find(|&&v| v != 0) {
                if *first > 0 {
                    out.push(k);
                }
            }
        }
        out
    }

    /// Draws i.i.d. uniform coefficients on the half lattice, then rescales so
    /// that [`Self::c1_bound`] equals `eps`.
    pub fn random<R: Rng>(dim: usize, max_harmonic: i32, eps: f64, rng: &mut R) -> Self {
        let terms = Self::half_lattice(dim, max_harmonic)
            .into_iter()
            .map(|k| TrigTerm {
                k,
                cos: rng.gen_range(-1.0..1.0),
                sin: rng.gen_range(-1.0..1.0),
            })
            .collect();
        let mut poly = Self { terms };
        let bound = poly.c1_bound();
        let factor = if bound > 0.0 { eps / bound } else { 0.0 };
        for t in &mut poly.terms {
            t.cos *= factor;
            t.sin *= factor;
        }
        poly
    }

    /// Closed-form bound on `max(sup|V|, sup|∇V|)`.
    pub fn c1_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let amp = t.cos.hypot(t.sin);
                let knorm = t.k.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt();
                amp * knorm.max(1.0)
            })
            .sum()
    }
}

impl TrigPolynomial {
    /// `(cos(k·x), sin(k·x))` for every term, from per-axis powers of
    /// `e^{i x_j}`.
    fn phases(&self, x: &[f64], out: &mut Vec<(f64, f64)>) {
        let m = self
            .terms
            .iter()
            .flat_map(|t| t.k.iter())
            .map(|k| k.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let stride = m + 1;
        let mut powers = vec![(1.0, 0.0); x.len() * stride];
        for (j, &xj) in x.iter().enumerate() {
            let (s1, c1) = xj.sin_cos();
            for r in 1..stride {
                let (c, s) = powers[j * stride + r - 1];
                powers[j * stride + r] = (c * c1 - s * s1, c * s1 + s * c1);
            }
        }
        out.clear();
        out.extend(self.terms.iter().map(|t| {
            let (mut re, mut im) = (1.0, 0.0);
            for (j, &k) in t.k.iter().enumerate() {
                let (c, s) = powers[j * stride + k.unsigned_abs() as usize];
                let s = if k < 0 { -s } else { s };
                (re, im) = (re * c - im * s, re * s + im * c);
            }
            (re, im)
        }));
    }
}

impl ScalarField for TrigPolynomial {
    fn value(&self, x: &[f64]) -> f64 {
        let mut ph = Vec::with_capacity(self.terms.len());
        self.phases(x, &mut ph);
        self.terms
            .iter()
            .zip(&ph)
            .map(|(t, &(c, s))| t.cos * c + t.sin * s)
            .sum()
    }

    fn value_grad(&self, x: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        let mut ph = Vec::with_capacity(self.terms.len());
        self.phases(x, &mut ph);
        let mut total = 0.0;
        for (t, &(c, s)) in self.terms.iter().zip(&ph) {
            total += t.cos * c + t.sin * s;
            let d = -t.cos * s + t.sin * c;
            for (g, &k) in grad.iter_mut().zip(&t.k) {
                *g += scale * d * k as f64;
            }
        }
        total
    }

    fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.cos == 0.0 && t.sin == 0.0)
    }
}

/// Regular sampling lattice on the torus with `per_axis` points per axis.
pub fn torus_grid(dim: usize, per_axis: usize) -> impl Iterator<Item = Vec<f64>> {
    let total = per_axis.pow(dim as u32);
    (0..total).map(move |idx| {
        let mut rem = idx;
        (0..dim)
            .map(|_| {
                let i = rem % per_axis;
                rem /= per_axis;
                TAU * i as f64 / per_axis as f64
            })
            .collect()
    })
}

/// Per-axis resolution keeping a torus sampling grid near `budget` points.
pub fn grid_resolution(dim: usize, budget: usize) -> usize {
    let r = (budget as f64).powf(1.0 / dim.max(1) as f64).floor() as usize;
    r.clamp(4, 512)
}

/// Sampled `(sup|f|, sup|∇f|₂)` over a torus lattice.
pub fn sampled_c1_norm(field: &dyn ScalarField, dim: usize, per_axis: usize) -> (f64, f64) {
    let mut sup = 0.0f64;
    let mut sup_grad = 0.0f64;
    let mut grad = vec![0.0; dim];
    for x in torus_grid(dim, per_axis) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let v = field.value_grad(&x, 1.0, &mut grad);
        sup = sup.max(v.abs());
        sup_grad = sup_grad.max(grad.iter().map(|g| g * g).sum::<f64>().sqrt());
    }
    (sup, sup_grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn smoothstep_plateaus_are_exact() {
        assert_eq!(smoothstep(-0.5), (0.0, 0.0));
        assert_eq!(smoothstep(0.0), (0.0, 0.0));
        assert_eq!(smoothstep(1.0), (1.0, 0.0));
        assert_eq!(smoothstep(3.0), (1.0, 0.0));
        let (mid, _) = smoothstep(0.5);
        assert!((mid - 0.5).abs() < 1e-15);
    }

    #[test]
    fn smoothstep_derivative_matches_differences() {
        for i in 1..40 {
            let t = i as f64 / 40.0;
            let h = 1e-6;
            let fd = (smoothstep(t + h).0 - smoothstep(t - h).0) / (2.0 * h);
            assert!((fd - smoothstep(t).1).abs() < 1e-7, "t={t}");
        }
    }

    #[test]
    fn trig_gradient_matches_fd() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let v = TrigPolynomial::random(2, 3, 1e-2, &mut rng);
        let x = [0.3, -1.2];
        let mut g = [0.0; 2];
        v.value_grad(&x, 1.0, &mut g);
        for k in 0..2 {
            let mut up = x;
            let mut dn = x;
            up[k] += 1e-6;
            dn[k] -= 1e-6;
            let fd = (v.value(&up) - v.value(&dn)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn random_trig_respects_c1_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let v = TrigPolynomial::random(2, 3, 1e-3, &mut rng);
        assert!((v.c1_bound() - 1e-3).abs() < 1e-15);
        let (sup, sup_grad) = sampled_c1_norm(&v, 2, 48);
        assert!(sup <= 1e-3 && sup_grad <= 1e-3);
    }

    #[test]
    fn half_lattice_has_one_of_each_pair() {
        let ks = TrigPolynomial::half_lattice(2, 3);
        assert_eq!(ks.len(), (49 - 1) / 2);
        for k in &ks {
            let neg: Vec<i32> = k.iter().map(|v| -v).collect();
            assert!(!ks.contains(&neg));
        }
    }

    #[test]
    fn fn_field_uses_central_differences() {
        let f = FnField::new("sin", |x: &[f64]| x[0].sin() * x[1].cos());
        let mut g = [0.0; 2];
        f.value_grad(&[0.4, 0.9], 1.0, &mut g);
        assert!((g[0] - 0.4f64.cos() * 0.9f64.cos()).abs() < 1e-8);
        assert!((g[1] + 0.4f64.sin() * 0.9f64.sin()).abs() < 1e-8);
    }
}
