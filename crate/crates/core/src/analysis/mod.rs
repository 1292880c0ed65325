//! Fields of α over cohomology lattices and what can be read off them:
//! conjugates, flats, one-sided derivatives, corners and their stability.

pub mod alpha;
pub mod beta;
pub mod conjugate;
pub mod corner;
pub mod derivative;
pub mod export;
pub mod flat;
pub mod lattice;
pub mod lemma;
pub mod stability;

pub use alpha::{build_alpha_field, AlphaField, AlphaSample, CheckSummary};
pub use beta::BetaGrid;
pub use conjugate::{fenchel_conjugate, Conjugate, SampledFunction};
pub use corner::{corner_scan, CandidateReport, CornerOptions, CornerReport, Support, TOL_CORNER};
pub use derivative::{directional_derivative, DerivativeEstimate, Side};
pub use flat::{flat_detect, FlatReport, TOL_FLAT};
pub use lattice::{Axis, Lattice};
pub use lemma::{verify_max_formula, LemmaReport};
pub use stability::{mane_stability_sweep, StabilityOptions, StabilityReport};
