use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::lattice::Lattice;
use crate::channel::ChannelKind;
use crate::engine::AlphaSolver;
use crate::error::{Error, Result};
use crate::oracle::restricted_alphas;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictedSource {
    /// Closed forms of the unperturbed channel model.
    Oracle,
    /// Channel-seeded minimization.
    Variational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaPoint {
    pub c: Vec<f64>,
    pub direct: Option<f64>,
    pub winner_channel: Option<String>,
    /// `(label, α restricted to that channel)`.
    pub restricted: Vec<(String, Option<f64>)>,
    pub max_restricted: Option<f64>,
    pub error: Option<f64>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub source: RestrictedSource,
    pub points: Vec<LemmaPoint>,
    pub max_error: f64,
    pub holes: usize,
    /// Every direct winner sits in A or a B channel.
    pub winners_in_a_or_b: bool,
}

/// Compares `α` with the largest channel-restricted value at every lattice
/// point.
pub fn verify_max_formula(solver: &AlphaSolver, lattice: &Lattice) -> Result<LemmaReport> {
    lattice.validate()?;
    let model = solver.model();
    let info = model
        .channels()
        .ok_or_else(|| Error::input("the max formula needs a channel model"))?;
    if lattice.dim() != model.n() {
        return Err(Error::config("lattice dimension does not match the model"));
    }
    let mut labels = vec![ChannelKind::A.to_string()];
    labels.extend(info.geodesic_kinds().iter().map(ChannelKind::to_string));
    let exact = model.exact_channel_spec().cloned();
    let source = if exact.is_some() {
        RestrictedSource::Oracle
    } else {
        RestrictedSource::Variational
    };

    let points: Vec<LemmaPoint> = lattice
        .points()
        .into_par_iter()
        .map(|c| {
            let mut failures = Vec::new();
            let direct = solver.alpha(&c);
            let (direct, winner_channel) = match direct {
                Ok(v) => (Some(v.alpha), Some(v.winner.channel)),
                Err(e) => {
                    failures.push(e.to_string());
                    (None, None)
                }
            };
            let restricted: Vec<(String, Option<f64>)> = match &exact {
                Some(spec) => match restricted_alphas(spec, &c) {
                    Ok(r) => {
                        let mut out = vec![(labels[0].clone(), Some(r.a))];
                        out.extend(r.b.iter().map(|(k, v)| (k.to_string(), Some(*v))));
                        out
                    }
                    Err(e) => {
                        failures.push(e.to_string());
                        labels.iter().map(|l| (l.clone(), None)).collect()
                    }
                },
                None => labels
                    .iter()
                    .map(|l| match solver.restricted_alpha(&c, l) {
                        Ok(v) => (l.clone(), Some(v.alpha)),
                        Err(e) => {
                            failures.push(format!("{l}: {e}"));
                            (l.clone(), None)
                        }
                    })
                    .collect(),
            };
            let max_restricted = restricted
                .iter()
                .filter_map(|(_, v)| *v)
                .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            let error = match (direct, max_restricted) {
                (Some(d), Some(m)) => Some((d - m).abs()),
                _ => None,
            };
            LemmaPoint {
                c,
                direct,
                winner_channel,
                restricted,
                max_restricted,
                error,
                failures,
            }
        })
        .collect();
    let holes = points.iter().filter(|p| p.error.is_none()).count();
    let max_error = points.iter().filter_map(|p| p.error).fold(0.0, f64::max);
    let winners_in_a_or_b = points
        .iter()
        .filter_map(|p| p.winner_channel.as_ref())
        .all(|w| labels.contains(w));
    Ok(LemmaReport {
        source,
        points,
        max_error,
        holes,
        winners_in_a_or_b,
    })
}
