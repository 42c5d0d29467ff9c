use serde::{Deserialize, Serialize};

use super::{SweepCurve, SweepPair, SweepRow};
use crate::error::{Error, Result};
use crate::pipeline::Protocol;

/// Smallest sampled M whose median, and the median at every larger sampled
/// M, is below `threshold`.
pub fn transition_point(curve: &SweepCurve, threshold: f64) -> Option<usize> {
    let mut best = None;
    for p in curve.points.iter().rev() {
        if p.median_err < threshold {
            best = Some(p.m);
        } else {
            break;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Speedup {
    pub m_star_cs: Option<usize>,
    pub m_star_nocs: Option<usize>,
    /// `M*_nocs / M*_cs`, or a lower bound when the no-CS curve never crosses.
    pub ratio: Option<f64>,
    pub ratio_is_lower_bound: bool,
}

pub fn speedup_report(cs: &SweepCurve, nocs: &SweepCurve, threshold: f64) -> Speedup {
    let m_star_cs = transition_point(cs, threshold);
    let m_star_nocs = transition_point(nocs, threshold);
    let (ratio, ratio_is_lower_bound) = match (m_star_cs, m_star_nocs) {
        (Some(c), Some(d)) => (Some(d as f64 / c as f64), false),
        // the no-CS crossing lies beyond the largest sampled M
        (Some(c), None) => (nocs.points.last().map(|p| p.m as f64 / c as f64), true),
        (None, _) => (None, false),
    };
    Speedup {
        m_star_cs,
        m_star_nocs,
        ratio,
        ratio_is_lower_bound,
    }
}

/// A speedup with the sweep coordinates it belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupReport {
    pub n: usize,
    pub s: usize,
    pub policy: String,
    pub eta_beta: f64,
    pub threshold: f64,
    #[serde(flatten)]
    pub speedup: Speedup,
}

/// Regroup sweep rows into curves and report each (n, s, policy, ηβ) group.
pub fn speedup_reports(rows: &[SweepRow], threshold: f64) -> Result<Vec<SpeedupReport>> {
    let mut groups: Vec<(SpeedupKey, Vec<&SweepRow>)> = Vec::new();
    for row in rows {
        let key = SpeedupKey::of(row);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    groups
        .into_iter()
        .map(|(key, members)| {
            let curve = |protocol: Protocol| -> Result<SweepCurve> {
                let mut points: Vec<_> = members.iter().filter(|r| r.protocol == protocol).map(|r| r.point()).collect();
                points.sort_by_key(|p| p.m);
                if points.windows(2).any(|w| w[0].m == w[1].m) {
                    return Err(Error::Config(format!(
                        "duplicate M in {} curve for s = {}",
                        protocol.as_str(),
                        key.s
                    )));
                }
                Ok(SweepCurve { protocol, points })
            };
            let (cs, nocs) = (curve(Protocol::Cs)?, curve(Protocol::NoCs)?);
            if cs.points.is_empty() || nocs.points.is_empty() {
                return Err(Error::Config(format!("sweep for s = {} lacks a CS or NoCS curve", key.s)));
            }
            Ok(SpeedupReport {
                n: key.n,
                s: key.s,
                policy: key.policy,
                eta_beta: key.eta_beta,
                threshold,
                speedup: speedup_report(&cs, &nocs, threshold),
            })
        })
        .collect()
}

/// Reports straight from in-memory sweep results.
pub fn pair_reports(n: usize, policy: &str, eta_beta: f64, pairs: &[SweepPair], threshold: f64) -> Vec<SpeedupReport> {
    pairs
        .iter()
        .map(|p| SpeedupReport {
            n,
            s: p.s,
            policy: policy.to_string(),
            eta_beta,
            threshold,
            speedup: speedup_report(&p.cs, &p.nocs, threshold),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
struct SpeedupKey {
    n: usize,
    s: usize,
    policy: String,
    eta_beta: f64,
}

impl SpeedupKey {
    fn of(row: &SweepRow) -> Self {
        Self {
            n: row.n,
            s: row.s,
            policy: row.policy.clone(),
            eta_beta: row.eta_beta,
        }
    }
}
