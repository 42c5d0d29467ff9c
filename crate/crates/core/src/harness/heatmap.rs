use serde::{Deserialize, Serialize};

use super::{run_keys, ExperimentConfig, TrialKey, TrialOutcome};
use crate::error::Result;
use crate::pauli::signal_len;
use crate::pipeline::Protocol;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub s: usize,
    #[serde(rename = "M")]
    pub m: usize,
    /// `None` where `s > M`.
    pub success_rate: Option<f64>,
    pub failed: usize,
}

/// CS success rates over (s/N, M/N), rows by s, columns by M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatGrid {
    pub n: usize,
    pub eta_beta: f64,
    pub trials: usize,
    pub s_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub cells: Vec<HeatCell>,
}

impl HeatGrid {
    pub fn signal_len(&self) -> usize {
        signal_len(self.n)
    }

    pub fn cell(&self, row: usize, col: usize) -> &HeatCell {
        &self.cells[row * self.m_values.len() + col]
    }

    pub fn row(&self, row: usize) -> &[HeatCell] {
        let w = self.m_values.len();
        &self.cells[row * w..(row + 1) * w]
    }

    /// Spearman correlation of success rate against M over each row's
    /// feasible cells; `None` for rows with fewer than two cells or no spread.
    pub fn row_trends(&self) -> Vec<Option<f64>> {
        (0..self.s_values.len())
            .map(|r| {
                let (xs, ys): (Vec<f64>, Vec<f64>) = self
                    .row(r)
                    .iter()
                    .filter_map(|c| c.success_rate.map(|p| (c.m as f64, p)))
                    .unzip();
                spearman(&xs, &ys)
            })
            .collect()
    }
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        // ties share the average rank
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mean = (x.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mean) * (b - mean);
        sxx += (a - mean) * (a - mean);
        syy += (b - mean) * (b - mean);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// CS success rate per (s, M) cell; cells with `s > M` are NA and not run.
pub fn run_heatmap(cfg: &ExperimentConfig, jobs: usize) -> Result<HeatGrid> {
    cfg.validate()?;
    let ss = cfg.sparsities();
    let ms = cfg.measurement_counts();
    let mut keys = Vec::new();
    for &s in &ss {
        for &m in ms.iter().filter(|&&m| s <= m) {
            for trial in 0..cfg.trials {
                keys.push(TrialKey {
                    s,
                    protocol: Protocol::Cs,
                    m,
                    trial,
                });
            }
        }
    }
    let outcomes = run_keys(cfg, &keys, jobs)?;
    let mut chunks = outcomes.chunks(cfg.trials);

    let mut cells = Vec::with_capacity(ss.len() * ms.len());
    for &s in &ss {
        for &m in &ms {
            if s > m {
                cells.push(HeatCell {
                    s,
                    m,
                    success_rate: None,
                    failed: 0,
                });
                continue;
            }
            let chunk = chunks.next().expect("one chunk per feasible cell");
            let successes = chunk
                .iter()
                .filter(|o| matches!(o, TrialOutcome::Done { success: true, .. }))
                .count();
            let failed = chunk.iter().filter(|o| matches!(o, TrialOutcome::Failed(_))).count();
            cells.push(HeatCell {
                s,
                m,
                success_rate: Some(successes as f64 / chunk.len() as f64),
                failed,
            });
        }
    }
    Ok(HeatGrid {
        n: cfg.n,
        eta_beta: cfg.eta_beta,
        trials: cfg.trials,
        s_values: ss,
        m_values: ms,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[0.1, 0.2, 0.5, 0.9]).unwrap() - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(spearman(&x, &[1.0; 4]), None);
        assert_eq!(spearman(&[1.0], &[1.0]), None);
        // ties: 0,0,1,1 against 1..4 gives 2/sqrt(5)
        let r = spearman(&x, &[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!((r - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tied_ranks_average() {
        assert_eq!(ranks(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }
}
