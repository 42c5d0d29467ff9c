use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentConfig, HeatGrid, SweepPair, SweepPoint};
use crate::circuit::default_length;
use crate::error::{Error, Result};
use crate::hamiltonian::{CONVENTION, MIN_COUPLING};
use crate::pauli::signal_len;
use crate::pipeline::{NoCsOrder, Protocol};
use crate::recovery::SolverOptions;

pub const SWEEP_HEADER: [&str; 13] = [
    "protocol",
    "n",
    "s",
    "policy",
    "eta_beta",
    "M",
    "trials",
    "median_err",
    "q1_err",
    "q3_err",
    "success_rate",
    "threshold",
    "seed",
];

pub const HEATMAP_HEADER: [&str; 9] = [
    "n",
    "eta_beta",
    "s",
    "M",
    "s_over_N",
    "M_over_N",
    "trials",
    "success_rate",
    "seed",
];

const NA: &str = "NA";

fn exp(x: f64) -> String {
    if x.is_nan() {
        NA.to_string()
    } else {
        format!("{x:e}")
    }
}

fn parse_f64(field: &str) -> Result<f64> {
    if field == NA {
        return Ok(f64::NAN);
    }
    field.parse().map_err(|_| Error::Config(format!("not a number: {field:?}")))
}

fn parse_usize(field: &str) -> Result<usize> {
    field.parse().map_err(|_| Error::Config(format!("not an integer: {field:?}")))
}

fn to_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One line of a sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub protocol: Protocol,
    pub n: usize,
    pub s: usize,
    pub policy: String,
    pub eta_beta: f64,
    pub m: usize,
    pub trials: usize,
    pub median_err: f64,
    pub q1_err: f64,
    pub q3_err: f64,
    pub success_rate: f64,
    pub threshold: f64,
    pub seed: u64,
}

impl SweepRow {
    pub fn point(&self) -> SweepPoint {
        SweepPoint {
            m: self.m,
            trials: self.trials,
            median_err: self.median_err,
            q1_err: self.q1_err,
            q3_err: self.q3_err,
            success_rate: self.success_rate,
            failed: 0,
            unconverged: 0,
        }
    }

    fn fields(&self) -> [String; 13] {
        [
            self.protocol.as_str().to_string(),
            self.n.to_string(),
            self.s.to_string(),
            self.policy.clone(),
            self.eta_beta.to_string(),
            self.m.to_string(),
            self.trials.to_string(),
            exp(self.median_err),
            exp(self.q1_err),
            exp(self.q3_err),
            self.success_rate.to_string(),
            self.threshold.to_string(),
            self.seed.to_string(),
        ]
    }

    fn parse(record: &csv::StringRecord) -> Result<Self> {
        let f = |i: usize| record.get(i).unwrap_or("");
        Ok(Self {
            protocol: f(0).parse()?,
            n: parse_usize(f(1))?,
            s: parse_usize(f(2))?,
            policy: f(3).to_string(),
            eta_beta: parse_f64(f(4))?,
            m: parse_usize(f(5))?,
            trials: parse_usize(f(6))?,
            median_err: parse_f64(f(7))?,
            q1_err: parse_f64(f(8))?,
            q3_err: parse_f64(f(9))?,
            success_rate: parse_f64(f(10))?,
            threshold: parse_f64(f(11))?,
            seed: f(12).parse().map_err(|_| Error::Config(format!("bad seed {:?}", f(12))))?,
        })
    }
}

pub fn sweep_rows(cfg: &ExperimentConfig, pairs: &[SweepPair]) -> Vec<SweepRow> {
    let mut rows = Vec::new();
    for pair in pairs {
        for curve in [&pair.cs, &pair.nocs] {
            for p in &curve.points {
                rows.push(SweepRow {
                    protocol: curve.protocol,
                    n: cfg.n,
                    s: pair.s,
                    policy: cfg.policy.as_str().to_string(),
                    eta_beta: cfg.eta_beta,
                    m: p.m,
                    trials: p.trials,
                    median_err: p.median_err,
                    q1_err: p.q1_err,
                    q3_err: p.q3_err,
                    success_rate: p.success_rate,
                    threshold: cfg.threshold,
                    seed: cfg.seed,
                });
            }
        }
    }
    rows
}

pub fn sweep_csv(cfg: &ExperimentConfig, pairs: &[SweepPair]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_HEADER)?;
    for row in sweep_rows(cfg, pairs) {
        w.write_record(row.fields())?;
    }
    to_string(w)
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SWEEP_HEADER {
        return Err(Error::Config(format!("unexpected sweep header {header:?}")));
    }
    r.records().map(|rec| SweepRow::parse(&rec?)).collect()
}

pub fn heatmap_csv(cfg: &ExperimentConfig, grid: &HeatGrid) -> Result<String> {
    let total = signal_len(grid.n) as f64;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEATMAP_HEADER)?;
    for c in &grid.cells {
        w.write_record([
            grid.n.to_string(),
            grid.eta_beta.to_string(),
            c.s.to_string(),
            c.m.to_string(),
            (c.s as f64 / total).to_string(),
            (c.m as f64 / total).to_string(),
            grid.trials.to_string(),
            c.success_rate.map_or_else(|| NA.to_string(), |p| p.to_string()),
            cfg.seed.to_string(),
        ])?;
    }
    to_string(w)
}

/// Sidecar record of everything needed to rerun an output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub kind: &'static str,
    pub version: &'static str,
    pub config: ExperimentConfig,
    pub s_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub circuit_length: usize,
    pub solver: SolverOptions,
    pub nocs_order: NoCsOrder,
    pub coupling_distribution: String,
    pub pauli_convention: &'static str,
    pub seed_derivation: &'static str,
}

impl RunMeta {
    pub fn new(kind: &'static str, cfg: &ExperimentConfig) -> Self {
        let mut config = cfg.clone();
        config.output = Default::default();
        Self {
            kind,
            version: env!("CARGO_PKG_VERSION"),
            s_values: cfg.sparsities(),
            m_values: cfg.measurement_counts(),
            circuit_length: cfg.circuit_length.unwrap_or_else(|| default_length(cfg.n)),
            solver: cfg.solver,
            nocs_order: cfg.nocs_order(),
            coupling_distribution: format!("|J| uniform on [{MIN_COUPLING}, 1], sign uniform"),
            pauli_convention: CONVENTION,
            seed_derivation: "splitmix64 chain over (seed, s, tag, M, trial); tag 0 Hamiltonian, 1 CS, 2 NoCS",
            config,
        }
    }
}

/// `out.csv` → `out.meta.json`.
pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Write the CSV, its sidecar, and optionally an SVG.
pub fn write_outputs(csv_path: &Path, csv_text: &str, meta: &RunMeta, svg: Option<(&Path, &str)>) -> Result<()> {
    std::fs::write(csv_path, csv_text)?;
    std::fs::write(meta_path(csv_path), serde_json::to_string_pretty(meta)? + "\n")?;
    if let Some((path, text)) = svg {
        std::fs::write(path, text)?;
    }
    Ok(())
}
