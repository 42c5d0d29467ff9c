//! Basis pursuit and the truncated-tomography ("no CS") estimator.
//!
//! `basis_pursuit` solves `min ‖w‖₁ s.t. Cw = y` by ADMM, alternating a
//! Euclidean projection onto `{w : Cw = y}` with soft-thresholding. When the
//! rows of `C` are orthonormal the projection is `w - Cᵀ(Cw - y)`; otherwise a
//! Cholesky-factored Gram matrix is used and the fallback is recorded.
//!
//! The problem is solved for `y / ‖y‖∞` and the solution rescaled, so the
//! fixed threshold is always matched to the signal scale.
//!
//! Periodically the iterate is polished: a least-squares solve on the
//! near-active columns, kept only when a dual certificate `λ` with
//! `|C_jᵀλ| ≤ 1` and `C_jᵀλ = sign(w_j)` on the support proves it optimal.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, QR};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sensing::{gram_deviation, MeasurementPlan};
use crate::thermal::PolarizationVector;

/// Row-orthonormality tolerance below which the fast projection is used.
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Slack allowed on the dual certificate `max_j |C_jᵀλ| ≤ 1`.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// Columns whose `|x + u|` reaches this fraction of the threshold form the
/// first polish candidate; the second is the `M` largest.
const NEAR_ACTIVE: f64 = 0.9;
/// Entries below this fraction of the largest are dropped from a polished solution.
const POLISH_DROP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Relative feasibility tolerance on `‖Cw - y‖₂ / max(1, ‖y‖₂)`.
    pub feasibility_tol: f64,
    /// Bound on the largest per-iteration change of the sparse iterate.
    pub stationarity_tol: f64,
    pub max_iterations: usize,
    /// ADMM penalty `ρ`; the shrinkage threshold is `1/ρ`.
    pub penalty: f64,
    /// Measurement-noise level; a positive value switches to the residual-ball
    /// early stop. Experimental.
    pub noise_sigma: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-10,
            stationarity_tol: 1e-10,
            max_iterations: 200_000,
            penalty: 1.0,
            noise_sigma: 0.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0 && x.is_finite();
        if !(positive(self.feasibility_tol) && positive(self.stationarity_tol) && positive(self.penalty)) {
            return Err(domain!("solver tolerances and penalty must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(domain!("max_iterations must be at least 1"));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(domain!("noise_sigma must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResult {
    pub estimate: Vec<f64>,
    pub iterations: usize,
    /// `‖Cw - y‖₂` of the returned estimate.
    pub residual: f64,
    pub converged: bool,
    /// The rows were not orthonormal and the Gram-matrix projection was used.
    pub gram_fallback: bool,
    /// The estimate came from a certified polish step.
    #[serde(default)]
    pub polished: bool,
}

enum Projector {
    Orthonormal,
    Gram(Cholesky<f64, Dyn>),
}

/// `arg min ‖w‖₁` subject to `Cw = y`.
pub fn basis_pursuit(c: &DMatrix<f64>, y: &[f64], opts: &SolverOptions) -> Result<RecoveryResult> {
    opts.validate()?;
    let (m, n) = c.shape();
    if m != y.len() {
        return Err(domain!("C has {m} rows but y has {} entries", y.len()));
    }
    if m == 0 || n == 0 {
        return Err(domain!("empty sensing matrix"));
    }
    let projector = if gram_deviation(c) <= ORTHONORMAL_TOL {
        Projector::Orthonormal
    } else {
        let gram = c * c.transpose();
        let largest = gram.diagonal().max();
        let chol = Cholesky::new(gram).ok_or_else(|| Error::Numerical("rows of C are linearly dependent".into()))?;
        let smallest_pivot = chol.l_dirty().diagonal().iter().fold(f64::INFINITY, |a, &b| a.min(b * b));
        if !(smallest_pivot > 1e-12 * largest) {
            return Err(Error::Numerical("rows of C are numerically dependent".into()));
        }
        Projector::Gram(chol)
    };
    let gram_fallback = matches!(projector, Projector::Gram(_));

    let scale = y.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(RecoveryResult {
            estimate: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
            gram_fallback,
            polished: false,
        });
    }
    let yn = DVector::from_iterator(m, y.iter().map(|v| v / scale));
    let y_norm = yn.norm();
    let feas_bound = opts.feasibility_tol * y_norm.max(1.0);
    let noisy = opts.noise_sigma > 0.0;
    let ball = (opts.noise_sigma / scale * (m as f64).sqrt()).max(feas_bound);
    let threshold = 1.0 / opts.penalty;

    let mut x = DVector::<f64>::zeros(n);
    let mut z = DVector::<f64>::zeros(n);
    let mut u = DVector::<f64>::zeros(n);
    let mut t = DVector::<f64>::zeros(n);
    let mut r = DVector::<f64>::zeros(m);
    let mut corr = DVector::<f64>::zeros(m);

    let project = |t: &DVector<f64>, r: &mut DVector<f64>, corr: &mut DVector<f64>, x: &mut DVector<f64>| {
        // r = C t - y
        r.copy_from(&yn);
        r.gemv(1.0, c, t, -1.0);
        x.copy_from(t);
        match &projector {
            Projector::Orthonormal => x.gemv_tr(-1.0, c, r, 1.0),
            Projector::Gram(chol) => {
                corr.copy_from(r);
                chol.solve_mut(corr);
                x.gemv_tr(-1.0, c, corr, 1.0);
            }
        }
    };
    let residual_of = |w: &DVector<f64>, r: &mut DVector<f64>| -> f64 {
        r.copy_from(&yn);
        r.gemv(1.0, c, w, -1.0);
        r.norm()
    };

    let mut converged = false;
    let mut iterations = 0;
    let mut stopped_on_ball = false;
    let mut polished = None;
    let mut tried: Vec<Vec<usize>> = Vec::new();
    let mut next_polish = POLISH_START;
    while iterations < opts.max_iterations {
        iterations += 1;
        t.copy_from(&z);
        t -= &u;
        project(&t, &mut r, &mut corr, &mut x);

        let mut change = 0.0f64;
        for i in 0..n {
            let v = x[i] + u[i];
            let shrunk = v.signum() * (v.abs() - threshold).max(0.0);
            change = change.max((shrunk - z[i]).abs());
            z[i] = shrunk;
            u[i] = v - shrunk;
        }

        if noisy {
            if residual_of(&z, &mut r) <= ball {
                stopped_on_ball = true;
                converged = true;
                break;
            }
        } else if change <= opts.stationarity_tol && residual_of(&z, &mut r) <= feas_bound {
            converged = true;
            break;
        } else if iterations >= next_polish {
            next_polish = iterations + POLISH_START.max(m * m / n);
            let near = ranked_columns(&x, &u, NEAR_ACTIVE * threshold, m);
            let top = ranked_columns(&x, &u, 0.0, m);
            let fresh = [near, top]
                .into_iter()
                .filter(|cand| !cand.is_empty() && !tried.contains(cand));
            for cand in fresh.collect::<Vec<_>>() {
                if let Some(w) = polish(c, &yn, &cand, &u, opts.penalty, feas_bound) {
                    polished = Some(w);
                    break;
                }
                tried.push(cand);
            }
            if tried.len() > 4 {
                tried.drain(..tried.len() - 4);
            }
            if polished.is_some() {
                converged = true;
                break;
            }
        }
    }

    let was_polished = polished.is_some();
    let w = match polished {
        Some(w) => w,
        None if stopped_on_ball => z,
        None => x,
    };
    let residual = residual_of(&w, &mut r) * scale;
    Ok(RecoveryResult {
        estimate: w.iter().map(|v| v * scale).collect(),
        iterations,
        residual,
        converged,
        gram_fallback,
        polished: was_polished,
    })
}

const POLISH_START: usize = 20;

/// The at most `m` columns with the largest `|x_i + u_i| >= floor`, ascending.
fn ranked_columns(x: &DVector<f64>, u: &DVector<f64>, floor: f64, m: usize) -> Vec<usize> {
    let mut idx: Vec<(usize, f64)> = (0..x.len())
        .map(|i| (i, (x[i] + u[i]).abs()))
        .filter(|&(_, v)| v > 0.0 && v >= floor)
        .collect();
    idx.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    idx.truncate(m);
    let mut out: Vec<usize> = idx.into_iter().map(|(i, _)| i).collect();
    out.sort_unstable();
    out
}

fn least_squares(c: &DMatrix<f64>, y: &DVector<f64>, cols: &[usize]) -> Option<(QR<f64, Dyn, Dyn>, DVector<f64>)> {
    let sub = c.select_columns(cols);
    let qr = QR::new(sub);
    let r = qr.r();
    let diag = r.diagonal();
    let largest = diag.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !(diag.iter().all(|v| v.abs() > 1e-10 * largest)) {
        return None;
    }
    let qty = qr.q().transpose() * y;
    let w = r.solve_upper_triangular(&qty)?;
    Some((qr, w))
}

/// Least squares on `cols`, returned only with a passing optimality certificate.
fn polish(
    c: &DMatrix<f64>,
    y: &DVector<f64>,
    cols: &[usize],
    u: &DVector<f64>,
    penalty: f64,
    feas_bound: f64,
) -> Option<DVector<f64>> {
    let (_, w) = least_squares(c, y, cols)?;
    let largest = w.amax();
    if largest == 0.0 {
        return None;
    }
    let support: Vec<usize> = cols
        .iter()
        .zip(w.iter())
        .filter(|(_, v)| v.abs() > POLISH_DROP * largest)
        .map(|(&i, _)| i)
        .collect();
    let (qr, ws) = least_squares(c, y, &support)?;

    let mut full = DVector::<f64>::zeros(c.ncols());
    for (&i, &v) in support.iter().zip(ws.iter()) {
        full[i] = v;
    }
    if (c * &full - y).norm() > feas_bound {
        return None;
    }

    // λ closest to the ADMM dual estimate C(ρu) subject to C_Sᵀλ = sign(w_S)
    let lambda0 = c * (u * penalty);
    let signs = DVector::from_iterator(support.len(), ws.iter().map(|v| v.signum()));
    let gap = signs - c.select_columns(&support).transpose() * &lambda0;
    let step = qr.r().transpose().solve_lower_triangular(&gap)?;
    let lambda = lambda0 + qr.q() * step;
    let dual = c.transpose() * lambda;
    if dual.amax() <= 1.0 + CERTIFICATE_TOL {
        Some(full)
    } else {
        None
    }
}

/// Measured components copied in, everything else set to zero.
pub fn no_cs_estimate(plan: &MeasurementPlan, y_direct: &[f64]) -> Result<PolarizationVector> {
    if plan.len() != y_direct.len() {
        return Err(domain!(
            "plan has {} entries but {} values were given",
            plan.len(),
            y_direct.len()
        ));
    }
    let mut v = PolarizationVector::zeros(plan.n)?.into_vec();
    for (&a, &yk) in plan.indices.iter().zip(y_direct) {
        v[a - 1] = yk;
    }
    PolarizationVector::new(plan.n, v)
}

pub fn l1_norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x.abs()).sum()
}

pub fn l2_norm(w: &[f64]) -> f64 {
    w.iter().map(|x| x * x).sum::<f64>().sqrt()
}
