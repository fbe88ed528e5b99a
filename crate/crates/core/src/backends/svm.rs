//! Soft-margin SVM with a polynomial kernel, trained by sequential minimal
//! optimization with second-order working-set selection.
//!
//! The dual is `min 1/2 a'Qa - e'a` subject to `0 <= a_i <= C` and
//! `y'a = 0`, where `Q_ij = y_i y_j K(x_i, x_j)`.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::{check_binary, check_dim};
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::math;

const TAU: f64 = 1e-12;

/// `K(x, z) = (gamma * <x, z> + coef0)^degree`, plus the soft-margin
/// penalty `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyKernelParams {
    pub degree: u32,
    pub gamma: f64,
    pub coef0: f64,
    pub c: f64,
}

impl PolyKernelParams {
    pub fn validate(&self) -> Result<()> {
        if self.degree == 0 {
            return Err(Error::InvalidConfig("kernel degree must be positive".into()));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidConfig("kernel gamma must be positive".into()));
        }
        if !self.coef0.is_finite() {
            return Err(Error::InvalidConfig("kernel coef0 must be finite".into()));
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return Err(Error::InvalidConfig("SVM C must be positive".into()));
        }
        Ok(())
    }

    /// `gamma = 1 / (d * var(x))` over all feature values.
    pub fn scaled_gamma(x: &Matrix) -> Result<f64> {
        let v = x.as_slice();
        if v.is_empty() {
            return Err(Error::Empty("features"));
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n;
        if var.is_nan() || var <= 0.0 {
            return Err(Error::ZeroVariance("svm features".into()));
        }
        Ok(1.0 / (x.cols() as f64 * var))
    }

    pub fn kernel(&self, a: &[f64], b: &[f64]) -> f64 {
        math::powi(self.gamma * dot(a, b) + self.coef0, self.degree)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelModel {
    pub support_vectors: Matrix,
    /// `alpha_i * y_i` for each support vector.
    pub dual_coefs: Vec<f64>,
    pub bias: f64,
    pub kernel: PolyKernelParams,
}

/// Signed margin `sum_i coef_i K(sv_i, x) + bias`.
pub fn svm_decision(model: &KernelModel, x: &[f64]) -> Result<f64> {
    check_dim(model.support_vectors.cols(), x.len())?;
    let s: f64 = model
        .support_vectors
        .iter_rows()
        .zip(&model.dual_coefs)
        .map(|(sv, a)| a * model.kernel.kernel(sv, x))
        .sum();
    Ok(s + model.bias)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoOptions {
    /// Stop once the maximal KKT violation `m(a) - M(a)` drops below this.
    pub tol: f64,
    /// Defaults to `max(10^7, 100 n)`.
    pub max_iter: Option<usize>,
    pub cache_bytes: usize,
}

impl Default for SmoOptions {
    fn default() -> Self {
        Self { tol: 1e-3, max_iter: None, cache_bytes: 256 << 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmFit {
    pub model: KernelModel,
    /// Dual variables for every training point (not just support vectors).
    pub alphas: Vec<f64>,
    pub iterations: usize,
    /// Maximal KKT violation at exit.
    pub kkt_gap: f64,
    pub converged: bool,
}

/// Kernel rows computed on demand, evicted first-in first-out once the
/// byte budget is spent.
struct KernelRows<'a> {
    x: &'a Matrix,
    params: PolyKernelParams,
    rows: Vec<Option<Vec<f64>>>,
    order: VecDeque<usize>,
    capacity: usize,
}

impl<'a> KernelRows<'a> {
    fn new(x: &'a Matrix, params: PolyKernelParams, cache_bytes: usize) -> Self {
        let n = x.rows();
        let capacity = (cache_bytes / (8 * n.max(1))).max(2);
        Self { x, params, rows: vec![None; n], order: VecDeque::new(), capacity }
    }

    fn row(&mut self, i: usize) -> Result<&[f64]> {
        if self.rows[i].is_none() {
            let xi = self.x.row(i);
            let r: Vec<f64> = self.x.iter_rows().map(|xt| self.params.kernel(xi, xt)).collect();
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("kernel values"));
            }
            if self.order.len() >= self.capacity {
                if let Some(old) = self.order.pop_front() {
                    self.rows[old] = None;
                }
            }
            self.order.push_back(i);
            self.rows[i] = Some(r);
        }
        Ok(self.rows[i].as_deref().unwrap_or(&[]))
    }

    /// Two rows at once; `i != j`.
    fn pair(&mut self, i: usize, j: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let ri = self.row(i)?.to_vec();
        let rj = self.row(j)?.to_vec();
        Ok((ri, rj))
    }
}

pub fn train_svm_smo(x: &Matrix, labels: &[bool], params: PolyKernelParams) -> Result<SvmFit> {
    train_svm_smo_with(x, labels, params, SmoOptions::default())
}

pub fn train_svm_smo_with(
    x: &Matrix,
    labels: &[bool],
    params: PolyKernelParams,
    opts: SmoOptions,
) -> Result<SvmFit> {
    check_dim(x.rows(), labels.len())?;
    check_binary(labels)?;
    params.validate()?;
    if !x.is_finite() {
        return Err(Error::NonFinite("features"));
    }
    let n = x.rows();
    let c = params.c;
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let diag: Vec<f64> = x.iter_rows().map(|r| params.kernel(r, r)).collect();
    if diag.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("kernel values"));
    }
    let mut cache = KernelRows::new(x, params, opts.cache_bytes);
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let max_iter = opts.max_iter.unwrap_or_else(|| (100 * n).max(10_000_000));

    let in_up = |a: f64, yt: f64| (yt > 0.0 && a < c) || (yt < 0.0 && a > 0.0);
    let in_low = |a: f64, yt: f64| (yt > 0.0 && a > 0.0) || (yt < 0.0 && a < c);

    let mut iterations = 0;
    let mut kkt_gap;
    let converged;
    loop {
        let mut gmax = f64::NEG_INFINITY;
        let mut gmin = f64::INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let v = -y[t] * grad[t];
            if in_up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i_sel = Some(t);
            }
            if in_low(alpha[t], y[t]) && v < gmin {
                gmin = v;
            }
        }
        kkt_gap = gmax - gmin;
        let Some(i) = i_sel else {
            converged = true;
            break;
        };
        if kkt_gap < opts.tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            converged = false;
            break;
        }

        let ki = cache.row(i)?;
        let mut j_sel = None;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if !in_low(alpha[t], y[t]) {
                continue;
            }
            let b = gmax + y[t] * grad[t];
            if b > 0.0 {
                let mut a = diag[i] + diag[t] - 2.0 * ki[t];
                if a <= 0.0 {
                    a = TAU;
                }
                let obj = -(b * b) / a;
                if obj < best {
                    best = obj;
                    j_sel = Some(t);
                }
            }
        }
        let Some(j) = j_sel else {
            converged = false;
            break;
        };
        iterations += 1;

        let (ki, kj) = cache.pair(i, j)?;
        let (old_i, old_j) = (alpha[i], alpha[j]);
        let mut quad = diag[i] + diag[j] - 2.0 * ki[j];
        if quad <= 0.0 {
            quad = TAU;
        }
        if y[i] != y[j] {
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * ki[t] * di + y[j] * kj[t] * dj);
        }
    }

    let bias = -rho(&alpha, &grad, &y, c);
    let sv: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    let model = KernelModel {
        support_vectors: x.select_rows(&sv),
        dual_coefs: sv.iter().map(|&i| alpha[i] * y[i]).collect(),
        bias,
        kernel: params,
    };
    Ok(SvmFit { model, alphas: alpha, iterations, kkt_gap, converged })
}

/// Offset from free support vectors, or the midpoint of the feasible
/// interval when none are free.
fn rho(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..alpha.len() {
        let yg = y[t] * grad[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    }
}

/// Maximal KKT violation of `alpha`, recomputing the dual gradient from
/// scratch.
pub fn kkt_violation(x: &Matrix, labels: &[bool], params: &PolyKernelParams, alpha: &[f64]) -> f64 {
    let n = x.rows();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { -1.0 }).collect();
    let (mut up, mut low) = (f64::NEG_INFINITY, f64::INFINITY);
    for t in 0..n {
        let g: f64 = (0..n)
            .map(|s| y[t] * y[s] * alpha[s] * params.kernel(x.row(t), x.row(s)))
            .sum::<f64>()
            - 1.0;
        let v = -y[t] * g;
        let a = alpha[t];
        if (y[t] > 0.0 && a < params.c) || (y[t] < 0.0 && a > 0.0) {
            up = up.max(v);
        }
        if (y[t] > 0.0 && a > 0.0) || (y[t] < 0.0 && a < params.c) {
            low = low.min(v);
        }
    }
    (up - low).max(0.0)
}
