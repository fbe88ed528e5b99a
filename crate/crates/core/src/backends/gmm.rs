//! Diagonal-covariance Gaussian mixtures fitted by EM.

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::check_dim;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmParams {
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Diagonal covariance per component.
    pub variances: Vec<Vec<f64>>,
}

impl GmmParams {
    pub fn n_components(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self) -> usize {
        self.means.first().map_or(0, Vec::len)
    }

    fn component_logpdf(&self, k: usize, x: &[f64]) -> f64 {
        let (mu, var) = (&self.means[k], &self.variances[k]);
        let mut acc = 0.0;
        for ((xi, m), v) in x.iter().zip(mu).zip(var) {
            let d = xi - m;
            acc += math::ln(*v) + d * d / v;
        }
        -0.5 * (acc + x.len() as f64 * math::LN_2PI)
    }

    /// `ln w_k + ln N(x; mu_k, diag(var_k))` for every component.
    fn weighted_logpdfs(&self, x: &[f64], out: &mut [f64]) {
        for (k, o) in out.iter_mut().enumerate() {
            let w = self.weights[k];
            *o = if w > 0.0 { math::ln(w) + self.component_logpdf(k, x) } else { f64::NEG_INFINITY };
        }
    }
}

/// `ln sum_k w_k N(x; mu_k, Sigma_k)`, evaluated by log-sum-exp.
pub fn gmm_loglik(params: &GmmParams, x: &[f64]) -> Result<f64> {
    check_dim(params.dim(), x.len())?;
    let mut buf = vec![0.0; params.n_components()];
    params.weighted_logpdfs(x, &mut buf);
    Ok(math::log_sum_exp(&buf))
}

/// Posterior component probabilities, one row per data point.
pub fn responsibilities(params: &GmmParams, data: &Matrix) -> Result<Matrix> {
    check_dim(params.dim(), data.cols())?;
    let k = params.n_components();
    let mut out = Matrix::zeros(data.rows(), k);
    for (i, x) in data.iter_rows().enumerate() {
        let row = out.row_mut(i);
        params.weighted_logpdfs(x, row);
        let total = math::log_sum_exp(row);
        for r in row.iter_mut() {
            *r = math::exp(*r - total);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmmOptions {
    pub max_iter: usize,
    /// Stop when the mean log-likelihood per point improves by less.
    pub tol: f64,
    /// Variance floor as a fraction of the per-dimension data variance.
    pub floor_scale: f64,
}

impl Default for GmmOptions {
    fn default() -> Self {
        Self { max_iter: 200, tol: 1e-6, floor_scale: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GmmFit {
    pub params: GmmParams,
    /// Mean log-likelihood per point before each M-step and at exit.
    pub log_likelihood: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding: first center uniform, the rest drawn proportionally
/// to squared distance from the nearest chosen center.
fn kmeans_pp(data: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = data.rows();
    let mut centers = Vec::with_capacity(k);
    centers.push(data.row(rng.random_range(0..n)).to_vec());
    let mut d2: Vec<f64> = data.iter_rows().map(|r| sq_dist(r, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, d) in d2.iter().enumerate() {
                acc += d;
                if acc > target {
                    chosen = i;
                    break;
                }
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = data.row(pick).to_vec();
        for (d, r) in d2.iter_mut().zip(data.iter_rows()) {
            *d = d.min(sq_dist(r, &c));
        }
        centers.push(c);
    }
    centers
}

fn column_variances(data: &Matrix) -> Vec<f64> {
    let n = data.rows() as f64;
    (0..data.cols())
        .map(|j| {
            let mean = data.iter_rows().map(|r| r[j]).sum::<f64>() / n;
            data.iter_rows().map(|r| (r[j] - mean) * (r[j] - mean)).sum::<f64>() / n
        })
        .collect()
}

pub fn train_gmm_em(
    data: &Matrix,
    n_components: usize,
    seed: u64,
    opts: GmmOptions,
) -> Result<GmmFit> {
    let (n, d) = (data.rows(), data.cols());
    if n_components == 0 {
        return Err(Error::InvalidConfig("GMM needs at least one component".into()));
    }
    if n < n_components {
        return Err(Error::TooFewRows { need: n_components, got: n });
    }
    if d == 0 {
        return Err(Error::Empty("GMM feature dimension"));
    }
    if !data.is_finite() {
        return Err(Error::NonFinite("features"));
    }
    let data_var = column_variances(data);
    // A constant dimension still needs a positive floor.
    let floor: Vec<f64> = data_var
        .iter()
        .map(|v| if *v > 0.0 { opts.floor_scale * v } else { 1e-12 })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init_var: Vec<f64> = data_var.iter().zip(&floor).map(|(v, f)| v.max(*f)).collect();
    let mut params = GmmParams {
        weights: vec![1.0 / n_components as f64; n_components],
        means: kmeans_pp(data, n_components, &mut rng),
        variances: vec![init_var; n_components],
    };

    let mut history = Vec::new();
    let mut resp = Matrix::zeros(n, n_components);
    let mut iterations = 0;
    let mut converged = false;
    loop {
        // E-step
        let mut ll = 0.0;
        for (i, x) in data.iter_rows().enumerate() {
            let row = resp.row_mut(i);
            params.weighted_logpdfs(x, row);
            let total = math::log_sum_exp(row);
            ll += total;
            for r in row.iter_mut() {
                *r = math::exp(*r - total);
            }
        }
        let ll = ll / n as f64;
        if let Some(prev) = history.last() {
            if ll - prev < opts.tol {
                history.push(ll);
                converged = true;
                break;
            }
        }
        history.push(ll);
        if iterations >= opts.max_iter {
            break;
        }
        iterations += 1;

        // M-step
        for k in 0..n_components {
            let nk: f64 = (0..n).map(|i| resp.get(i, k)).sum();
            params.weights[k] = nk / n as f64;
            if nk <= 0.0 {
                continue;
            }
            let mut mean = vec![0.0; d];
            for (i, x) in data.iter_rows().enumerate() {
                let r = resp.get(i, k);
                for (m, xi) in mean.iter_mut().zip(x) {
                    *m += r * xi;
                }
            }
            mean.iter_mut().for_each(|m| *m /= nk);
            let mut var = vec![0.0; d];
            for (i, x) in data.iter_rows().enumerate() {
                let r = resp.get(i, k);
                for ((v, xi), m) in var.iter_mut().zip(x).zip(&mean) {
                    *v += r * (xi - m) * (xi - m);
                }
            }
            for (v, f) in var.iter_mut().zip(&floor) {
                *v = (*v / nk).max(*f);
            }
            params.means[k] = mean;
            params.variances[k] = var;
        }
    }
    Ok(GmmFit { params, log_likelihood: history, iterations, converged })
}
