//! L2-regularized logistic regression fitted by damped Newton iterations,
//! with stratified k-fold selection of the regularization strength.
//!
//! Objective: `sum_i softplus(z_i) - y_i z_i + (reg / 2) |w|^2` with
//! `z_i = w . x_i + b`. The intercept is not penalized.

use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_binary, check_dim};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_solve, dot, Matrix};
use crate::math;

pub const MAX_ITER: usize = 10_000;
pub const GRAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub reg_strength: f64,
}

/// A trained model plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct LrFit {
    pub model: LinearModel,
    pub iterations: usize,
    /// Infinity norm of the objective gradient at the returned parameters.
    pub grad_inf_norm: f64,
    /// False when the iteration cap or a stalled line search ended the fit.
    pub converged: bool,
}

/// Returns the logit `w . x + b`.
pub fn lr_decision(model: &LinearModel, x: &[f64]) -> Result<f64> {
    check_dim(model.weights.len(), x.len())?;
    Ok(dot(&model.weights, x) + model.bias)
}

fn check_inputs(x: &Matrix, y: &[bool]) -> Result<()> {
    check_dim(x.rows(), y.len())?;
    if !x.is_finite() {
        return Err(Error::NonFinite("features"));
    }
    check_binary(y)
}

/// Regularized negative log-likelihood. `theta` is `[w..., b]`.
pub fn lr_objective(x: &Matrix, y: &[bool], theta: &[f64], reg: f64) -> f64 {
    let d = x.cols();
    let (w, b) = (&theta[..d], theta[d]);
    let nll: f64 = x
        .iter_rows()
        .zip(y)
        .map(|(row, &yi)| {
            let z = dot(w, row) + b;
            math::softplus(z) - if yi { z } else { 0.0 }
        })
        .sum();
    nll + 0.5 * reg * dot(w, w)
}

/// Gradient of [`lr_objective`], laid out like `theta`.
pub fn lr_gradient(x: &Matrix, y: &[bool], theta: &[f64], reg: f64) -> Vec<f64> {
    let d = x.cols();
    let (w, b) = (&theta[..d], theta[d]);
    let mut g = vec![0.0; d + 1];
    for (row, &yi) in x.iter_rows().zip(y) {
        let r = math::sigmoid(dot(w, row) + b) - if yi { 1.0 } else { 0.0 };
        for (gk, xk) in g.iter_mut().zip(row) {
            *gk += r * xk;
        }
        g[d] += r;
    }
    for (gk, wk) in g.iter_mut().zip(w) {
        *gk += reg * wk;
    }
    g
}

fn hessian(x: &Matrix, theta: &[f64], reg: f64) -> Matrix {
    let d = x.cols();
    let (w, b) = (&theta[..d], theta[d]);
    let mut h = Matrix::zeros(d + 1, d + 1);
    let mut xt = vec![1.0; d + 1];
    for row in x.iter_rows() {
        let p = math::sigmoid(dot(w, row) + b);
        let s = p * (1.0 - p);
        xt[..d].copy_from_slice(row);
        for i in 0..=d {
            for j in 0..=i {
                let v = h.get(i, j) + s * xt[i] * xt[j];
                h.set(i, j, v);
            }
        }
    }
    for i in 0..=d {
        for j in 0..i {
            h.set(j, i, h.get(i, j));
        }
    }
    for i in 0..d {
        h.set(i, i, h.get(i, i) + reg);
    }
    h
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(math::abs(*x)))
}

/// Newton direction, with diagonal damping if the Hessian is not
/// numerically positive definite.
fn newton_direction(h: &Matrix, g: &[f64]) -> Vec<f64> {
    let neg: Vec<f64> = g.iter().map(|v| -v).collect();
    if let Some(d) = cholesky_solve(h, &neg) {
        return d;
    }
    let n = h.rows();
    let scale = (0..n).map(|i| h.get(i, i)).fold(0.0, f64::max).max(1.0);
    let mut mu = 1e-12 * scale;
    loop {
        let mut hd = h.clone();
        for i in 0..n {
            hd.set(i, i, h.get(i, i) + mu);
        }
        if let Some(d) = cholesky_solve(&hd, &neg) {
            return d;
        }
        mu *= 10.0;
        if !mu.is_finite() {
            return neg;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
}

impl Default for LrOptions {
    fn default() -> Self {
        Self { max_iter: MAX_ITER, grad_tol: GRAD_TOL }
    }
}

/// Fits the model. Hitting the iteration cap is reported in
/// [`LrFit::converged`], not as an error.
pub fn train_lr(x: &Matrix, y: &[bool], reg_strength: f64) -> Result<LrFit> {
    train_lr_with(x, y, reg_strength, LrOptions::default())
}

pub fn train_lr_with(x: &Matrix, y: &[bool], reg_strength: f64, opts: LrOptions) -> Result<LrFit> {
    check_inputs(x, y)?;
    if !(reg_strength.is_finite() && reg_strength >= 0.0) {
        return Err(Error::InvalidConfig("regularization strength must be >= 0".into()));
    }
    let d = x.cols();
    let prior = y.iter().filter(|&&v| v).count() as f64 / y.len() as f64;
    let mut theta = vec![0.0; d + 1];
    theta[d] = math::ln(prior / (1.0 - prior));

    let mut f = lr_objective(x, y, &theta, reg_strength);
    let mut g = lr_gradient(x, y, &theta, reg_strength);
    let mut iterations = 0;
    let mut converged = inf_norm(&g) <= opts.grad_tol;
    while !converged && iterations < opts.max_iter {
        iterations += 1;
        let h = hessian(x, &theta, reg_strength);
        let dir = newton_direction(&h, &g);
        let slope = dot(&g, &dir);
        // Near the optimum the objective change drops below its rounding
        // error; the slack lets the Newton step through there.
        let slack = 1e-13 * (1.0 + math::abs(f));
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = theta.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            let fc = lr_objective(x, y, &cand, reg_strength);
            if fc.is_finite() && fc <= f + 1e-4 * t * slope + slack {
                accepted = Some((cand, fc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        theta = cand;
        f = fc;
        g = lr_gradient(x, y, &theta, reg_strength);
        converged = inf_norm(&g) <= opts.grad_tol;
    }
    let grad_inf_norm = inf_norm(&g);
    let bias = theta.pop().unwrap_or(0.0);
    Ok(LrFit {
        model: LinearModel { weights: theta, bias, reg_strength },
        iterations,
        grad_inf_norm,
        converged,
    })
}

/// Mean negative log-likelihood of `model` on labeled data.
pub fn mean_nll(model: &LinearModel, x: &Matrix, y: &[bool]) -> f64 {
    let total: f64 = x
        .iter_rows()
        .zip(y)
        .map(|(row, &yi)| {
            let z = dot(&model.weights, row) + model.bias;
            math::softplus(z) - if yi { z } else { 0.0 }
        })
        .sum();
    total / y.len() as f64
}

/// Stratified fold assignment: each class is shuffled with the seeded RNG
/// and dealt round-robin, negatives continuing where positives stopped.
pub fn stratified_folds(y: &[bool], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<usize> = (0..y.len()).filter(|&i| y[i]).collect();
    let mut neg: Vec<usize> = (0..y.len()).filter(|&i| !y[i]).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold = vec![0; y.len()];
    for (r, &i) in pos.iter().chain(&neg).enumerate() {
        fold[i] = r % k;
    }
    fold
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub fit: LrFit,
    pub selected: f64,
    /// Mean held-out NLL per grid value, in grid order.
    pub validation_loss: Vec<f64>,
}

/// Picks the grid value with the lowest mean held-out NLL (ties go to the
/// smaller strength) and refits on all data with it.
pub fn cv_select_lr(
    x: &Matrix,
    y: &[bool],
    grid: &[f64],
    k: usize,
    seed: u64,
) -> Result<CvOutcome> {
    check_inputs(x, y)?;
    if grid.is_empty() {
        return Err(Error::InvalidConfig("empty regularization grid".into()));
    }
    if k < 2 {
        return Err(Error::InvalidConfig("cross-validation needs at least 2 folds".into()));
    }
    if y.len() < k {
        return Err(Error::TooFewRows { need: k, got: y.len() });
    }
    if grid.len() == 1 {
        let fit = train_lr(x, y, grid[0])?;
        return Ok(CvOutcome { fit, selected: grid[0], validation_loss: vec![] });
    }
    let folds = stratified_folds(y, k, seed);
    let mut splits = Vec::with_capacity(k);
    for f in 0..k {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
        let held: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == f).collect();
        let ytr: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        if check_binary(&ytr).is_err() {
            return Err(Error::Unstratifiable(f));
        }
        let yho: Vec<bool> = held.iter().map(|&i| y[i]).collect();
        splits.push((x.select_rows(&train), ytr, x.select_rows(&held), yho));
    }
    let mut validation_loss = Vec::with_capacity(grid.len());
    for &reg in grid {
        let mut total = 0.0;
        for (xtr, ytr, xho, yho) in &splits {
            let fit = train_lr(xtr, ytr, reg)?;
            total += mean_nll(&fit.model, xho, yho);
        }
        validation_loss.push(total / k as f64);
    }
    let mut best = 0;
    for i in 1..grid.len() {
        let better = validation_loss[i] < validation_loss[best]
            || (validation_loss[i] == validation_loss[best] && grid[i] < grid[best]);
        if better {
            best = i;
        }
    }
    let fit = train_lr(x, y, grid[best])?;
    Ok(CvOutcome { fit, selected: grid[best], validation_loss })
}

/// `count` strengths spaced evenly in log10 between `lo` and `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (libm::log10(lo), libm::log10(hi));
    (0..count)
        .map(|i| libm::pow(10.0, a + (b - a) * i as f64 / (count - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_problem(seed: u64, n: usize, d: usize) -> (Matrix, Vec<bool>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut x = Matrix::zeros(n, d);
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..d {
                x.set(i, j, StandardNormal.sample(&mut rng));
            }
            let p = math::sigmoid(dot(&w, x.row(i)));
            y.push(rng.random::<f64>() < p);
        }
        (x, y)
    }

    fn finite_diff(x: &Matrix, y: &[bool], theta: &[f64], reg: f64) -> Vec<f64> {
        (0..theta.len())
            .map(|k| {
                let h = 1e-5 * (1.0 + theta[k].abs());
                let mut a = theta.to_vec();
                let mut b = theta.to_vec();
                a[k] += h;
                b[k] -= h;
                (lr_objective(x, y, &a, reg) - lr_objective(x, y, &b, reg)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn decision_is_affine() {
        let m = LinearModel { weights: vec![1.0, 2.0], bias: -1.0, reg_strength: 0.0 };
        assert_eq!(lr_decision(&m, &[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(lr_decision(&m, &[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(math::sigmoid(0.0), 0.5);
        assert!(lr_decision(&m, &[1.0]).is_err());
    }

    #[test]
    fn symmetric_two_points_have_zero_bias() {
        let x = Matrix::from_rows(&[[-1.0], [1.0]]).unwrap();
        let fit = train_lr(&x, &[false, true], 1.0).unwrap();
        assert!(fit.converged);
        assert!(fit.model.bias.abs() <= 1e-6);
        assert!(fit.model.weights[0] > 0.0);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (x, y) = random_problem(3, 80, 3);
        let theta = [0.3, -0.7, 1.1, 0.2];
        let g = lr_gradient(&x, &y, &theta, 0.5);
        let fd = finite_diff(&x, &y, &theta, 0.5);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() <= 1e-5 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn converged_fit_has_tiny_gradient() {
        let (x, y) = random_problem(5, 200, 3);
        let fit = train_lr(&x, &y, 0.1).unwrap();
        assert!(fit.converged);
        assert!(fit.grad_inf_norm <= GRAD_TOL);
        let mut theta = fit.model.weights.clone();
        theta.push(fit.model.bias);
        let fd = finite_diff(&x, &y, &theta, 0.1);
        assert!(fd.iter().all(|v| v.abs() < 1e-5));
    }

    #[test]
    fn objective_is_globally_minimal() {
        let (x, y) = random_problem(11, 60, 2);
        let fit = train_lr(&x, &y, 0.3).unwrap();
        let mut theta = fit.model.weights.clone();
        theta.push(fit.model.bias);
        let best = lr_objective(&x, &y, &theta, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let t: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            assert!(best <= lr_objective(&x, &y, &t, 0.3));
        }
    }

    #[test]
    fn heavy_regularization_gives_prior_logit() {
        let (x, y) = random_problem(7, 100, 2);
        let fit = train_lr(&x, &y, 1e6).unwrap();
        assert!(fit.model.weights.iter().all(|w| w.abs() < 1e-3));
        let p = y.iter().filter(|&&v| v).count() as f64 / y.len() as f64;
        assert!((fit.model.bias - math::ln(p / (1.0 - p))).abs() < 1e-3);
    }

    #[test]
    fn single_class_and_nan_are_rejected() {
        let x = Matrix::from_rows(&[[0.0], [1.0]]).unwrap();
        assert_eq!(train_lr(&x, &[true, true], 1.0).unwrap_err(), Error::SingleClass);
        let bad = Matrix::from_rows(&[[f64::NAN], [1.0]]).unwrap();
        assert!(matches!(train_lr(&bad, &[true, false], 1.0), Err(Error::NonFinite(_))));
    }

    #[test]
    fn iteration_cap_is_reported() {
        let (x, y) = random_problem(23, 100, 3);
        let opts = LrOptions { max_iter: 1, ..LrOptions::default() };
        let fit = train_lr_with(&x, &y, 1e-3, opts).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.iterations, 1);
        assert!(fit.grad_inf_norm > GRAD_TOL);
    }

    #[test]
    fn separable_without_regularization_grows_weights() {
        let x = Matrix::from_rows(&[[-2.0], [-1.0], [1.0], [2.0]]).unwrap();
        let fit = train_lr(&x, &[false, false, true, true], 0.0).unwrap();
        assert!(fit.model.weights[0] > 5.0);
        assert!(fit.model.weights[0].is_finite());
    }

    #[test]
    fn cv_with_one_value_is_plain_training() {
        let (x, y) = random_problem(13, 50, 2);
        let cv = cv_select_lr(&x, &y, &[0.5], 10, 1).unwrap();
        let plain = train_lr(&x, &y, 0.5).unwrap();
        assert_eq!(cv.fit, plain);
    }

    #[test]
    fn cv_prefers_weak_regularization_on_separable_data() {
        let rows: Vec<[f64; 1]> = (0..40).map(|i| [if i < 20 { -1.0 - i as f64 * 0.05 } else { 1.0 + i as f64 * 0.05 }]).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let y: Vec<bool> = (0..40).map(|i| i >= 20).collect();
        let cv = cv_select_lr(&x, &y, &[1e-4, 1e4], 10, 3).unwrap();
        assert_eq!(cv.selected, 1e-4);
        assert!(cv.validation_loss[0] < cv.validation_loss[1]);
    }

    #[test]
    fn cv_is_deterministic() {
        let (x, y) = random_problem(17, 120, 2);
        let grid = log_grid(1e-4, 1e4, 9);
        let a = cv_select_lr(&x, &y, &grid, 10, 42).unwrap();
        let b = cv_select_lr(&x, &y, &grid, 10, 42).unwrap();
        assert_eq!(a.selected.to_bits(), b.selected.to_bits());
        assert_eq!(a.fit, b.fit);
    }

    #[test]
    fn cv_detects_unstratifiable_folds() {
        let (x, _) = random_problem(19, 20, 1);
        let mut y = vec![false; 20];
        y[0] = true;
        assert!(matches!(cv_select_lr(&x, &y, &[1.0, 2.0], 10, 0), Err(Error::Unstratifiable(_))));
    }

    #[test]
    fn folds_are_stratified() {
        let y: Vec<bool> = (0..100).map(|i| i % 4 == 0).collect();
        let folds = stratified_folds(&y, 10, 9);
        for f in 0..10 {
            let pos = (0..100).filter(|&i| folds[i] == f && y[i]).count();
            let all = (0..100).filter(|&i| folds[i] == f).count();
            assert!((2..=3).contains(&pos));
            assert_eq!(all, 10);
        }
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-4, 1e4, 9);
        assert_eq!(g.len(), 9);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert!((g[4] - 1.0).abs() < 1e-12);
        assert!((g[8] - 1e4).abs() < 1e-8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn decision_monotone_in_positive_weights(
                w in prop::collection::vec(-3.0f64..3.0, 3),
                b in -2.0f64..2.0,
                x in prop::collection::vec(-5.0f64..5.0, 3),
                k in 0usize..3,
                step in 0.0f64..4.0,
            ) {
                let m = LinearModel { weights: w.clone(), bias: b, reg_strength: 0.0 };
                let mut x2 = x.clone();
                x2[k] += step;
                let (s1, s2) = (lr_decision(&m, &x).unwrap(), lr_decision(&m, &x2).unwrap());
                if w[k] > 0.0 {
                    prop_assert!(s2 >= s1);
                }
            }
        }
    }
}
