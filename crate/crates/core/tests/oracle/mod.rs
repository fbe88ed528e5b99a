//! Brute-force reference implementations used only by tests. They share
//! the interpolation and enumeration rules with the library but none of its
//! code paths: every operating point is recounted from scratch.
#![allow(dead_code)]

use sasv_core::metrics::ADCFConfig;
use sasv_core::{TrialKind, TrialLabel};

fn distinct(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

/// O(n^2) EER: recount FAR and FRR at every distinct score, then the
/// threshold above all scores.
pub fn eer(pos: &[f64], neg: &[f64]) -> f64 {
    let np = pos.len() as f64;
    let nn = neg.len() as f64;
    let mut points: Vec<(f64, f64)> = distinct(pos.iter().chain(neg).copied())
        .into_iter()
        .map(|t| {
            let far = neg.iter().filter(|&&s| s >= t).count() as f64 / nn;
            let frr = pos.iter().filter(|&&s| s < t).count() as f64 / np;
            (far, frr)
        })
        .collect();
    points.push((0.0, 1.0));
    let mut prev = points[0];
    for &p in &points {
        let d = p.0 - p.1;
        if d <= 0.0 {
            if d == 0.0 {
                return p.1;
            }
            let da = prev.0 - prev.1;
            let t = da / (da - d);
            return prev.1 + t * (p.1 - prev.1);
        }
        prev = p;
    }
    unreachable!("the reject-all point always has FAR < FRR")
}

/// Exhaustive a-DCF: returns (min normalized cost, threshold).
pub fn a_dcf(scores: &[f64], labels: &[TrialLabel], cfg: &ADCFConfig) -> (f64, f64) {
    let class = |k: TrialKind| -> Vec<f64> {
        scores.iter().zip(labels).filter(|(_, l)| l.kind() == k).map(|(s, _)| *s).collect()
    };
    let (tar, non, spf) = (class(TrialKind::Target), class(TrialKind::Nontarget), class(TrialKind::Spoof));
    let miss_w = cfg.cost_miss * cfg.prior_target;
    let fa_w = cfg.cost_fa_nontarget * cfg.prior_nontarget + cfg.cost_fa_spoof * cfg.prior_spoof;
    let norm = miss_w.min(fa_w);
    let mut candidates = vec![f64::NEG_INFINITY];
    candidates.extend(distinct(scores.iter().copied()));
    candidates.push(f64::INFINITY);
    let mut best = (f64::INFINITY, f64::NAN);
    for t in candidates {
        let p_miss = tar.iter().filter(|&&s| s < t).count() as f64 / tar.len() as f64;
        let p_non = non.iter().filter(|&&s| s >= t).count() as f64 / non.len() as f64;
        let p_spf = spf.iter().filter(|&&s| s >= t).count() as f64 / spf.len() as f64;
        let cost = (cfg.cost_miss * cfg.prior_target * p_miss
            + cfg.cost_fa_nontarget * cfg.prior_nontarget * p_non
            + cfg.cost_fa_spoof * cfg.prior_spoof * p_spf)
            / norm;
        if cost < best.0 {
            best = (cost, t);
        }
    }
    best
}

/// Central finite-difference gradient.
pub fn finite_difference(f: impl Fn(&[f64]) -> f64, at: &[f64], h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|k| {
            let step = h * (1.0 + at[k].abs());
            let mut a = at.to_vec();
            let mut b = at.to_vec();
            a[k] += step;
            b[k] -= step;
            (f(&a) - f(&b)) / (2.0 * step)
        })
        .collect()
}

/// Spearman-style check: `a` and `b` induce the same strict ordering.
pub fn same_ranking(a: &[f64], b: &[f64]) -> bool {
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| a[i].partial_cmp(&a[j]).unwrap());
    idx.windows(2).all(|w| {
        let (i, j) = (w[0], w[1]);
        (a[i] < a[j]) == (b[i] < b[j]) && (a[i] == a[j]) == (b[i] == b[j])
    })
}
