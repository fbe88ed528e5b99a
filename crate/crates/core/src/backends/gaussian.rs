//! Gaussian back-end: one GMM per trial class, scored by the log ratio of
//! the target density to a mixture of the two negative densities.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::gmm::{gmm_loglik, train_gmm_em, GmmOptions, GmmParams};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::table::TrialKind;

/// Mixing weights of the negative-class densities in the LLR denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativeMix {
    pub nontarget: f64,
    pub spoof: f64,
}

impl Default for NegativeMix {
    fn default() -> Self {
        Self { nontarget: 0.5, spoof: 0.5 }
    }
}

impl NegativeMix {
    pub fn validate(&self) -> Result<()> {
        let ok = self.nontarget >= 0.0
            && self.spoof >= 0.0
            && (self.nontarget + self.spoof - 1.0).abs() <= 1e-12;
        if !ok {
            return Err(Error::InvalidConfig("negative mixing weights must sum to 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBackend {
    pub gmm_target: GmmParams,
    pub gmm_nontarget: GmmParams,
    pub gmm_spoof: GmmParams,
    pub mix: NegativeMix,
}

impl GaussianBackend {
    pub fn dim(&self) -> usize {
        self.gmm_target.dim()
    }
}

/// Fits the three class GMMs on the rows of each class. Seeds for the
/// three fits are `seed`, `seed + 1` and `seed + 2`.
pub fn train_gaussian_backend(
    x: &Matrix,
    kinds: &[TrialKind],
    n_components: usize,
    seed: u64,
    mix: NegativeMix,
    opts: GmmOptions,
) -> Result<GaussianBackend> {
    if x.rows() != kinds.len() {
        return Err(Error::DimensionMismatch { expected: x.rows(), got: kinds.len() });
    }
    mix.validate()?;
    let fit = |kind: TrialKind, offset: u64, name: &'static str| -> Result<GmmParams> {
        let idx: Vec<usize> = (0..kinds.len()).filter(|&i| kinds[i] == kind).collect();
        if idx.is_empty() {
            return Err(Error::MissingClass(name));
        }
        Ok(train_gmm_em(&x.select_rows(&idx), n_components, seed.wrapping_add(offset), opts)?.params)
    };
    Ok(GaussianBackend {
        gmm_target: fit(TrialKind::Target, 0, "target")?,
        gmm_nontarget: fit(TrialKind::Nontarget, 1, "nontarget")?,
        gmm_spoof: fit(TrialKind::Spoof, 2, "spoof")?,
        mix,
    })
}

/// `ln p(x|target) - ln(w_n p(x|nontarget) + w_s p(x|spoof))`.
pub fn gaussian_backend_llr(backend: &GaussianBackend, x: &[f64]) -> Result<f64> {
    let lt = gmm_loglik(&backend.gmm_target, x)?;
    let ln = gmm_loglik(&backend.gmm_nontarget, x)?;
    let ls = gmm_loglik(&backend.gmm_spoof, x)?;
    Ok(llr_from_logliks(lt, ln, ls, backend.mix))
}

pub fn llr_from_logliks(target: f64, nontarget: f64, spoof: f64, mix: NegativeMix) -> f64 {
    let term = |w: f64, l: f64| if w > 0.0 { math::ln(w) + l } else { f64::NEG_INFINITY };
    target - math::log_add_exp(term(mix.nontarget, nontarget), term(mix.spoof, spoof))
}
