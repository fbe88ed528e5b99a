//! Fusion back-ends: L2 logistic regression, polynomial-kernel SVM and the
//! three-GMM Gaussian back-end. All trainers are single-threaded and
//! deterministic given their inputs and seed.

pub mod gaussian;
pub mod gmm;
pub mod lr;
pub mod svm;

use core::fmt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gaussian::{gaussian_backend_llr, train_gaussian_backend, GaussianBackend, NegativeMix};
pub use gmm::{gmm_loglik, responsibilities, train_gmm_em, GmmFit, GmmOptions, GmmParams};
pub use lr::{cv_select_lr, lr_decision, train_lr, train_lr_with, CvOutcome, LinearModel, LrFit, LrOptions};
pub use svm::{
    svm_decision, train_svm_smo, train_svm_smo_with, KernelModel, PolyKernelParams, SmoOptions, SvmFit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Svm,
    Lr,
    Gaussian,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::Svm => "svm",
            ClassifierKind::Lr => "lr",
            ClassifierKind::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A trained back-end of any kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BackendModel {
    Linear(LinearModel),
    Kernel(KernelModel),
    Gaussian(GaussianBackend),
}

impl BackendModel {
    pub fn classifier(&self) -> ClassifierKind {
        match self {
            BackendModel::Linear(_) => ClassifierKind::Lr,
            BackendModel::Kernel(_) => ClassifierKind::Svm,
            BackendModel::Gaussian(_) => ClassifierKind::Gaussian,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            BackendModel::Linear(m) => m.weights.len(),
            BackendModel::Kernel(m) => m.support_vectors.cols(),
            BackendModel::Gaussian(m) => m.dim(),
        }
    }

    /// Unsquashed score: logit, signed margin or log-likelihood ratio.
    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        match self {
            BackendModel::Linear(m) => lr_decision(m, x),
            BackendModel::Kernel(m) => svm_decision(m, x),
            BackendModel::Gaussian(m) => gaussian_backend_llr(m, x),
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn check_binary(labels: &[bool]) -> Result<()> {
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return Err(Error::SingleClass);
    }
    Ok(())
}
