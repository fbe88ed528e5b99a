//! Score-level fusion for spoofing-aware speaker verification.
//!
//! This crate holds the numerical core: the trial table model, the three
//! fusion back-ends (L2 logistic regression, polynomial-kernel SVM trained
//! by SMO, and a three-GMM Gaussian back-end), single- and multi-stage
//! fusion pipelines, the SASV metric suite and a seeded synthetic score
//! generator.
//!
//! It is `no_std` compatible (it needs `alloc`); disable the default `std`
//! feature to build it for such targets. File formats, reports and the
//! command-line tool live in the `sasv-fuse` crate.
//!
//! Scores follow one polarity everywhere: greater means more target-like.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod backends;
pub mod error;
pub mod fusion;
pub mod linalg;
pub mod math;
pub mod metrics;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use table::{NormStats, Partition, ScoreTable, TrialKind, TrialLabel, TrialRecord};
