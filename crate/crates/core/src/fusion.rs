//! Fusion pipelines: the score-sum baseline, single-stage classifier
//! fusion, and the two multi-stage variants.
//!
//! A multi-stage pipeline trains a stage-1 classifier on the base score
//! columns and feeds its decision value, concatenated with further raw
//! scores, to a stage-2 classifier:
//!
//! ```text
//! self-augmented:        s = C2([C1([base...]), base...])
//! externally-augmented:  s = C2([C1([base...]), aux...])
//! ```
//!
//! Classifier outputs are always unsquashed decision values. Training
//! targets are Target (positive) against Nontarget and Spoof.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::backends::gaussian::{train_gaussian_backend, NegativeMix};
use crate::backends::gmm::GmmOptions;
use crate::backends::lr::{cv_select_lr, log_grid, stratified_folds};
use crate::backends::svm::{train_svm_smo, PolyKernelParams};
use crate::backends::{BackendModel, ClassifierKind};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::table::{apply_znorm, fit_znorm, NormStats, ScoreTable, TrialKind};

/// Name of the column holding fused scores.
pub const FUSED_COLUMN: &str = "s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FusionMode {
    ScoreSum,
    SingleStage,
    SelfAugmented,
    ExternallyAugmented,
}

impl FusionMode {
    pub const ALL: [FusionMode; 4] = [
        FusionMode::ScoreSum,
        FusionMode::SingleStage,
        FusionMode::SelfAugmented,
        FusionMode::ExternallyAugmented,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FusionMode::ScoreSum => "score-sum",
            FusionMode::SingleStage => "single-stage",
            FusionMode::SelfAugmented => "self-augmented",
            FusionMode::ExternallyAugmented => "externally-augmented",
        }
    }

    pub fn is_multi_stage(self) -> bool {
        matches!(self, FusionMode::SelfAugmented | FusionMode::ExternallyAugmented)
    }
}

fn default_true() -> bool {
    true
}

/// Declarative description of one fusion pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathwaySpec {
    pub mode: FusionMode,
    pub base_columns: Vec<String>,
    #[serde(default)]
    pub aux_columns: Vec<String>,
    #[serde(default)]
    pub stage1: Option<ClassifierKind>,
    #[serde(default)]
    pub stage2: Option<ClassifierKind>,
    /// Z-normalize inputs with statistics of the training table. Ignored by
    /// the score-sum baseline, which always sums raw scores.
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub alias: Option<String>,
}

impl PathwaySpec {
    pub fn score_sum(columns: &[&str]) -> Self {
        Self {
            mode: FusionMode::ScoreSum,
            base_columns: columns.iter().map(|c| c.to_string()).collect(),
            aux_columns: vec![],
            stage1: None,
            stage2: None,
            normalize: false,
            alias: None,
        }
    }

    pub fn single(kind: ClassifierKind, columns: &[&str]) -> Self {
        Self {
            mode: FusionMode::SingleStage,
            stage1: Some(kind),
            normalize: true,
            ..Self::score_sum(columns)
        }
    }

    pub fn self_augmented(stage1: ClassifierKind, stage2: ClassifierKind, columns: &[&str]) -> Self {
        Self {
            mode: FusionMode::SelfAugmented,
            stage1: Some(stage1),
            stage2: Some(stage2),
            normalize: true,
            ..Self::score_sum(columns)
        }
    }

    pub fn externally_augmented(
        stage1: ClassifierKind,
        stage2: ClassifierKind,
        base: &[&str],
        aux: &[&str],
    ) -> Self {
        Self {
            mode: FusionMode::ExternallyAugmented,
            aux_columns: aux.iter().map(|c| c.to_string()).collect(),
            ..Self::self_augmented(stage1, stage2, base)
        }
    }

    pub fn with_alias(mut self, alias: &str) -> Self {
        self.alias = Some(alias.to_string());
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(format!("{}: {msg}", self.name())));
        if self.base_columns.is_empty() {
            return bad("no base columns");
        }
        let all: Vec<&String> = self.base_columns.iter().chain(&self.aux_columns).collect();
        for (i, c) in all.iter().enumerate() {
            if all[..i].contains(c) {
                return bad("repeated score column");
            }
        }
        match self.mode {
            FusionMode::ScoreSum => {
                if self.stage1.is_some() || self.stage2.is_some() {
                    return bad("score sum takes no classifiers");
                }
                if !self.aux_columns.is_empty() {
                    return bad("score sum takes no auxiliary columns");
                }
            }
            FusionMode::SingleStage => {
                if self.stage1.is_none() {
                    return bad("missing stage-1 classifier");
                }
                if self.stage2.is_some() {
                    return bad("single-stage fusion has no stage 2");
                }
                if !self.aux_columns.is_empty() {
                    return bad("single-stage fusion takes no auxiliary columns");
                }
            }
            FusionMode::SelfAugmented | FusionMode::ExternallyAugmented => {
                let (Some(s1), Some(s2)) = (self.stage1, self.stage2) else {
                    return bad("multi-stage fusion needs two classifiers");
                };
                if s1 == ClassifierKind::Gaussian || s2 == ClassifierKind::Gaussian {
                    return bad("the Gaussian back-end is single-stage only");
                }
                let externally = self.mode == FusionMode::ExternallyAugmented;
                if externally && self.aux_columns.is_empty() {
                    return bad("externally-augmented fusion needs auxiliary columns");
                }
                if !externally && !self.aux_columns.is_empty() {
                    return bad("self-augmented fusion takes no auxiliary columns");
                }
            }
        }
        Ok(())
    }

    /// Canonical name `mode/stage1-stage2/scoreset`, e.g.
    /// `self-augmented/svm-lr/E+A+R` or `externally-augmented/lr-lr/E+A|R`.
    pub fn name(&self) -> String {
        let mut scores = self.base_columns.join("+");
        if !self.aux_columns.is_empty() {
            scores.push('|');
            scores.push_str(&self.aux_columns.join("+"));
        }
        let classifiers: Vec<&str> =
            self.stage1.iter().chain(self.stage2.iter()).map(|k| k.as_str()).collect();
        if classifiers.is_empty() {
            format!("{}/{}", self.mode.as_str(), scores)
        } else {
            format!("{}/{}/{}", self.mode.as_str(), classifiers.join("-"), scores)
        }
    }

    /// Every column the pathway reads.
    pub fn referenced_columns(&self) -> Vec<String> {
        self.base_columns.iter().chain(&self.aux_columns).cloned().collect()
    }

    pub fn stage2_dim(&self) -> usize {
        match self.mode {
            FusionMode::SelfAugmented => 1 + self.base_columns.len(),
            FusionMode::ExternallyAugmented => 1 + self.aux_columns.len(),
            _ => 0,
        }
    }
}

/// Enumerates pathways the way the reference result table lays them out.
///
/// The first score set is the "base" set: it alone gets the score-sum
/// baseline and the Gaussian back-end, and it is the stage-1 input of the
/// externally-augmented pathways, whose auxiliary columns are whatever each
/// later score set adds on top of it. Multi-stage pairs are emitted in the
/// order (LR, LR), (LR, SVM), (SVM, LR), (SVM, SVM) as (stage 1, stage 2).
fn cols(set: &[String]) -> Vec<&str> {
    set.iter().map(String::as_str).collect()
}

pub fn enumerate_pathways(score_sets: &[Vec<String>], modes: &[FusionMode]) -> Vec<PathwaySpec> {
    use ClassifierKind::{Gaussian, Lr, Svm};
    const PAIRS: [(ClassifierKind, ClassifierKind); 4] = [(Lr, Lr), (Lr, Svm), (Svm, Lr), (Svm, Svm)];
    let Some(first) = score_sets.first() else { return vec![] };
    let want = |m: FusionMode| modes.contains(&m);
    let mut out = Vec::new();

    if want(FusionMode::ScoreSum) {
        out.push(PathwaySpec::score_sum(&cols(first)).with_alias("Baseline B1"));
    }
    if want(FusionMode::SingleStage) {
        for (i, set) in score_sets.iter().enumerate() {
            out.push(PathwaySpec::single(Lr, &cols(set)).with_alias("(a)-LR"));
            out.push(PathwaySpec::single(Svm, &cols(set)).with_alias("(a)-SVM"));
            if i == 0 {
                out.push(PathwaySpec::single(Gaussian, &cols(set)).with_alias("Gaussian back-end"));
            }
        }
    }
    if want(FusionMode::SelfAugmented) {
        for set in score_sets {
            for (s1, s2) in PAIRS {
                let alias = self_augmented_alias(s1, s2);
                out.push(PathwaySpec::self_augmented(s1, s2, &cols(set)).with_alias(alias));
            }
        }
    }
    if want(FusionMode::ExternallyAugmented) {
        for set in &score_sets[1..] {
            let aux: Vec<&str> =
                set.iter().filter(|c| !first.contains(c)).map(String::as_str).collect();
            if aux.is_empty() {
                continue;
            }
            for (s1, s2) in PAIRS {
                let alias = externally_augmented_alias(s1, s2);
                out.push(
                    PathwaySpec::externally_augmented(s1, s2, &cols(first), &aux).with_alias(alias),
                );
            }
        }
    }
    out
}

/// Pathway letters of the self-augmented block diagram.
fn self_augmented_alias(s1: ClassifierKind, s2: ClassifierKind) -> &'static str {
    match (s1, s2) {
        (ClassifierKind::Lr, ClassifierKind::Lr) => "(a)-(c)-(e)-(i)",
        (ClassifierKind::Lr, _) => "(a)-(c)-(e)-(h)",
        (_, ClassifierKind::Lr) => "(a)-(b)-(d)-(g)",
        _ => "(a)-(b)-(d)-(f)",
    }
}

/// Pathway letters of the externally-augmented block diagram.
fn externally_augmented_alias(s1: ClassifierKind, s2: ClassifierKind) -> &'static str {
    match (s1, s2) {
        (ClassifierKind::Lr, ClassifierKind::Lr) => "(a)-(d)-(f)-(j)",
        (ClassifierKind::Lr, _) => "(a)-(d)-(f)-(i)",
        (_, ClassifierKind::Lr) => "(a)-(b)-(e)-(h)",
        _ => "(a)-(b)-(e)-(g)",
    }
}

/// The default grid: two-score set `[E, A]`, three-score set `[E, A, R]`,
/// all modes.
pub fn default_pathways() -> Vec<PathwaySpec> {
    let two = vec!["E".to_string(), "A".to_string()];
    let three = vec!["E".to_string(), "A".to_string(), "R".to_string()];
    enumerate_pathways(&[two, three], &FusionMode::ALL)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmConfig {
    pub degree: u32,
    /// `None` selects `1 / (d * var(features))`.
    pub gamma: Option<f64>,
    pub coef0: f64,
    pub c: f64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { degree: 3, gamma: None, coef0: 1.0, c: 1.0 }
    }
}

/// How stage-1 scores for stage-2 training are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Stacking {
    /// Stage-1 decisions on its own training rows.
    #[default]
    InSample,
    /// Each row scored by a stage-1 model trained without its fold.
    OutOfFold { folds: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionConfig {
    pub svm: SvmConfig,
    pub lr_grid: Vec<f64>,
    pub cv_folds: usize,
    pub gmm_components: usize,
    pub gmm: GmmOptions,
    pub negative_mix: NegativeMix,
    pub stacking: Stacking,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            svm: SvmConfig::default(),
            lr_grid: log_grid(1e-4, 1e4, 9),
            cv_folds: 10,
            gmm_components: 3,
            gmm: GmmOptions::default(),
            negative_mix: NegativeMix::default(),
            stacking: Stacking::InSample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedPipeline {
    pub spec: PathwaySpec,
    pub norm_stats: Option<NormStats>,
    pub stage1_model: Option<BackendModel>,
    pub stage2_model: Option<BackendModel>,
}

/// Per-trial sum of the raw values of `columns`.
pub fn sum_columns<S: AsRef<str>>(table: &ScoreTable, columns: &[S]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; table.len()];
    for c in columns {
        for (o, v) in out.iter_mut().zip(table.column(c.as_ref())?) {
            *o += v;
        }
    }
    Ok(out)
}

/// Appends the raw score sum of `columns` as the fused column.
pub fn score_sum<S: AsRef<str>>(table: &ScoreTable, columns: &[S]) -> Result<ScoreTable> {
    table.with_column(FUSED_COLUMN, sum_columns(table, columns)?)
}

fn maybe_normalized(table: &ScoreTable, norm: Option<&NormStats>) -> Result<ScoreTable> {
    match norm {
        Some(stats) => apply_znorm(table, stats),
        None => Ok(table.clone()),
    }
}

/// Base columns in spec order, normalized with `norm` when given.
pub fn build_stage1_features(
    table: &ScoreTable,
    spec: &PathwaySpec,
    norm: Option<&NormStats>,
) -> Result<Matrix> {
    maybe_normalized(table, norm)?.features(&spec.base_columns)
}

/// `[stage1, base...]` (self-augmented) or `[stage1, aux...]` (externally
/// augmented), normalized with `norm` when given.
pub fn build_stage2_features(
    table: &ScoreTable,
    spec: &PathwaySpec,
    stage1_scores: &[f64],
    norm: Option<&NormStats>,
) -> Result<Matrix> {
    if stage1_scores.len() != table.len() {
        return Err(Error::DimensionMismatch { expected: table.len(), got: stage1_scores.len() });
    }
    let raw = match spec.mode {
        FusionMode::SelfAugmented => &spec.base_columns,
        FusionMode::ExternallyAugmented => &spec.aux_columns,
        _ => {
            return Err(Error::InvalidConfig(format!("{} has no second stage", spec.name())));
        }
    };
    let rest = maybe_normalized(table, norm)?.features(raw)?;
    let mut out = Matrix::zeros(table.len(), 1 + raw.len());
    for (i, s) in stage1_scores.iter().enumerate() {
        let row = out.row_mut(i);
        row[0] = *s;
        row[1..].copy_from_slice(rest.row(i));
    }
    Ok(out)
}

fn train_classifier(
    kind: ClassifierKind,
    x: &Matrix,
    y: &[bool],
    kinds: &[TrialKind],
    config: &FusionConfig,
    seed: u64,
) -> Result<BackendModel> {
    match kind {
        ClassifierKind::Lr => {
            let cv = cv_select_lr(x, y, &config.lr_grid, config.cv_folds, seed)?;
            Ok(BackendModel::Linear(cv.fit.model))
        }
        ClassifierKind::Svm => {
            let gamma = match config.svm.gamma {
                Some(g) => g,
                None => PolyKernelParams::scaled_gamma(x)?,
            };
            let params = PolyKernelParams {
                degree: config.svm.degree,
                gamma,
                coef0: config.svm.coef0,
                c: config.svm.c,
            };
            Ok(BackendModel::Kernel(train_svm_smo(x, y, params)?.model))
        }
        ClassifierKind::Gaussian => Ok(BackendModel::Gaussian(train_gaussian_backend(
            x,
            kinds,
            config.gmm_components,
            seed,
            config.negative_mix,
            config.gmm,
        )?)),
    }
}

fn decisions(model: &BackendModel, x: &Matrix) -> Result<Vec<f64>> {
    x.iter_rows().map(|r| model.decision(r)).collect()
}

const STAGE2_SEED: u64 = 0x5bd1_e995;
const FOLD_SEED: u64 = 0x2545_f491;

/// Trains every model the pathway needs. Deterministic given `seed`.
pub fn train_pipeline(
    train: &ScoreTable,
    spec: &PathwaySpec,
    config: &FusionConfig,
    seed: u64,
) -> Result<TrainedPipeline> {
    spec.validate()?;
    let y: Vec<bool> = train.labels().map(|l| l.is_target()).collect();
    if !y.iter().any(|&v| v) || y.iter().all(|&v| v) {
        return Err(Error::SingleClass);
    }
    for c in spec.referenced_columns() {
        train.column_index(&c)?;
    }
    if spec.mode == FusionMode::ScoreSum {
        return Ok(TrainedPipeline {
            spec: spec.clone(),
            norm_stats: None,
            stage1_model: None,
            stage2_model: None,
        });
    }
    let kinds: Vec<TrialKind> = train.labels().map(|l| l.kind()).collect();
    let norm_stats = if spec.normalize {
        Some(fit_znorm(train, &spec.referenced_columns())?)
    } else {
        None
    };
    let x1 = build_stage1_features(train, spec, norm_stats.as_ref())?;
    let kind1 = spec.stage1.ok_or_else(|| Error::InvalidConfig("missing stage 1".into()))?;
    let stage1 = train_classifier(kind1, &x1, &y, &kinds, config, seed)?;

    let stage2 = match spec.stage2 {
        None => None,
        Some(kind2) => {
            let s1 = match config.stacking {
                Stacking::InSample => decisions(&stage1, &x1)?,
                Stacking::OutOfFold { folds } => {
                    out_of_fold(kind1, &x1, &y, &kinds, config, seed, folds)?
                }
            };
            let x2 = build_stage2_features(train, spec, &s1, norm_stats.as_ref())?;
            Some(train_classifier(kind2, &x2, &y, &kinds, config, seed ^ STAGE2_SEED)?)
        }
    };
    Ok(TrainedPipeline {
        spec: spec.clone(),
        norm_stats,
        stage1_model: Some(stage1),
        stage2_model: stage2,
    })
}

fn out_of_fold(
    kind: ClassifierKind,
    x: &Matrix,
    y: &[bool],
    kinds: &[TrialKind],
    config: &FusionConfig,
    seed: u64,
    k: usize,
) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::InvalidConfig("out-of-fold stacking needs at least 2 folds".into()));
    }
    if y.len() < k {
        return Err(Error::TooFewRows { need: k, got: y.len() });
    }
    let folds = stratified_folds(y, k, seed ^ FOLD_SEED);
    let mut out = vec![0.0; y.len()];
    for f in 0..k {
        let train: Vec<usize> = (0..y.len()).filter(|&i| folds[i] != f).collect();
        let held: Vec<usize> = (0..y.len()).filter(|&i| folds[i] == f).collect();
        let ytr: Vec<bool> = train.iter().map(|&i| y[i]).collect();
        let ktr: Vec<TrialKind> = train.iter().map(|&i| kinds[i]).collect();
        let model = train_classifier(kind, &x.select_rows(&train), &ytr, &ktr, config, seed)?;
        for &i in &held {
            out[i] = model.decision(x.row(i))?;
        }
    }
    Ok(out)
}

fn check_model(model: Option<&BackendModel>, kind: Option<ClassifierKind>, dim: usize, stage: &str) -> Result<()> {
    match (model, kind) {
        (None, None) => Ok(()),
        (Some(m), Some(k)) if m.classifier() == k && m.dim() == dim => Ok(()),
        _ => Err(Error::ModelMismatch(format!("stage {stage}"))),
    }
}

/// Fused score per trial of `table`.
pub fn pipeline_scores(pipeline: &TrainedPipeline, table: &ScoreTable) -> Result<Vec<f64>> {
    let spec = &pipeline.spec;
    spec.validate()?;
    if spec.mode == FusionMode::ScoreSum {
        return sum_columns(table, &spec.base_columns);
    }
    check_model(pipeline.stage1_model.as_ref(), spec.stage1, spec.base_columns.len(), "1")?;
    check_model(pipeline.stage2_model.as_ref(), spec.stage2, spec.stage2_dim(), "2")?;
    if spec.normalize != pipeline.norm_stats.is_some() {
        return Err(Error::ModelMismatch("normalization statistics".into()));
    }
    let norm = pipeline.norm_stats.as_ref();
    let stage1 = pipeline
        .stage1_model
        .as_ref()
        .ok_or_else(|| Error::ModelMismatch("stage 1".into()))?;
    let s1 = decisions(stage1, &build_stage1_features(table, spec, norm)?)?;
    match &pipeline.stage2_model {
        None => Ok(s1),
        Some(stage2) => decisions(stage2, &build_stage2_features(table, spec, &s1, norm)?),
    }
}

/// Returns `table` with the fused score appended as column `s`.
pub fn apply_pipeline(pipeline: &TrainedPipeline, table: &ScoreTable) -> Result<ScoreTable> {
    table.with_column(FUSED_COLUMN, pipeline_scores(pipeline, table)?)
}
