//! SASV evaluation: EER against three negative sets, the three-class
//! a-DCF, per-attack EERs and shared-edge score histograms.
//!
//! A trial is accepted at threshold `t` when its score is `>= t`. EERs are
//! read off the sampled ROC by linear interpolation between the two
//! adjacent operating points where `FAR - FRR` changes sign, so any strictly
//! increasing transform of the scores leaves them unchanged.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{ScoreTable, TrialKind, TrialLabel};

/// Scores paired with ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    scores: Vec<f64>,
    labels: Vec<TrialLabel>,
}

impl LabeledScores {
    pub fn new(scores: Vec<f64>, labels: Vec<TrialLabel>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::Empty("labeled scores"));
        }
        if scores.len() != labels.len() {
            return Err(Error::DimensionMismatch { expected: scores.len(), got: labels.len() });
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("scores"));
        }
        Ok(Self { scores, labels })
    }

    pub fn from_table(table: &ScoreTable, column: &str) -> Result<Self> {
        Self::new(table.column(column)?, table.labels().cloned().collect())
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[TrialLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Scores of trials whose label satisfies `pred`.
    pub fn select(&self, pred: impl Fn(&TrialLabel) -> bool) -> Vec<f64> {
        self.scores
            .iter()
            .zip(&self.labels)
            .filter(|(_, l)| pred(l))
            .map(|(s, _)| *s)
            .collect()
    }

    pub fn of_kind(&self, kind: TrialKind) -> Vec<f64> {
        self.select(|l| l.kind() == kind)
    }

    pub fn count(&self, kind: TrialKind) -> usize {
        self.labels.iter().filter(|l| l.kind() == kind).count()
    }
}

/// Interpolated crossing between operating point `a` (`FAR > FRR`) and
/// point `b` (`FAR < FRR`), each given as `(far, frr)`.
fn crossing(a: (f64, f64), b: (f64, f64)) -> f64 {
    let da = a.0 - a.1;
    let db = b.0 - b.1;
    let t = da / (da - db);
    a.1 + t * (b.1 - a.1)
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    v
}

/// Equal error rate as a fraction in `[0, 1]`.
pub fn compute_eer(positives: &[f64], negatives: &[f64]) -> Result<f64> {
    if positives.is_empty() {
        return Err(Error::Empty("positive scores"));
    }
    if negatives.is_empty() {
        return Err(Error::Empty("negative scores"));
    }
    if positives.iter().chain(negatives).any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("scores"));
    }
    let pos = sorted(positives);
    let neg = sorted(negatives);
    let (np, nn) = (pos.len() as f64, neg.len() as f64);

    // Walk the distinct thresholds upwards. `ip` positives and `ineg`
    // negatives lie strictly below the current threshold.
    let (mut ip, mut ineg) = (0usize, 0usize);
    let mut prev = (1.0, 0.0);
    loop {
        let next = match (pos.get(ip), neg.get(ineg)) {
            (Some(&p), Some(&n)) => p.min(n),
            (Some(&p), None) => p,
            (None, Some(&n)) => n,
            (None, None) => break,
        };
        let point = ((neg.len() - ineg) as f64 / nn, ip as f64 / np);
        if point.0 - point.1 <= 0.0 {
            return Ok(finish(prev, point));
        }
        prev = point;
        while ip < pos.len() && pos[ip] <= next {
            ip += 1;
        }
        while ineg < neg.len() && neg[ineg] <= next {
            ineg += 1;
        }
    }
    // Threshold above every score: everything rejected.
    Ok(finish(prev, (0.0, 1.0)))
}

fn finish(prev: (f64, f64), point: (f64, f64)) -> f64 {
    if point.0 - point.1 == 0.0 {
        point.1
    } else {
        crossing(prev, point)
    }
}

/// EERs for the three SASV negative sets, as fractions. A metric whose
/// negative class is absent is `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SasvEers {
    pub sv: Option<f64>,
    pub spf: Option<f64>,
    pub sasv: Option<f64>,
}

pub fn compute_sasv_eers(scores: &LabeledScores) -> Result<SasvEers> {
    let tar = scores.of_kind(TrialKind::Target);
    if tar.is_empty() {
        return Err(Error::NoTargets);
    }
    let non = scores.of_kind(TrialKind::Nontarget);
    let spf = scores.of_kind(TrialKind::Spoof);
    let both = scores.select(|l| !l.is_target());
    let eer = |neg: &[f64]| -> Result<Option<f64>> {
        if neg.is_empty() {
            Ok(None)
        } else {
            compute_eer(&tar, neg).map(Some)
        }
    };
    Ok(SasvEers { sv: eer(&non)?, spf: eer(&spf)?, sasv: eer(&both)? })
}

/// Priors and costs of the three-class detection cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ADCFConfig {
    pub prior_target: f64,
    pub prior_nontarget: f64,
    pub prior_spoof: f64,
    pub cost_miss: f64,
    pub cost_fa_nontarget: f64,
    pub cost_fa_spoof: f64,
}

impl Default for ADCFConfig {
    fn default() -> Self {
        Self {
            prior_target: 0.9,
            prior_nontarget: 0.05,
            prior_spoof: 0.05,
            cost_miss: 1.0,
            cost_fa_nontarget: 10.0,
            cost_fa_spoof: 20.0,
        }
    }
}

impl ADCFConfig {
    pub fn validate(&self) -> Result<()> {
        let priors = [self.prior_target, self.prior_nontarget, self.prior_spoof];
        if priors.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidConfig("a-DCF priors must be non-negative".into()));
        }
        if (priors.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig("a-DCF priors must sum to 1".into()));
        }
        let costs = [self.cost_miss, self.cost_fa_nontarget, self.cost_fa_spoof];
        if costs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidConfig("a-DCF costs must be positive".into()));
        }
        Ok(())
    }

    /// Cost of the better of the two trivial systems (accept all, reject all).
    pub fn normalizer(&self) -> f64 {
        let miss = self.cost_miss * self.prior_target;
        let fa = self.cost_fa_nontarget * self.prior_nontarget + self.cost_fa_spoof * self.prior_spoof;
        miss.min(fa)
    }

    /// Normalized cost from the three error rates.
    pub fn cost(&self, p_miss: f64, p_fa_nontarget: f64, p_fa_spoof: f64) -> f64 {
        (self.cost_miss * self.prior_target * p_miss
            + self.cost_fa_nontarget * self.prior_nontarget * p_fa_nontarget
            + self.cost_fa_spoof * self.prior_spoof * p_fa_spoof)
            / self.normalizer()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ADCFResult {
    pub min_cost: f64,
    /// May be `-inf` (accept all) or `+inf` (reject all).
    pub threshold: f64,
}

struct ThreeClass {
    tar: Vec<f64>,
    non: Vec<f64>,
    spf: Vec<f64>,
}

fn three_class(scores: &LabeledScores) -> Result<ThreeClass> {
    let tar = sorted(&scores.of_kind(TrialKind::Target));
    let non = sorted(&scores.of_kind(TrialKind::Nontarget));
    let spf = sorted(&scores.of_kind(TrialKind::Spoof));
    if tar.is_empty() {
        return Err(Error::NoTargets);
    }
    if non.is_empty() {
        return Err(Error::MissingClass("nontarget"));
    }
    if spf.is_empty() {
        return Err(Error::MissingClass("spoof"));
    }
    Ok(ThreeClass { tar, non, spf })
}

/// Normalized a-DCF at one fixed threshold.
pub fn a_dcf_at(scores: &LabeledScores, config: &ADCFConfig, threshold: f64) -> Result<f64> {
    config.validate()?;
    let c = three_class(scores)?;
    let below = |v: &[f64]| v.iter().filter(|&&s| s < threshold).count() as f64;
    let miss = below(&c.tar) / c.tar.len() as f64;
    let fa_non = 1.0 - below(&c.non) / c.non.len() as f64;
    let fa_spf = 1.0 - below(&c.spf) / c.spf.len() as f64;
    Ok(config.cost(miss, fa_non, fa_spf))
}

/// Minimum normalized a-DCF over all thresholds (the distinct scores and
/// both infinities). Ties resolve to the lowest threshold.
pub fn compute_a_dcf(scores: &LabeledScores, config: &ADCFConfig) -> Result<ADCFResult> {
    config.validate()?;
    let c = three_class(scores)?;
    let (nt, nn, ns) = (c.tar.len(), c.non.len(), c.spf.len());
    let rates = |it: usize, inn: usize, is: usize| {
        config.cost(
            it as f64 / nt as f64,
            (nn - inn) as f64 / nn as f64,
            (ns - is) as f64 / ns as f64,
        )
    };

    let mut best = ADCFResult { min_cost: rates(0, 0, 0), threshold: f64::NEG_INFINITY };
    let (mut it, mut inn, mut is) = (0usize, 0usize, 0usize);
    loop {
        let next = [c.tar.get(it), c.non.get(inn), c.spf.get(is)]
            .into_iter()
            .flatten()
            .copied()
            .reduce(f64::min);
        let Some(next) = next else { break };
        let cost = rates(it, inn, is);
        if cost < best.min_cost {
            best = ADCFResult { min_cost: cost, threshold: next };
        }
        while it < nt && c.tar[it] <= next {
            it += 1;
        }
        while inn < nn && c.non[inn] <= next {
            inn += 1;
        }
        while is < ns && c.spf[is] <= next {
            is += 1;
        }
    }
    let cost = rates(nt, nn, ns);
    if cost < best.min_cost {
        best = ADCFResult { min_cost: cost, threshold: f64::INFINITY };
    }
    Ok(best)
}

/// Target-vs-single-attack EERs (fractions), plus the pooled value over
/// all spoofed trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerAttack {
    pub attacks: BTreeMap<String, f64>,
    pub pooled: Option<f64>,
}

pub fn per_attack_eers(scores: &LabeledScores) -> Result<PerAttack> {
    let tar = scores.of_kind(TrialKind::Target);
    if tar.is_empty() {
        return Err(Error::NoTargets);
    }
    let mut by_attack: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (s, l) in scores.scores.iter().zip(&scores.labels) {
        if let Some(a) = l.attack_id() {
            by_attack.entry(a).or_default().push(*s);
        }
    }
    let mut attacks = BTreeMap::new();
    for (a, neg) in &by_attack {
        attacks.insert(a.to_string(), compute_eer(&tar, neg)?);
    }
    let spf = scores.of_kind(TrialKind::Spoof);
    let pooled = if spf.is_empty() { None } else { Some(compute_eer(&tar, &spf)?) };
    Ok(PerAttack { attacks, pooled })
}

/// Per-class counts over bins shared by all classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramExport {
    /// `bins + 1` ascending edges spanning `[min score, max score]`.
    pub edges: Vec<f64>,
    pub target: Vec<usize>,
    pub nontarget: Vec<usize>,
    pub spoof: Vec<usize>,
}

impl HistogramExport {
    pub fn counts(&self, kind: TrialKind) -> &[usize] {
        match kind {
            TrialKind::Target => &self.target,
            TrialKind::Nontarget => &self.nontarget,
            TrialKind::Spoof => &self.spoof,
        }
    }

    pub fn bins(&self) -> usize {
        self.target.len()
    }
}

/// Bins are right-open except the last, which is closed.
pub fn histogram_export(scores: &LabeledScores, bins: usize) -> Result<HistogramExport> {
    if bins == 0 {
        return Err(Error::InvalidConfig("histogram needs at least one bin".into()));
    }
    let lo = scores.scores.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = scores.scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| lo + width * k as f64).collect();
    edges.push(hi);
    let mut out = HistogramExport {
        edges,
        target: vec![0; bins],
        nontarget: vec![0; bins],
        spoof: vec![0; bins],
    };
    for (&s, l) in scores.scores.iter().zip(&scores.labels) {
        let mut k = if width > 0.0 { ((s - lo) / width) as usize } else { 0 };
        k = k.min(bins - 1);
        // guard against rounding in (s - lo) / width near an edge
        while k > 0 && s < out.edges[k] {
            k -= 1;
        }
        while k + 1 < bins && s >= out.edges[k + 1] {
            k += 1;
        }
        match l.kind() {
            TrialKind::Target => out.target[k] += 1,
            TrialKind::Nontarget => out.nontarget[k] += 1,
            TrialKind::Spoof => out.spoof[k] += 1,
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassCounts {
    pub target: usize,
    pub nontarget: usize,
    pub spoof: usize,
}

/// Metrics for one scored trial set. EERs are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sasv_eer: Option<f64>,
    pub sv_eer: Option<f64>,
    pub spf_eer: Option<f64>,
    pub a_dcf: Option<f64>,
    pub a_dcf_threshold: Option<f64>,
    pub per_attack: BTreeMap<String, f64>,
    pub pooled_attack_eer: Option<f64>,
    pub counts: ClassCounts,
}

/// Runs the full suite. a-DCF is `None` unless all three classes are
/// present; an infinite a-DCF threshold is reported as `None`.
pub fn evaluate(scores: &LabeledScores, config: &ADCFConfig) -> Result<EvalReport> {
    config.validate()?;
    let counts = ClassCounts {
        target: scores.count(TrialKind::Target),
        nontarget: scores.count(TrialKind::Nontarget),
        spoof: scores.count(TrialKind::Spoof),
    };
    let eers = compute_sasv_eers(scores)?;
    let per = per_attack_eers(scores)?;
    let (a_dcf, a_dcf_threshold) = if counts.nontarget > 0 && counts.spoof > 0 {
        let r = compute_a_dcf(scores, config)?;
        (Some(r.min_cost), Some(r.threshold).filter(|t| t.is_finite()))
    } else {
        (None, None)
    };
    let pct = |v: Option<f64>| v.map(|x| 100.0 * x);
    Ok(EvalReport {
        sasv_eer: pct(eers.sasv),
        sv_eer: pct(eers.sv),
        spf_eer: pct(eers.spf),
        a_dcf,
        a_dcf_threshold,
        per_attack: per.attacks.into_iter().map(|(k, v)| (k, 100.0 * v)).collect(),
        pooled_attack_eer: pct(per.pooled),
        counts,
    })
}
