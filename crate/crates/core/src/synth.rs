//! Seeded synthetic SASV score tables with per-class Gaussian scores.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{Partition, ScoreTable, TrialLabel, TrialRecord};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreDist {
    pub mean: f64,
    pub sd: f64,
}

impl ScoreDist {
    pub const fn new(mean: f64, sd: f64) -> Self {
        Self { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub count: usize,
    /// One distribution per score column.
    pub scores: Vec<ScoreDist>,
    /// Attack tag proportions; spoof class only.
    #[serde(default)]
    pub attack_mix: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub columns: Vec<String>,
    pub target: ClassSpec,
    pub nontarget: ClassSpec,
    pub spoof: ClassSpec,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.columns.is_empty() {
            return bad("no score columns".into());
        }
        for (name, spec) in [("target", &self.target), ("nontarget", &self.nontarget), ("spoof", &self.spoof)] {
            if spec.scores.len() != self.columns.len() {
                return bad(format!("{name}: {} distributions for {} columns", spec.scores.len(), self.columns.len()));
            }
            if spec.scores.iter().any(|d| !(d.mean.is_finite() && d.sd.is_finite() && d.sd > 0.0)) {
                return bad(format!("{name}: standard deviations must be positive"));
            }
        }
        if !self.target.attack_mix.is_empty() || !self.nontarget.attack_mix.is_empty() {
            return bad("only the spoof class takes an attack mix".into());
        }
        if self.spoof.count > 0 {
            let mix = &self.spoof.attack_mix;
            if mix.is_empty() {
                return bad("spoof class needs an attack mix".into());
            }
            if mix.values().any(|p| !(p.is_finite() && *p >= 0.0)) {
                return bad("attack proportions must be non-negative".into());
            }
            if (mix.values().sum::<f64>() - 1.0).abs() > 1e-9 {
                return bad("attack proportions must sum to 1".into());
            }
            for a in mix.keys() {
                TrialLabel::spoof(a.clone())?;
            }
        }
        Ok(())
    }
}

/// Splits `total` into integer counts proportional to `weights` by the
/// largest-remainder rule; ties in the remainder go to the earlier entry.
pub fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 {
        return vec![0; weights.len()];
    }
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| *q as usize).collect();
    let mut left = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (quotas[a] - counts[a] as f64, quotas[b] - counts[b] as f64);
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        counts[i] += 1;
        left -= 1;
    }
    counts
}

/// Mixes a stream index into a seed (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Rows come in blocks: targets, nontargets, then spoofs grouped by attack
/// tag in sorted order.
pub fn generate_trials(config: &SynthConfig) -> Result<ScoreTable> {
    config.validate()?;
    let mut table = ScoreTable::new(config.columns.clone(), Partition::Other)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut labels: Vec<(&str, &ClassSpec, TrialLabel)> = Vec::new();
    for _ in 0..config.target.count {
        labels.push(("tar", &config.target, TrialLabel::Target));
    }
    for _ in 0..config.nontarget.count {
        labels.push(("non", &config.nontarget, TrialLabel::Nontarget));
    }
    let weights: Vec<f64> = config.spoof.attack_mix.values().copied().collect();
    let counts = largest_remainder(config.spoof.count, &weights);
    for (attack, n) in config.spoof.attack_mix.keys().zip(counts) {
        for _ in 0..n {
            labels.push(("spf", &config.spoof, TrialLabel::Spoof(attack.clone())));
        }
    }

    for (i, (prefix, spec, label)) in labels.into_iter().enumerate() {
        let scores = spec
            .scores
            .iter()
            .map(|d| {
                Normal::new(d.mean, d.sd)
                    .map(|n| n.sample(&mut rng))
                    .map_err(|_| Error::InvalidConfig("bad score distribution".into()))
            })
            .collect::<Result<Vec<f64>>>()?;
        let enroll = format!("spk{:03}", i % 100);
        table.push(TrialRecord::new(enroll, format!("{prefix}_{i:06}"), label, scores))?;
    }
    Ok(table)
}

pub const DEFAULT_CLASS_SIZE: usize = 1000;

/// Three columns with complementary weaknesses: `E` separates targets from
/// nontargets but scores spoofs like targets, `A` separates bonafide from
/// spoof but cannot tell speakers apart, and `R` follows `A` with 1.5x the
/// spread. 1000 trials per class; two attack tags at 50/50.
pub fn default_sasv_scenario(seed: u64) -> SynthConfig {
    let d = ScoreDist::new;
    let mut attack_mix = BTreeMap::new();
    attack_mix.insert("A07".to_string(), 0.5);
    attack_mix.insert("A08".to_string(), 0.5);
    SynthConfig {
        columns: vec!["E".into(), "A".into(), "R".into()],
        target: ClassSpec {
            count: DEFAULT_CLASS_SIZE,
            scores: vec![d(2.0, 1.0), d(2.0, 1.0), d(2.0, 1.5)],
            attack_mix: BTreeMap::new(),
        },
        nontarget: ClassSpec {
            count: DEFAULT_CLASS_SIZE,
            scores: vec![d(-2.0, 1.0), d(2.0, 1.0), d(2.0, 1.5)],
            attack_mix: BTreeMap::new(),
        },
        spoof: ClassSpec {
            count: DEFAULT_CLASS_SIZE,
            scores: vec![d(2.0, 1.0), d(-2.0, 1.0), d(-2.0, 1.5)],
            attack_mix,
        },
        seed,
    }
}
