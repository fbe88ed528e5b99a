//! Trials, labels and the columnar score table every other module consumes.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialKind {
    Target,
    Nontarget,
    Spoof,
}

impl TrialKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TrialKind::Target => "target",
            TrialKind::Nontarget => "nontarget",
            TrialKind::Spoof => "spoof",
        }
    }

    /// Case-insensitive parse of `target`, `nontarget` or `spoof`.
    pub fn parse(token: &str) -> Option<Self> {
        if token.eq_ignore_ascii_case("target") {
            Some(TrialKind::Target)
        } else if token.eq_ignore_ascii_case("nontarget") {
            Some(TrialKind::Nontarget)
        } else if token.eq_ignore_ascii_case("spoof") {
            Some(TrialKind::Spoof)
        } else {
            None
        }
    }
}

impl fmt::Display for TrialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Ground truth of a trial. Only spoofed trials carry an attack tag.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TrialLabel {
    Target,
    Nontarget,
    Spoof(String),
}

impl TrialLabel {
    pub fn spoof(attack_id: impl Into<String>) -> Result<Self> {
        let label = TrialLabel::Spoof(attack_id.into());
        label.validate()?;
        Ok(label)
    }

    pub fn kind(&self) -> TrialKind {
        match self {
            TrialLabel::Target => TrialKind::Target,
            TrialLabel::Nontarget => TrialKind::Nontarget,
            TrialLabel::Spoof(_) => TrialKind::Spoof,
        }
    }

    pub fn attack_id(&self) -> Option<&str> {
        match self {
            TrialLabel::Spoof(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_target(&self) -> bool {
        matches!(self, TrialLabel::Target)
    }

    pub fn validate(&self) -> Result<()> {
        if let TrialLabel::Spoof(a) = self {
            if a.is_empty() || a.chars().any(char::is_whitespace) {
                return Err(Error::InvalidLabel(alloc::format!("attack id `{a}`")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub enroll_id: String,
    pub test_id: String,
    pub label: TrialLabel,
    /// Aligned with the owning table's `columns`.
    pub scores: Vec<f64>,
}

impl TrialRecord {
    pub fn new(
        enroll_id: impl Into<String>,
        test_id: impl Into<String>,
        label: TrialLabel,
        scores: Vec<f64>,
    ) -> Self {
        Self { enroll_id: enroll_id.into(), test_id: test_id.into(), label, scores }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Partition {
    Train,
    Dev,
    Eval,
    #[default]
    Other,
}

impl Partition {
    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Dev => "dev",
            Partition::Eval => "eval",
            Partition::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Some(Partition::Train),
            "dev" => Some(Partition::Dev),
            "eval" => Some(Partition::Eval),
            "other" => Some(Partition::Other),
            _ => None,
        }
    }
}

/// Rows of trials sharing one ordered list of score columns.
///
/// A table may have no columns (a key file before any scores are joined);
/// once columns exist every row carries exactly one finite value per column.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    columns: Vec<String>,
    rows: Vec<TrialRecord>,
    partition: Partition,
    index: BTreeMap<(String, String), usize>,
}

fn check_column_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidConfig(alloc::format!("invalid column name `{name}`")));
    }
    Ok(())
}

impl ScoreTable {
    pub fn new(columns: Vec<String>, partition: Partition) -> Result<Self> {
        for (i, c) in columns.iter().enumerate() {
            check_column_name(c)?;
            if columns[..i].contains(c) {
                return Err(Error::DuplicateColumn(c.clone()));
            }
        }
        Ok(Self { columns, rows: Vec::new(), partition, index: BTreeMap::new() })
    }

    pub fn push(&mut self, record: TrialRecord) -> Result<()> {
        if record.scores.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                got: record.scores.len(),
            });
        }
        if record.scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("trial scores"));
        }
        record.label.validate()?;
        let key = (record.enroll_id.clone(), record.test_id.clone());
        if self.index.contains_key(&key) {
            return Err(Error::DuplicateTrial { enroll_id: key.0, test_id: key.1 });
        }
        self.index.insert(key, self.rows.len());
        self.rows.push(record);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[TrialRecord] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    pub fn set_partition(&mut self, partition: Partition) {
        self.partition = partition;
    }

    pub fn find(&self, enroll_id: &str, test_id: &str) -> Option<usize> {
        self.index.get(&(enroll_id.to_string(), test_id.to_string())).copied()
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r.scores[j]).collect())
    }

    pub fn labels(&self) -> impl Iterator<Item = &TrialLabel> + '_ {
        self.rows.iter().map(|r| &r.label)
    }

    /// Returns a copy with `name` appended as the last column.
    pub fn with_column(&self, name: &str, values: Vec<f64>) -> Result<Self> {
        check_column_name(name)?;
        if self.columns.iter().any(|c| c == name) {
            return Err(Error::DuplicateColumn(name.to_string()));
        }
        if values.len() != self.rows.len() {
            return Err(Error::DimensionMismatch { expected: self.rows.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("new column"));
        }
        let mut out = self.clone();
        out.columns.push(name.to_string());
        for (row, v) in out.rows.iter_mut().zip(values) {
            row.scores.push(v);
        }
        Ok(out)
    }

    /// Feature matrix with one column per name, in the given order.
    pub fn features<S: AsRef<str>>(&self, names: &[S]) -> Result<Matrix> {
        let idx = names
            .iter()
            .map(|n| self.column_index(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        let mut m = Matrix::zeros(self.rows.len(), idx.len());
        for (i, row) in self.rows.iter().enumerate() {
            for (k, &j) in idx.iter().enumerate() {
                m.set(i, k, row.scores[j]);
            }
        }
        Ok(m)
    }

    /// Overwrites the values of an existing column.
    fn map_column(&mut self, j: usize, f: impl Fn(f64) -> f64) {
        for row in &mut self.rows {
            row.scores[j] = f(row.scores[j]);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

/// Per-column z-normalization parameters.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NormStats {
    pub columns: Vec<ColumnStats>,
}

impl NormStats {
    pub fn get(&self, name: &str) -> Option<&ColumnStats> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn normalize(&self, name: &str, x: f64) -> Result<f64> {
        let c = self.get(name).ok_or_else(|| Error::MissingColumn(name.to_string()))?;
        Ok((x - c.mean) / c.sd)
    }
}

/// Sample mean and standard deviation (denominator `n - 1`) of each named
/// column.
pub fn fit_znorm<S: AsRef<str>>(table: &ScoreTable, columns: &[S]) -> Result<NormStats> {
    let n = table.len();
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let mut out = Vec::with_capacity(columns.len());
    for name in columns {
        let name = name.as_ref();
        let values = table.column(name)?;
        let mean = values.iter().sum::<f64>() / n as f64;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let sd = math::sqrt(ss / (n - 1) as f64);
        if sd.is_nan() || sd <= 0.0 {
            return Err(Error::ZeroVariance(name.to_string()));
        }
        out.push(ColumnStats { name: name.to_string(), mean, sd });
    }
    Ok(NormStats { columns: out })
}

/// Replaces every column covered by `stats` with `(x - mean) / sd`.
pub fn apply_znorm(table: &ScoreTable, stats: &NormStats) -> Result<ScoreTable> {
    let mut out = table.clone();
    for c in &stats.columns {
        let j = table.column_index(&c.name)?;
        let (mean, sd) = (c.mean, c.sd);
        out.map_column(j, |x| (x - mean) / sd);
    }
    Ok(out)
}

/// Inverse of [`apply_znorm`].
pub fn invert_znorm(table: &ScoreTable, stats: &NormStats) -> Result<ScoreTable> {
    let mut out = table.clone();
    for c in &stats.columns {
        let j = table.column_index(&c.name)?;
        let (mean, sd) = (c.mean, c.sd);
        out.map_column(j, |z| z * sd + mean);
    }
    Ok(out)
}
