//! Trial keys, subsystem score files and the canonical table format.
//!
//! Canonical files are tab-separated with a header row
//! `enroll_id  test_id  label  attack  <score columns...>`, optionally
//! preceded by a `#partition=<train|dev|eval|other>` line. Labels are
//! written lowercase and read case-insensitively; `attack` is `-` for
//! bonafide trials.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sasv_core::{Partition, ScoreTable, TrialKind, TrialLabel, TrialRecord};

use crate::error::{Error, Result};

/// Attack tag given to spoof trials whose source names none.
pub const UNKNOWN_ATTACK: &str = "unknown";

const FIXED_HEADER: [&str; 4] = ["enroll_id", "test_id", "label", "attack"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyFormat {
    /// Whitespace-separated `enroll test label [attack]`, or the
    /// `enroll test attack|bonafide|- label` layout of SASV protocol files.
    SasvProtocol,
    /// Canonical TSV; score columns are dropped.
    CanonicalTsv,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r'))).filter(|(_, l)| !l.trim().is_empty())
}

fn is_bonafide_marker(token: &str) -> bool {
    token == "-" || token.eq_ignore_ascii_case("bonafide")
}

fn make_label(kind: TrialKind, attack: Option<&str>) -> std::result::Result<TrialLabel, String> {
    match (kind, attack) {
        (TrialKind::Target, None) => Ok(TrialLabel::Target),
        (TrialKind::Nontarget, None) => Ok(TrialLabel::Nontarget),
        (TrialKind::Spoof, None) => Ok(TrialLabel::Spoof(UNKNOWN_ATTACK.into())),
        (TrialKind::Spoof, Some(a)) => Ok(TrialLabel::Spoof(a.into())),
        (_, Some(a)) => Err(format!("attack tag `{a}` on a bonafide {} trial", kind.as_str())),
    }
}

fn protocol_label(fields: &[&str]) -> std::result::Result<TrialLabel, String> {
    let attack = |t: &str| if is_bonafide_marker(t) { None } else { Some(t.to_string()) };
    match fields.len() {
        3 => {
            let kind = TrialKind::parse(fields[2]).ok_or_else(|| format!("unknown label `{}`", fields[2]))?;
            make_label(kind, None)
        }
        4 => {
            let (kind, tag) = match (TrialKind::parse(fields[2]), TrialKind::parse(fields[3])) {
                (Some(k), _) => (k, attack(fields[3])),
                (None, Some(k)) => (k, attack(fields[2])),
                (None, None) => return Err(format!("unknown label `{}`", fields[3])),
            };
            make_label(kind, tag.as_deref())
        }
        n => Err(format!("expected 3 or 4 fields, found {n} (`{}`)", fields.join(" "))),
    }
}

fn push_unique(table: &mut ScoreTable, record: TrialRecord, path: &Path, line: usize) -> Result<()> {
    if table.find(&record.enroll_id, &record.test_id).is_some() {
        let msg = format!("duplicate trial ({}, {})", record.enroll_id, record.test_id);
        return Err(Error::parse(path, line, msg));
    }
    table.push(record).map_err(|e| Error::parse(path, line, e.to_string()))
}

/// Parses a protocol text. `origin` is only used in error messages.
pub fn parse_trial_key_str(text: &str, format: KeyFormat, origin: &Path) -> Result<ScoreTable> {
    match format {
        KeyFormat::CanonicalTsv => {
            let full = read_canonical_str(text, origin)?;
            let mut table = ScoreTable::new(vec![], full.partition())?;
            for r in full.rows() {
                table.push(TrialRecord::new(&r.enroll_id, &r.test_id, r.label.clone(), vec![]))?;
            }
            Ok(table)
        }
        KeyFormat::SasvProtocol => {
            let mut table = ScoreTable::new(vec![], Partition::Other)?;
            for (line, text) in content_lines(text) {
                let fields: Vec<&str> = text.split_whitespace().collect();
                let label = protocol_label(&fields).map_err(|m| Error::parse(origin, line, m))?;
                push_unique(&mut table, TrialRecord::new(fields[0], fields[1], label, vec![]), origin, line)?;
            }
            Ok(table)
        }
    }
}

/// Reads a trial key into a label-only table, in line order.
pub fn parse_trial_key(path: &Path, format: KeyFormat) -> Result<ScoreTable> {
    parse_trial_key_str(&read_text(path)?, format, path)
}

fn parse_score(token: &str, path: &Path, line: usize) -> Result<f64> {
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::parse(path, line, format!("score `{token}` is not a finite number"))),
    }
}

/// Joins a score text onto `table` as a new column.
///
/// Lines are `enroll test score` (joined on the pair) or `test score`
/// (joined on the test utterance and broadcast to every trial that uses
/// it). Lines matching no trial are ignored.
pub fn attach_scores_str(table: &ScoreTable, column: &str, text: &str, origin: &Path) -> Result<ScoreTable> {
    let mut by_pair: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut by_test: BTreeMap<String, f64> = BTreeMap::new();
    let mut width = None;
    for (line, text) in content_lines(text) {
        let fields: Vec<&str> = text.split_whitespace().collect();
        let w = *width.get_or_insert(fields.len());
        if fields.len() != w || !(2..=3).contains(&w) {
            let msg = format!("expected {} fields, found {} (`{text}`)", if (2..=3).contains(&w) { w } else { 3 }, fields.len());
            return Err(Error::parse(origin, line, msg));
        }
        let score = parse_score(fields[w - 1], origin, line)?;
        let previous = if w == 3 {
            by_pair.insert((fields[0].to_string(), fields[1].to_string()), score)
        } else {
            by_test.insert(fields[0].to_string(), score)
        };
        if previous.is_some() {
            return Err(Error::parse(origin, line, format!("duplicate score line for `{}`", fields[..w - 1].join(" "))));
        }
    }
    let mut values = Vec::with_capacity(table.len());
    for r in table.rows() {
        let found = if width == Some(3) {
            by_pair.get(&(r.enroll_id.clone(), r.test_id.clone()))
        } else {
            by_test.get(&r.test_id)
        };
        match found {
            Some(&v) => values.push(v),
            None => {
                return Err(Error::MissingScore {
                    path: origin.to_path_buf(),
                    enroll_id: r.enroll_id.clone(),
                    test_id: r.test_id.clone(),
                })
            }
        }
    }
    Ok(table.with_column(column, values)?)
}

pub fn attach_scores(table: &ScoreTable, column: &str, path: &Path) -> Result<ScoreTable> {
    attach_scores_str(table, column, &read_text(path)?, path)
}

/// Renders the canonical form. Scores use 17 significant digits, which
/// round-trips every `f64` exactly.
pub fn to_canonical_string(table: &ScoreTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#partition={}", table.partition().as_str());
    let header: Vec<&str> = FIXED_HEADER.iter().copied().chain(table.columns().iter().map(String::as_str)).collect();
    out.push_str(&header.join("\t"));
    out.push('\n');
    for r in table.rows() {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}",
            r.enroll_id,
            r.test_id,
            r.label.kind().as_str(),
            r.label.attack_id().unwrap_or("-")
        );
        for s in &r.scores {
            let _ = write!(out, "\t{s:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_canonical(table: &ScoreTable, path: &Path) -> Result<()> {
    fs::write(path, to_canonical_string(table)).map_err(|e| Error::io(path, e))
}

pub fn read_canonical_str(text: &str, origin: &Path) -> Result<ScoreTable> {
    let header_err = |msg: String| Error::Header { path: origin.to_path_buf(), msg };
    let mut partition = Partition::Other;
    let mut lines = content_lines(text);
    let header = loop {
        match lines.next() {
            None => return Err(header_err("file is empty".into())),
            Some((line, l)) => match l.strip_prefix('#') {
                Some(meta) => {
                    if let Some(tag) = meta.trim().strip_prefix("partition=") {
                        partition = Partition::parse(tag.trim())
                            .ok_or_else(|| Error::parse(origin, line, format!("unknown partition `{tag}`")))?;
                    }
                }
                None => break l,
            },
        }
    };
    let names: Vec<&str> = header.split('\t').map(str::trim).collect();
    for (i, want) in FIXED_HEADER.iter().enumerate() {
        if names.get(i) != Some(want) {
            let msg = match names.iter().position(|n| n == want) {
                Some(_) => format!("column `{want}` must be at position {}", i + 1),
                None => format!("missing column `{want}`"),
            };
            return Err(header_err(msg));
        }
    }
    let columns: Vec<String> = names[4..].iter().map(|s| s.to_string()).collect();
    let mut table = ScoreTable::new(columns, partition).map_err(|e| header_err(e.to_string()))?;
    for (line, l) in lines {
        let fields: Vec<&str> = l.split('\t').map(str::trim).collect();
        if fields.len() != names.len() {
            let msg = format!("expected {} fields, found {}", names.len(), fields.len());
            return Err(Error::parse(origin, line, msg));
        }
        let kind = TrialKind::parse(fields[2])
            .ok_or_else(|| Error::parse(origin, line, format!("unknown label `{}`", fields[2])))?;
        let attack = if fields[3] == "-" { None } else { Some(fields[3]) };
        let label = make_label(kind, attack).map_err(|m| Error::parse(origin, line, m))?;
        let scores = fields[4..].iter().map(|t| parse_score(t, origin, line)).collect::<Result<Vec<_>>>()?;
        push_unique(&mut table, TrialRecord::new(fields[0], fields[1], label, scores), origin, line)?;
    }
    Ok(table)
}

pub fn read_canonical(path: &Path) -> Result<ScoreTable> {
    read_canonical_str(&read_text(path)?, path)
}
