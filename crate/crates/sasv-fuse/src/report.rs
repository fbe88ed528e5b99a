//! Result tables and histogram exports.
//!
//! Table I lists one row per pathway with dev and eval metrics in the
//! column order Stage, Fusion Type, System, Classifiers, Scores, SASV-EER,
//! SV-EER, SPF-EER, a-DCF. Table II lists per-attack eval EERs for the raw
//! input columns and the best pathway of each fusion mode.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use sasv_core::backends::ClassifierKind;
use sasv_core::fusion::{FusionMode, PathwaySpec};
use sasv_core::metrics::{EvalReport, HistogramExport};
use sasv_core::TrialKind;
use serde::{Deserialize, Serialize};

/// Outcome of one pathway of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathwayResult {
    pub index: usize,
    pub name: String,
    pub spec: PathwaySpec,
    pub dev: Option<EvalReport>,
    pub eval: Option<EvalReport>,
    pub error: Option<String>,
}

impl PathwayResult {
    pub fn succeeded(&self) -> bool {
        self.error.is_none()
    }

    /// File-name stem, e.g. `04_self-augmented_lr-svm_E+A`.
    pub fn slug(&self) -> String {
        let name = self.name.replace('/', "_").replace('|', "_aux_");
        format!("{:02}_{name}", self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRow {
    pub system: String,
    pub per_attack: BTreeMap<String, f64>,
    pub pooled: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub pathways: Vec<PathwayResult>,
    pub attack_rows: Vec<AttackRow>,
}

pub const TABLE1_HEADER: [&str; 13] = [
    "Stage",
    "Fusion Type",
    "System",
    "Classifiers",
    "Scores",
    "SASV-EER Dev",
    "SASV-EER Eval",
    "SV-EER Dev",
    "SV-EER Eval",
    "SPF-EER Dev",
    "SPF-EER Eval",
    "a-DCF Dev",
    "a-DCF Eval",
];

fn stage(mode: FusionMode) -> &'static str {
    match mode {
        FusionMode::ScoreSum => "-",
        FusionMode::SingleStage => "First",
        FusionMode::SelfAugmented | FusionMode::ExternallyAugmented => "Second",
    }
}

fn fusion_type(mode: FusionMode) -> &'static str {
    match mode {
        FusionMode::ScoreSum => "Score sum",
        FusionMode::SingleStage => "Single-stage",
        FusionMode::SelfAugmented => "Self-Aug. Multi-stage",
        FusionMode::ExternallyAugmented => "Ext-Aug. Multi-stage",
    }
}

fn classifier_tag(kind: ClassifierKind) -> &'static str {
    match kind {
        ClassifierKind::Lr => "LR",
        ClassifierKind::Svm => "SVM",
        ClassifierKind::Gaussian => "Gaus",
    }
}

/// `C1[SVM]` for one stage, `C2[LR](C1[SVM])` for two.
pub fn classifiers_label(spec: &PathwaySpec) -> String {
    match (spec.stage1, spec.stage2) {
        (Some(a), Some(b)) => format!("C2[{}](C1[{}])", classifier_tag(b), classifier_tag(a)),
        (Some(a), None) => format!("C1[{}]", classifier_tag(a)),
        _ => "-".into(),
    }
}

pub fn scores_label(spec: &PathwaySpec) -> String {
    spec.referenced_columns().join(", ")
}

pub fn system_label(spec: &PathwaySpec) -> String {
    spec.alias.clone().unwrap_or_else(|| spec.name())
}

fn eer_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "N/A".into(), |x| format!("{x:.2}"))
}

fn dcf_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "N/A".into(), |x| format!("{x:.3}"))
}

fn raw_cell(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn metric_cells(r: &PathwayResult, fmt_eer: fn(Option<f64>) -> String, fmt_dcf: fn(Option<f64>) -> String) -> Vec<String> {
    let (Some(dev), Some(eval)) = (&r.dev, &r.eval) else {
        return vec!["FAILED".into(); 8];
    };
    vec![
        fmt_eer(dev.sasv_eer),
        fmt_eer(eval.sasv_eer),
        fmt_eer(dev.sv_eer),
        fmt_eer(eval.sv_eer),
        fmt_eer(dev.spf_eer),
        fmt_eer(eval.spf_eer),
        fmt_dcf(dev.a_dcf),
        fmt_dcf(eval.a_dcf),
    ]
}

fn descriptor_cells(spec: &PathwaySpec) -> Vec<String> {
    vec![
        stage(spec.mode).into(),
        fusion_type(spec.mode).into(),
        system_label(spec),
        classifiers_label(spec),
        scores_label(spec),
    ]
}

/// Left-aligned text table with a rule under the header.
pub fn render_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let padded: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(&mut header.iter().copied());
    out.push_str(&line(&mut widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str)));
    for row in rows {
        out.push_str(&line(&mut row.iter().map(String::as_str)));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    let join = |cells: Vec<String>| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n";
    out.push_str(&join(header.iter().map(|h| h.to_string()).collect()));
    for row in rows {
        out.push_str(&join(row.clone()));
    }
    out
}

/// Two-decimal EERs and three-decimal a-DCF, failures listed underneath.
pub fn table1_text(results: &[PathwayResult]) -> String {
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = descriptor_cells(&r.spec);
            row.extend(metric_cells(r, eer_cell, dcf_cell));
            row
        })
        .collect();
    let mut out = render_text(&TABLE1_HEADER, &rows);
    for r in results.iter().filter(|r| !r.succeeded()) {
        let _ = writeln!(out, "failed: {}: {}", r.name, r.error.as_deref().unwrap_or(""));
    }
    out
}

/// Full-precision values plus the pathway name and any error message.
pub fn table1_csv(results: &[PathwayResult]) -> String {
    let mut header = TABLE1_HEADER.to_vec();
    header.extend(["Pathway", "Error"]);
    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|r| {
            let mut row = descriptor_cells(&r.spec);
            if r.succeeded() {
                row.extend(metric_cells(r, raw_cell, raw_cell));
            } else {
                row.extend(vec![String::new(); 8]);
            }
            row.push(r.name.clone());
            row.push(r.error.clone().unwrap_or_default());
            row
        })
        .collect();
    render_csv(&header, &rows)
}

/// Index of the pathway with the lowest dev SASV-EER for each fusion mode,
/// in order of first appearance. Ties keep the earlier pathway.
pub fn best_per_mode(results: &[PathwayResult]) -> Vec<usize> {
    let mut best: Vec<(FusionMode, usize, f64)> = Vec::new();
    for (i, r) in results.iter().enumerate() {
        let Some(score) = r.dev.as_ref().and_then(|d| d.sasv_eer) else { continue };
        match best.iter_mut().find(|(m, _, _)| *m == r.spec.mode) {
            Some(entry) if score < entry.2 => *entry = (r.spec.mode, i, score),
            Some(_) => {}
            None => best.push((r.spec.mode, i, score)),
        }
    }
    best.into_iter().map(|(_, i, _)| i).collect()
}

pub fn attack_row_for(result: &PathwayResult) -> Option<AttackRow> {
    let eval = result.eval.as_ref()?;
    Some(AttackRow {
        system: format!("{} ({})", system_label(&result.spec), scores_label(&result.spec)),
        per_attack: eval.per_attack.clone(),
        pooled: eval.pooled_attack_eer,
    })
}

fn table2_rows(rows: &[AttackRow], cell: fn(Option<f64>) -> String) -> (Vec<String>, Vec<Vec<String>>) {
    let attacks: BTreeSet<&String> = rows.iter().flat_map(|r| r.per_attack.keys()).collect();
    let mut header = vec!["System".to_string()];
    header.extend(attacks.iter().map(|a| a.to_string()));
    header.push("Pooled".into());
    let body = rows
        .iter()
        .map(|r| {
            let mut row = vec![r.system.clone()];
            row.extend(attacks.iter().map(|a| cell(r.per_attack.get(*a).copied())));
            row.push(cell(r.pooled));
            row
        })
        .collect();
    (header, body)
}

pub fn table2_text(rows: &[AttackRow]) -> String {
    let (header, body) = table2_rows(rows, |v| v.map_or_else(|| "-".into(), |x| format!("{x:.2}")));
    render_text(&header.iter().map(String::as_str).collect::<Vec<_>>(), &body)
}

pub fn table2_csv(rows: &[AttackRow]) -> String {
    let (header, body) = table2_rows(rows, raw_cell);
    render_csv(&header.iter().map(String::as_str).collect::<Vec<_>>(), &body)
}

/// One line per (class, bin): `class,bin_low,bin_high,count`.
pub fn histogram_csv(h: &HistogramExport) -> String {
    let mut out = String::from("class,bin_low,bin_high,count\n");
    for kind in [TrialKind::Target, TrialKind::Nontarget, TrialKind::Spoof] {
        for (i, count) in h.counts(kind).iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{count}", kind.as_str(), h.edges[i], h.edges[i + 1]);
        }
    }
    out
}
