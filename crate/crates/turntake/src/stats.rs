//! Per-speaker and per-conversation label distributions and turn-structure
//! summaries.
//!
//! Distribution columns follow each layer's canonical label order. Single,
//! combined and uncertain annotations are counted in separate buckets so
//! the three modes add up exactly.

use crate::conversation::{labeled_intervals, Conversation};
use crate::schema::{canonical_text, Inventory, LabelExpr, Layer};
use std::collections::BTreeMap;

/// Which annotations a distribution counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    /// Certain single labels only.
    SingleOnly,
    /// Certain combined labels only.
    CombinedOnly,
    /// Everything: certain singles, certain combos, plus one aggregated
    /// `uncertain` column.
    All,
}

impl CountMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CountMode::SingleOnly => "single",
            CountMode::CombinedOnly => "combined",
            CountMode::All => "all",
        }
    }
}

/// Counts per speaker and per label column, plus a totals row.
#[derive(Debug, Clone)]
pub struct DistributionTable {
    pub layer: Layer,
    pub mode: CountMode,
    pub columns: Vec<String>,
    /// (speaker id, counts aligned with `columns`)
    pub rows: Vec<(String, Vec<u64>)>,
    pub totals: Vec<u64>,
}

impl DistributionTable {
    pub fn row(&self, speaker: &str) -> Option<&[u64]> {
        self.rows
            .iter()
            .find(|(id, _)| id == speaker)
            .map(|(_, counts)| counts.as_slice())
    }

    pub fn column_total(&self, column: &str) -> Option<u64> {
        let idx = self.columns.iter().position(|c| c == column)?;
        Some(self.totals[idx])
    }

    pub fn grand_total(&self) -> u64 {
        self.totals.iter().sum()
    }

    /// Column percentages of the grand total, one decimal.
    pub fn percentages(&self) -> Vec<(String, f64)> {
        let total = self.grand_total();
        self.columns
            .iter()
            .zip(&self.totals)
            .map(|(c, &n)| {
                let pct = if total == 0 {
                    0.0
                } else {
                    (n as f64 / total as f64 * 1000.0).round() / 10.0
                };
                (c.clone(), pct)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["speaker".to_string()];
        header.extend(self.columns.iter().cloned());
        writer.write_record(&header).expect("in-memory write");
        for (speaker, counts) in &self.rows {
            let mut record = vec![speaker.clone()];
            record.extend(counts.iter().map(|c| c.to_string()));
            writer.write_record(&record).expect("in-memory write");
        }
        let mut totals = vec!["TOTAL".to_string()];
        totals.extend(self.totals.iter().map(|c| c.to_string()));
        writer.write_record(&totals).expect("in-memory write");
        String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
    }

    /// Fixed-width text table.
    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for (_, counts) in &self.rows {
            for (w, c) in widths.iter_mut().zip(counts) {
                *w = (*w).max(c.to_string().len());
            }
        }
        for (w, c) in widths.iter_mut().zip(&self.totals) {
            *w = (*w).max(c.to_string().len());
        }
        let speaker_width = self
            .rows
            .iter()
            .map(|(s, _)| s.len())
            .chain(["speaker".len(), "TOTAL".len()])
            .max()
            .unwrap_or(7);
        let mut out = format!("{:<speaker_width$}", "speaker");
        for (c, w) in self.columns.iter().zip(&widths) {
            out.push_str(&format!("  {c:>w$}"));
        }
        out.push('\n');
        for (speaker, counts) in &self.rows {
            out.push_str(&format!("{speaker:<speaker_width$}"));
            for (c, w) in counts.iter().zip(&widths) {
                out.push_str(&format!("  {c:>w$}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("{:<speaker_width$}", "TOTAL"));
        for (c, w) in self.totals.iter().zip(&widths) {
            out.push_str(&format!("  {c:>w$}"));
        }
        out.push('\n');
        out
    }
}

fn layer_tier(conv: &Conversation, speaker_idx: usize, layer: Layer) -> Option<&crate::textgrid::Tier> {
    let speaker = conv.speakers()[speaker_idx];
    match layer {
        Layer::Ipu => Some(&speaker.ipu),
        Layer::Pcomp => speaker.pcomp.as_ref(),
    }
}

/// Counts canonical labels per speaker across conversations.
///
/// Speakers appear in conversation order; column order is the layer's
/// canonical single-label order, with observed combined labels appended
/// alphabetically and, in `All` mode, one final `uncertain` column.
pub fn label_distribution(
    convs: &[Conversation],
    layer: Layer,
    mode: CountMode,
    inventory: &Inventory,
) -> DistributionTable {
    let mut speakers: Vec<String> = Vec::new();
    let mut per_speaker: BTreeMap<String, Vec<LabelExpr>> = BTreeMap::new();
    for conv in convs {
        for (idx, speaker) in conv.speakers().iter().enumerate() {
            if !per_speaker.contains_key(&speaker.id) {
                speakers.push(speaker.id.clone());
            }
            let entry = per_speaker.entry(speaker.id.clone()).or_default();
            if let Some(tier) = layer_tier(conv, idx, layer) {
                let (labeled, _) = labeled_intervals(tier, layer, inventory);
                entry.extend(labeled.into_iter().map(|iv| iv.label));
            }
        }
    }

    let singles: Vec<String> = inventory
        .single_labels(layer)
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut combined: Vec<String> = per_speaker
        .values()
        .flatten()
        .filter(|l| l.is_combined() && !l.is_uncertain())
        .map(canonical_text)
        .collect();
    combined.sort();
    combined.dedup();

    let columns: Vec<String> = match mode {
        CountMode::SingleOnly => singles,
        CountMode::CombinedOnly => combined,
        CountMode::All => {
            let mut cols = singles;
            cols.extend(combined);
            cols.push("uncertain".to_string());
            cols
        }
    };
    let index: BTreeMap<&str, usize> = columns
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();

    let mut rows = Vec::new();
    let mut totals = vec![0u64; columns.len()];
    for speaker in &speakers {
        let mut counts = vec![0u64; columns.len()];
        for label in &per_speaker[speaker] {
            let column: Option<usize> = match mode {
                CountMode::SingleOnly => {
                    if !label.is_combined() && !label.is_uncertain() {
                        index.get(canonical_text(label).as_str()).copied()
                    } else {
                        None
                    }
                }
                CountMode::CombinedOnly => {
                    if label.is_combined() && !label.is_uncertain() {
                        index.get(canonical_text(label).as_str()).copied()
                    } else {
                        None
                    }
                }
                CountMode::All => {
                    if label.is_uncertain() {
                        index.get("uncertain").copied()
                    } else {
                        index.get(canonical_text(label).as_str()).copied()
                    }
                }
            };
            if let Some(i) = column {
                counts[i] += 1;
            }
        }
        for (t, c) in totals.iter_mut().zip(&counts) {
            *t += c;
        }
        rows.push((speaker.clone(), counts));
    }
    DistributionTable {
        layer,
        mode,
        columns,
        rows,
        totals,
    }
}

/// Turn-structure accounting over the PCOMP layer for one speaker (or the
/// whole corpus).
///
/// `holding` counts `hold` alone: a hold ends a turn construction unit and
/// keeps the turn, while `cont` continues the same unit. The reported
/// holding-side of the ratio also includes `cont`, since both keep the
/// turn. Combined labels contribute only when all their parts fall on one
/// side; anything else lands in `mixed`.
#[derive(Debug, Clone, PartialEq)]
pub struct TurnStructureSummary {
    pub speaker: String,
    /// Unit-final turn-keeping labels (`hold`).
    pub holding: u64,
    /// Same-unit continuations (`cont`).
    pub continuing: u64,
    /// Turn-yielding labels (`change` + `question` + `incomplete`).
    pub yielding: u64,
    /// Combined labels spanning both sides (excluded from the ratio).
    pub mixed: u64,
    /// Summed labeled IPU durations, seconds.
    pub speaking_time_s: f64,
    /// Labeled IPU interval count.
    pub ipu_count: u64,
}

impl TurnStructureSummary {
    /// `"137:52"`-style holding-side to yielding ratio.
    pub fn ratio_label(&self) -> String {
        format!("{}:{}", self.holding + self.continuing, self.yielding)
    }

    /// Holding-side count over yielding count; `None` when nothing yields.
    pub fn ratio(&self) -> Option<f64> {
        if self.yielding == 0 {
            None
        } else {
            Some((self.holding + self.continuing) as f64 / self.yielding as f64)
        }
    }

    /// Mean turn construction units per turn:
    /// (holds + yields) / yields. `None` when nothing yields.
    pub fn mean_tcus_per_turn(&self) -> Option<f64> {
        if self.yielding == 0 {
            None
        } else {
            Some((self.holding + self.yielding) as f64 / self.yielding as f64)
        }
    }

    fn add(&mut self, other: &TurnStructureSummary) {
        self.holding += other.holding;
        self.continuing += other.continuing;
        self.yielding += other.yielding;
        self.mixed += other.mixed;
        self.speaking_time_s += other.speaking_time_s;
        self.ipu_count += other.ipu_count;
    }
}

const HOLDING_SIDE: &[&str] = &["hold", "cont"];
const YIELDING_SIDE: &[&str] = &["change", "question", "incomplete"];

/// Per-speaker turn-structure summaries plus an `overall` row.
pub fn turn_structure(convs: &[Conversation], inventory: &Inventory) -> Vec<TurnStructureSummary> {
    let mut speakers: Vec<String> = Vec::new();
    let mut by_speaker: BTreeMap<String, TurnStructureSummary> = BTreeMap::new();
    for conv in convs {
        for (idx, speaker) in conv.speakers().iter().enumerate() {
            if !by_speaker.contains_key(&speaker.id) {
                speakers.push(speaker.id.clone());
                by_speaker.insert(
                    speaker.id.clone(),
                    TurnStructureSummary {
                        speaker: speaker.id.clone(),
                        holding: 0,
                        continuing: 0,
                        yielding: 0,
                        mixed: 0,
                        speaking_time_s: 0.0,
                        ipu_count: 0,
                    },
                );
            }
            let summary = by_speaker.get_mut(&speaker.id).unwrap();

            let (ipus, _) = labeled_intervals(&speaker.ipu, Layer::Ipu, inventory);
            summary.ipu_count += ipus.len() as u64;
            summary.speaking_time_s += ipus.iter().map(|u| u.end - u.start).sum::<f64>();

            if let Some(tier) = layer_tier(conv, idx, Layer::Pcomp) {
                let (pcomps, _) = labeled_intervals(tier, Layer::Pcomp, inventory);
                for unit in pcomps {
                    count_sides(&unit.label, summary);
                }
            }
        }
    }
    let mut rows: Vec<TurnStructureSummary> = speakers
        .iter()
        .map(|s| by_speaker[s].clone())
        .collect();
    let mut overall = TurnStructureSummary {
        speaker: "overall".into(),
        holding: 0,
        continuing: 0,
        yielding: 0,
        mixed: 0,
        speaking_time_s: 0.0,
        ipu_count: 0,
    };
    for row in &rows {
        overall.add(row);
    }
    rows.push(overall);
    rows
}

fn count_sides(label: &LabelExpr, summary: &mut TurnStructureSummary) {
    // Uncertainty markers are stripped for this arithmetic.
    let parts = label.parts();
    if parts.len() == 1 {
        let p = parts[0].as_str();
        if p == "hold" {
            summary.holding += 1;
        } else if p == "cont" {
            summary.continuing += 1;
        } else if YIELDING_SIDE.contains(&p) {
            summary.yielding += 1;
        }
        return;
    }
    let all_holding = parts.iter().all(|p| HOLDING_SIDE.contains(&p.as_str()));
    let all_yielding = parts.iter().all(|p| YIELDING_SIDE.contains(&p.as_str()));
    if all_holding {
        if parts.iter().any(|p| p == "hold") {
            summary.holding += 1;
        } else {
            summary.continuing += 1;
        }
    } else if all_yielding {
        summary.yielding += 1;
    } else {
        summary.mixed += 1;
    }
}

/// Renders turn-structure rows as CSV.
pub fn turn_structure_csv(rows: &[TurnStructureSummary]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "speaker",
            "holding",
            "continuing",
            "yielding",
            "mixed",
            "ratio",
            "mean_tcus_per_turn",
            "speaking_time_s",
            "ipu_count",
        ])
        .expect("in-memory write");
    for r in rows {
        writer
            .write_record([
                r.speaker.clone(),
                r.holding.to_string(),
                r.continuing.to_string(),
                r.yielding.to_string(),
                r.mixed.to_string(),
                r.ratio_label(),
                r.mean_tcus_per_turn()
                    .map(|m| format!("{m:.2}"))
                    .unwrap_or_else(|| "undefined".into()),
                format!("{:.3}", r.speaking_time_s),
                r.ipu_count.to_string(),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

/// Summed labeled IPU durations and counts per speaker of one
/// conversation.
pub fn speaking_time(conv: &Conversation, inventory: &Inventory) -> Vec<(String, f64, u64)> {
    conv.speakers()
        .iter()
        .map(|speaker| {
            let (ipus, _) = labeled_intervals(&speaker.ipu, Layer::Ipu, inventory);
            let time: f64 = ipus.iter().map(|u| u.end - u.start).sum();
            (speaker.id.clone(), time, ipus.len() as u64)
        })
        .collect()
}
