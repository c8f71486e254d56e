//! Inter- and intra-annotator agreement: interval alignment, Cohen's and
//! Fleiss' kappa, boundary agreement over candidate positions, and the
//! full/partial/none partition for combined labels.
//!
//! With two raters the two kappas differ in their expected-agreement term:
//! Cohen uses per-rater marginals, Fleiss pools them. Reports carry both,
//! labeled, so either reading of a published value can be checked.

use crate::conversation::LabeledInterval;
use crate::schema::{canonical_text, LabelExpr, MacroOutcome, MacroScheme};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgreementError {
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("expected agreement is 1 while observed agreement is below 1; kappa is undefined")]
    UndefinedKappa,
    #[error("item {item} has {got} ratings, expected {expected}")]
    RaggedRatings {
        item: usize,
        got: usize,
        expected: usize,
    },
    #[error("need at least 2 raters, got {0}")]
    TooFewRaters(usize),
}

/// One aligned position between two annotation rounds.
#[derive(Debug, Clone)]
pub enum AlignedPair {
    /// Both annotators set the same boundaries (within tolerance).
    Exact(LabeledInterval, LabeledInterval),
    /// Only the first annotation has this interval.
    UnmatchedA(LabeledInterval),
    /// Only the second annotation has this interval.
    UnmatchedB(LabeledInterval),
}

/// Greedy one-to-one matching of two annotators' intervals.
///
/// Intervals pair up when both boundaries agree within the tolerance;
/// everything else is a segmentation disagreement and stays unmatched,
/// including the split case where one annotator subdivides a span the
/// other kept whole.
pub fn align(a: &[LabeledInterval], b: &[LabeledInterval], tolerance_s: f64) -> Vec<AlignedPair> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ai, bj) = (&a[i], &b[j]);
        let starts_match = (ai.start - bj.start).abs() <= tolerance_s;
        let ends_match = (ai.end - bj.end).abs() <= tolerance_s;
        if starts_match && ends_match {
            out.push(AlignedPair::Exact(ai.clone(), bj.clone()));
            i += 1;
            j += 1;
        } else if ai.end < bj.end - tolerance_s {
            out.push(AlignedPair::UnmatchedA(ai.clone()));
            i += 1;
        } else if bj.end < ai.end - tolerance_s {
            out.push(AlignedPair::UnmatchedB(bj.clone()));
            j += 1;
        } else {
            // Ends agree but starts differ: neither can match anything
            // later, so both stay unmatched.
            out.push(AlignedPair::UnmatchedA(ai.clone()));
            out.push(AlignedPair::UnmatchedB(bj.clone()));
            i += 1;
            j += 1;
        }
    }
    out.extend(a[i..].iter().cloned().map(AlignedPair::UnmatchedA));
    out.extend(b[j..].iter().cloned().map(AlignedPair::UnmatchedB));
    out
}

/// Paired category counts from aligned labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub categories: Vec<String>,
    /// `counts[i][j]`: annotator A chose category i, annotator B chose j.
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: &[(String, String)]) -> ConfusionMatrix {
        let mut categories: Vec<String> = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        categories.sort();
        categories.dedup();
        let index: BTreeMap<&str, usize> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let n = categories.len();
        let mut counts = vec![vec![0u64; n]; n];
        for (a, b) in pairs {
            counts[index[a.as_str()]][index[b.as_str()]] += 1;
        }
        ConfusionMatrix { categories, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.categories.len()).map(|k| self.counts[k][k]).sum()
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|row| row.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        (0..self.categories.len())
            .map(|j| self.counts.iter().map(|row| row[j]).sum())
            .collect()
    }

    /// Renders the matrix as CSV, annotator A in rows, B in columns.
    pub fn to_csv(&self) -> String {
        let mut writer = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["a\\b".to_string()];
        header.extend(self.categories.iter().cloned());
        writer.write_record(&header).expect("in-memory write");
        for (i, row) in self.counts.iter().enumerate() {
            let mut record = vec![self.categories[i].clone()];
            record.extend(row.iter().map(|c| c.to_string()));
            writer.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Observed agreement, expected agreement and the derived kappa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kappa {
    pub p_observed: f64,
    pub p_expected: f64,
    pub kappa: f64,
}

/// Cohen's kappa over a two-annotator confusion matrix.
///
/// Expected agreement multiplies the two annotators' separate marginal
/// proportions. Perfect observed agreement returns exactly 1.
pub fn cohen_kappa(matrix: &ConfusionMatrix) -> Result<Kappa, AgreementError> {
    let total = matrix.total();
    if total == 0 || matrix.categories.is_empty() {
        return Err(AgreementError::EmptyMatrix);
    }
    let n = total as f64;
    let trace = matrix.trace();
    let p_o = trace as f64 / n;
    let rows = matrix.row_sums();
    let cols = matrix.col_sums();
    let p_e: f64 = rows
        .iter()
        .zip(&cols)
        .map(|(&r, &c)| (r as f64 / n) * (c as f64 / n))
        .sum();
    if trace == total {
        return Ok(Kappa {
            p_observed: 1.0,
            p_expected: p_e,
            kappa: 1.0,
        });
    }
    if p_e >= 1.0 {
        return Err(AgreementError::UndefinedKappa);
    }
    Ok(Kappa {
        p_observed: p_o,
        p_expected: p_e,
        kappa: (p_o - p_e) / (1.0 - p_e),
    })
}

/// Fleiss' kappa over an items × raters table plus its z statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FleissKappa {
    pub p_bar: f64,
    pub p_expected: f64,
    pub kappa: f64,
    /// Large-sample z statistic under the null-hypothesis variance.
    pub z: f64,
    pub n_items: usize,
    pub n_raters: usize,
}

/// Fleiss' kappa: per-item agreement averaged over items, expected
/// agreement from pooled category proportions.
///
/// Every item must carry the same number of ratings (at least two).
/// Category values are opaque strings.
pub fn fleiss_kappa(ratings: &[Vec<String>]) -> Result<FleissKappa, AgreementError> {
    if ratings.is_empty() {
        return Err(AgreementError::EmptyMatrix);
    }
    let n_raters = ratings[0].len();
    if n_raters < 2 {
        return Err(AgreementError::TooFewRaters(n_raters));
    }
    for (item, row) in ratings.iter().enumerate() {
        if row.len() != n_raters {
            return Err(AgreementError::RaggedRatings {
                item,
                got: row.len(),
                expected: n_raters,
            });
        }
    }
    let n_items = ratings.len();
    let mut categories: Vec<&str> = ratings
        .iter()
        .flatten()
        .map(|s| s.as_str())
        .collect();
    categories.sort();
    categories.dedup();
    let index: BTreeMap<&str, usize> = categories
        .iter()
        .enumerate()
        .map(|(i, c)| (*c, i))
        .collect();

    let n = n_raters as f64;
    let mut category_totals = vec![0u64; categories.len()];
    let mut p_bar_sum = 0.0;
    for row in ratings {
        let mut item_counts = vec![0u64; categories.len()];
        for rating in row {
            item_counts[index[rating.as_str()]] += 1;
        }
        for (k, &c) in item_counts.iter().enumerate() {
            category_totals[k] += c;
        }
        let agree: u64 = item_counts.iter().map(|&c| c * c.saturating_sub(1)).sum();
        p_bar_sum += agree as f64 / (n * (n - 1.0));
    }
    let p_bar = p_bar_sum / n_items as f64;
    let p_k: Vec<f64> = category_totals
        .iter()
        .map(|&c| c as f64 / (n_items as f64 * n))
        .collect();
    let p_e: f64 = p_k.iter().map(|p| p * p).sum();

    let kappa = if (p_bar - 1.0).abs() == 0.0 {
        1.0
    } else if p_e >= 1.0 {
        return Err(AgreementError::UndefinedKappa);
    } else {
        (p_bar - p_e) / (1.0 - p_e)
    };

    // Null-hypothesis variance of Fleiss (1971): with A = sum p_k q_k and
    // B = sum p_k q_k (q_k - p_k),  var = 2 (A^2 - B) / (A^2 N n (n-1)).
    let a: f64 = p_k.iter().map(|p| p * (1.0 - p)).sum();
    let b: f64 = p_k.iter().map(|p| p * (1.0 - p) * ((1.0 - p) - p)).sum();
    let var = if a == 0.0 {
        0.0
    } else {
        2.0 * (a * a - b) / (a * a * n_items as f64 * n * (n - 1.0))
    };
    let z = if var > 0.0 { kappa / var.sqrt() } else { f64::INFINITY };

    Ok(FleissKappa {
        p_bar,
        p_expected: p_e,
        kappa,
        z,
        n_items,
        n_raters,
    })
}

/// Set/no-set decisions at each candidate boundary position.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryAgreement {
    pub both: usize,
    pub only_a: usize,
    pub only_b: usize,
    pub neither: usize,
    /// (both + neither) / candidates
    pub agreement: f64,
    /// Observed boundaries not near any candidate, per annotator.
    pub uncovered_a: Vec<f64>,
    pub uncovered_b: Vec<f64>,
}

/// Agreement of two boundary sets with respect to every position where a
/// boundary could have been set.
pub fn boundary_agreement(
    bounds_a: &[f64],
    bounds_b: &[f64],
    candidates: &[f64],
    tolerance_s: f64,
) -> BoundaryAgreement {
    let near = |set: &[f64], t: f64| set.iter().any(|b| (b - t).abs() <= tolerance_s);
    let (mut both, mut only_a, mut only_b, mut neither) = (0, 0, 0, 0);
    for &c in candidates {
        match (near(bounds_a, c), near(bounds_b, c)) {
            (true, true) => both += 1,
            (true, false) => only_a += 1,
            (false, true) => only_b += 1,
            (false, false) => neither += 1,
        }
    }
    let uncovered = |set: &[f64]| {
        set.iter()
            .copied()
            .filter(|&b| !near(candidates, b))
            .collect::<Vec<f64>>()
    };
    let agreement = if candidates.is_empty() {
        1.0
    } else {
        (both + neither) as f64 / candidates.len() as f64
    };
    BoundaryAgreement {
        both,
        only_a,
        only_b,
        neither,
        agreement,
        uncovered_a: uncovered(bounds_a),
        uncovered_b: uncovered(bounds_b),
    }
}

/// Label-level relation of one aligned pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelAgreement {
    /// Identical canonical parts, uncertainty ignored.
    Full,
    /// The parts overlap without being equal, e.g. a combined label
    /// containing the other annotation's single label.
    Partial,
    /// Disjoint parts.
    None,
}

/// Classifies one label pair as full, partial or no agreement.
pub fn label_agreement(a: &LabelExpr, b: &LabelExpr) -> LabelAgreement {
    if a.parts() == b.parts() {
        return LabelAgreement::Full;
    }
    let shared = a.parts().iter().any(|p| b.parts().contains(p));
    if shared {
        LabelAgreement::Partial
    } else {
        LabelAgreement::None
    }
}

/// Counts of the full/partial/none partition over aligned pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PartialBreakdown {
    pub full: usize,
    pub partial: usize,
    pub none: usize,
}

pub fn partial_agreement(pairs: &[(LabelExpr, LabelExpr)]) -> PartialBreakdown {
    let mut breakdown = PartialBreakdown::default();
    for (a, b) in pairs {
        match label_agreement(a, b) {
            LabelAgreement::Full => breakdown.full += 1,
            LabelAgreement::Partial => breakdown.partial += 1,
            LabelAgreement::None => breakdown.none += 1,
        }
    }
    breakdown
}

/// Builds a confusion matrix from label pairs, by canonical text or, when
/// a scheme is given, by macro-category (mixed combinations keep their own
/// `Mixed` category). Uncertainty markers are stripped.
pub fn confusion_table(
    pairs: &[(LabelExpr, LabelExpr)],
    grouping: Option<&MacroScheme>,
) -> ConfusionMatrix {
    let name = |label: &LabelExpr| -> String {
        match grouping {
            None => canonical_text(&label.certain()),
            Some(scheme) => match crate::schema::macro_category(label, scheme) {
                MacroOutcome::Category(c) => c,
                MacroOutcome::Mixed => "Mixed".to_string(),
            },
        }
    };
    let named: Vec<(String, String)> = pairs.iter().map(|(a, b)| (name(a), name(b))).collect();
    ConfusionMatrix::from_pairs(&named)
}

/// Everything the agree command reports for one tier pair.
#[derive(Debug, Clone)]
pub struct AgreementReport {
    pub n_aligned: usize,
    pub n_unmatched_a: usize,
    pub n_unmatched_b: usize,
    pub cohen: Result<Kappa, String>,
    pub fleiss: Result<FleissKappa, String>,
    pub partial: PartialBreakdown,
    pub matrix: ConfusionMatrix,
    pub macro_matrix: Option<ConfusionMatrix>,
    pub macro_fleiss: Option<Result<FleissKappa, String>>,
}

/// Options for [`agreement_report`].
#[derive(Debug, Clone)]
pub struct ReportOptions {
    /// Strip `@` markers before comparing labels (flag to keep them).
    pub strip_uncertainty: bool,
    /// Also compute agreement after grouping through this scheme.
    pub macro_scheme: Option<MacroScheme>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            strip_uncertainty: true,
            macro_scheme: None,
        }
    }
}

/// Aligns two labeled tiers and derives every agreement statistic.
pub fn agreement_report(
    a: &[LabeledInterval],
    b: &[LabeledInterval],
    tolerance_s: f64,
    options: &ReportOptions,
) -> AgreementReport {
    let aligned = align(a, b, tolerance_s);
    let mut pairs: Vec<(LabelExpr, LabelExpr)> = Vec::new();
    let (mut unmatched_a, mut unmatched_b) = (0, 0);
    for pair in &aligned {
        match pair {
            AlignedPair::Exact(x, y) => {
                let (mut lx, mut ly) = (x.label.clone(), y.label.clone());
                if options.strip_uncertainty {
                    lx = lx.certain();
                    ly = ly.certain();
                }
                pairs.push((lx, ly));
            }
            AlignedPair::UnmatchedA(_) => unmatched_a += 1,
            AlignedPair::UnmatchedB(_) => unmatched_b += 1,
        }
    }
    let matrix = confusion_table(&pairs, None);
    let cohen = cohen_kappa(&matrix).map_err(|e| e.to_string());
    let ratings: Vec<Vec<String>> = pairs
        .iter()
        .map(|(x, y)| vec![canonical_text(x), canonical_text(y)])
        .collect();
    let fleiss = fleiss_kappa(&ratings).map_err(|e| e.to_string());
    let (macro_matrix, macro_fleiss) = match &options.macro_scheme {
        Some(scheme) => {
            let m = confusion_table(&pairs, Some(scheme));
            let grouped: Vec<Vec<String>> = pairs
                .iter()
                .map(|(x, y)| {
                    let name = |l: &LabelExpr| match crate::schema::macro_category(l, scheme) {
                        MacroOutcome::Category(c) => c,
                        MacroOutcome::Mixed => "Mixed".to_string(),
                    };
                    vec![name(x), name(y)]
                })
                .collect();
            (
                Some(m),
                Some(fleiss_kappa(&grouped).map_err(|e| e.to_string())),
            )
        }
        None => (None, None),
    };
    AgreementReport {
        n_aligned: pairs.len(),
        n_unmatched_a: unmatched_a,
        n_unmatched_b: unmatched_b,
        cohen,
        fleiss,
        partial: partial_agreement(&pairs),
        matrix,
        macro_matrix,
        macro_fleiss,
    }
}

impl AgreementReport {
    /// Human-readable summary naming each statistic.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "aligned intervals:      {}\nunmatched (annotator a): {}\nunmatched (annotator b): {}\n",
            self.n_aligned, self.n_unmatched_a, self.n_unmatched_b
        ));
        match &self.cohen {
            Ok(k) => out.push_str(&format!(
                "cohen kappa:            {:.6} (p_o {:.6}, p_e {:.6})\n",
                k.kappa, k.p_observed, k.p_expected
            )),
            Err(e) => out.push_str(&format!("cohen kappa:            undefined ({e})\n")),
        }
        match &self.fleiss {
            Ok(k) => out.push_str(&format!(
                "fleiss kappa:           {:.6} (P_bar {:.6}, P_e {:.6}, z {:.2})\n",
                k.kappa, k.p_bar, k.p_expected, k.z
            )),
            Err(e) => out.push_str(&format!("fleiss kappa:           undefined ({e})\n")),
        }
        if let Some(Ok(k)) = &self.macro_fleiss {
            out.push_str(&format!(
                "fleiss kappa (macro):   {:.6} (P_bar {:.6}, P_e {:.6}, z {:.2})\n",
                k.kappa, k.p_bar, k.p_expected, k.z
            ));
        }
        out.push_str(&format!(
            "label agreement:        full {} / partial {} / none {}\n",
            self.partial.full, self.partial.partial, self.partial.none
        ));
        out
    }
}
