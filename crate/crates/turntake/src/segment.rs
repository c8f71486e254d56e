//! Pause-based segmentation of word tiers into inter-pausal units, plus
//! pause, overlap and turn-transition timing extraction.
//!
//! A unit is a stretch of one speaker's speech, including audible breathing
//! and smacks, separated from the same speaker's other speech by silence of
//! at least the threshold (150 ms by default, inclusive). Breaths never
//! split a silence run; they attach to the side whose silence stays under
//! the threshold. Laughter and noise are excluded from units and count
//! toward a silence run only when the run also contains real silence.

use crate::schema::LabelExpr;
use crate::textgrid::{Tier, TIME_EPS};
use std::collections::BTreeMap;
use std::ops::Range;
use thiserror::Error;

/// Default minimum silence that separates two units, in seconds.
pub const DEFAULT_IPU_THRESHOLD_S: f64 = 0.150;

#[derive(Debug, Error)]
pub enum SegmentError {
    #[error("unclassifiable marker {0:?}; add it to the classifier configuration")]
    Unclassifiable(String),
    #[error("bad classifier rule {line:?}: {msg}")]
    BadRule { line: String, msg: String },
    #[error("threshold must be positive, got {0}")]
    BadThreshold(f64),
}

/// What one orthographic-tier interval contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenClass {
    Word,
    Silence,
    Breath,
    Smack,
    Laughter,
    Noise,
}

impl TokenClass {
    pub fn parse(s: &str) -> Option<TokenClass> {
        match s {
            "word" => Some(TokenClass::Word),
            "silence" => Some(TokenClass::Silence),
            "breath" => Some(TokenClass::Breath),
            "smack" => Some(TokenClass::Smack),
            "laughter" => Some(TokenClass::Laughter),
            "noise" => Some(TokenClass::Noise),
            _ => None,
        }
    }

    /// Separator material between units; breaths and smacks are not
    /// separators, they are included in units and may bridge across them.
    fn separates(self) -> bool {
        matches!(
            self,
            TokenClass::Silence | TokenClass::Laughter | TokenClass::Noise
        )
    }
}

/// Where a breath-only group between two splitting silences attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrphanBreaths {
    /// Join the following unit (turn-initial inbreaths).
    #[default]
    Rightward,
    /// Join the preceding unit.
    Leftward,
}

/// Maps orthographic-tier texts to token classes.
///
/// Empty or whitespace-only text is silence. Non-marker text is a word.
/// `<...>` markers are looked up in the rule table, exact rules first, then
/// `*` wildcard rules in order; unknown markers are an error.
#[derive(Debug, Clone)]
pub struct TokenClassifier {
    exact: BTreeMap<String, TokenClass>,
    wildcards: Vec<(String, TokenClass)>,
    pub orphan_breaths: OrphanBreaths,
}

impl Default for TokenClassifier {
    fn default() -> Self {
        let mut exact = BTreeMap::new();
        for (marker, class) in [
            ("<sil>", TokenClass::Silence),
            ("<silence>", TokenClass::Silence),
            ("<p>", TokenClass::Silence),
            ("<pause>", TokenClass::Silence),
            ("<breath>", TokenClass::Breath),
            ("<breath-in>", TokenClass::Breath),
            ("<breath-out>", TokenClass::Breath),
            ("<inbreath>", TokenClass::Breath),
            ("<outbreath>", TokenClass::Breath),
            ("<smack>", TokenClass::Smack),
            ("<laughter>", TokenClass::Laughter),
            ("<laugh>", TokenClass::Laughter),
            ("<noise>", TokenClass::Noise),
            ("<cough>", TokenClass::Noise),
        ] {
            exact.insert(marker.to_string(), class);
        }
        TokenClassifier {
            exact,
            wildcards: Vec::new(),
            orphan_breaths: OrphanBreaths::default(),
        }
    }
}

impl TokenClassifier {
    /// Parses `key<TAB>class` rules, one per line; `#` starts a comment.
    /// A `*` in the key matches any run of characters. Rules add to the
    /// defaults and take precedence over them.
    pub fn from_rules(text: &str) -> Result<Self, SegmentError> {
        let mut classifier = TokenClassifier::default();
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, class) = line.split_once('\t').ok_or_else(|| SegmentError::BadRule {
                line: line.to_string(),
                msg: "expected key<TAB>class".into(),
            })?;
            let class = TokenClass::parse(class.trim()).ok_or_else(|| SegmentError::BadRule {
                line: line.to_string(),
                msg: format!("unknown class {:?}", class.trim()),
            })?;
            let key = key.trim().to_string();
            if key.contains('*') {
                classifier.wildcards.push((key, class));
            } else {
                classifier.exact.insert(key, class);
            }
        }
        Ok(classifier)
    }

    pub fn classify(&self, text: &str) -> Result<TokenClass, SegmentError> {
        let trimmed = text.trim();
        if trimmed.is_empty() {
            return Ok(TokenClass::Silence);
        }
        if let Some(class) = self.exact.get(trimmed) {
            return Ok(*class);
        }
        for (pattern, class) in &self.wildcards {
            if wildcard_match(pattern, trimmed) {
                return Ok(*class);
            }
        }
        if trimmed.starts_with('<') && trimmed.ends_with('>') {
            return Err(SegmentError::Unclassifiable(trimmed.to_string()));
        }
        Ok(TokenClass::Word)
    }
}

fn wildcard_match(pattern: &str, text: &str) -> bool {
    let mut parts = pattern.split('*');
    let first = parts.next().unwrap_or("");
    if !text.starts_with(first) {
        return false;
    }
    let mut rest = &text[first.len()..];
    let mut pieces: Vec<&str> = parts.collect();
    let last = if pattern.ends_with('*') {
        None
    } else {
        pieces.pop()
    };
    for piece in pieces {
        match rest.find(piece) {
            Some(at) => rest = &rest[at + piece.len()..],
            None => return false,
        }
    }
    match last {
        Some(suffix) => rest.ends_with(suffix),
        None => true,
    }
}

/// One proposed inter-pausal unit.
#[derive(Debug, Clone, PartialEq)]
pub struct IpuProposal {
    pub start: f64,
    pub end: f64,
    /// Contiguous index range into the source tier, first to last token of
    /// the unit (internal sub-threshold silences included).
    pub token_indices: Range<usize>,
}

/// A maximal silence run.
#[derive(Debug, Clone, PartialEq)]
pub struct Pause {
    pub start: f64,
    pub end: f64,
    pub duration: f64,
}

/// Timing of one turn transition: positive offsets are gaps, negative
/// offsets are overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionOffset {
    pub from_speaker: String,
    pub to_speaker: String,
    /// End of the turn-yielding unit.
    pub from_end: f64,
    /// Start of the other speaker's next unit.
    pub to_start: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Token {
    class: TokenClass,
    xmin: f64,
    xmax: f64,
}

/// Proposes inter-pausal units over a word tier.
///
/// Consecutive non-separator tokens whose intervening silence run stays
/// strictly under the threshold share one unit; a run of at least the
/// threshold splits. Units never start or end with silence, laughter or
/// noise; breaths and smacks are included and may begin or end a unit.
pub fn propose_ipus(
    word_tier: &Tier,
    classifier: &TokenClassifier,
    threshold_s: f64,
) -> Result<Vec<IpuProposal>, SegmentError> {
    if !(threshold_s > 0.0) {
        return Err(SegmentError::BadThreshold(threshold_s));
    }
    let tokens = classify_tier(word_tier, classifier)?;

    // Group tokens between splitting separator runs.
    let mut groups: Vec<Range<usize>> = Vec::new();
    let mut group_start: Option<usize> = None;
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].class.separates() {
            let run_start = i;
            while i < tokens.len() && tokens[i].class.separates() {
                i += 1;
            }
            let run = &tokens[run_start..i];
            if separator_run_duration(run) >= threshold_s - TIME_EPS {
                if let Some(s) = group_start.take() {
                    groups.push(s..run_start);
                }
            }
        } else {
            if group_start.is_none() {
                group_start = Some(i);
            }
            i += 1;
        }
    }
    if let Some(s) = group_start {
        groups.push(s..tokens.len());
    }

    // Trim separators off group edges, then split word-bearing groups from
    // orphan breath groups.
    #[derive(Debug)]
    struct Group {
        range: Range<usize>,
        has_word: bool,
    }
    let mut trimmed: Vec<Group> = Vec::new();
    for range in groups {
        let mut start = range.start;
        let mut end = range.end;
        while start < end && tokens[start].class.separates() {
            start += 1;
        }
        while end > start && tokens[end - 1].class.separates() {
            end -= 1;
        }
        if start == end {
            continue;
        }
        let has_word = tokens[start..end]
            .iter()
            .any(|t| t.class == TokenClass::Word);
        trimmed.push(Group {
            range: start..end,
            has_word,
        });
    }

    // Attach orphan carry groups to a neighbouring word-bearing group.
    let mut proposals: Vec<Range<usize>> = Vec::new();
    let mut pending_orphan: Option<usize> = None;
    for group in &trimmed {
        if group.has_word {
            let start = match pending_orphan.take() {
                Some(orphan_start) => orphan_start,
                None => group.range.start,
            };
            proposals.push(start..group.range.end);
        } else {
            match classifier.orphan_breaths {
                OrphanBreaths::Rightward => {
                    if pending_orphan.is_none() {
                        pending_orphan = Some(group.range.start);
                    }
                }
                OrphanBreaths::Leftward => {
                    if let Some(last) = proposals.last_mut() {
                        last.end = group.range.end;
                    } else if pending_orphan.is_none() {
                        pending_orphan = Some(group.range.start);
                    }
                }
            }
        }
    }
    if pending_orphan.is_some() {
        // Trailing orphan breaths with no unit to their right join leftward.
        if let (Some(last), Some(orphan_start)) = (proposals.last_mut(), pending_orphan) {
            if orphan_start > last.end {
                let orphan_end = trimmed
                    .iter()
                    .rev()
                    .find(|g| !g.has_word && g.range.start >= orphan_start)
                    .map(|g| g.range.end);
                if let Some(end) = orphan_end {
                    last.end = end;
                }
            }
        }
    }

    Ok(proposals
        .into_iter()
        .map(|range| IpuProposal {
            start: tokens[range.start].xmin,
            end: tokens[range.end - 1].xmax,
            token_indices: range,
        })
        .collect())
}

/// Effective silence of one separator run: laughter and noise join the run
/// only when it contains at least one real silence token.
fn separator_run_duration(run: &[Token]) -> f64 {
    let has_silence = run.iter().any(|t| t.class == TokenClass::Silence);
    if has_silence {
        run.iter().map(|t| t.xmax - t.xmin).sum()
    } else {
        0.0
    }
}

/// A maximal run of separator tokens (silence, laughter, noise) with its
/// effective silence duration.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorRun {
    pub start: f64,
    pub end: f64,
    pub effective_silence: f64,
}

/// All separator runs of a word tier, in order. Used by segmentation
/// linting to find unit-internal silences.
pub fn separator_runs(
    tier: &Tier,
    classifier: &TokenClassifier,
) -> Result<Vec<SeparatorRun>, SegmentError> {
    let tokens = classify_tier(tier, classifier)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].class.separates() {
            let start = i;
            while i < tokens.len() && tokens[i].class.separates() {
                i += 1;
            }
            let run = &tokens[start..i];
            out.push(SeparatorRun {
                start: run[0].xmin,
                end: run[run.len() - 1].xmax,
                effective_silence: separator_run_duration(run),
            });
        } else {
            i += 1;
        }
    }
    Ok(out)
}

/// Word-class intervals of a tier as `(xmin, xmax)` spans.
pub fn word_spans(
    tier: &Tier,
    classifier: &TokenClassifier,
) -> Result<Vec<(f64, f64)>, SegmentError> {
    let tokens = classify_tier(tier, classifier)?;
    Ok(tokens
        .iter()
        .filter(|t| t.class == TokenClass::Word)
        .map(|t| (t.xmin, t.xmax))
        .collect())
}

/// The token class at a time point, if any interval contains it.
pub fn class_at(
    tier: &Tier,
    classifier: &TokenClassifier,
    t: f64,
) -> Result<Option<TokenClass>, SegmentError> {
    for iv in &tier.intervals {
        if t >= iv.xmin - TIME_EPS && t < iv.xmax {
            return Ok(Some(classifier.classify(&iv.text)?));
        }
    }
    Ok(None)
}

fn classify_tier(tier: &Tier, classifier: &TokenClassifier) -> Result<Vec<Token>, SegmentError> {
    tier.intervals
        .iter()
        .map(|iv| {
            Ok(Token {
                class: classifier.classify(&iv.text)?,
                xmin: iv.xmin,
                xmax: iv.xmax,
            })
        })
        .collect()
}

/// Maximal runs of silence-class intervals, with summed durations.
pub fn pauses(tier: &Tier, classifier: &TokenClassifier) -> Result<Vec<Pause>, SegmentError> {
    let tokens = classify_tier(tier, classifier)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i].class == TokenClass::Silence {
            let start = tokens[i].xmin;
            let mut duration = 0.0;
            let mut end = tokens[i].xmax;
            while i < tokens.len() && tokens[i].class == TokenClass::Silence {
                duration += tokens[i].xmax - tokens[i].xmin;
                end = tokens[i].xmax;
                i += 1;
            }
            out.push(Pause {
                start,
                end,
                duration,
            });
        } else {
            i += 1;
        }
    }
    Ok(out)
}

/// Intersects two internally disjoint, ordered span lists; contiguous
/// result segments are merged. Symmetric in its arguments.
pub fn overlaps(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo + TIME_EPS {
            match out.last_mut() {
                Some(last) if (last.1 - lo).abs() <= TIME_EPS => last.1 = hi,
                _ => out.push((lo, hi)),
            }
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// A labeled unit on a speaker's timeline, input to
/// [`transfer_offsets`].
#[derive(Debug, Clone)]
pub struct LabeledSpan {
    pub start: f64,
    pub end: f64,
    pub label: LabelExpr,
}

const TURN_YIELDING_IPU: &[&str] = &["change", "question", "trail-off", "self-interruption"];

/// Extracts turn-transition offsets from two speakers' labeled units.
///
/// A transition is a unit with a turn-yielding label part followed — after
/// skipping hearer response tokens — by the other speaker's speech. The
/// offset is that unit's end to the next unit's start; negative values are
/// overlaps.
pub fn transfer_offsets(
    speaker_a: &str,
    spans_a: &[LabeledSpan],
    speaker_b: &str,
    spans_b: &[LabeledSpan],
) -> Vec<TransitionOffset> {
    let mut merged: Vec<(&str, &LabeledSpan)> = spans_a
        .iter()
        .map(|s| (speaker_a, s))
        .chain(spans_b.iter().map(|s| (speaker_b, s)))
        .collect();
    merged.sort_by(|(sa, a), (sb, b)| {
        a.start
            .partial_cmp(&b.start)
            .unwrap()
            .then_with(|| sa.cmp(sb))
    });

    let mut out = Vec::new();
    for (idx, (speaker, span)) in merged.iter().enumerate() {
        let yields = span
            .label
            .parts()
            .iter()
            .any(|p| TURN_YIELDING_IPU.contains(&p.as_str()));
        if !yields {
            continue;
        }
        for (next_speaker, next) in merged.iter().skip(idx + 1) {
            if next.label.is_only("hrt") {
                continue;
            }
            if next_speaker != speaker {
                out.push(TransitionOffset {
                    from_speaker: speaker.to_string(),
                    to_speaker: next_speaker.to_string(),
                    from_end: span.end,
                    to_start: next.start,
                    offset: next.start - span.end,
                });
            }
            break;
        }
    }
    out
}
