//! Conformance checks for labeled IPU and PCOMP tiers.
//!
//! Forward-looking labels make a claim about what happens next in the
//! conversation: a hold claims the same speaker continues, a change claims
//! the other speaker does. The lints replay each conversation and warn
//! where the claim and the timeline disagree. Findings are warnings rather
//! than errors because lapses and complex behaviour legitimately break the
//! simple reading; only unparseable labels are errors.
//!
//! Rule identifiers are stable:
//!
//! | rule | meaning |
//! |------|---------|
//! | IPU-LABEL, PCOMP-LABEL | text on an annotation tier does not parse as a label |
//! | PCOMP-COLL | lone `coll`, which only occurs combined |
//! | IPU-R1 | hold-kind label but the next speech (skipping the other speaker's hrt) is by the other speaker |
//! | IPU-R2 | change-kind label but the next non-hrt speech is by the same speaker |
//! | IPU-R3 | question with no response from the other speaker |
//! | IPU-R4 | hrt followed by silence longer than the lapse threshold |
//! | IPU-S1 | same-speaker units closer than the threshold without the hrt exception |
//! | IPU-S2 | one unit spanning an internal silence at or above the threshold |
//! | IPU-S3 | unit boundary strictly inside a word |
//! | PCOMP-R1 | turn-holding label but the other speaker continues |
//! | PCOMP-R2 | turn-yielding label but the same speaker continues |
//! | PCOMP-EDGE | interval edge not aligned with word material |

use crate::conversation::{labeled_intervals, Conversation, LabeledInterval, SpeakerTiers};
use crate::schema::{Inventory, LabelError, Layer};
use crate::segment::{separator_runs, word_spans, TokenClassifier, DEFAULT_IPU_THRESHOLD_S};
use crate::textgrid::TIME_EPS;
use std::fmt;

/// Diagnostic severity. Uncertain labels downgrade their diagnostics one
/// step, so flagged uncertainty is never punished as hard as a plain
/// violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Info,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Info => write!(f, "info"),
            Severity::Warning => write!(f, "warning"),
            Severity::Error => write!(f, "error"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Rule {
    IpuLabel,
    PcompLabel,
    PcompColl,
    IpuR1,
    IpuR2,
    IpuR3,
    IpuR4,
    IpuS1,
    IpuS2,
    IpuS3,
    PcompR1,
    PcompR2,
    PcompEdge,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::IpuLabel => "IPU-LABEL",
            Rule::PcompLabel => "PCOMP-LABEL",
            Rule::PcompColl => "PCOMP-COLL",
            Rule::IpuR1 => "IPU-R1",
            Rule::IpuR2 => "IPU-R2",
            Rule::IpuR3 => "IPU-R3",
            Rule::IpuR4 => "IPU-R4",
            Rule::IpuS1 => "IPU-S1",
            Rule::IpuS2 => "IPU-S2",
            Rule::IpuS3 => "IPU-S3",
            Rule::PcompR1 => "PCOMP-R1",
            Rule::PcompR2 => "PCOMP-R2",
            Rule::PcompEdge => "PCOMP-EDGE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.id())
    }
}

/// One lint finding: rule, location and the expectation it breaks.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: Rule,
    pub speaker: String,
    pub start: f64,
    pub end: f64,
    pub message: String,
}

/// Tunables shared by the lint passes.
#[derive(Debug, Clone)]
pub struct LintOptions {
    /// Minimum silence between same-speaker units, seconds.
    pub ipu_threshold_s: f64,
    /// Slack for boundary-coincidence checks, seconds.
    pub tolerance_s: f64,
    /// Silence after which turn allocation counts as unclear, seconds.
    pub lapse_s: f64,
    pub classifier: TokenClassifier,
    pub inventory: Inventory,
}

impl Default for LintOptions {
    fn default() -> Self {
        LintOptions {
            ipu_threshold_s: DEFAULT_IPU_THRESHOLD_S,
            tolerance_s: 0.020,
            lapse_s: 2.0,
            classifier: TokenClassifier::default(),
            inventory: Inventory::default(),
        }
    }
}

fn downgrade(severity: Severity, uncertain: bool) -> Severity {
    if !uncertain {
        return severity;
    }
    match severity {
        Severity::Error => Severity::Warning,
        Severity::Warning | Severity::Info => Severity::Info,
    }
}

/// Binary search over sorted times: is any within `tol` of `t`?
fn near_sorted(sorted: &[f64], t: f64, tol: f64) -> bool {
    let i = sorted.partition_point(|&x| x < t - tol);
    matches!(sorted.get(i), Some(&x) if x <= t + tol)
}

/// The sorted, disjoint span strictly containing `t` beyond `tol` on both
/// sides, if any.
fn containing_span(spans: &[(f64, f64)], t: f64, tol: f64) -> Option<(f64, f64)> {
    let i = spans.partition_point(|&(s, _)| s + tol < t);
    if i == 0 {
        return None;
    }
    let (s, e) = spans[i - 1];
    (t > s + tol && t < e - tol).then_some((s, e))
}

fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        a.start
            .partial_cmp(&b.start)
            .unwrap()
            .then(a.end.partial_cmp(&b.end).unwrap())
            .then_with(|| a.speaker.cmp(&b.speaker))
            .then_with(|| a.rule.cmp(&b.rule))
    });
}

/// Runs every lint pass over a conversation. Label-parse errors surface
/// in more than one pass and are deduplicated here.
pub fn lint_conversation(conv: &Conversation, options: &LintOptions) -> Vec<Diagnostic> {
    let mut diags = lint_ipu_forward_context(conv, options);
    diags.extend(lint_ipu_segmentation(conv, options));
    diags.extend(lint_pcomp(conv, options));
    sort_diagnostics(&mut diags);
    diags.dedup();
    diags
}

// ── timeline machinery ──────────────────────────────────────────────────

struct Event {
    speaker: String,
    interval: LabeledInterval,
}

/// Both speakers' labeled intervals of one layer, merged by start time.
/// Returns `None` when the layer is missing for either speaker; invalid
/// labels become error diagnostics.
fn merged_timeline(
    conv: &Conversation,
    layer: Layer,
    options: &LintOptions,
    diags: &mut Vec<Diagnostic>,
) -> Option<Vec<Event>> {
    let mut events: Vec<Event> = Vec::new();
    for speaker in conv.speakers() {
        let tier = match layer {
            Layer::Ipu => &speaker.ipu,
            Layer::Pcomp => speaker.pcomp.as_ref()?,
        };
        let (labeled, invalid) = labeled_intervals(tier, layer, &options.inventory);
        for (start, end, text, err) in invalid {
            diags.push(label_error_diagnostic(layer, &speaker.id, start, end, text, err));
        }
        events.extend(labeled.into_iter().map(|interval| Event {
            speaker: speaker.id.clone(),
            interval,
        }));
    }
    events.sort_by(|a, b| {
        a.interval
            .start
            .partial_cmp(&b.interval.start)
            .unwrap()
            .then_with(|| a.speaker.cmp(&b.speaker))
    });
    Some(events)
}

fn label_error_diagnostic(
    layer: Layer,
    speaker: &str,
    start: f64,
    end: f64,
    text: String,
    err: LabelError,
) -> Diagnostic {
    let rule = match (layer, &err) {
        (Layer::Pcomp, LabelError::LoneColl) => Rule::PcompColl,
        (Layer::Pcomp, _) => Rule::PcompLabel,
        (Layer::Ipu, _) => Rule::IpuLabel,
    };
    Diagnostic {
        severity: Severity::Error,
        rule,
        speaker: speaker.to_string(),
        start,
        end,
        message: format!("label {text:?} does not parse: {err}"),
    }
}

/// What the timeline does after one event.
struct ForwardContext<'c> {
    /// Speaker of the next speech, skipping the other speaker's pure-hrt
    /// intervals.
    next_skip_others_hrt: Option<&'c str>,
    /// Speaker of the next speech that is not a pure hrt by anyone.
    next_non_hrt: Option<&'c str>,
    /// The other speaker produced any speech (hrt included) before this
    /// speaker's own next non-hrt interval.
    other_responded: bool,
    /// There is at least one later event on the timeline.
    has_later_events: bool,
    /// Start of the immediately next event, if any.
    next_event_start: Option<f64>,
}

fn forward_context<'c>(events: &'c [Event], idx: usize) -> ForwardContext<'c> {
    let me = events[idx].speaker.as_str();
    let mut next_skip_others_hrt = None;
    let mut next_non_hrt = None;
    let mut other_responded = false;
    let mut own_next_non_hrt_seen = false;
    for event in &events[idx + 1..] {
        let is_hrt = event.interval.label.is_only("hrt");
        if next_skip_others_hrt.is_none() && !(event.speaker != me && is_hrt) {
            next_skip_others_hrt = Some(event.speaker.as_str());
        }
        if next_non_hrt.is_none() && !is_hrt {
            next_non_hrt = Some(event.speaker.as_str());
        }
        if !own_next_non_hrt_seen {
            if event.speaker != me {
                other_responded = true;
            } else if !is_hrt {
                own_next_non_hrt_seen = true;
            }
        }
        if next_skip_others_hrt.is_some() && next_non_hrt.is_some() && own_next_non_hrt_seen {
            break;
        }
    }
    ForwardContext {
        next_skip_others_hrt,
        next_non_hrt,
        other_responded,
        has_later_events: idx + 1 < events.len(),
        next_event_start: events.get(idx + 1).map(|e| e.interval.start),
    }
}

/// Label parts that claim the same speaker continues / the turn passes.
fn part_sides(layer: Layer) -> (&'static [&'static str], &'static [&'static str]) {
    match layer {
        Layer::Ipu => (
            &["hold", "incomplete-hold"],
            &["change", "question", "trail-off", "self-interruption"],
        ),
        // The unmarked PCOMP question is turn-yielding; q-part elicits
        // feedback but keeps the turn.
        Layer::Pcomp => (
            &["hold", "cont", "part", "hes", "q-part"],
            &["change", "question", "incomplete"],
        ),
    }
}

/// Does one label part's claim hold in this context? Parts without a
/// forward claim (hrt, coll, disruption) are always satisfied, which makes
/// them suppress every finding on combined labels.
fn part_satisfied(layer: Layer, part: &str, me: &str, ctx: &ForwardContext) -> bool {
    let (hold_side, change_side) = part_sides(layer);
    if hold_side.contains(&part) {
        return matches!(ctx.next_skip_others_hrt, Some(s) if s == me)
            || ctx.next_skip_others_hrt.is_none();
    }
    if part == "question" && layer == Layer::Ipu {
        return ctx.other_responded || !ctx.has_later_events;
    }
    if change_side.contains(&part) {
        return matches!(ctx.next_non_hrt, Some(s) if s != me) || ctx.next_non_hrt.is_none();
    }
    true
}

fn any_part_satisfied(layer: Layer, event: &Event, ctx: &ForwardContext) -> bool {
    event
        .interval
        .label
        .parts()
        .iter()
        .any(|p| part_satisfied(layer, p, &event.speaker, ctx))
}

fn forward_context_pass(
    layer: Layer,
    events: &[Event],
    lapse_s: f64,
    diags: &mut Vec<Diagnostic>,
) {
    let (hold_side, change_side) = part_sides(layer);
    let (r1, r2) = match layer {
        Layer::Ipu => (Rule::IpuR1, Rule::IpuR2),
        Layer::Pcomp => (Rule::PcompR1, Rule::PcompR2),
    };
    for (idx, event) in events.iter().enumerate() {
        let label = &event.interval.label;
        let ctx = forward_context(events, idx);
        let push = |diags: &mut Vec<Diagnostic>, rule: Rule, message: String| {
            diags.push(Diagnostic {
                severity: downgrade(Severity::Warning, label.is_uncertain()),
                rule,
                speaker: event.speaker.to_string(),
                start: event.interval.start,
                end: event.interval.end,
                message,
            });
        };

        let has_hold = label.parts().iter().any(|p| hold_side.contains(&p.as_str()));
        let has_change = label
            .parts()
            .iter()
            .any(|p| change_side.contains(&p.as_str()));

        if has_hold
            && matches!(ctx.next_skip_others_hrt, Some(s) if s != event.speaker)
            && !any_part_satisfied(layer, event, &ctx)
        {
            push(
                diags,
                r1,
                format!(
                    "{:?} claims the same speaker continues, but the next speech is by the other speaker",
                    event.interval.text
                ),
            );
        }
        let r3_fires = layer == Layer::Ipu
            && label.has_part("question")
            && ctx.has_later_events
            && !ctx.other_responded
            && !any_part_satisfied(layer, event, &ctx);
        // An unanswered question always also reads as a failed turn pass;
        // the more specific finding wins.
        if has_change
            && !r3_fires
            && matches!(ctx.next_non_hrt, Some(s) if s == event.speaker)
            && !any_part_satisfied(layer, event, &ctx)
        {
            push(
                diags,
                r2,
                format!(
                    "{:?} claims the turn passes, but the next non-hrt speech is by the same speaker",
                    event.interval.text
                ),
            );
        }
        if r3_fires {
            push(
                diags,
                Rule::IpuR3,
                format!(
                    "{:?} is not followed by any speech from the other speaker",
                    event.interval.text
                ),
            );
        }
        if layer == Layer::Ipu && label.is_only("hrt") {
            if let Some(next_start) = ctx.next_event_start {
                let gap = next_start - event.interval.end;
                if gap > lapse_s + TIME_EPS {
                    push(
                        diags,
                        Rule::IpuR4,
                        format!(
                            "hrt followed by a {gap:.2} s lapse; turn allocation afterwards may be unclear"
                        ),
                    );
                }
            }
        }
    }
}

/// Checks hold/change/question claims on the IPU layer against what the
/// timeline actually does next (rules IPU-R1..R4).
pub fn lint_ipu_forward_context(conv: &Conversation, options: &LintOptions) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if let Some(events) = merged_timeline(conv, Layer::Ipu, options, &mut diags) {
        forward_context_pass(Layer::Ipu, &events, options.lapse_s, &mut diags);
    }
    sort_diagnostics(&mut diags);
    diags
}

/// Checks IPU boundaries against the word tier and the silence threshold
/// (rules IPU-S1..S3).
pub fn lint_ipu_segmentation(conv: &Conversation, options: &LintOptions) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for speaker in conv.speakers() {
        let (units, invalid) = labeled_intervals(&speaker.ipu, Layer::Ipu, &options.inventory);
        for (start, end, text, err) in invalid {
            diags.push(label_error_diagnostic(Layer::Ipu, &speaker.id, start, end, text, err));
        }
        segmentation_pass(speaker, &units, options, &mut diags);
    }
    sort_diagnostics(&mut diags);
    diags
}

fn segmentation_pass(
    speaker: &SpeakerTiers,
    units: &[LabeledInterval],
    options: &LintOptions,
    diags: &mut Vec<Diagnostic>,
) {
    let threshold = options.ipu_threshold_s;
    let tol = options.tolerance_s;

    // S1: sub-threshold gaps between same-speaker units, hrt excepted.
    for pair in units.windows(2) {
        let gap = pair[1].start - pair[0].end;
        if gap < threshold - TIME_EPS && !pair[1].label.has_part("hrt") {
            diags.push(Diagnostic {
                severity: downgrade(Severity::Warning, pair[1].label.is_uncertain()),
                rule: Rule::IpuS1,
                speaker: speaker.id.clone(),
                start: pair[0].end,
                end: pair[1].start,
                message: format!(
                    "units {:.3} s apart, under the {:.0} ms threshold, and {:?} is not an hrt",
                    gap.max(0.0),
                    threshold * 1000.0,
                    pair[1].text
                ),
            });
        }
    }

    let runs = match separator_runs(&speaker.words, &options.classifier) {
        Ok(runs) => runs,
        Err(e) => {
            diags.push(Diagnostic {
                severity: Severity::Error,
                rule: Rule::IpuS2,
                speaker: speaker.id.clone(),
                start: speaker.words.xmin,
                end: speaker.words.xmax,
                message: e.to_string(),
            });
            return;
        }
    };

    // S2: a unit spanning an internal silence at or above the threshold.
    for unit in units {
        let first = runs.partition_point(|r| r.start < unit.start - TIME_EPS);
        for run in &runs[first..] {
            if run.start > unit.end {
                break;
            }
            if run.end <= unit.end + TIME_EPS && run.effective_silence >= threshold - TIME_EPS {
                diags.push(Diagnostic {
                    severity: downgrade(Severity::Warning, unit.label.is_uncertain()),
                    rule: Rule::IpuS2,
                    speaker: speaker.id.clone(),
                    start: run.start,
                    end: run.end,
                    message: format!(
                        "unit {:?} spans an internal silence of {:.3} s at or above the threshold",
                        unit.text, run.effective_silence
                    ),
                });
            }
        }
    }

    // S3: a unit boundary strictly inside a word.
    let words = match word_spans(&speaker.words, &options.classifier) {
        Ok(w) => w,
        Err(_) => return,
    };
    for unit in units {
        for (which, t) in [("start", unit.start), ("end", unit.end)] {
            if let Some((wmin, wmax)) = containing_span(&words, t, tol) {
                diags.push(Diagnostic {
                    severity: downgrade(Severity::Warning, unit.label.is_uncertain()),
                    rule: Rule::IpuS3,
                    speaker: speaker.id.clone(),
                    start: wmin,
                    end: wmax,
                    message: format!(
                        "unit {which} boundary at {t:.3} s falls inside the word spanning [{wmin:.3}, {wmax:.3}]"
                    ),
                });
            }
        }
    }
}

/// Lints the PCOMP layer: edge placement against the word tier and
/// forward-context claims (rules PCOMP-EDGE, PCOMP-R1, PCOMP-R2).
pub fn lint_pcomp(conv: &Conversation, options: &LintOptions) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let tol = options.tolerance_s;

    for speaker in conv.speakers() {
        let Some(pcomp) = &speaker.pcomp else { continue };
        let (spans, invalid) = labeled_intervals(pcomp, Layer::Pcomp, &options.inventory);
        for (start, end, text, err) in invalid {
            diags.push(label_error_diagnostic(Layer::Pcomp, &speaker.id, start, end, text, err));
        }
        let words = match word_spans(&speaker.words, &options.classifier) {
            Ok(w) => w,
            Err(_) => continue,
        };
        let word_starts: Vec<f64> = words.iter().map(|&(wmin, _)| wmin).collect();
        let mut word_ends: Vec<f64> = words.iter().map(|&(_, wmax)| wmax).collect();
        word_ends.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let near_word_start = |t: f64| near_sorted(&word_starts, t, tol);
        let near_word_end = |t: f64| near_sorted(&word_ends, t, tol);

        for (i, span) in spans.iter().enumerate() {
            let continues_previous = i > 0 && (span.start - spans[i - 1].end).abs() <= tol;
            if !continues_previous && !near_word_start(span.start) {
                diags.push(Diagnostic {
                    severity: downgrade(Severity::Warning, span.label.is_uncertain()),
                    rule: Rule::PcompEdge,
                    speaker: speaker.id.clone(),
                    start: span.start,
                    end: span.end,
                    message: format!(
                        "interval {:?} starts at {:.3} s, {}",
                        span.text,
                        span.start,
                        describe_edge(&speaker.words, &options.classifier, span.start)
                    ),
                });
            }
            if !near_word_end(span.end) {
                diags.push(Diagnostic {
                    severity: downgrade(Severity::Warning, span.label.is_uncertain()),
                    rule: Rule::PcompEdge,
                    speaker: speaker.id.clone(),
                    start: span.start,
                    end: span.end,
                    message: format!(
                        "interval {:?} ends at {:.3} s, {}",
                        span.text,
                        span.end,
                        describe_edge(&speaker.words, &options.classifier, span.end)
                    ),
                });
            }
        }
    }

    if let Some(events) = merged_timeline(conv, Layer::Pcomp, options, &mut Vec::new()) {
        forward_context_pass(Layer::Pcomp, &events, options.lapse_s, &mut diags);
    }
    sort_diagnostics(&mut diags);
    diags
}

fn describe_edge(words: &crate::textgrid::Tier, classifier: &TokenClassifier, t: f64) -> String {
    match crate::segment::class_at(words, classifier, t) {
        Ok(Some(class)) => format!("inside a {class:?} token rather than at a word edge"),
        _ => "not at any word edge".to_string(),
    }
}

// ── cross-layer boundary coincidence ───────────────────────────────────

/// How one boundary on one layer relates to the other layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryPlacement {
    /// Within tolerance of a boundary on the other layer.
    Coincident,
    /// Strictly inside a labeled interval of the other layer.
    Internal,
    /// In unlabeled territory of the other layer.
    Outside,
}

/// Per-speaker classification of IPU end boundaries against PCOMP
/// boundaries and vice versa.
#[derive(Debug, Clone)]
pub struct SpeakerBoundaryReport {
    pub speaker: String,
    /// (time, placement) for each labeled IPU interval's end.
    pub ipu_ends: Vec<(f64, BoundaryPlacement)>,
    /// (time, placement) for each PCOMP boundary (interval starts and
    /// ends, deduplicated).
    pub pcomp_bounds: Vec<(f64, BoundaryPlacement)>,
}

impl SpeakerBoundaryReport {
    pub fn count(&self, of_ipu: bool, placement: BoundaryPlacement) -> usize {
        let list = if of_ipu { &self.ipu_ends } else { &self.pcomp_bounds };
        list.iter().filter(|(_, p)| *p == placement).count()
    }
}

/// Classifies where IPU end boundaries fall relative to PCOMP boundaries
/// (coincident, or inside a PCOMP interval) and where PCOMP boundaries
/// fall relative to IPU boundaries, per speaker.
pub fn cross_layer_report(
    conv: &Conversation,
    options: &LintOptions,
) -> Vec<SpeakerBoundaryReport> {
    let tol = options.tolerance_s;
    let mut out = Vec::new();
    for speaker in conv.speakers() {
        let Some(pcomp) = &speaker.pcomp else { continue };
        let (ipus, _) = labeled_intervals(&speaker.ipu, Layer::Ipu, &options.inventory);
        let (pcomps, _) = labeled_intervals(pcomp, Layer::Pcomp, &options.inventory);

        let bounds = |list: &[LabeledInterval]| -> Vec<f64> {
            let mut ts: Vec<f64> = list.iter().flat_map(|s| [s.start, s.end]).collect();
            ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ts.dedup_by(|a, b| (*a - *b).abs() <= tol);
            ts
        };
        let pcomp_boundary_times = bounds(&pcomps);
        let ipu_boundary_times = bounds(&ipus);

        let classify = |t: f64, boundaries: &[f64], spans: &[(f64, f64)]| {
            if near_sorted(boundaries, t, tol) {
                BoundaryPlacement::Coincident
            } else if containing_span(spans, t, tol).is_some() {
                BoundaryPlacement::Internal
            } else {
                BoundaryPlacement::Outside
            }
        };
        let pcomp_spans: Vec<(f64, f64)> = pcomps.iter().map(|s| (s.start, s.end)).collect();
        let ipu_spans: Vec<(f64, f64)> = ipus.iter().map(|s| (s.start, s.end)).collect();

        let ipu_ends = ipus
            .iter()
            .map(|u| (u.end, classify(u.end, &pcomp_boundary_times, &pcomp_spans)))
            .collect();
        let pcomp_bounds = pcomp_boundary_times
            .iter()
            .map(|&t| (t, classify(t, &ipu_boundary_times, &ipu_spans)))
            .collect();
        out.push(SpeakerBoundaryReport {
            speaker: speaker.id.clone(),
            ipu_ends,
            pcomp_bounds,
        });
    }
    out
}

// ── rendering ───────────────────────────────────────────────────────────

/// Renders diagnostics as `file:start-end:severity:rule:message` lines.
pub fn render_text(file_label: &str, diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        out.push_str(&format!(
            "{file_label}:{:.3}-{:.3}:{}:{}:{} [{}]\n",
            d.start, d.end, d.severity, d.rule, d.message, d.speaker
        ));
    }
    out
}

/// Renders diagnostics as CSV with a header row.
pub fn render_csv(file_label: &str, diags: &[Diagnostic]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["file", "start_s", "end_s", "severity", "rule", "speaker", "message"])
        .expect("in-memory write");
    for d in diags {
        writer
            .write_record([
                file_label,
                &format!("{:.3}", d.start),
                &format!("{:.3}", d.end),
                &d.severity.to_string(),
                d.rule.id(),
                &d.speaker,
                &d.message,
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8")
}
