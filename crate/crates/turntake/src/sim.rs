//! Deterministic synthetic conversations for testing pipelines.
//!
//! The generator builds a two-speaker conversation that is label-consistent
//! by construction: every hold is followed by the same speaker, every
//! change by the other, questions get answers, units are separated by
//! silences at or above the threshold, and PCOMP edges sit on word
//! boundaries. Linting a simulated conversation yields no diagnostics,
//! which makes it a sound baseline for violation-injection tests.
//!
//! All times live on a 1 ms grid; the same seed always yields the same
//! conversation.

use crate::conversation::{Conversation, SpeakerTiers};
use crate::textgrid::{TextGrid, Tier};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Generator parameters. Durations are milliseconds on the internal grid.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub seed: u64,
    pub duration_s: f64,
    pub speaker_a: String,
    pub speaker_b: String,
    /// Also produce PCOMP tiers.
    pub with_pcomp: bool,
    /// Probability that a turn-final unit is a question.
    pub question_rate: f64,
    /// Probability that the listener inserts an hrt into a turn-internal
    /// pause.
    pub hrt_rate: f64,
    /// Probability of marking a label uncertain.
    pub uncertainty_rate: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            seed: 1,
            duration_s: 300.0,
            speaker_a: "A".into(),
            speaker_b: "B".into(),
            with_pcomp: true,
            question_rate: 0.2,
            hrt_rate: 0.3,
            uncertainty_rate: 0.02,
        }
    }
}

type SpanMs = (u64, u64, String);

#[derive(Default)]
struct SpeakerDraft {
    words: Vec<SpanMs>,
    ipus: Vec<SpanMs>,
    pcomps: Vec<SpanMs>,
}

struct WordRun {
    start: u64,
    end: u64,
    /// Word spans only (breaths excluded), for PCOMP boundaries.
    word_spans: Vec<(u64, u64)>,
}

const VOCAB: &[&str] = &[
    "ja", "na", "eben", "genau", "dann", "also", "heute", "morgen", "gestern", "wirklich",
    "vielleicht", "immer", "wieder", "gut", "schon", "noch", "eh", "halt", "so", "was",
];

fn ms(t: u64) -> f64 {
    t as f64 / 1000.0
}

/// Generates one conversation.
pub fn simulate_conversation(config: &SimConfig) -> Conversation {
    let mut rng = StdRng::seed_from_u64(config.seed);
    let end_ms = (config.duration_s * 1000.0) as u64;
    let mut drafts = [SpeakerDraft::default(), SpeakerDraft::default()];
    let mut current = 0usize;
    // Leave room so the final turn never runs past the domain.
    let mut t = rng.gen_range(200..800);

    while t + 12_000 < end_ms {
        let n_units = rng.gen_range(1..=4);
        for unit_index in 0..n_units {
            let is_final = unit_index == n_units - 1;
            let run = emit_word_run(&mut rng, &mut drafts[current], t);
            let label = unit_label(&mut rng, config, is_final);
            drafts[current].ipus.push((run.start, run.end, label.clone()));
            if config.with_pcomp {
                emit_pcomp_spans(&mut rng, config, &mut drafts[current], &run, &label);
            }
            t = run.end;
            if !is_final {
                // Turn-internal pause at or above the threshold, sometimes
                // hosting the listener's hrt.
                let pause = rng.gen_range(300..1400u64);
                if pause >= 700 && rng.gen_bool(config.hrt_rate) {
                    let hrt_len = rng.gen_range(120..280u64);
                    let hrt_start = t + (pause - hrt_len) / 2;
                    let other = 1 - current;
                    let word = VOCAB[rng.gen_range(0..3)].to_string();
                    drafts[other].words.push((hrt_start, hrt_start + hrt_len, word));
                    drafts[other]
                        .ipus
                        .push((hrt_start, hrt_start + hrt_len, "hrt".into()));
                    if config.with_pcomp {
                        drafts[other]
                            .pcomps
                            .push((hrt_start, hrt_start + hrt_len, "hrt".into()));
                    }
                }
                t += pause;
            }
        }
        // Transition gap, then the other speaker takes over.
        t += rng.gen_range(150..900u64);
        current = 1 - current;
    }

    let [draft_a, draft_b] = drafts;
    let a = finish_speaker(&config.speaker_a, draft_a, end_ms, config.with_pcomp);
    let b = finish_speaker(&config.speaker_b, draft_b, end_ms, config.with_pcomp);
    let id = format!("{}{}", config.speaker_a, config.speaker_b);
    Conversation::new(id, a, b).expect("simulated tiers share one domain")
}

fn unit_label(rng: &mut StdRng, config: &SimConfig, is_final: bool) -> String {
    let mut label = if is_final {
        if rng.gen_bool(config.question_rate) {
            "question".to_string()
        } else {
            match rng.gen_range(0..10) {
                0 => "trail-off".to_string(),
                1 => "self-interruption".to_string(),
                _ => "change".to_string(),
            }
        }
    } else if rng.gen_bool(0.35) {
        "incomplete-hold".to_string()
    } else {
        "hold".to_string()
    };
    if rng.gen_bool(config.uncertainty_rate) {
        label.push('@');
    }
    label
}

/// Emits one unit's words onto the word track: words with sub-threshold
/// internal silences and the occasional breath sitting flush between two
/// words.
fn emit_word_run(rng: &mut StdRng, draft: &mut SpeakerDraft, start: u64) -> WordRun {
    let n_words = rng.gen_range(2..=6);
    let mut word_spans = Vec::with_capacity(n_words);
    let mut t = start;
    for i in 0..n_words {
        if i > 0 {
            if rng.gen_bool(0.12) {
                // Breath flush against both neighbouring words.
                let len = rng.gen_range(150..350u64);
                draft.words.push((t, t + len, "<breath>".into()));
                t += len;
            } else if rng.gen_bool(0.5) {
                // Silence strictly under the 150 ms threshold.
                t += rng.gen_range(20..130u64);
            }
        }
        let len = rng.gen_range(180..700u64);
        let word = VOCAB[rng.gen_range(0..VOCAB.len())];
        draft.words.push((t, t + len, word.to_string()));
        word_spans.push((t, t + len));
        t += len;
    }
    WordRun {
        start,
        end: t,
        word_spans,
    }
}

/// Splits one unit's words into PCOMP spans at word boundaries. Spans are
/// contiguous inside the unit, so internal silences sit inside the next
/// span. The last span carries the turn-taking outcome.
fn emit_pcomp_spans(
    rng: &mut StdRng,
    config: &SimConfig,
    draft: &mut SpeakerDraft,
    run: &WordRun,
    ipu_label: &str,
) {
    let base = ipu_label.trim_end_matches('@');
    if base == "hrt" {
        draft.pcomps.push((run.start, run.end, "hrt".into()));
        return;
    }
    let final_label = match base {
        "change" => "change",
        "question" => "question",
        "trail-off" | "self-interruption" => "incomplete",
        // hold / incomplete-hold: unit-final span still keeps the turn.
        _ => "hold",
    };
    let n_words = run.word_spans.len();
    let n_spans = rng.gen_range(1..=3.min(n_words));
    // Choose split points between words.
    let mut cuts: Vec<usize> = (1..n_words).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.gen_range(0..=i));
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(n_spans - 1).collect();
    cuts.sort_unstable();
    cuts.push(n_words);

    let mut span_start = run.start;
    let mut prev_cut = 0;
    for (k, &cut) in cuts.iter().enumerate() {
        let span_end = run.word_spans[cut - 1].1;
        let is_last = k == cuts.len() - 1;
        let mut label = if is_last {
            final_label.to_string()
        } else if prev_cut == 0 && cut == 1 && rng.gen_bool(0.3) {
            // Short turn-initial particle or hesitation keeps the turn.
            if rng.gen_bool(0.5) { "part".into() } else { "hes".into() }
        } else if rng.gen_bool(0.4) {
            "cont".to_string()
        } else {
            "hold".to_string()
        };
        if rng.gen_bool(config.uncertainty_rate) {
            label.push('@');
        }
        draft.pcomps.push((span_start, span_end, label));
        span_start = span_end;
        prev_cut = cut;
    }
}

fn finish_speaker(id: &str, mut draft: SpeakerDraft, end_ms: u64, with_pcomp: bool) -> SpeakerTiers {
    draft.words.sort_by_key(|s| s.0);
    draft.ipus.sort_by_key(|s| s.0);
    draft.pcomps.sort_by_key(|s| s.0);
    let to_tier = |name: String, spans: &[SpanMs]| {
        let borrowed: Vec<(f64, f64, &str)> = spans
            .iter()
            .map(|(s, e, text)| (ms(*s), ms(*e), text.as_str()))
            .collect();
        Tier::from_spans(name, 0.0, ms(end_ms), &borrowed).expect("simulated spans are ordered")
    };
    SpeakerTiers {
        id: id.to_string(),
        words: to_tier(format!("ortho-{id}"), &draft.words),
        ipu: to_tier(format!("IPU-{id}"), &draft.ipus),
        pcomp: with_pcomp.then(|| to_tier(format!("PCOMP-{id}"), &draft.pcomps)),
    }
}

/// Bundles a conversation into the six-tier grid layout: word, IPU and
/// PCOMP tier per speaker, first speaker's rows first.
pub fn conversation_to_textgrid(conv: &Conversation) -> TextGrid {
    let mut tiers = Vec::with_capacity(6);
    for speaker in conv.speakers() {
        tiers.push(speaker.words.clone());
        tiers.push(speaker.ipu.clone());
        if let Some(pcomp) = &speaker.pcomp {
            tiers.push(pcomp.clone());
        }
    }
    TextGrid::new(conv.xmin, conv.xmax, tiers).expect("conversation tiers share one domain")
}
