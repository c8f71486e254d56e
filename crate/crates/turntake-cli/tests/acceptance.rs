//! Acceptance suite: one test per criterion, each printing a PASS line
//! with the measured values (run with `-- --nocapture` to see them all).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;
use turntake::agreement::{
    agreement_report, cohen_kappa, fleiss_kappa, partial_agreement, ConfusionMatrix,
    ReportOptions,
};
use turntake::conversation::{Conversation, LabeledInterval, SpeakerTiers};
use turntake::dynamics::{build_tracks, render_svg, Palette};
use turntake::lint::{lint_conversation, LintOptions, Severity};
use turntake::schema::{normalize_for_dynamics, DynamicsCategory, Inventory, Layer, MacroScheme};
use turntake::segment::{propose_ipus, TokenClassifier};
use turntake::sim::{conversation_to_textgrid, simulate_conversation, SimConfig};
use turntake::stats::{label_distribution, turn_structure, CountMode};
use turntake::textgrid::{
    parse_textgrid, serialize_textgrid, GridForm, Interval, TextGrid, Tier,
};
use turntake::{parse_label, TIME_EPS};

// ── reference count tables ──────────────────────────────────────────────
// Single-label distributions per speaker that the stats pipeline must
// reproduce cell by cell. IPU columns: hold, incomplete-hold, change,
// question, trail-off, self-interruption, hrt.

const IPU_REFERENCE: &[(&str, [u64; 7])] = &[
    ("001M", [19, 7, 25, 3, 0, 4, 32]),
    ("002M", [13, 2, 26, 5, 0, 0, 30]),
    ("003M", [18, 17, 17, 2, 1, 1, 8]),
    ("023F", [11, 4, 9, 12, 0, 0, 5]),
    ("004M", [19, 6, 24, 4, 0, 2, 9]),
    ("024F", [10, 14, 18, 8, 1, 1, 15]),
    ("006M", [42, 13, 25, 9, 2, 0, 13]),
    ("007M", [30, 9, 24, 12, 0, 2, 28]),
    ("009M", [11, 9, 16, 1, 1, 5, 7]),
    ("010M", [3, 0, 15, 6, 0, 5, 20]),
    ("013M", [10, 5, 8, 8, 1, 3, 52]),
    ("014M", [28, 9, 12, 1, 0, 2, 19]),
    ("015M", [17, 8, 29, 0, 2, 9, 8]),
    ("017M", [2, 2, 8, 29, 1, 1, 22]),
    ("021F", [5, 3, 6, 1, 2, 0, 38]),
    ("022F", [5, 8, 5, 1, 0, 2, 20]),
    ("005M", [31, 36, 21, 14, 2, 11, 42]),
    ("025F", [35, 19, 38, 9, 1, 2, 26]),
    ("026F", [3, 3, 7, 3, 3, 0, 62]),
    ("027F", [35, 19, 4, 1, 2, 6, 14]),
    ("008M", [40, 23, 35, 16, 1, 3, 9]),
    ("028F", [23, 18, 38, 6, 10, 5, 11]),
    ("029F", [7, 3, 17, 3, 1, 0, 18]),
    ("030F", [47, 41, 14, 2, 4, 1, 8]),
    ("011M", [7, 12, 11, 2, 1, 0, 6]),
    ("031F", [10, 3, 10, 6, 2, 3, 38]),
    ("012M", [13, 9, 18, 1, 1, 0, 18]),
    ("032F", [14, 12, 7, 7, 0, 2, 7]),
    ("038F", [8, 17, 10, 0, 3, 1, 3]),
    ("039F", [7, 3, 4, 6, 1, 3, 53]),
];

// PCOMP columns: hold, cont, change, part, q-part, question, hes, hrt,
// disruption, incomplete.
const PCOMP_REFERENCE: &[(&str, [u64; 10])] = &[
    ("001M", [39, 5, 20, 14, 4, 3, 1, 39, 7, 5]),
    ("002M", [37, 4, 26, 16, 1, 6, 2, 44, 6, 1]),
    ("003M", [37, 17, 17, 3, 1, 2, 3, 7, 10, 0]),
    ("023F", [30, 8, 9, 4, 1, 12, 0, 5, 2, 0]),
    ("006M", [31, 9, 8, 8, 4, 5, 1, 18, 10, 3]),
    ("007M", [39, 11, 12, 7, 4, 2, 0, 10, 3, 2]),
    ("009M", [41, 8, 12, 15, 3, 5, 0, 23, 9, 5]),
    ("010M", [66, 14, 12, 8, 9, 1, 3, 14, 18, 4]),
    ("013M", [24, 12, 7, 9, 4, 7, 0, 42, 0, 3]),
    ("014M", [59, 23, 15, 11, 1, 0, 1, 22, 2, 5]),
    ("015M", [103, 34, 33, 15, 0, 1, 13, 15, 20, 18]),
    ("017M", [25, 7, 6, 15, 20, 20, 0, 32, 4, 12]),
    ("021F", [29, 14, 13, 7, 0, 2, 0, 42, 5, 5]),
    ("022F", [40, 18, 7, 9, 1, 3, 0, 24, 17, 7]),
    ("005M", [26, 15, 6, 13, 6, 6, 1, 31, 6, 5]),
    ("025F", [38, 19, 10, 6, 1, 4, 1, 15, 2, 2]),
    ("026F", [103, 34, 6, 32, 5, 2, 1, 18, 19, 10]),
    ("027F", [22, 7, 7, 3, 8, 1, 0, 62, 4, 5]),
    ("008M", [31, 8, 16, 11, 1, 9, 2, 4, 4, 0]),
    ("028F", [39, 7, 15, 12, 0, 2, 1, 11, 4, 10]),
    ("029F", [14, 10, 9, 4, 0, 1, 1, 11, 0, 1]),
    ("030F", [53, 24, 9, 5, 1, 2, 0, 7, 9, 1]),
    ("011M", [57, 44, 12, 15, 0, 4, 0, 9, 9, 2]),
    ("031F", [22, 14, 10, 7, 0, 7, 1, 41, 6, 7]),
    ("012M", [35, 19, 20, 17, 4, 0, 0, 21, 7, 2]),
    ("032F", [33, 17, 11, 11, 3, 6, 0, 6, 4, 3]),
    ("038F", [57, 14, 8, 10, 0, 1, 8, 6, 23, 4]),
    ("039F", [17, 3, 2, 6, 2, 5, 0, 52, 3, 2]),
];

const IPU_COLUMNS: [&str; 7] = [
    "hold",
    "incomplete-hold",
    "change",
    "question",
    "trail-off",
    "self-interruption",
    "hrt",
];
const PCOMP_COLUMNS: [&str; 10] = [
    "hold", "cont", "change", "part", "q-part", "question", "hes", "hrt", "disruption",
    "incomplete",
];

fn speaker_pairs() -> Vec<(&'static str, &'static str)> {
    vec![
        ("001M", "002M"),
        ("003M", "023F"),
        ("004M", "024F"),
        ("006M", "007M"),
        ("009M", "010M"),
        ("013M", "014M"),
        ("015M", "017M"),
        ("021F", "022F"),
        ("005M", "025F"),
        ("026F", "027F"),
        ("008M", "028F"),
        ("029F", "030F"),
        ("011M", "031F"),
        ("012M", "032F"),
        ("038F", "039F"),
    ]
}

// ── fixture builders ─────────────────────────────────────────────────────

/// Sequential labeled spans, 1 s long, 1 s apart.
fn sequential_tier(name: String, labels: &[String], end: f64) -> Tier {
    let spans: Vec<(f64, f64, &str)> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (2.0 * i as f64, 2.0 * i as f64 + 1.0, l.as_str()))
        .collect();
    Tier::from_spans(name, 0.0, end, &spans).unwrap()
}

fn labels_from_counts(columns: &[&str], counts: &[u64]) -> Vec<String> {
    columns
        .iter()
        .zip(counts)
        .flat_map(|(label, &n)| std::iter::repeat_n(label.to_string(), n as usize))
        .collect()
}

fn speaker_from_labels(id: &str, ipu: &[String], pcomp: Option<&[String]>, end: f64) -> SpeakerTiers {
    let word_spans: Vec<(f64, f64, &str)> = ipu
        .iter()
        .enumerate()
        .map(|(i, _)| (2.0 * i as f64, 2.0 * i as f64 + 1.0, "w"))
        .collect();
    SpeakerTiers {
        id: id.to_string(),
        words: Tier::from_spans(format!("ortho-{id}"), 0.0, end, &word_spans).unwrap(),
        ipu: sequential_tier(format!("IPU-{id}"), ipu, end),
        pcomp: pcomp.map(|labels| sequential_tier(format!("PCOMP-{id}"), labels, end)),
    }
}

/// Builds the reference corpus: one conversation per speaker pair with the
/// exact single-label multisets on both layers.
fn reference_corpus() -> Vec<Conversation> {
    let ipu_of = |id: &str| -> Vec<String> {
        IPU_REFERENCE
            .iter()
            .find(|(s, _)| *s == id)
            .map(|(_, counts)| labels_from_counts(&IPU_COLUMNS, counts))
            .unwrap_or_default()
    };
    let pcomp_of = |id: &str| -> Option<Vec<String>> {
        PCOMP_REFERENCE
            .iter()
            .find(|(s, _)| *s == id)
            .map(|(_, counts)| labels_from_counts(&PCOMP_COLUMNS, counts))
    };
    speaker_pairs()
        .into_iter()
        .map(|(a, b)| {
            let (ia, ib) = (ipu_of(a), ipu_of(b));
            let (pa, pb) = (pcomp_of(a), pcomp_of(b));
            let longest = [
                ia.len(),
                ib.len(),
                pa.as_ref().map_or(0, |v| v.len()),
                pb.as_ref().map_or(0, |v| v.len()),
            ]
            .into_iter()
            .max()
            .unwrap();
            let end = 2.0 * longest as f64 + 2.0;
            Conversation::new(
                format!("{a}{b}"),
                speaker_from_labels(a, &ia, pa.as_deref(), end),
                speaker_from_labels(b, &ib, pb.as_deref(), end),
            )
            .unwrap()
        })
        .collect()
}

// ── criterion 1: TextGrid round-trip ─────────────────────────────────────

fn random_grid(rng: &mut StdRng) -> TextGrid {
    let n_tiers = rng.gen_range(1..=8);
    let duration_ms: u64 = rng.gen_range(10_000..120_000);
    let pool: Vec<char> = "abcXYZ äöü\"\n<>'_-?!".chars().collect();
    let mut tiers = Vec::with_capacity(n_tiers);
    for t in 0..n_tiers {
        let n_intervals = rng.gen_range(1..=500usize);
        let mut boundaries: Vec<u64> = (0..n_intervals - 1)
            .map(|_| rng.gen_range(1..duration_ms))
            .collect();
        boundaries.push(0);
        boundaries.push(duration_ms);
        boundaries.sort_unstable();
        boundaries.dedup();
        let intervals: Vec<Interval> = boundaries
            .windows(2)
            .map(|w| {
                let text: String = if rng.gen_bool(0.3) {
                    String::new()
                } else {
                    (0..rng.gen_range(1..=12))
                        .map(|_| pool[rng.gen_range(0..pool.len())])
                        .collect()
                };
                Interval::new(w[0] as f64 / 1000.0, w[1] as f64 / 1000.0, text)
            })
            .collect();
        tiers.push(
            Tier::new(
                format!("tier-{t}"),
                0.0,
                duration_ms as f64 / 1000.0,
                intervals,
            )
            .unwrap(),
        );
    }
    TextGrid::new(0.0, duration_ms as f64 / 1000.0, tiers).unwrap()
}

fn transcode(bytes: &[u8], encoding: usize) -> Vec<u8> {
    let text = std::str::from_utf8(bytes).unwrap();
    match encoding {
        0 => bytes.to_vec(),
        1 => {
            let mut out = vec![0xEF, 0xBB, 0xBF];
            out.extend_from_slice(bytes);
            out
        }
        2 => {
            let mut out = vec![0xFF, 0xFE];
            for unit in text.encode_utf16() {
                out.extend_from_slice(&unit.to_le_bytes());
            }
            out
        }
        _ => {
            let mut out = vec![0xFE, 0xFF];
            for unit in text.encode_utf16() {
                out.extend_from_slice(&unit.to_be_bytes());
            }
            out
        }
    }
}

#[test]
fn criterion_textgrid_round_trip() {
    let mut rng = StdRng::seed_from_u64(42);
    let started = Instant::now();
    let n_grids = 200;
    for i in 0..n_grids {
        let grid = random_grid(&mut rng);
        let form = if i % 2 == 0 { GridForm::Long } else { GridForm::Short };
        let first = serialize_textgrid(&grid, form).unwrap();
        let reparsed = parse_textgrid(&transcode(&first, i % 4)).unwrap();
        let second = serialize_textgrid(&reparsed, form).unwrap();
        assert_eq!(first, second, "grid {i}: second pass differs");
        assert!(reparsed.approx_eq(&grid, TIME_EPS), "grid {i}: structure differs");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "round-trip of {n_grids} grids took {elapsed:?}"
    );
    println!(
        "PASS textgrid-round-trip: {n_grids} grids, 4 encodings, both forms, byte-identical second pass in {elapsed:?}"
    );
}

// ── criterion 2: IPU threshold ───────────────────────────────────────────

#[test]
fn criterion_ipu_threshold() {
    let classifier = TokenClassifier::default();
    // Two words around a silence of exactly 149 / 150 / 151 ms.
    let count_for = |silence_ms: u64| -> usize {
        let gap = silence_ms as f64 / 1000.0;
        let tier = Tier::from_spans(
            "words-A",
            0.0,
            3.0,
            &[(0.5, 1.0, "a"), (1.0 + gap, 1.8 + gap, "b")],
        )
        .unwrap();
        propose_ipus(&tier, &classifier, 0.150).unwrap().len()
    };
    assert_eq!(count_for(149), 1, "149 ms must merge");
    assert_eq!(count_for(150), 2, "exactly 150 ms must split");
    assert_eq!(count_for(151), 2, "151 ms must split");

    // Monotonicity over random tiers.
    let mut rng = StdRng::seed_from_u64(7);
    for case in 0..100 {
        let mut spans: Vec<(f64, f64, String)> = Vec::new();
        let mut t: u64 = rng.gen_range(0..300);
        for _ in 0..rng.gen_range(5..40) {
            let kind = rng.gen_range(0..10);
            let len = rng.gen_range(40..600u64);
            let text = match kind {
                0 => "<breath>".to_string(),
                1 => "<laugh>".to_string(),
                2 | 3 => {
                    t += len;
                    continue; // silence: just advance time
                }
                _ => "w".to_string(),
            };
            spans.push((t as f64 / 1000.0, (t + len) as f64 / 1000.0, text));
            t += len;
        }
        let end = (t + 500) as f64 / 1000.0;
        let borrowed: Vec<(f64, f64, &str)> =
            spans.iter().map(|(s, e, x)| (*s, *e, x.as_str())).collect();
        let tier = Tier::from_spans("words-A", 0.0, end, &borrowed).unwrap();
        let mut previous = usize::MAX;
        for threshold_ms in [50.0, 100.0, 150.0, 300.0] {
            let n = propose_ipus(&tier, &classifier, threshold_ms / 1000.0)
                .unwrap()
                .len();
            assert!(
                n <= previous,
                "case {case}: {threshold_ms} ms produced {n} units after {previous}"
            );
            previous = n;
        }
    }
    println!("PASS ipu-threshold: 149/150/151 ms merge/split/split; monotone over 100 random tiers x 4 thresholds");
}

// ── criterion 3: kappa oracles ───────────────────────────────────────────

fn cohen_oracle(counts: &[Vec<u64>]) -> (f64, f64, f64) {
    let k = counts.len();
    let mut total = 0u64;
    let mut diag = 0u64;
    let mut rows = vec![0u64; k];
    let mut cols = vec![0u64; k];
    for i in 0..k {
        for j in 0..k {
            total += counts[i][j];
            rows[i] += counts[i][j];
            cols[j] += counts[i][j];
            if i == j {
                diag += counts[i][j];
            }
        }
    }
    let n = total as f64;
    let p_o = diag as f64 / n;
    let mut p_e = 0.0;
    for i in 0..k {
        p_e += (rows[i] as f64 / n) * (cols[i] as f64 / n);
    }
    let kappa = if diag == total {
        1.0
    } else {
        (p_o - p_e) / (1.0 - p_e)
    };
    (p_o, p_e, kappa)
}

fn fleiss_oracle(table: &[Vec<usize>], n_categories: usize) -> (f64, f64, f64) {
    let n_items = table.len() as f64;
    let n_raters = table[0].len() as f64;
    let mut p_bar = 0.0;
    let mut totals = vec![0f64; n_categories];
    for row in table {
        let mut counts = vec![0f64; n_categories];
        for &c in row {
            counts[c] += 1.0;
        }
        let mut agree = 0.0;
        for (k, &c) in counts.iter().enumerate() {
            agree += c * (c - 1.0);
            totals[k] += c;
        }
        p_bar += agree / (n_raters * (n_raters - 1.0));
    }
    p_bar /= n_items;
    let mut p_e = 0.0;
    for &t in &totals {
        let p = t / (n_items * n_raters);
        p_e += p * p;
    }
    let kappa = if p_bar == 1.0 { 1.0 } else { (p_bar - p_e) / (1.0 - p_e) };
    (p_bar, p_e, kappa)
}

#[test]
fn criterion_kappa_oracles() {
    let mut rng = StdRng::seed_from_u64(99);
    for case in 0..1000 {
        // Cohen on a random matrix.
        let k = rng.gen_range(2..=6);
        let mut counts = vec![vec![0u64; k]; k];
        for row in counts.iter_mut() {
            for cell in row.iter_mut() {
                *cell = rng.gen_range(0..=20);
            }
        }
        counts[0][0] += 1; // total > 0
        let matrix = ConfusionMatrix {
            categories: (0..k).map(|i| format!("c{i}")).collect(),
            counts: counts.clone(),
        };
        let got = cohen_kappa(&matrix).unwrap();
        let (p_o, p_e, kappa) = cohen_oracle(&counts);
        assert!((got.p_observed - p_o).abs() <= 1e-12, "case {case}");
        assert!((got.p_expected - p_e).abs() <= 1e-12, "case {case}");
        assert!((got.kappa - kappa).abs() <= 1e-12, "case {case}");

        // Fleiss on a random rating table.
        let n_items = rng.gen_range(5..=50);
        let n_raters = rng.gen_range(2..=5);
        let n_categories = rng.gen_range(2..=5);
        let table: Vec<Vec<usize>> = (0..n_items)
            .map(|_| (0..n_raters).map(|_| rng.gen_range(0..n_categories)).collect())
            .collect();
        let ratings: Vec<Vec<String>> = table
            .iter()
            .map(|row| row.iter().map(|c| format!("c{c}")).collect())
            .collect();
        let got = fleiss_kappa(&ratings).unwrap();
        let (p_bar, p_e, kappa) = fleiss_oracle(&table, n_categories);
        assert!((got.p_bar - p_bar).abs() <= 1e-12, "case {case}");
        assert!((got.p_expected - p_e).abs() <= 1e-12, "case {case}");
        if p_e < 1.0 {
            assert!((got.kappa - kappa).abs() <= 1e-12, "case {case}");
        }
    }

    // Perfect agreement is exactly 1.0.
    let diagonal = ConfusionMatrix {
        categories: vec!["a".into(), "b".into()],
        counts: vec![vec![12, 0], vec![0, 30]],
    };
    assert_eq!(cohen_kappa(&diagonal).unwrap().kappa, 1.0);
    let unanimous: Vec<Vec<String>> = (0..40)
        .map(|i| vec![format!("c{}", i % 3); 4])
        .collect();
    assert_eq!(fleiss_kappa(&unanimous).unwrap().kappa, 1.0);

    // Outer-product marginals give |kappa| < 1e-12.
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..50 {
        let k = rng.gen_range(2..=5);
        let r: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
        let c: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=9)).collect();
        let counts: Vec<Vec<u64>> = r
            .iter()
            .map(|&ri| c.iter().map(|&cj| ri * cj).collect())
            .collect();
        let matrix = ConfusionMatrix {
            categories: (0..k).map(|i| format!("c{i}")).collect(),
            counts,
        };
        let got = cohen_kappa(&matrix).unwrap();
        assert!(got.kappa.abs() < 1e-12, "kappa {} not ~0", got.kappa);
    }
    println!("PASS kappa-oracles: 1000 random cases match brute force to 1e-12; perfect = 1.0 exactly; independent marginals < 1e-12");
}

// ── criterion 4: reference count fixtures ────────────────────────────────

#[test]
fn criterion_reference_count_fixtures() {
    let inventory = Inventory::default();
    let corpus = reference_corpus();

    let ipu = label_distribution(&corpus, Layer::Ipu, CountMode::SingleOnly, &inventory);
    assert_eq!(ipu.columns, IPU_COLUMNS);
    for (speaker, expected) in IPU_REFERENCE {
        assert_eq!(ipu.row(speaker).unwrap(), *expected, "IPU row {speaker}");
    }
    assert_eq!(ipu.totals, [523, 334, 501, 178, 43, 74, 641]);
    // Rounded shares of the single-label total.
    let shares = ipu.percentages();
    let share = |name: &str| shares.iter().find(|(c, _)| c == name).unwrap().1;
    assert!((share("hold") - 22.8).abs() < 0.05, "{}", share("hold"));
    assert!((share("hrt") - 27.9).abs() < 0.05, "{}", share("hrt"));

    let pcomp = label_distribution(&corpus, Layer::Pcomp, CountMode::SingleOnly, &inventory);
    assert_eq!(pcomp.columns, PCOMP_COLUMNS);
    for (speaker, expected) in PCOMP_REFERENCE {
        assert_eq!(pcomp.row(speaker).unwrap(), *expected, "PCOMP row {speaker}");
    }
    assert_eq!(pcomp.totals, [1147, 419, 338, 293, 84, 119, 40, 631, 213, 124]);

    let rows = turn_structure(&corpus, &inventory);
    let of = |id: &str| rows.iter().find(|r| r.speaker == id).unwrap();
    assert_eq!(of("015M").ratio_label(), "137:52");
    assert_eq!(of("017M").ratio_label(), "32:38");
    let overall = of("overall");
    assert_eq!(overall.holding, 1147);
    assert_eq!(overall.yielding, 338 + 119 + 124);
    let mean_tcus = overall.mean_tcus_per_turn().unwrap();
    assert!((mean_tcus - 2.97).abs() < 0.01, "mean TCUs {mean_tcus}");

    // Combined-label head counts.
    let combined_labels: Vec<String> = [("change_hold", 48), ("hold_question", 64), ("cont_question", 50)]
        .iter()
        .flat_map(|(l, n)| std::iter::repeat_n(l.to_string(), *n))
        .collect();
    let end = 2.0 * combined_labels.len() as f64 + 2.0;
    let combo_conv = Conversation::new(
        "combo",
        speaker_from_labels("X1", &combined_labels, Some(&combined_labels), end),
        speaker_from_labels("X2", &[], Some(&[]), end),
    )
    .unwrap();
    let combos = label_distribution(
        &[combo_conv],
        Layer::Pcomp,
        CountMode::CombinedOnly,
        &inventory,
    );
    assert_eq!(combos.column_total("change_hold"), Some(48));
    assert_eq!(combos.column_total("hold_question"), Some(64));
    assert_eq!(combos.column_total("cont_question"), Some(50));

    // The same counts survive the full file round trip through the
    // binary's stats command.
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    std::fs::create_dir_all(&corpus_dir).unwrap();
    for conv in &corpus {
        let grid = conversation_to_textgrid(conv);
        let path = corpus_dir.join(format!("{}.TextGrid", conv.id));
        std::fs::write(&path, serialize_textgrid(&grid, GridForm::Long).unwrap()).unwrap();
    }
    let out = dir.path().join("out");
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_turntake"))
        .arg("--out-dir")
        .arg(&out)
        .arg("stats")
        .arg(&corpus_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let csv = std::fs::read_to_string(out.join("corpus_pcomp_distribution-single.csv")).unwrap();
    let total_line = csv.lines().find(|l| l.starts_with("TOTAL,")).unwrap();
    assert_eq!(total_line, "TOTAL,1147,419,338,293,84,119,40,631,213,124");
    let turn_csv = std::fs::read_to_string(out.join("corpus_pcomp_turn-structure.csv")).unwrap();
    assert!(turn_csv.lines().any(|l| l.starts_with("015M,") && l.contains("137:52")));
    assert!(turn_csv.lines().any(|l| l.starts_with("017M,") && l.contains("32:38")));

    println!(
        "PASS reference-count-fixtures: every IPU and PCOMP cell reproduced (in memory and through the stats command); totals hold=523/hrt=641 and hold=1147/incomplete=124; ratios 137:52 and 32:38; mean TCUs {mean_tcus:.4}"
    );
}

// ── criterion 5: agreement narrative fixture ─────────────────────────────

#[test]
fn criterion_agreement_narrative_fixture() {
    // 124 aligned pairs (108 same label, 5 overlapping, 11 disjoint) plus
    // 11 positions where only annotator B set an internal boundary.
    let mut a_labels: Vec<(String, String)> = Vec::new();
    for _ in 0..108 {
        a_labels.push(("hold".into(), "hold".into()));
    }
    for _ in 0..5 {
        a_labels.push(("change_hrt".into(), "change".into()));
    }
    for pair in [
        ("change", "hold"),
        ("change", "hold"),
        ("change", "hold"),
        ("change", "hrt"),
        ("change", "hrt"),
        ("change", "hrt"),
        ("hold", "change"),
        ("hold", "change"),
        ("hold", "question"),
        ("question", "hrt"),
        ("incomplete-hold", "hrt"),
    ] {
        a_labels.push((pair.0.into(), pair.1.into()));
    }
    assert_eq!(a_labels.len(), 124);

    let li = |start: f64, end: f64, label: &str| LabeledInterval {
        start,
        end,
        label: parse_label(Layer::Ipu, label).unwrap(),
        text: label.to_string(),
    };
    let mut tier_a: Vec<LabeledInterval> = Vec::new();
    let mut tier_b: Vec<LabeledInterval> = Vec::new();
    let mut t = 0.0;
    for (la, lb) in &a_labels {
        tier_a.push(li(t, t + 1.0, la));
        tier_b.push(li(t, t + 1.0, lb));
        t += 2.0;
    }
    // Segmentation disagreements: annotator B splits what A kept whole.
    for _ in 0..11 {
        tier_a.push(li(t, t + 1.0, "hold"));
        tier_b.push(li(t, t + 0.5, "hold"));
        tier_b.push(li(t + 0.5, t + 1.0, "incomplete-hold"));
        t += 2.0;
    }
    assert_eq!(tier_a.len(), 135);

    let report = agreement_report(&tier_a, &tier_b, 0.020, &ReportOptions::default());
    assert_eq!(report.n_aligned, 124);
    assert_eq!(report.n_unmatched_a, 11);
    assert_eq!(report.n_unmatched_b, 22);
    let fleiss = report.fleiss.as_ref().unwrap();
    let p_o = 108.0 / 124.0;
    assert!((fleiss.p_bar - p_o).abs() < 1e-12, "P_bar {}", fleiss.p_bar);
    assert_eq!(report.partial.full, 108);
    assert_eq!(report.partial.partial, 5);
    assert_eq!(report.partial.none, 11);

    // Consistency check with a published kappa of 0.84: the implied
    // expected agreement must be reproducible from the exposed terms.
    let implied_p_e = (fleiss.p_bar - 0.84) / (1.0 - 0.84);
    assert!(
        (implied_p_e - 0.194).abs() <= 0.001,
        "implied P_e {implied_p_e}"
    );
    println!(
        "PASS agreement-narrative: 135 vs 124 aligned, 11 unmatched, p_o {p_o:.6}, implied P_e {implied_p_e:.4}"
    );
}

// ── criterion 6: partial-agreement partition ─────────────────────────────

#[test]
fn criterion_partial_agreement_partition() {
    let ipu = |s| parse_label(Layer::Ipu, s).unwrap();
    let pcomp = |s| parse_label(Layer::Pcomp, s).unwrap();
    let pairs = vec![
        (ipu("change_hrt"), ipu("change")),
        (pcomp("hrt"), pcomp("hold_hrt")),
        (pcomp("hold"), pcomp("hold_question")),
        (ipu("hold"), ipu("change")),
    ];
    let breakdown = partial_agreement(&pairs);
    assert_eq!(
        (breakdown.full, breakdown.partial, breakdown.none),
        (0, 3, 1)
    );
    println!("PASS partial-agreement: example pairs partition as partial/partial/partial/none");
}

// ── criterion 7: lint soundness ──────────────────────────────────────────

fn severe_rules(conv: &Conversation) -> Vec<&'static str> {
    lint_conversation(conv, &LintOptions::default())
        .into_iter()
        .filter(|d| d.severity >= Severity::Warning)
        .map(|d| d.rule.id())
        .collect()
}

#[test]
fn criterion_lint_soundness() {
    // Consistent-by-construction corpus yields no errors at all (and no
    // warnings either).
    for seed in 0..50 {
        let conv = simulate_conversation(&SimConfig {
            seed,
            duration_s: 60.0,
            ..SimConfig::default()
        });
        let severe = severe_rules(&conv);
        assert!(severe.is_empty(), "seed {seed}: {severe:?}");
    }

    // Injected violations produce exactly the expected rule id.
    let speaker = |id: &str, end: f64, ipu: &[(f64, f64, &str)], pcomp: &[(f64, f64, &str)]| {
        let words: Vec<(f64, f64, &str)> = ipu.iter().map(|&(s, e, _)| (s, e, "w")).collect();
        SpeakerTiers {
            id: id.into(),
            words: Tier::from_spans(format!("ortho-{id}"), 0.0, end, &words).unwrap(),
            ipu: Tier::from_spans(format!("IPU-{id}"), 0.0, end, ipu).unwrap(),
            pcomp: (!pcomp.is_empty())
                .then(|| Tier::from_spans(format!("PCOMP-{id}"), 0.0, end, pcomp).unwrap()),
        }
    };
    let conv = |a: SpeakerTiers, b: SpeakerTiers| Conversation::new("inj", a, b).unwrap();

    let cases: Vec<(&str, Conversation)> = vec![
        (
            "PCOMP-COLL",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "change")], &[(0.0, 1.0, "coll")]),
                speaker("B", 10.0, &[(2.0, 3.0, "change")], &[(2.0, 3.0, "change")]),
            ),
        ),
        (
            "IPU-R2",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "change"), (2.0, 3.0, "change")], &[]),
                speaker("B", 10.0, &[(4.0, 5.0, "change")], &[]),
            ),
        ),
        (
            "IPU-S1",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "hold"), (1.05, 2.0, "change")], &[]),
                speaker("B", 10.0, &[(3.0, 4.0, "change")], &[]),
            ),
        ),
        (
            "IPU-R1",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "hold")], &[]),
                speaker("B", 10.0, &[(2.0, 3.0, "change")], &[]),
            ),
        ),
        (
            "IPU-R3",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "question"), (2.0, 3.0, "change")], &[]),
                speaker("B", 10.0, &[(4.0, 5.0, "change")], &[]),
            ),
        ),
        (
            "IPU-R4",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "hold"), (5.0, 6.0, "change")], &[]),
                speaker("B", 10.0, &[(1.2, 1.4, "hrt"), (6.5, 7.0, "change")], &[]),
            ),
        ),
        (
            "IPU-LABEL",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "bogus")], &[]),
                speaker("B", 10.0, &[(2.0, 3.0, "change")], &[]),
            ),
        ),
        (
            "PCOMP-R1",
            conv(
                speaker("A", 10.0, &[(0.0, 1.0, "change")], &[(0.0, 1.0, "hold")]),
                speaker("B", 10.0, &[(2.0, 3.0, "change")], &[(2.0, 3.0, "change")]),
            ),
        ),
        (
            "PCOMP-R2",
            conv(
                speaker(
                    "A",
                    10.0,
                    &[(0.0, 1.0, "hold"), (2.0, 3.0, "change")],
                    &[(0.0, 1.0, "change"), (2.0, 3.0, "change")],
                ),
                speaker("B", 10.0, &[(4.0, 5.0, "change")], &[(4.0, 5.0, "change")]),
            ),
        ),
    ];
    for (expected, conv) in &cases {
        let got = severe_rules(conv);
        assert_eq!(got, vec![*expected], "expected only {expected}");
    }

    // The remaining injections need hand-built word tiers.
    let s2 = Conversation::new(
        "inj",
        SpeakerTiers {
            id: "A".into(),
            words: Tier::from_spans("ortho-A", 0.0, 10.0, &[(0.0, 1.0, "w"), (1.3, 2.0, "w")])
                .unwrap(),
            ipu: Tier::from_spans("IPU-A", 0.0, 10.0, &[(0.0, 2.0, "change")]).unwrap(),
            pcomp: None,
        },
        speaker("B", 10.0, &[(3.0, 4.0, "change")], &[]),
    )
    .unwrap();
    assert_eq!(severe_rules(&s2), vec!["IPU-S2"]);

    let s3 = Conversation::new(
        "inj",
        SpeakerTiers {
            id: "A".into(),
            words: Tier::from_spans("ortho-A", 0.0, 10.0, &[(0.0, 1.0, "w")]).unwrap(),
            ipu: Tier::from_spans("IPU-A", 0.0, 10.0, &[(0.0, 0.5, "change")]).unwrap(),
            pcomp: None,
        },
        speaker("B", 10.0, &[(3.0, 4.0, "change")], &[]),
    )
    .unwrap();
    assert_eq!(severe_rules(&s3), vec!["IPU-S3"]);

    let edge = Conversation::new(
        "inj",
        SpeakerTiers {
            id: "A".into(),
            words: Tier::from_spans(
                "ortho-A",
                0.0,
                10.0,
                &[(0.0, 1.0, "w"), (1.0, 1.4, "<breath>"), (1.4, 2.4, "w")],
            )
            .unwrap(),
            ipu: Tier::from_spans("IPU-A", 0.0, 10.0, &[(0.0, 2.4, "change")]).unwrap(),
            pcomp: Some(Tier::from_spans("PCOMP-A", 0.0, 10.0, &[(0.0, 1.2, "change")]).unwrap()),
        },
        speaker("B", 10.0, &[(3.0, 4.0, "change")], &[(3.0, 4.0, "change")]),
    )
    .unwrap();
    assert_eq!(severe_rules(&edge), vec!["PCOMP-EDGE"]);

    println!("PASS lint-soundness: 50 generated conversations lint clean; 12 injected violations map to their rule ids");
}

// ── criterion 8: dynamics determinism ────────────────────────────────────

#[test]
fn criterion_dynamics_determinism() {
    // Question series around 270 s: one speaker asks, the other answers
    // briefly, plus cleaned-label variety.
    let a_units: Vec<(f64, f64, &str)> = vec![
        (230.0, 236.0, "hold@"),
        (238.0, 244.0, "change_question"),
        (252.0, 257.0, "hold_hrt"),
        (270.0, 273.0, "question"),
        (276.0, 279.0, "question"),
        (282.0, 285.0, "question"),
        (288.0, 291.0, "question"),
        (294.0, 297.0, "question"),
    ];
    let b_units: Vec<(f64, f64, &str)> = vec![
        (246.0, 249.0, "hrt"),
        (273.5, 274.5, "change"),
        (279.5, 280.5, "change"),
        (285.5, 286.5, "change"),
        (291.5, 292.5, "change"),
        (297.5, 301.0, "change"),
    ];
    let speaker = |id: &str, units: &[(f64, f64, &str)]| {
        let words: Vec<(f64, f64, &str)> = units.iter().map(|&(s, e, _)| (s, e, "w")).collect();
        SpeakerTiers {
            id: id.into(),
            words: Tier::from_spans(format!("ortho-{id}"), 0.0, 320.0, &words).unwrap(),
            ipu: Tier::from_spans(format!("IPU-{id}"), 0.0, 320.0, units).unwrap(),
            pcomp: None,
        }
    };
    let conv = Conversation::new(
        "008M028F",
        speaker("008M", &a_units),
        speaker("028F", &b_units),
    )
    .unwrap();

    let scheme = MacroScheme::ipu_turn_taking();
    let inventory = Inventory::default();
    let tracks = build_tracks(&conv, Layer::Ipu, &scheme, &inventory, None).unwrap();
    assert_eq!(
        tracks[0].entries.len() + tracks[1].entries.len(),
        a_units.len() + b_units.len(),
        "every labeled interval keeps an entry"
    );

    let palette = Palette::default_for(Layer::Ipu);
    let window = (220.0, 320.0);
    let svg1 = render_svg(&tracks, window, 1000.0, &palette, 10.0).unwrap();
    let svg2 = render_svg(&tracks, window, 1000.0, &palette, 10.0).unwrap();
    assert_eq!(svg1.as_bytes(), svg2.as_bytes(), "rendering must be deterministic");

    // Cleaning rules.
    let norm = |text: &str| {
        normalize_for_dynamics(&parse_label(Layer::Ipu, text).unwrap(), &scheme)
    };
    assert_eq!(norm("hold@"), DynamicsCategory::Name("hold".into()));
    assert_eq!(
        norm("change_question"),
        DynamicsCategory::Name("turn-change".into())
    );
    assert_eq!(norm("hold_hrt"), DynamicsCategory::Residue);
    println!("PASS dynamics-determinism: byte-identical SVG; entries preserved; hold@->hold, change_question->turn-change, hold_hrt->Residue");
}

// ── criterion 9: end-to-end runtime ──────────────────────────────────────

#[test]
fn criterion_end_to_end_runtime() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    std::fs::create_dir_all(&corpus_dir).unwrap();
    let pairs = speaker_pairs();
    let mut total_intervals = 0usize;
    for (i, (a, b)) in pairs.iter().cycle().take(19).enumerate() {
        let conv = simulate_conversation(&SimConfig {
            seed: 100 + i as u64,
            duration_s: 3600.0,
            speaker_a: format!("{a}{i:02}"),
            speaker_b: format!("{b}{i:02}"),
            ..SimConfig::default()
        });
        let grid = conversation_to_textgrid(&conv);
        total_intervals += grid.tiers.iter().map(|t| t.intervals.len()).sum::<usize>();
        let path = corpus_dir.join(format!("conv{i:02}.TextGrid"));
        std::fs::write(&path, serialize_textgrid(&grid, GridForm::Long).unwrap()).unwrap();
    }
    assert!(
        total_intervals / 19 >= 3000,
        "each conversation should carry thousands of intervals, got {} on average",
        total_intervals / 19
    );

    let out = dir.path().join("out");
    let started = Instant::now();
    for args in [
        vec!["validate"],
        vec!["stats"],
        vec!["dynamics", "--layer", "ipu"],
    ] {
        let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_turntake"));
        cmd.arg("--out-dir").arg(&out);
        cmd.args(&args);
        cmd.arg(&corpus_dir);
        let output = cmd.output().unwrap();
        assert_eq!(output.status.code(), Some(0), "{args:?}: {output:?}");
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "validate+stats+dynamics took {elapsed:?}"
    );
    println!(
        "PASS end-to-end-runtime: 19 one-hour conversations ({} intervals) through validate+stats+dynamics in {elapsed:?}",
        total_intervals
    );
}
