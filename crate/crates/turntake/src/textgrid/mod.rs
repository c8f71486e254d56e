//! Reading and writing Praat TextGrid files (interval tiers).
//!
//! Supports the long and short text forms in UTF-8 (with or without a
//! byte-order mark) and UTF-16 (detected by byte-order mark). Output is
//! always UTF-8 without a byte-order mark. Point (TextTier) tiers and the
//! binary format are not supported.

mod parse;
mod write;

pub use parse::parse_textgrid;
pub use write::serialize_textgrid;

use thiserror::Error;

/// Tolerance used for all time comparisons on parsed values.
///
/// Praat files carry times with up to ~17 digits; exact equality on
/// text-parsed floats is brittle, so boundary checks allow this slack.
pub const TIME_EPS: f64 = 1e-9;

/// Text form of a serialized TextGrid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridForm {
    /// Praat's verbose layout with `key = value` lines and item lists.
    Long,
    /// Praat's compact layout with bare values, one per line.
    Short,
}

#[derive(Debug, Error)]
pub enum TextGridError {
    #[error("undecodable bytes: {0}")]
    Decode(String),
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: tier {tier_index} is a point tier (TextTier); only interval tiers are supported")]
    PointTier { line: usize, tier_index: usize },
    #[error("line {line}: tier {tier_index} has unsupported class {class:?}")]
    UnsupportedTierClass {
        line: usize,
        tier_index: usize,
        class: String,
    },
    #[error("line {line}: tier {tier_index} ({name:?}): {msg}")]
    BadTier {
        line: usize,
        tier_index: usize,
        name: String,
        msg: String,
    },
    #[error("invalid grid: {0}")]
    Invariant(String),
    #[error("no tier matches pattern {0:?}")]
    NoTierMatch(String),
    #[error("pattern {pattern:?} matches more than one tier: {names:?}")]
    AmbiguousTier { pattern: String, names: Vec<String> },
}

/// One time-aligned annotation: a span with its exact, unmodified text.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    pub xmin: f64,
    pub xmax: f64,
    pub text: String,
}

impl Interval {
    pub fn new(xmin: f64, xmax: f64, text: impl Into<String>) -> Self {
        Interval {
            xmin,
            xmax,
            text: text.into(),
        }
    }

    pub fn duration(&self) -> f64 {
        self.xmax - self.xmin
    }
}

/// An ordered, contiguous sequence of intervals covering a time domain.
///
/// A well-formed tier tiles `[xmin, xmax]` completely: intervals are sorted,
/// non-overlapping and each interval's end equals the next one's start.
/// Empty-text intervals are retained; they encode silences and pauses.
#[derive(Debug, Clone, PartialEq)]
pub struct Tier {
    pub name: String,
    pub xmin: f64,
    pub xmax: f64,
    pub intervals: Vec<Interval>,
}

impl Tier {
    /// Builds a tier from intervals that already tile the domain.
    pub fn new(
        name: impl Into<String>,
        xmin: f64,
        xmax: f64,
        intervals: Vec<Interval>,
    ) -> Result<Self, TextGridError> {
        let tier = Tier {
            name: name.into(),
            xmin,
            xmax,
            intervals,
        };
        tier.validate()?;
        Ok(tier)
    }

    /// Builds a tier from labeled spans, filling the gaps between them (and
    /// at the domain edges) with empty-text intervals.
    ///
    /// Spans must be sorted, non-overlapping and inside `[xmin, xmax]`.
    pub fn from_spans(
        name: impl Into<String>,
        xmin: f64,
        xmax: f64,
        spans: &[(f64, f64, &str)],
    ) -> Result<Self, TextGridError> {
        let mut intervals = Vec::with_capacity(spans.len() * 2 + 1);
        let mut cursor = xmin;
        for &(start, end, text) in spans {
            if start < cursor - TIME_EPS {
                return Err(TextGridError::Invariant(format!(
                    "span starting at {start} overlaps previous material ending at {cursor}"
                )));
            }
            if start > cursor + TIME_EPS {
                intervals.push(Interval::new(cursor, start, ""));
            }
            intervals.push(Interval::new(start, end, text));
            cursor = end;
        }
        if cursor < xmax - TIME_EPS {
            intervals.push(Interval::new(cursor, xmax, ""));
        }
        if intervals.is_empty() {
            intervals.push(Interval::new(xmin, xmax, ""));
        }
        Tier::new(name, xmin, xmax, intervals)
    }

    fn validate(&self) -> Result<(), TextGridError> {
        let err = |msg: String| {
            Err(TextGridError::Invariant(format!(
                "tier {:?}: {msg}",
                self.name
            )))
        };
        if !(self.xmin < self.xmax) {
            return err(format!("domain [{}, {}] is empty", self.xmin, self.xmax));
        }
        if self.intervals.is_empty() {
            return err("tier has no intervals".into());
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if !(iv.xmin < iv.xmax) {
                return err(format!(
                    "interval {} has non-positive duration [{}, {}]",
                    i + 1,
                    iv.xmin,
                    iv.xmax
                ));
            }
        }
        let first = &self.intervals[0];
        let last = self.intervals.last().unwrap();
        if (first.xmin - self.xmin).abs() > TIME_EPS || (last.xmax - self.xmax).abs() > TIME_EPS {
            return err(format!(
                "intervals cover [{}, {}] but the tier domain is [{}, {}]",
                first.xmin, last.xmax, self.xmin, self.xmax
            ));
        }
        for (i, pair) in self.intervals.windows(2).enumerate() {
            let gap = pair[1].xmin - pair[0].xmax;
            if gap.abs() > TIME_EPS {
                let what = if gap > 0.0 { "gap" } else { "overlap" };
                return err(format!(
                    "{what} of {} s between intervals {} and {}",
                    gap.abs(),
                    i + 1,
                    i + 2
                ));
            }
        }
        Ok(())
    }

    pub fn duration(&self) -> f64 {
        self.xmax - self.xmin
    }

    /// Structural equality with time tolerance; texts and names are exact.
    pub fn approx_eq(&self, other: &Tier, eps: f64) -> bool {
        self.name == other.name
            && (self.xmin - other.xmin).abs() <= eps
            && (self.xmax - other.xmax).abs() <= eps
            && self.intervals.len() == other.intervals.len()
            && self
                .intervals
                .iter()
                .zip(&other.intervals)
                .all(|(a, b)| {
                    (a.xmin - b.xmin).abs() <= eps
                        && (a.xmax - b.xmax).abs() <= eps
                        && a.text == b.text
                })
    }
}

/// A full annotation file: several tiers over one shared time domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TextGrid {
    pub xmin: f64,
    pub xmax: f64,
    pub tiers: Vec<Tier>,
}

/// How [`extract_tier`] matches tier names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TierMatch {
    /// The pattern must equal the tier name.
    #[default]
    Exact,
    /// The pattern must be a suffix of the tier name.
    Suffix,
}

impl TextGrid {
    pub fn new(xmin: f64, xmax: f64, tiers: Vec<Tier>) -> Result<Self, TextGridError> {
        let grid = TextGrid { xmin, xmax, tiers };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<(), TextGridError> {
        if !(self.xmin < self.xmax) {
            return Err(TextGridError::Invariant(format!(
                "grid domain [{}, {}] is empty",
                self.xmin, self.xmax
            )));
        }
        for tier in &self.tiers {
            tier.validate()?;
            if (tier.xmin - self.xmin).abs() > TIME_EPS || (tier.xmax - self.xmax).abs() > TIME_EPS
            {
                return Err(TextGridError::Invariant(format!(
                    "tier {:?} domain [{}, {}] does not match grid domain [{}, {}]",
                    tier.name, tier.xmin, tier.xmax, self.xmin, self.xmax
                )));
            }
        }
        Ok(())
    }

    pub fn approx_eq(&self, other: &TextGrid, eps: f64) -> bool {
        (self.xmin - other.xmin).abs() <= eps
            && (self.xmax - other.xmax).abs() <= eps
            && self.tiers.len() == other.tiers.len()
            && self
                .tiers
                .iter()
                .zip(&other.tiers)
                .all(|(a, b)| a.approx_eq(b, eps))
    }

    pub fn tier_names(&self) -> Vec<&str> {
        self.tiers.iter().map(|t| t.name.as_str()).collect()
    }
}

/// Returns the single tier whose name matches `pattern`.
///
/// Zero matches and multiple matches are both errors; the ambiguity error
/// lists every matching name.
pub fn extract_tier<'g>(
    grid: &'g TextGrid,
    pattern: &str,
    mode: TierMatch,
) -> Result<&'g Tier, TextGridError> {
    let matches: Vec<&Tier> = grid
        .tiers
        .iter()
        .filter(|t| match mode {
            TierMatch::Exact => t.name == pattern,
            TierMatch::Suffix => t.name.ends_with(pattern),
        })
        .collect();
    match matches.len() {
        0 => Err(TextGridError::NoTierMatch(pattern.to_string())),
        1 => Ok(matches[0]),
        _ => Err(TextGridError::AmbiguousTier {
            pattern: pattern.to_string(),
            names: matches.iter().map(|t| t.name.clone()).collect(),
        }),
    }
}

/// Renders a time for file output: shortest decimal text that parses back
/// to the same value, capped at 16 significant digits with trailing zeros
/// trimmed.
pub(crate) fn fmt_seconds(t: f64) -> String {
    let shortest = format!("{t}");
    if count_significant_digits(&shortest) <= 16 {
        return shortest;
    }
    // Round to 16 significant digits and rewrite in plain decimal notation.
    let sci = format!("{t:.15e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    // One digit before the point in the mantissa, so the decimal point of
    // the plain form sits `exp + 1` digits in.
    let point = exp + 1;
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..-point {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
        if out.ends_with('.') {
            out.pop();
        }
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        let frac = digits[point as usize..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
    }
    if out.is_empty() || out == "-" {
        out.push('0');
    }
    out
}

fn count_significant_digits(s: &str) -> usize {
    s.chars()
        .skip_while(|c| !c.is_ascii_digit() || *c == '0')
        .filter(|c| c.is_ascii_digit())
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_seconds_plain_values() {
        assert_eq!(fmt_seconds(0.0), "0");
        assert_eq!(fmt_seconds(1.5), "1.5");
        assert_eq!(fmt_seconds(0.15), "0.15");
        assert_eq!(fmt_seconds(120.0), "120");
        assert_eq!(fmt_seconds(0.001), "0.001");
    }

    #[test]
    fn fmt_seconds_caps_at_16_digits_and_reparses_stably() {
        let awkward = 0.1 + 0.2; // shortest repr needs 17 digits
        let s = fmt_seconds(awkward);
        assert!(count_significant_digits(&s) <= 16, "{s}");
        let reparsed: f64 = s.parse().unwrap();
        assert_eq!(fmt_seconds(reparsed), s);
    }

    #[test]
    fn fmt_seconds_small_magnitudes() {
        let t = 1.2345678901234567e-4;
        let s = fmt_seconds(t);
        let reparsed: f64 = s.parse().unwrap();
        assert_eq!(fmt_seconds(reparsed), s);
        assert!((reparsed - t).abs() < 1e-18);
    }

    #[test]
    fn tier_from_spans_fills_gaps() {
        let tier =
            Tier::from_spans("w", 0.0, 2.0, &[(0.2, 0.5, "a"), (0.9, 1.4, "b")]).unwrap();
        let texts: Vec<&str> = tier.intervals.iter().map(|i| i.text.as_str()).collect();
        assert_eq!(texts, ["", "a", "", "b", ""]);
        assert_eq!(tier.intervals.len(), 5);
    }

    #[test]
    fn tier_rejects_overlap_and_gap() {
        let e = Tier::new(
            "t",
            0.0,
            2.0,
            vec![Interval::new(0.0, 1.2, "a"), Interval::new(1.0, 2.0, "b")],
        )
        .unwrap_err();
        assert!(e.to_string().contains("overlap"), "{e}");
        let e = Tier::new(
            "t",
            0.0,
            2.0,
            vec![Interval::new(0.0, 0.8, "a"), Interval::new(1.0, 2.0, "b")],
        )
        .unwrap_err();
        assert!(e.to_string().contains("gap"), "{e}");
    }

    #[test]
    fn extract_tier_modes_and_errors() {
        let grid = TextGrid::new(
            0.0,
            1.0,
            vec![
                Tier::new("words-003M", 0.0, 1.0, vec![Interval::new(0.0, 1.0, "")]).unwrap(),
                Tier::new("IPU-003M", 0.0, 1.0, vec![Interval::new(0.0, 1.0, "")]).unwrap(),
                Tier::new("IPU-023F", 0.0, 1.0, vec![Interval::new(0.0, 1.0, "")]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(
            extract_tier(&grid, "IPU-003M", TierMatch::Exact).unwrap().name,
            "IPU-003M"
        );
        assert_eq!(
            extract_tier(&grid, "-023F", TierMatch::Suffix).unwrap().name,
            "IPU-023F"
        );
        assert!(matches!(
            extract_tier(&grid, "PCOMP-003M", TierMatch::Exact),
            Err(TextGridError::NoTierMatch(_))
        ));
        match extract_tier(&grid, "-003M", TierMatch::Suffix) {
            Err(TextGridError::AmbiguousTier { names, .. }) => {
                assert_eq!(names, ["words-003M", "IPU-003M"]);
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }
}
