//! TextGrid text-format reader.
//!
//! One scanner serves both layouts. In the long form every scalar value
//! follows a `=` and decorations like `item [1]:` carry none, so scanning to
//! the next `=` (or `<` for flags) yields exactly the value sequence of the
//! short form. Quoted strings double internal quotes and may span lines.

use super::{Interval, TextGrid, TextGridError, Tier, TIME_EPS};

/// Parses a Praat TextGrid from raw bytes.
///
/// Accepts long or short text form; UTF-8 (optionally with a byte-order
/// mark) or UTF-16 (byte-order mark required). Interval tiers only.
pub fn parse_textgrid(bytes: &[u8]) -> Result<TextGrid, TextGridError> {
    let text = decode(bytes)?;
    let mut scanner = Scanner::new(&text);

    let file_type = scanner.header_value("File type")?;
    if file_type != "ooTextFile" {
        return Err(TextGridError::Header {
            line: scanner.line,
            msg: format!("expected File type \"ooTextFile\", found {file_type:?}"),
        });
    }
    let object_class = scanner.header_value("Object class")?;
    if object_class != "TextGrid" {
        return Err(TextGridError::Header {
            line: scanner.line,
            msg: format!("expected Object class \"TextGrid\", found {object_class:?}"),
        });
    }

    // Everything after the header is value-by-value identical between the
    // two forms once decorations are skipped.
    let long_form = scanner.looks_long_form();
    let xmin = scanner.number(long_form)?;
    let xmax = scanner.number(long_form)?;
    let has_tiers = scanner.flag()?;
    let mut tiers = Vec::new();
    if has_tiers {
        let size = scanner.number(long_form)? as usize;
        for tier_index in 1..=size {
            tiers.push(parse_tier(&mut scanner, long_form, tier_index)?);
        }
    }

    let grid = TextGrid { xmin, xmax, tiers };
    grid.validate()
        .map_err(|e| syntax_at(scanner.line, format!("{e}")))?;
    Ok(grid)
}

fn parse_tier(
    scanner: &mut Scanner,
    long_form: bool,
    tier_index: usize,
) -> Result<Tier, TextGridError> {
    let class = scanner.string(long_form)?;
    let class_line = scanner.line;
    match class.as_str() {
        "IntervalTier" => {}
        "TextTier" => {
            return Err(TextGridError::PointTier {
                line: class_line,
                tier_index,
            })
        }
        other => {
            return Err(TextGridError::UnsupportedTierClass {
                line: class_line,
                tier_index,
                class: other.to_string(),
            })
        }
    }
    let name = scanner.string(long_form)?;
    let xmin = scanner.number(long_form)?;
    let xmax = scanner.number(long_form)?;
    let count = scanner.number(long_form)? as usize;
    let mut intervals = Vec::with_capacity(count);
    for i in 0..count {
        let at = scanner.line;
        let ixmin = scanner.number(long_form)?;
        let ixmax = scanner.number(long_form)?;
        let text = scanner.string(long_form)?;
        if !(ixmin < ixmax) {
            return Err(TextGridError::BadTier {
                line: at,
                tier_index,
                name: name.clone(),
                msg: format!(
                    "interval {} has non-positive duration [{ixmin}, {ixmax}]",
                    i + 1
                ),
            });
        }
        if let Some(prev) = intervals.last() {
            let prev: &Interval = prev;
            let gap = ixmin - prev.xmax;
            if gap.abs() > TIME_EPS {
                let what = if gap > 0.0 {
                    "non-contiguous intervals (gap"
                } else {
                    "overlapping intervals (overlap"
                };
                return Err(TextGridError::BadTier {
                    line: at,
                    tier_index,
                    name: name.clone(),
                    msg: format!("{what} of {} s before interval {})", gap.abs(), i + 1),
                });
            }
        }
        intervals.push(Interval::new(ixmin, ixmax, text));
    }
    Tier::new(name.clone(), xmin, xmax, intervals).map_err(|e| TextGridError::BadTier {
        line: scanner.line,
        tier_index,
        name,
        msg: e.to_string(),
    })
}

fn decode(bytes: &[u8]) -> Result<String, TextGridError> {
    if bytes.starts_with(&[0xFE, 0xFF]) {
        return decode_utf16(&bytes[2..], true);
    }
    if bytes.starts_with(&[0xFF, 0xFE]) {
        return decode_utf16(&bytes[2..], false);
    }
    let body = bytes.strip_prefix(b"\xEF\xBB\xBF".as_slice()).unwrap_or(bytes);
    String::from_utf8(body.to_vec())
        .map_err(|e| TextGridError::Decode(format!("invalid UTF-8: {e}")))
}

fn decode_utf16(bytes: &[u8], big_endian: bool) -> Result<String, TextGridError> {
    if !bytes.len().is_multiple_of(2) {
        return Err(TextGridError::Decode(
            "UTF-16 input has an odd number of bytes".into(),
        ));
    }
    let units: Vec<u16> = bytes
        .chunks_exact(2)
        .map(|c| {
            if big_endian {
                u16::from_be_bytes([c[0], c[1]])
            } else {
                u16::from_le_bytes([c[0], c[1]])
            }
        })
        .collect();
    char::decode_utf16(units)
        .collect::<Result<String, _>>()
        .map_err(|e| TextGridError::Decode(format!("invalid UTF-16: {e}")))
}

fn syntax_at(line: usize, msg: String) -> TextGridError {
    TextGridError::Syntax { line, msg }
}

/// Byte-based scanner. The format's structural characters are all ASCII;
/// multi-byte UTF-8 passes through string contents untouched, and line
/// counting on the newline byte stays correct because UTF-8 continuation
/// bytes never equal it.
struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Self {
        Scanner {
            bytes: text.as_bytes(),
            pos: 0,
            line: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.bytes.get(self.pos).copied();
        if let Some(b) = b {
            self.pos += 1;
            if b == b'\n' {
                self.line += 1;
            }
        }
        b
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.bump();
        }
    }

    /// Reads one of the two fixed `Key = "Value"` header lines.
    fn header_value(&mut self, key: &str) -> Result<String, TextGridError> {
        self.skip_whitespace();
        let at = self.line;
        for expected in key.bytes().filter(|b| !b.is_ascii_whitespace()) {
            self.skip_inline_space();
            match self.bump() {
                Some(b) if b == expected => {}
                other => {
                    return Err(TextGridError::Header {
                        line: at,
                        msg: format!(
                            "expected {key:?}, found {:?}",
                            other.map(|b| (b as char).to_string()).unwrap_or_default()
                        ),
                    })
                }
            }
        }
        self.skip_inline_space();
        if self.bump() != Some(b'=') {
            return Err(TextGridError::Header {
                line: at,
                msg: format!("expected '=' after {key:?}"),
            });
        }
        self.skip_inline_space();
        self.quoted_string()
            .map_err(|e| match e {
                TextGridError::Syntax { line, msg } => TextGridError::Header { line, msg },
                other => other,
            })
    }

    fn skip_inline_space(&mut self) {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace() && b != b'\n') {
            self.bump();
        }
    }

    /// True when the upcoming content starts with a key name rather than a
    /// bare value, i.e. the file is in long form.
    fn looks_long_form(&self) -> bool {
        let mut pos = self.pos;
        while matches!(self.bytes.get(pos), Some(b) if b.is_ascii_whitespace()) {
            pos += 1;
        }
        self.bytes[pos..].starts_with(b"xmin")
    }

    /// Next numeric value. In long form, scans to the value after the next
    /// `=`; in short form, reads the next bare token.
    fn number(&mut self, long_form: bool) -> Result<f64, TextGridError> {
        if long_form {
            self.seek_past(b'=')?;
        }
        self.skip_whitespace();
        let at = self.line;
        let start = self.pos;
        while matches!(self.peek(), Some(b) if !b.is_ascii_whitespace()) {
            self.bump();
        }
        let token = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap_or("");
        if token.is_empty() {
            return Err(syntax_at(at, "expected a number, found end of file".into()));
        }
        token
            .parse::<f64>()
            .map_err(|_| syntax_at(at, format!("expected a number, found {token:?}")))
    }

    /// Next string value (quoted, `""` escapes a quote, may span lines).
    fn string(&mut self, long_form: bool) -> Result<String, TextGridError> {
        if long_form {
            self.seek_past(b'=')?;
        }
        self.skip_whitespace();
        self.quoted_string()
    }

    fn quoted_string(&mut self) -> Result<String, TextGridError> {
        let at = self.line;
        match self.bump() {
            Some(b'"') => {}
            other => {
                return Err(syntax_at(
                    at,
                    format!(
                        "expected a quoted string, found {:?}",
                        other.map(|b| (b as char).to_string()).unwrap_or_default()
                    ),
                ))
            }
        }
        let mut out: Vec<u8> = Vec::new();
        loop {
            match self.bump() {
                Some(b'"') => {
                    if self.peek() == Some(b'"') {
                        self.bump();
                        out.push(b'"');
                    } else {
                        return Ok(String::from_utf8(out).expect("input was decoded as UTF-8"));
                    }
                }
                Some(b) => out.push(b),
                None => {
                    return Err(syntax_at(
                        self.line,
                        "unterminated quoted string".into(),
                    ))
                }
            }
        }
    }

    /// Next `<exists>` / `<absent>` flag.
    fn flag(&mut self) -> Result<bool, TextGridError> {
        let at = self.line;
        while let Some(b) = self.peek() {
            if b == b'<' {
                let start = self.pos;
                while matches!(self.peek(), Some(b) if b != b'>') {
                    self.bump();
                }
                self.bump();
                let token = &self.bytes[start..self.pos];
                return match token {
                    b"<exists>" => Ok(true),
                    b"<absent>" => Ok(false),
                    other => Err(syntax_at(
                        at,
                        format!("unknown flag {:?}", String::from_utf8_lossy(other)),
                    )),
                };
            }
            self.bump();
        }
        Err(syntax_at(
            at,
            "expected <exists> or <absent>, found end of file".into(),
        ))
    }

    fn seek_past(&mut self, target: u8) -> Result<(), TextGridError> {
        let at = self.line;
        while let Some(b) = self.bump() {
            if b == target {
                return Ok(());
            }
        }
        Err(syntax_at(
            at,
            format!("expected {:?}, found end of file", target as char),
        ))
    }
}
