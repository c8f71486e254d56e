//! TextGrid text-format writer.
//!
//! Output is UTF-8 without a byte-order mark. The long form reproduces
//! Praat's own layout, including the trailing space it leaves after scalar
//! values; the short form is one bare value per line.

use super::{fmt_seconds, GridForm, TextGrid, TextGridError};

/// Serializes a grid to bytes in the requested form.
///
/// The grid is validated first; the output re-parses to a structurally
/// equal grid.
pub fn serialize_textgrid(grid: &TextGrid, form: GridForm) -> Result<Vec<u8>, TextGridError> {
    grid.validate()?;
    let mut out = String::new();
    out.push_str("File type = \"ooTextFile\"\n");
    out.push_str("Object class = \"TextGrid\"\n\n");
    match form {
        GridForm::Long => write_long(grid, &mut out),
        GridForm::Short => write_short(grid, &mut out),
    }
    Ok(out.into_bytes())
}

fn quote(text: &str) -> String {
    let mut s = String::with_capacity(text.len() + 2);
    s.push('"');
    for c in text.chars() {
        if c == '"' {
            s.push('"');
        }
        s.push(c);
    }
    s.push('"');
    s
}

fn write_long(grid: &TextGrid, out: &mut String) {
    use std::fmt::Write;
    let _ = writeln!(out, "xmin = {} ", fmt_seconds(grid.xmin));
    let _ = writeln!(out, "xmax = {} ", fmt_seconds(grid.xmax));
    if grid.tiers.is_empty() {
        out.push_str("tiers? <absent> \n");
        return;
    }
    out.push_str("tiers? <exists> \n");
    let _ = writeln!(out, "size = {} ", grid.tiers.len());
    out.push_str("item []: \n");
    for (t, tier) in grid.tiers.iter().enumerate() {
        let _ = writeln!(out, "    item [{}]:", t + 1);
        out.push_str("        class = \"IntervalTier\" \n");
        let _ = writeln!(out, "        name = {} ", quote(&tier.name));
        let _ = writeln!(out, "        xmin = {} ", fmt_seconds(tier.xmin));
        let _ = writeln!(out, "        xmax = {} ", fmt_seconds(tier.xmax));
        let _ = writeln!(out, "        intervals: size = {} ", tier.intervals.len());
        for (i, iv) in tier.intervals.iter().enumerate() {
            let _ = writeln!(out, "        intervals [{}]:", i + 1);
            let _ = writeln!(out, "            xmin = {} ", fmt_seconds(iv.xmin));
            let _ = writeln!(out, "            xmax = {} ", fmt_seconds(iv.xmax));
            let _ = writeln!(out, "            text = {} ", quote(&iv.text));
        }
    }
}

fn write_short(grid: &TextGrid, out: &mut String) {
    use std::fmt::Write;
    let _ = writeln!(out, "{}", fmt_seconds(grid.xmin));
    let _ = writeln!(out, "{}", fmt_seconds(grid.xmax));
    if grid.tiers.is_empty() {
        out.push_str("<absent>\n");
        return;
    }
    out.push_str("<exists>\n");
    let _ = writeln!(out, "{}", grid.tiers.len());
    for tier in &grid.tiers {
        out.push_str("\"IntervalTier\"\n");
        let _ = writeln!(out, "{}", quote(&tier.name));
        let _ = writeln!(out, "{}", fmt_seconds(tier.xmin));
        let _ = writeln!(out, "{}", fmt_seconds(tier.xmax));
        let _ = writeln!(out, "{}", tier.intervals.len());
        for iv in &tier.intervals {
            let _ = writeln!(out, "{}", fmt_seconds(iv.xmin));
            let _ = writeln!(out, "{}", fmt_seconds(iv.xmax));
            let _ = writeln!(out, "{}", quote(&iv.text));
        }
    }
}
