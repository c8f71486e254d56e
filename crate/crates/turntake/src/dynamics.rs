//! Colour-categorized conversation timelines rendered to SVG and CSV.
//!
//! Each speaker gets one horizontal band; labeled intervals become
//! rectangles positioned linearly in time and coloured by their cleaned
//! category. Rendering is byte-deterministic: identical inputs produce
//! identical output.

use crate::conversation::{labeled_intervals, Conversation};
use crate::schema::{
    dynamics_categories, normalize_for_dynamics, DynamicsCategory, Inventory, Layer, MacroScheme,
};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("render window [{0}, {1}] is empty")]
    EmptyWindow(f64, f64),
    #[error("palette misses categories: {0:?}")]
    IncompletePalette(Vec<String>),
    #[error("bad palette line {line:?}: {msg}")]
    BadPaletteLine { line: String, msg: String },
    #[error("layer {0} is not annotated for speaker {1:?}")]
    MissingLayer(Layer, String),
    #[error("bad dynamics CSV: {0}")]
    BadCsv(String),
}

/// One cleaned, categorized, timed entry of a speaker's track.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackEntry {
    pub start: f64,
    pub end: f64,
    pub category: DynamicsCategory,
}

/// One speaker's ordered timeline of cleaned entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicsTrack {
    pub speaker: String,
    pub entries: Vec<TrackEntry>,
}

/// Category-to-colour mapping; must cover every category a layer/scheme
/// pair can produce, Residue included.
#[derive(Debug, Clone)]
pub struct Palette {
    colors: BTreeMap<String, String>,
    residue: String,
}

impl Palette {
    /// Warm colours for turn ends, the ocre-green spectrum for holds,
    /// green for hearer response tokens, grey for the residue class.
    pub fn default_for(layer: Layer) -> Palette {
        let mut colors = BTreeMap::new();
        let entries: &[(&str, &str)] = match layer {
            Layer::Ipu => &[
                ("hold", "#d62728"),
                ("incomplete-hold", "#ff7f0e"),
                ("change", "#08519c"),
                ("question", "#9ecae1"),
                ("trail-off", "#9467bd"),
                ("self-interruption", "#ffd92f"),
                ("hrt", "#2ca02c"),
                ("turn-hold", "#a50f15"),
                ("turn-change", "#3182bd"),
            ],
            Layer::Pcomp => &[
                ("change", "#d62728"),
                ("question", "#e377c2"),
                ("incomplete", "#fc8d62"),
                ("q-part", "#c51b8a"),
                ("hold", "#bcbd22"),
                ("cont", "#2ca02c"),
                ("part", "#17becf"),
                ("hes", "#76d7c4"),
                ("disruption", "#66c2a5"),
                ("hrt", "#1f77b4"),
                ("coll", "#8c564b"),
                ("turn-hold", "#7fbc41"),
                ("turn-change", "#e31a1c"),
            ],
        };
        for (category, color) in entries {
            colors.insert(category.to_string(), color.to_string());
        }
        Palette {
            colors,
            residue: "#999999".to_string(),
        }
    }

    /// Parses `category=#RRGGBB` lines over a base palette; `Residue` is a
    /// valid category name.
    pub fn with_overrides(mut self, text: &str) -> Result<Palette, DynamicsError> {
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (category, color) = line.split_once('=').ok_or_else(|| {
                DynamicsError::BadPaletteLine {
                    line: line.to_string(),
                    msg: "expected category=#RRGGBB".into(),
                }
            })?;
            let color = color.trim();
            let valid = color.len() == 7
                && color.starts_with('#')
                && color[1..].chars().all(|c| c.is_ascii_hexdigit());
            if !valid {
                return Err(DynamicsError::BadPaletteLine {
                    line: line.to_string(),
                    msg: format!("{color:?} is not #RRGGBB"),
                });
            }
            let category = category.trim();
            if category == "Residue" {
                self.residue = color.to_lowercase();
            } else {
                self.colors
                    .insert(category.to_string(), color.to_lowercase());
            }
        }
        Ok(self)
    }

    pub fn color(&self, category: &DynamicsCategory) -> Option<&str> {
        match category {
            DynamicsCategory::Residue => Some(&self.residue),
            DynamicsCategory::Name(n) => self.colors.get(n).map(|s| s.as_str()),
        }
    }

    /// Checks the palette covers everything the layer/scheme can produce.
    pub fn validate_for(
        &self,
        inventory: &Inventory,
        layer: Layer,
        scheme: &MacroScheme,
    ) -> Result<(), DynamicsError> {
        let missing: Vec<String> = dynamics_categories(inventory, layer, scheme)
            .into_iter()
            .filter(|c| self.color(c).is_none())
            .map(|c| c.to_string())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(DynamicsError::IncompletePalette(missing))
        }
    }
}

/// Builds both speakers' tracks for a layer: every labeled interval is
/// cleaned through the scheme, non-labels are dropped, and entries are
/// clipped to the window when one is given.
pub fn build_tracks(
    conv: &Conversation,
    layer: Layer,
    scheme: &MacroScheme,
    inventory: &Inventory,
    window: Option<(f64, f64)>,
) -> Result<[DynamicsTrack; 2], DynamicsError> {
    let mut tracks = Vec::with_capacity(2);
    for speaker in conv.speakers() {
        let tier = match layer {
            Layer::Ipu => &speaker.ipu,
            Layer::Pcomp => speaker
                .pcomp
                .as_ref()
                .ok_or_else(|| DynamicsError::MissingLayer(layer, speaker.id.clone()))?,
        };
        let (labeled, _) = labeled_intervals(tier, layer, inventory);
        let mut entries = Vec::with_capacity(labeled.len());
        for unit in labeled {
            let (mut start, mut end) = (unit.start, unit.end);
            if let Some((lo, hi)) = window {
                start = start.max(lo);
                end = end.min(hi);
                if start >= end {
                    continue;
                }
            }
            entries.push(TrackEntry {
                start,
                end,
                category: normalize_for_dynamics(&unit.label, scheme),
            });
        }
        tracks.push(DynamicsTrack {
            speaker: speaker.id.clone(),
            entries,
        });
    }
    let b = tracks.pop().unwrap();
    let a = tracks.pop().unwrap();
    Ok([a, b])
}

const BAND_HEIGHT: f64 = 44.0;
const BAND_GAP: f64 = 14.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 12.0;
const AXIS_HEIGHT: f64 = 30.0;
const LEGEND_ROW: f64 = 20.0;

/// Renders tracks as standalone SVG 1.1 text.
///
/// Layout: one band per track, a seconds axis with ticks every
/// `tick_every_s`, and a legend listing exactly the categories present.
/// Identical inputs yield byte-identical output.
pub fn render_svg(
    tracks: &[DynamicsTrack],
    window: (f64, f64),
    width_px: f64,
    palette: &Palette,
    tick_every_s: f64,
) -> Result<String, DynamicsError> {
    let (t0, t1) = window;
    if !(t1 > t0) {
        return Err(DynamicsError::EmptyWindow(t0, t1));
    }
    let plot_width = width_px - MARGIN_LEFT - MARGIN_RIGHT;
    let x_of = |t: f64| MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_width;

    // Legend: categories actually present, sorted by display name.
    let mut present: Vec<DynamicsCategory> = tracks
        .iter()
        .flat_map(|t| t.entries.iter().map(|e| e.category.clone()))
        .collect();
    present.sort_by_key(|c| c.to_string());
    present.dedup();
    for category in &present {
        if palette.color(category).is_none() {
            return Err(DynamicsError::IncompletePalette(vec![category.to_string()]));
        }
    }

    let legend_cols = ((plot_width / 150.0).floor() as usize).max(1);
    let legend_rows = present.len().div_ceil(legend_cols);
    let bands_height = tracks.len() as f64 * (BAND_HEIGHT + BAND_GAP);
    let height = MARGIN_TOP + bands_height + AXIS_HEIGHT + legend_rows as f64 * LEGEND_ROW + 8.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        fmt_px(width_px),
        fmt_px(height),
        fmt_px(width_px),
        fmt_px(height)
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        fmt_px(width_px),
        fmt_px(height)
    );

    for (i, track) in tracks.iter().enumerate() {
        let y = MARGIN_TOP + i as f64 * (BAND_HEIGHT + BAND_GAP);
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">{}</text>",
            fmt_px(MARGIN_LEFT - 8.0),
            fmt_px(y + BAND_HEIGHT / 2.0 + 4.0),
            escape_xml(&track.speaker)
        );
        let _ = writeln!(
            svg,
            "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>",
            fmt_px(MARGIN_LEFT),
            fmt_px(y),
            fmt_px(plot_width),
            fmt_px(BAND_HEIGHT)
        );
        for entry in &track.entries {
            if entry.end <= t0 || entry.start >= t1 {
                continue;
            }
            let x0 = x_of(entry.start.max(t0));
            let x1 = x_of(entry.end.min(t1));
            let color = palette.color(&entry.category).expect("validated above");
            let _ = writeln!(
                svg,
                "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{} {}-{} {}</title></rect>",
                fmt_px(x0),
                fmt_px(y + 2.0),
                fmt_px(x1 - x0),
                fmt_px(BAND_HEIGHT - 4.0),
                color,
                escape_xml(&track.speaker),
                fmt_s(entry.start),
                fmt_s(entry.end),
                escape_xml(&entry.category.to_string()),
            );
        }
    }

    // Time axis.
    let axis_y = MARGIN_TOP + bands_height + 4.0;
    let _ = writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1\"/>",
        fmt_px(MARGIN_LEFT),
        fmt_px(axis_y),
        fmt_px(MARGIN_LEFT + plot_width),
        fmt_px(axis_y)
    );
    let mut tick = (t0 / tick_every_s).ceil() * tick_every_s;
    while tick <= t1 + 1e-9 {
        let x = x_of(tick);
        let _ = writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#000000\" stroke-width=\"1\"/>",
            fmt_px(x),
            fmt_px(axis_y),
            fmt_px(x),
            fmt_px(axis_y + 5.0)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            fmt_px(x),
            fmt_px(axis_y + 16.0),
            fmt_s(tick)
        );
        tick += tick_every_s;
    }

    // Legend.
    let legend_y = axis_y + AXIS_HEIGHT - 4.0;
    for (i, category) in present.iter().enumerate() {
        let row = i / legend_cols;
        let col = i % legend_cols;
        let x = MARGIN_LEFT + col as f64 * 150.0;
        let y = legend_y + row as f64 * LEGEND_ROW;
        let color = palette.color(category).expect("validated above");
        let _ = writeln!(
            svg,
            "  <rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>",
            fmt_px(x),
            fmt_px(y),
            color
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            fmt_px(x + 16.0),
            fmt_px(y + 10.0),
            escape_xml(&category.to_string())
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn fmt_px(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn fmt_s(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Exports tracks as CSV: `speaker,start,end,category`, track order then
/// time order.
pub fn export_csv(tracks: &[DynamicsTrack]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["speaker", "start", "end", "category"])
        .expect("in-memory write");
    for track in tracks {
        for entry in &track.entries {
            writer
                .write_record([
                    track.speaker.as_str(),
                    &fmt_s(entry.start),
                    &fmt_s(entry.end),
                    &entry.category.to_string(),
                ])
                .expect("in-memory write");
        }
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

/// Re-imports [`export_csv`] output. `Residue` maps back to the residue
/// category; `#` comment lines (report headers) are skipped.
pub fn tracks_from_csv(text: &str) -> Result<Vec<DynamicsTrack>, DynamicsError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut tracks: Vec<DynamicsTrack> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DynamicsError::BadCsv(e.to_string()))?;
        if record.len() != 4 {
            return Err(DynamicsError::BadCsv(format!(
                "expected 4 fields, got {}",
                record.len()
            )));
        }
        let speaker = record[0].to_string();
        let parse = |s: &str| -> Result<f64, DynamicsError> {
            s.parse()
                .map_err(|_| DynamicsError::BadCsv(format!("bad number {s:?}")))
        };
        let entry = TrackEntry {
            start: parse(&record[1])?,
            end: parse(&record[2])?,
            category: if &record[3] == "Residue" {
                DynamicsCategory::Residue
            } else {
                DynamicsCategory::Name(record[3].to_string())
            },
        };
        match tracks.last_mut() {
            Some(track) if track.speaker == speaker => track.entries.push(entry),
            _ => tracks.push(DynamicsTrack {
                speaker,
                entries: vec![entry],
            }),
        }
    }
    Ok(tracks)
}
