//! Subcommand implementations. Every command reads TextGrids, writes only
//! under the configured output directory and names files
//! `<conversation>_<layer>_<report>.<ext>`.

use crate::config::RunConfig;
use anyhow::{anyhow, bail, Context, Result};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use turntake::agreement::{agreement_report, boundary_agreement, ReportOptions};
use turntake::conversation::{labeled_intervals, Conversation, DiscoveryConfig};
use turntake::dynamics::{build_tracks, export_csv, render_svg, Palette};
use turntake::lint::{lint_conversation, render_csv, render_text, Severity};
use turntake::schema::{Inventory, Layer, MacroScheme};
use turntake::segment::{propose_ipus, word_spans};
use turntake::stats::{label_distribution, speaking_time, turn_structure, turn_structure_csv, CountMode};
use turntake::textgrid::{parse_textgrid, serialize_textgrid, GridForm, TextGrid, Tier};

/// One parsed input file.
struct LoadedGrid {
    stem: String,
    grid: TextGrid,
}

/// Expands files and directories into a sorted, deduplicated grid list.
/// Directories contribute their `*.TextGrid` / `*.textgrid` entries.
fn load_inputs(inputs: &[PathBuf]) -> Result<Vec<LoadedGrid>> {
    let mut files: Vec<PathBuf> = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(input)
                .with_context(|| format!("reading directory {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.extension()
                        .map(|x| x.eq_ignore_ascii_case("textgrid"))
                        .unwrap_or(false)
                })
                .collect();
            entries.sort();
            files.extend(entries);
        } else {
            files.push(input.clone());
        }
    }
    files.sort();
    files.dedup();
    let mut grids = Vec::with_capacity(files.len());
    for path in files {
        let bytes =
            fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        let grid = parse_textgrid(&bytes)
            .map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "input".into());
        grids.push(LoadedGrid { stem, grid });
    }
    grids.sort_by(|a, b| a.stem.cmp(&b.stem));
    Ok(grids)
}

fn load_conversations(config: &RunConfig, inputs: &[PathBuf]) -> Result<Vec<Conversation>> {
    let discovery = DiscoveryConfig::default();
    load_inputs(inputs)?
        .into_iter()
        .map(|loaded| {
            Conversation::from_textgrid(
                &loaded.stem,
                &loaded.grid,
                &discovery,
                config.assignments_for(&loaded.stem),
            )
            .map_err(|e| anyhow!("{e}"))
        })
        .collect()
}

fn parse_layer(name: &str) -> Result<Layer> {
    match name.to_ascii_lowercase().as_str() {
        "ipu" => Ok(Layer::Ipu),
        "pcomp" => Ok(Layer::Pcomp),
        other => bail!("unknown layer {other:?}: expected ipu or pcomp"),
    }
}

fn scheme_for(config: &RunConfig, layer: Layer) -> Result<MacroScheme> {
    MacroScheme::builtin(layer, &config.scheme)
        .ok_or_else(|| anyhow!("no macro scheme {:?} for layer {layer}", config.scheme))
}

fn write_report(config: &RunConfig, name: &str, header: &str, body: &str) -> Result<PathBuf> {
    let path = config.out_dir.join(name);
    fs::write(&path, format!("{header}{body}"))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// `validate`: lint every conversation. Exit 0 when clean, 2 on any
/// error-severity diagnostic, 1 on I/O or parse failure.
pub fn validate(config: &RunConfig, inputs: &[PathBuf]) -> Result<ExitCode> {
    let options = config.lint_options();
    let header = config.header("validate");
    let mut any_errors = false;
    for conv in load_conversations(config, inputs)? {
        let diags = lint_conversation(&conv, &options);
        let errors = diags.iter().filter(|d| d.severity == Severity::Error).count();
        let warnings = diags
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .count();
        any_errors |= errors > 0;
        write_report(
            config,
            &format!("{}_diagnostics.txt", conv.id),
            &header,
            &render_text(&conv.id, &diags),
        )?;
        write_report(
            config,
            &format!("{}_diagnostics.csv", conv.id),
            &header,
            &render_csv(&conv.id, &diags),
        )?;
        println!(
            "{}: {} error(s), {} warning(s), {} finding(s) total",
            conv.id,
            errors,
            warnings,
            diags.len()
        );
    }
    Ok(if any_errors { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

/// `segment`: propose units from each word tier into a new
/// `IPU-auto-<speaker>` tier, writing `<stem>_segmented.TextGrid`.
/// Input files are never mutated.
pub fn segment(config: &RunConfig, inputs: &[PathBuf]) -> Result<ExitCode> {
    let discovery = DiscoveryConfig::default();
    let threshold_s = config.ipu_threshold_ms / 1000.0;
    for loaded in load_inputs(inputs)? {
        let mut grid = loaded.grid.clone();
        let mut proposed = 0usize;
        let mut new_tiers: Vec<Tier> = Vec::new();
        for tier in &grid.tiers {
            let Some((prefix, speaker)) = tier.name.rsplit_once('-') else {
                continue;
            };
            if !discovery
                .word_aliases
                .iter()
                .any(|a| a.eq_ignore_ascii_case(prefix))
            {
                continue;
            }
            let units = propose_ipus(tier, &config.classifier, threshold_s)
                .map_err(|e| anyhow!("{}: tier {:?}: {e}", loaded.stem, tier.name))?;
            proposed += units.len();
            let spans: Vec<(f64, f64, &str)> =
                units.iter().map(|u| (u.start, u.end, "ipu")).collect();
            new_tiers.push(
                Tier::from_spans(format!("IPU-auto-{speaker}"), tier.xmin, tier.xmax, &spans)
                    .map_err(|e| anyhow!("{}: {e}", loaded.stem))?,
            );
        }
        if new_tiers.is_empty() {
            bail!("{}: no word tiers found to segment", loaded.stem);
        }
        grid.tiers.extend(new_tiers);
        let out = config.out_dir.join(format!("{}_segmented.TextGrid", loaded.stem));
        fs::write(&out, serialize_textgrid(&grid, GridForm::Long)?)
            .with_context(|| format!("writing {}", out.display()))?;
        println!("{}: {} proposed unit(s) -> {}", loaded.stem, proposed, out.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// `agree`: align two annotation rounds of one recording speaker by
/// speaker and report every agreement statistic.
pub fn agree(config: &RunConfig, layer: &str, file_a: &Path, file_b: &Path) -> Result<ExitCode> {
    let layer = parse_layer(layer)?;
    let inventory = Inventory::default();
    let convs_a = load_conversations(config, &[file_a.to_path_buf()])?;
    let convs_b = load_conversations(config, &[file_b.to_path_buf()])?;
    let (Some(conv_a), Some(conv_b)) = (convs_a.first(), convs_b.first()) else {
        bail!("agree needs two TextGrid files");
    };

    let mut header = config.header("agree");
    if (conv_a.xmax - conv_b.xmax).abs() > config.tolerance_ms / 1000.0 {
        header.push_str(&format!(
            "# warning: recording durations differ ({} vs {} s)\n",
            conv_a.xmax, conv_b.xmax
        ));
    }

    let tier_of = |conv: &Conversation, speaker_id: &str| -> Result<Vec<_>> {
        let speaker = conv
            .speakers()
            .into_iter()
            .find(|s| s.id == speaker_id)
            .ok_or_else(|| anyhow!("{}: speaker {speaker_id:?} missing", conv.id))?;
        let tier = match layer {
            Layer::Ipu => &speaker.ipu,
            Layer::Pcomp => speaker
                .pcomp
                .as_ref()
                .ok_or_else(|| anyhow!("{}: no PCOMP tier for {speaker_id:?}", conv.id))?,
        };
        Ok(labeled_intervals(tier, layer, &inventory).0)
    };

    let mut pairs_a = Vec::new();
    let mut pairs_b = Vec::new();
    let mut boundary_lines = String::new();
    let tolerance_s = config.tolerance_ms / 1000.0;
    for speaker in conv_a.speakers() {
        let a = tier_of(conv_a, &speaker.id)?;
        let b = tier_of(conv_b, &speaker.id)?;
        // Candidate boundary positions: word ends of this speaker.
        let candidates: Vec<f64> = word_spans(&speaker.words, &config.classifier)?
            .iter()
            .map(|&(_, end)| end)
            .collect();
        let bounds = |list: &[turntake::conversation::LabeledInterval]| -> Vec<f64> {
            list.iter().map(|u| u.end).collect()
        };
        let boundary = boundary_agreement(&bounds(&a), &bounds(&b), &candidates, tolerance_s);
        boundary_lines.push_str(&format!(
            "boundary agreement [{}]: {:.3} (both {} / only-a {} / only-b {} / neither {} over {} candidates)\n",
            speaker.id,
            boundary.agreement,
            boundary.both,
            boundary.only_a,
            boundary.only_b,
            boundary.neither,
            candidates.len(),
        ));
        pairs_a.extend(a);
        pairs_b.extend(b);
    }
    pairs_a.sort_by(|x, y| x.start.partial_cmp(&y.start).unwrap());
    pairs_b.sort_by(|x, y| x.start.partial_cmp(&y.start).unwrap());

    let options = ReportOptions {
        strip_uncertainty: true,
        macro_scheme: Some(scheme_for(config, layer)?),
    };
    let report = agreement_report(&pairs_a, &pairs_b, tolerance_s, &options);

    let stem = format!(
        "{}_vs_{}_{}",
        conv_a.id,
        conv_b.id,
        layer.to_string().to_lowercase()
    );
    let mut text = report.to_text();
    text.push_str(&boundary_lines);
    let text_path = write_report(config, &format!("{stem}_agreement.txt"), &header, &text)?;
    write_report(
        config,
        &format!("{stem}_confusion.csv"),
        &header,
        &report.matrix.to_csv(),
    )?;
    if let Some(macro_matrix) = &report.macro_matrix {
        write_report(
            config,
            &format!("{stem}_confusion_macro.csv"),
            &header,
            &macro_matrix.to_csv(),
        )?;
    }
    let mut summary = csv::Writer::from_writer(Vec::new());
    summary.write_record(["statistic", "value"])?;
    summary.write_record(["n_aligned", &report.n_aligned.to_string()])?;
    summary.write_record(["n_unmatched_a", &report.n_unmatched_a.to_string()])?;
    summary.write_record(["n_unmatched_b", &report.n_unmatched_b.to_string()])?;
    if let Ok(k) = &report.cohen {
        summary.write_record(["cohen_p_o", &format!("{:.9}", k.p_observed)])?;
        summary.write_record(["cohen_p_e", &format!("{:.9}", k.p_expected)])?;
        summary.write_record(["cohen_kappa", &format!("{:.9}", k.kappa)])?;
    }
    if let Ok(k) = &report.fleiss {
        summary.write_record(["fleiss_p_bar", &format!("{:.9}", k.p_bar)])?;
        summary.write_record(["fleiss_p_e", &format!("{:.9}", k.p_expected)])?;
        summary.write_record(["fleiss_kappa", &format!("{:.9}", k.kappa)])?;
        summary.write_record(["fleiss_z", &format!("{:.3}", k.z)])?;
    }
    summary.write_record(["full", &report.partial.full.to_string()])?;
    summary.write_record(["partial", &report.partial.partial.to_string()])?;
    summary.write_record(["none", &report.partial.none.to_string()])?;
    let summary = String::from_utf8(summary.into_inner()?)?;
    write_report(config, &format!("{stem}_agreement.csv"), &header, &summary)?;
    println!("agreement report -> {}", text_path.display());
    Ok(ExitCode::SUCCESS)
}

/// `stats`: distribution tables per conversation and corpus-wide, plus
/// turn structure and speaking time.
pub fn stats(config: &RunConfig, inputs: &[PathBuf]) -> Result<ExitCode> {
    let inventory = Inventory::default();
    let header = config.header("stats");
    let convs = load_conversations(config, inputs)?;
    if convs.is_empty() {
        bail!("no input conversations");
    }
    let has_pcomp = convs
        .iter()
        .any(|c| c.speakers().iter().all(|s| s.pcomp.is_some()));
    let layers: Vec<Layer> = if has_pcomp {
        vec![Layer::Ipu, Layer::Pcomp]
    } else {
        vec![Layer::Ipu]
    };

    for conv in &convs {
        let single = std::slice::from_ref(conv);
        for &layer in &layers {
            for mode in [CountMode::SingleOnly, CountMode::CombinedOnly, CountMode::All] {
                let table = label_distribution(single, layer, mode, &inventory);
                let name = format!(
                    "{}_{}_distribution-{}.csv",
                    conv.id,
                    layer.to_string().to_lowercase(),
                    mode.as_str()
                );
                write_report(config, &name, &header, &table.to_csv())?;
            }
        }
        let mut speaking = csv::Writer::from_writer(Vec::new());
        speaking.write_record(["speaker", "speaking_time_s", "ipu_count"])?;
        for (speaker, time, count) in speaking_time(conv, &inventory) {
            speaking.write_record([speaker, format!("{time:.3}"), count.to_string()])?;
        }
        let speaking = String::from_utf8(speaking.into_inner()?)?;
        write_report(
            config,
            &format!("{}_speaking-time.csv", conv.id),
            &header,
            &speaking,
        )?;
    }

    for &layer in &layers {
        for mode in [CountMode::SingleOnly, CountMode::CombinedOnly, CountMode::All] {
            let table = label_distribution(&convs, layer, mode, &inventory);
            let base = format!(
                "corpus_{}_distribution-{}",
                layer.to_string().to_lowercase(),
                mode.as_str()
            );
            write_report(config, &format!("{base}.csv"), &header, &table.to_csv())?;
            write_report(config, &format!("{base}.txt"), &header, &table.to_text())?;
        }
    }
    if has_pcomp {
        let rows = turn_structure(&convs, &inventory);
        write_report(
            config,
            "corpus_pcomp_turn-structure.csv",
            &header,
            &turn_structure_csv(&rows),
        )?;
    }
    println!(
        "stats over {} conversation(s) -> {}",
        convs.len(),
        config.out_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// `dynamics`: timeline SVG + CSV per conversation.
#[allow(clippy::too_many_arguments)]
pub fn dynamics(
    config: &RunConfig,
    layer: &str,
    from_s: Option<f64>,
    to_s: Option<f64>,
    width_px: f64,
    tick_s: f64,
    palette_path: Option<&Path>,
    inputs: &[PathBuf],
) -> Result<ExitCode> {
    let layer = parse_layer(layer)?;
    let inventory = Inventory::default();
    let scheme = scheme_for(config, layer)?;
    let mut palette = Palette::default_for(layer);
    if let Some(path) = palette_path {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading palette {}", path.display()))?;
        palette = palette.with_overrides(&text)?;
    }
    palette.validate_for(&inventory, layer, &scheme)?;
    let header = config.header("dynamics");
    for conv in load_conversations(config, inputs)? {
        let window = (from_s.unwrap_or(conv.xmin), to_s.unwrap_or(conv.xmax));
        let tracks = build_tracks(&conv, layer, &scheme, &inventory, Some(window))?;
        let svg = render_svg(&tracks, window, width_px, &palette, tick_s)?;
        let layer_name = layer.to_string().to_lowercase();
        let svg_path = config
            .out_dir
            .join(format!("{}_{layer_name}_dynamics.svg", conv.id));
        fs::write(&svg_path, &svg).with_context(|| format!("writing {}", svg_path.display()))?;
        write_report(
            config,
            &format!("{}_{layer_name}_dynamics.csv", conv.id),
            &header,
            &export_csv(&tracks),
        )?;
        println!("{}: dynamics -> {}", conv.id, svg_path.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// `convert`: normalize encoding and text form.
pub fn convert(config: &RunConfig, form: &str, inputs: &[PathBuf]) -> Result<ExitCode> {
    let form = match form.to_ascii_lowercase().as_str() {
        "long" => GridForm::Long,
        "short" => GridForm::Short,
        other => bail!("unknown form {other:?}: expected long or short"),
    };
    for loaded in load_inputs(inputs)? {
        let out = config.out_dir.join(format!("{}.TextGrid", loaded.stem));
        fs::write(&out, serialize_textgrid(&loaded.grid, form)?)
            .with_context(|| format!("writing {}", out.display()))?;
        println!("{} -> {}", loaded.stem, out.display());
    }
    Ok(ExitCode::SUCCESS)
}
