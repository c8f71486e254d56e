//! Resolved run configuration: defaults, then the config file, then
//! command-line flags.
//!
//! The config file is line-based `key = value` with the same keys as the
//! long flags (`ipu-threshold-ms = 150`). Flags given on the command line
//! always win. `TURNTAKE_CONFIG` names a default config file.

use anyhow::{bail, Context, Result};
use clap::parser::ValueSource;
use clap::ArgMatches;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use turntake::conversation::{TierAssignment, TierRole};
use turntake::lint::LintOptions;
use turntake::segment::TokenClassifier;

/// Fully resolved settings, echoed into every report header.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub ipu_threshold_ms: f64,
    pub tolerance_ms: f64,
    pub lapse_s: f64,
    pub scheme: String,
    pub classifier_path: Option<PathBuf>,
    pub tier_map_path: Option<PathBuf>,
    pub classifier: TokenClassifier,
    /// file stem -> explicit tier assignments
    pub tier_map: BTreeMap<String, Vec<TierAssignment>>,
}

impl RunConfig {
    pub fn resolve(matches: &ArgMatches) -> Result<RunConfig> {
        let file_values = load_config_file(matches)?;
        let from_cli = |key: &str| {
            matches.value_source(key) == Some(ValueSource::CommandLine)
        };
        let string_of = |key: &str, cli: String| -> String {
            if from_cli(key) {
                return cli;
            }
            file_values
                .get(&key.replace('_', "-"))
                .cloned()
                .unwrap_or(cli)
        };
        let number_of = |key: &str, cli: f64| -> Result<f64> {
            if from_cli(key) {
                return Ok(cli);
            }
            match file_values.get(&key.replace('_', "-")) {
                Some(raw) => raw
                    .parse()
                    .with_context(|| format!("config key {key:?}: bad number {raw:?}")),
                None => Ok(cli),
            }
        };
        let path_of = |key: &str, cli: Option<PathBuf>| -> Option<PathBuf> {
            if from_cli(key) {
                return cli;
            }
            file_values
                .get(&key.replace('_', "-"))
                .map(PathBuf::from)
                .or(cli)
        };

        let out_dir = PathBuf::from(string_of(
            "out_dir",
            matches.get_one::<PathBuf>("out_dir").unwrap().display().to_string(),
        ));
        let ipu_threshold_ms =
            number_of("ipu_threshold_ms", *matches.get_one::<f64>("ipu_threshold_ms").unwrap())?;
        let tolerance_ms =
            number_of("tolerance_ms", *matches.get_one::<f64>("tolerance_ms").unwrap())?;
        let lapse_s = number_of("lapse_s", *matches.get_one::<f64>("lapse_s").unwrap())?;
        let scheme = string_of("scheme", matches.get_one::<String>("scheme").unwrap().clone());
        let classifier_path =
            path_of("classifier", matches.get_one::<PathBuf>("classifier").cloned());
        let tier_map_path = path_of("tier_map", matches.get_one::<PathBuf>("tier_map").cloned());

        // Negated form also rejects NaN from a config file.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(ipu_threshold_ms > 0.0) {
            bail!("--ipu-threshold-ms must be positive, got {ipu_threshold_ms}");
        }

        let classifier = match &classifier_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading classifier rules {}", path.display()))?;
                TokenClassifier::from_rules(&text)?
            }
            None => TokenClassifier::default(),
        };
        let tier_map = match &tier_map_path {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading tier map {}", path.display()))?;
                parse_tier_map(&text)?
            }
            None => BTreeMap::new(),
        };

        Ok(RunConfig {
            out_dir,
            ipu_threshold_ms,
            tolerance_ms,
            lapse_s,
            scheme,
            classifier_path,
            tier_map_path,
            classifier,
            tier_map,
        })
    }

    pub fn lint_options(&self) -> LintOptions {
        LintOptions {
            ipu_threshold_s: self.ipu_threshold_ms / 1000.0,
            tolerance_s: self.tolerance_ms / 1000.0,
            lapse_s: self.lapse_s,
            classifier: self.classifier.clone(),
            inventory: turntake::Inventory::default(),
        }
    }

    /// Comment-line header naming every resolved setting.
    pub fn header(&self, command: &str) -> String {
        format!("# turntake {}\n# {self}\n# command = {command}\n", env!("CARGO_PKG_VERSION"))
    }

    pub fn assignments_for(&self, stem: &str) -> &[TierAssignment] {
        self.tier_map.get(stem).map(|v| v.as_slice()).unwrap_or(&[])
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |p: &Option<PathBuf>| {
            p.as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "(none)".into())
        };
        write!(
            f,
            "out-dir = {} | ipu-threshold-ms = {} | tolerance-ms = {} | lapse-s = {} | scheme = {} | classifier = {} | tier-map = {}",
            self.out_dir.display(),
            self.ipu_threshold_ms,
            self.tolerance_ms,
            self.lapse_s,
            self.scheme,
            opt(&self.classifier_path),
            opt(&self.tier_map_path),
        )
    }
}

fn load_config_file(matches: &ArgMatches) -> Result<BTreeMap<String, String>> {
    let explicit = matches.get_one::<PathBuf>("config").cloned();
    let path = match explicit {
        Some(p) => Some(p),
        None => std::env::var_os("TURNTAKE_CONFIG").map(PathBuf::from),
    };
    let Some(path) = path else {
        return Ok(BTreeMap::new());
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    parse_config(&text)
}

fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut values = BTreeMap::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("bad config line {line:?}: expected key = value");
        };
        values.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(values)
}

/// `stem<TAB>tier<TAB>layer<TAB>speaker` lines, one per mapped tier.
fn parse_tier_map(text: &str) -> Result<BTreeMap<String, Vec<TierAssignment>>> {
    let mut map: BTreeMap<String, Vec<TierAssignment>> = BTreeMap::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            bail!("bad tier-map line {line:?}: expected stem<TAB>tier<TAB>layer<TAB>speaker");
        }
        let layer = TierRole::parse(fields[2])
            .with_context(|| format!("bad tier-map layer {:?}", fields[2]))?;
        map.entry(fields[0].to_string()).or_default().push(TierAssignment {
            tier_name: fields[1].to_string(),
            layer,
            speaker: fields[3].to_string(),
        });
    }
    Ok(map)
}
