//! Label inventories and the label grammar shared by both annotation layers.
//!
//! A tier text is either a turn-taking label, a non-label marker such as
//! `<noise>` or an empty pause interval. Labels are one or two base names
//! joined by `_` in alphabetical order, with an optional trailing `@`
//! marking annotator uncertainty. Matching is case-sensitive and exact
//! apart from surrounding whitespace; anything else is an error, which is
//! where the lint value comes from.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// The two annotation layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Layer {
    /// Inter-pausal units: stretches of one speaker's speech bounded by
    /// silences of at least the segmentation threshold.
    Ipu,
    /// Points of potential completion: spans ending where an utterance
    /// could be syntactically/pragmatically complete in context.
    Pcomp,
}

impl fmt::Display for Layer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Layer::Ipu => write!(f, "IPU"),
            Layer::Pcomp => write!(f, "PCOMP"),
        }
    }
}

/// Base labels of the IPU layer, in canonical reporting order.
pub const IPU_LABELS: &[&str] = &[
    "hold",
    "incomplete-hold",
    "change",
    "question",
    "trail-off",
    "self-interruption",
    "hrt",
];

/// Base labels of the PCOMP layer, in canonical reporting order.
pub const PCOMP_LABELS: &[&str] = &[
    "hold",
    "cont",
    "change",
    "part",
    "q-part",
    "question",
    "hes",
    "coll",
    "hrt",
    "disruption",
    "incomplete",
];

/// Labels that may only occur as one half of a combined label.
pub const COMBINE_ONLY: &[(Layer, &str)] = &[(Layer::Pcomp, "coll")];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("unknown {layer} label {name:?}")]
    UnknownLabel { layer: Layer, name: String },
    #[error("malformed label {text:?}: {reason}")]
    MalformedCombination { text: String, reason: String },
    #[error("label \"coll\" only occurs combined with another label")]
    LoneColl,
}

/// A validated base label of one layer.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseLabel {
    layer: Layer,
    name: String,
}

impl BaseLabel {
    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for BaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

/// The label inventories in force, plus the combine-only rule set.
///
/// The defaults cover the built-in IPU and PCOMP inventories; new corpora
/// can extend or replace them through [`Inventory::with_label`].
#[derive(Debug, Clone)]
pub struct Inventory {
    ipu: Vec<String>,
    pcomp: Vec<String>,
    combine_only: Vec<(Layer, String)>,
}

impl Default for Inventory {
    fn default() -> Self {
        Inventory {
            ipu: IPU_LABELS.iter().map(|s| s.to_string()).collect(),
            pcomp: PCOMP_LABELS.iter().map(|s| s.to_string()).collect(),
            combine_only: COMBINE_ONLY
                .iter()
                .map(|(l, s)| (*l, s.to_string()))
                .collect(),
        }
    }
}

impl Inventory {
    pub fn labels(&self, layer: Layer) -> &[String] {
        match layer {
            Layer::Ipu => &self.ipu,
            Layer::Pcomp => &self.pcomp,
        }
    }

    /// Adds a base label to a layer's inventory; `combine_only` marks it as
    /// valid only inside combined labels.
    pub fn with_label(mut self, layer: Layer, name: &str, combine_only: bool) -> Self {
        let list = match layer {
            Layer::Ipu => &mut self.ipu,
            Layer::Pcomp => &mut self.pcomp,
        };
        if !list.iter().any(|l| l == name) {
            list.push(name.to_string());
        }
        if combine_only {
            self.combine_only.push((layer, name.to_string()));
        }
        self
    }

    pub fn base(&self, layer: Layer, name: &str) -> Result<BaseLabel, LabelError> {
        if self.labels(layer).iter().any(|l| l == name) {
            Ok(BaseLabel {
                layer,
                name: name.to_string(),
            })
        } else {
            Err(LabelError::UnknownLabel {
                layer,
                name: name.to_string(),
            })
        }
    }

    fn is_combine_only(&self, layer: Layer, name: &str) -> bool {
        self.combine_only
            .iter()
            .any(|(l, n)| *l == layer && n == name)
    }

    /// Base labels a layer can display on its own (combine-only excluded).
    pub fn single_labels(&self, layer: Layer) -> Vec<&str> {
        self.labels(layer)
            .iter()
            .filter(|n| !self.is_combine_only(layer, n))
            .map(|s| s.as_str())
            .collect()
    }
}

/// A parsed turn-taking label: one or two base labels plus an uncertainty
/// flag. Parts are stored in alphabetical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelExpr {
    layer: Layer,
    parts: Vec<String>,
    uncertain: bool,
}

impl LabelExpr {
    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn parts(&self) -> &[String] {
        &self.parts
    }

    pub fn is_uncertain(&self) -> bool {
        self.uncertain
    }

    pub fn is_combined(&self) -> bool {
        self.parts.len() == 2
    }

    pub fn has_part(&self, name: &str) -> bool {
        self.parts.iter().any(|p| p == name)
    }

    /// True when every part equals `name` (for single labels, equality).
    pub fn is_only(&self, name: &str) -> bool {
        self.parts.iter().all(|p| p == name)
    }

    /// The same label without its uncertainty flag.
    pub fn certain(&self) -> LabelExpr {
        LabelExpr {
            layer: self.layer,
            parts: self.parts.clone(),
            uncertain: false,
        }
    }
}

impl fmt::Display for LabelExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", canonical_text(self))
    }
}

/// Parses a label under the default inventory.
pub fn parse_label(layer: Layer, text: &str) -> Result<LabelExpr, LabelError> {
    parse_label_with(&Inventory::default(), layer, text)
}

/// Parses a label: trims whitespace, strips one trailing `@`, splits on
/// `_`, validates each part against the inventory and sorts the parts.
/// Input order is free; `hold_change` canonicalizes to `change_hold`.
pub fn parse_label_with(
    inventory: &Inventory,
    layer: Layer,
    text: &str,
) -> Result<LabelExpr, LabelError> {
    let trimmed = text.trim();
    let malformed = |reason: &str| LabelError::MalformedCombination {
        text: trimmed.to_string(),
        reason: reason.to_string(),
    };
    if trimmed.is_empty() {
        return Err(malformed("empty label"));
    }
    let (body, uncertain) = match trimmed.strip_suffix('@') {
        Some(rest) => (rest, true),
        None => (trimmed, false),
    };
    if body.ends_with('@') {
        return Err(malformed("more than one trailing '@'"));
    }
    if body.is_empty() {
        return Err(malformed("'@' without a label"));
    }
    let mut parts: Vec<String> = Vec::new();
    for piece in body.split('_') {
        if piece.is_empty() {
            return Err(malformed("empty part around '_'"));
        }
        inventory.base(layer, piece)?;
        parts.push(piece.to_string());
    }
    if parts.len() > 2 {
        return Err(malformed("more than two combined parts"));
    }
    if parts.len() == 2 && parts[0] == parts[1] {
        return Err(malformed("duplicated part"));
    }
    parts.sort();
    if parts.len() == 1 && inventory.is_combine_only(layer, &parts[0]) {
        if layer == Layer::Pcomp && parts[0] == "coll" {
            return Err(LabelError::LoneColl);
        }
        return Err(malformed("label only occurs in combinations"));
    }
    Ok(LabelExpr {
        layer,
        parts,
        uncertain,
    })
}

/// Canonical text form: parts joined by `_` in sorted order, `@` appended
/// iff uncertain. `parse_label(canonical_text(x)) == x` for valid labels.
pub fn canonical_text(label: &LabelExpr) -> String {
    let mut s = label.parts.join("_");
    if label.uncertain {
        s.push('@');
    }
    s
}

/// How one tier text classifies.
#[derive(Debug, Clone, PartialEq)]
pub enum TierText {
    /// A turn-taking label.
    Label(LabelExpr),
    /// A non-speech marker such as `<noise>`, or an empty pause interval;
    /// excluded from statistics.
    NonLabel(String),
    /// Text that should be a label but does not parse.
    Invalid(String, LabelError),
}

/// Classifies raw interval text: empty/whitespace and `<...>` markers are
/// [`TierText::NonLabel`]; everything else must parse as a label.
pub fn classify_text(layer: Layer, text: &str) -> TierText {
    classify_text_with(&Inventory::default(), layer, text)
}

pub fn classify_text_with(inventory: &Inventory, layer: Layer, text: &str) -> TierText {
    let trimmed = text.trim();
    if trimmed.is_empty() || (trimmed.starts_with('<') && trimmed.ends_with('>')) {
        return TierText::NonLabel(trimmed.to_string());
    }
    match parse_label_with(inventory, layer, trimmed) {
        Ok(label) => TierText::Label(label),
        Err(e) => TierText::Invalid(trimmed.to_string(), e),
    }
}

/// Result of mapping a label through a [`MacroScheme`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MacroOutcome {
    Category(String),
    /// The label's parts map to different categories.
    Mixed,
}

impl fmt::Display for MacroOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MacroOutcome::Category(c) => write!(f, "{c}"),
            MacroOutcome::Mixed => write!(f, "Mixed"),
        }
    }
}

/// A total mapping from a layer's base labels to coarser category names.
#[derive(Debug, Clone)]
pub struct MacroScheme {
    name: String,
    layer: Layer,
    mapping: BTreeMap<String, String>,
}

impl MacroScheme {
    /// Builds a scheme and checks totality over the inventory.
    pub fn new(
        name: &str,
        layer: Layer,
        inventory: &Inventory,
        pairs: &[(&str, &str)],
    ) -> Result<Self, LabelError> {
        let mut mapping = BTreeMap::new();
        for (label, category) in pairs {
            inventory.base(layer, label)?;
            mapping.insert(label.to_string(), category.to_string());
        }
        for label in inventory.labels(layer) {
            if !mapping.contains_key(label) {
                return Err(LabelError::MalformedCombination {
                    text: name.to_string(),
                    reason: format!("scheme does not cover base label {label:?}"),
                });
            }
        }
        Ok(MacroScheme {
            name: name.to_string(),
            layer,
            mapping,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layer(&self) -> Layer {
        self.layer
    }

    pub fn category_of(&self, base: &str) -> Option<&str> {
        self.mapping.get(base).map(|s| s.as_str())
    }

    /// All category names, sorted.
    pub fn categories(&self) -> Vec<&str> {
        let mut cats: Vec<&str> = self.mapping.values().map(|s| s.as_str()).collect();
        cats.sort();
        cats.dedup();
        cats
    }

    /// The grouping by turn-taking outcome: turn-hold, turn-change, hrt.
    pub fn ipu_turn_taking() -> MacroScheme {
        MacroScheme::new(
            "turn-taking",
            Layer::Ipu,
            &Inventory::default(),
            &[
                ("hold", "turn-hold"),
                ("incomplete-hold", "turn-hold"),
                ("change", "turn-change"),
                ("question", "turn-change"),
                ("self-interruption", "turn-change"),
                ("trail-off", "turn-change"),
                ("hrt", "hrt"),
            ],
        )
        .expect("built-in scheme is total")
    }

    /// The grouping by syntactic completion: complete, incomplete, hrt.
    pub fn ipu_completeness() -> MacroScheme {
        MacroScheme::new(
            "completeness",
            Layer::Ipu,
            &Inventory::default(),
            &[
                ("hold", "complete"),
                ("change", "complete"),
                ("question", "complete"),
                ("incomplete-hold", "incomplete"),
                ("self-interruption", "incomplete"),
                ("trail-off", "incomplete"),
                ("hrt", "hrt"),
            ],
        )
        .expect("built-in scheme is total")
    }

    /// Turn-taking grouping for the PCOMP layer. Labels that keep the turn
    /// with the same speaker group as turn-hold; labels after which the
    /// other speaker continues group as turn-change; `coll` is
    /// backwards-looking and keeps its own category.
    pub fn pcomp_turn_taking() -> MacroScheme {
        MacroScheme::new(
            "turn-taking",
            Layer::Pcomp,
            &Inventory::default(),
            &[
                ("hold", "turn-hold"),
                ("cont", "turn-hold"),
                ("part", "turn-hold"),
                ("hes", "turn-hold"),
                ("disruption", "turn-hold"),
                ("change", "turn-change"),
                ("question", "turn-change"),
                ("incomplete", "turn-change"),
                ("q-part", "turn-change"),
                ("hrt", "hrt"),
                ("coll", "coll"),
            ],
        )
        .expect("built-in scheme is total")
    }

    pub fn builtin(layer: Layer, name: &str) -> Option<MacroScheme> {
        match (layer, name) {
            (Layer::Ipu, "turn-taking") => Some(MacroScheme::ipu_turn_taking()),
            (Layer::Ipu, "completeness") => Some(MacroScheme::ipu_completeness()),
            (Layer::Pcomp, "turn-taking") => Some(MacroScheme::pcomp_turn_taking()),
            _ => None,
        }
    }
}

/// Maps a label through a scheme: one shared category, or [`Mixed`] when
/// the parts disagree.
///
/// [`Mixed`]: MacroOutcome::Mixed
pub fn macro_category(label: &LabelExpr, scheme: &MacroScheme) -> MacroOutcome {
    debug_assert_eq!(label.layer(), scheme.layer());
    let mut categories = label
        .parts
        .iter()
        .filter_map(|p| scheme.category_of(p));
    let first = match categories.next() {
        Some(c) => c,
        None => return MacroOutcome::Mixed,
    };
    if categories.all(|c| c == first) {
        MacroOutcome::Category(first.to_string())
    } else {
        MacroOutcome::Mixed
    }
}

/// Category of one timeline entry after cleaning for plotting.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DynamicsCategory {
    /// A single label's own name, or the shared macro-category of a
    /// combined label.
    Name(String),
    /// A combined label whose parts belong to different macro-categories.
    Residue,
}

impl fmt::Display for DynamicsCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsCategory::Name(n) => write!(f, "{n}"),
            DynamicsCategory::Residue => write!(f, "Residue"),
        }
    }
}

/// Cleans a label for timeline plotting: the uncertainty flag is dropped,
/// single labels keep their own name, combined labels collapse to their
/// shared macro-category and fall into [`DynamicsCategory::Residue`] when
/// their parts disagree.
pub fn normalize_for_dynamics(label: &LabelExpr, scheme: &MacroScheme) -> DynamicsCategory {
    if label.parts.len() == 1 {
        return DynamicsCategory::Name(label.parts[0].clone());
    }
    match macro_category(label, scheme) {
        MacroOutcome::Category(c) => DynamicsCategory::Name(c),
        MacroOutcome::Mixed => DynamicsCategory::Residue,
    }
}

/// Every category [`normalize_for_dynamics`] can produce for a layer under
/// a scheme: displayable single labels, the scheme's categories, and
/// Residue.
pub fn dynamics_categories(
    inventory: &Inventory,
    layer: Layer,
    scheme: &MacroScheme,
) -> Vec<DynamicsCategory> {
    let mut cats: Vec<DynamicsCategory> = inventory
        .single_labels(layer)
        .iter()
        .map(|n| DynamicsCategory::Name(n.to_string()))
        .collect();
    for c in scheme.categories() {
        let c = DynamicsCategory::Name(c.to_string());
        if !cats.contains(&c) {
            cats.push(c);
        }
    }
    cats.push(DynamicsCategory::Residue);
    cats
}
