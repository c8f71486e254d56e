//! The per-conversation container: two speakers' tier sets over one shared
//! time domain.

use crate::schema::{classify_text_with, Inventory, LabelExpr, Layer, TierText};
use crate::textgrid::{TextGrid, Tier, TIME_EPS};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConversationError {
    #[error("conversation {id:?}: {msg}")]
    Discovery { id: String, msg: String },
    #[error("conversation {id:?}: tier {tier:?} spans [{xmin}, {xmax}], expected [{exp_min}, {exp_max}]")]
    DomainMismatch {
        id: String,
        tier: String,
        xmin: f64,
        xmax: f64,
        exp_min: f64,
        exp_max: f64,
    },
}

/// One speaker's annotation tiers.
#[derive(Debug, Clone)]
pub struct SpeakerTiers {
    pub id: String,
    pub words: Tier,
    pub ipu: Tier,
    pub pcomp: Option<Tier>,
}

/// A dyadic conversation: both speakers' tiers plus an identifier used in
/// reports and file names.
#[derive(Debug, Clone)]
pub struct Conversation {
    pub id: String,
    pub a: SpeakerTiers,
    pub b: SpeakerTiers,
    pub xmin: f64,
    pub xmax: f64,
}

/// Tier-name prefixes accepted for each layer during discovery. Names are
/// matched case-insensitively as `<layer>-<speaker>`.
#[derive(Debug, Clone)]
pub struct DiscoveryConfig {
    pub word_aliases: Vec<String>,
    pub ipu_aliases: Vec<String>,
    pub pcomp_aliases: Vec<String>,
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        let owned = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        DiscoveryConfig {
            word_aliases: owned(&["ortho", "orth", "orthography", "words", "word"]),
            ipu_aliases: owned(&["ipu"]),
            pcomp_aliases: owned(&["pcomp"]),
        }
    }
}

/// An explicit tier assignment, overriding name-based discovery.
#[derive(Debug, Clone)]
pub struct TierAssignment {
    pub tier_name: String,
    pub layer: TierRole,
    pub speaker: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TierRole {
    Words,
    Ipu,
    Pcomp,
}

impl TierRole {
    pub fn parse(s: &str) -> Option<TierRole> {
        match s.to_ascii_lowercase().as_str() {
            "words" | "word" | "ortho" | "orthography" => Some(TierRole::Words),
            "ipu" => Some(TierRole::Ipu),
            "pcomp" => Some(TierRole::Pcomp),
            _ => None,
        }
    }
}

impl Conversation {
    pub fn new(
        id: impl Into<String>,
        a: SpeakerTiers,
        b: SpeakerTiers,
    ) -> Result<Conversation, ConversationError> {
        let id = id.into();
        let xmin = a.words.xmin;
        let xmax = a.words.xmax;
        let conv = Conversation { id, a, b, xmin, xmax };
        conv.check_domains()?;
        Ok(conv)
    }

    fn check_domains(&self) -> Result<(), ConversationError> {
        let mut tiers: Vec<&Tier> = vec![&self.a.words, &self.a.ipu, &self.b.words, &self.b.ipu];
        if let Some(t) = &self.a.pcomp {
            tiers.push(t);
        }
        if let Some(t) = &self.b.pcomp {
            tiers.push(t);
        }
        for tier in tiers {
            if (tier.xmin - self.xmin).abs() > TIME_EPS || (tier.xmax - self.xmax).abs() > TIME_EPS
            {
                return Err(ConversationError::DomainMismatch {
                    id: self.id.clone(),
                    tier: tier.name.clone(),
                    xmin: tier.xmin,
                    xmax: tier.xmax,
                    exp_min: self.xmin,
                    exp_max: self.xmax,
                });
            }
        }
        Ok(())
    }

    pub fn speakers(&self) -> [&SpeakerTiers; 2] {
        [&self.a, &self.b]
    }

    /// The other speaker's tiers.
    pub fn partner_of(&self, speaker_id: &str) -> &SpeakerTiers {
        if self.a.id == speaker_id {
            &self.b
        } else {
            &self.a
        }
    }

    /// Groups a grid's tiers into the two speakers' tier sets by the
    /// `<layer>-<speaker>` naming convention, or by explicit assignments
    /// when given. Requires exactly two speakers, each with a word tier
    /// and an IPU tier.
    pub fn from_textgrid(
        id: impl Into<String>,
        grid: &TextGrid,
        config: &DiscoveryConfig,
        assignments: &[TierAssignment],
    ) -> Result<Conversation, ConversationError> {
        let id = id.into();
        let fail = |msg: String| ConversationError::Discovery {
            id: id.clone(),
            msg,
        };

        // speaker -> (words, ipu, pcomp) slots, in first-seen order
        type Slots = (Option<Tier>, Option<Tier>, Option<Tier>);
        let mut order: Vec<String> = Vec::new();
        let mut found: BTreeMap<String, Slots> = BTreeMap::new();
        let mut place = |speaker: &str,
                         role: TierRole,
                         tier: &Tier,
                         order: &mut Vec<String>|
         -> Result<(), ConversationError> {
            if !found.contains_key(speaker) {
                order.push(speaker.to_string());
            }
            let entry = found.entry(speaker.to_string()).or_default();
            let slot = match role {
                TierRole::Words => &mut entry.0,
                TierRole::Ipu => &mut entry.1,
                TierRole::Pcomp => &mut entry.2,
            };
            if slot.is_some() {
                return Err(ConversationError::Discovery {
                    id: id.clone(),
                    msg: format!("duplicate {role:?} tier for speaker {speaker:?}"),
                });
            }
            *slot = Some(tier.clone());
            Ok(())
        };

        if assignments.is_empty() {
            for tier in &grid.tiers {
                let Some((prefix, speaker)) = tier.name.rsplit_once('-') else {
                    continue;
                };
                let prefix = prefix.to_ascii_lowercase();
                let role = if config.word_aliases.contains(&prefix) {
                    TierRole::Words
                } else if config.ipu_aliases.contains(&prefix) {
                    TierRole::Ipu
                } else if config.pcomp_aliases.contains(&prefix) {
                    TierRole::Pcomp
                } else {
                    continue;
                };
                place(speaker, role, tier, &mut order)?;
            }
        } else {
            for assignment in assignments {
                let tier = grid
                    .tiers
                    .iter()
                    .find(|t| t.name == assignment.tier_name)
                    .ok_or_else(|| fail(format!("mapped tier {:?} not found", assignment.tier_name)))?;
                place(&assignment.speaker, assignment.layer, tier, &mut order)?;
            }
        }

        if order.len() != 2 {
            return Err(fail(format!(
                "expected exactly 2 speakers, found {}: {order:?}",
                order.len()
            )));
        }
        let mut build = |speaker: &str| -> Result<SpeakerTiers, ConversationError> {
            let (words, ipu, pcomp) = found.remove(speaker).unwrap();
            Ok(SpeakerTiers {
                id: speaker.to_string(),
                words: words
                    .ok_or_else(|| fail(format!("speaker {speaker:?} has no word tier")))?,
                ipu: ipu.ok_or_else(|| fail(format!("speaker {speaker:?} has no IPU tier")))?,
                pcomp,
            })
        };
        let a = build(&order[0])?;
        let b = build(&order[1])?;
        Conversation::new(id, a, b)
    }
}

/// An interval whose text failed to parse as a label: timing, raw text
/// and the parse error.
pub type InvalidLabel = (f64, f64, String, crate::schema::LabelError);

/// A labeled interval pulled off an annotation tier: label plus timing.
#[derive(Debug, Clone)]
pub struct LabeledInterval {
    pub start: f64,
    pub end: f64,
    pub label: LabelExpr,
    /// Raw text as stored in the file.
    pub text: String,
}

/// Extracts the intervals of a tier that carry parseable labels, in tier
/// order. Non-labels (pauses, `<...>` markers) are skipped; invalid label
/// texts are returned separately with their positions.
pub fn labeled_intervals(
    tier: &Tier,
    layer: Layer,
    inventory: &Inventory,
) -> (Vec<LabeledInterval>, Vec<InvalidLabel>) {
    let mut labeled = Vec::new();
    let mut invalid = Vec::new();
    for iv in &tier.intervals {
        match classify_text_with(inventory, layer, &iv.text) {
            TierText::Label(label) => labeled.push(LabeledInterval {
                start: iv.xmin,
                end: iv.xmax,
                label,
                text: iv.text.trim().to_string(),
            }),
            TierText::NonLabel(_) => {}
            TierText::Invalid(text, err) => invalid.push((iv.xmin, iv.xmax, text, err)),
        }
    }
    (labeled, invalid)
}
