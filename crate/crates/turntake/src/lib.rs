//! Toolkit for time-aligned turn-taking annotations of dyadic conversation.
//!
//! The crate reads and writes Praat TextGrid interval tiers, parses and
//! validates two layers of turn-taking labels (inter-pausal units and
//! points of potential completion), proposes pause-based segmentations,
//! lints annotations against the label semantics, computes inter-annotator
//! agreement, produces label-distribution statistics and exports
//! conversational-dynamics timelines as SVG and CSV.
//!
//! See the guide under `book/` for a chapter-by-chapter walkthrough; its
//! code snippets are compiled as doc-tests.

// `!(a < b)` instead of `a >= b` on times: the negated form also rejects
// NaN, which must never pass an invariant check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agreement;
pub mod conversation;
pub mod dynamics;
pub mod lint;
pub mod schema;
pub mod segment;
pub mod sim;
pub mod stats;
pub mod textgrid;

#[cfg(doctest)]
mod book;

pub use textgrid::{extract_tier, parse_textgrid, serialize_textgrid};
pub use textgrid::{GridForm, Interval, TextGrid, TextGridError, Tier, TierMatch};

pub use conversation::{Conversation, DiscoveryConfig, SpeakerTiers};
pub use schema::{
    canonical_text, classify_text, macro_category, normalize_for_dynamics, parse_label,
    Inventory, LabelExpr, Layer, MacroScheme,
};

/// Crate-wide tolerance for time comparisons, re-exported from [`textgrid`].
pub use textgrid::TIME_EPS;
