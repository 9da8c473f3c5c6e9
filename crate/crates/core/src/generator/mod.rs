//! Policy generation: template slots, placeholder substitution and rendering.
//!
//! A template holds ten ordered sections. Each section lists the slots of the
//! questions whose outputs land there, written in slot notation
//! (see [`parse_slot`]). A slot contributes its clauses when the session's
//! active answer to that question took the slot's selector.

mod document;
mod render;
mod slot;
mod substitute;
mod template;

use thiserror::Error;

pub use document::{
    generate, generate_from_outputs, DocumentMetadata, DocumentSection, GenerateOptions, PolicyDocument, PolicyItem,
    STATIC_ORIGIN,
};
pub use render::{render, Format, NON_COMPLIANT_MARK, REVIEW_MARK};
pub use slot::{normalize_slot, parse_slot, SlotError, TemplateSlot, ARROW};
pub use substitute::{substitute, substitution_map, ListStyle, SubstValue, Substitution, SubstitutionMap};
pub use template::{PolicyTemplate, TemplateSection, SECTION_COUNT};

use crate::json::JsonError;
use crate::library::PlaceholderError;

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("schema violation: {0}")]
    Schema(#[from] JsonError),
    #[error("invalid template: {0}")]
    Template(String),
    #[error("slot {slot}: {reason}")]
    SlotMismatch { slot: String, reason: String },
    #[error("clause {0} is not in the library")]
    UnknownClause(String),
    #[error("session is not completed (waiting at {0})")]
    Incomplete(String),
    #[error("unresolved placeholder {}", .0.join(", "))]
    Unresolved(Vec<String>),
    #[error(transparent)]
    Placeholder(#[from] PlaceholderError),
    #[error("unknown format {0:?}, expected plain, markdown or html")]
    UnknownFormat(String),
}
