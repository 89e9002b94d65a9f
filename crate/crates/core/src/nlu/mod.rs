//! Utterance analysis: normalization, lexicon lookup, mention extraction,
//! dialog-act classification and submission validation.

mod acts;
mod lexicon;
mod mentions;
mod normalize;
mod validate;

pub use acts::classify_dialog_act;
pub use lexicon::{Lexicon, LexiconError, Term};
pub use mentions::{extract_mentions, LocationExpr, MentionSet, ObjectDesc, Region, Relation};
pub use normalize::normalize;
pub use validate::{validate_submission, Proposal, Validated, ValidationResult, Verdict};
