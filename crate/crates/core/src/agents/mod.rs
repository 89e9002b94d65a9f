//! Synthetic participants: a template director, a rule-based designer and the
//! probe generator used for worker quality control.

mod designer;
mod director;
mod probe;
mod templates;

use thiserror::Error;

pub use designer::{designer_lexicon, designer_policy, ground_instruction, respond, verb_of, DesignerMove, Grounding, Verb};
pub use director::{next_instruction, unmatched_boxes, Instruction};
pub use probe::{make_probe, score_response, Probe, ProbeKind, ProbeOutcome, WorkerScore, QUALIFY_PASS_RATE};
pub use templates::{TemplateCatalog, TemplateError, TemplateKey};

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("reference and canvas are different layout kinds")]
    KindMismatch,
    #[error("canvas already matches the reference")]
    NothingToInstruct,
    #[error("no {0:?} probe can be built for this canvas")]
    ProbeUnavailable(ProbeKind),
    #[error(transparent)]
    Template(#[from] TemplateError),
}
