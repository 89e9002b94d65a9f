//! One in-memory session between the template director and the rule-based
//! designer, driven directly through the dialog state machine. Prints the
//! transcript with its sub-dialog segmentation, then writes it as JSON lines.
//!
//! cargo run --example dialog_session -- [seed]

use chatcrowd::agents::{designer_policy, next_instruction, AgentError, TemplateCatalog};
use chatcrowd::dialog::{append_turn, check_termination, new_session, segment_subdialogs, write_transcript, DialogAct, Origin, Role};
use chatcrowd::layout::generate_random_shape_layout;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(1), |s| s.parse())?;
    let templates = TemplateCatalog::default();
    let mut state = new_session("demo", generate_random_shape_layout(seed));

    while state.status.is_active() {
        let now = state.transcript.len() as u64 * 1000;
        let turn = match state.status.awaited_role() {
            Some(Role::Director) => match next_instruction(&state.reference, &state.canvas, seed, &templates) {
                Ok(i) => state.compose_turn(Role::Director, DialogAct::Instruct, i.utterance, vec![], "director", Origin::Synthetic, now)?,
                Err(AgentError::NothingToInstruct) => {
                    state.compose_turn(Role::Director, DialogAct::ConfirmDone, "that's it, done", vec![], "director", Origin::Synthetic, now)?
                }
                Err(e) => return Err(e.into()),
            },
            _ => designer_policy(&state, seed),
        };
        state = append_turn(&state, turn)?;
    }

    for (n, range) in segment_subdialogs(&state.transcript).into_iter().enumerate() {
        println!("sub-dialog {}", n + 1);
        for t in &state.transcript[range] {
            println!("  {:>2} {:<8} {:<12} {}", t.index, t.role.as_str(), t.act.as_str(), t.utterance);
        }
    }
    let end = check_termination(&state);
    println!("status {:?}, match {:?}, rounds {}", state.status, end.match_now, state.round_count);
    write_transcript(std::io::stdout().lock(), &state.transcript)?;
    Ok(())
}
