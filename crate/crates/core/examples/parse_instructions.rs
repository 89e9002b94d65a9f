//! Runs utterances through the parser: tokens, mentions, dialog act, and
//! what the rule-based designer would do with them on an empty canvas.
//!
//! cargo run --example parse_instructions -- "add a red circle at row 2 column 3" "where?"
//! (reads one utterance per line from stdin when no arguments are given)

use std::io::BufRead;

use chatcrowd::agents::{designer_lexicon, ground_instruction};
use chatcrowd::dialog::Role;
use chatcrowd::layout::{Layout, LayoutKind, Scenario};
use chatcrowd::nlu::{classify_dialog_act, extract_mentions, normalize};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut utterances: Vec<String> = std::env::args().skip(1).collect();
    if utterances.is_empty() {
        utterances = std::io::stdin().lock().lines().collect::<Result<_, _>>()?;
    }
    let lexicon = designer_lexicon();
    let canvas = Layout::empty(Scenario::ShapeRandom);
    for text in utterances {
        let tokens = normalize(&text);
        let mentions = extract_mentions(&tokens, LayoutKind::Shape2d, &lexicon);
        println!("{text}");
        println!("  tokens:    {tokens:?}");
        println!("  mentions:  {}", serde_json::to_string(&mentions)?);
        println!(
            "  act:       director {} / designer {}",
            classify_dialog_act(&tokens, Role::Director),
            classify_dialog_act(&tokens, Role::Designer)
        );
        println!("  grounding: {}", serde_json::to_string(&ground_instruction(&text, &canvas, &lexicon))?);
    }
    Ok(())
}
