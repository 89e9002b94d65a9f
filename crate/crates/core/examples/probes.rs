//! Generates one probe of each kind for a canvas and scores two scripted
//! replies and the rule-based designer's reply.
//!
//! cargo run --example probes -- [seed]

use chatcrowd::agents::{designer_lexicon, make_probe, respond, score_response, ProbeKind};
use chatcrowd::dialog::DialogAct;
use chatcrowd::layout::generate_random_shape_layout;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map_or(Ok(5), |s| s.parse())?;
    let canvas = generate_random_shape_layout(seed);
    let lexicon = designer_lexicon();
    for kind in ProbeKind::ALL {
        let probe = make_probe(&canvas, kind, seed)?;
        let reply = respond(&probe.utterance, &canvas, seed, &lexicon);
        println!("{kind:?}: {:?}", probe.utterance);
        println!("  scripted EDIT:     {:?}", score_response(DialogAct::Edit, "ok"));
        println!("  scripted QUESTION: {:?}", score_response(DialogAct::Question, "which one?"));
        println!("  designer {} {:?}: {:?}", reply.act, reply.utterance, score_response(reply.act, &reply.utterance));
    }
    Ok(())
}
