//! Persists dispatcher events to a directory, restarts from it, and checks
//! the recovered state against the live one.
//!
//! cargo run --example event_replay -- [data_dir]

use chatcrowd::dialog::{DialogAct, Role};
use chatcrowd::dispatch::{replay, DispatchConfig, Dispatcher, EventStore, Submission, EVENT_LOG};
use chatcrowd::layout::generate_random_shape_layout;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("chatcrowd-replay"), Into::into);
    let _ = std::fs::remove_dir_all(&dir);
    let config = DispatchConfig { data_dir: Some(dir.clone()), snapshot_every: 4, ..Default::default() };

    let live = {
        let d = Dispatcher::open(config.clone())?;
        for seed in 0..3 {
            d.create_session(generate_random_shape_layout(seed), seed)?;
        }
        let job = d.claim("alice", Role::Director, 10)?.expect("an open director job");
        let sub = Submission { worker_id: "alice".into(), act: Some(DialogAct::Instruct), utterance: "add a red circle at row 1 column 1".into(), canvas: None };
        d.submit(&job.job_id, sub, 20)?;
        d.claim("bob", Role::Designer, 30)?;
        d.canonical_state()
    };

    let restarted = Dispatcher::open(config)?;
    let from_scratch = replay(&EventStore::open(&dir)?.events)?;
    println!("{} events in {}", restarted.events().len(), dir.join(EVENT_LOG).display());
    println!("restart matches live state: {}", restarted.canonical_state() == live);
    println!("replay from the log alone matches: {}", from_scratch.canonical_json() == live);
    Ok(())
}
