//! Fixtures, brute-force oracles and the randomized dispatcher harness shared
//! by the integration tests and the acceptance suite.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use chatcrowd::agents::{designer_lexicon, next_instruction, respond, TemplateCatalog};
use chatcrowd::dialog::{append_turn, new_session, DialogAct, DialogState, Origin, Role};
use chatcrowd::dispatch::{DispatchConfig, Dispatcher, Event, EventKind, ExportRecord, Submission};
use chatcrowd::layout::{
    generate_random_shape_layout, Cell, Color, EditOp, Layout, Scenario, Shape, ShapeObject, GRID_SIZE,
};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Images of coco_20.json that qualify, enumerated by hand from its design
/// table (instances / distinct classes per image).
pub const COCO_SIMPLE_IMAGES: [u64; 5] = [1, 2, 11, 15, 19];
pub const COCO_COMPLEX_IMAGES: [u64; 4] = [6, 7, 16, 20];

pub fn cell(r: u8, c: u8) -> Cell {
    Cell::new(r, c).unwrap()
}

pub fn shape(shape: Shape, color: Color, r: u8, c: u8) -> ShapeObject {
    ShapeObject::new(shape, color, cell(r, c))
}

// ---------------------------------------------------------------- oracles

/// (shape, color, row, col) set of a grid layout.
pub fn triples(layout: &Layout) -> BTreeSet<(String, String, u8, u8)> {
    layout
        .shapes()
        .unwrap()
        .iter()
        .map(|o| (o.shape.to_string(), o.color.to_string(), o.cell.row, o.cell.col))
        .collect()
}

/// Fraction of objects with an occupied 4-neighbor, by comparing every pair.
pub fn brute_adjacency(layout: &Layout) -> f64 {
    let cells: Vec<(i32, i32)> = layout.shapes().unwrap().iter().map(|o| (o.cell.row as i32, o.cell.col as i32)).collect();
    if cells.is_empty() {
        return 0.0;
    }
    let adjacent = cells
        .iter()
        .filter(|a| cells.iter().any(|b| (a.0 - b.0).abs() + (a.1 - b.1).abs() == 1))
        .count();
    adjacent as f64 / cells.len() as f64
}

/// Folds shape edits over a plain cell map, independent of the library's apply.
pub fn oracle_apply(layout: &Layout, edits: &[EditOp]) -> BTreeMap<(u8, u8), (String, String)> {
    use chatcrowd::layout::{Destination, NewObject, Target};
    let mut grid: BTreeMap<(u8, u8), (String, String)> = layout
        .shapes()
        .unwrap()
        .iter()
        .map(|o| ((o.cell.row, o.cell.col), (o.shape.to_string(), o.color.to_string())))
        .collect();
    for op in edits {
        match op {
            EditOp::Add { object: NewObject::Shape(o) } => {
                grid.insert((o.cell.row, o.cell.col), (o.shape.to_string(), o.color.to_string()));
            }
            EditOp::Remove { target: Target::Cell(c) } => {
                grid.remove(&(c.row, c.col));
            }
            EditOp::Move { target: Target::Cell(from), to: Destination::Cell(to) } => {
                if let Some(v) = grid.remove(&(from.row, from.col)) {
                    grid.insert((to.row, to.col), v);
                }
            }
            other => panic!("not a grid edit: {other:?}"),
        }
    }
    grid
}

pub fn grid_of(layout: &Layout) -> BTreeMap<(u8, u8), (String, String)> {
    oracle_apply(layout, &[])
}

/// Size of the symmetric difference of two grids' (cell, shape, color) sets.
pub fn symmetric_difference(a: &Layout, b: &Layout) -> usize {
    triples(a).symmetric_difference(&triples(b)).count()
}

// ----------------------------------------------------- dialog-act fixture

pub struct LabeledUtterance {
    pub role: Role,
    pub gold: DialogAct,
    pub text: String,
}

pub fn dialog_act_fixture() -> Vec<LabeledUtterance> {
    let text = std::fs::read_to_string(fixture("dialog_acts.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let cols: Vec<&str> = l.splitn(3, '\t').collect();
            let gold = serde_json::from_value(Value::String(cols[1].to_string())).unwrap();
            LabeledUtterance { role: cols[0].parse().unwrap(), gold, text: cols[2].to_string() }
        })
        .collect()
}

// ---------------------------------------------------- analytics fixtures

pub struct Step {
    pub role: Role,
    pub act: DialogAct,
    pub utterance: &'static str,
    pub edits: Vec<EditOp>,
    pub origin: Origin,
}

pub fn say(role: Role, act: DialogAct, utterance: &'static str) -> Step {
    Step { role, act, utterance, edits: vec![], origin: Origin::Human }
}

pub fn edit(edits: Vec<EditOp>) -> Step {
    Step { role: Role::Designer, act: DialogAct::Edit, utterance: "", edits, origin: Origin::Human }
}

pub fn ok() -> Step {
    say(Role::Designer, DialogAct::Other, "ok")
}

/// Builds a protocol-valid transcript by appending each step.
pub fn build_session(id: &str, reference: Layout, steps: Vec<Step>) -> (DialogState, ExportRecord) {
    let mut state = new_session(id, reference.clone());
    for (i, s) in steps.into_iter().enumerate() {
        let author = if s.origin == Origin::Synthetic { "synthetic-generator" } else { s.role.as_str() };
        let turn = state.compose_turn(s.role, s.act, s.utterance, s.edits, author, s.origin, i as u64).unwrap();
        state = append_turn(&state, turn).unwrap();
    }
    let record = ExportRecord {
        session_id: id.into(),
        scenario: reference.scenario(),
        reference,
        turns: state.transcript.clone(),
    };
    (state, record)
}

fn one_object_reference() -> Layout {
    Layout::shape2d(Scenario::ShapeRandom, vec![shape(Shape::Circle, Color::Red, 0, 0)]).unwrap()
}

/// Two sessions with 3 and 5 instruction rounds. Instruction word counts are
/// 4, 9, 5 and 4, 4, 6, 8, 4: mean 5.5, population variance 28 / 8 = 3.5.
/// Session A also carries an injected probe and B an ANSWER turn; neither counts.
pub fn duration_fixture() -> Vec<ExportRecord> {
    use DialogAct::*;
    use Role::*;
    let probe = Step { origin: Origin::Synthetic, ..say(Director, Instruct, "add a red circle") };
    let (_, a) = build_session(
        "a",
        one_object_reference(),
        vec![
            say(Director, Instruct, "add a red circle"),
            ok(),
            probe,
            say(Designer, Question, "where exactly?"),
            say(Director, Instruct, "add a blue square at row 2 column 3"),
            ok(),
            say(Director, Instruct, "please add a green circle"),
            ok(),
        ],
    );
    let (_, b) = build_session(
        "b",
        one_object_reference(),
        vec![
            say(Director, Instruct, "add a red circle"),
            say(Designer, Question, "which one?"),
            say(Director, Answer, "the one at row 1 column 1"),
            ok(),
            say(Director, Instruct, "remove the blue square"),
            ok(),
            say(Director, Instruct, "put the green triangle up there"),
            ok(),
            say(Director, SuggestFix, "no, move the green triangle one cell left"),
            ok(),
            say(Director, Instruct, "add a red square"),
            ok(),
        ],
    );
    vec![a, b]
}

/// Ten instructions: 8 mention a location, 7 a color, 9 a shape.
pub const WORD_USAGE_INSTRUCTIONS: [&str; 10] = [
    "add a red circle at row 1 column 1",
    "add a blue square at row 2 column 2",
    "put a green triangle in the top left",
    "add a red circle",
    "add a blue box at row 3 column 3",
    "place it at row 4 column 4",
    "draw a triangle at row 5 column 5",
    "move the green circle to row 1 column 2",
    "remove the blue triangle",
    "add a square next to the red circle",
];

pub fn word_usage_fixture() -> Vec<ExportRecord> {
    let mut steps = Vec::new();
    for u in WORD_USAGE_INSTRUCTIONS {
        steps.push(say(Role::Director, DialogAct::Instruct, u));
        steps.push(ok());
    }
    vec![build_session("w", one_object_reference(), steps).1]
}

/// Ten EDIT turns: eight touch one object, two touch four.
pub fn efficiency_fixture() -> Vec<ExportRecord> {
    use Color::*;
    use Shape::*;
    let d = || say(Role::Director, DialogAct::Instruct, "go on");
    let edits = vec![
        vec![
            EditOp::add_shape(shape(Circle, Red, 0, 0)),
            EditOp::add_shape(shape(Circle, Blue, 0, 1)),
            EditOp::add_shape(shape(Square, Red, 0, 2)),
            EditOp::add_shape(shape(Triangle, Green, 0, 3)),
        ],
        vec![EditOp::move_cell(cell(0, 0), cell(1, 0))],
        vec![EditOp::remove_cell(cell(0, 1))],
        vec![EditOp::add_shape(shape(Square, Blue, 2, 2))],
        vec![EditOp::add_shape(shape(Square, Green, 2, 3))],
        vec![EditOp::move_cell(cell(2, 2), cell(3, 3))],
        vec![EditOp::add_shape(shape(Circle, Green, 4, 4))],
        vec![EditOp::move_cell(cell(1, 0), cell(1, 1))],
        vec![EditOp::remove_cell(cell(4, 4))],
        // move + remove + an add that replaces the occupant of (0,3)
        vec![
            EditOp::move_cell(cell(3, 3), cell(4, 0)),
            EditOp::remove_cell(cell(0, 2)),
            EditOp::add_shape(shape(Triangle, Blue, 0, 3)),
        ],
    ];
    let mut steps = Vec::new();
    for e in edits {
        steps.push(d());
        steps.push(edit(e));
    }
    vec![build_session("e", one_object_reference(), steps).1]
}

// ------------------------------------------------- information hiding

fn collect(value: &Value, keys: &mut BTreeSet<String>, layouts: &mut Vec<Value>) {
    match value {
        Value::Object(map) => {
            if map.contains_key("kind") && map.contains_key("objects") && map.contains_key("scenario") {
                layouts.push(value.clone());
            }
            for (k, v) in map {
                keys.insert(k.clone());
                collect(v, keys, layouts);
            }
        }
        Value::Array(items) => items.iter().for_each(|v| collect(v, keys, layouts)),
        _ => {}
    }
}

/// Problems found in one designer-facing payload: forbidden keys, or a
/// layout that is not a canvas the designer has been shown.
pub fn designer_payload_leaks(payload: &str, seen_canvases: &[Layout]) -> Vec<String> {
    let value: Value = serde_json::from_str(payload).unwrap();
    let (mut keys, mut layouts) = (BTreeSet::new(), Vec::new());
    collect(&value, &mut keys, &mut layouts);
    let mut leaks: Vec<String> = ["reference", "match_now", "origin", "author", "probe", "probe_id"]
        .iter()
        .filter(|k| keys.contains(**k))
        .map(|k| format!("key `{k}`"))
        .collect();
    for l in layouts {
        let layout: Layout = serde_json::from_value(l).unwrap();
        if !seen_canvases.contains(&layout) {
            leaks.push(format!("unseen layout {}", serde_json::to_string(&layout).unwrap()));
        }
    }
    leaks
}

/// Every canvas of a transcript, starting with the empty one.
pub fn canvases_of(record: &ExportRecord) -> Vec<Layout> {
    std::iter::once(record.reference.empty_like()).chain(record.turns.iter().map(|t| t.canvas_after.clone())).collect()
}

// ------------------------------------------------- dispatcher harness

pub struct HarnessRun {
    pub dispatcher: Dispatcher,
    pub operations: usize,
    /// (session id, serialized payload) for every designer-facing response.
    pub designer_payloads: Vec<(String, String)>,
}

const WORKERS: [&str; 5] = ["w0", "w1", "w2", "w3", "w4"];

fn random_canvas_change(canvas: &Layout, rng: &mut ChaCha8Rng) -> Layout {
    let mut objects = canvas.shapes().unwrap().to_vec();
    let c = Cell::new(rng.gen_range(0..GRID_SIZE), rng.gen_range(0..GRID_SIZE)).unwrap();
    objects.retain(|o| o.cell != c);
    if rng.gen_bool(0.7) {
        objects.push(ShapeObject::new(*Shape::ALL.choose(rng).unwrap(), *Color::ALL.choose(rng).unwrap(), c));
    }
    Layout::shape2d(canvas.scenario(), objects).unwrap()
}

/// Random interleaving of session creation, claims (by random workers),
/// submissions (well-formed, wrong-worker, garbage), expiries and clock jumps.
pub fn run_harness(seed: u64, operations: usize) -> HarnessRun {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = DispatchConfig { lease_minutes: 1, probe_probability: 0.3, seed, ..Default::default() };
    let lease_ms = config.lease_ms();
    let d = Dispatcher::new(config);
    let lexicon = designer_lexicon();
    let templates = TemplateCatalog::default();
    let mut now = 0u64;
    let mut held: Vec<(String, String, chatcrowd::dispatch::JobView)> = Vec::new();
    let mut payloads = Vec::new();

    for op in 0..operations {
        now += rng.gen_range(1..lease_ms / 4);
        if rng.gen_bool(0.03) {
            now += lease_ms;
        }
        match rng.gen_range(0..100) {
            0..=5 => {
                d.create_session(generate_random_shape_layout(rng.gen()), now).unwrap();
            }
            6..=40 => {
                let worker = *WORKERS.choose(&mut rng).unwrap();
                let role = if rng.gen_bool(0.5) { Role::Director } else { Role::Designer };
                if let Some(job) = d.claim(worker, role, now).unwrap() {
                    if role == Role::Designer {
                        payloads.push((job.session_id.clone(), serde_json::to_string(&job).unwrap()));
                    }
                    held.push((job.job_id.clone(), worker.to_string(), job));
                }
            }
            41..=85 if !held.is_empty() => {
                let (job_id, holder, job) = held.swap_remove(rng.gen_range(0..held.len()));
                let worker = if rng.gen_bool(0.05) { WORKERS.choose(&mut rng).unwrap().to_string() } else { holder };
                let ctx = &job.context;
                let submission = match (job.role, rng.gen_range(0..10)) {
                    (Role::Director, 0..=6) => {
                        let reference = ctx.reference.as_ref().unwrap();
                        match next_instruction(reference, &ctx.canvas, op as u64, &templates) {
                            Ok(i) => Submission { worker_id: worker.clone(), act: None, utterance: i.utterance, canvas: None },
                            Err(_) => Submission { worker_id: worker.clone(), act: Some(DialogAct::ConfirmDone), utterance: "done".into(), canvas: None },
                        }
                    }
                    (Role::Director, 7) => Submission { worker_id: worker.clone(), act: Some(DialogAct::ConfirmDone), utterance: "done".into(), canvas: None },
                    (Role::Director, 8) => Submission { worker_id: worker.clone(), act: Some(DialogAct::Answer), utterance: "at row 2 column 2".into(), canvas: None },
                    (Role::Director, _) => Submission {
                        worker_id: worker.clone(),
                        act: None,
                        utterance: "no, wrong place".into(),
                        canvas: Some(random_canvas_change(&ctx.canvas, &mut rng)),
                    },
                    (Role::Designer, 0..=5) => {
                        let instruction = ctx.transcript.iter().rev().find(|t| t.role == Role::Director).map_or("", |t| t.utterance.as_str());
                        let mv = respond(instruction, &ctx.canvas, op as u64, &lexicon);
                        Submission { worker_id: worker.clone(), act: Some(mv.act), utterance: mv.utterance, canvas: Some(mv.canvas) }
                    }
                    (Role::Designer, 6..=7) => Submission {
                        worker_id: worker.clone(),
                        act: None,
                        utterance: String::new(),
                        canvas: Some(random_canvas_change(&ctx.canvas, &mut rng)),
                    },
                    (Role::Designer, 8) => Submission {
                        worker_id: worker.clone(),
                        act: Some(DialogAct::Question),
                        utterance: "which one?".into(),
                        canvas: Some(random_canvas_change(&ctx.canvas, &mut rng)),
                    },
                    (Role::Designer, _) => Submission { worker_id: worker.clone(), act: Some(DialogAct::Other), utterance: "there is no such shape".into(), canvas: None },
                };
                let result = d.submit(&job_id, submission, now);
                if job.role == Role::Designer {
                    if let Ok(outcome) = &result {
                        payloads.push((job.session_id.clone(), serde_json::to_string(outcome).unwrap()));
                    }
                }
                if let Ok(view) = d.session_view(&job.session_id, Role::Designer) {
                    payloads.push((job.session_id.clone(), serde_json::to_string(&view).unwrap()));
                }
            }
            _ => {
                d.expire_leases(now).unwrap();
            }
        }
    }
    HarnessRun { dispatcher: d, operations, designer_payloads: payloads }
}

/// Scans the event log for a lease granted while another is still held.
pub fn double_leases(events: &[Event]) -> usize {
    let mut holder: BTreeMap<&str, &str> = BTreeMap::new();
    let mut session_of: BTreeMap<&str, &str> = BTreeMap::new();
    let mut violations = 0;
    for e in events {
        match &e.kind {
            EventKind::JobOpened { job_id, session_id, .. } => {
                session_of.insert(job_id, session_id);
            }
            EventKind::JobLeased { job_id, worker_id, .. } => {
                if holder.insert(job_id, worker_id).is_some() {
                    violations += 1;
                }
            }
            EventKind::LeaseExpired { job_id, .. } | EventKind::TurnSubmitted { job_id, .. } => {
                holder.remove(job_id.as_str());
            }
            EventKind::SessionAbandoned { session_id, .. } => {
                holder.retain(|job, _| session_of.get(job) != Some(&session_id.as_str()));
            }
            _ => {}
        }
    }
    violations
}

/// Scans the event log for protocol violations, independently of the
/// dispatcher's own checks: per session, turns alternate starting with the
/// director at dense indices; each worker turn was submitted by the lease
/// holder before expiry; CONFIRM_DONE only on a canvas equal to the reference.
pub fn protocol_violations(events: &[Event]) -> Vec<String> {
    let mut problems = Vec::new();
    let mut references: BTreeMap<String, Layout> = BTreeMap::new();
    let mut turns: BTreeMap<String, Vec<(Role, usize)>> = BTreeMap::new();
    let mut lease: BTreeMap<String, (String, u64)> = BTreeMap::new();
    let mut job_session: BTreeMap<String, String> = BTreeMap::new();
    let mut submitted: BTreeMap<String, String> = BTreeMap::new();
    let mut canvas: BTreeMap<String, Layout> = BTreeMap::new();
    let mut record = |session: &str, role: Role, index: usize, problems: &mut Vec<String>| {
        let list = turns.entry(session.to_string()).or_default();
        let expected_role = if list.len().is_multiple_of(2) { Role::Director } else { Role::Designer };
        if role != expected_role || index != list.len() {
            problems.push(format!("{session}: turn {index} by {role} out of order"));
        }
        list.push((role, index));
    };
    for e in events {
        match &e.kind {
            EventKind::SessionCreated { session_id, reference } => {
                canvas.insert(session_id.clone(), reference.empty_like());
                references.insert(session_id.clone(), reference.clone());
            }
            EventKind::JobOpened { job_id, session_id, .. } => {
                job_session.insert(job_id.clone(), session_id.clone());
            }
            EventKind::JobLeased { job_id, worker_id, expires_at } => {
                lease.insert(job_id.clone(), (worker_id.clone(), *expires_at));
            }
            EventKind::TurnSubmitted { job_id, worker_id } => {
                match lease.remove(job_id) {
                    Some((holder, expires)) if holder == *worker_id && e.timestamp <= expires => {}
                    other => problems.push(format!("{job_id}: submitted by {worker_id} under lease {other:?} at {}", e.timestamp)),
                }
                submitted.insert(job_id.clone(), worker_id.clone());
            }
            EventKind::LeaseExpired { job_id, .. } => {
                lease.remove(job_id);
            }
            EventKind::TurnValidated { job_id, worker_id, turn, .. } => {
                let session = &job_session[job_id];
                if submitted.get(job_id) != Some(worker_id) || turn.author != *worker_id {
                    problems.push(format!("{job_id}: turn author mismatch"));
                }
                record(session, turn.role, turn.index, &mut problems);
                if turn.act == DialogAct::ConfirmDone && triples(&canvas[session]) != triples(&references[session]) {
                    problems.push(format!("{session}: confirmed on a non-matching canvas"));
                }
                canvas.insert(session.clone(), turn.canvas_after.clone());
            }
            EventKind::ProbeInjected { session_id, turn, .. } => {
                if turn.origin != Origin::Synthetic {
                    problems.push(format!("{session_id}: probe turn not marked synthetic"));
                }
                record(session_id, turn.role, turn.index, &mut problems);
            }
            _ => {}
        }
    }
    problems
}

// ---------------------------------------------------- parser enumeration

/// One rendered template instruction with the attributes it was built from.
pub struct Rendered {
    pub text: String,
    pub color: Color,
    pub shape: Shape,
    pub cells: Vec<Cell>,
}

/// Every add, remove and move instruction the default templates can produce:
/// 3 shapes x 3 colors x 25 cells, and every destination for moves.
pub fn enumerate_shape_instructions() -> Vec<Rendered> {
    use chatcrowd::agents::TemplateKey;
    let catalog = TemplateCatalog::default();
    let rc = |p: &str, c: Cell| vec![(format!("{p}row"), (c.row + 1).to_string()), (format!("{p}col"), (c.col + 1).to_string())];
    let mut out = Vec::new();
    for s in Shape::ALL {
        for color in Color::ALL {
            for from in Cell::all() {
                let base = vec![("color".to_string(), color.to_string()), ("shape".to_string(), s.to_string())];
                let mut render = |key, extra: Vec<(String, String)>, cells: Vec<Cell>| {
                    let mut v = base.clone();
                    v.extend(extra);
                    let pairs: Vec<(&str, String)> = v.iter().map(|(k, x)| (k.as_str(), x.clone())).collect();
                    out.push(Rendered { text: catalog.render(key, 0, &pairs).unwrap(), color, shape: s, cells });
                };
                render(TemplateKey::Add, rc("", from), vec![from]);
                render(TemplateKey::Remove, rc("", from), vec![from]);
                for to in Cell::all().filter(|t| *t != from) {
                    let mut extra = rc("", from);
                    extra.extend(rc("to_", to));
                    render(TemplateKey::Move, extra, vec![from, to]);
                }
            }
        }
    }
    out
}

/// Count of enumerated instructions whose extracted color, shape or ordered
/// cells differ from what was rendered.
pub fn shape_parse_errors(rendered: &[Rendered]) -> Vec<String> {
    use chatcrowd::layout::LayoutKind;
    use chatcrowd::nlu::{extract_mentions, normalize, Lexicon};
    let lexicon = Lexicon::default();
    rendered
        .iter()
        .filter_map(|r| {
            let m = extract_mentions(&normalize(&r.text), LayoutKind::Shape2d, &lexicon);
            let ok = m.colors == vec![r.color] && m.shapes == vec![r.shape] && m.cells() == r.cells;
            (!ok).then(|| format!("{}: {:?}", r.text, m))
        })
        .collect()
}

/// Fraction of the labeled fixture the act classifier gets right.
pub fn dialog_act_accuracy() -> (usize, usize) {
    use chatcrowd::nlu::{classify_dialog_act, normalize};
    let fixture = dialog_act_fixture();
    let right = fixture.iter().filter(|u| classify_dialog_act(&normalize(&u.text), u.role) == u.gold).count();
    (right, fixture.len())
}

// ---------------------------------------------------- probe oracle

/// Independent check of why an utterance cannot be executed on `canvas`,
/// by plain word scanning: two colors or classes, no location words, or a
/// color and shape combination absent from the canvas.
pub fn probe_defect(canvas: &Layout, utterance: &str) -> Option<&'static str> {
    use chatcrowd::layout::COCO_CATEGORY_NAMES;
    let words: Vec<&str> = utterance.split_whitespace().collect();
    let text = format!(" {utterance} ");
    let colors: Vec<&str> = words.iter().copied().filter(|w| ["red", "blue", "green"].contains(w)).collect();
    // greedy longest match, so "teddy bear" is one class and "hot dog and dog" two
    let mut classes: Vec<String> = Vec::new();
    let mut i = 0;
    while i < words.len() {
        let longest = COCO_CATEGORY_NAMES
            .iter()
            .map(|c| c.split(' ').collect::<Vec<_>>())
            .filter(|c| words[i..].starts_with(c))
            .map(|c| c.len())
            .max();
        match longest {
            Some(n) => {
                classes.push(words[i..i + n].join(" "));
                i += n;
            }
            None => i += 1,
        }
    }
    if colors.len() >= 2 || classes.len() >= 2 {
        return Some("contradictory");
    }
    let located = words.contains(&"row") || words.contains(&"the") && (text.contains(" top") || text.contains(" bottom") || text.contains(" center") || text.contains(" middle") || text.contains(" left") || text.contains(" right"));
    if !located {
        return Some("ambiguous");
    }
    if words[0] == "move" || words[0] == "remove" {
        let absent = match canvas.shapes() {
            Some(shapes) => {
                let shape = words.iter().find(|w| ["circle", "square", "triangle"].contains(w)).copied();
                !shapes.iter().any(|o| Some(o.color.to_string().as_str()) == colors.first().copied() && Some(o.shape.to_string().as_str()) == shape)
            }
            None => !classes.iter().all(|c| canvas.class_labels().contains(c)),
        };
        if absent {
            return Some("nonviable");
        }
    }
    None
}

/// Leak scan over every designer payload captured by a harness run. The
/// allowed layouts for a session are the canvases in its transcript.
pub fn harness_payload_leaks(run: &HarnessRun) -> Vec<String> {
    let mut seen: BTreeMap<&str, Vec<Layout>> = BTreeMap::new();
    let mut leaks = Vec::new();
    for (session, payload) in &run.designer_payloads {
        let canvases = seen.entry(session).or_insert_with(|| {
            let state = run.dispatcher.state();
            let dialog = &state.sessions[session.as_str()].dialog;
            std::iter::once(dialog.reference.empty_like()).chain(dialog.transcript.iter().map(|t| t.canvas_after.clone())).collect()
        });
        leaks.extend(designer_payload_leaks(payload, canvases).into_iter().map(|l| format!("{session}: {l}")));
    }
    leaks
}

/// Replays a harness log after a JSON-lines round trip and compares the
/// canonical state with the live one.
pub fn replay_matches_live(run: &HarnessRun) -> bool {
    let lines: Vec<String> = run.dispatcher.events().iter().map(|e| serde_json::to_string(e).unwrap()).collect();
    let parsed: Vec<Event> = lines.iter().map(|l| serde_json::from_str(l).unwrap()).collect();
    chatcrowd::dispatch::replay(&parsed).unwrap().canonical_json() == run.dispatcher.canonical_state()
}
