//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use chatcrowd::agents::{designer_lexicon, ground_instruction, make_probe, score_response, ProbeKind, ProbeOutcome};
use chatcrowd::analytics::{duration_stats, instruction_efficiency, run_selfplay, word_usage, SelfPlayConfig};
use chatcrowd::dialog::{DialogAct, Status};
use chatcrowd::dispatch::EventKind;
use chatcrowd::layout::{
    exact_match, generate_pattern_shape_layout, generate_random_shape_layout, ingest_coco_annotations, Layout, PatternRules,
    Scenario,
};
use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn generation_constraints() -> Outcome {
    for seed in 0..10_000u64 {
        let layout = generate_random_shape_layout(seed);
        let objects = layout.shapes().unwrap();
        let cells: BTreeSet<(u8, u8)> = objects.iter().map(|o| (o.cell.row, o.cell.col)).collect();
        ensure((4..=6).contains(&objects.len()), || format!("seed {seed}: {} objects", objects.len()))?;
        ensure(cells.len() == objects.len(), || format!("seed {seed}: shared cell"))?;
    }
    let text = std::fs::read_to_string(fixture("coco_20.json")).unwrap();
    let mut emitted = 0;
    for (scenario, instances, classes, images) in [
        (Scenario::CocoSimple, 3..=4, 3, &COCO_SIMPLE_IMAGES[..]),
        (Scenario::CocoComplex, 6..=8, 6, &COCO_COMPLEX_IMAGES[..]),
    ] {
        let report = ingest_coco_annotations(&text, scenario).map_err(|e| e.to_string())?;
        let ids: Vec<u64> = report.layouts.iter().map(|l| l.image_id).collect();
        ensure(ids == images, || format!("{scenario}: images {ids:?}, expected {images:?}"))?;
        for l in &report.layouts {
            let boxes = l.layout.boxes().unwrap();
            let labels: BTreeSet<&str> = boxes.iter().map(|b| b.class_label.as_str()).collect();
            ensure(instances.contains(&boxes.len()) && labels.len() == classes, || {
                format!("{scenario} image {}: {} instances of {} classes", l.image_id, boxes.len(), labels.len())
            })?;
        }
        emitted += ids.len();
    }
    Ok(format!("10000 random layouts ok; {emitted} coco layouts ok"))
}

fn pattern_bias() -> Outcome {
    let rules = PatternRules::default();
    let (mut pattern, mut random) = (0.0, 0.0);
    for seed in 0..1000u64 {
        pattern += brute_adjacency(&generate_pattern_shape_layout(seed, &rules).map_err(|e| e.to_string())?);
        random += brute_adjacency(&generate_random_shape_layout(seed));
    }
    let (pattern, random) = (pattern / 1000.0, random / 1000.0);
    ensure(pattern > random, || format!("pattern {pattern:.3} <= random {random:.3}"))?;
    Ok(format!("mean adjacency pattern {pattern:.3} > random {random:.3}"))
}

fn parser_equivalence() -> Outcome {
    let rendered = enumerate_shape_instructions();
    let errors = shape_parse_errors(&rendered);
    ensure(errors.is_empty(), || format!("{} parse errors, first: {}", errors.len(), errors[0]))?;
    let (right, total) = dialog_act_accuracy();
    ensure(total == 60, || format!("act fixture has {total} utterances"))?;
    ensure(right * 10 >= total * 9, || format!("act agreement {right}/{total}"))?;
    Ok(format!("{} instructions, 0 errors; act agreement {right}/{total}", rendered.len()))
}

/// Largest number of canvas objects absent from the reference at any point.
fn surplus(reference: &Layout, canvases: &[Layout]) -> usize {
    let wanted = triples(reference);
    canvases.iter().map(|c| triples(c).difference(&wanted).count()).max().unwrap_or(0)
}

fn selfplay_completion() -> Outcome {
    let mut summary = Vec::new();
    for scenario in [Scenario::ShapeRandom, Scenario::ShapePattern] {
        let report = run_selfplay(scenario, 100, 7, &SelfPlayConfig::default()).map_err(|e| e.to_string())?;
        ensure(report.completed == 100, || format!("{scenario}: {}/100 completed", report.completed))?;
        for (session, record) in report.sessions.iter().zip(&report.transcripts) {
            let last = &record.turns.last().unwrap();
            ensure(session.status == Status::Completed && last.act == DialogAct::ConfirmDone, || {
                format!("{}: {:?}", session.session_id, session.status)
            })?;
            ensure(exact_match(&record.reference, &last.canvas_after).unwrap(), || format!("{}: canvas differs", session.session_id))?;
            let bound = session.objects + surplus(&record.reference, &canvases_of(record));
            ensure(session.rounds <= bound, || format!("{}: {} rounds > {bound}", session.session_id, session.rounds))?;
        }
        summary.push(format!("{scenario} 100/100 (mean rounds {:.2})", report.mean_rounds));
    }
    Ok(summary.join(", "))
}

fn probe_discipline() -> Outcome {
    let lexicon = designer_lexicon();
    let mut made = 0;
    let mut seed = 0u64;
    while made < 500 {
        let canvas = if seed % 4 == 3 {
            chatcrowd::analytics::random_coco_reference(Scenario::CocoSimple, seed)
        } else {
            generate_random_shape_layout(seed)
        };
        let kind = ProbeKind::ALL[(seed % 3) as usize];
        seed += 1;
        let probe = make_probe(&canvas, kind, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(!ground_instruction(&probe.utterance, &canvas, &lexicon).is_executable(), || probe.utterance.clone())?;
        ensure(probe_defect(&canvas, &probe.utterance).is_some(), || format!("oracle finds no defect in {:?}", probe.utterance))?;
        ensure(score_response(DialogAct::Edit, "ok") == ProbeOutcome::Failed, || "EDIT passed".into())?;
        ensure(score_response(DialogAct::Question, "which one?") == ProbeOutcome::Passed, || "QUESTION failed".into())?;
        made += 1;
    }
    // probes injected by the dispatcher, checked against the canvas they were shown on
    let mut injected = 0;
    for run_seed in [1, 2, 3] {
        let run = run_harness(run_seed, 1500);
        for e in run.dispatcher.events() {
            if let EventKind::ProbeInjected { probe, turn, .. } = &e.kind {
                ensure(!ground_instruction(&probe.utterance, &turn.canvas_after, &lexicon).is_executable(), || probe.utterance.clone())?;
                injected += 1;
            }
            if let EventKind::TurnValidated { turn, probe_outcome: Some(outcome), .. } = &e.kind {
                let expected = score_response(turn.act, &turn.utterance);
                ensure(*outcome == expected, || format!("turn {}: recorded {outcome:?}", turn.index))?;
                if turn.act == DialogAct::Edit {
                    ensure(*outcome == ProbeOutcome::Failed, || "EDIT on a probe recorded as passed".into())?;
                }
            }
        }
    }
    ensure(injected > 0, || "harness injected no probes".into())?;
    Ok(format!("500 generated and {injected} injected probes non-executable; scoring 100%"))
}

fn dispatcher_safety() -> Outcome {
    let mut ops = 0;
    for seed in [1, 2, 3, 4, 5] {
        let run = run_harness(seed, 2000);
        let events = run.dispatcher.events();
        let doubles = double_leases(&events);
        ensure(doubles == 0, || format!("seed {seed}: {doubles} double leases"))?;
        let problems = protocol_violations(&events);
        ensure(problems.is_empty(), || format!("seed {seed}: {}", problems[0]))?;
        ensure(replay_matches_live(&run), || format!("seed {seed}: replay differs from live state"))?;
        ops += run.operations;
    }
    Ok(format!("{ops} operations, 0 double leases, 0 violations, replay byte-equal"))
}

fn information_hiding() -> Outcome {
    let mut scanned = 0;
    for seed in [1, 2, 3, 4, 5] {
        let run = run_harness(seed, 2000);
        let leaks = harness_payload_leaks(&run);
        ensure(leaks.is_empty(), || format!("seed {seed}: {}", leaks[0]))?;
        scanned += run.designer_payloads.len();
    }
    let config = SelfPlayConfig { capture_designer_payloads: true, ..Default::default() };
    for scenario in [Scenario::ShapeRandom, Scenario::CocoComplex] {
        let report = run_selfplay(scenario, 20, 3, &config).map_err(|e| e.to_string())?;
        let seen: Vec<Layout> = report.transcripts.iter().flat_map(canvases_of).collect();
        for payload in &report.designer_payloads {
            let leaks = designer_payload_leaks(payload, &seen);
            ensure(leaks.is_empty(), || format!("{scenario} self-play: {}", leaks[0]))?;
        }
        scanned += report.designer_payloads.len();
    }
    Ok(format!("{scanned} designer payloads, 0 leaks"))
}

fn analytics_fixtures() -> Outcome {
    let lexicon = designer_lexicon();
    let d = duration_stats(&duration_fixture()).map_err(|e| e.to_string())?;
    let s = &d[&Scenario::ShapeRandom];
    ensure((s.sessions, s.instructions) == (2, 8), || format!("{} sessions, {} instructions", s.sessions, s.instructions))?;
    ensure((s.mean_rounds, s.mean_words, s.std_words) == (4.0, 5.5, 3.5f64.sqrt()), || format!("{s:?}"))?;
    let u = word_usage(&word_usage_fixture(), &lexicon).map_err(|e| e.to_string())?;
    ensure((u.location, u.color, u.shape) == (0.8, 0.7, 0.9), || format!("{u:?}"))?;
    let e = instruction_efficiency(&efficiency_fixture());
    ensure(e.histogram.iter().map(|(k, v)| (*k, *v)).collect::<Vec<_>>() == [(1, 8), (4, 2)], || format!("{e:?}"))?;
    ensure(e.p_more_than_three == 0.2, || format!("{e:?}"))?;
    let report = run_selfplay(Scenario::ShapeRandom, 50, 11, &SelfPlayConfig::default()).map_err(|e| e.to_string())?;
    let synthetic = word_usage(&report.transcripts, &lexicon).map_err(|e| e.to_string())?;
    ensure((synthetic.location, synthetic.color, synthetic.shape) == (1.0, 1.0, 1.0), || format!("{synthetic:?}"))?;
    Ok(format!("fixtures exact; synthetic word usage 1.0 over {} instructions", synthetic.instructions))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("generation constraints", generation_constraints, Some(Duration::from_secs(10))),
        ("pattern bias", pattern_bias, Some(Duration::from_secs(10))),
        ("parser oracle equivalence", parser_equivalence, Some(Duration::from_secs(5))),
        ("self-play completion", selfplay_completion, Some(Duration::from_secs(60))),
        ("probe discipline", probe_discipline, None),
        ("dispatcher safety", dispatcher_safety, None),
        ("information hiding", information_hiding, None),
        ("analytics fixtures", analytics_fixtures, None),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name} ({elapsed:.2?}): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL  {name} ({elapsed:.2?}): {reason}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
