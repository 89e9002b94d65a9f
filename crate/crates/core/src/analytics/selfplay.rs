//! Self-play: a template director and the rule-based designer working
//! through the dispatcher as two ordinary workers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::stats::instruction_turns;
use super::AnalyticsError;
use crate::agents::{designer_lexicon, next_instruction, respond, unmatched_boxes, TemplateCatalog};
use crate::dialog::{check_termination, DialogAct, MatchNow, Role, Status};
use crate::dispatch::{DispatchConfig, Dispatcher, Event, ExportRecord, JobView, Submission};
use crate::layout::{
    exact_match, generate_pattern_shape_layout, generate_random_shape_layout, BBox, CocoObject, Layout, LayoutKind,
    PatternRules, Scenario, COCO_CATEGORY_NAMES,
};

/// Sessions still running after this many director instruction turns are abandoned.
pub const MAX_ROUNDS: usize = 50;

const DIRECTOR: &str = "director-bot";
const DESIGNER: &str = "designer-bot";

#[derive(Debug, Clone, Default)]
pub struct SelfPlayConfig {
    /// Dispatcher settings; the seed is replaced by the run seed.
    pub dispatch: DispatchConfig,
    pub templates: TemplateCatalog,
    pub pattern_rules: PatternRules,
    /// Keep every payload shown to the designer worker (for auditing).
    pub capture_designer_payloads: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfPlaySession {
    pub session_id: String,
    pub objects: usize,
    /// Director instruction turns, probes excluded.
    pub rounds: usize,
    pub turns: usize,
    pub probes: u32,
    pub status: Status,
    pub match_now: MatchNow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfPlayReport {
    pub scenario: Scenario,
    pub n: usize,
    pub seed: u64,
    pub completed: usize,
    pub abandoned: usize,
    pub mean_rounds: f64,
    pub mean_objects: f64,
    pub sessions: Vec<SelfPlaySession>,
    #[serde(skip)]
    pub transcripts: Vec<ExportRecord>,
    #[serde(skip)]
    pub events: Vec<Event>,
    #[serde(skip)]
    pub designer_payloads: Vec<String>,
}

/// A random box layout meeting the scenario's instance and class counts,
/// labeled with COCO category names.
pub fn random_coco_reference(scenario: Scenario, seed: u64) -> Layout {
    let (classes, instances) = match scenario {
        Scenario::CocoComplex => (6, 6..=8),
        _ => (3, 3..=4),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels: Vec<&str> = COCO_CATEGORY_NAMES.choose_multiple(&mut rng, classes).copied().collect();
    let count = rng.gen_range(instances);
    let objects = (0..count)
        .map(|i| {
            let label = if i < classes { labels[i] } else { labels[rng.gen_range(0..classes)] };
            let (w, h) = (rng.gen_range(0.1..0.3), rng.gen_range(0.1..0.3));
            let bbox = BBox::new(rng.gen_range(0.0..1.0 - w), rng.gen_range(0.0..1.0 - h), w, h);
            CocoObject::new(i as u32 + 1, label, bbox)
        })
        .collect();
    Layout::coco(scenario, objects).expect("generated boxes are in bounds")
}

fn reference_for(scenario: Scenario, seed: u64, rules: &PatternRules) -> Result<Layout, AnalyticsError> {
    Ok(match scenario {
        Scenario::ShapeRandom => generate_random_shape_layout(seed),
        Scenario::ShapePattern => generate_pattern_shape_layout(seed, rules)
            .map_err(|reason| AnalyticsError::BadRecord { line: 0, reason })?,
        Scenario::CocoSimple | Scenario::CocoComplex => random_coco_reference(scenario, seed),
    })
}

fn turn_seed(seed: u64, job: &JobView) -> u64 {
    let session: u64 = job.session_id.bytes().fold(0, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
    seed ^ session.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ job.turn_index as u64
}

fn director_submission(job: &JobView, seed: u64, templates: &TemplateCatalog) -> Result<Submission, AnalyticsError> {
    let ctx = &job.context;
    let reference = ctx.reference.as_ref().expect("director jobs carry the reference");
    let done = match reference.kind() {
        LayoutKind::Shape2d => exact_match(&ctx.canvas, reference).unwrap_or(false),
        LayoutKind::Coco => {
            let (missing, surplus) = unmatched_boxes(reference, &ctx.canvas);
            missing.is_empty() && surplus.is_empty()
        }
    };
    let (act, utterance) = if done {
        (DialogAct::ConfirmDone, "done".to_string())
    } else {
        (DialogAct::Instruct, next_instruction(reference, &ctx.canvas, turn_seed(seed, job), templates)?.utterance)
    };
    Ok(Submission { worker_id: DIRECTOR.into(), act: Some(act), utterance, canvas: None })
}

fn designer_submission(job: &JobView, seed: u64) -> Submission {
    let ctx = &job.context;
    let instruction = ctx.transcript.iter().rev().find(|t| t.role == Role::Director).map_or("", |t| t.utterance.as_str());
    let mv = respond(instruction, &ctx.canvas, turn_seed(seed, job), &designer_lexicon());
    let utterance = if mv.act == DialogAct::Edit { "ok".to_string() } else { mv.utterance };
    Submission { worker_id: DESIGNER.into(), act: Some(mv.act), utterance, canvas: Some(mv.canvas) }
}

/// Runs `n` sessions of `scenario` to completion through a fresh in-memory
/// dispatcher. Deterministic for a fixed seed and config; time is a logical
/// clock advanced once per API call.
pub fn run_selfplay(scenario: Scenario, n: usize, seed: u64, config: &SelfPlayConfig) -> Result<SelfPlayReport, AnalyticsError> {
    let dispatcher = Dispatcher::new(DispatchConfig { seed, ..config.dispatch.clone() });
    let mut clock = 0u64;
    let mut tick = || {
        clock += 1;
        clock
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let reference = reference_for(scenario, rng.gen(), &config.pattern_rules)?;
        dispatcher.create_session(reference, tick())?;
    }

    let mut payloads = Vec::new();
    loop {
        let mut progressed = false;
        while let Some(job) = dispatcher.claim(DIRECTOR, Role::Director, tick())? {
            progressed = true;
            let rounds = job.context.transcript.iter().filter(|t| t.role == Role::Director && t.act.opens_round()).count();
            if rounds >= MAX_ROUNDS + config.dispatch.probe_max_per_session as usize {
                dispatcher.abandon_session(&job.session_id, "round limit", tick())?;
                continue;
            }
            let submission = director_submission(&job, seed, &config.templates)?;
            let outcome = dispatcher.submit(&job.job_id, submission, tick())?;
            if !outcome.accepted {
                dispatcher.abandon_session(&job.session_id, &format!("director turn rejected: {:?}", outcome.notes), tick())?;
            }
        }
        while let Some(job) = dispatcher.claim(DESIGNER, Role::Designer, tick())? {
            progressed = true;
            if config.capture_designer_payloads {
                payloads.push(serde_json::to_string(&job).expect("views serialize"));
            }
            let outcome = dispatcher.submit(&job.job_id, designer_submission(&job, seed), tick())?;
            if config.capture_designer_payloads {
                payloads.push(serde_json::to_string(&outcome).expect("outcomes serialize"));
            }
            if !outcome.accepted {
                dispatcher.abandon_session(&job.session_id, &format!("designer turn rejected: {:?}", outcome.notes), tick())?;
            }
        }
        if !progressed {
            break;
        }
    }

    let state = dispatcher.state();
    let mut sessions = Vec::new();
    let mut transcripts = Vec::new();
    for (id, record) in &state.sessions {
        let dialog = &record.dialog;
        sessions.push(SelfPlaySession {
            session_id: id.clone(),
            objects: dialog.reference.len(),
            rounds: instruction_turns(&dialog.transcript).count(),
            turns: dialog.transcript.len(),
            probes: record.probes_injected,
            status: dialog.status,
            match_now: check_termination(dialog).match_now,
        });
        transcripts.push(ExportRecord {
            session_id: id.clone(),
            scenario: dialog.scenario,
            reference: dialog.reference.clone(),
            turns: dialog.transcript.clone(),
        });
    }
    let mean = |f: fn(&SelfPlaySession) -> usize| {
        if sessions.is_empty() {
            0.0
        } else {
            sessions.iter().map(f).sum::<usize>() as f64 / sessions.len() as f64
        }
    };
    Ok(SelfPlayReport {
        scenario,
        n,
        seed,
        completed: sessions.iter().filter(|s| s.status == Status::Completed).count(),
        abandoned: sessions.iter().filter(|s| s.status == Status::Abandoned).count(),
        mean_rounds: mean(|s| s.rounds),
        mean_objects: mean(|s| s.objects),
        sessions,
        transcripts,
        events: dispatcher.events(),
        designer_payloads: payloads,
    })
}
