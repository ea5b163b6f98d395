use std::sync::Arc;

use serde_json::json;

use super::*;
use crate::domain::Domain;
use crate::error::Error;
use crate::feature_space::{CaseVector, RawVector, SolutionId};
use crate::precedent::PrecedentStore;
use crate::replay::{run_script, Script};

fn domain() -> Arc<Domain<f64>> {
    Arc::new(Domain::from_json(include_str!("../../../../fixtures/respiratory.json")).unwrap())
}

fn walkthrough() -> Script<f64> {
    Script::from_json(include_str!("../../../../fixtures/walkthrough.json")).unwrap()
}

fn raw(v: serde_json::Value) -> RawVector<f64> {
    serde_json::from_value(v).unwrap()
}

fn parse(d: &Domain<f64>, v: serde_json::Value) -> CaseVector<f64> {
    d.schema().parse_vector(&raw(v)).unwrap()
}

fn allergy_case(d: &Domain<f64>) -> CaseVector<f64> {
    parse(
        d,
        json!({"general_aches": "slight", "sneezing": "yes", "headache": "small",
               "stuffy_runny_nose": "yes", "cough": "no", "allergy_anamnesis": "yes"}),
    )
}

#[test]
fn walkthrough_sequence_is_reproduced() {
    let engine = Engine::new(domain());
    let store = PrecedentStore::in_memory();
    let report = run_script(&engine, &store, &walkthrough(), None).unwrap();
    assert!(report.passed(), "{:?}", report.mismatches);
    let kinds: Vec<_> = report.lines.iter().map(|l| (l.kind, l.subject.join(","))).collect();
    assert_eq!(
        kinds,
        [
            (QuestionKind::Inconsistency, "general_aches,headache".to_owned()),
            (QuestionKind::ValueRequest, "temperature".to_owned()),
            (QuestionKind::ValueRequest, "exhaustion".to_owned()),
            (QuestionKind::RemeasureRequest, "temperature".to_owned()),
            (QuestionKind::PrecedentReview, String::new()),
        ]
    );
    let p = report.precedent.unwrap();
    assert_eq!(p.decision.as_str(), "flu");
    assert!(p.is_pending());
    assert_eq!(report.session.state, State::Closed);
}

#[test]
fn walkthrough_holds_across_seeds() {
    let engine = Engine::new(domain());
    for seed in 0..16 {
        let store = PrecedentStore::in_memory();
        let report = run_script(&engine, &store, &walkthrough(), Some(seed)).unwrap();
        assert!(report.passed(), "seed {seed}: {:?}", report.mismatches);
    }
}

#[test]
fn replay_is_deterministic() {
    use chrono::TimeZone;
    let engine = Engine::new(domain());
    let fixed = || {
        PrecedentStore::in_memory().with_clock(Arc::new(|| chrono::Utc.with_ymd_and_hms(2024, 3, 1, 9, 0, 0).unwrap()))
    };
    let a = run_script(&engine, &fixed(), &walkthrough(), Some(7)).unwrap();
    let b = run_script(&engine, &fixed(), &walkthrough(), Some(7)).unwrap();
    assert_eq!(a.lines, b.lines);
    assert_eq!(
        serde_json::to_string(&a.session.transcript).unwrap(),
        serde_json::to_string(&b.session.transcript).unwrap()
    );
}

#[test]
fn start_validates_input() {
    let d = domain();
    let engine = Engine::new(d.clone());
    let err = engine.start_session("s", "u", "cold".into(), CaseVector::new(), 0).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
    let err = engine.start_session("s", "u", "measles".into(), allergy_case(&d), 0).unwrap_err();
    assert!(matches!(err, Error::Validation(_)));
    let s = engine.start_session("s", "u", "airborne_allergy".into(), allergy_case(&d), 0).unwrap();
    assert_eq!(s.state(), State::S1Inconsistency);
    assert_eq!(s.transcript().len(), 1);
}

#[test]
fn sequencing_rules() {
    let d = domain();
    let engine = Engine::new(d.clone());
    let store = PrecedentStore::in_memory();
    let mut s = engine.start_session("s", "u", "airborne_allergy".into(), allergy_case(&d), 0).unwrap();
    let ack = |id: &str| Answer::new(id, AnswerPayload::<f64>::Acknowledge);
    assert!(matches!(engine.submit_answer(&mut s, ack("q-1"), &store), Err(Error::Sequencing(_))));
    let StepOutcome::Question(q) = engine.step(&mut s, &store).unwrap() else {
        panic!("expected the inconsistency question");
    };
    assert!(matches!(engine.step(&mut s, &store), Err(Error::Sequencing(_))));
    assert!(matches!(engine.submit_answer(&mut s, ack("q-9"), &store), Err(Error::Sequencing(_))));
    assert!(matches!(engine.finalize(&mut s, "rest"), Err(Error::Sequencing(_))));
    engine.submit_answer(&mut s, ack(&q.id), &store).unwrap();
    // acknowledged: back in S1, and the same antisyndrome is not raised again
    assert_eq!(s.state(), State::S1Inconsistency);
    assert!(!matches!(engine.step(&mut s, &store).unwrap(), StepOutcome::Question(_)));
}

#[test]
fn finalize_rules() {
    let d = domain();
    let engine = Engine::new(d.clone());
    let store = PrecedentStore::in_memory();
    let v = parse(&d, json!({"temperature": 36.6, "headache": "none", "general_aches": "none",
        "weakness": "no", "exhaustion": "none", "cough": "no", "stuffy_runny_nose": "yes",
        "sneezing": "yes", "allergy_anamnesis": "yes"}));
    let mut s = engine.start_session("s", "u", "airborne_allergy".into(), v, 0).unwrap();
    while let Prompt::Question { question } = engine.next_prompt(&mut s, &store).unwrap() {
        engine.submit_answer(&mut s, Answer::new(question.id, AnswerPayload::Acknowledge), &store).unwrap();
    }
    assert_eq!(s.state(), State::Finalize);
    assert!(matches!(engine.finalize(&mut s, "  "), Err(Error::Validation(_))));
    let draft = engine.finalize(&mut s, "clears up with antihistamines").unwrap();
    assert_eq!(draft.decision.as_str(), "airborne_allergy");
    assert_eq!(s.state(), State::Closed);
    assert!(matches!(engine.finalize(&mut s, "again"), Err(Error::Sequencing(_))));
    assert!(matches!(engine.step(&mut s, &store), Err(Error::Sequencing(_))));
}

#[test]
fn no_counter_case_in_omega_skips_distortion() {
    // typical allergy picture far from every boundary
    let d = domain();
    let engine = Engine::new(d.clone());
    let store = PrecedentStore::in_memory();
    let v = d.typical(&SolutionId::new("airborne_allergy")).unwrap().vector.clone();
    let mut s = engine.start_session("s", "u", "airborne_allergy".into(), v, 0).unwrap();
    let mut seen = Vec::new();
    loop {
        match engine.step(&mut s, &store).unwrap() {
            StepOutcome::Advanced { from, .. } => seen.push(from),
            StepOutcome::FinalizePrompt => break,
            StepOutcome::Question(q) => panic!("unexpected question {q:?}"),
        }
    }
    assert_eq!(seen, [State::S1Inconsistency, State::S2MissingInfo, State::S3Distortion]);
    assert_eq!(s.state(), State::Finalize);
}

#[test]
fn changes_reenter_s1_and_withdraw_pending() {
    let d = domain();
    let engine = Engine::new(d.clone());
    let store = PrecedentStore::in_memory();
    let mut s = engine.start_session("s", "u", "airborne_allergy".into(), allergy_case(&d), 0).unwrap();
    let Prompt::Question { question } = engine.next_prompt(&mut s, &store).unwrap() else {
        panic!()
    };
    engine.change_decision(&mut s, "cold".into()).unwrap();
    assert!(s.pending().is_none());
    assert_eq!(s.state(), State::S1Inconsistency);
    assert!(matches!(
        engine.submit_answer(&mut s, Answer::new(question.id, AnswerPayload::Acknowledge), &store),
        Err(Error::Sequencing(_))
    ));
    let Prompt::Question { question } = engine.next_prompt(&mut s, &store).unwrap() else {
        panic!()
    };
    assert_eq!(question.kind, QuestionKind::ValueRequest);
    let values = AnswerPayload::Values { values: raw(json!({"temperature": 37.8})) };
    engine.submit_answer(&mut s, Answer::new(question.id, values), &store).unwrap();
    assert_eq!(s.state(), State::S1Inconsistency);
    let bad = AnswerPayload::Values { values: raw(json!({"temperature": 50.0})) };
    let Prompt::Question { question } = engine.next_prompt(&mut s, &store).unwrap() else {
        panic!()
    };
    assert!(matches!(
        engine.submit_answer(&mut s, Answer::new(question.id.clone(), bad), &store),
        Err(Error::Validation(_))
    ));
    // the rejected answer left the question pending
    assert_eq!(s.pending().unwrap().id, question.id);
}

#[test]
fn review_is_skipped_without_history_and_can_attach() {
    let engine = Engine::new(domain());
    let store = PrecedentStore::in_memory();
    let mut script = walkthrough();
    script.history.clear();
    script.steps.pop();
    let report = run_script(&engine, &store, &script, None).unwrap();
    assert!(report.passed(), "{:?}", report.mismatches);

    let store = PrecedentStore::in_memory();
    let mut script = walkthrough();
    script.steps.last_mut().unwrap().answer = serde_json::from_value(json!({
        "type": "attach_precedent",
        "case": {"temperature": 38.4, "headache": "strong"},
        "decision": "flu",
        "prognosis": "a week in bed",
        "error_explanation": "started antivirals late"
    }))
    .unwrap();
    let report = run_script(&engine, &store, &script, None).unwrap();
    assert!(report.passed(), "{:?}", report.mismatches);
    let mine = store.list("dr_watson", "dr_watson").unwrap();
    assert_eq!(mine.len(), 3);
    assert_eq!(mine[1].session.as_deref(), Some("walkthrough"));
}

#[test]
fn views_never_name_the_machine_solution() {
    let d = domain();
    let engine = Engine::new(d.clone());
    let store = PrecedentStore::in_memory();
    let mut s = engine.start_session("s", "u", "airborne_allergy".into(), allergy_case(&d), 3).unwrap();
    assert_ne!(s.alpha_machine, *s.alpha_user());
    loop {
        let text = serde_json::to_string(&s.view(d.schema())).unwrap();
        let leaked = foreign_solutions(&text, d.schema(), s.alpha_history());
        assert!(leaked.is_empty(), "{leaked:?} in {text}");
        match engine.next_prompt(&mut s, &store).unwrap() {
            Prompt::Finalize => break,
            Prompt::Question { question } => {
                let text = serde_json::to_string(&question).unwrap();
                assert!(foreign_solutions(&text, d.schema(), s.alpha_history()).is_empty(), "{text}");
                engine.submit_answer(&mut s, Answer::new(question.id, AnswerPayload::Acknowledge), &store).unwrap();
            }
        }
    }
}
