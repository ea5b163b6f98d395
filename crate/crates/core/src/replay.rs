//! Scripted, in-process replay of a dialogue: a starting case, the user's
//! history, and the answer expected for each question in turn.

use serde::{Deserialize, Serialize};

use crate::dialogue::{Answer, AnswerPayload, Engine, Prompt, QuestionKind, SessionView};
use crate::error::Result;
use crate::feature_space::{RawVector, SolutionId};
use crate::precedent::{Outcome, Precedent, PrecedentDraft, PrecedentStore};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct HistoryEntry<T> {
    pub case: RawVector<T>,
    pub decision: SolutionId,
    pub prognosis: String,
    #[serde(default)]
    pub outcome: Option<Outcome>,
    #[serde(default)]
    pub discrepancy_explanation: Option<String>,
    #[serde(default)]
    pub error_explanation: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Expect {
    pub kind: Option<QuestionKind>,
    #[serde(default)]
    pub subject: Option<Vec<String>>,
    #[serde(default)]
    pub warning_contains: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ScriptStep<T> {
    #[serde(default)]
    pub expect: Expect,
    pub answer: AnswerPayload<T>,
    /// Decision to switch to right after answering.
    #[serde(default)]
    pub then_decide: Option<SolutionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalizeStep {
    pub prognosis: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Script<T> {
    pub user: String,
    #[serde(default = "default_session")]
    pub session: String,
    pub decision: SolutionId,
    pub evidence: RawVector<T>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub history: Vec<HistoryEntry<T>>,
    pub steps: Vec<ScriptStep<T>>,
    #[serde(default)]
    pub finalize: Option<FinalizeStep>,
}

fn default_session() -> String {
    "replay".into()
}

impl<T: Scalar> Script<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// One question met during the replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayLine {
    pub question: String,
    pub scenario: u8,
    pub kind: QuestionKind,
    pub subject: Vec<String>,
    pub prompt: String,
    pub warning: Option<String>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ReplayReport<T> {
    pub lines: Vec<ReplayLine>,
    pub mismatches: Vec<String>,
    pub precedent: Option<Precedent<T>>,
    pub session: SessionView<T>,
}

impl<T> ReplayReport<T> {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

fn check(expect: &Expect, line: &ReplayLine) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(kind) = expect.kind {
        if kind != line.kind {
            out.push(format!("{}: expected {kind:?}, got {:?}", line.question, line.kind));
        }
    }
    if let Some(subject) = &expect.subject {
        if *subject != line.subject {
            out.push(format!("{}: expected subject {subject:?}, got {:?}", line.question, line.subject));
        }
    }
    if let Some(text) = &expect.warning_contains {
        if !line.warning.as_deref().is_some_and(|w| w.contains(text.as_str())) {
            out.push(format!("{}: expected a warning containing {text:?}", line.question));
        }
    }
    out
}

/// Runs `script` against `engine`, recording history into `store`.
/// `seed` overrides the script's own seed.
pub fn run_script<T: Scalar>(
    engine: &Engine<T>,
    store: &PrecedentStore<T>,
    script: &Script<T>,
    seed: Option<u64>,
) -> Result<ReplayReport<T>> {
    let schema = engine.domain().schema();
    let user = script.user.as_str();
    store.register_user(user)?;
    for h in &script.history {
        let draft = PrecedentDraft {
            user: user.to_owned(),
            domain: engine.domain().id().to_owned(),
            session: None,
            case: schema.parse_vector(&h.case)?,
            decision: h.decision.clone(),
            prognosis: h.prognosis.clone(),
        };
        let p = store.record_precedent(user, draft, schema)?;
        if let Some(o) = &h.outcome {
            store.submit_outcome(user, &p.id, o.clone(), h.discrepancy_explanation.clone())?;
        }
        if let Some(text) = &h.error_explanation {
            store.update_error_explanation(user, &p.id, text)?;
        }
    }

    let seed = seed.or(script.seed).unwrap_or(0);
    let evidence = schema.parse_vector(&script.evidence)?;
    let mut s = engine.start_session(script.session.clone(), user, script.decision.clone(), evidence, seed)?;
    let mut lines = Vec::new();
    let mut mismatches = Vec::new();
    let mut steps = script.steps.iter();
    loop {
        let question = match engine.next_prompt(&mut s, store)? {
            Prompt::Finalize => break,
            Prompt::Question { question } => question,
        };
        let mut line = ReplayLine {
            question: question.id.clone(),
            scenario: question.scenario,
            kind: question.kind,
            subject: question.subject.clone(),
            prompt: question.prompt.clone(),
            warning: question
                .review
                .as_ref()
                .and_then(|r| r.warning.as_ref())
                .and_then(|w| w.error_explanation.clone()),
            matched: false,
        };
        let Some(step) = steps.next() else {
            mismatches.push(format!("{}: unexpected extra question {:?}", line.question, line.kind));
            lines.push(line);
            break;
        };
        let problems = check(&step.expect, &line);
        line.matched = problems.is_empty();
        mismatches.extend(problems);
        lines.push(line);
        engine.submit_answer(&mut s, Answer::new(question.id, step.answer.clone()), store)?;
        if let Some(d) = &step.then_decide {
            engine.change_decision(&mut s, d.clone())?;
        }
    }
    let left = steps.count();
    if left > 0 {
        mismatches.push(format!("{left} scripted answer(s) were never asked for"));
    }

    let precedent = match &script.finalize {
        Some(f) if mismatches.is_empty() => Some(engine.finalize_and_record(&mut s, &f.prognosis, store)?),
        Some(_) => None,
        None => None,
    };
    Ok(ReplayReport {
        lines,
        mismatches,
        precedent,
        session: s.view(schema),
    })
}
