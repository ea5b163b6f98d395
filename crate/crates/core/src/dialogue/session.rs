use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::question::{Answer, Question};
use crate::feature_space::{CaseVector, DomainSchema, RawVector, SolutionId};
use crate::precedent::PrecedentId;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum State {
    #[serde(rename = "S1_INCONSISTENCY")]
    S1Inconsistency,
    #[serde(rename = "S2_MISSING_INFO")]
    S2MissingInfo,
    #[serde(rename = "S3_DISTORTION")]
    S3Distortion,
    #[serde(rename = "S4_PRECEDENTS")]
    S4Precedents,
    #[serde(rename = "AWAIT_ANSWER")]
    AwaitAnswer,
    #[serde(rename = "FINALIZE")]
    Finalize,
    #[serde(rename = "CLOSED")]
    Closed,
}

impl State {
    pub fn as_str(self) -> &'static str {
        match self {
            State::S1Inconsistency => "S1_INCONSISTENCY",
            State::S2MissingInfo => "S2_MISSING_INFO",
            State::S3Distortion => "S3_DISTORTION",
            State::S4Precedents => "S4_PRECEDENTS",
            State::AwaitAnswer => "AWAIT_ANSWER",
            State::Finalize => "FINALIZE",
            State::Closed => "CLOSED",
        }
    }
}

/// Append-only record of a session. Nothing here reveals the machine's
/// own solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "event", rename_all = "snake_case")]
pub enum TranscriptEvent<T> {
    Input {
        seq: u64,
        alpha_user: SolutionId,
        evidence: RawVector<T>,
    },
    Question {
        seq: u64,
        question: Question<T>,
    },
    Answer {
        seq: u64,
        answer: Answer<T>,
    },
    /// Decision changed outside of an answer.
    Revision {
        seq: u64,
        alpha_user: SolutionId,
    },
    StateChange {
        seq: u64,
        from: State,
        to: State,
        reason: String,
    },
    Finalize {
        seq: u64,
        decision: SolutionId,
        prognosis: String,
        precedent: Option<PrecedentId>,
    },
}

/// What the pending question is about, in engine terms.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Pending<T> {
    Antisyndrome(CaseVector<T>),
    Value(String),
    Remeasure(String),
    Review,
}

/// Items already put to the user; they survive returns to S1 so nothing is
/// asked twice in one session.
#[derive(Debug, Clone, Default)]
pub(crate) struct Asked<T> {
    pub inconsistency: Vec<CaseVector<T>>,
    pub values: BTreeSet<String>,
    pub remeasure: BTreeSet<String>,
    pub review_done: bool,
}

/// One dialogue. Deliberately not serializable: it holds the machine's
/// solution, which must never reach the user. Use [`Session::view`].
#[derive(Debug, Clone)]
pub struct Session<T: Scalar> {
    pub(crate) id: String,
    pub(crate) user: String,
    pub(crate) domain: String,
    pub(crate) alpha_user: SolutionId,
    pub(crate) history: Vec<SolutionId>,
    pub(crate) evidence: CaseVector<T>,
    pub(crate) alpha_machine: SolutionId,
    pub(crate) state: State,
    pub(crate) resume: State,
    pub(crate) pending: Option<(Question<T>, Pending<T>)>,
    pub(crate) asked: Asked<T>,
    pub(crate) transcript: Vec<TranscriptEvent<T>>,
    pub(crate) seed: u64,
    pub(crate) questions: u64,
    pub(crate) steps: usize,
    pub(crate) precedent: Option<PrecedentId>,
}

impl<T: Scalar> Session<T> {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn user(&self) -> &str {
        &self.user
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn alpha_user(&self) -> &SolutionId {
        &self.alpha_user
    }

    /// Every decision the user has announced in this session, oldest first.
    pub fn alpha_history(&self) -> &[SolutionId] {
        &self.history
    }

    pub fn evidence(&self) -> &CaseVector<T> {
        &self.evidence
    }

    pub fn state(&self) -> State {
        self.state
    }

    pub fn pending(&self) -> Option<&Question<T>> {
        self.pending.as_ref().map(|(q, _)| q)
    }

    pub fn transcript(&self) -> &[TranscriptEvent<T>] {
        &self.transcript
    }

    /// Number of scenario steps executed so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn precedent(&self) -> Option<&PrecedentId> {
        self.precedent.as_ref()
    }

    pub(crate) fn next_seq(&self) -> u64 {
        self.transcript.len() as u64 + 1
    }

    pub(crate) fn log(&mut self, make: impl FnOnce(u64) -> TranscriptEvent<T>) {
        let seq = self.next_seq();
        self.transcript.push(make(seq));
    }

    pub(crate) fn move_to(&mut self, to: State, reason: impl Into<String>) {
        let from = self.state;
        if from == to {
            return;
        }
        self.state = to;
        let reason = reason.into();
        self.log(|seq| TranscriptEvent::StateChange { seq, from, to, reason });
    }

    pub fn view(&self, schema: &DomainSchema<T>) -> SessionView<T> {
        SessionView {
            id: self.id.clone(),
            user: self.user.clone(),
            domain: self.domain.clone(),
            state: self.state,
            alpha_user: self.alpha_user.clone(),
            evidence: schema.render_vector(&self.evidence),
            pending: self.pending().cloned(),
            steps: self.steps,
            precedent: self.precedent.clone(),
            transcript: self.transcript.clone(),
        }
    }
}

/// Serializable, user-safe view of a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SessionView<T> {
    pub id: String,
    pub user: String,
    pub domain: String,
    pub state: State,
    pub alpha_user: SolutionId,
    pub evidence: RawVector<T>,
    pub pending: Option<Question<T>>,
    pub steps: usize,
    pub precedent: Option<PrecedentId>,
    pub transcript: Vec<TranscriptEvent<T>>,
}
