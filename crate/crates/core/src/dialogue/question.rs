use serde::{Deserialize, Serialize};

use crate::feature_space::{RawVector, SolutionId};
use crate::precedent::{Outcome, SimilarPrecedents};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionKind {
    Inconsistency,
    ValueRequest,
    RemeasureRequest,
    PrecedentReview,
}

impl QuestionKind {
    pub fn scenario(self) -> u8 {
        match self {
            QuestionKind::Inconsistency => 1,
            QuestionKind::ValueRequest => 2,
            QuestionKind::RemeasureRequest => 3,
            QuestionKind::PrecedentReview => 4,
        }
    }
}

/// A question put to the user. Everything here is safe to show: it never
/// names a solution other than the user's own decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Question<T> {
    pub id: String,
    pub scenario: u8,
    pub kind: QuestionKind,
    /// Parameter names the question is about.
    pub subject: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antisyndrome: Option<RawVector<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub review: Option<SimilarPrecedents<T>>,
    pub prompt: String,
    pub why: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "type", rename_all = "snake_case")]
pub enum AnswerPayload<T> {
    /// New or corrected values for any parameters.
    Values { values: RawVector<T> },
    /// A changed decision.
    Decision { solution: SolutionId },
    /// Keep everything as it is.
    Acknowledge,
    /// Add a past case to the user's history while reviewing precedents.
    AttachPrecedent {
        case: RawVector<T>,
        decision: SolutionId,
        prognosis: String,
        #[serde(default)]
        outcome: Option<Outcome>,
        #[serde(default)]
        discrepancy_explanation: Option<String>,
        #[serde(default)]
        error_explanation: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Answer<T> {
    pub question_id: String,
    pub payload: AnswerPayload<T>,
}

impl<T> Answer<T> {
    pub fn new(question_id: impl Into<String>, payload: AnswerPayload<T>) -> Self {
        Self {
            question_id: question_id.into(),
            payload,
        }
    }
}
