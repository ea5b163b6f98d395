//! The dialogue state machine. It walks four checks in order (consistency
//! with the decision's boundary, missing findings, measurement distortion,
//! the user's own precedents), pausing for an answer whenever one of them
//! produces a question.

mod engine;
mod leak;
mod question;
mod session;
mod text;

pub use engine::{Engine, EngineConfig, Prompt, StepOutcome};
pub use leak::foreign_solutions;
pub use question::{Answer, AnswerPayload, Question, QuestionKind};
pub use session::{Session, SessionView, State, TranscriptEvent};

#[cfg(test)]
mod tests;
