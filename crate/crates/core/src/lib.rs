//! Decision-support dialogue engine.
//!
//! Given a user's decision and the evidence it rests on, the engine computes
//! its own solution privately and steers the user with generated questions:
//! inconsistencies with class boundaries, missing information, measurement
//! distortions, and the user's own precedents.
//!
//! All numeric code is generic over [`Scalar`]; the aliases exported here fix
//! the scalar to `f64`.

pub mod decision_model;
pub mod dialogue;
pub mod domain;
pub mod error;
pub mod feature_space;
pub mod local_explainer;
pub mod precedent;
pub mod replay;
pub mod scalar;
pub mod syndrome;

pub use error::{Error, Result, SchemaIssue};
pub use feature_space::{
    Interval, LevelRange, ParameterKind, RawValue, RawVector, SolutionId,
};
pub use scalar::Scalar;

pub type Value = feature_space::Value<f64>;
pub type CaseVector = feature_space::CaseVector<f64>;
pub type DomainSchema = feature_space::DomainSchema<f64>;
pub type ParameterDef = feature_space::ParameterDef<f64>;
pub type TrainingSample = syndrome::TrainingSample<f64>;
pub type AntisyndromeSet = syndrome::AntisyndromeSet<f64>;
pub type TypicalRepresentation = decision_model::TypicalRepresentation<f64>;
pub type NearestTypical = decision_model::NearestTypical<f64>;
pub type Explanation = local_explainer::Explanation<f64>;
pub type PerturbationConfig = local_explainer::PerturbationConfig<f64>;
pub type Domain = domain::Domain<f64>;
pub type DomainDoc = domain::DomainDoc<f64>;
pub type Session = dialogue::Session<f64>;
pub type Engine = dialogue::Engine<f64>;
pub type Question = dialogue::Question<f64>;
pub type Answer = dialogue::Answer<f64>;
pub type PrecedentStore = precedent::PrecedentStore<f64>;
pub type Precedent = precedent::Precedent<f64>;
