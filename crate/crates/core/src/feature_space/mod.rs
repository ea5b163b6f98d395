//! The mixed-type parameter space X.
//!
//! Values are intervals (numeric), contiguous level runs (ordinal) or label
//! sets (categorical); two components are equal when their values intersect.

mod metric;
mod proximity;
mod relations;
mod schema;
mod value;

pub use metric::{component_distance, distance, Gower, Metric};
pub(crate) use metric::value_distance;
pub use proximity::{omega_contains, omega_sample, within_radius};
pub(crate) use proximity::{sample_anywhere, sample_component, seeded};
pub use relations::{components_equal, is_subvector};
pub use schema::{
    check_schema, DomainSchema, KindTag, MetricConfig, OpenBound, ParameterDef, ParameterDoc,
    ParameterKind, RadiusDoc, RawValue, RawVector, SchemaDoc, Solution, SolutionDoc, SolutionId,
    DEFAULT_FALLBACK,
};
pub use value::{CaseVector, Interval, LevelRange, Value};

#[cfg(test)]
mod tests;
