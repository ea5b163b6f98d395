//! The metric δ on the parameter space.
//!
//! The default is a Gower-style weighted mean of per-parameter distances in
//! `[0, 1]`. Domains may plug in their own [`Metric`].

use std::fmt::Debug;

use super::schema::{DomainSchema, ParameterDef, ParameterKind};
use super::value::{CaseVector, Value};
use crate::error::Result;
use crate::scalar::Scalar;

pub trait Metric<T: Scalar>: Debug + Send + Sync {
    /// Distance in `[0, 1]` between two vectors valid under `schema`.
    fn distance(&self, schema: &DomainSchema<T>, a: &CaseVector<T>, b: &CaseVector<T>) -> T;
}

/// Weighted mean over all n parameters of normalized per-parameter distances.
#[derive(Debug, Clone, Copy, Default)]
pub struct Gower;

impl<T: Scalar> Metric<T> for Gower {
    fn distance(&self, schema: &DomainSchema<T>, a: &CaseVector<T>, b: &CaseVector<T>) -> T {
        let penalty = schema.metric().missing_penalty;
        let (num, den) = schema
            .parameters()
            .iter()
            .fold((T::zero(), T::zero()), |(num, den), p| {
                let d = component_distance(p, a.get(&p.name), b.get(&p.name), penalty);
                (num + p.weight * d, den + p.weight)
            });
        if den > T::zero() {
            num / den
        } else {
            T::zero()
        }
    }
}

/// Per-parameter distance in `[0, 1]`.
pub fn component_distance<T: Scalar>(
    p: &ParameterDef<T>,
    a: Option<&Value<T>>,
    b: Option<&Value<T>>,
    missing_penalty: T,
) -> T {
    match (a, b) {
        (None, None) => T::zero(),
        (Some(_), None) | (None, Some(_)) => missing_penalty,
        (Some(a), Some(b)) => value_distance(p, a, b, T::zero()),
    }
}

/// Normalized distance after discounting `slack` (in the parameter's native
/// units: degrees, level steps; ignored for categorical values).
pub(crate) fn value_distance<T: Scalar>(p: &ParameterDef<T>, a: &Value<T>, b: &Value<T>, slack: T) -> T {
    let d = match (&p.kind, a, b) {
        (ParameterKind::Numeric { range, .. }, Value::Numeric(x), Value::Numeric(y)) => {
            let gap = (x.midpoint() - y.midpoint()).abs() - slack;
            gap.max(T::zero()) / range.width()
        }
        (ParameterKind::Ordinal { levels, .. }, Value::Ordinal(x), Value::Ordinal(y)) => {
            let gap2 = x.mid2().abs_diff(y.mid2());
            let gap = T::of_usize(gap2) * T::half() - slack;
            gap.max(T::zero()) / T::of_usize(levels.len() - 1)
        }
        (_, a, b) => {
            if a.intersects(b) {
                T::zero()
            } else {
                T::one()
            }
        }
    };
    d.min(T::one())
}

/// δ(x1, x2) under the default metric, after validating both vectors.
pub fn distance<T: Scalar>(x1: &CaseVector<T>, x2: &CaseVector<T>, schema: &DomainSchema<T>) -> Result<T> {
    schema.check_vector(x1)?;
    schema.check_vector(x2)?;
    Ok(Gower.distance(schema, x1, x2))
}
