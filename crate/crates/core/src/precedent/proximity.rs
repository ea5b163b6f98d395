//! Proximity of a precedent to the current case.
//!
//! Differences within a parameter's measurement-error radius count as zero.
//! Each parameter is weighted by its schema weight times a gravity factor
//! that grows with the precedent's deviation from the parameter's norm, so
//! matching abnormal findings matter more than matching normal ones.

use crate::feature_space::{value_distance, within_radius, CaseVector, DomainSchema, ParameterDef, ParameterKind, Value};
use crate::scalar::Scalar;

/// Deviation from the declared norm, in `[0, 1]`; zero without a norm.
fn norm_deviation<T: Scalar>(p: &ParameterDef<T>, value: &Value<T>) -> T {
    match (&p.kind, value) {
        (ParameterKind::Numeric { range, norm: Some(norm), .. }, Value::Numeric(iv)) => {
            (norm.gap_to(iv.midpoint()) / range.width()).min(T::one())
        }
        (ParameterKind::Ordinal { levels, norm: Some(norm), .. }, Value::Ordinal(r)) => {
            let m = r.mid2();
            let gap2 = (2 * norm.lo).saturating_sub(m) + m.saturating_sub(2 * norm.hi);
            T::of_usize(gap2) / T::of_usize(2 * (levels.len() - 1))
        }
        (ParameterKind::Categorical { norm: Some(norm), .. }, Value::Categorical(labels)) => {
            if labels.is_disjoint(norm) {
                T::one()
            } else {
                T::zero()
            }
        }
        _ => T::zero(),
    }
}

fn slack<T: Scalar>(p: &ParameterDef<T>) -> T {
    match &p.kind {
        ParameterKind::Numeric { radius, .. } => *radius,
        ParameterKind::Ordinal { radius, .. } => T::of_usize(*radius),
        ParameterKind::Categorical { .. } => T::zero(),
    }
}

/// prox(v, p) = Σ wᵢ gᵢ dᵢ / Σ wᵢ gᵢ, non-negative and zero when every
/// component of both vectors agrees within its radius.
pub fn precedent_proximity<T: Scalar>(schema: &DomainSchema<T>, v: &CaseVector<T>, case: &CaseVector<T>) -> T {
    let penalty = schema.metric().missing_penalty;
    let mut num = T::zero();
    let mut den = T::zero();
    for p in schema.parameters() {
        let a = v.get(&p.name);
        let b = case.get(&p.name);
        let gravity = T::one() + b.map(|b| norm_deviation(p, b)).unwrap_or_else(T::zero);
        let d = match (a, b) {
            (None, None) => T::zero(),
            (Some(_), None) | (None, Some(_)) => penalty,
            (Some(a), Some(b)) => {
                if within_radius(p, a, b) || within_radius(p, b, a) {
                    T::zero()
                } else {
                    value_distance(p, a, b, slack(p))
                }
            }
        };
        num = num + p.weight * gravity * d;
        den = den + p.weight * gravity;
    }
    if den > T::zero() {
        num / den
    } else {
        T::zero()
    }
}
