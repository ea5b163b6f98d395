//! Plain-text rendering of values for prompts.

use std::fmt::Display;

use crate::feature_space::{CaseVector, DomainSchema, ParameterDef, ParameterKind, Value};
use crate::scalar::Scalar;

fn number<T: Scalar>(x: T) -> String {
    let v = x.to_f64().unwrap_or(f64::NAN);
    if v.fract() == 0.0 {
        format!("{v:.1}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').to_owned()
    }
}

fn with_units(text: impl Display, units: &str) -> String {
    if units.is_empty() {
        text.to_string()
    } else {
        format!("{text} {units}")
    }
}

pub(crate) fn value_text<T: Scalar>(p: &ParameterDef<T>, value: &Value<T>) -> String {
    match (&p.kind, value) {
        (ParameterKind::Numeric { units, .. }, Value::Numeric(iv)) => {
            if iv.is_point() {
                with_units(number(iv.lo), units)
            } else {
                with_units(format!("{} to {}", number(iv.lo), number(iv.hi)), units)
            }
        }
        (ParameterKind::Ordinal { levels, .. }, Value::Ordinal(r)) => {
            if r.lo == r.hi {
                levels[r.lo].clone()
            } else {
                format!("{} to {}", levels[r.lo], levels[r.hi])
            }
        }
        (_, Value::Categorical(labels)) => labels.iter().cloned().collect::<Vec<_>>().join(" or "),
        _ => String::from("?"),
    }
}

pub(crate) fn vector_text<T: Scalar>(schema: &DomainSchema<T>, v: &CaseVector<T>) -> String {
    v.iter()
        .map(|(name, value)| match schema.parameter(name) {
            Ok(p) => format!("{name} = {}", value_text(p, value)),
            Err(_) => name.to_owned(),
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub(crate) fn parameter_text<T: Scalar>(p: &ParameterDef<T>) -> String {
    match &p.kind {
        ParameterKind::Numeric { units, .. } if !units.is_empty() => format!("{} ({units})", p.name),
        _ => p.name.clone(),
    }
}
