//! Proximity sets Ω: the measurement-error neighbourhood of a value or vector.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::schema::{DomainSchema, ParameterDef, ParameterKind};
use super::value::{CaseVector, Interval, LevelRange, Value};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub(crate) fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Numeric bounds of Ω around `center`, before clipping to the declared range.
fn numeric_reach<T: Scalar>(center: &Interval<T>, radius: T) -> Interval<T> {
    Interval {
        lo: center.lo - radius,
        hi: center.hi + radius,
    }
}

fn level_reach(center: &LevelRange, radius: usize, levels: usize) -> LevelRange {
    LevelRange {
        lo: center.lo.saturating_sub(radius),
        hi: (center.hi + radius).min(levels - 1),
    }
}

fn label_reach(
    center: &BTreeSet<String>,
    neighbors: &std::collections::BTreeMap<String, BTreeSet<String>>,
) -> BTreeSet<String> {
    center
        .iter()
        .flat_map(|l| {
            std::iter::once(l.clone()).chain(neighbors.get(l).into_iter().flatten().cloned())
        })
        .collect()
}

/// Does `candidate` lie in Ω(`center`) for parameter `p`?
pub fn within_radius<T: Scalar>(p: &ParameterDef<T>, center: &Value<T>, candidate: &Value<T>) -> bool {
    match (&p.kind, center, candidate) {
        (ParameterKind::Numeric { radius, .. }, Value::Numeric(c), Value::Numeric(x)) => {
            numeric_reach(c, *radius).contains(x)
        }
        (ParameterKind::Ordinal { radius, levels, .. }, Value::Ordinal(c), Value::Ordinal(x)) => {
            level_reach(c, *radius, levels.len()).contains(x)
        }
        (ParameterKind::Categorical { neighbors, .. }, Value::Categorical(c), Value::Categorical(x)) => {
            x.is_subset(&label_reach(c, neighbors))
        }
        _ => false,
    }
}

/// Draws one value uniformly from Ω(`center`). Numeric draws are points.
pub(crate) fn sample_component<T: Scalar, R: Rng>(p: &ParameterDef<T>, center: &Value<T>, rng: &mut R) -> Value<T> {
    match (&p.kind, center) {
        (ParameterKind::Numeric { range, radius, .. }, Value::Numeric(c)) => {
            let reach = numeric_reach(c, *radius);
            let lo = reach.lo.max(range.lo);
            let hi = reach.hi.min(range.hi);
            let u = T::of(rng.gen::<f64>());
            let x = (lo + u * (hi - lo)).max(lo).min(hi);
            Value::number(x)
        }
        (ParameterKind::Ordinal { radius, levels, .. }, Value::Ordinal(c)) => {
            let reach = level_reach(c, *radius, levels.len());
            Value::level(rng.gen_range(reach.lo..=reach.hi))
        }
        (ParameterKind::Categorical { neighbors, .. }, Value::Categorical(c)) => {
            let reach: Vec<String> = label_reach(c, neighbors).into_iter().collect();
            Value::label(reach[rng.gen_range(0..reach.len())].clone())
        }
        _ => center.clone(),
    }
}

/// Draws one value uniformly from the whole declared domain of `p`.
pub(crate) fn sample_anywhere<T: Scalar, R: Rng>(p: &ParameterDef<T>, rng: &mut R) -> Value<T> {
    match &p.kind {
        ParameterKind::Numeric { range, .. } => {
            let u = T::of(rng.gen::<f64>());
            Value::number((range.lo + u * range.width()).min(range.hi))
        }
        ParameterKind::Ordinal { levels, .. } => Value::level(rng.gen_range(0..levels.len())),
        ParameterKind::Categorical { labels, .. } => {
            let all: Vec<&String> = labels.iter().collect();
            Value::label(all[rng.gen_range(0..all.len())].clone())
        }
    }
}

/// `true` iff every component of `candidate` lies within the proximity radius
/// of the same-named component of `center`.
pub fn omega_contains<T: Scalar>(
    schema: &DomainSchema<T>,
    center: &CaseVector<T>,
    candidate: &CaseVector<T>,
) -> Result<bool> {
    if !center.names().eq(candidate.names()) {
        return Err(Error::Argument(
            "candidate and center must have the same component names".into(),
        ));
    }
    schema.check_vector(center)?;
    schema.check_vector(candidate)?;
    Ok(center.iter().zip(candidate.iter()).all(|((name, c), (_, x))| {
        schema
            .parameter(name)
            .map(|p| within_radius(p, c, x))
            .unwrap_or(false)
    }))
}

/// `count` seeded draws from Ω(`center`), each component drawn independently.
pub fn omega_sample<T: Scalar>(
    schema: &DomainSchema<T>,
    center: &CaseVector<T>,
    count: usize,
    seed: u64,
) -> Result<Vec<CaseVector<T>>> {
    if count == 0 {
        return Err(Error::Argument("count must be >= 1".into()));
    }
    schema.check_vector(center)?;
    let defs: Vec<&ParameterDef<T>> = center
        .names()
        .map(|n| schema.parameter(n))
        .collect::<Result<_>>()?;
    let mut rng = seeded(seed);
    Ok((0..count)
        .map(|_| {
            center
                .iter()
                .zip(&defs)
                .map(|((name, c), p)| (name.to_owned(), sample_component(p, c, &mut rng)))
                .collect()
        })
        .collect())
}
