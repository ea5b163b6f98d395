//! The machine's decision function over X, typical representations s(α),
//! and completion of partial evidence with typical values.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_space::{
    CaseVector, DomainSchema, Gower, Interval, LevelRange, Metric, ParameterKind, SolutionId, Value,
};
use crate::scalar::{cmp_scalar, Scalar};
use crate::syndrome::{AntisyndromeSet, TrainingSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationSource {
    Expert,
    Computed,
}

/// How numeric components of a computed typical vector are centered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterStrategy {
    #[default]
    Median,
    /// Mean of interval midpoints; only affects numeric parameters.
    Centroid,
}

/// Typical vector s(α), covering every schema parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TypicalRepresentation<T> {
    pub solution: SolutionId,
    pub vector: CaseVector<T>,
    pub source: RepresentationSource,
}

impl<T: Scalar> TypicalRepresentation<T> {
    /// Expert-given typical vector; must be complete.
    pub fn expert(schema: &DomainSchema<T>, solution: SolutionId, vector: CaseVector<T>) -> Result<Self> {
        schema.check_vector(&vector)?;
        let missing = missing_parameters(schema, &vector);
        if !missing.is_empty() {
            return Err(Error::Incomplete {
                solution: solution.0,
                missing,
            });
        }
        Ok(Self {
            solution,
            vector,
            source: RepresentationSource::Expert,
        })
    }
}

fn missing_parameters<T: Scalar>(schema: &DomainSchema<T>, v: &CaseVector<T>) -> Vec<String> {
    schema
        .parameter_names()
        .filter(|n| !v.contains(n))
        .map(str::to_owned)
        .collect()
}

/// Builds s(α) from a training sample. Expert `overrides` replace computed
/// components; parameters absent from every case must be overridden.
pub fn typical_representation<T: Scalar>(
    sample: &TrainingSample<T>,
    schema: &DomainSchema<T>,
    overrides: &CaseVector<T>,
    strategy: CenterStrategy,
) -> Result<TypicalRepresentation<T>> {
    if sample.cases.is_empty() {
        return Err(Error::validation("training sample is empty"));
    }
    schema.check_vector(overrides)?;
    let mut out = CaseVector::new();
    let mut missing = Vec::new();
    for p in schema.parameters() {
        if let Some(v) = overrides.get(&p.name) {
            out.set(p.name.clone(), v.clone());
            continue;
        }
        let observed: Vec<&Value<T>> = sample.cases.iter().filter_map(|c| c.get(&p.name)).collect();
        if observed.is_empty() {
            missing.push(p.name.clone());
            continue;
        }
        let value = match &p.kind {
            ParameterKind::Numeric { .. } => {
                let mut mids: Vec<T> = observed
                    .iter()
                    .filter_map(|v| match v {
                        Value::Numeric(iv) => Some(iv.midpoint()),
                        _ => None,
                    })
                    .collect();
                let center = match strategy {
                    CenterStrategy::Median => median(&mut mids),
                    CenterStrategy::Centroid => mids.iter().copied().sum::<T>() / T::of_usize(mids.len()),
                };
                Value::Numeric(Interval::point(center))
            }
            ParameterKind::Ordinal { .. } => {
                let mut mids: Vec<usize> = observed
                    .iter()
                    .filter_map(|v| match v {
                        Value::Ordinal(r) => Some(r.lo + r.hi),
                        _ => None,
                    })
                    .collect();
                mids.sort_unstable();
                // lower median, in half-level units
                let m2 = mids[(mids.len() - 1) / 2];
                Value::Ordinal(LevelRange::single(m2 / 2))
            }
            ParameterKind::Categorical { .. } => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for v in &observed {
                    if let Value::Categorical(labels) = v {
                        for l in labels {
                            *counts.entry(l.as_str()).or_default() += 1;
                        }
                    }
                }
                // BTreeMap iteration is lexicographic, so max_by keeps the first on ties
                let mode = counts
                    .iter()
                    .fold(None::<(&str, usize)>, |best, (&l, &c)| match best {
                        Some((_, bc)) if bc >= c => best,
                        _ => Some((l, c)),
                    })
                    .map(|(l, _)| l.to_owned())
                    .unwrap_or_default();
                Value::label(mode)
            }
        };
        out.set(p.name.clone(), value);
    }
    if !missing.is_empty() {
        return Err(Error::Incomplete {
            solution: sample.solution.0.clone(),
            missing,
        });
    }
    let source = if overrides.len() == schema.dim() {
        RepresentationSource::Expert
    } else {
        RepresentationSource::Computed
    };
    Ok(TypicalRepresentation {
        solution: sample.solution.clone(),
        vector: out,
        source,
    })
}

/// Median of the values; mean of the two middle values for even counts.
fn median<T: Scalar>(xs: &mut [T]) -> T {
    xs.sort_by(cmp_scalar);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) * T::half()
    }
}

/// v_SD: components of `v` kept verbatim, the rest copied from `s`.
pub fn complete_with_typical<T: Scalar>(v: &CaseVector<T>, s: &TypicalRepresentation<T>) -> CaseVector<T> {
    let mut out = s.vector.clone();
    for (name, value) in v.iter() {
        out.set(name, value.clone());
    }
    out
}

/// Decision function f: X → {α}. Must be deterministic and total.
pub trait DecisionModel<T: Scalar>: Send + Sync {
    fn classify(&self, x: &CaseVector<T>) -> SolutionId;
}

impl<T: Scalar, F> DecisionModel<T> for F
where
    F: Fn(&CaseVector<T>) -> SolutionId + Send + Sync,
{
    fn classify(&self, x: &CaseVector<T>) -> SolutionId {
        self(x)
    }
}

/// Reference model: nearest typical vector among the solutions whose
/// minimal antisyndromes are all absent from `x`.
#[derive(Debug, Clone)]
pub struct NearestTypical<T: Scalar> {
    schema: Arc<DomainSchema<T>>,
    typicals: BTreeMap<SolutionId, TypicalRepresentation<T>>,
    antisyndromes: BTreeMap<SolutionId, AntisyndromeSet<T>>,
    metric: Arc<dyn Metric<T>>,
}

impl<T: Scalar> NearestTypical<T> {
    pub fn new(
        schema: Arc<DomainSchema<T>>,
        typicals: Vec<TypicalRepresentation<T>>,
        antisyndromes: Vec<AntisyndromeSet<T>>,
    ) -> Result<Self> {
        Self::with_metric(schema, typicals, antisyndromes, Arc::new(Gower))
    }

    pub fn with_metric(
        schema: Arc<DomainSchema<T>>,
        typicals: Vec<TypicalRepresentation<T>>,
        antisyndromes: Vec<AntisyndromeSet<T>>,
        metric: Arc<dyn Metric<T>>,
    ) -> Result<Self> {
        let typicals: BTreeMap<_, _> = typicals.into_iter().map(|t| (t.solution.clone(), t)).collect();
        for id in schema.solution_ids() {
            if !typicals.contains_key(id) {
                return Err(Error::validation(format!("no typical representation for `{id}`")));
            }
        }
        if let Some(extra) = typicals.keys().find(|id| !schema.has_solution(id)) {
            return Err(Error::validation(format!("typical vector for unknown solution `{extra}`")));
        }
        let mut mas: BTreeMap<_, _> = BTreeMap::new();
        for set in antisyndromes {
            if !schema.has_solution(&set.solution) {
                return Err(Error::validation(format!(
                    "antisyndromes for unknown solution `{}`",
                    set.solution
                )));
            }
            for e in set.entries() {
                schema.check_vector(e)?;
            }
            mas.insert(set.solution.clone(), set);
        }
        Ok(Self {
            schema,
            typicals,
            antisyndromes: mas,
            metric,
        })
    }

    pub fn schema(&self) -> &DomainSchema<T> {
        &self.schema
    }

    pub fn typical(&self, id: &SolutionId) -> Option<&TypicalRepresentation<T>> {
        self.typicals.get(id)
    }

    pub fn antisyndromes(&self, id: &SolutionId) -> Option<&AntisyndromeSet<T>> {
        self.antisyndromes.get(id)
    }

    pub fn metric(&self) -> &dyn Metric<T> {
        self.metric.as_ref()
    }

    /// `true` when `x` contains a minimal antisyndrome of `id`.
    pub fn vetoed(&self, x: &CaseVector<T>, id: &SolutionId) -> bool {
        self.antisyndromes
            .get(id)
            .is_some_and(|mas| mas.entries().iter().any(|y| y.is_subvector_of(x)))
    }
}

impl<T: Scalar> DecisionModel<T> for NearestTypical<T> {
    fn classify(&self, x: &CaseVector<T>) -> SolutionId {
        // typicals iterate in id order, and strict < keeps the smallest id on ties
        let mut best: Option<(&SolutionId, T)> = None;
        for (id, s) in &self.typicals {
            if self.vetoed(x, id) {
                continue;
            }
            let d = self.metric.distance(&self.schema, x, &s.vector);
            if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
                best = Some((id, d));
            }
        }
        best.map(|(id, _)| id.clone())
            .unwrap_or_else(|| self.schema.fallback().clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syndrome::SetSource;
    use serde_json::json;

    fn schema() -> Arc<DomainSchema<f64>> {
        Arc::new(
            DomainSchema::from_json(
                &json!({
                    "parameters": [
                        {"name": "temp", "kind": "numeric", "range": [35, 42]},
                        {"name": "ache", "kind": "ordinal", "levels": ["none", "slight", "severe"]},
                        {"name": "cough", "kind": "categorical", "labels": ["no", "yes"]}
                    ],
                    "solutions": ["cold", "flu"]
                })
                .to_string(),
            )
            .unwrap(),
        )
    }

    fn case(t: f64, ache: usize, cough: &str) -> CaseVector<f64> {
        CaseVector::new()
            .with("temp", Value::number(t))
            .with("ache", Value::level(ache))
            .with("cough", Value::label(cough))
    }

    #[test]
    fn median_of_three_midpoints() {
        let s = schema();
        let sample = TrainingSample {
            solution: "cold".into(),
            cases: vec![case(36.5, 0, "yes"), case(39.0, 2, "no"), case(37.0, 1, "yes")],
        };
        let t = typical_representation(&sample, &s, &CaseVector::new(), CenterStrategy::Median).unwrap();
        assert_eq!(t.vector, case(37.0, 1, "yes"));
        assert_eq!(t.source, RepresentationSource::Computed);
        let c = typical_representation(&sample, &s, &CaseVector::new(), CenterStrategy::Centroid).unwrap();
        assert_eq!(c.vector.get("temp"), Some(&Value::number(37.5)));
    }

    #[test]
    fn single_case_is_its_own_typical() {
        let s = schema();
        let x = case(38.2, 2, "no");
        let sample = TrainingSample {
            solution: "flu".into(),
            cases: vec![x.clone()],
        };
        let t = typical_representation(&sample, &s, &CaseVector::new(), CenterStrategy::Median).unwrap();
        assert_eq!(t.vector, x);
    }

    #[test]
    fn categorical_mode_tie_breaks_lexicographically() {
        let s = schema();
        let sample = TrainingSample {
            solution: "flu".into(),
            cases: vec![case(38.0, 1, "yes"), case(38.0, 1, "no")],
        };
        let t = typical_representation(&sample, &s, &CaseVector::new(), CenterStrategy::Median).unwrap();
        assert_eq!(t.vector.get("cough"), Some(&Value::label("no")));
    }

    #[test]
    fn parameter_missing_everywhere_needs_override() {
        let s = schema();
        let partial = CaseVector::new().with("temp", Value::number(37.0));
        let sample = TrainingSample {
            solution: "cold".into(),
            cases: vec![partial],
        };
        let err = typical_representation(&sample, &s, &CaseVector::new(), CenterStrategy::Median).unwrap_err();
        assert!(matches!(err, Error::Incomplete { ref missing, .. } if missing == &["ache", "cough"]));
        let overrides = CaseVector::new()
            .with("ache", Value::level(1))
            .with("cough", Value::label("yes"));
        assert!(typical_representation(&sample, &s, &overrides, CenterStrategy::Median).is_ok());
    }

    #[test]
    fn completion_keeps_evidence() {
        let s = schema();
        let t = TypicalRepresentation::expert(&s, "flu".into(), case(39.0, 2, "no")).unwrap();
        let v = CaseVector::new().with("cough", Value::label("yes"));
        let full = complete_with_typical(&v, &t);
        assert_eq!(full, case(39.0, 2, "yes"));
        assert_eq!(complete_with_typical(&CaseVector::new(), &t), t.vector);
        let whole = case(36.6, 0, "yes");
        assert_eq!(complete_with_typical(&whole, &t), whole);
    }

    #[test]
    fn nearest_typical_with_veto_and_fallback() {
        let s = schema();
        let cold = TypicalRepresentation::expert(&s, "cold".into(), case(37.0, 1, "yes")).unwrap();
        let flu = TypicalRepresentation::expert(&s, "flu".into(), case(39.0, 2, "no")).unwrap();
        let no_flu_without_fever = AntisyndromeSet::new(
            "flu".into(),
            vec![CaseVector::new().with("temp", Value::interval(35.0, 37.5).unwrap())],
            SetSource::Expert,
        )
        .unwrap();
        let no_cold_with_high_fever = AntisyndromeSet::new(
            "cold".into(),
            vec![CaseVector::new().with("temp", Value::interval(38.5, 42.0).unwrap())],
            SetSource::Expert,
        )
        .unwrap();
        let m = NearestTypical::new(
            s.clone(),
            vec![cold.clone(), flu.clone()],
            vec![no_flu_without_fever, no_cold_with_high_fever],
        )
        .unwrap();
        assert_eq!(m.classify(&cold.vector).as_str(), "cold");
        assert_eq!(m.classify(&flu.vector).as_str(), "flu");
        // flu-like picture but no fever: flu is vetoed
        assert_eq!(m.classify(&case(37.0, 2, "no")).as_str(), "cold");
        assert_eq!(m.classify(&CaseVector::new()).as_str(), "cold");
        // both vetoed cannot happen with one temperature; force it with an interval
        let both = CaseVector::new().with("temp", Value::interval(37.0, 39.0).unwrap());
        assert_eq!(m.classify(&both).as_str(), "undetermined");
    }
}
