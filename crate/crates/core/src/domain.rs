//! A loaded domain: schema, typical vectors, minimal antisyndromes and the
//! reference decision model built from them.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::decision_model::{typical_representation, CenterStrategy, NearestTypical, TypicalRepresentation};
use crate::error::{Error, Result};
use crate::feature_space::{CaseVector, DomainSchema, RawVector, SchemaDoc, SolutionId};
use crate::scalar::Scalar;
use crate::syndrome::{atoms_for, mine_minimal_antisyndromes, AntisyndromeSet, SetSource, TrainingSample};

/// Domain file as authored by an expert.
///
/// `typicals` may be partial when a training sample for the same solution
/// is given; the given components then override the computed ones.
/// Antisyndromes are mined from `samples` only when `mine_k_max` is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DomainDoc<T> {
    #[serde(flatten)]
    pub schema: SchemaDoc<T>,
    #[serde(default)]
    pub typicals: BTreeMap<String, RawVector<T>>,
    #[serde(default)]
    pub antisyndromes: BTreeMap<String, Vec<RawVector<T>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub samples: BTreeMap<String, Vec<RawVector<T>>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bins: BTreeMap<String, Vec<[T; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mine_k_max: Option<usize>,
    #[serde(default)]
    pub center: CenterStrategy,
}

impl<T: Scalar> DomainDoc<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[derive(Debug, Clone)]
pub struct Domain<T: Scalar> {
    schema: Arc<DomainSchema<T>>,
    model: NearestTypical<T>,
    samples: BTreeMap<SolutionId, TrainingSample<T>>,
}

impl<T: Scalar> Domain<T> {
    pub fn from_doc(doc: &DomainDoc<T>) -> Result<Self> {
        let schema = Arc::new(DomainSchema::from_doc(&doc.schema)?);
        check_keys(&schema, doc.typicals.keys(), "typical vector")?;
        check_keys(&schema, doc.antisyndromes.keys(), "antisyndromes")?;
        check_keys(&schema, doc.samples.keys(), "training sample")?;

        let mut samples = BTreeMap::new();
        for (id, rows) in &doc.samples {
            let cases = rows.iter().map(|r| schema.parse_vector(r)).collect::<Result<Vec<_>>>()?;
            let id = SolutionId::new(id.clone());
            samples.insert(id.clone(), TrainingSample::new(&schema, id, cases)?);
        }

        let mut typicals = Vec::new();
        for id in schema.solution_ids() {
            let given = match doc.typicals.get(id.as_str()) {
                Some(raw) => schema.parse_vector(raw)?,
                None => CaseVector::new(),
            };
            let t = match samples.get(id) {
                Some(sample) => typical_representation(sample, &schema, &given, doc.center)?,
                None => TypicalRepresentation::expert(&schema, id.clone(), given)?,
            };
            typicals.push(t);
        }

        let atoms = match doc.mine_k_max {
            Some(_) => Some(atoms_for(&schema, &doc.bins)?),
            None => None,
        };
        let mut sets = Vec::new();
        for id in schema.solution_ids() {
            let entries = doc
                .antisyndromes
                .get(id.as_str())
                .map(|rows| rows.iter().map(|r| schema.parse_vector(r)).collect::<Result<Vec<_>>>())
                .transpose()?
                .unwrap_or_default();
            let expert = if entries.is_empty() {
                AntisyndromeSet::empty(id.clone(), SetSource::Expert)
            } else {
                AntisyndromeSet::new(id.clone(), entries, SetSource::Expert)?
            };
            let set = match (&atoms, doc.mine_k_max, samples.get(id)) {
                (Some(atoms), Some(k), Some(sample)) => {
                    let mined = mine_minimal_antisyndromes(sample, atoms, k)?;
                    AntisyndromeSet::merge(&expert, &mined)
                }
                _ => expert,
            };
            sets.push(set);
        }

        let model = NearestTypical::new(schema.clone(), typicals, sets)?;
        Ok(Self { schema, model, samples })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_doc(&DomainDoc::from_json(text)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_doc(&DomainDoc::from_path(path)?)
    }

    pub fn id(&self) -> &str {
        self.schema.id()
    }

    pub fn schema(&self) -> &DomainSchema<T> {
        &self.schema
    }

    pub fn model(&self) -> &NearestTypical<T> {
        &self.model
    }

    pub fn typical(&self, id: &SolutionId) -> Option<&TypicalRepresentation<T>> {
        self.model.typical(id)
    }

    /// Minimal antisyndromes of `id`; empty for unknown ids.
    pub fn antisyndromes(&self, id: &SolutionId) -> &[CaseVector<T>] {
        self.model.antisyndromes(id).map(AntisyndromeSet::entries).unwrap_or(&[])
    }

    pub fn antisyndrome_set(&self, id: &SolutionId) -> Option<&AntisyndromeSet<T>> {
        self.model.antisyndromes(id)
    }

    pub fn sample(&self, id: &SolutionId) -> Option<&TrainingSample<T>> {
        self.samples.get(id)
    }

    /// Total number of minimal antisyndromes over all solutions.
    pub fn antisyndrome_count(&self) -> usize {
        self.schema.solution_ids().map(|id| self.antisyndromes(id).len()).sum()
    }
}

fn check_keys<'a, T: Scalar>(
    schema: &DomainSchema<T>,
    keys: impl Iterator<Item = &'a String>,
    what: &str,
) -> Result<()> {
    for k in keys {
        if !schema.has_solution(&SolutionId::new(k.clone())) {
            return Err(Error::validation(format!("{what} given for unknown solution `{k}`")));
        }
    }
    Ok(())
}
