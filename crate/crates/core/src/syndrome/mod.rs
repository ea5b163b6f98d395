//! Syndromes and antisyndromes of a case set A.
//!
//! A syndrome of A is a sub-vector of some member of A; an antisyndrome is a
//! sub-vector of none. A minimal antisyndrome becomes a syndrome as soon as any
//! single component is removed, and the complete set of minimal antisyndromes
//! bounds the class.

mod miner;
mod oracle;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use miner::{atoms_for, mine_minimal_antisyndromes, Atom, DEFAULT_K_MAX};
pub use oracle::mine_brute_force;

use crate::error::{Error, Result};
use crate::feature_space::{CaseVector, DomainSchema, SolutionId};
use crate::scalar::Scalar;

/// Training sample A* of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TrainingSample<T> {
    pub solution: SolutionId,
    pub cases: Vec<CaseVector<T>>,
}

impl<T: Scalar> TrainingSample<T> {
    pub fn new(schema: &DomainSchema<T>, solution: SolutionId, cases: Vec<CaseVector<T>>) -> Result<Self> {
        if cases.is_empty() {
            return Err(Error::validation(format!("training sample for `{solution}` is empty")));
        }
        for c in &cases {
            schema.check_vector(c)?;
        }
        Ok(Self { solution, cases })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetSource {
    Expert,
    Mined,
    Merged,
}

/// Minimal antisyndromes of one class, in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AntisyndromeSet<T> {
    pub solution: SolutionId,
    pub source: SetSource,
    entries: Vec<CaseVector<T>>,
}

impl<T: Scalar> AntisyndromeSet<T> {
    /// Validates the set invariants and sorts entries canonically.
    pub fn new(solution: SolutionId, mut entries: Vec<CaseVector<T>>, source: SetSource) -> Result<Self> {
        if entries.iter().any(CaseVector::is_empty) {
            return Err(Error::validation(format!("empty antisyndrome for `{solution}`")));
        }
        entries.sort_by(|a, b| a.canonical_cmp(b));
        entries.dedup();
        for (i, a) in entries.iter().enumerate() {
            for b in &entries[i + 1..] {
                if a.is_subvector_of(b) || b.is_subvector_of(a) {
                    return Err(Error::validation(format!(
                        "antisyndromes {a} and {b} of `{solution}` are nested"
                    )));
                }
            }
        }
        Ok(Self {
            solution,
            source,
            entries,
        })
    }

    pub fn empty(solution: SolutionId, source: SetSource) -> Self {
        Self {
            solution,
            source,
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[CaseVector<T>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Merges expert and mined sets. Expert entries win: a mined entry is
    /// dropped when it has the same component names as an expert entry or is
    /// nested with any kept entry.
    pub fn merge(expert: &Self, mined: &Self) -> Self {
        let mut kept: Vec<CaseVector<T>> = expert.entries.clone();
        let expert_names: BTreeSet<Vec<&str>> =
            expert.entries.iter().map(|e| e.names().collect()).collect();
        for m in &mined.entries {
            let names: Vec<&str> = m.names().collect();
            if expert_names.contains(&names) {
                continue;
            }
            if kept.iter().any(|k| k.is_subvector_of(m) || m.is_subvector_of(k)) {
                continue;
            }
            kept.push(m.clone());
        }
        kept.sort_by(|a, b| a.canonical_cmp(b));
        Self {
            solution: expert.solution.clone(),
            source: SetSource::Merged,
            entries: kept,
        }
    }
}

pub fn is_syndrome<T: Scalar>(y: &CaseVector<T>, sample: &TrainingSample<T>) -> bool {
    sample.cases.iter().any(|x| y.is_subvector_of(x))
}

/// Negation of [`is_syndrome`] for non-empty `y`; the empty vector is never an antisyndrome.
pub fn is_antisyndrome<T: Scalar>(y: &CaseVector<T>, sample: &TrainingSample<T>) -> bool {
    !y.is_empty() && !is_syndrome(y, sample)
}

/// An antisyndrome whose every one-component deletion is a syndrome.
pub fn is_minimal_antisyndrome<T: Scalar>(y: &CaseVector<T>, sample: &TrainingSample<T>) -> bool {
    is_antisyndrome(y, sample) && y.names().all(|n| is_syndrome(&y.without(n), sample))
}

/// Entries of `mas` contained in `v`, in the set's canonical order.
pub fn violated_antisyndromes<T: Scalar>(v: &CaseVector<T>, mas: &AntisyndromeSet<T>) -> Vec<CaseVector<T>> {
    mas.entries
        .iter()
        .filter(|y| y.is_subvector_of(v))
        .cloned()
        .collect()
}
