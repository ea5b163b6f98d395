use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::feature_space::{CaseVector, DomainSchema, Interval, ParameterKind, Value};
use crate::scalar::Scalar;

use super::{AntisyndromeSet, SetSource, TrainingSample};

pub const DEFAULT_K_MAX: usize = 3;

/// One discretization bin of one parameter.
pub type Atom<T> = (String, Value<T>);

/// Atoms covering the schema: one per ordinal level, one per categorical
/// label, and the given bins for numeric parameters (parameters without bins
/// are left out).
pub fn atoms_for<T: Scalar>(
    schema: &DomainSchema<T>,
    bins: &BTreeMap<String, Vec<[T; 2]>>,
) -> Result<Vec<Atom<T>>> {
    let mut out = Vec::new();
    for p in schema.parameters() {
        match &p.kind {
            ParameterKind::Numeric { .. } => {
                for [lo, hi] in bins.get(&p.name).into_iter().flatten() {
                    let v = Value::Numeric(Interval::new(*lo, *hi)?);
                    p.check_value(&v)?;
                    out.push((p.name.clone(), v));
                }
            }
            ParameterKind::Ordinal { levels, .. } => {
                out.extend((0..levels.len()).map(|i| (p.name.clone(), Value::level(i))));
            }
            ParameterKind::Categorical { labels, .. } => {
                out.extend(labels.iter().map(|l| (p.name.clone(), Value::label(l.clone()))));
            }
        }
    }
    if let Some(name) = bins.keys().find(|n| schema.parameter(n).is_err()) {
        return Err(Error::Argument(format!("bins given for undeclared parameter `{name}`")));
    }
    Ok(out)
}

/// Bitset over the cases of a sample.
#[derive(Clone, PartialEq, Eq)]
struct Cover(Vec<u64>);

impl Cover {
    fn and(&self, other: &Cover) -> Cover {
        Cover(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn any(&self) -> bool {
        self.0.iter().any(|w| *w != 0)
    }
}

/// Level-wise search for every minimal antisyndrome of at most `k_max` atoms.
///
/// A level-k candidate is formed only when all of its (k-1)-subsets are
/// syndromes; candidates that match no case are then minimal by construction.
pub fn mine_minimal_antisyndromes<T: Scalar>(
    sample: &TrainingSample<T>,
    atoms: &[Atom<T>],
    k_max: usize,
) -> Result<AntisyndromeSet<T>> {
    if k_max == 0 {
        return Err(Error::Argument("k_max must be >= 1".into()));
    }
    let atoms = canonical_atoms(atoms)?;
    let param_of: Vec<&str> = atoms.iter().map(|(n, _)| n.as_str()).collect();

    let words = sample.cases.len().div_ceil(64);
    let covers: Vec<Cover> = atoms
        .iter()
        .map(|(name, value)| {
            let mut bits = vec![0u64; words];
            for (i, case) in sample.cases.iter().enumerate() {
                if case.get(name).is_some_and(|w| value.intersects(w)) {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            Cover(bits)
        })
        .collect();

    let mut found: Vec<Vec<usize>> = Vec::new();
    // syndromes of the previous level, each with its cover
    let mut level: Vec<(Vec<usize>, Cover)> = Vec::new();
    for (i, c) in covers.iter().enumerate() {
        if c.any() {
            level.push((vec![i], c.clone()));
        } else {
            found.push(vec![i]);
        }
    }

    for _k in 2..=k_max {
        if level.is_empty() {
            break;
        }
        let frequent: HashSet<&[usize]> = level.iter().map(|(s, _)| s.as_slice()).collect();
        let mut next = Vec::new();
        for (a_idx, (a, a_cover)) in level.iter().enumerate() {
            for (b, _) in &level[a_idx + 1..] {
                let (prefix, last_a) = a.split_at(a.len() - 1);
                if !b.starts_with(prefix) {
                    // level is sorted, so no later b shares this prefix
                    break;
                }
                let last_b = b[b.len() - 1];
                if param_of[last_a[0]] == param_of[last_b] {
                    continue;
                }
                let mut cand = a.clone();
                cand.push(last_b);
                let all_subsets_frequent = (0..cand.len() - 2).all(|skip| {
                    let sub: Vec<usize> = cand
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != skip)
                        .map(|(_, &x)| x)
                        .collect();
                    frequent.contains(sub.as_slice())
                });
                if !all_subsets_frequent {
                    continue;
                }
                let cover = a_cover.and(&covers[last_b]);
                if cover.any() {
                    next.push((cand, cover));
                } else {
                    found.push(cand);
                }
            }
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        level = next;
    }

    let entries = found
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| atoms[i].clone()).collect())
        .collect();
    AntisyndromeSet::new(sample.solution.clone(), entries, SetSource::Mined)
}

/// Sorts atoms by (parameter, value) and rejects overlapping atoms of one parameter.
pub(super) fn canonical_atoms<T: Scalar>(atoms: &[Atom<T>]) -> Result<Vec<Atom<T>>> {
    let mut atoms = atoms.to_vec();
    atoms.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.canonical_cmp(&b.1)));
    for (i, a) in atoms.iter().enumerate() {
        for b in atoms[i + 1..].iter().take_while(|b| b.0 == a.0) {
            if a.1.intersects(&b.1) {
                return Err(Error::Argument(format!(
                    "overlapping atoms for parameter `{}`",
                    a.0
                )));
            }
        }
    }
    Ok(atoms)
}

pub(super) fn to_vector<T: Scalar>(atoms: &[Atom<T>], idx: &[usize]) -> CaseVector<T> {
    idx.iter().map(|&i| atoms[i].clone()).collect()
}
