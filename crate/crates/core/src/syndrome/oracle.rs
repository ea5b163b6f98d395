//! Exhaustive reference for the miner: tests every atom combination against
//! the definition of a minimal antisyndrome.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::miner::{canonical_atoms, to_vector, Atom};
use super::{is_minimal_antisyndrome, AntisyndromeSet, SetSource, TrainingSample};

pub fn mine_brute_force<T: Scalar>(
    sample: &TrainingSample<T>,
    atoms: &[Atom<T>],
    k_max: usize,
) -> Result<AntisyndromeSet<T>> {
    if k_max == 0 {
        return Err(Error::Argument("k_max must be >= 1".into()));
    }
    let atoms = canonical_atoms(atoms)?;
    let mut found = Vec::new();
    let mut chosen = Vec::new();
    enumerate(&atoms, 0, k_max, &mut chosen, &mut |idx| {
        let y = to_vector(&atoms, idx);
        if is_minimal_antisyndrome(&y, sample) {
            found.push(y);
        }
    });
    AntisyndromeSet::new(sample.solution.clone(), found, SetSource::Mined)
}

/// Visits every non-empty combination of at most `k_max` atoms with at most one atom per parameter.
fn enumerate<T>(
    atoms: &[Atom<T>],
    start: usize,
    k_max: usize,
    chosen: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    for i in start..atoms.len() {
        if chosen.iter().any(|&c| atoms[c].0 == atoms[i].0) {
            continue;
        }
        chosen.push(i);
        visit(chosen);
        if chosen.len() < k_max {
            enumerate(atoms, i + 1, k_max, chosen, visit);
        }
        chosen.pop();
    }
}
