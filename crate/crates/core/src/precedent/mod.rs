//! Per-user history of precedents: past cases with the user's decision,
//! prognosis, outcome and the user's own explanation of any error.
//!
//! Every operation takes the calling user and refuses access to anyone
//! else's records. Cohort statistics leave the store only as aggregates.

mod persist;
mod proximity;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::{DateTime, Utc};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};

pub use persist::{read_events, EventKind, StoreEvent};
pub use proximity::precedent_proximity;

use crate::error::{Error, Result};
use crate::feature_space::{CaseVector, DomainSchema, SolutionId};
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PrecedentId(pub String);

impl fmt::Display for PrecedentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PrecedentId {
    fn from(s: &str) -> Self {
        PrecedentId(s.to_owned())
    }
}

/// A precedent before the store has assigned an id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct PrecedentDraft<T> {
    pub user: String,
    pub domain: String,
    #[serde(default)]
    pub session: Option<String>,
    pub case: CaseVector<T>,
    pub decision: SolutionId,
    pub prognosis: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub summary: String,
    pub as_prognosed: bool,
    /// The solution that turned out to be right, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<SolutionId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Precedent<T> {
    pub id: PrecedentId,
    pub user: String,
    pub domain: String,
    pub session: Option<String>,
    pub case: CaseVector<T>,
    pub decision: SolutionId,
    pub prognosis: String,
    /// `None` while the outcome is pending.
    pub outcome: Option<Outcome>,
    pub discrepancy_explanation: Option<String>,
    pub error_explanation: Option<String>,
    pub seq: u64,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
}

impl<T> Precedent<T> {
    pub fn is_pending(&self) -> bool {
        self.outcome.is_none()
    }

    /// Whether the decision held up; `None` while pending.
    pub fn correct(&self) -> Option<bool> {
        self.outcome.as_ref().map(|o| match &o.actual {
            Some(actual) => *actual == self.decision,
            None => o.as_prognosed,
        })
    }
}

/// One row of the error-explanation table shown next to a new case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ErrorExplanationRow<T> {
    pub precedent: PrecedentId,
    pub proximity: T,
    pub decision: SolutionId,
    pub outcome: Option<String>,
    pub error_explanation: Option<String>,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SimilarPrecedents<T> {
    pub rows: Vec<ErrorExplanationRow<T>>,
    /// Nearest precedent that carries an error explanation.
    pub warning: Option<ErrorExplanationRow<T>>,
}

/// One row of a user's summary table of errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummaryRow {
    pub precedent: PrecedentId,
    pub domain: String,
    pub decision: SolutionId,
    pub outcome: Option<String>,
    pub correct: Option<bool>,
    pub discrepancy_explanation: Option<String>,
    pub error_explanation: Option<String>,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct PrecedentFilter<T> {
    pub decision: Option<SolutionId>,
    pub since: Option<DateTime<Utc>>,
    pub until: Option<DateTime<Utc>>,
    /// Drop rows farther than this (similarity queries only).
    pub max_proximity: Option<T>,
}

impl<T: Scalar> PrecedentFilter<T> {
    fn admits(&self, p: &Precedent<T>) -> bool {
        self.decision.as_ref().is_none_or(|d| *d == p.decision)
            && self.since.is_none_or(|t| p.created_at >= t)
            && self.until.is_none_or(|t| p.created_at <= t)
    }
}

/// Accuracy over one window of consecutive resolved precedents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ProgressWindow<T> {
    pub index: usize,
    pub resolved: usize,
    pub correct: usize,
    pub accuracy: T,
    /// Mean accuracy of all users with a window at this index.
    pub cohort_accuracy: Option<T>,
    pub cohort_size: usize,
}

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Default)]
struct State<T> {
    users: BTreeMap<String, Vec<Precedent<T>>>,
    owner: BTreeMap<PrecedentId, String>,
    next_seq: u64,
}

pub struct PrecedentStore<T> {
    state: RwLock<State<T>>,
    root: Option<PathBuf>,
    clock: Clock,
}

impl<T: Scalar> fmt::Debug for PrecedentStore<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PrecedentStore")
            .field("root", &self.root)
            .field("users", &self.state.read().users.len())
            .finish()
    }
}

fn valid_user_id(user: &str) -> bool {
    !user.is_empty()
        && user.len() <= 64
        && !user.starts_with('.')
        && user.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

fn non_blank(text: Option<String>) -> Option<String> {
    text.filter(|t| !t.trim().is_empty())
}

impl<T: Scalar> PrecedentStore<T> {
    pub fn in_memory() -> Self {
        Self {
            state: RwLock::new(State {
                users: BTreeMap::new(),
                owner: BTreeMap::new(),
                next_seq: 1,
            }),
            root: None,
            clock: Arc::new(Utc::now),
        }
    }

    /// Opens (or creates) a persistent store rooted at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<Self> {
        let root = root.as_ref().to_path_buf();
        persist::ensure_root(&root)?;
        let mut state = State {
            users: BTreeMap::new(),
            owner: BTreeMap::new(),
            next_seq: 1,
        };
        for (user, precedents) in persist::load_all::<T>(&root)? {
            for p in &precedents {
                state.next_seq = state.next_seq.max(p.seq + 1);
                state.owner.insert(p.id.clone(), user.clone());
            }
            state.users.insert(user, precedents);
        }
        Ok(Self {
            state: RwLock::new(state),
            root: Some(root),
            clock: Arc::new(Utc::now),
        })
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Idempotent. User ids double as directory names, so they are restricted
    /// to ASCII letters, digits, `_`, `-` and `.`.
    pub fn register_user(&self, user: &str) -> Result<()> {
        if !valid_user_id(user) {
            return Err(Error::validation(format!("invalid user id `{user}`")));
        }
        let mut st = self.state.write();
        if st.users.contains_key(user) {
            return Ok(());
        }
        if let Some(root) = &self.root {
            persist::ensure_user(root, user)?;
        }
        st.users.insert(user.to_owned(), Vec::new());
        Ok(())
    }

    pub fn has_user(&self, user: &str) -> bool {
        self.state.read().users.contains_key(user)
    }

    pub fn users(&self) -> Vec<String> {
        self.state.read().users.keys().cloned().collect()
    }

    fn check_caller(st: &State<T>, caller: &str, user: &str) -> Result<()> {
        if caller != user {
            return Err(Error::Access(format!("`{caller}` may not access the history of another user")));
        }
        if !st.users.contains_key(user) {
            return Err(Error::Access(format!("unknown user `{caller}`")));
        }
        Ok(())
    }

    /// Owner lookup with the access check applied; returns (owner, index).
    fn locate(st: &State<T>, caller: &str, id: &PrecedentId) -> Result<(String, usize)> {
        let owner = st
            .owner
            .get(id)
            .ok_or_else(|| Error::NotFound(format!("precedent `{id}`")))?;
        if owner != caller {
            return Err(Error::Access(format!("precedent `{id}` belongs to another user")));
        }
        let idx = st.users[owner]
            .iter()
            .position(|p| &p.id == id)
            .expect("owner index is consistent");
        Ok((owner.clone(), idx))
    }

    /// Applies `edit` to a copy of the precedent, persists, then commits.
    fn mutate(
        &self,
        caller: &str,
        id: &PrecedentId,
        edit: impl FnOnce(&mut Precedent<T>) -> Result<StoreEvent>,
    ) -> Result<Precedent<T>> {
        let mut st = self.state.write();
        let (owner, idx) = Self::locate(&st, caller, id)?;
        let mut list = st.users[&owner].clone();
        let event = edit(&mut list[idx])?;
        if let Some(root) = &self.root {
            persist::commit(root, &owner, &list, &event)?;
        }
        let updated = list[idx].clone();
        st.users.insert(owner, list);
        Ok(updated)
    }

    pub fn record_precedent(&self, caller: &str, draft: PrecedentDraft<T>, schema: &DomainSchema<T>) -> Result<Precedent<T>> {
        if caller != draft.user {
            return Err(Error::Access("precedents can only be recorded for oneself".into()));
        }
        if draft.domain != schema.id() {
            return Err(Error::validation(format!("unknown domain `{}`", draft.domain)));
        }
        if !schema.has_solution(&draft.decision) {
            return Err(Error::validation(format!("unknown solution `{}`", draft.decision)));
        }
        if draft.prognosis.trim().is_empty() {
            return Err(Error::validation("prognosis must not be empty"));
        }
        schema.check_vector(&draft.case)?;
        let mut st = self.state.write();
        if !st.users.contains_key(&draft.user) {
            return Err(Error::validation(format!("unknown user `{}`", draft.user)));
        }
        let now = (self.clock)();
        let seq = st.next_seq;
        let p = Precedent {
            id: PrecedentId(format!("p-{seq}")),
            user: draft.user,
            domain: draft.domain,
            session: draft.session,
            case: draft.case,
            decision: draft.decision,
            prognosis: draft.prognosis,
            outcome: None,
            discrepancy_explanation: None,
            error_explanation: None,
            seq,
            created_at: now,
            updated_at: now,
        };
        let mut list = st.users[&p.user].clone();
        list.push(p.clone());
        if let Some(root) = &self.root {
            let event = StoreEvent {
                seq,
                at: now,
                kind: EventKind::Recorded,
                precedent: p.id.clone(),
                as_prognosed: None,
                actual: None,
            };
            persist::commit(root, &p.user, &list, &event)?;
        }
        st.next_seq += 1;
        st.owner.insert(p.id.clone(), p.user.clone());
        st.users.insert(p.user.clone(), list);
        Ok(p)
    }

    pub fn get(&self, caller: &str, id: &PrecedentId) -> Result<Precedent<T>> {
        let st = self.state.read();
        let (owner, idx) = Self::locate(&st, caller, id)?;
        Ok(st.users[&owner][idx].clone())
    }

    /// The caller's precedents, oldest first.
    pub fn list(&self, caller: &str, user: &str) -> Result<Vec<Precedent<T>>> {
        let st = self.state.read();
        Self::check_caller(&st, caller, user)?;
        Ok(st.users[user].clone())
    }

    /// Resolves a pending precedent. A discrepancy explanation is required
    /// whenever the outcome differs from the prognosis.
    pub fn submit_outcome(
        &self,
        caller: &str,
        id: &PrecedentId,
        outcome: Outcome,
        discrepancy: Option<String>,
    ) -> Result<Precedent<T>> {
        let discrepancy = non_blank(discrepancy);
        let now = (self.clock)();
        self.mutate(caller, id, |p| {
            if !p.is_pending() {
                return Err(Error::sequencing(format!("outcome of `{}` was already submitted", p.id)));
            }
            if outcome.summary.trim().is_empty() {
                return Err(Error::validation("outcome summary must not be empty"));
            }
            let differs = !outcome.as_prognosed || outcome.actual.as_ref().is_some_and(|a| *a != p.decision);
            if differs && discrepancy.is_none() {
                return Err(Error::validation("an outcome that differs from the prognosis needs an explanation"));
            }
            let event = StoreEvent {
                seq: p.seq,
                at: now,
                kind: EventKind::OutcomeSubmitted,
                precedent: p.id.clone(),
                as_prognosed: Some(outcome.as_prognosed),
                actual: outcome.actual.clone(),
            };
            p.outcome = Some(outcome);
            p.discrepancy_explanation = discrepancy;
            p.updated_at = now;
            Ok(event)
        })
    }

    /// Overwrites the error explanation; blank text clears it. Earlier
    /// versions are not kept anywhere.
    pub fn update_error_explanation(&self, caller: &str, id: &PrecedentId, text: &str) -> Result<Precedent<T>> {
        let text = non_blank(Some(text.to_owned()));
        let now = (self.clock)();
        self.mutate(caller, id, |p| {
            let kind = if text.is_some() {
                EventKind::ErrorExplanationUpdated
            } else {
                EventKind::ErrorExplanationCleared
            };
            p.error_explanation = text;
            p.updated_at = now;
            Ok(StoreEvent {
                seq: p.seq,
                at: now,
                kind,
                precedent: p.id.clone(),
                as_prognosed: None,
                actual: None,
            })
        })
    }

    /// The user's precedents in `schema`'s domain ordered by proximity to
    /// `v`, nearest first; equal proximities list the newest first.
    pub fn query_similar(
        &self,
        caller: &str,
        user: &str,
        schema: &DomainSchema<T>,
        v: &CaseVector<T>,
        limit: usize,
        filter: &PrecedentFilter<T>,
    ) -> Result<SimilarPrecedents<T>> {
        let st = self.state.read();
        Self::check_caller(&st, caller, user)?;
        let mut scored: Vec<(T, &Precedent<T>)> = st.users[user]
            .iter()
            .filter(|p| p.domain == schema.id() && filter.admits(p))
            .map(|p| (precedent_proximity(schema, v, &p.case), p))
            .filter(|(d, _)| filter.max_proximity.is_none_or(|m| *d <= m))
            .collect();
        scored.sort_by(|a, b| cmp_scalar(&a.0, &b.0).then_with(|| b.1.seq.cmp(&a.1.seq)));
        let row = |(d, p): &(T, &Precedent<T>)| ErrorExplanationRow {
            precedent: p.id.clone(),
            proximity: *d,
            decision: p.decision.clone(),
            outcome: p.outcome.as_ref().map(|o| o.summary.clone()),
            error_explanation: p.error_explanation.clone(),
            created_at: p.created_at,
        };
        let warning = scored.iter().find(|(_, p)| p.error_explanation.is_some()).map(row);
        let rows = scored.iter().take(limit).map(row).collect();
        Ok(SimilarPrecedents { rows, warning })
    }

    /// Precedents that went wrong or carry an error explanation, newest first.
    pub fn error_table(&self, caller: &str, user: &str, filter: &PrecedentFilter<T>) -> Result<Vec<ErrorSummaryRow>> {
        let st = self.state.read();
        Self::check_caller(&st, caller, user)?;
        let mut rows: Vec<&Precedent<T>> = st.users[user]
            .iter()
            .filter(|p| filter.admits(p))
            .filter(|p| p.correct() == Some(false) || p.error_explanation.is_some())
            .collect();
        rows.sort_by_key(|r| std::cmp::Reverse(r.seq));
        Ok(rows
            .into_iter()
            .map(|p| ErrorSummaryRow {
                precedent: p.id.clone(),
                domain: p.domain.clone(),
                decision: p.decision.clone(),
                outcome: p.outcome.as_ref().map(|o| o.summary.clone()),
                correct: p.correct(),
                discrepancy_explanation: p.discrepancy_explanation.clone(),
                error_explanation: p.error_explanation.clone(),
                created_at: p.created_at,
            })
            .collect())
    }

    /// Accuracy over consecutive windows of `window` resolved precedents
    /// (the last window may be shorter), with the cohort mean per window.
    pub fn progress_stats(&self, caller: &str, user: &str, domain: &str, window: usize) -> Result<Vec<ProgressWindow<T>>> {
        if window == 0 {
            return Err(Error::Argument("window must be at least 1".into()));
        }
        let st = self.state.read();
        Self::check_caller(&st, caller, user)?;
        let accuracies = |history: &[Precedent<T>]| -> Vec<(usize, usize)> {
            let outcomes: Vec<bool> = history
                .iter()
                .filter(|p| p.domain == domain)
                .filter_map(Precedent::correct)
                .collect();
            outcomes
                .chunks(window)
                .map(|c| (c.len(), c.iter().filter(|ok| **ok).count()))
                .collect()
        };
        let per_user: Vec<Vec<(usize, usize)>> = st.users.values().map(|h| accuracies(h)).collect();
        let ratio = |(n, k): (usize, usize)| T::of_usize(k) / T::of_usize(n);
        Ok(accuracies(&st.users[user])
            .into_iter()
            .enumerate()
            .map(|(index, (resolved, correct))| {
                let peers: Vec<T> = per_user.iter().filter_map(|w| w.get(index).copied().map(ratio)).collect();
                let cohort_accuracy =
                    (!peers.is_empty()).then(|| peers.iter().copied().sum::<T>() / T::of_usize(peers.len()));
                ProgressWindow {
                    index,
                    resolved,
                    correct,
                    accuracy: ratio((resolved, correct)),
                    cohort_accuracy,
                    cohort_size: peers.len(),
                }
            })
            .collect())
    }

    /// Operator access for maintenance tools; bypasses the caller check.
    pub fn inspect(&self, user: &str) -> Result<Vec<Precedent<T>>> {
        self.state
            .read()
            .users
            .get(user)
            .cloned()
            .ok_or_else(|| Error::NotFound(format!("user `{user}`")))
    }
}
