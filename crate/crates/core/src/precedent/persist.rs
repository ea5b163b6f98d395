//! On-disk layout: one directory per user holding an append-only event
//! log and a snapshot of the user's current precedents.
//!
//! The log never carries free text, so an overwritten error explanation
//! survives nowhere once the snapshot is rewritten.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Precedent, PrecedentId};
use crate::error::{Error, Result};
use crate::feature_space::SolutionId;
use crate::scalar::Scalar;

pub(crate) const SNAPSHOT: &str = "snapshot.json";
pub(crate) const EVENTS: &str = "events.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Recorded,
    OutcomeSubmitted,
    ErrorExplanationUpdated,
    ErrorExplanationCleared,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreEvent {
    pub seq: u64,
    pub at: DateTime<Utc>,
    pub kind: EventKind,
    pub precedent: PrecedentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub as_prognosed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actual: Option<SolutionId>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct Snapshot<T> {
    version: u32,
    user: String,
    precedents: Vec<Precedent<T>>,
}

pub(crate) fn user_dir(root: &Path, user: &str) -> PathBuf {
    root.join(user)
}

#[cfg(unix)]
fn create_private_dir(path: &Path) -> Result<()> {
    use std::os::unix::fs::{DirBuilderExt, PermissionsExt};
    if !path.exists() {
        fs::DirBuilder::new().recursive(true).mode(0o700).create(path)?;
    }
    fs::set_permissions(path, fs::Permissions::from_mode(0o700))?;
    Ok(())
}

#[cfg(not(unix))]
fn create_private_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)?;
    Ok(())
}

fn private_options() -> OpenOptions {
    let mut o = OpenOptions::new();
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        o.mode(0o600);
    }
    o
}

pub(crate) fn ensure_root(root: &Path) -> Result<()> {
    create_private_dir(root)
}

pub(crate) fn ensure_user(root: &Path, user: &str) -> Result<()> {
    create_private_dir(&user_dir(root, user))
}

/// Appends `event` and atomically replaces the snapshot.
pub(crate) fn commit<T: Scalar>(root: &Path, user: &str, precedents: &[Precedent<T>], event: &StoreEvent) -> Result<()> {
    let dir = user_dir(root, user);
    create_private_dir(&dir)?;

    let mut log = private_options().create(true).append(true).open(dir.join(EVENTS))?;
    let mut line = serde_json::to_vec(event)?;
    line.push(b'\n');
    log.write_all(&line)?;
    log.sync_data()?;

    let snapshot = Snapshot {
        version: 1,
        user: user.to_owned(),
        precedents: precedents.to_vec(),
    };
    let tmp = dir.join(format!("{SNAPSHOT}.tmp"));
    let mut f = private_options().create(true).write(true).truncate(true).open(&tmp)?;
    f.write_all(&serde_json::to_vec_pretty(&snapshot)?)?;
    f.sync_all()?;
    fs::rename(&tmp, dir.join(SNAPSHOT))?;
    Ok(())
}

/// Every user directory under `root` with its precedents.
pub(crate) fn load_all<T: Scalar>(root: &Path) -> Result<Vec<(String, Vec<Precedent<T>>)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(root)? {
        let entry = entry?;
        if !entry.file_type()?.is_dir() {
            continue;
        }
        let Some(user) = entry.file_name().to_str().map(str::to_owned) else {
            continue;
        };
        let path = entry.path().join(SNAPSHOT);
        let precedents = if path.exists() {
            let snap: Snapshot<T> = serde_json::from_reader(BufReader::new(File::open(&path)?))?;
            if snap.user != user {
                return Err(Error::validation(format!(
                    "snapshot in `{}` belongs to `{}`",
                    entry.path().display(),
                    snap.user
                )));
            }
            snap.precedents
        } else {
            Vec::new()
        };
        out.push((user, precedents));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// The audit trail of one user, oldest first.
pub fn read_events(root: &Path, user: &str) -> Result<Vec<StoreEvent>> {
    let path = user_dir(root, user).join(EVENTS);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
