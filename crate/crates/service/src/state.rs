use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::RwLock;
use serde::Serialize;
use tokio::sync::Mutex;
use watson_core::dialogue::{foreign_solutions, Engine, EngineConfig, Session};
use watson_core::domain::{Domain, DomainDoc};
use watson_core::precedent::PrecedentStore;
use watson_core::SolutionId;

use crate::config::{ServiceConfig, UserEntry};
use crate::error::{ApiError, ApiResult, ConfigError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Account {
    pub id: String,
    pub operator: bool,
}

/// A live session. The owner sits outside the lock so access checks never
/// wait on a running step.
pub struct SessionSlot {
    pub owner: String,
    pub engine: Arc<Engine<f64>>,
    pub session: Arc<Mutex<Session<f64>>>,
}

pub struct AppState {
    accounts: HashMap<String, Account>,
    store: PrecedentStore<f64>,
    engines: RwLock<BTreeMap<String, Arc<Engine<f64>>>>,
    sessions: RwLock<HashMap<String, Arc<SessionSlot>>>,
    engine_config: EngineConfig<f64>,
    seed: u64,
    started: AtomicU64,
}

impl AppState {
    pub fn new(store: PrecedentStore<f64>, engine_config: EngineConfig<f64>, seed: u64, users: &[UserEntry]) -> ApiResult<Self> {
        let mut accounts = HashMap::new();
        for u in users {
            store.register_user(&u.id)?;
            accounts.insert(
                u.token.clone(),
                Account {
                    id: u.id.clone(),
                    operator: u.operator,
                },
            );
        }
        Ok(Self {
            accounts,
            store,
            engines: RwLock::new(BTreeMap::new()),
            sessions: RwLock::new(HashMap::new()),
            engine_config,
            seed,
            started: AtomicU64::new(0),
        })
    }

    /// Opens the store, registers users and loads the configured domains.
    pub fn from_config(cfg: &ServiceConfig) -> Result<Self, ConfigError> {
        let store = match &cfg.data_dir {
            Some(dir) => PrecedentStore::open(dir)?,
            None => PrecedentStore::in_memory(),
        };
        let state = Self::new(store, cfg.engine, cfg.seed, &cfg.users)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        for path in &cfg.domains {
            let doc = DomainDoc::from_path(path)?;
            state
                .add_domain(&doc)
                .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        }
        Ok(state)
    }

    pub fn authenticate(&self, token: &str) -> Option<&Account> {
        self.accounts.get(token)
    }

    pub fn store(&self) -> &PrecedentStore<f64> {
        &self.store
    }

    pub fn add_domain(&self, doc: &DomainDoc<f64>) -> ApiResult<Arc<Engine<f64>>> {
        let domain = Domain::from_doc(doc)?;
        let mut engines = self.engines.write();
        if engines.contains_key(domain.id()) {
            return Err(ApiError::Conflict(format!("domain `{}` is already loaded", domain.id())));
        }
        let id = domain.id().to_owned();
        let engine = Arc::new(Engine::with_config(Arc::new(domain), self.engine_config));
        engines.insert(id, engine.clone());
        Ok(engine)
    }

    pub fn engine(&self, domain: &str) -> ApiResult<Arc<Engine<f64>>> {
        self.engines
            .read()
            .get(domain)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("domain `{domain}`")))
    }

    /// Session seed: the caller's, else the base seed mixed with a counter.
    pub fn session_seed(&self, requested: Option<u64>) -> u64 {
        requested.unwrap_or_else(|| {
            let n = self.started.fetch_add(1, Ordering::Relaxed);
            self.seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        })
    }

    pub fn insert_session(&self, id: String, slot: SessionSlot) {
        self.sessions.write().insert(id, Arc::new(slot));
    }

    /// The session if it exists and belongs to `caller`.
    pub fn session(&self, caller: &Account, id: &str) -> ApiResult<Arc<SessionSlot>> {
        let slot = self
            .sessions
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("session `{id}`")))?;
        if slot.owner != caller.id {
            return Err(ApiError::Forbidden);
        }
        Ok(slot)
    }

    /// Solutions the user has named: decisions taken in this session plus
    /// every solution mentioned anywhere in their own history.
    fn announced(&self, session: &Session<f64>, schema: &watson_core::DomainSchema) -> Vec<SolutionId> {
        let mut out: BTreeSet<SolutionId> = session.alpha_history().iter().cloned().collect();
        if let Ok(history) = self.store.list(session.user(), session.user()) {
            if let Ok(text) = serde_json::to_string(&history) {
                out.extend(foreign_solutions(&text, schema, &[]));
            }
        }
        out.into_iter().collect()
    }

    /// Last line of defence for the hidden solution: refuses to send a body
    /// that names a solution the user never announced.
    pub fn guard<B: Serialize>(&self, session: &Session<f64>, engine: &Engine<f64>, body: &B) -> ApiResult<()> {
        let schema = engine.domain().schema();
        let text = serde_json::to_string(body).map_err(|e| ApiError::Internal(e.to_string()))?;
        let leaked = foreign_solutions(&text, schema, &self.announced(session, schema));
        if leaked.is_empty() {
            Ok(())
        } else {
            Err(ApiError::Internal(format!("response for session {} withheld", session.id())))
        }
    }
}
