use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, PoisonError, RwLock};

use coarsekit::decomposition::Strategy;
use coarsekit::fixtures::{fixture, FIXTURE_NAMES};
use coarsekit::game::{GameError, GameSession};
use coarsekit::json::{self, JsonError, Spaces};
use coarsekit::metric::MetricFamily;
use coarsekit::{Exact, ExactFamily, ExactSession, Scalar};
use serde_json::{json, Value};

pub type SharedSession = Arc<Mutex<ExactSession>>;

/// In-memory sessions keyed by monotonic ids. Each session has its own lock,
/// so challenges to one session are serialized while others proceed.
#[derive(Default)]
pub struct SessionStore {
    next_id: AtomicU64,
    sessions: RwLock<BTreeMap<u64, SharedSession>>,
    /// Families loaded from a fixture directory, by file stem.
    extra: BTreeMap<String, ExactFamily>,
}

impl SessionStore {
    pub fn new(extra: BTreeMap<String, ExactFamily>) -> Self {
        SessionStore {
            extra,
            ..SessionStore::default()
        }
    }

    pub fn family(&self, name: &str) -> Option<ExactFamily> {
        if let Some(f) = self.extra.get(name) {
            return Some(f.clone());
        }
        fixture::<Exact>(name).map(|s| MetricFamily::single(s.into_ref()))
    }

    pub fn fixtures(&self) -> Value {
        let builtin = FIXTURE_NAMES.iter().map(|name| {
            let s = fixture::<Exact>(name).expect("listed fixtures exist");
            json!({"name": name, "points": s.len(), "label": s.label(), "source": "bundled"})
        });
        let extra = self.extra.iter().map(|(name, f)| {
            let points: usize = f.members().iter().map(|m| m.len()).sum();
            json!({"name": name, "points": points, "members": f.len(), "source": "directory"})
        });
        json!({"fixtures": builtin.chain(extra).collect::<Vec<_>>()})
    }

    pub fn create(
        &self,
        family: ExactFamily,
        bound: Exact,
        strategy: Strategy<Exact>,
        max_turns: u32,
    ) -> Result<SharedSession, GameError> {
        let mut sessions = self.sessions.write().unwrap_or_else(PoisonError::into_inner);
        let id = self.next_id.fetch_add(1, Ordering::SeqCst);
        let session = Arc::new(Mutex::new(GameSession::start(
            id, family, bound, strategy, max_turns,
        )?));
        sessions.insert(id, session.clone());
        Ok(session)
    }

    pub fn get(&self, id: u64) -> Option<SharedSession> {
        self.sessions
            .read()
            .unwrap_or_else(PoisonError::into_inner)
            .get(&id)
            .cloned()
    }

    pub fn remove(&self, id: u64) -> bool {
        self.sessions
            .write()
            .unwrap_or_else(PoisonError::into_inner)
            .remove(&id)
            .is_some()
    }

    pub fn summaries(&self) -> Value {
        let sessions = self.sessions.read().unwrap_or_else(PoisonError::into_inner);
        let list: Vec<Value> = sessions
            .values()
            .map(|s| {
                let s = lock(s);
                json!({
                    "id": s.id,
                    "status": s.status.label(),
                    "turns": s.turns.len(),
                    "current_mesh": s.current_mesh().to_json(),
                })
            })
            .collect();
        json!({"sessions": list})
    }

    /// All sessions plus the next id, as written on shutdown.
    pub fn snapshot(&self) -> Value {
        let sessions = self.sessions.read().unwrap_or_else(PoisonError::into_inner);
        json!({
            "next_id": self.next_id.load(Ordering::SeqCst),
            "sessions": sessions.values().map(|s| json::session_to_json(&lock(s))).collect::<Vec<_>>(),
        })
    }

    pub fn restore(&self, v: &Value) -> Result<usize, JsonError> {
        let list = v
            .get("sessions")
            .and_then(Value::as_array)
            .ok_or_else(|| JsonError::Schema("snapshot needs a 'sessions' array".into()))?;
        let mut sessions = self.sessions.write().unwrap_or_else(PoisonError::into_inner);
        let mut next = v.get("next_id").and_then(Value::as_u64).unwrap_or(0);
        for s in list {
            let session: ExactSession = json::session_from_json(s)?;
            next = next.max(session.id + 1);
            sessions.insert(session.id, Arc::new(Mutex::new(session)));
        }
        self.next_id.fetch_max(next, Ordering::SeqCst);
        Ok(list.len())
    }
}

pub fn lock(s: &SharedSession) -> std::sync::MutexGuard<'_, ExactSession> {
    s.lock().unwrap_or_else(PoisonError::into_inner)
}

/// Reads every `*.json` family or space document in `dir`, named by file
/// stem.
pub fn load_fixture_dir(dir: &Path) -> Result<BTreeMap<String, ExactFamily>, String> {
    let mut out = BTreeMap::new();
    let entries = fs::read_dir(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    let mut paths: Vec<_> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let name = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| format!("{}: bad file name", path.display()))?
            .to_string();
        let text = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let family = json::parse(&text)
            .and_then(|v| json::family_from_json::<Exact>(&v, &mut Spaces::new()))
            .map_err(|e| format!("{}: {e}", path.display()))?;
        out.insert(name, family);
    }
    Ok(out)
}
