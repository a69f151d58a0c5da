use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::encode::{encode_query, EncodeError, Query};
use super::model::{is_complete, parse_model, Model};
use super::reflect::ReflectionTable;

pub const DEFAULT_TIMEOUT_MS: u64 = 5000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

/// Raw solver answer to one script.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Response {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    /// Counterexample, when the model could be read back.
    Invalid(Option<Model>),
    Unknown(String),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("cannot start solver `{0}`: {1}")]
    Spawn(String, String),
    #[error("solver protocol error: {0}")]
    Protocol(String),
    #[error("no recorded response for query {0}")]
    Replay(String),
    #[error("transcript error: {0}")]
    Transcript(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmtError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

pub trait Backend: Send {
    fn run(&mut self, script: &str) -> Result<Response, SolverError>;
    fn describe(&self) -> String;
}

pub fn script_hash(script: &str) -> String {
    hex::encode(Sha256::digest(script.as_bytes()))
}

// ---- subprocess backend ----

struct Running {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<String>,
}

impl Drop for Running {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A persistent solver process, reset between queries and restarted after
/// a timeout or protocol error.
pub struct ProcessBackend {
    path: PathBuf,
    timeout: Duration,
    proc: Option<Running>,
}

impl ProcessBackend {
    pub fn new(path: impl Into<PathBuf>, timeout_ms: u64) -> Self {
        ProcessBackend {
            path: path.into(),
            timeout: Duration::from_millis(timeout_ms),
            proc: None,
        }
    }

    fn args(&self) -> Vec<String> {
        let stem = self
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if stem.contains("z3") {
            vec!["-in".into(), "-smt2".into(), format!("-t:{}", self.timeout.as_millis())]
        } else if stem.contains("cvc5") {
            vec![
                "--lang=smt2".into(),
                "--incremental".into(),
                format!("--tlimit-per={}", self.timeout.as_millis()),
            ]
        } else {
            vec![]
        }
    }

    fn spawn(&mut self) -> Result<&mut Running, SolverError> {
        if self.proc.is_none() {
            let mut child = Command::new(&self.path)
                .args(self.args())
                .stdin(Stdio::piped())
                .stdout(Stdio::piped())
                .stderr(Stdio::null())
                .spawn()
                .map_err(|e| SolverError::Spawn(self.path.display().to_string(), e.to_string()))?;
            let stdin = child.stdin.take().expect("piped stdin");
            let stdout = child.stdout.take().expect("piped stdout");
            let (tx, rx) = mpsc::channel();
            std::thread::spawn(move || {
                for line in BufReader::new(stdout).lines() {
                    let Ok(line) = line else { break };
                    if tx.send(line).is_err() {
                        break;
                    }
                }
            });
            self.proc = Some(Running {
                child,
                stdin,
                lines: rx,
            });
        }
        Ok(self.proc.as_mut().unwrap())
    }

    fn send(&mut self, text: &str) -> Result<(), SolverError> {
        let p = self.spawn()?;
        p.stdin
            .write_all(text.as_bytes())
            .and_then(|_| p.stdin.flush())
            .map_err(|e| SolverError::Protocol(format!("write failed: {e}")))
    }

    /// Next non-empty line, or `None` at the deadline.
    fn line(&mut self, deadline: Instant) -> Result<Option<String>, SolverError> {
        let p = self
            .proc
            .as_mut()
            .ok_or_else(|| SolverError::Protocol("solver not running".into()))?;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match p.lines.recv_timeout(left) {
                Ok(l) if l.trim().is_empty() => continue,
                Ok(l) => return Ok(Some(l)),
                Err(RecvTimeoutError::Timeout) => return Ok(None),
                Err(RecvTimeoutError::Disconnected) => {
                    return Err(SolverError::Protocol("solver exited unexpectedly".into()))
                }
            }
        }
    }

    fn sexp(&mut self, deadline: Instant) -> Result<Option<String>, SolverError> {
        let mut buf = String::new();
        while !is_complete(&buf) {
            match self.line(deadline)? {
                Some(l) => {
                    buf.push_str(&l);
                    buf.push('\n');
                }
                None => return Ok(None),
            }
        }
        Ok(Some(buf))
    }

    fn run_inner(&mut self, script: &str) -> Result<Response, SolverError> {
        let deadline = Instant::now() + self.timeout + Duration::from_millis(1000);
        self.send("(reset)\n")?;
        self.send(script)?;
        let Some(first) = self.line(deadline)? else {
            return Ok(self.timed_out());
        };
        let word = first.trim();
        match word {
            "unsat" => Ok(Response {
                status: Status::Unsat,
                model: None,
                reason: None,
            }),
            "sat" => {
                self.send("(get-model)\n")?;
                let Some(model) = self.sexp(deadline)? else {
                    return Ok(self.timed_out());
                };
                if model.trim_start().starts_with("(error") {
                    return Err(SolverError::Protocol(model.trim().to_string()));
                }
                Ok(Response {
                    status: Status::Sat,
                    model: Some(model),
                    reason: None,
                })
            }
            "unknown" => {
                self.send("(get-info :reason-unknown)\n")?;
                let reason = self
                    .sexp(deadline)?
                    .map(|r| {
                        r.trim()
                            .trim_start_matches("(:reason-unknown")
                            .trim_end_matches(')')
                            .trim()
                            .trim_matches('"')
                            .to_string()
                    })
                    .unwrap_or_else(|| "unknown".into());
                Ok(Response {
                    status: Status::Unknown,
                    model: None,
                    reason: Some(reason),
                })
            }
            other => Err(SolverError::Protocol(other.to_string())),
        }
    }

    fn timed_out(&mut self) -> Response {
        self.proc = None;
        Response {
            status: Status::Unknown,
            model: None,
            reason: Some("timeout".into()),
        }
    }
}

impl Backend for ProcessBackend {
    fn run(&mut self, script: &str) -> Result<Response, SolverError> {
        let r = self.run_inner(script);
        if matches!(r, Err(SolverError::Protocol(_))) {
            self.proc = None;
        }
        r
    }

    fn describe(&self) -> String {
        self.path.display().to_string()
    }
}

// ---- transcripts ----

/// Recorded responses keyed by the sha256 of the script.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: BTreeMap<String, Response>,
}

impl Transcript {
    pub fn load(path: &Path) -> Result<Transcript, SolverError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| SolverError::Transcript(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| SolverError::Transcript(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), SolverError> {
        let text = serde_json::to_string_pretty(self).map_err(|e| SolverError::Transcript(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| SolverError::Transcript(format!("{}: {e}", path.display())))
    }
}

pub struct ReplayBackend {
    transcript: Transcript,
}

impl ReplayBackend {
    pub fn new(transcript: Transcript) -> Self {
        ReplayBackend { transcript }
    }
}

impl Backend for ReplayBackend {
    fn run(&mut self, script: &str) -> Result<Response, SolverError> {
        let h = script_hash(script);
        self.transcript.entries.get(&h).cloned().ok_or(SolverError::Replay(h))
    }

    fn describe(&self) -> String {
        format!("replay ({} responses)", self.transcript.entries.len())
    }
}

/// Forwards to another backend and appends every exchange to a transcript file.
pub struct RecordBackend {
    inner: Box<dyn Backend>,
    path: PathBuf,
    transcript: Transcript,
}

impl RecordBackend {
    pub fn new(inner: Box<dyn Backend>, path: PathBuf) -> Self {
        let transcript = Transcript::load(&path).unwrap_or_default();
        RecordBackend {
            inner,
            path,
            transcript,
        }
    }
}

impl Backend for RecordBackend {
    fn run(&mut self, script: &str) -> Result<Response, SolverError> {
        let r = self.inner.run(script)?;
        self.transcript.entries.insert(script_hash(script), r.clone());
        self.transcript.save(&self.path)?;
        Ok(r)
    }

    fn describe(&self) -> String {
        format!("record to {} via {}", self.path.display(), self.inner.describe())
    }
}

// ---- front end ----

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BackendMode {
    Process,
    Replay(PathBuf),
    Record(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub path: Option<PathBuf>,
    pub timeout_ms: u64,
    pub dump_dir: Option<PathBuf>,
    pub mode: BackendMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            path: None,
            timeout_ms: DEFAULT_TIMEOUT_MS,
            dump_dir: None,
            mode: BackendMode::Process,
        }
    }
}

impl SolverConfig {
    /// Explicit path, then `LQH_SOLVER`, then `z3` on the `PATH`.
    pub fn solver_path(&self) -> PathBuf {
        self.path
            .clone()
            .or_else(|| std::env::var_os("LQH_SOLVER").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("z3"))
    }

    pub fn backend(&self) -> Result<Box<dyn Backend>, SolverError> {
        let process = || Box::new(ProcessBackend::new(self.solver_path(), self.timeout_ms));
        Ok(match &self.mode {
            BackendMode::Process => process(),
            BackendMode::Replay(p) => Box::new(ReplayBackend::new(Transcript::load(p)?)),
            BackendMode::Record(p) => Box::new(RecordBackend::new(process(), p.clone())),
        })
    }
}

pub type SharedCache = Arc<RwLock<HashMap<String, Response>>>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub queries: usize,
    pub cache_hits: usize,
}

/// Encodes queries, consults the memo cache, and talks to a backend.
pub struct Solver {
    backend: Box<dyn Backend>,
    cache: SharedCache,
    dump_dir: Option<PathBuf>,
    pub stats: SolverStats,
}

impl Solver {
    pub fn new(config: &SolverConfig) -> Result<Solver, SolverError> {
        Self::with_cache(config, SharedCache::default())
    }

    pub fn with_cache(config: &SolverConfig, cache: SharedCache) -> Result<Solver, SolverError> {
        Ok(Solver {
            backend: config.backend()?,
            cache,
            dump_dir: config.dump_dir.clone(),
            stats: SolverStats::default(),
        })
    }

    pub fn from_backend(backend: Box<dyn Backend>) -> Solver {
        Solver {
            backend,
            cache: SharedCache::default(),
            dump_dir: None,
            stats: SolverStats::default(),
        }
    }

    pub fn describe(&self) -> String {
        self.backend.describe()
    }

    /// Runs a raw script, memoized by its hash.
    pub fn run_script(&mut self, script: &str) -> Result<Response, SolverError> {
        let h = script_hash(script);
        self.stats.queries += 1;
        if let Some(r) = self.cache.read().ok().and_then(|c| c.get(&h).cloned()) {
            self.stats.cache_hits += 1;
            return Ok(r);
        }
        let r = self.backend.run(script)?;
        if let Some(dir) = &self.dump_dir {
            let _ = std::fs::create_dir_all(dir);
            let mut text = script.to_string();
            text.push_str(&format!("; => {:?}\n", r.status));
            let _ = std::fs::write(dir.join(format!("{}.smt2", &h[..16])), text);
        }
        if let Ok(mut c) = self.cache.write() {
            c.insert(h, r.clone());
        }
        Ok(r)
    }

    /// Decides validity of `q`.
    pub fn check(&mut self, q: &Query, table: &ReflectionTable) -> Result<Verdict, SmtError> {
        let enc = encode_query(q, table)?;
        let r = self.run_script(&enc.script)?;
        Ok(match r.status {
            Status::Unsat => Verdict::Valid,
            Status::Sat => Verdict::Invalid(r.model.as_deref().and_then(|m| parse_model(m, &enc.symbols))),
            Status::Unknown => Verdict::Unknown(r.reason.unwrap_or_else(|| "unknown".into())),
        })
    }

    /// Confirms the backend answers a trivial query.
    pub fn probe(&mut self) -> Result<(), SolverError> {
        let r = self.backend.run("(check-sat)\n")?;
        match r.status {
            Status::Sat => Ok(()),
            other => Err(SolverError::Protocol(format!("probe answered {other:?}"))),
        }
    }
}
