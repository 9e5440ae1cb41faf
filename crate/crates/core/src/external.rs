//! External solver processes and the on-disk registry.
//!
//! An external solver is any executable that takes the formula as its single
//! argument and prints `sat` or `unsat` as the first line of its standard
//! output, optionally followed by an evidence line in the [`crate::trace`]
//! format. Each invocation runs in its own process group so that the whole
//! group can be terminated on timeout or cancellation.

use std::fs;
use std::io::{self, Read};
use std::os::unix::fs::PermissionsExt;
use std::os::unix::process::CommandExt;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::engine::{CancelFlag, UnknownReason, Verdict};
use crate::ltl::{render, Dialect, Formula};
use crate::portfolio::RunRecord;
use crate::trace::LassoWord;

pub const REGISTRY_ENV: &str = "POLSAT_REGISTRY";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalSolverSpec {
    pub path: PathBuf,
    pub name: String,
    /// Spelling used when rendering the formula argument.
    pub dialect: Dialect,
    /// Time between SIGTERM and SIGKILL.
    pub timeout_grace: Duration,
}

impl ExternalSolverSpec {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .filter(|n| !n.is_empty())
            .unwrap_or_else(|| path.display().to_string());
        ExternalSolverSpec {
            path,
            name,
            dialect: Dialect::PRIMARY,
            timeout_grace: Duration::from_secs(1),
        }
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("{0}: no such file")]
    NotFound(PathBuf),
    #[error("{0}: not an executable file")]
    NotExecutable(PathBuf),
    #[error("cannot locate the registry: set {REGISTRY_ENV} or HOME")]
    NoLocation,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Outcome of [`Registry::register`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Registration {
    Added,
    AlreadyPresent,
}

/// Registered external solvers, one absolute path per line on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Registry {
    pub file: PathBuf,
    pub solvers: Vec<ExternalSolverSpec>,
}

impl Registry {
    /// `$POLSAT_REGISTRY`, else `$XDG_CONFIG_HOME/polsat/registry`, else
    /// `~/.config/polsat/registry`.
    pub fn default_location() -> Option<PathBuf> {
        let var = |k| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        if let Some(p) = var(REGISTRY_ENV) {
            return Some(p);
        }
        let config = var("XDG_CONFIG_HOME").or_else(|| var("HOME").map(|h| h.join(".config")))?;
        Some(config.join("polsat").join("registry"))
    }

    pub fn open_default() -> Result<Registry, RegistryError> {
        Registry::load(Registry::default_location().ok_or(RegistryError::NoLocation)?)
    }

    /// A missing file is an empty registry.
    pub fn load(file: impl Into<PathBuf>) -> Result<Registry, RegistryError> {
        let file = file.into();
        let text = match fs::read_to_string(&file) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(source) => return Err(RegistryError::Io { path: file, source }),
        };
        let solvers = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(ExternalSolverSpec::new)
            .collect();
        Ok(Registry { file, solvers })
    }

    pub fn save(&self) -> Result<(), RegistryError> {
        let io_err = |source| RegistryError::Io {
            path: self.file.clone(),
            source,
        };
        if let Some(dir) = self.file.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(io_err)?;
        }
        let mut text = String::new();
        for s in &self.solvers {
            text.push_str(&s.path.to_string_lossy());
            text.push('\n');
        }
        fs::write(&self.file, text).map_err(io_err)
    }

    /// Adds an executable and saves the registry. Relative paths are made
    /// absolute against the current directory.
    pub fn register(&mut self, path: impl AsRef<Path>) -> Result<Registration, RegistryError> {
        let path = path.as_ref();
        let meta = fs::metadata(path).map_err(|_| RegistryError::NotFound(path.into()))?;
        if !meta.is_file() || meta.permissions().mode() & 0o111 == 0 {
            return Err(RegistryError::NotExecutable(path.into()));
        }
        let absolute = std::path::absolute(path).map_err(|source| RegistryError::Io {
            path: path.into(),
            source,
        })?;
        if self.solvers.iter().any(|s| s.path == absolute) {
            return Ok(Registration::AlreadyPresent);
        }
        self.solvers.push(ExternalSolverSpec::new(absolute));
        self.save()?;
        Ok(Registration::Added)
    }
}

/// Runs an external solver on `f`.
///
/// On timeout or cancellation the process group receives SIGTERM, then SIGKILL
/// once `spec.timeout_grace` has passed. A timed-out run is recorded with
/// `elapsed` equal to `timeout`.
pub fn invoke(spec: &ExternalSolverSpec, f: &Formula, timeout: Duration, cancel: &CancelFlag) -> RunRecord {
    let start = Instant::now();
    let record = |verdict, elapsed| RunRecord {
        solver: spec.name.clone(),
        verdict,
        elapsed,
    };
    let mut command = Command::new(&spec.path);
    command
        .arg(render(f, &spec.dialect))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0);
    let mut child = match spawn(&mut command) {
        Ok(c) => c,
        Err(e) => {
            let reason = UnknownReason::SolverError(format!("{}: {e}", spec.path.display()));
            return record(Verdict::Unknown(reason), start.elapsed());
        }
    };
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut out = String::new();
        let _ = stdout.read_to_string(&mut out);
        out
    });

    let deadline = start + timeout;
    let stop = loop {
        if exited(&child) {
            break None;
        }
        if cancel.is_cancelled() {
            break Some(UnknownReason::Cancelled);
        }
        let now = Instant::now();
        if now >= deadline {
            break Some(UnknownReason::Timeout);
        }
        thread::sleep(poll_interval(now - start).min(deadline - now));
    };

    match stop {
        None => {
            let elapsed = start.elapsed();
            // leftovers in the group would keep stdout open
            signal_group(&child, libc::SIGKILL);
            let _ = child.wait();
            let out = reader.join().unwrap_or_default();
            record(parse_output(&out), elapsed)
        }
        Some(reason) => {
            terminate(&mut child, spec.timeout_grace);
            let _ = reader.join();
            let elapsed = match reason {
                UnknownReason::Timeout => timeout,
                _ => start.elapsed(),
            };
            record(Verdict::Unknown(reason), elapsed)
        }
    }
}

/// Retries briefly on ETXTBSY, which a freshly written executable can hit
/// while another thread is between fork and exec.
fn spawn(command: &mut Command) -> io::Result<Child> {
    let mut attempts = 0;
    loop {
        match command.spawn() {
            Err(e) if e.raw_os_error() == Some(libc::ETXTBSY) && attempts < 20 => {
                attempts += 1;
                thread::sleep(Duration::from_millis(5));
            }
            other => return other,
        }
    }
}

fn poll_interval(running: Duration) -> Duration {
    if running < Duration::from_millis(50) {
        Duration::from_millis(1)
    } else {
        Duration::from_millis(5)
    }
}

/// True once the child has exited. The child is left unreaped so its process
/// group id stays reserved until we are done signalling it.
fn exited(child: &Child) -> bool {
    let mut info: libc::siginfo_t = unsafe { std::mem::zeroed() };
    let rc = unsafe {
        libc::waitid(
            libc::P_PID,
            child.id() as libc::id_t,
            &mut info,
            libc::WEXITED | libc::WNOHANG | libc::WNOWAIT,
        )
    };
    rc == 0 && unsafe { info.si_pid() } != 0
}

fn signal_group(child: &Child, signal: libc::c_int) {
    unsafe {
        libc::killpg(child.id() as libc::pid_t, signal);
    }
}

fn terminate(child: &mut Child, grace: Duration) {
    signal_group(child, libc::SIGTERM);
    let until = Instant::now() + grace;
    while !exited(child) && Instant::now() < until {
        thread::sleep(Duration::from_millis(2));
    }
    signal_group(child, libc::SIGKILL);
    let _ = child.wait();
}

/// First line equal to `sat`/`unsat` (any case) is the verdict; the line after
/// a `sat` is evidence if it parses.
pub fn parse_output(out: &str) -> Verdict {
    let mut lines = out.lines().map(str::trim);
    while let Some(line) = lines.next() {
        if line.eq_ignore_ascii_case("unsat") {
            return Verdict::Unsat;
        }
        if line.eq_ignore_ascii_case("sat") {
            let evidence = lines.next().and_then(|l| l.parse::<LassoWord>().ok());
            return Verdict::Sat(evidence);
        }
    }
    let shown: String = out.trim().chars().take(60).collect();
    Verdict::Unknown(UnknownReason::SolverError(format!("unrecognized output: {shown:?}")))
}
