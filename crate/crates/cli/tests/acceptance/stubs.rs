use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use tempfile::TempDir;

/// Shell scripts posing as external solvers.
pub struct Stubs {
    pub dir: TempDir,
}

impl Stubs {
    pub fn new() -> Self {
        Stubs {
            dir: tempfile::tempdir().expect("temp dir"),
        }
    }

    pub fn script(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, format!("#!/bin/sh\n{body}\n")).expect("write stub");
        fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).expect("chmod stub");
        path
    }

    pub fn answer(&self, name: &str, delay: f64, lines: &str) -> PathBuf {
        self.script(name, &format!("sleep {delay}\nprintf '{lines}'"))
    }

    pub fn sleeper(&self, name: &str, secs: u64) -> PathBuf {
        let pidfile = self.pidfile(name);
        self.script(name, &format!("echo $$ > '{}'\nexec sleep {secs}", pidfile.display()))
    }

    pub fn pidfile(&self, name: &str) -> PathBuf {
        self.dir.path().join(format!("{name}.pid"))
    }

    pub fn take_pid(&self, name: &str) -> Option<u32> {
        let pid = fs::read_to_string(self.pidfile(name)).ok()?.trim().parse().ok();
        let _ = fs::remove_file(self.pidfile(name));
        pid
    }
}

pub fn alive(pid: u32) -> bool {
    match fs::read_to_string(format!("/proc/{pid}/stat")) {
        Ok(stat) => {
            let state = stat.rsplit(')').next().unwrap_or("").trim_start();
            !state.starts_with('Z') && !state.starts_with('X')
        }
        Err(_) => false,
    }
}

pub fn dead_within(pid: u32, limit: Duration) -> bool {
    let start = Instant::now();
    while alive(pid) {
        if start.elapsed() > limit {
            return false;
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    true
}

/// Child processes of this test process, across all of its threads.
pub fn children() -> Vec<u32> {
    let mut out = Vec::new();
    if let Ok(tasks) = fs::read_dir("/proc/self/task") {
        for t in tasks.flatten() {
            if let Ok(s) = fs::read_to_string(t.path().join("children")) {
                out.extend(s.split_whitespace().filter_map(|p| p.parse::<u32>().ok()));
            }
        }
    }
    out
}
