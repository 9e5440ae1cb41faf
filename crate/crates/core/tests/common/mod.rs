#![allow(dead_code)]

use std::collections::BTreeSet;
use std::fs;
use std::os::unix::fs::PermissionsExt;
use std::path::{Path, PathBuf};

use polsat::ltl::Formula;
use polsat::trace::{LassoWord, State};
use proptest::prelude::*;
use tempfile::TempDir;

pub const PROPS: [&str; 3] = ["a", "b", "c"];

/// Formulas over `a, b, c` using every connective.
pub fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => proptest::sample::select(&PROPS[..]).prop_map(Formula::prop),
        1 => Just(Formula::True),
        1 => Just(Formula::False),
    ];
    leaf.prop_recursive(5, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::globally),
            inner.clone().prop_map(Formula::finally),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::implies(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::iff(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::until(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::release(l, r)),
        ]
    })
}

fn state() -> impl Strategy<Value = State> {
    proptest::sample::subsequence(&PROPS[..], 0..=PROPS.len())
        .prop_map(|v| v.into_iter().map(String::from).collect::<BTreeSet<_>>())
}

pub fn lasso() -> impl Strategy<Value = LassoWord> {
    (
        proptest::collection::vec(state(), 0..4),
        proptest::collection::vec(state(), 1..4),
    )
        .prop_map(|(prefix, cycle)| LassoWord::new(prefix, cycle))
}

/// Shell scripts standing in for external solvers.
pub struct Stubs {
    pub dir: TempDir,
}

impl Stubs {
    pub fn new() -> Self {
        Stubs {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    pub fn script(&self, name: &str, body: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        fs::write(&path, format!("#!/bin/sh\n{body}\n")).unwrap();
        fs::set_permissions(&path, fs::Permissions::from_mode(0o755)).unwrap();
        path
    }

    /// Prints `lines` after `delay` seconds.
    pub fn answer(&self, name: &str, delay: f64, lines: &str) -> PathBuf {
        self.script(name, &format!("sleep {delay}\nprintf '{lines}'"))
    }

    /// Records its pid in `<name>.pid`, then sleeps.
    pub fn sleeper(&self, name: &str, secs: u64) -> PathBuf {
        let pidfile = self.pidfile(name);
        self.script(name, &format!("echo $$ > '{}'\nexec sleep {secs}", pidfile.display()))
    }

    pub fn pidfile(&self, name: &str) -> PathBuf {
        self.dir.path().join(format!("{name}.pid"))
    }

    /// Pid the sleeper wrote, if it got that far.
    pub fn pid(&self, name: &str) -> Option<u32> {
        fs::read_to_string(self.pidfile(name)).ok()?.trim().parse().ok()
    }
}

/// Running (not a zombie) according to `/proc`.
pub fn alive(pid: u32) -> bool {
    match fs::read_to_string(Path::new("/proc").join(pid.to_string()).join("stat")) {
        Ok(stat) => {
            let state = stat.rsplit(')').next().unwrap_or("").trim_start();
            !state.starts_with('Z') && !state.starts_with('X')
        }
        Err(_) => false,
    }
}

/// Polls until `pid` is gone; processes we do not reap take a moment to vanish.
pub fn dies_within(pid: u32, limit: std::time::Duration) -> bool {
    let start = std::time::Instant::now();
    while alive(pid) {
        if start.elapsed() > limit {
            return false;
        }
        std::thread::sleep(std::time::Duration::from_millis(5));
    }
    true
}
