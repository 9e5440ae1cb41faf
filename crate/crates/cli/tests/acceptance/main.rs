//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod oracle;
mod stubs;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use polsat::bench::{cactus, gen_conjunction, gen_o1, gen_random, run_file, Mode};
use polsat::engine::{Budget, CancelFlag, Strategy, UnknownReason, Verdict, VerdictKind};
use polsat::external::ExternalSolverSpec;
use polsat::ltl::{parse, render, Dialect, Formula};
use polsat::portfolio::{arbitrate, race, run_all, SolverSpec};
use polsat::trace::{eval, LassoWord};
use stubs::{children, dead_within, Stubs};

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name);
    fs::read_to_string(path).expect("fixture file")
}

fn polsat(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polsat"))
        .args(args)
        .current_dir(dir)
        .env("POLSAT_REGISTRY", dir.join("registry"))
        .output()
        .expect("run polsat")
}

fn lines(o: &Output) -> Vec<String> {
    String::from_utf8_lossy(&o.stdout).lines().map(String::from).collect()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let s = oracle::run();
    let took = start.elapsed();
    ensure(s.disagreements.is_empty(), || {
        format!("{} disagreements, first: {}", s.disagreements.len(), s.disagreements[0])
    })?;
    ensure(s.formulas >= 1000, || format!("only {} formulas", s.formulas))?;
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!(
        "{} formulas ({} sat, {} unsat), 0 disagreements, {:.1}s",
        s.formulas,
        s.sat,
        s.formulas - s.sat,
        took.as_secs_f64()
    ))
}

fn evidence_validity() -> Outcome {
    let w: LassoWord = "(b)".parse().map_err(|e| format!("{e}"))?;
    ensure(eval(&w, &parse("a U b").unwrap()), || "b^ω does not satisfy a U b".into())?;
    let mut sat = 0;
    for seed in 0..500u64 {
        let f = gen_random(1 + (seed as usize % 25), 3, seed);
        for s in Strategy::ALL {
            if let Verdict::Sat(w) = s.check(&f, &Budget::default(), &CancelFlag::new()) {
                sat += 1;
                let ok = w.as_ref().is_some_and(|w| eval(w, &f));
                ensure(ok, || format!("{}: bad evidence {w:?} for {f}", s.name()))?;
            }
        }
    }
    Ok(format!("b^ω ⊨ a U b; {sat} sat answers on 500 formulas, all evidence valid"))
}

fn reference_formulas() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let o1 = fixture("o1_100.ltl");
    ensure(parse(&o1).ok() == Some(gen_o1(100)), || "generated O1(100) differs from the listing".into())?;
    let cases = [
        ("a U b", "a U b".to_string(), "sat"),
        ("lift", fixture("lift.ltl"), "sat"),
        ("O1(100)", gen_o1(100).to_string(), "unsat"),
        ("counter", fixture("counter.ltl"), "sat"),
    ];
    let mut times = Vec::new();
    for (name, text, expected) in cases {
        let f = parse(&text).map_err(|e| format!("{name}: {e}"))?;
        let r = race(&f, &SolverSpec::builtin(), Duration::from_secs(60), true).map_err(|e| e.to_string())?;
        ensure(r.verdict.to_string() == expected, || format!("{name}: {}", r.verdict))?;
        if let Verdict::Sat(w) = &r.verdict {
            ensure(w.as_ref().is_some_and(|w| eval(w, &f)), || format!("{name}: no valid evidence"))?;
        }
        let out = lines(&polsat(dir.path(), &[&text]));
        let shape = out.len() == 3
            && out[0] == expected
            && out[1].starts_with("from ")
            && out[2].starts_with("eclipse time: ")
            && out[2].ends_with('s');
        ensure(shape, || format!("{name}: transcript {out:?}"))?;
        times.push(format!("{name} {} by {}", r.verdict, r.winner));
    }
    Ok(times.join(", "))
}

fn race_semantics() -> Outcome {
    let stubs = Stubs::new();
    let solvers = [
        SolverSpec::external(ExternalSolverSpec::new(stubs.sleeper("sleeper", 10))),
        SolverSpec::external(ExternalSolverSpec::new(stubs.answer("fastsat", 0.01, "sat\\n(b)\\n"))),
    ];
    let f = parse("a U b").unwrap();
    let mut slowest = Duration::ZERO;
    for round in 0..20 {
        let start = Instant::now();
        let r = race(&f, &solvers, Duration::from_secs(60), false).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure(matches!(r.verdict, Verdict::Sat(_)), || format!("round {round}: {}", r.verdict))?;
        ensure(r.winner == "fastsat", || format!("round {round}: winner {}", r.winner))?;
        ensure(took < Duration::from_millis(200), || format!("round {round}: took {took:?}"))?;
        if let Some(pid) = stubs.take_pid("sleeper") {
            ensure(dead_within(pid, Duration::from_millis(1500)), || format!("round {round}: sleeper {pid} alive"))?;
        }
        let left = children();
        ensure(left.is_empty(), || format!("round {round}: orphans {left:?}"))?;
    }
    Ok(format!("20 rounds, slowest {:.0} ms, no orphans", slowest.as_secs_f64() * 1e3))
}

fn timeout_accounting() -> Outcome {
    let stubs = Stubs::new();
    let solvers = [SolverSpec::external(ExternalSolverSpec::new(stubs.sleeper("sleeper", 10)))];
    let timeout = Duration::from_millis(200);
    let f = parse("a U b").unwrap();
    let start = Instant::now();
    let r = race(&f, &solvers, timeout, false).map_err(|e| e.to_string())?;
    let wall = start.elapsed();
    ensure(r.verdict == Verdict::Unknown(UnknownReason::Timeout), || format!("{}", r.verdict))?;
    ensure(r.elapsed == timeout, || format!("accounted {:?}", r.elapsed))?;
    ensure(wall.abs_diff(timeout) <= Duration::from_millis(10), || format!("wall {wall:?}"))?;

    let file = stubs.dir.path().join("three.txt");
    fs::write(&file, "a U b\nG a\nF !a\n").map_err(|e| e.to_string())?;
    for mode in [Mode::Race, Mode::Separate] {
        let report = run_file(&file, &solvers, timeout, mode).map_err(|e| e.to_string())?;
        let total = report.totals[0].total;
        ensure(total == timeout * 3, || format!("{mode}: total {total:?}"))?;
    }
    Ok(format!("race wall {:.1} ms, 3 formulas total exactly 0.6s", wall.as_secs_f64() * 1e3))
}

fn consistency() -> Outcome {
    let stubs = Stubs::new();
    let f = parse("a U b").unwrap();
    let wrong = SolverSpec::external(ExternalSolverSpec::new(stubs.answer("wrongverdict", 0.0, "unsat\\n")));
    let right = SolverSpec::external(ExternalSolverSpec::new(stubs.answer("rightverdict", 0.0, "sat\\n(b)\\n")));
    let tableau = SolverSpec::internal(Strategy::Tableau);
    let timeout = Duration::from_secs(10);

    let records = run_all(&f, &[tableau.clone(), wrong], timeout);
    let report = arbitrate(&f, &records);
    ensure(report.has_conflict(), || format!("no conflict: {report}"))?;
    ensure(report.sat == ["tableau"] && report.unsat == ["wrongverdict"], || report.to_string())?;

    let mut good = SolverSpec::builtin();
    good.push(right);
    let records = run_all(&f, &good, timeout);
    ensure(records.len() == 4, || format!("{} records", records.len()))?;
    let ok = arbitrate(&f, &records);
    ensure(ok.is_consistent(), || ok.to_string())?;
    Ok(format!("{report}; all-correct set consistent"))
}

fn parser_fidelity() -> Outcome {
    for name in ["lift.ltl", "o1_100.ltl", "counter.ltl"] {
        parse(&fixture(name)).map_err(|e| format!("{name}: {e}"))?;
    }
    let formulas: Vec<Formula> = (0..1000u64).map(|s| gen_random(1 + (s as usize % 40), 3, s)).collect();
    let dialects: Vec<Dialect> = Dialect::all().collect();
    for d in &dialects {
        for f in &formulas {
            let text = render(f, d);
            ensure(parse(&text).as_ref() == Ok(f), || format!("{text} does not round-trip"))?;
        }
    }
    Ok(format!("3 listings parse; 1000 formulas round-trip in each of {} dialects", dialects.len()))
}

fn benchmark_shape() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let seed = 2024u64;
    let text: Vec<String> = (0..100u64)
        .map(|i| gen_conjunction(1 + (i as usize % 20), seed + i).to_string())
        .collect();
    let input = dir.path().join("conjunctions.txt");
    fs::write(&input, text.join("\n")).map_err(|e| e.to_string())?;
    let mut report = run_file(&input, &SolverSpec::builtin(), Duration::from_secs(60), Mode::Separate)
        .map_err(|e| e.to_string())?;
    report.seed = Some(seed);
    let output = dir.path().join("output.txt");
    report.write(&output).map_err(|e| e.to_string())?;
    let written = fs::read_to_string(&output).map_err(|e| e.to_string())?;
    check_output_schema(&written, 100, report.solvers.len())?;

    ensure(report.totals.windows(2).all(|w| w[0].total <= w[1].total), || "totals not fastest first".into())?;
    let summary = report.summary("output.txt");
    ensure(summary.last().map(String::as_str) == Some("The generated file is output.txt."), || {
        format!("{summary:?}")
    })?;
    for (name, series) in cactus(&report).series {
        ensure(series.windows(2).all(|w| w[0] <= w[1]), || format!("{name} series decreases"))?;
    }
    let undecided = 100 - report.count(VerdictKind::Sat) - report.count(VerdictKind::Unsat);
    Ok(format!("100 rows, {undecided} undecided; {}", summary.join(" | ").replace('\t', " ")))
}

fn check_output_schema(text: &str, rows: usize, solvers: usize) -> Result<(), String> {
    let lines: Vec<&str> = text.lines().collect();
    let header = ["# timeout ", "# seed ", "# solvers ", "# mode "];
    for (i, h) in header.iter().enumerate() {
        ensure(lines.get(i).is_some_and(|l| l.starts_with(h)), || format!("header line {i}: {:?}", lines.get(i)))?;
    }
    let body = &lines[header.len()..];
    ensure(body.len() == rows + 1 + solvers, || format!("{} lines after the header", body.len()))?;
    let four_decimals = |s: &str| s.split_once('.').is_some_and(|(a, b)| a.parse::<u64>().is_ok() && b.len() == 4);
    for row in &body[..rows] {
        let cols: Vec<&str> = row.split('\t').collect();
        let ok = cols.len() == 4
            && cols[0].parse::<usize>().is_ok()
            && ["sat", "unsat", "timeout", "unknown", "error", "conflict"].contains(&cols[1])
            && !cols[2].is_empty()
            && four_decimals(cols[3]);
        ensure(ok, || format!("bad row {row:?}"))?;
    }
    ensure(body[rows] == "# totals", || format!("expected totals, got {:?}", body[rows]))?;
    for row in &body[rows + 1..] {
        let cols: Vec<&str> = row.split('\t').collect();
        let ok = cols.len() == 3 && four_decimals(cols[1]) && cols[2].parse::<usize>().is_ok();
        ensure(ok, || format!("bad totals row {row:?}"))?;
    }
    Ok(())
}

fn registration() -> Outcome {
    let stubs = Stubs::new();
    let stub: PathBuf = stubs.answer("alaska", 0.0, "unsat\\n");
    let dir = stubs.dir.path();
    let o = Command::new(env!("CARGO_BIN_EXE_polsat"))
        .args(["-add", "./alaska"])
        .current_dir(dir)
        .env("POLSAT_REGISTRY", dir.join("registry"))
        .stdin(std::process::Stdio::null())
        .output()
        .map_err(|e| e.to_string())?;
    let out = lines(&o);
    ensure(out.first().map(String::as_str) == Some("./alaska is added."), || format!("{out:?}"))?;
    ensure(out.get(1).map(String::as_str) == Some("please input the formula:"), || format!("{out:?}"))?;
    let saved = fs::read_to_string(dir.join("registry")).map_err(|e| e.to_string())?;
    ensure(saved.trim() == stub.to_string_lossy(), || format!("registry holds {saved:?}"))?;

    // a fresh process picks the stub up; on this formula the built-in solvers
    // run out of time, so only the stub can answer
    let hard = (0..24)
        .map(|i| format!("G (r{i} <-> X r{})", i + 1))
        .chain(["G r0".to_string(), "F G !r24".to_string()])
        .collect::<Vec<_>>()
        .join(" & ");
    let out = lines(&polsat(dir, &["-t", "2", &hard]));
    ensure(out.len() == 3 && out[0] == "unsat" && out[1] == "from alaska", || format!("{out:?}"))?;
    Ok("registry survives restart; next race won by the stub".into())
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("evidence validity", evidence_validity),
        ("reference formulas", reference_formulas),
        ("race semantics", race_semantics),
        ("timeout accounting", timeout_accounting),
        ("consistency platform", consistency),
        ("parser fidelity", parser_fidelity),
        ("benchmark shape", benchmark_shape),
        ("registration", registration),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
