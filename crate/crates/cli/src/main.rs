//! `polsat`: check LTL satisfiability with a portfolio of solvers.

use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use polsat::bench::{format_seconds, run_file, Mode, DEFAULT_TIMEOUT};
use polsat::engine::Verdict;
use polsat::external::{Registration, Registry};
use polsat::ltl::{parse, Formula};
use polsat::portfolio::{arbitrate, race, run_all, SolverSpec};

const USAGE: &str = "\
usage: polsat [-t seconds] [-e] [-s] [formula]
       polsat [-t seconds] -sm file
       polsat -add solverpath

  -e          print evidence for satisfiable formulas
  -s          run every solver to completion and list their answers
  -sm file    check every formula in file, write output.txt
  -add path   register an external solver, then prompt for a formula
  -t seconds  timeout per solver and formula (default 60)

With no formula, one is read from standard input.";

const OUTPUT_FILE: &str = "output.txt";

#[derive(Debug, Default)]
struct Args {
    evidence: bool,
    separate: bool,
    batch: Option<PathBuf>,
    add: Option<String>,
    timeout: Option<Duration>,
    formula: Option<String>,
}

fn parse_args(argv: impl IntoIterator<Item = String>) -> Result<Args, String> {
    let mut args = Args::default();
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let mut value = |flag: &str| it.next().ok_or(format!("{flag} needs an argument"));
        match a.as_str() {
            "-e" => args.evidence = true,
            "-s" => args.separate = true,
            "-sm" => args.batch = Some(value("-sm")?.into()),
            "-add" => args.add = Some(value("-add")?),
            "-t" => {
                let v = value("-t")?;
                let secs: f64 = v.parse().map_err(|_| format!("bad timeout `{v}`"))?;
                if !(secs > 0.0 && secs.is_finite()) {
                    return Err(format!("bad timeout `{v}`"));
                }
                args.timeout = Some(Duration::from_secs_f64(secs));
            }
            flag if flag.starts_with('-') && flag.len() > 1 => return Err(format!("unknown flag `{flag}`")),
            _ if args.formula.is_some() => return Err("more than one formula given".into()),
            _ => args.formula = Some(a),
        }
    }
    if args.batch.is_some() && args.formula.is_some() {
        return Err("-sm does not take a formula".into());
    }
    Ok(args)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if argv.iter().any(|a| a == "-h" || a == "--help") {
        println!("{USAGE}");
        return ExitCode::SUCCESS;
    }
    let args = match parse_args(argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("polsat: {msg}\n{USAGE}");
            return ExitCode::from(1);
        }
    };
    ExitCode::from(run(args))
}

fn run(args: Args) -> u8 {
    let mut registry = match Registry::open_default() {
        Ok(r) => Some(r),
        Err(e) => {
            eprintln!("polsat: warning: {e}; external solvers unavailable");
            None
        }
    };

    if let Some(path) = &args.add {
        let Some(reg) = registry.as_mut() else {
            return 1;
        };
        match reg.register(path) {
            Ok(Registration::Added) => println!("{path} is added."),
            Ok(Registration::AlreadyPresent) => eprintln!("polsat: warning: {path} is already registered"),
            Err(e) => {
                eprintln!("polsat: {e}");
                return 1;
            }
        }
    }

    let mut solvers = SolverSpec::builtin();
    if let Some(reg) = &registry {
        solvers.extend(reg.solvers.iter().cloned().map(SolverSpec::external));
    }
    let timeout = args.timeout.unwrap_or(DEFAULT_TIMEOUT);

    if let Some(file) = &args.batch {
        return batch(file, &solvers, timeout);
    }

    let text = match args.formula {
        Some(t) => t,
        None => match prompt() {
            Some(t) => t,
            None => return 1,
        },
    };
    let f = match parse(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("polsat: parse error at {e}");
            return 1;
        }
    };
    if args.separate {
        separate(&f, &solvers, timeout, args.evidence)
    } else {
        single(&f, &solvers, timeout, args.evidence)
    }
}

fn prompt() -> Option<String> {
    println!("please input the formula:");
    let _ = io::stdout().flush();
    let mut line = String::new();
    match io::stdin().lock().read_line(&mut line) {
        Ok(n) if n > 0 => Some(line.trim().to_string()),
        _ => {
            eprintln!("polsat: no formula given");
            None
        }
    }
}

fn single(f: &Formula, solvers: &[SolverSpec], timeout: Duration, want_evidence: bool) -> u8 {
    let result = race(f, solvers, timeout, want_evidence).expect("built-in solvers are always present");
    println!("{}", result.verdict);
    if want_evidence {
        if let Verdict::Sat(Some(w)) = &result.verdict {
            println!("{w}");
        }
    }
    println!("from {}", result.winner);
    println!("eclipse time: {}s", format_seconds(result.elapsed));
    if result.verdict.is_definitive() {
        0
    } else {
        2
    }
}

fn separate(f: &Formula, solvers: &[SolverSpec], timeout: Duration, want_evidence: bool) -> u8 {
    let records = run_all(f, solvers, timeout);
    for r in &records {
        println!("{}: {}\t{}s", r.solver, r.verdict, format_seconds(r.elapsed));
        if want_evidence {
            if let Some(w) = r.evidence() {
                println!("{w}");
            }
        }
    }
    let report = arbitrate(f, &records);
    if !report.is_consistent() {
        println!("{report}");
    }
    if records.iter().any(|r| r.verdict.is_definitive()) {
        0
    } else {
        2
    }
}

fn batch(file: &std::path::Path, solvers: &[SolverSpec], timeout: Duration) -> u8 {
    let report = match run_file(file, solvers, timeout, Mode::Separate) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("polsat: {e}");
            return 1;
        }
    };
    for (line, e) in report.parse_errors() {
        eprintln!("polsat: {}:{line}: parse error at {e}", file.display());
    }
    if let Err(e) = report.write(std::path::Path::new(OUTPUT_FILE)) {
        eprintln!("polsat: {e}");
        return 1;
    }
    for line in report.summary(OUTPUT_FILE) {
        println!("{line}");
    }
    0
}
