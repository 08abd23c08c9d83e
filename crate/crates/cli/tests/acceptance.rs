//! Acceptance criteria. Prints one PASS/FAIL line per criterion to stderr
//! (uncaptured) and fails if any criterion fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use scexp_core::suites::{self, SuiteReport};

/// Property name, pinned slack.
type Pinned = &'static [(&'static str, f64)];

const IDENTITY: Pinned = &[
    ("channel information equals 2", 1e-4),
    ("exponent equals (R - 2)+", 2e-4),
    ("exponent within its truncation bound", 1e-9),
];
const COMMUTING: Pinned = &[
    ("sandwiched equals classical", 1e-8),
    ("log-Euclidean equals classical", 1e-8),
];
const PROPERTIES: Pinned = &[
    ("sandwiched nondecreasing in alpha", 1e-8),
    ("log-Euclidean nondecreasing in alpha", 1e-8),
    ("sandwiched antimonotone in sigma", 1e-8),
    ("log-Euclidean antimonotone in sigma", 1e-8),
    ("sandwiched mutual information additive", 1e-6),
    ("sandwiched convex in sigma", 1e-8),
    ("log-Euclidean convex in sigma", 1e-8),
    ("pinching lowers the sandwiched divergence", 1e-8),
    ("pinching costs at most 2 log v", 1e-8),
    ("variational form of log-Euclidean", 1e-5),
];
const DOMINANCE: Pinned = &[
    ("v within (n+1)^2", 0.0),
    ("v within the general bound", 0.0),
    ("distinct eigenvalues within v", 0.0),
    ("dominance", 1e-9),
];
const VARIATIONAL: Pinned = &[
    ("supremum form equals variational form", 1e-4),
    ("branch minimum equals variational form", 1e-4),
];
const THRESHOLD: Pinned = &[
    ("capacity equals maximally entangled mutual information", 1e-4),
    ("exponent zero below capacity", 1e-9),
    ("exponent positive above capacity", 0.0),
];
const SIMULATOR: Pinned = &[
    ("dense coding is exact", 1e-12),
    ("measured exponent at least sc - 0.05", 0.0),
    ("padding scales by M'/M", 1e-12),
];
const PINCHING: Pinned = &[
    ("X <= v(sigma) P(X)", 1e-10),
    ("D(rho||sigma) <= D(P(rho)||sigma) + f(M)", 1e-8),
];

struct Outcome {
    passed: bool,
    summary: String,
}

fn line(id: usize, title: &str, o: &Outcome, elapsed: Duration, limit: Duration) -> bool {
    let in_time = elapsed <= limit;
    let ok = o.passed && in_time;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id} [{}] {title}: {} ({:.2}s of {}s)",
        if ok { "PASS" } else { "FAIL" },
        o.summary,
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

/// Runs a suite and checks its result against the pinned properties and case count.
fn suite(name: &str, pinned: Pinned, cases: usize) -> Outcome {
    let report: SuiteReport = match suites::run(name, suites::DEFAULT_SEED) {
        Ok(r) => r,
        Err(e) => {
            return Outcome {
                passed: false,
                summary: format!("error: {e}"),
            }
        }
    };
    let mut problems = Vec::new();
    if report.cases != cases {
        problems.push(format!("{} cases, expected {cases}", report.cases));
    }
    for &(property, slack) in pinned {
        match report.properties.iter().find(|p| p.property == property) {
            Some(p) if p.slack == slack => {}
            Some(p) => problems.push(format!("{property}: slack {} instead of {slack}", p.slack)),
            None => problems.push(format!("{property}: not checked")),
        }
    }
    if report.properties.len() != pinned.len() {
        problems.push(format!("{} properties, expected {}", report.properties.len(), pinned.len()));
    }
    for v in &report.violations {
        problems.push(format!("{} (case {}): margin {:e}, {}", v.property, v.case, v.margin, v.detail));
    }
    let worst = report
        .properties
        .iter()
        .map(|p| format!("{} {:+.1e}", p.property, p.worst_margin))
        .collect::<Vec<_>>()
        .join("; ");
    Outcome {
        passed: problems.is_empty(),
        summary: if problems.is_empty() {
            format!("{} checks, 0 violations; worst margins: {worst}", report.checks)
        } else {
            problems.join(" | ")
        },
    }
}

fn run_cli(args: &[&str]) -> (bool, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_scexp"))
        .args(args)
        .env_remove("SCEXP_GRAD_TOL")
        .env_remove("SCEXP_INNER_GRAD_TOL")
        .env_remove("SCEXP_LAMBDA_DELTA")
        .env_remove("SCEXP_LAMBDA_TOL")
        .output()
        .expect("scexp runs");
    (out.status.success(), out.stdout)
}

fn determinism() -> Outcome {
    let commands: &[&[&str]] = &[
        &["divergence", "--rho", "diag:0.5,0.5", "--sigma", "diag:0.75,0.25", "--alpha", "0.6,2,3"],
        &["channel-info", "--channel", "preset:amplitude-damping:0.3", "--alpha", "1,2"],
        &["exponent-curve", "--channel", "preset:depolarizing:0.1", "--rates", "1.2:1.8:0.3"],
        &["simulate", "--channel", "preset:depolarizing:0.1", "--rate", "1.7", "--blocklengths", "1:3", "--seed", "9", "--seeds", "2"],
        &["verify", "pinching", "--seed", "4", "--format", "jsonl"],
    ];
    let mut problems = Vec::new();
    for args in commands {
        let (ok1, a) = run_cli(args);
        let (ok2, b) = run_cli(args);
        if !(ok1 && ok2) {
            problems.push(format!("{} exited nonzero", args[0]));
        } else if a != b || a.is_empty() {
            problems.push(format!("{} output differs between runs", args[0]));
        }
    }
    let (_, div) = run_cli(commands[0]);
    let text = String::from_utf8_lossy(&div);
    if !text.lines().any(|l| l.starts_with("2.0,0.5,0.41503749927884")) {
        problems.push(format!("divergence output unexpected: {text}"));
    }
    Outcome {
        passed: problems.is_empty(),
        summary: if problems.is_empty() {
            format!("{} commands byte-identical across two runs", commands.len())
        } else {
            problems.join(" | ")
        },
    }
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>, Duration)> = vec![
        ("identity qubit channel: I*_a = 2, sc(R) = (R-2)+", Box::new(|| suite("identity", IDENTITY, 6)), secs(10)),
        ("commuting pairs collapse to the classical divergence", Box::new(|| suite("commuting", COMMUTING, 50)), secs(5)),
        ("divergence properties on 100 random instances", Box::new(|| suite("properties", PROPERTIES, 100)), secs(120)),
        ("universal symmetric state dominance, n = 2, 3, 4", Box::new(|| suite("dominance", DOMINANCE, 600)), secs(60)),
        ("supremum, variational and branch forms of F agree", Box::new(|| suite("variational", VARIATIONAL, 40)), secs(300)),
        ("exponent threshold at the EA capacity", Box::new(|| suite("threshold", THRESHOLD, 3)), secs(60)),
        ("simulated codes: dense coding, exponent inequality, padding", Box::new(|| suite("simulator", SIMULATOR, 8)), secs(300)),
        ("pinching inequality and refined pinching bound", Box::new(|| suite("pinching", PINCHING, 100)), secs(30)),
        ("CLI output is byte-identical for a fixed seed", Box::new(determinism), secs(300)),
    ];
    let mut failed = Vec::new();
    for (k, (title, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        if !line(k + 1, title, &outcome, start.elapsed(), *limit) {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
