//! `selftest`: library results against brute-force oracles, plus the shipped fixtures.

use std::path::{Path, PathBuf};

use lrs_core::kernel::{Domain, Scalar};
use lrs_core::malcev::{bch, MAX_CLASS};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::analyze::{analyze_input, Options};
use crate::error::CliError;
use crate::input::{load, parse_model, Kind};
use crate::oracle;
use crate::report::{Report, Section, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

/// What analyzing a shipped fixture is expected to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    Succeeds,
    FailsAt(&'static str),
}

pub const FIXTURES: [(&str, Kind, Expect); 10] = [
    ("h3.json", Kind::Lie, Expect::Succeeds),
    ("h3-plus-abelian.json", Kind::Lie, Expect::Succeeds),
    ("z-lattice-ring.json", Kind::Ring, Expect::Succeeds),
    ("gf2-diagonal.json", Kind::CommutativeAlgebra, Expect::Succeeds),
    ("q-x2-2-squared.json", Kind::CommutativeAlgebra, Expect::Succeeds),
    ("free-class3-rank2.json", Kind::Lie, Expect::Succeeds),
    ("two-heisenbergs-and-a-line.json", Kind::Ring, Expect::Succeeds),
    ("alternating-q2.json", Kind::Bilinear, Expect::Succeeds),
    ("zero-bilinear.json", Kind::Bilinear, Expect::Succeeds),
    ("free-line-module.json", Kind::Module, Expect::FailsAt("divisible_bounded_split")),
];

/// The fixtures directory of this crate.
pub fn default_fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

struct Suite {
    name: &'static str,
    total: usize,
    failures: Vec<String>,
}

impl Suite {
    fn new(name: &'static str) -> Suite {
        Suite { name, total: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.total += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn section(&self) -> Section {
        let mut s = Section::new();
        s.text("suite", self.name);
        s.count("checks", self.total);
        s.count("passed", self.total - self.failures.len());
        s.push("failures", Value::List(self.failures.iter().map(|f| Value::Text(f.clone())).collect()));
        s
    }
}

fn scalar_suite(level: Level) -> Suite {
    let mut suite = Suite::new("P(f) against enumeration over finite fields");
    let (primes, random): (&[u64], usize) = match level {
        Level::Quick => (&[2], 8),
        Level::Full => (&[2, 3], 24),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut instances = oracle::structured_instances(primes);
    instances.extend(oracle::nondegenerate_instances(&mut rng, primes, random));
    for b in &instances {
        match oracle::compare_scalars(b) {
            Ok(c) => suite.check(c.passed(), || format!("GF({}) tensor {:?}: {c:?}", b.p, b.t)),
            Err(e) => suite.check(false, || format!("GF({}) tensor {:?}: {e}", b.p, b.t)),
        }
    }
    suite
}

fn smith_suite(level: Level) -> Suite {
    let mut suite = Suite::new("Smith normal form re-multiplication and minors");
    let count = match level {
        Level::Quick => 60,
        Level::Full => 300,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for _ in 0..count {
        let a = oracle::random_int_matrix(&mut rng);
        suite.check(oracle::check_smith(&a), || format!("matrix {a:?}"));
    }
    suite
}

fn bch_suite(level: Level) -> Suite {
    let mut suite = Suite::new("BCH against 3x3 unitriangular matrices");
    let count = match level {
        Level::Quick => 200,
        Level::Full => 1000,
    };
    let l = oracle::heisenberg();
    let q = Domain::Rationals;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    for _ in 0..count {
        let (x, y) = (oracle::random_rationals(&mut rng, 3), oracle::random_rationals(&mut rng, 3));
        let as_scalars = |v: &[lrs_core::kernel::Rational]| v.iter().cloned().map(Scalar::Rat).collect::<Vec<_>>();
        let got = bch(&l, &as_scalars(&x), &as_scalars(&y), MAX_CLASS)
            .map(|z| z.iter().map(|s| q.to_rational(s).expect("rational coordinates")).collect::<Vec<_>>());
        let want = oracle::heisenberg_product(&x, &y);
        suite.check(got.as_ref().is_ok_and(|z| *z == want), || format!("x = {x:?}, y = {y:?}"));
    }
    suite
}

fn fixture_suite(dir: &Path) -> Suite {
    let mut suite = Suite::new("shipped fixtures");
    if !dir.is_dir() {
        suite.check(false, || format!("fixture directory {} is missing", dir.display()));
        return suite;
    }
    for (name, kind, expect) in FIXTURES {
        let path = dir.join(name);
        let Ok(text) = std::fs::read_to_string(&path) else {
            suite.check(false, || format!("missing fixture {name}"));
            continue;
        };
        let input = match load(&text, name, None) {
            Ok(i) => i,
            Err(e) => {
                suite.check(false, || format!("{e}"));
                continue;
            }
        };
        let round_trip = parse_model(&input.document.serialize(), name).is_ok_and(|d| d == input.document);
        suite.check(round_trip, || format!("{name}: parse, serialize, parse is not the identity"));
        let outcome = analyze_input(&input, kind, &Options::default());
        let ok = match (expect, &outcome) {
            (Expect::Succeeds, Ok(_)) => true,
            (Expect::FailsAt(stage), Err(CliError::Pipeline { stage: s, .. })) => stage == *s,
            _ => false,
        };
        suite.check(ok, || match outcome {
            Ok(_) => format!("{name}: expected a failure, analysis succeeded"),
            Err(e) => format!("{name}: {e}"),
        });
    }
    suite
}

/// Runs every suite; failures are report content. Returns the report and whether all passed.
pub fn cmd_selftest(level: Level, fixture_dir: &Path) -> (Report, bool) {
    let suites = [scalar_suite(level), smith_suite(level), bch_suite(level), fixture_suite(fixture_dir)];
    let passed = suites.iter().all(|s| s.failures.is_empty());
    let mut body = Section::new();
    body.push("suites", Value::List(suites.iter().map(|s| Value::Group(s.section())).collect()));
    body.count("checks", suites.iter().map(|s| s.total).sum());
    body.count("failures", suites.iter().map(|s| s.failures.len()).sum());
    body.flag("all passed", passed);
    let name = match level {
        Level::Quick => "quick",
        Level::Full => "full",
    };
    (Report::new(format!("selftest {name}"), body), passed)
}
