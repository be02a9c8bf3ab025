//! Runs every acceptance criterion against the shipped catalog and prints one
//! line per criterion. Exits nonzero if any criterion fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use crsym::catalog::Catalog;
use crsym::verify::{run, Criterion, VerifyOptions};

fn budget(c: Criterion) -> Duration {
    let minutes = match c {
        Criterion::Regularity => 2,
        Criterion::IntersectionDims => 5,
        Criterion::MaximalIntersection => 10,
        Criterion::MaximalProlongation => 15,
        Criterion::NonRegularVanishing => 10,
        Criterion::Properties => 2,
    };
    Duration::from_secs(60 * minutes)
}

fn main() -> ExitCode {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../catalog");
    let catalog = match Catalog::load(&dir) {
        Ok(c) => c,
        Err(e) => {
            println!("cannot load catalog: {e}");
            return ExitCode::FAILURE;
        }
    };
    let opts = VerifyOptions::default();
    let mut failed = 0;
    for c in Criterion::ALL {
        let mut o = run(c, &catalog, &opts);
        let limit = budget(c);
        if o.seconds > limit.as_secs_f64() {
            o.passed = false;
            o.failures.push(format!("took {:.1}s, budget {}s", o.seconds, limit.as_secs()));
        }
        println!("{}", o.line());
        for f in &o.failures {
            println!("    {f}");
        }
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", Criterion::ALL.len() - failed, Criterion::ALL.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
