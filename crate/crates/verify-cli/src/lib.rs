//! Scenario registry and runner for the contact metric checks.
//!
//! A scenario pairs a structure with one check and the verdict that check
//! should reach. [`run_scenario`] never panics on bad input: a structure
//! that cannot be built yields an `error` verdict.

pub mod emit;
pub mod registry;
pub mod runner;

pub use emit::{emit_all, emit_report, Format};
pub use registry::{ScenarioDef, REGISTRY};
pub use runner::{expand, run_scenario, suite, Outcome, Overrides, RunSettings, Scenario};

use kmu_core::report::Verdict;
use kmu_core::sampling::Strategy;

/// Process exit code for a set of outcomes: 2 if any scenario could not be
/// built, 1 if any verdict differs from its expectation, 0 otherwise.
pub fn exit_code(outcomes: &[Outcome]) -> i32 {
    if outcomes.iter().any(|o| o.report.verdict == Verdict::Error) {
        2
    } else if outcomes.iter().all(Outcome::as_expected) {
        0
    } else {
        1
    }
}

/// Parses a grid size written `AxBxC`.
pub fn parse_grid(text: &str) -> Result<Strategy, String> {
    let counts: Vec<usize> = text
        .split('x')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| format!("bad grid '{text}': {e}"))?;
    match counts[..] {
        [a, b, c] if a > 0 && b > 0 && c > 0 => Ok(Strategy::Grid([a, b, c])),
        _ => Err(format!("grid must be AxBxC with positive counts, got '{text}'")),
    }
}
