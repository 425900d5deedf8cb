//! In-process test execution: replay a test's timed inputs on a machine and
//! compare observed outputs against the test's expectations.

use tfsm_core::{Output, StepError, TestCase, TimedStateMachine};

/// How a test ended against one target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TestOutcome {
    /// Every observed output matched the expectation.
    Pass,
    /// The target diverged; `divergence_index` is the 0-based step where.
    Kill { divergence_index: usize },
}

/// Everything observed while executing a test once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Execution {
    pub test: String,
    pub outcome: TestOutcome,
    /// One output per executed step, in order.
    pub observed: Vec<Output>,
}

/// First-mismatch comparison. A missing or surplus tail counts as a
/// divergence at the first index past the shorter sequence.
pub fn compare_outputs(expected: &[Output], observed: &[Output]) -> TestOutcome {
    for (ix, (e, o)) in expected.iter().zip(observed.iter()).enumerate() {
        if e != o {
            return TestOutcome::Kill {
                divergence_index: ix,
            };
        }
    }
    if expected.len() != observed.len() {
        return TestOutcome::Kill {
            divergence_index: expected.len().min(observed.len()),
        };
    }
    TestOutcome::Pass
}

/// Run a test to completion on a machine — divergence does not stop the
/// replay, so the full observation is always available — then compare.
pub fn execute_test(m: &TimedStateMachine, test: &TestCase) -> Result<Execution, StepError> {
    let trace = m.run(&test.inputs())?;
    let observed = trace.outputs();
    let expected: Vec<Output> = test.steps.iter().map(|s| s.expect.clone()).collect();
    Ok(Execution {
        test: test.id.clone(),
        outcome: compare_outputs(&expected, &observed),
        observed,
    })
}
