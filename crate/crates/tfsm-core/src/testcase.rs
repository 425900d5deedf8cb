//! Test cases: timed input sequences paired with the outputs the reference
//! machine is expected to produce. A test drawn from a machine's own trace is
//! guaranteed to pass on that machine; run against anything else it becomes a
//! conformance check.

use thiserror::Error;

use crate::exec::{TimedInput, TimedTrace, TraceEvent};
use crate::machine::Output;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestStep {
    pub input: TimedInput,
    pub expect: Output,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestCase {
    pub id: String,
    pub steps: Vec<TestStep>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TestCaseError {
    #[error("test {test}: timestamps must be strictly increasing ({at}ms follows {prev}ms)")]
    NotIncreasing { test: String, prev: u64, at: u64 },
    #[error("test {test}: no steps")]
    Empty { test: String },
}

impl TestCase {
    pub fn new(id: impl Into<String>, steps: Vec<TestStep>) -> Self {
        TestCase {
            id: id.into(),
            steps,
        }
    }

    /// The observable trace of a run, turned into the expectation it
    /// witnessed: replaying these inputs on the machine that produced the
    /// trace yields exactly these outputs.
    pub fn from_trace(id: impl Into<String>, trace: &TimedTrace) -> Self {
        let steps = trace
            .events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Io { input, output } => Some(TestStep {
                    input: input.clone(),
                    expect: output.clone(),
                }),
                TraceEvent::Timeout(_) => None,
            })
            .collect();
        TestCase::new(id, steps)
    }

    pub fn inputs(&self) -> Vec<TimedInput> {
        self.steps.iter().map(|s| s.input.clone()).collect()
    }

    pub fn check(&self) -> Result<(), TestCaseError> {
        if self.steps.is_empty() {
            return Err(TestCaseError::Empty {
                test: self.id.clone(),
            });
        }
        for pair in self.steps.windows(2) {
            if pair[1].input.at <= pair[0].input.at {
                return Err(TestCaseError::NotIncreasing {
                    test: self.id.clone(),
                    prev: pair[0].input.at,
                    at: pair[1].input.at,
                });
            }
        }
        Ok(())
    }
}
