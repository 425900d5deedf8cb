//! Fault-injection fingerprinting: decide whether a remote device still runs
//! the firmware it claims to, or has been swapped for a lookalike.
//!
//! A counterfeit can pass a fixed acceptance suite — suites are published
//! with the device, so an imitator only has to reproduce the expected
//! outputs. What it cannot cheaply reproduce is how the *reference* machine
//! misbehaves under every injected fault. So:
//!
//! * **Phase 1** replays the suite against the unmodified device. Every test
//!   must pass; any failure ends the check as `SUSPECT` immediately.
//! * **Phase 2** installs each mutant descriptor over the wire, replays the
//!   suite, and compares every run — outcome, divergence point, and the
//!   full output sequence — against an in-process execution of the same
//!   mutant built from the reference model. One mismatched row means the
//!   remote base machine differs from the reference: `SUSPECT`.
//!
//! The device is `CONSISTENT` only if phase 1 is clean and every phase-2 row
//! matches.

use std::net::ToSocketAddrs;

use thiserror::Error;

use tfsm_attack::{apply_descriptor, AttackError, MutantDescriptor};
use tfsm_core::{Output, StepError, TestCase, TimedStateMachine};
use tfsm_testgen::{execute_test, TestOutcome};

use crate::client::{Client, RunOutcome, RunRow, WireError};

#[derive(Debug, Error)]
pub enum FingerprintError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("reference mutant failed to build: {0}")]
    Mutant(#[from] AttackError),
    #[error("reference execution failed: {0}")]
    Reference(#[from] StepError),
}

/// What one party observed for one test: the verdict and the raw outputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub outcome: RunOutcome,
    pub observed: Vec<Output>,
}

/// One phase-2 comparison: a (mutant, test) cell of the fingerprint matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FingerprintRow {
    pub mutant: String,
    pub test: String,
    pub expected: Observation,
    pub observed: Observation,
    pub matches: bool,
}

/// The full two-phase result.
#[derive(Clone, Debug)]
pub struct FingerprintReport {
    pub model: String,
    /// Phase 1: the suite against the unmodified device.
    pub phase1: Vec<RunRow>,
    /// Whether every phase-1 test passed.
    pub phase1_consistent: bool,
    /// Phase 2 comparisons; empty if phase 1 already failed.
    pub rows: Vec<FingerprintRow>,
    /// The verdict: phase 1 clean and every phase-2 row matching.
    pub consistent: bool,
}

impl FingerprintReport {
    pub fn verdict(&self) -> &'static str {
        if self.consistent {
            "CONSISTENT"
        } else {
            "SUSPECT"
        }
    }
}

fn to_run_outcome(o: &TestOutcome) -> RunOutcome {
    match o {
        TestOutcome::Pass => RunOutcome::Pass,
        TestOutcome::Kill { divergence_index } => RunOutcome::Kill {
            divergence_index: *divergence_index,
        },
    }
}

/// Run the two-phase fingerprint against the device at `addr`.
///
/// `spec` is the reference model the device claims to run, `tests` the
/// distinguishing suite, `descriptors` the faults to inject. The server must
/// allow `MUTATE`; a refusal surfaces as [`FingerprintError::Wire`].
pub fn fingerprint(
    addr: impl ToSocketAddrs,
    spec: &TimedStateMachine,
    tests: &[TestCase],
    descriptors: &[MutantDescriptor],
) -> Result<FingerprintReport, FingerprintError> {
    let mut client = Client::connect(addr, &spec.id)?;

    let phase1 = client.run_suite(tests)?;
    let phase1_consistent = phase1.iter().all(RunRow::passed);
    if !phase1_consistent {
        let _ = client.end();
        return Ok(FingerprintReport {
            model: spec.id.clone(),
            phase1,
            phase1_consistent,
            rows: Vec::new(),
            consistent: false,
        });
    }

    let mut rows = Vec::with_capacity(descriptors.len() * tests.len());
    for d in descriptors {
        let reference = apply_descriptor(spec, d)?;
        if let Err(e) = client.mutate(d) {
            match e {
                // A device refusing a descriptor that applies cleanly to the
                // reference is itself a fingerprint mismatch. (A server that
                // forbids MUTATE outright cannot be fingerprinted at all —
                // that stays a hard error.)
                WireError::Refused { code, detail } if code != "mutate-forbidden" => {
                    for test in tests {
                        let expected_exec = execute_test(&reference, test)?;
                        rows.push(FingerprintRow {
                            mutant: d.id.clone(),
                            test: test.id.clone(),
                            expected: Observation {
                                outcome: to_run_outcome(&expected_exec.outcome),
                                observed: expected_exec.observed,
                            },
                            observed: Observation {
                                outcome: RunOutcome::Transport {
                                    detail: format!("MUTATE refused: {code} {detail}"),
                                },
                                observed: Vec::new(),
                            },
                            matches: false,
                        });
                    }
                    continue;
                }
                other => return Err(other.into()),
            }
        }
        for test in tests {
            let expected_exec = execute_test(&reference, test)?;
            let expected = Observation {
                outcome: to_run_outcome(&expected_exec.outcome),
                observed: expected_exec.observed,
            };
            let row = client.run_test(test)?;
            let observed = Observation {
                outcome: row.outcome,
                observed: row.observed,
            };
            let matches = expected == observed;
            rows.push(FingerprintRow {
                mutant: d.id.clone(),
                test: test.id.clone(),
                expected,
                observed,
                matches,
            });
        }
    }
    let _ = client.end();

    let consistent = rows.iter().all(|r| r.matches);
    Ok(FingerprintReport {
        model: spec.id.clone(),
        phase1,
        phase1_consistent,
        rows,
        consistent,
    })
}
