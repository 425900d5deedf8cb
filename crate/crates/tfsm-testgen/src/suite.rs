//! Greedy suite derivation: walk the mutants in generation order, reuse any
//! test that already kills, and search for a fresh distinguishing sequence
//! only when none does. The result is a small suite — usually much smaller
//! than the mutant count — plus the full kill matrix.

use thiserror::Error;
use tfsm_attack::{apply_descriptor, AttackError, MutantSet};
use tfsm_core::{StepError, TestCase, TimedStateMachine};

use crate::execute::{execute_test, TestOutcome};
use crate::search::{distinguish, SearchConfig};

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("cannot build mutant: {0}")]
    Attack(#[from] AttackError),
    #[error("execution failed: {0}")]
    Step(#[from] StepError),
}

/// Which tests kill which mutants. `kills[m][t]` pairs `mutants[m]` with
/// `tests[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillMatrix {
    pub tests: Vec<String>,
    pub mutants: Vec<String>,
    pub kills: Vec<Vec<bool>>,
}

impl KillMatrix {
    /// Mutant ids no test in the suite kills.
    pub fn alive(&self) -> Vec<String> {
        self.mutants
            .iter()
            .zip(&self.kills)
            .filter(|(_, row)| !row.iter().any(|k| *k))
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn killed_count(&self) -> usize {
        self.kills
            .iter()
            .filter(|row| row.iter().any(|k| *k))
            .count()
    }
}

/// A derived suite with its coverage record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedSuite {
    pub tests: Vec<TestCase>,
    /// Mutants no sequence within budget could separate from the reference.
    pub alive: Vec<String>,
    pub matrix: KillMatrix,
}

fn kills(m: &TimedStateMachine, test: &TestCase) -> Result<bool, StepError> {
    Ok(matches!(
        execute_test(m, test)?.outcome,
        TestOutcome::Kill { .. }
    ))
}

/// Derive a suite killing every distinguishable mutant in the set.
pub fn derive_suite(
    spec: &TimedStateMachine,
    set: &MutantSet,
    config: &SearchConfig,
) -> Result<DerivedSuite, DeriveError> {
    let mut machines = Vec::with_capacity(set.mutants.len());
    for d in &set.mutants {
        machines.push((d.id.clone(), apply_descriptor(spec, d)?));
    }

    let mut tests: Vec<TestCase> = Vec::new();
    let mut alive: Vec<String> = Vec::new();
    for (id, machine) in &machines {
        let mut covered = false;
        for test in &tests {
            if kills(machine, test)? {
                covered = true;
                break;
            }
        }
        if covered {
            continue;
        }
        match distinguish(spec, machine, &format!("T{}", tests.len() + 1), config)? {
            Some(test) => tests.push(test),
            None => alive.push(id.clone()),
        }
    }

    let mut rows = Vec::with_capacity(machines.len());
    for (_, machine) in &machines {
        let mut row = Vec::with_capacity(tests.len());
        for test in &tests {
            row.push(kills(machine, test)?);
        }
        rows.push(row);
    }
    let matrix = KillMatrix {
        tests: tests.iter().map(|t| t.id.clone()).collect(),
        mutants: machines.iter().map(|(id, _)| id.clone()).collect(),
        kills: rows,
    };
    Ok(DerivedSuite {
        tests,
        alive,
        matrix,
    })
}
