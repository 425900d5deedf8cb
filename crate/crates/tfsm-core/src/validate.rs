//! Whole-machine validation. An empty report is the contract every other
//! operation in the workspace assumes; execution does not re-check these
//! properties step by step.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::expr::{check_guard, check_update, Env, ExprCtx, TypeError, VarKind};
use crate::machine::{TimedStateMachine, EPSILON};
use crate::time::TimeoutRule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoStates,
    UnknownInitial(String),
    DuplicateState(String),
    DuplicateInput(String),
    DuplicateOutput(String),
    DuplicateVariable(String),
    DuplicateTransitionId(String),
    /// "eps" as a declared output, or a variable named "p".
    ReservedName { what: &'static str, name: String },
    MissingTimeout(String),
    DuplicateTimeout(String),
    TimeoutForUnknownState(String),
    TimeoutToUnknownState { state: String, to: String },
    ZeroTimeout(String),
    UnknownTransitionState { transition: String, state: String },
    UnknownTransitionInput { transition: String, input: String },
    UnknownTransitionOutput { transition: String, output: String },
    VariableInitKind { variable: String, want: VarKind, got: VarKind },
    Type { transition: String, place: &'static str, error: TypeError },
    /// Two or more transitions on the same (state, input) whose guards are
    /// absent or constant-true: they would always overlap. Overlaps that
    /// depend on variable values are caught dynamically during stepping.
    GuardOverlap { state: String, input: String, transitions: Vec<String> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoStates => write!(f, "machine declares no states"),
            UnknownInitial(s) => write!(f, "initial state {s:?} is not declared"),
            DuplicateState(s) => write!(f, "state {s:?} declared twice"),
            DuplicateInput(s) => write!(f, "input {s:?} declared twice"),
            DuplicateOutput(s) => write!(f, "output {s:?} declared twice"),
            DuplicateVariable(s) => write!(f, "variable {s:?} declared twice"),
            DuplicateTransitionId(s) => write!(f, "transition id {s:?} used twice"),
            ReservedName { what, name } => write!(f, "{what} may not be named {name:?}"),
            MissingTimeout(s) => write!(f, "state {s:?} has no timeout entry"),
            DuplicateTimeout(s) => write!(f, "state {s:?} has two timeout entries"),
            TimeoutForUnknownState(s) => write!(f, "timeout entry for unknown state {s:?}"),
            TimeoutToUnknownState { state, to } => {
                write!(f, "timeout of {state:?} targets unknown state {to:?}")
            }
            ZeroTimeout(s) => write!(f, "state {s:?} has a zero timeout"),
            UnknownTransitionState { transition, state } => {
                write!(f, "transition {transition} references unknown state {state:?}")
            }
            UnknownTransitionInput { transition, input } => {
                write!(f, "transition {transition} references unknown input {input:?}")
            }
            UnknownTransitionOutput { transition, output } => {
                write!(f, "transition {transition} references unknown output {output:?}")
            }
            VariableInitKind { variable, want, got } => {
                write!(f, "variable {variable:?} is {want} but its initial value is {got}")
            }
            Type { transition, place, error } => {
                write!(f, "transition {transition}, {place}: {error}")
            }
            GuardOverlap { state, input, transitions } => write!(
                f,
                "transitions {transitions:?} at state {state:?} on input {input:?} always overlap"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_machine(m: &TimedStateMachine) -> ValidationReport {
    let mut out = Vec::new();

    if m.states.is_empty() {
        out.push(Violation::NoStates);
    }
    if !m.states.is_empty() && !m.has_state(&m.initial) {
        out.push(Violation::UnknownInitial(m.initial.clone()));
    }

    dupes(m.states.iter().cloned(), |s| out.push(Violation::DuplicateState(s)));
    dupes(m.inputs.iter().map(|i| i.name.clone()), |s| {
        out.push(Violation::DuplicateInput(s))
    });
    dupes(m.outputs.iter().cloned(), |s| out.push(Violation::DuplicateOutput(s)));
    dupes(m.variables.iter().map(|v| v.name.clone()), |s| {
        out.push(Violation::DuplicateVariable(s))
    });
    dupes(m.transitions.iter().map(|t| t.id.clone()), |s| {
        out.push(Violation::DuplicateTransitionId(s))
    });

    if m.outputs.iter().any(|o| o == EPSILON) {
        out.push(Violation::ReservedName {
            what: "a declared output",
            name: EPSILON.to_string(),
        });
    }
    for v in &m.variables {
        if v.name == "p" {
            out.push(Violation::ReservedName {
                what: "a variable",
                name: "p".to_string(),
            });
        }
        if v.init.kind() != v.kind {
            out.push(Violation::VariableInitKind {
                variable: v.name.clone(),
                want: v.kind,
                got: v.init.kind(),
            });
        }
    }

    // Exactly one timeout rule per declared state.
    let mut seen_timeout = BTreeSet::new();
    for t in &m.timeouts {
        if !m.has_state(&t.state) {
            out.push(Violation::TimeoutForUnknownState(t.state.clone()));
        }
        if !seen_timeout.insert(t.state.clone()) {
            out.push(Violation::DuplicateTimeout(t.state.clone()));
        }
        if let TimeoutRule::Move { after, to } = &t.rule {
            if *after == 0 {
                out.push(Violation::ZeroTimeout(t.state.clone()));
            }
            if !m.has_state(to) {
                out.push(Violation::TimeoutToUnknownState {
                    state: t.state.clone(),
                    to: to.clone(),
                });
            }
        }
    }
    for s in &m.states {
        if !seen_timeout.contains(s) {
            out.push(Violation::MissingTimeout(s.clone()));
        }
    }

    let vars: BTreeMap<String, VarKind> =
        m.variables.iter().map(|v| (v.name.clone(), v.kind)).collect();

    for t in &m.transitions {
        for state in [&t.from, &t.to] {
            if !m.has_state(state) {
                out.push(Violation::UnknownTransitionState {
                    transition: t.id.clone(),
                    state: state.clone(),
                });
            }
        }
        let decl = m.input(&t.input);
        if decl.is_none() {
            out.push(Violation::UnknownTransitionInput {
                transition: t.id.clone(),
                input: t.input.clone(),
            });
        }
        if let Output::Symbol(o) = &t.output {
            if !m.has_output(o) {
                out.push(Violation::UnknownTransitionOutput {
                    transition: t.id.clone(),
                    output: o.clone(),
                });
            }
        }
        let ctx = ExprCtx {
            vars: &vars,
            param: decl.and_then(|d| d.param),
        };
        if let Some(g) = &t.guard {
            if let Err(error) = check_guard(g, &ctx) {
                out.push(Violation::Type {
                    transition: t.id.clone(),
                    place: "guard",
                    error,
                });
            }
        }
        if let Some(u) = &t.update {
            if let Err(error) = check_update(u, &ctx) {
                out.push(Violation::Type {
                    transition: t.id.clone(),
                    place: "update",
                    error,
                });
            }
        }
    }

    // Static overlap: within a (state, input) group, count transitions whose
    // guard cannot depend on the run (absent, or constant and true).
    let mut groups: BTreeMap<(String, String), Vec<&crate::machine::Transition>> = BTreeMap::new();
    for t in &m.transitions {
        groups
            .entry((t.from.clone(), t.input.clone()))
            .or_default()
            .push(t);
    }
    for ((state, input), ts) in groups {
        let always: Vec<String> = ts
            .iter()
            .filter(|t| match &t.guard {
                None => true,
                Some(g) => g.is_constant() && g.eval(&Env::new(), None).unwrap_or(false),
            })
            .map(|t| t.id.clone())
            .collect();
        if always.len() >= 2 {
            out.push(Violation::GuardOverlap {
                state,
                input,
                transitions: always,
            });
        }
    }

    ValidationReport { violations: out }
}

use crate::machine::Output;

fn dupes(items: impl Iterator<Item = String>, mut report: impl FnMut(String)) {
    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for item in items {
        if !seen.insert(item.clone()) && reported.insert(item.clone()) {
            report(item);
        }
    }
}
