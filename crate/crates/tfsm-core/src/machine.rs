//! Machine structure: states, alphabets, variables, timeouts, transitions.

use std::fmt;

use crate::expr::{Guard, Update, Value, VarKind};
use crate::time::TimeoutRule;

/// The reserved spelling of the empty output in documents and on the wire.
/// No declared output may use it.
pub const EPSILON: &str = "eps";

/// An input symbol, optionally parameterized. `buttonPress` carries nothing;
/// `data_byte` carries a string; `echoPin` carries an int.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InputSymbol {
    pub name: String,
    pub param: Option<VarKind>,
}

/// A declared variable with its initial value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub init: Value,
}

/// What a step produces: either a declared output symbol or nothing
/// observable. Ignored inputs and timeout firings both present as `Epsilon`
/// at the external interface.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Output {
    Epsilon,
    Symbol(String),
}

impl Output {
    pub fn symbol(name: impl Into<String>) -> Self {
        Output::Symbol(name.into())
    }
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Output::Epsilon => write!(f, "{EPSILON}"),
            Output::Symbol(s) => write!(f, "{s}"),
        }
    }
}

/// One guarded transition. `guard: None` means always enabled; `update: None`
/// means the variables are untouched. Executing any transition resets the
/// state-local clock.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    pub from: String,
    pub input: String,
    pub guard: Option<Guard>,
    pub update: Option<Update>,
    pub output: Output,
    pub to: String,
}

/// The timeout rule attached to one state. Every state owns exactly one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateTimeout {
    pub state: String,
    pub rule: TimeoutRule,
}

/// A timed state machine with typed variables. Plain timed machines are the
/// special case with an empty `variables` list and no guards or updates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedStateMachine {
    pub id: String,
    pub states: Vec<String>,
    pub initial: String,
    pub inputs: Vec<InputSymbol>,
    pub outputs: Vec<String>,
    pub variables: Vec<VarDecl>,
    pub timeouts: Vec<StateTimeout>,
    pub transitions: Vec<Transition>,
}

impl TimedStateMachine {
    pub fn input(&self, name: &str) -> Option<&InputSymbol> {
        self.inputs.iter().find(|i| i.name == name)
    }

    pub fn timeout(&self, state: &str) -> Option<&StateTimeout> {
        self.timeouts.iter().find(|t| t.state == state)
    }

    pub fn transition(&self, id: &str) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.id == id)
    }

    pub fn has_state(&self, name: &str) -> bool {
        self.states.iter().any(|s| s == name)
    }

    pub fn has_output(&self, name: &str) -> bool {
        self.outputs.iter().any(|o| o == name)
    }

    pub fn transitions_from<'a>(
        &'a self,
        state: &'a str,
        input: &'a str,
    ) -> impl Iterator<Item = &'a Transition> + 'a {
        self.transitions
            .iter()
            .filter(move |t| t.from == state && t.input == input)
    }
}
