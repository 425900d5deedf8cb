//! Timed finite state machines with typed variables, built for modeling
//! resource-constrained edge devices: a finite control structure, a single
//! implicit clock, one timeout rule per state, and int/string variables
//! guarding and updated by parameterized inputs.
//!
//! Everything runs on integer virtual milliseconds. Given the same machine
//! and the same timed input sequence, a run is bit-for-bit reproducible;
//! there is no wall-clock dependence anywhere in the semantics.

pub mod exec;
pub mod expr;
pub mod machine;
pub mod testcase;
pub mod time;
pub mod validate;

pub use exec::{Configuration, StepError, TimedInput, TimedTrace, TimeoutFiring, TraceEvent};
pub use expr::{
    parse_guard, parse_update, CmpOp, Comparison, Env, EvalError, Expr, Guard, ParseError,
    TypeError, Update, Value, VarKind,
};
pub use machine::{
    InputSymbol, Output, StateTimeout, TimedStateMachine, Transition, VarDecl, EPSILON,
};
pub use testcase::{TestCase, TestCaseError, TestStep};
pub use time::{Millis, TimeoutRule};
pub use validate::{validate_machine, ValidationReport, Violation};
