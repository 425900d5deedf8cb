//! Mutant descriptors: small, serializable machine edits. A descriptor is
//! applied to a *base* machine and yields a full mutant machine; keeping the
//! edit rather than the edited machine makes mutant sets cheap to store,
//! diff, and send over the wire.

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tfsm_core::{
    validate_machine, Output, StateTimeout, TimedStateMachine, TimeoutRule, Transition,
    ValidationReport, EPSILON,
};

/// Which generator produced a mutant. Codes follow the attack taxonomy:
/// `A1` battery drain, `A2` sleep deprivation, `A3` data falsification,
/// `A4` replay, `A5` man-in-the-middle, `inc` increased timeout, and
/// `traditional` for the seeded structural mutants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackKind {
    #[serde(rename = "A1")]
    BatteryDrain,
    #[serde(rename = "A2")]
    SleepDeprivation,
    #[serde(rename = "A3")]
    DataFalsification,
    #[serde(rename = "A4")]
    Replay,
    #[serde(rename = "A5")]
    Mitm,
    #[serde(rename = "inc")]
    IncreasedTimeout,
    #[serde(rename = "traditional")]
    Traditional,
}

impl AttackKind {
    /// Every security-attack kind, in generation order. Excludes
    /// `Traditional`, which is driven by a count and a seed instead of an
    /// attack profile.
    pub const ATTACKS: [AttackKind; 6] = [
        AttackKind::BatteryDrain,
        AttackKind::SleepDeprivation,
        AttackKind::DataFalsification,
        AttackKind::Replay,
        AttackKind::Mitm,
        AttackKind::IncreasedTimeout,
    ];

    pub fn code(self) -> &'static str {
        match self {
            AttackKind::BatteryDrain => "A1",
            AttackKind::SleepDeprivation => "A2",
            AttackKind::DataFalsification => "A3",
            AttackKind::Replay => "A4",
            AttackKind::Mitm => "A5",
            AttackKind::IncreasedTimeout => "inc",
            AttackKind::Traditional => "traditional",
        }
    }

    pub fn from_code(code: &str) -> Option<AttackKind> {
        Some(match code {
            "A1" => AttackKind::BatteryDrain,
            "A2" => AttackKind::SleepDeprivation,
            "A3" => AttackKind::DataFalsification,
            "A4" => AttackKind::Replay,
            "A5" => AttackKind::Mitm,
            "inc" => AttackKind::IncreasedTimeout,
            "traditional" => AttackKind::Traditional,
            _ => return None,
        })
    }
}

impl std::fmt::Display for AttackKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// One machine edit. Outputs are named by their document spelling, so
/// silent answers are written `"eps"`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum MutantEdit {
    /// Replace the output of an existing transition.
    SetOutput { transition: String, output: String },
    /// Replace the duration of an existing timeout; its destination stays.
    SetTimeout { state: String, after_ms: u64 },
    /// Add an unguarded, update-free transition where the base machine
    /// has none for this (state, input) pair.
    AddTransition {
        from: String,
        input: String,
        output: String,
        to: String,
    },
    /// Add a fresh state that intercepts one transition: the transition
    /// named by `reroute` now ends in `state`, which after `timeout_ms`
    /// silently moves on to `back_to`.
    AddState {
        state: String,
        reroute: String,
        timeout_ms: u64,
        back_to: String,
    },
}

/// A mutant: an id, the generator that made it, and the edit itself.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutantDescriptor {
    pub id: String,
    pub kind: AttackKind,
    pub edit: MutantEdit,
}

/// A generated set of mutants against one base machine; serialized as a
/// `*.mut.json` document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MutantSet {
    pub schema: String,
    /// The id of the base machine the descriptors apply to.
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub mutants: Vec<MutantDescriptor>,
}

impl MutantSet {
    pub fn new(model: impl Into<String>) -> Self {
        MutantSet {
            schema: tfsm_model::SCHEMA.to_string(),
            model: model.into(),
            seed: None,
            warnings: Vec::new(),
            mutants: Vec::new(),
        }
    }

    pub fn descriptor(&self, id: &str) -> Option<&MutantDescriptor> {
        self.mutants.iter().find(|m| m.id == id)
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AttackError {
    #[error("unknown {what} {name:?}")]
    UnknownTarget { what: &'static str, name: String },
    #[error("edit {id:?} does not change the machine")]
    NoOp { id: String },
    #[error("conflicting edit: {detail}")]
    Conflict { detail: String },
    #[error("mutant {id:?} is not a valid machine: {report}")]
    InvalidResult { id: String, report: ValidationReport },
    #[error("traditional generator exhausted after {attempts} attempts: wanted {wanted} mutants, found {got}")]
    Exhausted {
        wanted: usize,
        got: usize,
        attempts: usize,
    },
}

fn parse_output(name: &str) -> Output {
    if name == EPSILON {
        Output::Epsilon
    } else {
        Output::Symbol(name.to_string())
    }
}

/// Build the mutant machine a descriptor denotes. The result is validated;
/// an edit that would leave the machine inconsistent is rejected rather
/// than returned.
pub fn apply_descriptor(
    base: &TimedStateMachine,
    d: &MutantDescriptor,
) -> Result<TimedStateMachine, AttackError> {
    let mut m = base.clone();
    match &d.edit {
        MutantEdit::SetOutput { transition, output } => {
            let new = parse_output(output);
            let t = m
                .transitions
                .iter_mut()
                .find(|t| &t.id == transition)
                .ok_or_else(|| AttackError::UnknownTarget {
                    what: "transition",
                    name: transition.clone(),
                })?;
            if t.output == new {
                return Err(AttackError::NoOp { id: d.id.clone() });
            }
            t.output = new;
        }
        MutantEdit::SetTimeout { state, after_ms } => {
            let t = m
                .timeouts
                .iter_mut()
                .find(|t| &t.state == state)
                .ok_or_else(|| AttackError::UnknownTarget {
                    what: "state",
                    name: state.clone(),
                })?;
            match &mut t.rule {
                TimeoutRule::Never => {
                    return Err(AttackError::Conflict {
                        detail: format!("state {state} never times out; nothing to retime"),
                    })
                }
                TimeoutRule::Move { after, .. } => {
                    if after == after_ms {
                        return Err(AttackError::NoOp { id: d.id.clone() });
                    }
                    *after = *after_ms;
                }
            }
        }
        MutantEdit::AddTransition {
            from,
            input,
            output,
            to,
        } => {
            if m.transitions_from(from, input).next().is_some() {
                return Err(AttackError::Conflict {
                    detail: format!("{from} already reacts to {input}"),
                });
            }
            m.transitions.push(Transition {
                id: d.id.clone(),
                from: from.clone(),
                input: input.clone(),
                guard: None,
                update: None,
                output: parse_output(output),
                to: to.clone(),
            });
        }
        MutantEdit::AddState {
            state,
            reroute,
            timeout_ms,
            back_to,
        } => {
            if m.has_state(state) {
                return Err(AttackError::Conflict {
                    detail: format!("state {state} already exists"),
                });
            }
            let t = m
                .transitions
                .iter_mut()
                .find(|t| &t.id == reroute)
                .ok_or_else(|| AttackError::UnknownTarget {
                    what: "transition",
                    name: reroute.clone(),
                })?;
            t.to = state.clone();
            m.states.push(state.clone());
            m.timeouts.push(StateTimeout {
                state: state.clone(),
                rule: TimeoutRule::Move {
                    after: *timeout_ms,
                    to: back_to.clone(),
                },
            });
        }
    }
    let report = validate_machine(&m);
    if !report.is_ok() {
        return Err(AttackError::InvalidResult {
            id: d.id.clone(),
            report,
        });
    }
    Ok(m)
}
