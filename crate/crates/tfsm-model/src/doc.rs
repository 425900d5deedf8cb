//! The JSON document shapes. Schema `tfsm/1` covers four document kinds:
//!
//! * `*.tfsm.json` — a machine definition, optionally annotated with an
//!   attack profile and per-element `reconstructed` flags;
//! * `*.mut.json` — a set of mutant descriptors against one machine;
//! * `*.suite.json` — a test suite (timed inputs with expected outputs);
//! * `*.verdicts.json` — per-(test, target) execution results.
//!
//! Unknown fields are rejected everywhere: a typo in a hand-edited model
//! should fail loudly, not silently change behavior.

use serde::{Deserialize, Serialize};

pub const SCHEMA: &str = "tfsm/1";

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub schema: String,
    pub id: String,
    pub initial: String,
    pub states: Vec<String>,
    pub inputs: Vec<InputDoc>,
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<VariableDoc>,
    pub timeouts: Vec<TimeoutDoc>,
    pub transitions: Vec<TransitionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack_profile: Option<AttackProfile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InputDoc {
    pub name: String,
    /// "int" or "string"; absent for plain symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VariableDoc {
    pub name: String,
    pub kind: String,
    pub init: serde_json::Value,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeoutDoc {
    pub state: String,
    /// Absent means the state never times out; then `to` must be absent too.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub reconstructed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub id: String,
    pub from: String,
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub updates: Option<String>,
    /// A declared output name, or the reserved "eps" for a silent transition.
    pub output: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "is_false")]
    pub reconstructed: bool,
}

/// Where the attack generators aim. Bundled models carry this; user models
/// may add it to opt into the same generators.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AttackProfile {
    /// States whose dwell timeout an attacker would shrink (battery drain)
    /// or stretch (increased timeout).
    pub drain_states: Vec<String>,
    /// The sleep state targeted by sleep deprivation.
    pub sleep_state: String,
    /// Transitions whose replies get falsified.
    pub falsify_transitions: Vec<String>,
    /// The connection transition whose input/output a replay attack mimics.
    pub replay_transition: String,
    /// Transitions a man-in-the-middle intercepts with a new state.
    pub mitm_transitions: Vec<String>,
    /// Externally claimed mutant counts for this device. When they disagree
    /// with what the listed targets enumerate, generators surface the
    /// difference as a warning instead of failing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_timeout_mutants: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_attack_total: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SuiteDoc {
    pub schema: String,
    pub suite_id: String,
    /// The machine id the expected outputs were drawn from.
    pub model: String,
    pub tests: Vec<TestDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TestDoc {
    pub id: String,
    pub steps: Vec<StepDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub input: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<serde_json::Value>,
    pub at_ms: u64,
    /// Expected output name, or "eps".
    pub expect: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerdictsDoc {
    pub schema: String,
    pub suite_id: String,
    pub rows: Vec<VerdictRowDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct VerdictRowDoc {
    pub test: String,
    /// What was executed: a machine id, a mutant id, or an endpoint label.
    pub target: String,
    /// "pass", "kill", or "transport_error".
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_index: Option<usize>,
    /// One entry per executed step ("eps" for silent answers).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observed: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}
