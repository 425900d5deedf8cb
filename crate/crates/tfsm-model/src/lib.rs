//! JSON documents for the timed-machine toolkit: machine definitions, test
//! suites, and execution verdicts, all under the `tfsm/1` schema, plus the
//! three bundled device models (a motion sensor, an ultrasonic ranger, and
//! an RFID reader).
//!
//! Every writer in the workspace emits *canonical* JSON — sorted keys,
//! two-space indent, trailing newline — so documents can be compared and
//! diffed byte-for-byte.

pub mod bundled;
pub mod doc;
pub mod lower;

pub use bundled::{bundled_source, load_bundled, BUNDLED_MODELS};
pub use doc::{
    AttackProfile, InputDoc, ModelDoc, StepDoc, SuiteDoc, TestDoc, TimeoutDoc, TransitionDoc,
    VariableDoc, VerdictRowDoc, VerdictsDoc, SCHEMA,
};
pub use lower::{
    canonical_json, from_doc, parse_model, parse_suite, parse_verdicts, serialize_model,
    serialize_suite, serialize_verdicts, suite_from_doc, suite_to_doc, to_doc, FormatError,
    ParsedModel, ReconstructedFlags, Suite,
};
