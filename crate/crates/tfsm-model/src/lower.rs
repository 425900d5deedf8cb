//! Lowering between `tfsm/1` documents and core machines, plus the canonical
//! JSON form every tool in the workspace writes.
//!
//! Failures are layered so a caller can tell how far a document got:
//!
//! * [`FormatError::Syntax`] — the text is not JSON;
//! * [`FormatError::Schema`] — the JSON has the wrong shape or a field that
//!   cannot be interpreted: unknown kinds, malformed or ill-typed guards and
//!   updates, a bad schema tag;
//! * [`FormatError::Semantic`] — the document lowers to a machine that fails
//!   structural validation (dangling states, missing timeouts, overlaps, …).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use tfsm_core::expr::{check_guard, check_update, ExprCtx};
use tfsm_core::{
    parse_guard, parse_update, validate_machine, InputSymbol, Output, StateTimeout, TestCase,
    TestStep, TimedInput, TimedStateMachine, TimeoutRule, Transition, ValidationReport, Value,
    VarDecl, VarKind, EPSILON,
};

use crate::doc::{
    AttackProfile, InputDoc, ModelDoc, StepDoc, SuiteDoc, TestDoc, TimeoutDoc, TransitionDoc,
    VariableDoc, VerdictsDoc, SCHEMA,
};

/// Why a document failed to load.
#[derive(Debug)]
pub enum FormatError {
    /// Not valid JSON. Line and column are 1-based.
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// Valid JSON that cannot be interpreted. `at` names the offending
    /// element, `transitions[t23].guard` style.
    Schema { at: String, message: String },
    /// The lowered machine fails structural validation.
    Semantic(ValidationReport),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Syntax {
                line,
                column,
                message,
            } => write!(f, "syntax error at line {line}, column {column}: {message}"),
            FormatError::Schema { at, message } => write!(f, "schema error at {at}: {message}"),
            FormatError::Semantic(report) => write!(f, "semantic error: {report}"),
        }
    }
}

impl std::error::Error for FormatError {}

fn schema_err(at: impl Into<String>, message: impl fmt::Display) -> FormatError {
    FormatError::Schema {
        at: at.into(),
        message: message.to_string(),
    }
}

/// Markers for model elements whose definitions were inferred from observed
/// device behavior rather than read off firmware sources. They carry no
/// semantics; they only survive round-trips so the provenance of a bundled
/// model stays visible in its document.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReconstructedFlags {
    /// States whose timeout rule is inferred.
    pub timeouts: BTreeSet<String>,
    /// Transition ids that are inferred.
    pub transitions: BTreeSet<String>,
}

/// A fully lowered model document: the machine itself, the optional attack
/// profile, and the `reconstructed` markers.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedModel {
    pub machine: TimedStateMachine,
    pub profile: Option<AttackProfile>,
    pub reconstructed: ReconstructedFlags,
}

/// A lowered suite document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suite {
    pub suite_id: String,
    /// The machine id the expected outputs were drawn from.
    pub model: String,
    pub tests: Vec<TestCase>,
}

fn kind_from_str(s: &str, at: &str) -> Result<VarKind, FormatError> {
    match s {
        "int" => Ok(VarKind::Int),
        "string" => Ok(VarKind::Str),
        other => Err(schema_err(
            at,
            format!("unknown kind {other:?} (expected \"int\" or \"string\")"),
        )),
    }
}

fn kind_to_str(k: VarKind) -> &'static str {
    match k {
        VarKind::Int => "int",
        VarKind::Str => "string",
    }
}

fn value_from_json(v: &serde_json::Value, at: &str) -> Result<Value, FormatError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(Value::Int)
            .ok_or_else(|| schema_err(at, "expected a 64-bit integer")),
        serde_json::Value::String(s) => Ok(Value::Str(s.clone())),
        other => Err(schema_err(
            at,
            format!("expected an integer or a string, got {other}"),
        )),
    }
}

fn value_to_json(v: &Value) -> serde_json::Value {
    match v {
        Value::Int(i) => (*i).into(),
        Value::Str(s) => s.clone().into(),
    }
}

fn output_from_str(s: &str) -> Output {
    if s == EPSILON {
        Output::Epsilon
    } else {
        Output::Symbol(s.to_string())
    }
}

fn check_schema_tag(found: &str) -> Result<(), FormatError> {
    if found == SCHEMA {
        Ok(())
    } else {
        Err(schema_err(
            "schema",
            format!("unsupported schema {found:?} (this build reads {SCHEMA:?})"),
        ))
    }
}

fn parse_doc<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => FormatError::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => FormatError::Schema {
                at: format!("line {}, column {}", e.line(), e.column()),
                message: e.to_string(),
            },
        }
    })
}

/// Lower a model document to a machine, checking expressions and structure.
pub fn from_doc(doc: &ModelDoc) -> Result<ParsedModel, FormatError> {
    check_schema_tag(&doc.schema)?;

    let mut inputs = Vec::with_capacity(doc.inputs.len());
    for i in &doc.inputs {
        let param = match &i.param {
            None => None,
            Some(k) => Some(kind_from_str(k, &format!("inputs[{}].param", i.name))?),
        };
        inputs.push(InputSymbol {
            name: i.name.clone(),
            param,
        });
    }

    let mut variables = Vec::with_capacity(doc.variables.len());
    for v in &doc.variables {
        let kind = kind_from_str(&v.kind, &format!("variables[{}].kind", v.name))?;
        let init = value_from_json(&v.init, &format!("variables[{}].init", v.name))?;
        variables.push(VarDecl {
            name: v.name.clone(),
            kind,
            init,
        });
    }

    let mut reconstructed = ReconstructedFlags::default();

    let mut timeouts = Vec::with_capacity(doc.timeouts.len());
    for t in &doc.timeouts {
        let at = format!("timeouts[{}]", t.state);
        let rule = match (t.after_ms, &t.to) {
            (None, None) => TimeoutRule::Never,
            (Some(after), Some(to)) => TimeoutRule::Move {
                after,
                to: to.clone(),
            },
            (Some(_), None) => return Err(schema_err(at, "after_ms given without to")),
            (None, Some(_)) => return Err(schema_err(at, "to given without after_ms")),
        };
        if t.reconstructed {
            reconstructed.timeouts.insert(t.state.clone());
        }
        timeouts.push(StateTimeout {
            state: t.state.clone(),
            rule,
        });
    }

    let mut transitions = Vec::with_capacity(doc.transitions.len());
    for t in &doc.transitions {
        let guard = match &t.guard {
            None => None,
            Some(src) => Some(
                parse_guard(src)
                    .map_err(|e| schema_err(format!("transitions[{}].guard", t.id), e))?,
            ),
        };
        let update = match &t.updates {
            None => None,
            Some(src) => Some(
                parse_update(src)
                    .map_err(|e| schema_err(format!("transitions[{}].updates", t.id), e))?,
            ),
        };
        if t.reconstructed {
            reconstructed.transitions.insert(t.id.clone());
        }
        transitions.push(Transition {
            id: t.id.clone(),
            from: t.from.clone(),
            input: t.input.clone(),
            guard,
            update,
            output: output_from_str(&t.output),
            to: t.to.clone(),
        });
    }

    let machine = TimedStateMachine {
        id: doc.id.clone(),
        states: doc.states.clone(),
        initial: doc.initial.clone(),
        inputs,
        outputs: doc.outputs.clone(),
        variables,
        timeouts,
        transitions,
    };

    // Ill-typed guard and update text is a schema problem with the field
    // itself, so it is reported before structural validation. Transitions on
    // undeclared inputs are skipped here; validation names them properly.
    let vars: BTreeMap<String, VarKind> = machine
        .variables
        .iter()
        .map(|v| (v.name.clone(), v.kind))
        .collect();
    for t in &machine.transitions {
        let Some(sym) = machine.input(&t.input) else {
            continue;
        };
        let ctx = ExprCtx {
            vars: &vars,
            param: sym.param,
        };
        if let Some(g) = &t.guard {
            check_guard(g, &ctx)
                .map_err(|e| schema_err(format!("transitions[{}].guard", t.id), e))?;
        }
        if let Some(u) = &t.update {
            check_update(u, &ctx)
                .map_err(|e| schema_err(format!("transitions[{}].updates", t.id), e))?;
        }
    }

    let report = validate_machine(&machine);
    if !report.is_ok() {
        return Err(FormatError::Semantic(report));
    }

    Ok(ParsedModel {
        machine,
        profile: doc.attack_profile.clone(),
        reconstructed,
    })
}

/// Raise a machine back to its document form.
pub fn to_doc(
    m: &TimedStateMachine,
    profile: Option<&AttackProfile>,
    reconstructed: &ReconstructedFlags,
) -> ModelDoc {
    ModelDoc {
        schema: SCHEMA.to_string(),
        id: m.id.clone(),
        initial: m.initial.clone(),
        states: m.states.clone(),
        inputs: m
            .inputs
            .iter()
            .map(|i| InputDoc {
                name: i.name.clone(),
                param: i.param.map(|k| kind_to_str(k).to_string()),
            })
            .collect(),
        outputs: m.outputs.clone(),
        variables: m
            .variables
            .iter()
            .map(|v| VariableDoc {
                name: v.name.clone(),
                kind: kind_to_str(v.kind).to_string(),
                init: value_to_json(&v.init),
            })
            .collect(),
        timeouts: m
            .timeouts
            .iter()
            .map(|t| {
                let (after_ms, to) = match &t.rule {
                    TimeoutRule::Never => (None, None),
                    TimeoutRule::Move { after, to } => (Some(*after), Some(to.clone())),
                };
                TimeoutDoc {
                    state: t.state.clone(),
                    after_ms,
                    to,
                    reconstructed: reconstructed.timeouts.contains(&t.state),
                }
            })
            .collect(),
        transitions: m
            .transitions
            .iter()
            .map(|t| TransitionDoc {
                id: t.id.clone(),
                from: t.from.clone(),
                input: t.input.clone(),
                guard: t.guard.as_ref().map(|g| g.to_string()),
                updates: t.update.as_ref().map(|u| u.to_string()),
                output: t.output.to_string(),
                to: t.to.clone(),
                reconstructed: reconstructed.transitions.contains(&t.id),
            })
            .collect(),
        attack_profile: profile.cloned(),
    }
}

/// Parse model text into a validated machine.
pub fn parse_model(text: &str) -> Result<ParsedModel, FormatError> {
    let doc: ModelDoc = parse_doc(text)?;
    from_doc(&doc)
}

/// Serialize a parsed model to canonical JSON.
pub fn serialize_model(pm: &ParsedModel) -> String {
    canonical_json(&to_doc(&pm.machine, pm.profile.as_ref(), &pm.reconstructed))
}

/// Canonical JSON: object keys sorted, two-space indentation, a trailing
/// newline. Canonical documents diff cleanly — an edit that touches one
/// element shows up as a one-line change.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("documents serialize infallibly");
    let mut s = serde_json::to_string_pretty(&v).expect("documents serialize infallibly");
    s.push('\n');
    s
}

/// Raise test cases to a suite document.
pub fn suite_to_doc(suite_id: &str, model: &str, tests: &[TestCase]) -> SuiteDoc {
    SuiteDoc {
        schema: SCHEMA.to_string(),
        suite_id: suite_id.to_string(),
        model: model.to_string(),
        tests: tests
            .iter()
            .map(|t| TestDoc {
                id: t.id.clone(),
                steps: t
                    .steps
                    .iter()
                    .map(|s| StepDoc {
                        input: s.input.symbol.clone(),
                        param: s.input.param.as_ref().map(value_to_json),
                        at_ms: s.input.at,
                        expect: s.expect.to_string(),
                    })
                    .collect(),
            })
            .collect(),
    }
}

/// Lower a suite document, checking timestamps are strictly increasing.
pub fn suite_from_doc(doc: &SuiteDoc) -> Result<Suite, FormatError> {
    check_schema_tag(&doc.schema)?;
    let mut tests = Vec::with_capacity(doc.tests.len());
    for t in &doc.tests {
        let mut steps = Vec::with_capacity(t.steps.len());
        for (ix, s) in t.steps.iter().enumerate() {
            let param = match &s.param {
                None => None,
                Some(p) => Some(value_from_json(
                    p,
                    &format!("tests[{}].steps[{ix}].param", t.id),
                )?),
            };
            steps.push(TestStep {
                input: TimedInput {
                    symbol: s.input.clone(),
                    param,
                    at: s.at_ms,
                },
                expect: output_from_str(&s.expect),
            });
        }
        let test = TestCase::new(t.id.clone(), steps);
        test.check()
            .map_err(|e| schema_err(format!("tests[{}]", t.id), e))?;
        tests.push(test);
    }
    Ok(Suite {
        suite_id: doc.suite_id.clone(),
        model: doc.model.clone(),
        tests,
    })
}

/// Parse suite text.
pub fn parse_suite(text: &str) -> Result<Suite, FormatError> {
    let doc: SuiteDoc = parse_doc(text)?;
    suite_from_doc(&doc)
}

/// Serialize a suite to canonical JSON.
pub fn serialize_suite(suite: &Suite) -> String {
    canonical_json(&suite_to_doc(&suite.suite_id, &suite.model, &suite.tests))
}

/// Parse a verdicts document (rows stay in document form).
pub fn parse_verdicts(text: &str) -> Result<VerdictsDoc, FormatError> {
    let doc: VerdictsDoc = parse_doc(text)?;
    check_schema_tag(&doc.schema)?;
    Ok(doc)
}

/// Serialize a verdicts document to canonical JSON.
pub fn serialize_verdicts(doc: &VerdictsDoc) -> String {
    canonical_json(doc)
}
