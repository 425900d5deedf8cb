//! Document format pins: the bundled models are canonical and structurally
//! exactly what the rest of the workspace assumes, and the error taxonomy
//! distinguishes syntax, schema, and semantic failures.

use tfsm_core::{Output, TimedInput, TimeoutRule, Value, Violation};
use tfsm_model::{
    bundled_source, canonical_json, load_bundled, parse_model, parse_suite, parse_verdicts,
    serialize_model, serialize_suite, FormatError, Suite, VerdictRowDoc,
    VerdictsDoc, BUNDLED_MODELS, SCHEMA,
};

fn transition_ids(name: &str) -> Vec<String> {
    load_bundled(name)
        .unwrap()
        .machine
        .transitions
        .iter()
        .map(|t| t.id.clone())
        .collect()
}

#[test]
fn bundled_models_parse_and_roundtrip_byte_identically() {
    for name in BUNDLED_MODELS {
        let src = bundled_source(name).unwrap();
        let pm = parse_model(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(pm.machine.id, name);
        let out = serialize_model(&pm);
        assert_eq!(out, src, "{name} is not stored in canonical form");
    }
}

#[test]
fn bundled_motion_sensor_shape() {
    let pm = load_bundled("motion_sensor").unwrap();
    let m = &pm.machine;
    assert_eq!(m.states.len(), 11);
    assert_eq!(m.initial, "S1");
    assert_eq!(m.inputs.len(), 11);
    assert!(m.inputs.iter().all(|i| i.param.is_none()));
    assert_eq!(m.outputs.len(), 10);
    assert!(m.variables.is_empty());
    assert_eq!(
        transition_ids("motion_sensor"),
        ["t4", "t5", "t7", "t8", "t11", "t12", "t13", "t14", "t15", "t16", "t17", "t18", "t22"]
    );
    for t in &m.timeouts {
        assert_eq!(t.rule.after(), Some(2000), "state {}", t.state);
    }
    let profile = pm.profile.as_ref().unwrap();
    assert_eq!(profile.drain_states, ["S5", "S7", "S8", "S9", "S10"]);
    assert_eq!(profile.sleep_state, "S10");
    assert_eq!(
        profile.falsify_transitions,
        ["t7", "t8", "t12", "t14", "t15", "t17", "t22"]
    );
    assert_eq!(profile.replay_transition, "t8");
    assert_eq!(profile.mitm_transitions, ["t22", "t14", "t15", "t16"]);
    assert_eq!(profile.claimed_timeout_mutants, Some(5));
    assert_eq!(profile.claimed_attack_total, Some(29));

    // The handshake and the silent-ignore of unknown inputs, end to end from
    // the document: S1 -2000ms-> S2, i1/o1 -> S3, i2/o2 -> S4, i4/o4 -> S5.
    let trace = m
        .run(&[
            TimedInput::plain("i1", 2100),
            TimedInput::plain("i2", 2200),
            TimedInput::plain("i4", 2300),
            TimedInput::plain("i5", 2400), // no i5 transition at S5's predecessors
        ])
        .unwrap();
    assert_eq!(
        trace.outputs(),
        [
            Output::symbol("o1"),
            Output::symbol("o2"),
            Output::symbol("o4"),
            Output::symbol("o5"),
        ]
    );
    assert_eq!(trace.end.state, "S5");
}

#[test]
fn bundled_ultrasonic_shape_and_distance_update() {
    let pm = load_bundled("ultrasonic").unwrap();
    let m = &pm.machine;
    assert_eq!(m.states.len(), 12);
    assert_eq!(m.inputs.len(), 12);
    assert_eq!(
        m.input("echoPin").unwrap().param,
        Some(tfsm_core::VarKind::Int)
    );
    assert_eq!(m.variables.len(), 1);
    let t21 = m.transition("t21").unwrap();
    assert_eq!(t21.update.as_ref().unwrap().to_string(), "distance := p * 34 / 2000");

    let profile = pm.profile.as_ref().unwrap();
    assert_eq!(profile.drain_states.len(), 7);
    assert_eq!(profile.claimed_timeout_mutants, Some(7));
    assert_eq!(profile.claimed_attack_total, Some(35));
    assert_eq!(
        profile.falsify_transitions,
        ["t7", "t8", "t12", "t14", "t15", "t17", "t21", "t22"]
    );

    // Echo of 1000us -> distance = 1000 * 34 / 2000 = 17 (integer division).
    let trace = m
        .run(&[
            TimedInput::plain("i1", 2100),
            TimedInput::plain("i2", 2200),
            TimedInput::plain("i4", 2300),
            // S5 times out to S10 at 4300.
            TimedInput::with_param("echoPin", Value::Int(1000), 4500),
        ])
        .unwrap();
    assert_eq!(trace.outputs().last(), Some(&Output::symbol("o10")));
    assert_eq!(trace.end.state, "S11");
    assert_eq!(trace.end.env.get("distance"), Some(&Value::Int(17)));
}

#[test]
fn bundled_rfid_shape_and_code_assembly() {
    let pm = load_bundled("rfid").unwrap();
    let m = &pm.machine;
    assert_eq!(m.states.len(), 11);
    assert_eq!(
        m.input("data_byte").unwrap().param,
        Some(tfsm_core::VarKind::Str)
    );
    assert_eq!(m.variables.len(), 2);
    assert_eq!(
        transition_ids("rfid"),
        [
            "t4", "t5", "t7", "t8", "t9", "t10", "t13", "t14", "t15", "t16", "t17", "t18",
            "t22", "t23", "t24", "t25", "t26",
        ]
    );
    let t23 = m.transition("t23").unwrap();
    assert_eq!(t23.guard.as_ref().unwrap().to_string(), "counter < 10");
    assert_eq!(
        t23.update.as_ref().unwrap().to_string(),
        "counter := counter + 1; code := code + p"
    );

    let profile = pm.profile.as_ref().unwrap();
    assert_eq!(profile.falsify_transitions.len(), 11);
    // The externally claimed count disagrees with the five listed drain
    // states; generators must warn rather than invent targets.
    assert_eq!(profile.drain_states.len(), 5);
    assert_eq!(profile.claimed_timeout_mutants, Some(8));

    // Reader loop: reach S11, feed two bytes, close out with i11.
    let trace = m
        .run(&[
            TimedInput::plain("i1", 2100),
            TimedInput::plain("i2", 2200),
            TimedInput::plain("i4", 2300),
            // S5 -> S10 at 4300.
            TimedInput::plain("i11", 4400), // o10, enter S11
            TimedInput::with_param("data_byte", Value::Str("B".into()), 4500),
            TimedInput::with_param("data_byte", Value::Str("A".into()), 4600),
            TimedInput::plain("i11", 4700), // o11, counter/code reset, back to S10
        ])
        .unwrap();
    assert_eq!(
        trace.outputs(),
        [
            Output::symbol("o1"),
            Output::symbol("o2"),
            Output::symbol("o4"),
            Output::symbol("o10"),
            Output::symbol("o13"),
            Output::symbol("o13"),
            Output::symbol("o11"),
        ]
    );
    assert_eq!(trace.end.state, "S10");
    assert_eq!(trace.end.env.get("counter"), Some(&Value::Int(0)));
    assert_eq!(trace.end.env.get("code"), Some(&Value::Str(String::new())));
}

#[test]
fn reconstructed_flags_survive_roundtrip() {
    let pm = load_bundled("motion_sensor").unwrap();
    // Verbatim elements stay unflagged; inferred ones are marked.
    assert!(!pm.reconstructed.timeouts.contains("S1"));
    assert!(!pm.reconstructed.timeouts.contains("S2"));
    assert!(pm.reconstructed.timeouts.contains("S5"));
    for id in ["t4", "t8", "t11", "t22"] {
        assert!(!pm.reconstructed.transitions.contains(id), "{id}");
    }
    assert!(pm.reconstructed.transitions.contains("t5"));

    let again = parse_model(&serialize_model(&pm)).unwrap();
    assert_eq!(again.reconstructed, pm.reconstructed);
    assert_eq!(again.machine, pm.machine);
    assert_eq!(again.profile, pm.profile);
}

#[test]
fn canonical_edit_is_a_one_line_diff() {
    let src = bundled_source("motion_sensor").unwrap();
    let mut pm = parse_model(src).unwrap();
    for t in &mut pm.machine.timeouts {
        if t.state == "S5" {
            t.rule = TimeoutRule::Move {
                after: 1000,
                to: "S10".into(),
            };
        }
    }
    let edited = serialize_model(&pm);
    assert_eq!(src.lines().count(), edited.lines().count());
    let differing = src
        .lines()
        .zip(edited.lines())
        .filter(|(a, b)| a != b)
        .count();
    assert_eq!(differing, 1);
}

#[test]
fn minimal_document_with_never_timeout() {
    let text = r#"{
        "schema": "tfsm/1",
        "id": "m",
        "initial": "A",
        "states": ["A"],
        "inputs": [],
        "outputs": [],
        "timeouts": [{"state": "A"}],
        "transitions": []
    }"#;
    let pm = parse_model(text).unwrap();
    assert_eq!(pm.machine.timeout("A").unwrap().rule, TimeoutRule::Never);
    assert!(pm.profile.is_none());
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let err = parse_model("{\n  \"schema\": \"tfsm/1\",\n") .unwrap_err();
    match err {
        FormatError::Syntax { line, .. } => assert_eq!(line, 3),
        other => panic!("expected syntax error, got {other}"),
    }
}

#[test]
fn unknown_fields_are_schema_errors() {
    let mut doc: serde_json::Value =
        serde_json::from_str(bundled_source("motion_sensor").unwrap()).unwrap();
    doc.as_object_mut()
        .unwrap()
        .insert("color".into(), serde_json::Value::from("red"));
    let err = parse_model(&doc.to_string()).unwrap_err();
    match err {
        FormatError::Schema { message, .. } => assert!(message.contains("color"), "{message}"),
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn wrong_schema_tag_is_rejected() {
    let mut doc: serde_json::Value =
        serde_json::from_str(bundled_source("motion_sensor").unwrap()).unwrap();
    doc["schema"] = "tfsm/2".into();
    let err = parse_model(&doc.to_string()).unwrap_err();
    match err {
        FormatError::Schema { at, .. } => assert_eq!(at, "schema"),
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn ill_typed_guard_is_a_schema_error() {
    // Ordering comparisons are undefined on strings.
    let mut doc: serde_json::Value =
        serde_json::from_str(bundled_source("rfid").unwrap()).unwrap();
    let t23 = doc["transitions"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|t| t["id"] == "t23")
        .unwrap();
    t23["guard"] = "code < \"zzz\"".into();
    let err = parse_model(&doc.to_string()).unwrap_err();
    match err {
        FormatError::Schema { at, .. } => assert_eq!(at, "transitions[t23].guard"),
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn malformed_update_reports_byte_offset() {
    let mut doc: serde_json::Value =
        serde_json::from_str(bundled_source("rfid").unwrap()).unwrap();
    let t23 = doc["transitions"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|t| t["id"] == "t23")
        .unwrap();
    t23["updates"] = "counter := ".into();
    let err = parse_model(&doc.to_string()).unwrap_err();
    match err {
        FormatError::Schema { at, message } => {
            assert_eq!(at, "transitions[t23].updates");
            assert!(message.contains("byte"), "{message}");
        }
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn timeout_halves_must_come_together() {
    let text = r#"{
        "schema": "tfsm/1", "id": "m", "initial": "A", "states": ["A"],
        "inputs": [], "outputs": [],
        "timeouts": [{"state": "A", "after_ms": 500}],
        "transitions": []
    }"#;
    let err = parse_model(text).unwrap_err();
    match err {
        FormatError::Schema { at, message } => {
            assert_eq!(at, "timeouts[A]");
            assert!(message.contains("without to"), "{message}");
        }
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn fractional_init_is_a_schema_error() {
    let text = r#"{
        "schema": "tfsm/1", "id": "m", "initial": "A", "states": ["A"],
        "inputs": [], "outputs": [],
        "variables": [{"name": "x", "kind": "int", "init": 3.5}],
        "timeouts": [{"state": "A"}],
        "transitions": []
    }"#;
    let err = parse_model(text).unwrap_err();
    match err {
        FormatError::Schema { at, .. } => assert_eq!(at, "variables[x].init"),
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn structural_problems_are_semantic_errors() {
    let text = r#"{
        "schema": "tfsm/1", "id": "m", "initial": "Z", "states": ["A"],
        "inputs": [], "outputs": [],
        "timeouts": [{"state": "A"}],
        "transitions": []
    }"#;
    let err = parse_model(text).unwrap_err();
    match err {
        FormatError::Semantic(report) => {
            assert!(report
                .violations
                .iter()
                .any(|v| matches!(v, Violation::UnknownInitial { .. })));
        }
        other => panic!("expected semantic error, got {other}"),
    }
}

#[test]
fn reserved_epsilon_output_is_semantic() {
    let text = r#"{
        "schema": "tfsm/1", "id": "m", "initial": "A", "states": ["A"],
        "inputs": [], "outputs": ["eps"],
        "timeouts": [{"state": "A"}],
        "transitions": []
    }"#;
    match parse_model(text).unwrap_err() {
        FormatError::Semantic(report) => {
            assert!(report
                .violations
                .iter()
                .any(|v| matches!(v, Violation::ReservedName { .. })));
        }
        other => panic!("expected semantic error, got {other}"),
    }
}

#[test]
fn suite_documents_roundtrip() {
    let m = load_bundled("rfid").unwrap().machine;
    let trace = m
        .run(&[
            TimedInput::plain("i1", 2100),
            TimedInput::plain("i2", 2200),
            TimedInput::plain("i4", 2300),
            TimedInput::plain("i11", 4400),
            TimedInput::with_param("data_byte", Value::Str("B".into()), 4500),
        ])
        .unwrap();
    let test = tfsm_core::TestCase::from_trace("T1", &trace);
    let suite = Suite {
        suite_id: "demo".into(),
        model: "rfid".into(),
        tests: vec![test],
    };
    let text = serialize_suite(&suite);
    let back = parse_suite(&text).unwrap();
    assert_eq!(back, suite);
    assert_eq!(serialize_suite(&back), text);
}

#[test]
fn suite_timestamps_must_increase() {
    let doc = format!(
        r#"{{
            "schema": "{SCHEMA}",
            "suite_id": "s",
            "model": "m",
            "tests": [{{
                "id": "T1",
                "steps": [
                    {{"input": "a", "at_ms": 100, "expect": "eps"}},
                    {{"input": "b", "at_ms": 100, "expect": "eps"}}
                ]
            }}]
        }}"#
    );
    match parse_suite(&doc).unwrap_err() {
        FormatError::Schema { at, message } => {
            assert_eq!(at, "tests[T1]");
            assert!(message.contains("strictly increasing"), "{message}");
        }
        other => panic!("expected schema error, got {other}"),
    }
}

#[test]
fn verdicts_roundtrip() {
    let doc = VerdictsDoc {
        schema: SCHEMA.into(),
        suite_id: "demo".into(),
        rows: vec![VerdictRowDoc {
            test: "T1".into(),
            target: "A1-S5".into(),
            outcome: "kill".into(),
            divergence_index: Some(2),
            observed: vec!["o1".into(), "o4".into(), "eps".into()],
            detail: None,
        }],
    };
    let text = canonical_json(&doc);
    let back = parse_verdicts(&text).unwrap();
    assert_eq!(back, doc);
}
