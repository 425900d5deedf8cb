//! Pinned semantics checks. Every expected value in here was derived by hand
//! from the three rules (timeout chains, boundary ordering, ignore) before
//! the engine existed; the engine has to reproduce them exactly.

use tfsm_core::*;

fn plain_inputs(names: &[&str]) -> Vec<InputSymbol> {
    names
        .iter()
        .map(|n| InputSymbol {
            name: n.to_string(),
            param: None,
        })
        .collect()
}

fn to(after: Millis, dst: &str) -> TimeoutRule {
    TimeoutRule::Move {
        after,
        to: dst.to_string(),
    }
}

fn tr(id: &str, from: &str, input: &str, output: Output, dst: &str) -> Transition {
    Transition {
        id: id.to_string(),
        from: from.to_string(),
        input: input.to_string(),
        guard: None,
        update: None,
        output,
        to: dst.to_string(),
    }
}

/// Two states ping-ponging every 2000 ms; `go` at A answers `ack` and moves
/// to B; everything else is unspecified.
fn ping_pong() -> TimedStateMachine {
    TimedStateMachine {
        id: "ping-pong".into(),
        states: vec!["A".into(), "B".into()],
        initial: "A".into(),
        inputs: plain_inputs(&["go", "noise"]),
        outputs: vec!["ack".into()],
        variables: vec![],
        timeouts: vec![
            StateTimeout {
                state: "A".into(),
                rule: to(2000, "B"),
            },
            StateTimeout {
                state: "B".into(),
                rule: to(2000, "A"),
            },
        ],
        transitions: vec![tr("t1", "A", "go", Output::symbol("ack"), "B")],
    }
}

#[test]
fn ping_pong_validates() {
    assert!(validate_machine(&ping_pong()).is_ok());
}

#[test]
fn advance_fires_chained_timeouts_in_order() {
    let m = ping_pong();
    let (end, fired) = m.advance(&m.initial_config(), 4000).unwrap();
    assert_eq!(
        fired,
        vec![
            TimeoutFiring {
                from: "A".into(),
                to: "B".into(),
                at: 2000
            },
            TimeoutFiring {
                from: "B".into(),
                to: "A".into(),
                at: 4000
            },
        ]
    );
    assert_eq!(end.state, "A");
    assert_eq!(end.clock, 0);
    assert_eq!(end.now, 4000);
}

#[test]
fn timeout_fires_at_exactly_t_out_not_before() {
    let m = ping_pong();
    let (at_1999, fired) = m.advance(&m.initial_config(), 1999).unwrap();
    assert!(fired.is_empty());
    assert_eq!((at_1999.state.as_str(), at_1999.clock), ("A", 1999));

    let (at_2000, fired) = m.advance(&m.initial_config(), 2000).unwrap();
    assert_eq!(fired.len(), 1);
    assert_eq!((at_2000.state.as_str(), at_2000.clock), ("B", 0));
}

#[test]
fn one_ms_self_loop_fires_once_per_millisecond() {
    // A 1 ms self-loop timeout is the degenerate "never sleeps" shape: over a
    // 10 ms window it must fire exactly ten times, at 1..=10.
    let m = TimedStateMachine {
        id: "buzzer".into(),
        states: vec!["S".into()],
        initial: "S".into(),
        inputs: vec![],
        outputs: vec![],
        variables: vec![],
        timeouts: vec![StateTimeout {
            state: "S".into(),
            rule: to(1, "S"),
        }],
        transitions: vec![],
    };
    let (end, fired) = m.advance(&m.initial_config(), 10).unwrap();
    assert_eq!(fired.len(), 10);
    let times: Vec<Millis> = fired.iter().map(|f| f.at).collect();
    assert_eq!(times, (1..=10).collect::<Vec<_>>());
    assert_eq!(end.clock, 0);
}

#[test]
fn infinite_timeout_lets_the_clock_grow() {
    let m = TimedStateMachine {
        id: "idle".into(),
        states: vec!["S".into()],
        initial: "S".into(),
        inputs: vec![],
        outputs: vec![],
        variables: vec![],
        timeouts: vec![StateTimeout {
            state: "S".into(),
            rule: TimeoutRule::Never,
        }],
        transitions: vec![],
    };
    let (end, fired) = m.advance(&m.initial_config(), 1_000_000).unwrap();
    assert!(fired.is_empty());
    assert_eq!(end.clock, 1_000_000);
}

#[test]
fn input_at_the_deadline_is_processed_after_the_firing() {
    // At A the timeout (2000 -> B) and an input stamped exactly 2000 race;
    // the timeout wins, so `go` (only defined at A) lands at B and is
    // ignored.
    let m = ping_pong();
    let (c, out, fired) = m
        .step_input(&m.initial_config(), &TimedInput::plain("go", 2000))
        .unwrap();
    assert_eq!(fired.len(), 1);
    assert_eq!(out, Output::Epsilon);
    assert_eq!((c.state.as_str(), c.clock), ("B", 0));

    // One millisecond earlier the input wins.
    let (c, out, fired) = m
        .step_input(&m.initial_config(), &TimedInput::plain("go", 1999))
        .unwrap();
    assert!(fired.is_empty());
    assert_eq!(out, Output::symbol("ack"));
    assert_eq!((c.state.as_str(), c.clock), ("B", 0));
}

#[test]
fn ignored_input_changes_nothing_but_time() {
    let m = ping_pong();
    let (c, out, _) = m
        .step_input(&m.initial_config(), &TimedInput::plain("noise", 700))
        .unwrap();
    assert_eq!(out, Output::Epsilon);
    assert_eq!(c.state, "A");
    // The clock keeps running: an ignore does not reset it.
    assert_eq!(c.clock, 700);

    // And therefore the pending timeout still fires at the original deadline.
    let (c2, fired) = m.advance(&c, 2000).unwrap();
    assert_eq!(fired.len(), 1);
    assert_eq!(fired[0].at, 2000);
    assert_eq!(c2.state, "B");
}

#[test]
fn overlapping_guards_are_a_dynamic_error() {
    let mut m = ping_pong();
    // Two guarded transitions on (A, go) that overlap only when x == 3.
    m.variables.push(VarDecl {
        name: "x".into(),
        kind: VarKind::Int,
        init: Value::Int(3),
    });
    m.transitions = vec![
        Transition {
            guard: Some(parse_guard("x >= 3").unwrap()),
            ..tr("t1", "A", "go", Output::symbol("ack"), "B")
        },
        Transition {
            guard: Some(parse_guard("x <= 3").unwrap()),
            ..tr("t2", "A", "go", Output::symbol("ack"), "A")
        },
    ];
    // Static validation cannot see this (the guards are not constant)...
    assert!(validate_machine(&m).is_ok());
    // ...but stepping reports it.
    let err = m
        .step_input(&m.initial_config(), &TimedInput::plain("go", 1))
        .unwrap_err();
    assert_eq!(
        err,
        StepError::Nondeterministic {
            state: "A".into(),
            symbol: "go".into(),
            ids: vec!["t1".into(), "t2".into()],
        }
    );
}

#[test]
fn alphabet_and_param_discipline() {
    let m = ping_pong();
    let err = m
        .step_input(&m.initial_config(), &TimedInput::plain("bogus", 1))
        .unwrap_err();
    assert_eq!(
        err,
        StepError::UnknownInput {
            symbol: "bogus".into()
        }
    );

    let err = m
        .step_input(
            &m.initial_config(),
            &TimedInput::with_param("go", Value::Int(1), 1),
        )
        .unwrap_err();
    assert!(matches!(err, StepError::ParamMismatch { .. }));
}

#[test]
fn time_never_goes_backwards() {
    let m = ping_pong();
    let (c, _, _) = m
        .step_input(&m.initial_config(), &TimedInput::plain("noise", 500))
        .unwrap();
    let err = m
        .step_input(&c, &TimedInput::plain("go", 400))
        .unwrap_err();
    assert_eq!(err, StepError::TimeTravel { at: 400, now: 500 });

    let err = m
        .run(&[
            TimedInput::plain("noise", 500),
            TimedInput::plain("go", 500),
        ])
        .unwrap_err();
    assert_eq!(err, StepError::NotIncreasing { prev: 500, at: 500 });
}

#[test]
fn run_observed_collects_trailing_firings() {
    let m = ping_pong();
    let trace = m.run_observed(&[], 4000).unwrap();
    assert_eq!(trace.events.len(), 2);
    assert!(matches!(
        &trace.events[0],
        TraceEvent::Timeout(TimeoutFiring { at: 2000, .. })
    ));
    assert!(matches!(
        &trace.events[1],
        TraceEvent::Timeout(TimeoutFiring { at: 4000, .. })
    ));
    assert!(trace.outputs().is_empty());
    assert_eq!(trace.end.state, "A");
}

#[test]
fn guarded_update_machine_executes_the_documented_configurations() {
    // A reader state accumulating bytes: guard `counter < 10`, concurrent
    // update bumping the counter and extending the code string.
    let m = TimedStateMachine {
        id: "reader".into(),
        states: vec!["R".into()],
        initial: "R".into(),
        inputs: vec![InputSymbol {
            name: "data_byte".into(),
            param: Some(VarKind::Str),
        }],
        outputs: vec!["ok".into()],
        variables: vec![
            VarDecl {
                name: "counter".into(),
                kind: VarKind::Int,
                init: Value::Int(0),
            },
            VarDecl {
                name: "code".into(),
                kind: VarKind::Str,
                init: Value::Str(String::new()),
            },
        ],
        timeouts: vec![StateTimeout {
            state: "R".into(),
            rule: TimeoutRule::Never,
        }],
        transitions: vec![Transition {
            id: "read".into(),
            from: "R".into(),
            input: "data_byte".into(),
            guard: Some(parse_guard("counter < 10").unwrap()),
            update: Some(parse_update("counter := counter + 1; code := code + p").unwrap()),
            output: Output::symbol("ok"),
            to: "R".into(),
        }],
    };
    assert!(validate_machine(&m).is_ok());

    let trace = m
        .run(&[
            TimedInput::with_param("data_byte", Value::Str("B".into()), 500),
            TimedInput::with_param("data_byte", Value::Str("A".into()), 1000),
        ])
        .unwrap();
    assert_eq!(
        trace.outputs(),
        vec![Output::symbol("ok"), Output::symbol("ok")]
    );
    assert_eq!(trace.end.env["counter"], Value::Int(2));
    assert_eq!(trace.end.env["code"], Value::Str("BA".into()));

    // Fill to the guard bound: the 11th byte is ignored.
    let seq: Vec<TimedInput> = (0..11)
        .map(|i| TimedInput::with_param("data_byte", Value::Str("x".into()), 100 * (i + 1)))
        .collect();
    let trace = m.run(&seq).unwrap();
    let outs = trace.outputs();
    assert_eq!(outs.len(), 11);
    assert!(outs[..10].iter().all(|o| *o == Output::symbol("ok")));
    assert_eq!(outs[10], Output::Epsilon);
    assert_eq!(trace.end.env["counter"], Value::Int(10));
}

#[test]
fn validation_catches_structural_faults() {
    let mut m = ping_pong();
    m.timeouts.remove(1);
    m.transitions.push(tr("t1", "A", "go", Output::symbol("nope"), "C"));
    m.outputs.push(EPSILON.into());
    let report = validate_machine(&m);
    let has = |pred: &dyn Fn(&Violation) -> bool| report.violations.iter().any(pred);
    assert!(has(&|v| matches!(v, Violation::MissingTimeout(s) if s == "B")));
    assert!(has(&|v| matches!(v, Violation::DuplicateTransitionId(_))));
    assert!(has(&|v| matches!(v, Violation::UnknownTransitionState { .. })));
    assert!(has(&|v| matches!(v, Violation::UnknownTransitionOutput { .. })));
    assert!(has(&|v| matches!(v, Violation::ReservedName { .. })));
}

#[test]
fn static_overlap_is_caught_for_unguarded_pairs() {
    let mut m = ping_pong();
    m.transitions.push(tr("t2", "A", "go", Output::symbol("ack"), "A"));
    let report = validate_machine(&m);
    assert!(report
        .violations
        .iter()
        .any(|v| matches!(v, Violation::GuardOverlap { transitions, .. }
            if transitions == &vec!["t1".to_string(), "t2".to_string()])));
}
