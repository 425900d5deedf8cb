//! Randomized invariants of the execution semantics.

use proptest::prelude::*;
use tfsm_core::*;

const INPUTS: [&str; 3] = ["a", "b", "c"];
const OUTPUTS: [&str; 2] = ["x", "y"];

#[derive(Clone, Debug)]
struct RandomMachine(TimedStateMachine);

fn arb_machine() -> impl Strategy<Value = RandomMachine> {
    // Per state: a timeout choice; per (state, input): at most one transition,
    // so the machine is deterministic by construction.
    (2usize..=5).prop_flat_map(|n| {
        let timeout = prop_oneof![
            Just(None),
            (1u64..=5, 0..n).prop_map(|(secs, to)| Some((secs * 1000, to))),
        ];
        let cell = prop_oneof![
            3 => Just(None),
            4 => (0usize..3, 0..n).prop_map(|(o, to)| Some((Some(o), to))),
            1 => (0usize..n).prop_map(|to| Some((None, to))),
        ];
        (
            prop::collection::vec(timeout, n),
            prop::collection::vec(cell, n * INPUTS.len()),
        )
            .prop_map(move |(timeouts, cells)| {
                let states: Vec<String> = (0..n).map(|i| format!("S{i}")).collect();
                let timeouts = timeouts
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| StateTimeout {
                        state: states[i].clone(),
                        rule: match t {
                            None => TimeoutRule::Never,
                            Some((after, to)) => TimeoutRule::Move {
                                after,
                                to: states[to].clone(),
                            },
                        },
                    })
                    .collect();
                let mut transitions = Vec::new();
                for (idx, cell) in cells.into_iter().enumerate() {
                    if let Some((out, to)) = cell {
                        let from = idx / INPUTS.len();
                        let input = INPUTS[idx % INPUTS.len()];
                        transitions.push(Transition {
                            id: format!("t{idx}"),
                            from: states[from].clone(),
                            input: input.into(),
                            guard: None,
                            update: None,
                            output: match out {
                                // Index 2 doubles as ε so silent transitions
                                // get exercised too.
                                Some(o) if o < OUTPUTS.len() => Output::symbol(OUTPUTS[o]),
                                _ => Output::Epsilon,
                            },
                            to: states[to].clone(),
                        });
                    }
                }
                RandomMachine(TimedStateMachine {
                    id: "random".into(),
                    states: states.clone(),
                    initial: states[0].clone(),
                    inputs: INPUTS
                        .iter()
                        .map(|n| InputSymbol {
                            name: n.to_string(),
                            param: None,
                        })
                        .collect(),
                    outputs: OUTPUTS.iter().map(|s| s.to_string()).collect(),
                    variables: vec![],
                    timeouts,
                    transitions,
                })
            })
    })
}

fn arb_seq() -> impl Strategy<Value = Vec<(usize, Millis)>> {
    prop::collection::vec((0usize..INPUTS.len(), 1u64..=3000), 0..12)
}

fn stamp(seq: &[(usize, Millis)]) -> Vec<TimedInput> {
    let mut at = 0;
    seq.iter()
        .map(|(i, delta)| {
            at += delta;
            TimedInput::plain(INPUTS[*i], at)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn generated_machines_validate(m in arb_machine()) {
        prop_assert!(validate_machine(&m.0).is_ok());
    }

    // Replaying a trace's own inputs must reproduce its outputs: runs are a
    // pure function of the machine and the timed sequence.
    #[test]
    fn trace_closure(m in arb_machine(), seq in arb_seq()) {
        let inputs = stamp(&seq);
        let first = m.0.run(&inputs).unwrap();
        let again = m.0.run(&inputs).unwrap();
        prop_assert_eq!(first.outputs(), again.outputs());
        prop_assert_eq!(first.end, again.end);
    }

    // Advancing in two hops lands in exactly the same configuration (and
    // fires the same timeouts) as advancing in one.
    #[test]
    fn advance_composes(m in arb_machine(), mid in 0u64..=5000, rest in 0u64..=5000) {
        let c = m.0.initial_config();
        let (direct, fired_direct) = m.0.advance(&c, mid + rest).unwrap();
        let (half, mut fired_split) = m.0.advance(&c, mid).unwrap();
        let (split, fired_tail) = m.0.advance(&half, mid + rest).unwrap();
        fired_split.extend(fired_tail);
        prop_assert_eq!(direct, split);
        prop_assert_eq!(fired_direct, fired_split);
    }

    // Every executed transition resets the local clock; every ignore leaves
    // state and environment alone.
    #[test]
    fn clock_reset_and_ignore_stability(m in arb_machine(), seq in arb_seq()) {
        let mut c = m.0.initial_config();
        for input in stamp(&seq) {
            let (pre_advance, _) = m.0.advance(&c, input.at).unwrap();
            let (next, out, _) = m.0.step_input(&c, &input).unwrap();
            let executed = m
                .0
                .transitions_from(&pre_advance.state, &input.symbol)
                .next()
                .is_some();
            if executed {
                prop_assert_eq!(next.clock, 0);
            } else {
                prop_assert_eq!(out, Output::Epsilon);
                prop_assert_eq!(&next.state, &pre_advance.state);
                prop_assert_eq!(&next.env, &pre_advance.env);
                prop_assert_eq!(next.clock, pre_advance.clock);
            }
            c = next;
        }
    }

    // With every timeout removed, a machine degenerates to an untimed FSM:
    // outputs depend only on the symbol order, not the stamps.
    #[test]
    fn untimed_degenerate_ignores_timestamps(m in arb_machine(), seq in arb_seq(), scale in 1u64..=7) {
        let mut m = m.0;
        for t in &mut m.timeouts {
            t.rule = TimeoutRule::Never;
        }
        let base = stamp(&seq);
        let scaled: Vec<TimedInput> = base
            .iter()
            .map(|i| TimedInput::plain(i.symbol.clone(), i.at * scale))
            .collect();
        let a = m.run(&base).unwrap();
        let b = m.run(&scaled).unwrap();
        prop_assert_eq!(a.outputs(), b.outputs());
        prop_assert_eq!(a.end.state, b.end.state);
    }
}
