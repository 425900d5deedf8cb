//! Seeded random machines, used to cross-check the search against the
//! independent oracle on inputs nobody hand-picked. Machines are small,
//! variable-free, and valid by construction.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfsm_core::{
    InputSymbol, Output, StateTimeout, TimedStateMachine, TimeoutRule, Transition,
};

/// Deterministically generate a small plain timed machine from a seed:
/// at most 6 states, at most 3 inputs, timeouts drawn from whole seconds
/// between 1000 and 5000 ms.
pub fn random_machine(seed: u64) -> TimedStateMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_states = rng.gen_range(2..=6usize);
    let n_inputs = rng.gen_range(2..=3usize);
    let n_outputs = rng.gen_range(2..=3usize);
    let states: Vec<String> = (0..n_states).map(|i| format!("A{i}")).collect();
    let inputs: Vec<String> = (0..n_inputs).map(|i| format!("x{i}")).collect();
    let outputs: Vec<String> = (0..n_outputs).map(|i| format!("y{i}")).collect();

    let timeouts = states
        .iter()
        .map(|s| StateTimeout {
            state: s.clone(),
            rule: if rng.gen_bool(0.75) {
                TimeoutRule::Move {
                    after: 1000 * rng.gen_range(1..=5u64),
                    to: states.choose(&mut rng).unwrap().clone(),
                }
            } else {
                TimeoutRule::Never
            },
        })
        .collect();

    let mut transitions = Vec::new();
    for s in &states {
        for i in &inputs {
            if !rng.gen_bool(0.5) {
                continue;
            }
            let output = if rng.gen_bool(0.8) {
                Output::symbol(outputs.choose(&mut rng).unwrap().clone())
            } else {
                Output::Epsilon
            };
            transitions.push(Transition {
                id: format!("t_{s}_{i}"),
                from: s.clone(),
                input: i.clone(),
                guard: None,
                update: None,
                output,
                to: states.choose(&mut rng).unwrap().clone(),
            });
        }
    }

    TimedStateMachine {
        id: format!("rand-{seed}"),
        states: states.clone(),
        initial: states[0].clone(),
        inputs: inputs
            .into_iter()
            .map(|name| InputSymbol { name, param: None })
            .collect(),
        outputs,
        variables: vec![],
        timeouts,
        transitions,
    }
}
