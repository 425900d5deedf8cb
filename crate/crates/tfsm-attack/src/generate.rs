//! Mutant generators. The six attack generators read targets from a model's
//! [`AttackProfile`]; the traditional generator draws seeded random edits.
//! All of them produce descriptors that are guaranteed to apply cleanly to
//! the base machine.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfsm_core::{Output, TimedStateMachine, TimeoutRule, EPSILON};
use tfsm_model::AttackProfile;

use crate::descriptor::{
    apply_descriptor, AttackError, AttackKind, MutantDescriptor, MutantEdit, MutantSet,
};

/// Battery drain halves dwell times: every profiled drain state gets its
/// timeout forced to 1000ms so the device wakes, transmits, and burns power
/// twice as often.
const DRAINED_MS: u64 = 1000;
/// Sleep deprivation all but removes the sleep state's dwell time.
const SLEEPLESS_MS: u64 = 1;
/// Increased timeout stretches dwell times so the device reacts late.
const INCREASED_MS: u64 = 5000;
/// A man-in-the-middle holds a message this long before passing it on.
const MITM_HOLD_MS: u64 = 2000;
/// Falsified replies prefer this output when the model declares it.
const FALSIFIED_OUTPUT: &str = "o6";

/// What one generator produced: descriptors plus any targets it skipped or
/// adjusted, described as warnings.
#[derive(Debug)]
pub struct Generated {
    pub mutants: Vec<MutantDescriptor>,
    pub warnings: Vec<String>,
}

impl Generated {
    fn new() -> Self {
        Generated {
            mutants: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

fn retime_states(
    m: &TimedStateMachine,
    states: &[String],
    kind: AttackKind,
    after_ms: u64,
) -> Result<Generated, AttackError> {
    let mut out = Generated::new();
    for state in states {
        let t = m
            .timeout(state)
            .ok_or_else(|| AttackError::UnknownTarget {
                what: "state",
                name: state.clone(),
            })?;
        let id = format!("{kind}-{state}");
        match t.rule {
            TimeoutRule::Never => {
                return Err(AttackError::Conflict {
                    detail: format!("state {state} never times out; nothing to retime"),
                })
            }
            TimeoutRule::Move { after, .. } if after == after_ms => {
                out.warnings
                    .push(format!("{id} skipped: timeout is already {after_ms}ms"));
            }
            TimeoutRule::Move { .. } => out.mutants.push(MutantDescriptor {
                id,
                kind,
                edit: MutantEdit::SetTimeout {
                    state: state.clone(),
                    after_ms,
                },
            }),
        }
    }
    Ok(out)
}

/// A1 — battery drain: halve the dwell timeout of every drain state.
pub fn gen_battery_drain(
    m: &TimedStateMachine,
    profile: &AttackProfile,
) -> Result<Generated, AttackError> {
    retime_states(m, &profile.drain_states, AttackKind::BatteryDrain, DRAINED_MS)
}

/// A2 — sleep deprivation: the sleep state bounces out after 1ms.
pub fn gen_sleep_deprivation(
    m: &TimedStateMachine,
    profile: &AttackProfile,
) -> Result<Generated, AttackError> {
    retime_states(
        m,
        std::slice::from_ref(&profile.sleep_state),
        AttackKind::SleepDeprivation,
        SLEEPLESS_MS,
    )
}

/// A3 — data falsification: each profiled transition answers with the wrong
/// output, preferring `o6` when the model declares it.
pub fn gen_data_falsification(
    m: &TimedStateMachine,
    profile: &AttackProfile,
) -> Result<Generated, AttackError> {
    let mut out = Generated::new();
    let has_preferred = m.has_output(FALSIFIED_OUTPUT);
    for tid in &profile.falsify_transitions {
        let t = m
            .transition(tid)
            .ok_or_else(|| AttackError::UnknownTarget {
                what: "transition",
                name: tid.clone(),
            })?;
        let id = format!("{}-{tid}", AttackKind::DataFalsification);
        let current = t.output.to_string();
        let chosen = if has_preferred && current != FALSIFIED_OUTPUT {
            FALSIFIED_OUTPUT.to_string()
        } else {
            match m.outputs.iter().find(|o| **o != current) {
                Some(o) => {
                    if current == FALSIFIED_OUTPUT {
                        out.warnings.push(format!(
                            "{id}: transition already answers {FALSIFIED_OUTPUT}; falsifying to {o}"
                        ));
                    } else {
                        out.warnings.push(format!(
                            "{id}: no {FALSIFIED_OUTPUT} output declared; falsifying to {o}"
                        ));
                    }
                    o.clone()
                }
                None => {
                    out.warnings
                        .push(format!("{id} skipped: no alternative output to falsify to"));
                    continue;
                }
            }
        };
        out.mutants.push(MutantDescriptor {
            id,
            kind: AttackKind::DataFalsification,
            edit: MutantEdit::SetOutput {
                transition: tid.clone(),
                output: chosen,
            },
        });
    }
    Ok(out)
}

/// A4 — replay: after the profiled transition has fired, its recorded input
/// is injected again, and the mutant answers again instead of staying
/// silent.
pub fn gen_replay(
    m: &TimedStateMachine,
    profile: &AttackProfile,
) -> Result<Generated, AttackError> {
    let tid = &profile.replay_transition;
    let t = m
        .transition(tid)
        .ok_or_else(|| AttackError::UnknownTarget {
            what: "transition",
            name: tid.clone(),
        })?;
    let Output::Symbol(output) = &t.output else {
        return Err(AttackError::Conflict {
            detail: format!("replaying silent transition {tid} would be unobservable"),
        });
    };
    if m.transitions_from(&t.to, &t.input).next().is_some() {
        return Err(AttackError::Conflict {
            detail: format!(
                "state {} already reacts to {}; a replayed {} is not silent there",
                t.to, t.input, t.input
            ),
        });
    }
    let mut out = Generated::new();
    out.mutants.push(MutantDescriptor {
        id: format!("{}-{tid}", AttackKind::Replay),
        kind: AttackKind::Replay,
        edit: MutantEdit::AddTransition {
            from: t.to.clone(),
            input: t.input.clone(),
            output: output.clone(),
            to: t.to.clone(),
        },
    });
    Ok(out)
}

/// A5 — man-in-the-middle: each profiled transition is intercepted by a new
/// state that holds the message for [`MITM_HOLD_MS`] before silently
/// releasing control back to where the message came from.
pub fn gen_mitm(
    m: &TimedStateMachine,
    profile: &AttackProfile,
) -> Result<Generated, AttackError> {
    let mut out = Generated::new();
    for tid in &profile.mitm_transitions {
        let t = m
            .transition(tid)
            .ok_or_else(|| AttackError::UnknownTarget {
                what: "transition",
                name: tid.clone(),
            })?;
        let mut state = format!("MITM_{tid}");
        let mut k = 2;
        while m.has_state(&state) {
            state = format!("MITM_{tid}_{k}");
            k += 1;
        }
        out.mutants.push(MutantDescriptor {
            id: format!("{}-{tid}", AttackKind::Mitm),
            kind: AttackKind::Mitm,
            edit: MutantEdit::AddState {
                state,
                reroute: tid.clone(),
                timeout_ms: MITM_HOLD_MS,
                back_to: t.from.clone(),
            },
        });
    }
    Ok(out)
}

/// inc — increased timeout: stretch the same states battery drain shrinks.
pub fn gen_increased_timeout(
    m: &TimedStateMachine,
    profile: &AttackProfile,
) -> Result<Generated, AttackError> {
    retime_states(
        m,
        &profile.drain_states,
        AttackKind::IncreasedTimeout,
        INCREASED_MS,
    )
}

/// Run the requested attack generators in taxonomy order and bundle the
/// result. When the full attack set is generated and the profile carries
/// externally claimed counts, disagreements are reported as warnings.
pub fn gen_attacks(
    m: &TimedStateMachine,
    profile: &AttackProfile,
    kinds: &[AttackKind],
) -> Result<MutantSet, AttackError> {
    let mut set = MutantSet::new(&m.id);
    for kind in AttackKind::ATTACKS {
        if !kinds.contains(&kind) {
            continue;
        }
        let generated = match kind {
            AttackKind::BatteryDrain => gen_battery_drain(m, profile)?,
            AttackKind::SleepDeprivation => gen_sleep_deprivation(m, profile)?,
            AttackKind::DataFalsification => gen_data_falsification(m, profile)?,
            AttackKind::Replay => gen_replay(m, profile)?,
            AttackKind::Mitm => gen_mitm(m, profile)?,
            AttackKind::IncreasedTimeout => gen_increased_timeout(m, profile)?,
            AttackKind::Traditional => unreachable!("not an attack generator"),
        };
        set.mutants.extend(generated.mutants);
        set.warnings.extend(generated.warnings);
    }

    // Every emitted descriptor must denote a real machine.
    for d in &set.mutants {
        apply_descriptor(m, d)?;
    }

    if AttackKind::ATTACKS.iter().all(|k| kinds.contains(k)) {
        if let Some(claimed) = profile.claimed_timeout_mutants {
            let produced = set
                .mutants
                .iter()
                .filter(|d| d.kind == AttackKind::BatteryDrain)
                .count();
            if claimed as usize != produced {
                set.warnings.push(format!(
                    "profile claims {claimed} battery-drain mutants; the drain targets enumerate {produced}"
                ));
            }
        }
        if let Some(claimed) = profile.claimed_attack_total {
            let produced = set.mutants.len();
            if claimed as usize != produced {
                set.warnings.push(format!(
                    "profile claims {claimed} attack mutants in total; generation produced {produced}"
                ));
            }
        }
    }
    Ok(set)
}

/// Candidate durations for traditional timeout mutations.
const TRADITIONAL_DURATIONS: [u64; 6] = [1, 500, 1000, 3000, 5000, 10000];
/// Attempts allowed per requested traditional mutant before giving up.
const ATTEMPTS_PER_MUTANT: usize = 40;

/// Seeded traditional mutants: random output swaps, retimed states, added
/// transitions, and added detour states. The same machine, count, and seed
/// always produce the same set.
pub fn gen_traditional(
    m: &TimedStateMachine,
    count: usize,
    seed: u64,
) -> Result<MutantSet, AttackError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = MutantSet::new(&m.id);
    set.seed = Some(seed);
    let mut seen = BTreeSet::new();

    let retimable: Vec<&str> = m
        .timeouts
        .iter()
        .filter(|t| matches!(t.rule, TimeoutRule::Move { .. }))
        .map(|t| t.state.as_str())
        .collect();
    let mut output_pool: Vec<String> = m.outputs.clone();
    output_pool.push(EPSILON.to_string());

    let attempts = ATTEMPTS_PER_MUTANT * count.max(1);
    for _ in 0..attempts {
        if set.mutants.len() == count {
            break;
        }
        let edit = match rng.gen_range(0..4u8) {
            0 => {
                let Some(t) = m.transitions.choose(&mut rng) else {
                    continue;
                };
                let current = t.output.to_string();
                let candidates: Vec<&String> =
                    output_pool.iter().filter(|o| **o != current).collect();
                let Some(output) = candidates.choose(&mut rng) else {
                    continue;
                };
                MutantEdit::SetOutput {
                    transition: t.id.clone(),
                    output: (**output).clone(),
                }
            }
            1 => {
                let Some(state) = retimable.choose(&mut rng) else {
                    continue;
                };
                let current = m.timeout(state).and_then(|t| t.rule.after());
                let candidates: Vec<u64> = TRADITIONAL_DURATIONS
                    .iter()
                    .copied()
                    .filter(|d| Some(*d) != current)
                    .collect();
                let Some(after_ms) = candidates.choose(&mut rng) else {
                    continue;
                };
                MutantEdit::SetTimeout {
                    state: state.to_string(),
                    after_ms: *after_ms,
                }
            }
            2 => {
                let mut absent = Vec::new();
                for s in &m.states {
                    for i in &m.inputs {
                        if m.transitions_from(s, &i.name).next().is_none() {
                            absent.push((s, &i.name));
                        }
                    }
                }
                let Some((from, input)) = absent.choose(&mut rng) else {
                    continue;
                };
                let Some(output) = output_pool.choose(&mut rng) else {
                    continue;
                };
                let Some(to) = m.states.choose(&mut rng) else {
                    continue;
                };
                MutantEdit::AddTransition {
                    from: (*from).clone(),
                    input: (*input).clone(),
                    output: output.clone(),
                    to: to.clone(),
                }
            }
            _ => {
                let Some(t) = m.transitions.choose(&mut rng) else {
                    continue;
                };
                let mut k = 1;
                let mut state = format!("X{k}");
                while m.has_state(&state) {
                    k += 1;
                    state = format!("X{k}");
                }
                MutantEdit::AddState {
                    state,
                    reroute: t.id.clone(),
                    timeout_ms: MITM_HOLD_MS,
                    back_to: t.from.clone(),
                }
            }
        };

        let key = serde_json::to_string(&edit).expect("edits serialize infallibly");
        if seen.contains(&key) {
            continue;
        }
        let d = MutantDescriptor {
            id: format!("trad-{}", set.mutants.len() + 1),
            kind: AttackKind::Traditional,
            edit,
        };
        if apply_descriptor(m, &d).is_err() {
            continue;
        }
        seen.insert(key);
        set.mutants.push(d);
    }

    if set.mutants.len() < count {
        return Err(AttackError::Exhausted {
            wanted: count,
            got: set.mutants.len(),
            attempts,
        });
    }
    Ok(set)
}
