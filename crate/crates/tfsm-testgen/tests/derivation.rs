//! Search and derivation pins: distinguishing sequences exist for every
//! attack mutant of every bundled model, suites stay well below one test
//! per mutant, equivalent mutants survive, and the independent oracle
//! agrees with the search.

use tfsm_attack::{apply_descriptor, gen_attacks, gen_traditional, AttackKind, MutantDescriptor, MutantEdit};
use tfsm_core::{TestCase, TimedStateMachine};
use tfsm_model::load_bundled;
use tfsm_testgen::{
    candidate_deltas, derive_suite, distinguish, execute_test, oracle_distinguish, param_pools,
    random_machine, SearchConfig, TestOutcome,
};

fn bundled(name: &str) -> (TimedStateMachine, tfsm_model::AttackProfile) {
    let pm = load_bundled(name).unwrap();
    (pm.machine, pm.profile.unwrap())
}

fn passes(m: &TimedStateMachine, t: &TestCase) -> bool {
    matches!(execute_test(m, t).unwrap().outcome, TestOutcome::Pass)
}

fn kills(m: &TimedStateMachine, t: &TestCase) -> bool {
    matches!(execute_test(m, t).unwrap().outcome, TestOutcome::Kill { .. })
}

/// An interception that changes nothing observable: S9 has no reactions and
/// its timeout already leads to S10, so a detour state with the same timing
/// and destination is behaviorally invisible.
fn equivalent_mutant(spec: &TimedStateMachine) -> TimedStateMachine {
    apply_descriptor(
        spec,
        &MutantDescriptor {
            id: "ghost".into(),
            kind: AttackKind::Traditional,
            edit: MutantEdit::AddState {
                state: "GHOST".into(),
                reroute: "t16".into(),
                timeout_ms: 2000,
                back_to: "S10".into(),
            },
        },
    )
    .unwrap()
}

#[test]
fn delta_grid_and_pools_are_pinned() {
    let (motion, _) = bundled("motion_sensor");
    let s = motion.initial_config();
    assert_eq!(
        candidate_deltas(&motion, &s, &motion, &s),
        [1, 1000, 1999, 2000]
    );

    let (rfid, _) = bundled("rfid");
    let pools = param_pools(&[&rfid, &rfid]);
    assert_eq!(pools.ints, [-1, 0, 1, 2, 9, 10, 11]);
    assert_eq!(pools.strings, ["", "a"]);
}

#[test]
fn battery_drain_mutant_is_distinguished_quickly() {
    let (motion, profile) = bundled("motion_sensor");
    let set = gen_attacks(&motion, &profile, &AttackKind::ATTACKS).unwrap();
    let mutant = apply_descriptor(&motion, set.descriptor("A1-S5").unwrap()).unwrap();

    let test = distinguish(&motion, &mutant, "T1", &SearchConfig::default())
        .unwrap()
        .expect("battery drain must be detectable");
    assert!(test.steps.len() <= 4, "unexpectedly long: {:?}", test.steps);
    assert!(passes(&motion, &test));
    assert!(kills(&mutant, &test));

    // Deterministic: same machines, same test.
    let again = distinguish(&motion, &mutant, "T1", &SearchConfig::default())
        .unwrap()
        .unwrap();
    assert_eq!(again, test);
}

#[test]
fn replay_mutant_is_distinguished() {
    let (motion, profile) = bundled("motion_sensor");
    let set = gen_attacks(&motion, &profile, &AttackKind::ATTACKS).unwrap();
    let mutant = apply_descriptor(&motion, set.descriptor("A4-t8").unwrap()).unwrap();
    let test = distinguish(&motion, &mutant, "T1", &SearchConfig::default())
        .unwrap()
        .expect("replay must be detectable");
    assert!(passes(&motion, &test));
    assert!(kills(&mutant, &test));
    // The separating step is a replayed i4 the reference silently ignores.
    let last = test.steps.last().unwrap();
    assert_eq!(last.input.symbol, "i4");
    assert_eq!(last.expect, tfsm_core::Output::Epsilon);
}

#[test]
fn equivalent_mutant_survives() {
    let (motion, _) = bundled("motion_sensor");
    let ghost = equivalent_mutant(&motion);
    let found = distinguish(&motion, &ghost, "T1", &SearchConfig::default()).unwrap();
    assert!(found.is_none(), "found a test for an equivalent mutant");
}

fn assert_full_derivation(name: &str, expected_mutants: usize) {
    let (machine, profile) = bundled(name);
    let set = gen_attacks(&machine, &profile, &AttackKind::ATTACKS).unwrap();
    assert_eq!(set.mutants.len(), expected_mutants);
    let derived = derive_suite(&machine, &set, &SearchConfig::default()).unwrap();

    assert!(derived.alive.is_empty(), "{name}: alive {:?}", derived.alive);
    assert_eq!(derived.matrix.killed_count(), expected_mutants);
    assert!(
        derived.tests.len() < expected_mutants,
        "{name}: suite of {} tests for {} mutants shows no reuse",
        derived.tests.len(),
        expected_mutants
    );
    for test in &derived.tests {
        assert!(passes(&machine, test), "{name}: {} fails on the reference", test.id);
        assert!(test.check().is_ok());
    }
    // Matrix shape and content match a direct re-execution.
    assert_eq!(derived.matrix.mutants.len(), expected_mutants);
    assert_eq!(derived.matrix.tests.len(), derived.tests.len());
    for (row, d) in derived.matrix.kills.iter().zip(&set.mutants) {
        let m = apply_descriptor(&machine, d).unwrap();
        for (hit, test) in row.iter().zip(&derived.tests) {
            assert_eq!(*hit, kills(&m, test), "{name}: {} vs {}", d.id, test.id);
        }
    }
}

#[test]
fn motion_sensor_suite_kills_all_attack_mutants() {
    assert_full_derivation("motion_sensor", 23);
}

#[test]
fn ultrasonic_suite_kills_all_attack_mutants() {
    assert_full_derivation("ultrasonic", 28);
}

#[test]
fn rfid_suite_kills_all_attack_mutants() {
    assert_full_derivation("rfid", 27);
}

#[test]
fn derivation_is_deterministic() {
    let (motion, profile) = bundled("motion_sensor");
    let set = gen_attacks(&motion, &profile, &AttackKind::ATTACKS).unwrap();
    let a = derive_suite(&motion, &set, &SearchConfig::default()).unwrap();
    let b = derive_suite(&motion, &set, &SearchConfig::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn oracle_agrees_on_bundled_mutants() {
    let (motion, profile) = bundled("motion_sensor");
    let config = SearchConfig {
        max_steps: 8,
        ..SearchConfig::default()
    };
    let set = gen_attacks(&motion, &profile, &AttackKind::ATTACKS).unwrap();
    for id in ["A1-S5", "A2-S10", "A3-t22", "A4-t8", "A5-t22", "inc-S7"] {
        let mutant = apply_descriptor(&motion, set.descriptor(id).unwrap()).unwrap();
        let bfs = distinguish(&motion, &mutant, "T", &config).unwrap().is_some();
        let oracle = oracle_distinguish(&motion, &mutant, &config).unwrap();
        assert_eq!(oracle, Some(bfs), "{id}");
        assert!(bfs, "{id} should be detectable within 8 actions");
    }

    let ghost = equivalent_mutant(&motion);
    assert_eq!(oracle_distinguish(&motion, &ghost, &config).unwrap(), Some(false));
}

#[test]
fn oracle_agrees_on_random_machine_pairs() {
    let config = SearchConfig {
        max_steps: 6,
        ..SearchConfig::default()
    };
    let mut distinguished = 0;
    let mut checked = 0;
    for seed in 0..30u64 {
        let machine = random_machine(seed);
        let set = match gen_traditional(&machine, 1, seed + 1000) {
            Ok(set) => set,
            Err(_) => continue, // machine too inert to mutate
        };
        let mutant = apply_descriptor(&machine, &set.mutants[0]).unwrap();
        let bfs = distinguish(&machine, &mutant, "T", &config).unwrap();
        let oracle = oracle_distinguish(&machine, &mutant, &config).unwrap();
        assert_eq!(
            oracle,
            Some(bfs.is_some()),
            "search and oracle disagree on seed {seed}"
        );
        if let Some(test) = bfs {
            assert!(passes(&machine, &test), "seed {seed}");
            assert!(kills(&mutant, &test), "seed {seed}");
            distinguished += 1;
        }
        checked += 1;
    }
    // The sample must exercise both answers to mean anything.
    assert!(checked >= 20, "only {checked} pairs checked");
    assert!(distinguished >= 5, "only {distinguished} pairs distinguished");
    assert!(distinguished < checked, "every pair distinguished; no equivalent coverage");
}
