//! Mutant generation for timed machines: six security-attack generators
//! driven by a model's attack profile (battery drain, sleep deprivation,
//! data falsification, replay, man-in-the-middle, increased timeout) plus a
//! seeded traditional generator, and the descriptor machinery to turn any
//! of their edits back into runnable machines.

pub mod descriptor;
pub mod generate;

pub use descriptor::{
    apply_descriptor, AttackError, AttackKind, MutantDescriptor, MutantEdit, MutantSet,
};
pub use generate::{
    gen_attacks, gen_battery_drain, gen_data_falsification, gen_increased_timeout, gen_mitm,
    gen_replay, gen_sleep_deprivation, gen_traditional, Generated,
};
