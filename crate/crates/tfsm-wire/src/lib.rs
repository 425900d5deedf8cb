//! Remote execution for timed-FSM test suites: a TCP device emulator, a
//! test-runner client, and fault-injection fingerprinting on top of both.
//!
//! The protocol is plain UTF-8 lines (see [`proto`]), so a session is easy
//! to drive by hand:
//!
//! ```text
//! > HELLO motion_sensor
//! < OK motion_sensor
//! > INPUT i1 AT 2500
//! < OUTPUT o1 AT 2500
//! > END
//! < OK
//! ```
//!
//! [`serve`] hosts models in-process on a real socket (handy for tests and
//! for emulating a device fleet), [`Client`] replays [`TestCase`]s against
//! any conforming endpoint, and [`fingerprint`] runs the two-phase
//! replacement check described in [`fingerprint()`]'s module docs.
//!
//! [`TestCase`]: tfsm_core::TestCase

pub mod client;
pub mod fingerprint;
pub mod proto;
pub mod server;

pub use client::{Client, RunOutcome, RunRow, WireError};
pub use fingerprint::{
    fingerprint, FingerprintError, FingerprintReport, FingerprintRow, Observation,
};
pub use proto::{ClientMsg, ServerMsg};
pub use server::{serve, ServeOptions, ServerHandle};
