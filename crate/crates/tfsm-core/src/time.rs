//! Virtual time. All machine semantics run on integer milliseconds so that
//! every run is exactly reproducible; nothing in this workspace reads a wall
//! clock to decide machine behavior.

use std::fmt;

/// Virtual time in milliseconds. Used both for absolute run time (as stamped
/// on inputs) and for state-local time (milliseconds since the clock reset).
pub type Millis = u64;

/// What a state does when its clock runs out.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TimeoutRule {
    /// No timeout: the state dwells forever unless an input moves it.
    Never,
    /// After `after` ms of local time, move to `to` and reset the clock.
    /// `after` must be positive; a zero timeout would fire forever.
    Move { after: Millis, to: String },
}

impl TimeoutRule {
    pub fn after(&self) -> Option<Millis> {
        match self {
            TimeoutRule::Never => None,
            TimeoutRule::Move { after, .. } => Some(*after),
        }
    }
}

impl fmt::Display for TimeoutRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeoutRule::Never => write!(f, "never"),
            TimeoutRule::Move { after, to } => write!(f, "{after}ms -> {to}"),
        }
    }
}
