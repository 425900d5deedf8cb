//! Execution semantics.
//!
//! A configuration tracks the control state, the variable environment, the
//! state-local clock (ms since the last transition or timeout firing) and the
//! absolute run time. Three rules do all the work:
//!
//! * advancing time fires every timeout whose deadline falls inside the
//!   window, in order, resetting the clock at each firing;
//! * an input stamped exactly at a timeout deadline is processed *after* the
//!   firing, at local time 0 of the successor state;
//! * an input with no enabled transition at the current state is ignored:
//!   the answer is ε and state, variables and clock are all untouched.
//!
//! Timeout firings are externally unobservable (they emit nothing), but runs
//! record them so traces can be inspected and replayed exactly.

use std::fmt;

use thiserror::Error;

use crate::expr::{Env, EvalError, Value, VarKind};
use crate::machine::{Output, TimedStateMachine};
use crate::time::{Millis, TimeoutRule};

/// A snapshot of a run: control state, variables, state-local clock, and the
/// absolute time the snapshot was taken at. `clock <= now` always; `clock`
/// stays below the state's timeout while the machine is quiescent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub state: String,
    pub env: Env,
    pub clock: Millis,
    pub now: Millis,
}

impl Configuration {
    /// A configuration at an arbitrary state with the machine's initial
    /// variable values. Useful for probing behavior from mid-run states.
    pub fn at(m: &TimedStateMachine, state: impl Into<String>) -> Configuration {
        Configuration {
            state: state.into(),
            env: m.initial_env(),
            clock: 0,
            now: 0,
        }
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.state)?;
        for (name, value) in &self.env {
            write!(f, ", {name}={value}")?;
        }
        write!(f, ", clock={}ms)", self.clock)
    }
}

/// An input with its absolute timestamp.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimedInput {
    pub symbol: String,
    pub param: Option<Value>,
    pub at: Millis,
}

impl TimedInput {
    pub fn plain(symbol: impl Into<String>, at: Millis) -> Self {
        TimedInput {
            symbol: symbol.into(),
            param: None,
            at,
        }
    }

    pub fn with_param(symbol: impl Into<String>, param: Value, at: Millis) -> Self {
        TimedInput {
            symbol: symbol.into(),
            param: Some(param),
            at,
        }
    }
}

impl fmt::Display for TimedInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            None => write!(f, "{}@{}ms", self.symbol, self.at),
            Some(p) => write!(f, "{}({})@{}ms", self.symbol, p, self.at),
        }
    }
}

/// One timeout firing: the state whose clock expired, where it moved, when.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimeoutFiring {
    pub from: String,
    pub to: String,
    pub at: Millis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    /// An unobservable timeout firing, kept for inspection.
    Timeout(TimeoutFiring),
    /// An input and the answer it drew (ε for ignored inputs).
    Io { input: TimedInput, output: Output },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Timeout(t) => {
                write!(f, "({} -timeout@{}ms-> {})", t.from, t.at, t.to)
            }
            TraceEvent::Io { input, output } => write!(f, "({input} / {output})"),
        }
    }
}

/// A completed run: the ordered events and the configuration it ended in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TimedTrace {
    pub events: Vec<TraceEvent>,
    pub end: Configuration,
}

impl TimedTrace {
    /// The observable projection: one output per input, in order.
    pub fn outputs(&self) -> Vec<Output> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Io { output, .. } => Some(output.clone()),
                TraceEvent::Timeout(_) => None,
            })
            .collect()
    }
}

impl fmt::Display for TimedTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.events.iter().map(|e| e.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("cannot advance to {at}ms: the run is already at {now}ms")]
    TimeTravel { at: Millis, now: Millis },
    #[error("input timestamps must be strictly increasing: {at}ms follows {prev}ms")]
    NotIncreasing { prev: Millis, at: Millis },
    #[error("input {symbol:?} is not in the machine's alphabet")]
    UnknownInput { symbol: String },
    #[error("input {symbol:?} expects {expected}, got {got}")]
    ParamMismatch {
        symbol: String,
        expected: String,
        got: String,
    },
    #[error("nondeterministic model: state {state:?}, input {symbol:?} enables {ids:?}")]
    Nondeterministic {
        state: String,
        symbol: String,
        ids: Vec<String>,
    },
    #[error("configuration references unknown state {0:?}")]
    UnknownState(String),
    #[error("evaluation failed in transition {transition}: {source}")]
    Eval {
        transition: String,
        source: EvalError,
    },
}

impl TimedStateMachine {
    pub fn initial_env(&self) -> Env {
        self.variables
            .iter()
            .map(|v| (v.name.clone(), v.init.clone()))
            .collect()
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration {
            state: self.initial.clone(),
            env: self.initial_env(),
            clock: 0,
            now: 0,
        }
    }

    /// Let time pass until the absolute instant `until`, firing every timeout
    /// due on the way (a deadline exactly at `until` fires). Returns the new
    /// configuration and the firings in order.
    pub fn advance(
        &self,
        c: &Configuration,
        until: Millis,
    ) -> Result<(Configuration, Vec<TimeoutFiring>), StepError> {
        if until < c.now {
            return Err(StepError::TimeTravel { at: until, now: c.now });
        }
        let mut c = c.clone();
        let mut fired = Vec::new();
        loop {
            let entry = self
                .timeout(&c.state)
                .ok_or_else(|| StepError::UnknownState(c.state.clone()))?;
            match &entry.rule {
                TimeoutRule::Never => break,
                TimeoutRule::Move { after, to } => {
                    // The clock reached `after` at this absolute instant.
                    let deadline = c.now - c.clock + after;
                    if deadline > until {
                        break;
                    }
                    fired.push(TimeoutFiring {
                        from: c.state.clone(),
                        to: to.clone(),
                        at: deadline,
                    });
                    c.state = to.clone();
                    c.clock = 0;
                    c.now = deadline;
                }
            }
        }
        c.clock += until - c.now;
        c.now = until;
        Ok((c, fired))
    }

    /// Process one timed input: advance to its timestamp (timeouts due at
    /// exactly that instant fire first), then take the single enabled
    /// transition, or ignore the input with ε if there is none.
    pub fn step_input(
        &self,
        c: &Configuration,
        input: &TimedInput,
    ) -> Result<(Configuration, Output, Vec<TimeoutFiring>), StepError> {
        let decl = self
            .input(&input.symbol)
            .ok_or_else(|| StepError::UnknownInput {
                symbol: input.symbol.clone(),
            })?;
        let got = input.param.as_ref().map(Value::kind);
        if decl.param != got {
            return Err(StepError::ParamMismatch {
                symbol: input.symbol.clone(),
                expected: describe_param(decl.param),
                got: describe_param(got),
            });
        }
        if input.at < c.now {
            return Err(StepError::TimeTravel {
                at: input.at,
                now: c.now,
            });
        }

        let (c, fired) = self.advance(c, input.at)?;

        let mut enabled = Vec::new();
        for t in self.transitions_from(&c.state, &input.symbol) {
            let open = match &t.guard {
                None => true,
                Some(g) => g
                    .eval(&c.env, input.param.as_ref())
                    .map_err(|source| StepError::Eval {
                        transition: t.id.clone(),
                        source,
                    })?,
            };
            if open {
                enabled.push(t);
            }
        }

        match enabled.as_slice() {
            [] => Ok((c, Output::Epsilon, fired)),
            [t] => {
                let env = match &t.update {
                    None => c.env.clone(),
                    Some(u) => {
                        u.apply(&c.env, input.param.as_ref())
                            .map_err(|source| StepError::Eval {
                                transition: t.id.clone(),
                                source,
                            })?
                    }
                };
                let next = Configuration {
                    state: t.to.clone(),
                    env,
                    clock: 0,
                    now: input.at,
                };
                Ok((next, t.output.clone(), fired))
            }
            many => Err(StepError::Nondeterministic {
                state: c.state.clone(),
                symbol: input.symbol.clone(),
                ids: many.iter().map(|t| t.id.clone()).collect(),
            }),
        }
    }

    /// Run an input sequence from the initial configuration. Timestamps must
    /// be strictly increasing.
    pub fn run(&self, seq: &[TimedInput]) -> Result<TimedTrace, StepError> {
        self.run_from(self.initial_config(), seq)
    }

    /// Run an input sequence, then keep observing (firing timeouts) until the
    /// absolute instant `until`.
    pub fn run_observed(&self, seq: &[TimedInput], until: Millis) -> Result<TimedTrace, StepError> {
        let mut trace = self.run(seq)?;
        let (end, fired) = self.advance(&trace.end, until)?;
        trace.events.extend(fired.into_iter().map(TraceEvent::Timeout));
        trace.end = end;
        Ok(trace)
    }

    /// `run`, but from an arbitrary starting configuration.
    pub fn run_from(
        &self,
        start: Configuration,
        seq: &[TimedInput],
    ) -> Result<TimedTrace, StepError> {
        let mut c = start;
        let mut events = Vec::new();
        let mut prev: Option<Millis> = None;
        for input in seq {
            if let Some(p) = prev {
                if input.at <= p {
                    return Err(StepError::NotIncreasing {
                        prev: p,
                        at: input.at,
                    });
                }
            }
            prev = Some(input.at);
            let (next, output, fired) = self.step_input(&c, input)?;
            events.extend(fired.into_iter().map(TraceEvent::Timeout));
            events.push(TraceEvent::Io {
                input: input.clone(),
                output,
            });
            c = next;
        }
        Ok(TimedTrace { events, end: c })
    }
}

fn describe_param(k: Option<VarKind>) -> String {
    match k {
        None => "no parameter".to_string(),
        Some(k) => format!("a {k} parameter"),
    }
}
