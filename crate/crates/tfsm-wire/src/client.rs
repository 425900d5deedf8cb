//! The test-runner side of the wire: connect, bind a model, replay tests,
//! and record transcripts.

use std::io::{self, BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpStream, ToSocketAddrs};

use thiserror::Error;

use tfsm_attack::MutantDescriptor;
use tfsm_core::{Millis, Output, TestCase, TimedInput};
use tfsm_testgen::{compare_outputs, TestOutcome};

use crate::proto::{ClientMsg, ServerMsg};

#[derive(Debug, Error)]
pub enum WireError {
    #[error("transport: {0}")]
    Io(#[from] io::Error),
    #[error("protocol violation: {detail}")]
    Protocol { detail: String },
    #[error("server refused: {code} {detail}")]
    Refused { code: String, detail: String },
}

/// How one remote test run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Pass,
    Kill { divergence_index: usize },
    /// The run could not be completed: an unexpected `ERR`, a lost
    /// connection, or a malformed reply. Not a verdict about the device.
    Transport { detail: String },
}

/// One test executed against a remote device.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRow {
    pub test: String,
    pub outcome: RunOutcome,
    /// Outputs observed before the run ended, one per accepted input.
    pub observed: Vec<Output>,
}

impl RunRow {
    pub fn passed(&self) -> bool {
        self.outcome == RunOutcome::Pass
    }
}

/// A connected, bound session with a remote device.
pub struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    addr: SocketAddr,
    model: String,
    transcript: Option<Vec<String>>,
}

impl Client {
    /// Connect and bind to `model`. Fails if the server does not know it.
    pub fn connect(addr: impl ToSocketAddrs, model: &str) -> Result<Client, WireError> {
        let addr = addr
            .to_socket_addrs()?
            .next()
            .ok_or_else(|| WireError::Protocol {
                detail: "no address to connect to".into(),
            })?;
        let stream = TcpStream::connect(addr)?;
        // The protocol is one short line per round trip; without this,
        // Nagle + delayed ACK cost tens of milliseconds per exchange.
        stream.set_nodelay(true)?;
        let writer = stream.try_clone()?;
        let mut client = Client {
            reader: BufReader::new(stream),
            writer,
            addr,
            model: model.to_string(),
            transcript: None,
        };
        client.hello()?;
        Ok(client)
    }

    /// Start recording every line sent and received, `"> "`- and `"< "`-
    /// prefixed respectively. [`Client::take_transcript`] collects them.
    pub fn record_transcript(&mut self) {
        if self.transcript.is_none() {
            self.transcript = Some(Vec::new());
        }
    }

    pub fn take_transcript(&mut self) -> Vec<String> {
        self.transcript.take().unwrap_or_default()
    }

    fn hello(&mut self) -> Result<(), WireError> {
        let model = self.model.clone();
        match self.exchange(&ClientMsg::Hello { model })? {
            ServerMsg::Ok { id: Some(id) } if id == self.model => Ok(()),
            ServerMsg::Ok { id } => Err(WireError::Protocol {
                detail: format!("HELLO acknowledged with wrong id {id:?}"),
            }),
            other => Err(refused_or_protocol(other)),
        }
    }

    /// Drop the connection and establish a fresh one, rebinding the model.
    pub fn reconnect(&mut self) -> Result<(), WireError> {
        let stream = TcpStream::connect(self.addr)?;
        stream.set_nodelay(true)?;
        self.writer = stream.try_clone()?;
        self.reader = BufReader::new(stream);
        self.hello()
    }

    fn exchange(&mut self, msg: &ClientMsg) -> Result<ServerMsg, WireError> {
        let line = msg.render();
        if let Some(t) = &mut self.transcript {
            t.push(format!("> {line}"));
        }
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;

        let mut reply = String::new();
        let n = self.reader.read_line(&mut reply)?;
        if n == 0 {
            return Err(WireError::Protocol {
                detail: "connection closed mid-exchange".into(),
            });
        }
        let reply = reply.trim_end_matches(['\n', '\r']);
        if let Some(t) = &mut self.transcript {
            t.push(format!("< {reply}"));
        }
        ServerMsg::parse(reply).map_err(|detail| WireError::Protocol { detail })
    }

    /// Rewind the device to its initial configuration.
    pub fn reset(&mut self) -> Result<(), WireError> {
        match self.exchange(&ClientMsg::Reset)? {
            ServerMsg::Ok { .. } => Ok(()),
            other => Err(refused_or_protocol(other)),
        }
    }

    /// Feed one timed input; returns what the device answered.
    pub fn input(&mut self, input: &TimedInput) -> Result<(Output, Millis), WireError> {
        let at = input.at;
        match self.exchange(&ClientMsg::Input(input.clone()))? {
            ServerMsg::Output { symbol, at: t } if t == at => Ok((Output::Symbol(symbol), t)),
            ServerMsg::None { at: t } if t == at => Ok((Output::Epsilon, t)),
            ServerMsg::Output { at: t, .. } | ServerMsg::None { at: t } => {
                Err(WireError::Protocol {
                    detail: format!("reply stamped {t}ms for an input sent at {at}ms"),
                })
            }
            other => Err(refused_or_protocol(other)),
        }
    }

    /// Install a mutant (requires a server started with `allow_mutate`).
    /// The device resets as a side effect.
    pub fn mutate(&mut self, d: &MutantDescriptor) -> Result<(), WireError> {
        let want = d.id.clone();
        match self.exchange(&ClientMsg::Mutate(d.clone()))? {
            ServerMsg::Ok { id: Some(id) } if id == want => Ok(()),
            ServerMsg::Ok { id } => Err(WireError::Protocol {
                detail: format!("MUTATE acknowledged with wrong id {id:?}"),
            }),
            other => Err(refused_or_protocol(other)),
        }
    }

    /// Close the session politely.
    pub fn end(mut self) -> Result<(), WireError> {
        match self.exchange(&ClientMsg::End)? {
            ServerMsg::Ok { .. } => Ok(()),
            other => Err(refused_or_protocol(other)),
        }
    }

    /// Replay one test after a reset. The whole input sequence is always
    /// sent — divergence is judged afterwards from the full observation, so
    /// rows are comparable with in-process executions.
    pub fn run_test(&mut self, test: &TestCase) -> Result<RunRow, WireError> {
        if let Err(e) = self.reset() {
            return self.transport_row(test, Vec::new(), e);
        }
        let mut observed = Vec::with_capacity(test.steps.len());
        for step in &test.steps {
            match self.input(&step.input) {
                Ok((output, _)) => observed.push(output),
                Err(e) => return self.transport_row(test, observed, e),
            }
        }
        let expected: Vec<Output> = test.steps.iter().map(|s| s.expect.clone()).collect();
        let outcome = match compare_outputs(&expected, &observed) {
            TestOutcome::Pass => RunOutcome::Pass,
            TestOutcome::Kill { divergence_index } => RunOutcome::Kill { divergence_index },
        };
        Ok(RunRow {
            test: test.id.clone(),
            outcome,
            observed,
        })
    }

    /// Turn a mid-test failure into a `Transport` row and restore the
    /// session so the remaining tests can still run. Only a failed
    /// reconnect is a hard error.
    fn transport_row(
        &mut self,
        test: &TestCase,
        observed: Vec<Output>,
        e: WireError,
    ) -> Result<RunRow, WireError> {
        if matches!(e, WireError::Io(_) | WireError::Protocol { .. }) {
            self.reconnect()?;
        }
        Ok(RunRow {
            test: test.id.clone(),
            outcome: RunOutcome::Transport {
                detail: e.to_string(),
            },
            observed,
        })
    }

    /// Replay a whole suite in order, one row per test.
    pub fn run_suite(&mut self, tests: &[TestCase]) -> Result<Vec<RunRow>, WireError> {
        tests.iter().map(|t| self.run_test(t)).collect()
    }
}

fn refused_or_protocol(msg: ServerMsg) -> WireError {
    match msg {
        ServerMsg::Err { code, detail } => WireError::Refused { code, detail },
        other => WireError::Protocol {
            detail: format!("unexpected reply {:?}", other.render()),
        },
    }
}
