//! A TCP device emulator. Each connection is an independent session speaking
//! the line protocol from [`crate::proto`].
//!
//! Session rules:
//!
//! * The first message must be `HELLO <model-id>`; everything else earns
//!   `ERR no-hello`. A second `HELLO` earns `ERR unexpected-hello`.
//! * `RESET` rewinds the configuration and the time base but keeps the
//!   currently installed machine (mutated or not).
//! * `MUTATE` applies a descriptor to the *base* model — descriptors never
//!   stack — and then resets. It is refused with `ERR mutate-forbidden`
//!   unless the server was started with [`ServeOptions::allow_mutate`].
//! * An `ERR` reply never advances the session: configuration and time stay
//!   exactly as they were before the offending message.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, ErrorKind, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use tfsm_attack::apply_descriptor;
use tfsm_core::{Configuration, Millis, Output, StepError, TimedStateMachine};

use crate::proto::{ClientMsg, ServerMsg};

/// How the emulator should behave.
#[derive(Clone, Copy, Debug, Default)]
pub struct ServeOptions {
    /// Whether `MUTATE` is honoured. Off by default: a production device has
    /// no business accepting fault injections from the network.
    pub allow_mutate: bool,
}

/// A running emulator. Dropping the handle stops it.
pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    accept_thread: Option<JoinHandle<()>>,
}

impl ServerHandle {
    /// The address the emulator is listening on.
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stop accepting connections and wind down live sessions.
    pub fn stop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        if let Some(h) = self.accept_thread.take() {
            let _ = h.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Start serving the given models. Bind to port 0 to let the OS pick.
pub fn serve(
    addr: impl ToSocketAddrs,
    models: Vec<TimedStateMachine>,
    options: ServeOptions,
) -> io::Result<ServerHandle> {
    let listener = TcpListener::bind(addr)?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let catalog: Arc<BTreeMap<String, Arc<TimedStateMachine>>> = Arc::new(
        models
            .into_iter()
            .map(|m| (m.id.clone(), Arc::new(m)))
            .collect(),
    );
    let stop = Arc::new(AtomicBool::new(false));
    let stop_accept = Arc::clone(&stop);
    let accept_thread = thread::spawn(move || {
        let mut sessions: Vec<JoinHandle<()>> = Vec::new();
        loop {
            if stop_accept.load(Ordering::SeqCst) {
                break;
            }
            match listener.accept() {
                Ok((stream, _)) => {
                    let catalog = Arc::clone(&catalog);
                    let stop = Arc::clone(&stop_accept);
                    sessions.push(thread::spawn(move || {
                        let _ = session(stream, &catalog, options, &stop);
                    }));
                }
                Err(e) if e.kind() == ErrorKind::WouldBlock => {
                    thread::sleep(Duration::from_millis(5));
                }
                Err(_) => thread::sleep(Duration::from_millis(5)),
            }
        }
        for s in sessions {
            let _ = s.join();
        }
    });
    Ok(ServerHandle {
        addr,
        stop,
        accept_thread: Some(accept_thread),
    })
}

/// One bound device session.
struct Session {
    base: Arc<TimedStateMachine>,
    machine: Arc<TimedStateMachine>,
    config: Configuration,
    last_at: Option<Millis>,
}

impl Session {
    fn new(base: Arc<TimedStateMachine>) -> Self {
        let config = base.initial_config();
        Session {
            machine: Arc::clone(&base),
            base,
            config,
            last_at: None,
        }
    }

    fn reset(&mut self) {
        self.config = self.machine.initial_config();
        self.last_at = None;
    }
}

fn err(code: &str, detail: impl Into<String>) -> ServerMsg {
    ServerMsg::Err {
        code: code.to_string(),
        detail: detail.into(),
    }
}

fn step_error(e: StepError) -> ServerMsg {
    let code = match &e {
        StepError::UnknownInput { .. } => "unknown-input",
        StepError::ParamMismatch { .. } => "param-mismatch",
        StepError::NotIncreasing { .. } | StepError::TimeTravel { .. } => "not-increasing",
        StepError::Nondeterministic { .. } => "nondeterministic",
        StepError::Eval { .. } | StepError::UnknownState(_) => "eval",
    };
    // Keep the reply on one line.
    err(code, e.to_string().replace('\n', " "))
}

fn session(
    stream: TcpStream,
    catalog: &BTreeMap<String, Arc<TimedStateMachine>>,
    options: ServeOptions,
    stop: &AtomicBool,
) -> io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_millis(50)))?;
    stream.set_nodelay(true)?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let mut line = String::new();
    let mut state: Option<Session> = None;

    loop {
        match reader.read_line(&mut line) {
            Ok(0) => return Ok(()),
            Ok(_) if line.ends_with('\n') => {}
            Ok(_) => continue, // mid-line EOF coming; next read settles it
            Err(e) if e.kind() == ErrorKind::WouldBlock || e.kind() == ErrorKind::TimedOut => {
                if stop.load(Ordering::SeqCst) {
                    return Ok(());
                }
                continue;
            }
            Err(e) if e.kind() == ErrorKind::Interrupted => continue,
            Err(e) => return Err(e),
        }
        let text = line.trim_end_matches(['\n', '\r']).to_string();
        line.clear();

        let msg = match ClientMsg::parse(&text) {
            Ok(m) => m,
            Err(detail) => {
                reply(&mut writer, &err("bad-request", detail))?;
                continue;
            }
        };

        let answer = match (&mut state, msg) {
            (_, ClientMsg::End) => {
                reply(&mut writer, &ServerMsg::Ok { id: None })?;
                return Ok(());
            }
            (None, ClientMsg::Hello { model }) => match catalog.get(&model) {
                Some(base) => {
                    state = Some(Session::new(Arc::clone(base)));
                    ServerMsg::Ok { id: Some(model) }
                }
                None => err("unknown-model", format!("no model named {model:?}")),
            },
            (None, _) => err("no-hello", "say HELLO <model-id> first"),
            (Some(_), ClientMsg::Hello { .. }) => {
                err("unexpected-hello", "this session is already bound")
            }
            (Some(s), ClientMsg::Reset) => {
                s.reset();
                ServerMsg::Ok { id: None }
            }
            (Some(s), ClientMsg::Input(input)) => {
                if let Some(prev) = s.last_at {
                    if input.at <= prev {
                        reply(
                            &mut writer,
                            &err(
                                "not-increasing",
                                format!(
                                    "input timestamps must be strictly increasing: \
                                     {}ms follows {}ms",
                                    input.at, prev
                                ),
                            ),
                        )?;
                        continue;
                    }
                }
                match s.machine.step_input(&s.config, &input) {
                    Ok((next, output, _fired)) => {
                        s.config = next;
                        s.last_at = Some(input.at);
                        match output {
                            Output::Symbol(symbol) => ServerMsg::Output {
                                symbol,
                                at: input.at,
                            },
                            Output::Epsilon => ServerMsg::None { at: input.at },
                        }
                    }
                    Err(e) => step_error(e),
                }
            }
            (Some(s), ClientMsg::Mutate(d)) => {
                if !options.allow_mutate {
                    err("mutate-forbidden", "server started without --allow-mutate")
                } else {
                    match apply_descriptor(&s.base, &d) {
                        Ok(m) => {
                            s.machine = Arc::new(m);
                            s.reset();
                            ServerMsg::Ok { id: Some(d.id) }
                        }
                        Err(e) => err("bad-mutant", e.to_string().replace('\n', " ")),
                    }
                }
            }
        };
        reply(&mut writer, &answer)?;
    }
}

fn reply(writer: &mut TcpStream, msg: &ServerMsg) -> io::Result<()> {
    writer.write_all(msg.render().as_bytes())?;
    writer.write_all(b"\n")?;
    writer.flush()
}
