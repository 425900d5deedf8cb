//! The line protocol. One UTF-8 line per message, LF-terminated.
//!
//! Client to server:
//!
//! ```text
//! HELLO <model-id>
//! RESET
//! INPUT <symbol> AT <ms>
//! INPUT <symbol> <param> AT <ms>
//! MUTATE <descriptor-json>
//! END
//! ```
//!
//! Server to client:
//!
//! ```text
//! OK
//! OK <id>
//! OUTPUT <symbol> AT <ms>
//! NONE AT <ms>
//! ERR <code> <detail>
//! ```
//!
//! Integer parameters are bare decimals; string parameters are double-quoted
//! with `\"` and `\\` as the only escapes. `NONE` is a silent answer — the
//! input was accepted but produced no output. `ERR` never advances the
//! session: configuration and time stay exactly as they were.

use tfsm_attack::MutantDescriptor;
use tfsm_core::{Millis, TimedInput, Value};

/// A message from the test runner to the emulated device.
#[derive(Clone, Debug, PartialEq)]
pub enum ClientMsg {
    Hello { model: String },
    Reset,
    Input(TimedInput),
    Mutate(MutantDescriptor),
    End,
}

/// A reply from the emulated device.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ServerMsg {
    Ok { id: Option<String> },
    Output { symbol: String, at: Millis },
    None { at: Millis },
    Err { code: String, detail: String },
}

/// Quote a string parameter for the wire.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Parse a quoted string starting at `text[0] == '"'`. Returns the value and
/// the rest after the closing quote.
fn unquote(text: &str) -> Result<(String, &str), String> {
    let mut out = String::new();
    let mut chars = text.char_indices();
    match chars.next() {
        Some((_, '"')) => {}
        _ => return Err("expected opening quote".into()),
    }
    let mut escaped = false;
    for (ix, c) in chars {
        if escaped {
            match c {
                '"' | '\\' => out.push(c),
                other => return Err(format!("unsupported escape \\{other}")),
            }
            escaped = false;
        } else {
            match c {
                '\\' => escaped = true,
                '"' => return Ok((out, &text[ix + 1..])),
                c => out.push(c),
            }
        }
    }
    Err("unterminated string".into())
}

impl ClientMsg {
    pub fn render(&self) -> String {
        match self {
            ClientMsg::Hello { model } => format!("HELLO {model}"),
            ClientMsg::Reset => "RESET".to_string(),
            ClientMsg::Input(i) => match &i.param {
                None => format!("INPUT {} AT {}", i.symbol, i.at),
                Some(Value::Int(v)) => format!("INPUT {} {} AT {}", i.symbol, v, i.at),
                Some(Value::Str(s)) => format!("INPUT {} {} AT {}", i.symbol, quote(s), i.at),
            },
            ClientMsg::Mutate(d) => format!(
                "MUTATE {}",
                serde_json::to_string(d).expect("descriptors serialize infallibly")
            ),
            ClientMsg::End => "END".to_string(),
        }
    }

    pub fn parse(line: &str) -> Result<ClientMsg, String> {
        let line = line.trim_end_matches('\r');
        let (verb, rest) = match line.split_once(' ') {
            Some((v, r)) => (v, r),
            None => (line, ""),
        };
        match verb {
            "HELLO" => {
                if rest.is_empty() || rest.contains(' ') {
                    return Err("HELLO takes exactly one model id".into());
                }
                Ok(ClientMsg::Hello {
                    model: rest.to_string(),
                })
            }
            "RESET" if rest.is_empty() => Ok(ClientMsg::Reset),
            "END" if rest.is_empty() => Ok(ClientMsg::End),
            "MUTATE" => {
                let d: MutantDescriptor = serde_json::from_str(rest)
                    .map_err(|e| format!("bad descriptor json: {e}"))?;
                Ok(ClientMsg::Mutate(d))
            }
            "INPUT" => {
                let (symbol, rest) = rest
                    .split_once(' ')
                    .ok_or_else(|| "INPUT needs a symbol and a timestamp".to_string())?;
                if symbol.is_empty() {
                    return Err("empty input symbol".into());
                }
                let (param, rest) = if let Some(tail) = rest.strip_prefix('"') {
                    // Re-attach the quote for the unquoter.
                    let full = &rest[..tail.len() + 1];
                    let (s, after) = unquote(full)?;
                    (Some(Value::Str(s)), after.trim_start())
                } else if rest.starts_with("AT ") {
                    (None, rest)
                } else {
                    let (tok, after) = rest
                        .split_once(' ')
                        .ok_or_else(|| "INPUT needs a timestamp".to_string())?;
                    let v: i64 = tok
                        .parse()
                        .map_err(|_| format!("bad integer parameter {tok:?}"))?;
                    (Some(Value::Int(v)), after)
                };
                let at = rest
                    .strip_prefix("AT ")
                    .ok_or_else(|| "expected AT <ms>".to_string())?;
                let at: Millis = at
                    .parse()
                    .map_err(|_| format!("bad timestamp {at:?}"))?;
                Ok(ClientMsg::Input(TimedInput {
                    symbol: symbol.to_string(),
                    param,
                    at,
                }))
            }
            other => Err(format!("unknown verb {other:?}")),
        }
    }
}

impl ServerMsg {
    pub fn render(&self) -> String {
        match self {
            ServerMsg::Ok { id: None } => "OK".to_string(),
            ServerMsg::Ok { id: Some(id) } => format!("OK {id}"),
            ServerMsg::Output { symbol, at } => format!("OUTPUT {symbol} AT {at}"),
            ServerMsg::None { at } => format!("NONE AT {at}"),
            ServerMsg::Err { code, detail } => format!("ERR {code} {detail}"),
        }
    }

    pub fn parse(line: &str) -> Result<ServerMsg, String> {
        let line = line.trim_end_matches('\r');
        let (verb, rest) = match line.split_once(' ') {
            Some((v, r)) => (v, r),
            None => (line, ""),
        };
        match verb {
            "OK" => Ok(ServerMsg::Ok {
                id: (!rest.is_empty()).then(|| rest.to_string()),
            }),
            "OUTPUT" => {
                let (symbol, rest) = rest
                    .split_once(" AT ")
                    .ok_or_else(|| "OUTPUT needs AT <ms>".to_string())?;
                Ok(ServerMsg::Output {
                    symbol: symbol.to_string(),
                    at: rest.parse().map_err(|_| format!("bad timestamp {rest:?}"))?,
                })
            }
            "NONE" => {
                let at = rest
                    .strip_prefix("AT ")
                    .ok_or_else(|| "NONE needs AT <ms>".to_string())?;
                Ok(ServerMsg::None {
                    at: at.parse().map_err(|_| format!("bad timestamp {at:?}"))?,
                })
            }
            "ERR" => {
                let (code, detail) = rest.split_once(' ').unwrap_or((rest, ""));
                if code.is_empty() {
                    return Err("ERR needs a code".into());
                }
                Ok(ServerMsg::Err {
                    code: code.to_string(),
                    detail: detail.to_string(),
                })
            }
            other => Err(format!("unknown verb {other:?}")),
        }
    }
}
