//! Worker wire protocol, version 1: newline-delimited JSON over the worker's
//! stdin/stdout.

use serde::{Deserialize, Serialize};

use crate::generation::TestCase;
use crate::value::EncodedValue;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Request {
    pub id: u64,
    pub op: String,
    pub api: String,
    /// Positional arguments in declaration order.
    pub args: Vec<EncodedValue>,
    pub timeout_ms: u64,
}

impl Request {
    pub fn call(id: u64, case: &TestCase, timeout_ms: u64) -> Self {
        Request {
            id,
            op: "call".into(),
            api: case.api_name.clone(),
            args: case.args.values().cloned().collect(),
            timeout_ms,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Exception,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionInfo {
    #[serde(rename = "type")]
    pub type_name: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Response {
    pub id: u64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<EncodedValue>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nan_detected: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exception: Option<ExceptionInfo>,
    pub duration_ms: u64,
}

impl Response {
    pub fn ok(id: u64, outputs: Vec<EncodedValue>, nan_detected: bool, duration_ms: u64) -> Self {
        Response {
            id,
            status: Status::Ok,
            outputs: Some(outputs),
            nan_detected: Some(nan_detected),
            exception: None,
            duration_ms,
        }
    }

    pub fn exception(id: u64, type_name: &str, message: &str, duration_ms: u64) -> Self {
        Response {
            id,
            status: Status::Exception,
            outputs: None,
            nan_detected: None,
            exception: Some(ExceptionInfo {
                type_name: type_name.into(),
                message: message.into(),
            }),
            duration_ms,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Handshake {
    pub op: String,
    pub protocol: u32,
    pub target: String,
}

impl Handshake {
    pub fn ready(target: &str) -> Self {
        Handshake {
            op: "ready".into(),
            protocol: PROTOCOL_VERSION,
            target: target.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("malformed worker message: {0}")]
    Malformed(String),
    #[error("response id {got} does not match request id {expected}")]
    IdMismatch { expected: u64, got: u64 },
    #[error("status `{0}` is missing its payload")]
    MissingPayload(&'static str),
    #[error("unexpected handshake: {0}")]
    BadHandshake(String),
}

/// Serializes one message as a protocol line (with trailing newline).
pub fn to_line<T: Serialize>(msg: &T) -> String {
    let mut s = serde_json::to_string(msg).expect("protocol messages always serialize");
    s.push('\n');
    s
}

pub fn parse_request(line: &str) -> Result<Request, ProtocolError> {
    let req: Request = serde_json::from_str(line.trim_end()).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    if req.op != "call" {
        return Err(ProtocolError::Malformed(format!("unknown op `{}`", req.op)));
    }
    Ok(req)
}

pub fn parse_response(line: &str, expected_id: u64) -> Result<Response, ProtocolError> {
    let resp: Response = serde_json::from_str(line.trim_end()).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
    if resp.id != expected_id {
        return Err(ProtocolError::IdMismatch {
            expected: expected_id,
            got: resp.id,
        });
    }
    match resp.status {
        Status::Ok if resp.outputs.is_none() => Err(ProtocolError::MissingPayload("ok")),
        Status::Exception if resp.exception.is_none() => Err(ProtocolError::MissingPayload("exception")),
        _ => Ok(resp),
    }
}

pub fn parse_handshake(line: &str) -> Result<Handshake, ProtocolError> {
    let h: Handshake = serde_json::from_str(line.trim_end()).map_err(|e| ProtocolError::BadHandshake(e.to_string()))?;
    if h.op != "ready" || h.protocol != PROTOCOL_VERSION {
        return Err(ProtocolError::BadHandshake(line.trim_end().to_string()));
    }
    Ok(h)
}
