use docfuzz_core::orchestrator::wire::*;
use docfuzz_core::EncodedValue;

#[test]
fn response_wire_shape() {
    let ok = Response::ok(3, vec![EncodedValue::Int(1)], false, 2);
    assert_eq!(
        serde_json::to_value(&ok).unwrap(),
        serde_json::json!({"id":3,"status":"ok","outputs":[{"kind":"int","value":1}],"nan_detected":false,"duration_ms":2})
    );
    let ex = Response::exception(4, "error", "boom", 0);
    assert_eq!(
        serde_json::to_value(&ex).unwrap(),
        serde_json::json!({"id":4,"status":"exception","exception":{"type":"error","message":"boom"},"duration_ms":0})
    );
}

#[test]
fn rejects_mismatched_ids_and_missing_payloads() {
    assert!(matches!(
        parse_response(r#"{"id":2,"status":"ok","outputs":[],"duration_ms":0}"#, 1),
        Err(ProtocolError::IdMismatch { expected: 1, got: 2 })
    ));
    assert!(matches!(
        parse_response(r#"{"id":1,"status":"exception","duration_ms":0}"#, 1),
        Err(ProtocolError::MissingPayload("exception"))
    ));
    assert!(parse_response("not json", 1).is_err());
}

#[test]
fn handshake() {
    let line = to_line(&Handshake::ready("mock"));
    assert_eq!(line, "{\"op\":\"ready\",\"protocol\":1,\"target\":\"mock\"}\n");
    assert_eq!(parse_handshake(&line).unwrap().target, "mock");
    assert!(parse_handshake(r#"{"op":"ready","protocol":2,"target":"x"}"#).is_err());
}
