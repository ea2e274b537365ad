use docfuzz_core::orchestrator::*;

#[test]
fn target_round_trip() {
    for s in ["mock", "module:cv2", "module:a.b"] {
        assert_eq!(s.parse::<Target>().unwrap().to_string(), s);
    }
    for s in ["", "module:", "cv2", "module:1x"] {
        assert!(s.parse::<Target>().is_err(), "{s}");
    }
}

#[test]
fn outcome_wire_shape() {
    let o = Outcome::WorkerDeath {
        exit_code: None,
        signal: Some(6),
    };
    assert_eq!(
        serde_json::to_value(&o).unwrap(),
        serde_json::json!({"kind":"worker_death","exit_code":null,"signal":6})
    );
}
