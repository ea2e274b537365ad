use docfuzz_core::value::*;

#[test]
fn ndarray_json_is_bit_exact() {
    let arr = NdArray::from_f64(ScalarType::Float32, vec![2, 2], &[0.1, -2.5, f64::NAN, 1e30]).unwrap();
    let v = EncodedValue::NdArray(arr.clone());
    let json = serde_json::to_string(&v).unwrap();
    assert!(json.contains(r#""kind":"ndarray""#));
    assert!(json.contains(r#""dtype":"float32""#));
    let back: EncodedValue = serde_json::from_str(&json).unwrap();
    assert_eq!(back.as_array().unwrap().data(), arr.data());
}

#[test]
fn non_finite_floats_survive() {
    for v in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY, -0.0, 1.0 / 3.0] {
        let json = serde_json::to_string(&EncodedValue::Float(v)).unwrap();
        let back: EncodedValue = serde_json::from_str(&json).unwrap();
        assert_eq!(back, EncodedValue::Float(v), "{json}");
    }
}

#[test]
fn payload_length_is_checked() {
    let bad = r#"{"kind":"ndarray","dtype":"int32","shape":[3],"data":"AAAA"}"#;
    let err = serde_json::from_str::<EncodedValue>(bad).unwrap_err();
    assert!(err.to_string().contains("needs 12"), "{err}");
    let bad = r#"{"kind":"ndarray","dtype":"string","shape":[0],"data":""}"#;
    assert!(serde_json::from_str::<EncodedValue>(bad).is_err());
}

#[test]
fn unknown_fields_rejected() {
    assert!(serde_json::from_str::<EncodedValue>(r#"{"kind":"int","value":1,"x":2}"#).is_err());
}

#[test]
fn integer_conversion_saturates() {
    let a = NdArray::from_f64(ScalarType::Uint8, vec![4], &[-3.0, 3.6, 300.0, f64::NAN]).unwrap();
    assert_eq!(a.data(), &[0, 4, 255, 0]);
}
