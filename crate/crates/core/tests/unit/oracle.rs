use docfuzz_core::generation::*;
use docfuzz_core::orchestrator::oracle::*;
use docfuzz_core::orchestrator::*;

fn exc(t: &str, m: &str) -> Outcome {
    Outcome::Exception {
        type_name: t.into(),
        message: m.into(),
    }
}

fn sig(o: Outcome) -> String {
    dedup_signature(&ExecutionResult {
        case_index: 0,
        outcome: o,
    })
}

#[test]
fn pointer_addresses_collide() {
    assert_eq!(
        sig(exc("error", "bad ptr at 0x7ffd1234abcd in frame 12")),
        sig(exc("error", "bad ptr at 0x55aa00ff in frame 3"))
    );
    assert_eq!(sig(exc("error", "line one\nline two")), "error: line one");
}

#[test]
fn exit_codes_differ() {
    let a = sig(Outcome::WorkerDeath {
        exit_code: Some(-6),
        signal: None,
    });
    let b = sig(Outcome::WorkerDeath {
        exit_code: Some(-11),
        signal: None,
    });
    assert_ne!(a, b);
    assert_eq!(a, "exit:-6|signal:-");
}

#[test]
fn adversarial_exceptions() {
    let allow = vec!["TypeError".to_string()];
    let adv = ValidityMode::Adversarial;
    assert_eq!(
        classify_outcome(&exc("TypeError", "assert"), adv, &allow),
        Verdict::Pass
    );
    assert_eq!(
        classify_outcome(&exc("error", "bad argument"), adv, &allow),
        Verdict::Pass
    );
    assert_eq!(
        classify_outcome(&exc("RuntimeError", "INTERNAL_ASSERT_FAILED at x.cpp:12"), adv, &allow),
        Verdict::ExceptionBug
    );
    assert_eq!(
        classify_outcome(&exc("error", "bad argument"), ValidityMode::ValidOnly, &allow),
        Verdict::ExceptionBug
    );
}
