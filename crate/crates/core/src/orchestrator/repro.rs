//! Standalone Python reproducer scripts.
//!
//! A script embeds the bug's wire request. By default it starts a worker
//! (`$DOCFUZZ_WORKER`, else `docfuzz-worker`) for the campaign's target and
//! sends the request; with `--direct` it decodes the arguments with numpy
//! and calls the target module in-process. Either way it prints one JSON
//! line with the observed outcome class and exits 0 when that class matches
//! the recorded verdict.

use super::campaign::BugReport;
use super::oracle::Verdict;
use super::wire::Request;
use super::Target;

fn py_str(s: &str) -> String {
    // a JSON string literal is also a valid Python string literal
    serde_json::to_string(s).expect("strings serialize")
}

fn expected_class(v: Verdict) -> &'static str {
    match v {
        Verdict::CrashBug => "crash",
        Verdict::NanBug => "nan",
        Verdict::ExceptionBug => "exception",
        Verdict::Pass => "ok",
    }
}

pub fn render_reproducer(bug: &BugReport, target: &Target, timeout_ms: u64) -> String {
    let request = Request::call(1, &bug.first_case, timeout_ms);
    let request_json = serde_json::to_string(&request).expect("requests serialize");
    let header = format!(
        "#!/usr/bin/env python3\n\"\"\"Reproducer for {id}: {verdict} in {api}.\n\nsignature: {sig}\ncase: {idx} (seed {seed}, {mode:?})\n\nusage: python3 {id}.py [--direct]\n\"\"\"\n",
        id = bug.id,
        verdict = bug.verdict,
        api = bug.api_name,
        sig = bug.signature.replace('\\', "\\\\").replace("\"\"\"", "'''"),
        idx = bug.first_case.case_index,
        seed = bug.first_case.seed,
        mode = bug.first_case.validity_mode,
    );
    let consts = format!(
        "TARGET = {target}\nAPI = {api}\nEXPECTED = {expected}\nTIMEOUT_S = {timeout}\nREQUEST = json.loads({request})\n",
        target = py_str(&target.to_string()),
        api = py_str(&bug.api_name),
        expected = py_str(expected_class(bug.verdict)),
        timeout = (timeout_ms as f64 / 1000.0).max(0.001),
        request = py_str(&request_json),
    );
    format!("{header}\nimport base64\nimport importlib\nimport json\nimport os\nimport subprocess\nimport sys\n\n{consts}{BODY}")
}

const BODY: &str = r#"

def decode(v):
    kind = v["kind"]
    if kind in ("int", "bool", "str"):
        return v["value"]
    if kind == "float":
        x = v["value"]
        return float(x) if isinstance(x, str) else x
    if kind == "null":
        return None
    if kind == "enum":
        return v["value"]
    if kind == "seq":
        return tuple(decode(i) for i in v["items"])
    if kind == "ndarray":
        import numpy as np
        raw = base64.b64decode(v["data"])
        dtype = np.dtype(v["dtype"] if v["dtype"] != "bool" else "bool").newbyteorder("<")
        return np.frombuffer(raw, dtype=dtype).reshape(v["shape"]).copy()
    raise ValueError("unknown kind " + kind)


def has_non_finite(x):
    try:
        import numpy as np
    except ImportError:
        np = None
    if isinstance(x, float):
        return x != x or x in (float("inf"), float("-inf"))
    if isinstance(x, (list, tuple)):
        return any(has_non_finite(i) for i in x)
    if np is not None and isinstance(x, np.ndarray) and x.dtype.kind in "fc":
        return not bool(np.isfinite(x).all())
    return False


def direct():
    module_name = TARGET.split(":", 1)[1]
    fn = importlib.import_module(module_name)
    for part in API.split("."):
        fn = getattr(fn, part)
    args = [decode(a) for a in REQUEST["args"]]
    try:
        out = fn(*args)
    except Exception as e:  # noqa: BLE001
        return {"class": "exception", "type": type(e).__name__, "message": str(e)}
    return {"class": "nan" if has_non_finite(out) else "ok"}


def via_worker():
    cmd = [os.environ.get("DOCFUZZ_WORKER", "docfuzz-worker"), "--target", TARGET]
    p = subprocess.Popen(cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True)
    try:
        out, _ = p.communicate(json.dumps(REQUEST) + "\n", timeout=TIMEOUT_S + 10)
    except subprocess.TimeoutExpired:
        p.kill()
        p.wait()
        return {"class": "crash", "reason": "timeout"}
    lines = out.splitlines()
    if len(lines) < 2:
        return {"class": "crash", "returncode": p.returncode}
    resp = json.loads(lines[1])
    if resp["status"] == "exception":
        e = resp["exception"]
        return {"class": "exception", "type": e["type"], "message": e["message"]}
    return {"class": "nan" if resp.get("nan_detected") else "ok"}


def main():
    result = direct() if "--direct" in sys.argv[1:] else via_worker()
    result["expected"] = EXPECTED
    print(json.dumps(result))
    return 0 if result["class"] == EXPECTED else 1


if __name__ == "__main__":
    sys.exit(main())
"#;
