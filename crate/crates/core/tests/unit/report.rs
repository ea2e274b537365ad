use docfuzz_core::orchestrator::report::*;

#[test]
fn sweep_budgets() {
    assert_eq!(default_sweep_budgets(1), [1]);
    assert_eq!(default_sweep_budgets(120), [1, 50, 100, 120]);
    assert_eq!(default_sweep_budgets(100), [1, 50, 100]);
    assert_eq!(
        sweep_csv(&[(1, 0), (50, 2)]),
        "cases_per_api,cumulative_bugs\n1,0\n50,2\n"
    );
}
