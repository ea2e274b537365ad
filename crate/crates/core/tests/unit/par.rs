use docfuzz_core::par::*;

#[test]
fn order_is_preserved_in_both_modes() {
    let xs: Vec<u64> = (0..1000).collect();
    let seq = map(Parallelism::Sequential, &xs, |x| x * x);
    let par = map(Parallelism::Parallel, &xs, |x| x * x);
    assert_eq!(seq, par);
    assert_eq!(seq[999], 998_001);
}
