use coxeter_proper::construction::{
    enumerate_pn, lower_bound_count, properness_condition, verify_all_proper, ConstructionParams, VERIFY_CAP,
};
use num_bigint::BigUint;

#[test]
fn n8_q4_s2() {
    let p = ConstructionParams::new(8, 4, 2).unwrap();
    assert_eq!(enumerate_pn(p).count(), 36);
    assert_eq!(lower_bound_count(p), BigUint::from(36u32));
    let r = verify_all_proper(p, VERIFY_CAP, 2).unwrap();
    assert_eq!((r.proper, r.total), (36, 36));
}

#[test]
fn n12_q6_s2_is_all_proper_without_the_condition() {
    let p = ConstructionParams::new(12, 6, 2).unwrap();
    assert!(!properness_condition(p));
    let r = verify_all_proper(p, VERIFY_CAP, 1).unwrap();
    assert_eq!((r.proper, r.total), (8100, 8100));
}

#[test]
fn condition_implies_no_violations() {
    let cap = 100_000u64;
    let mut checked = 0;
    for n in 1..=16 {
        for q in 1..=n {
            for s in 1..=q {
                let p = ConstructionParams::new(n, q, s).unwrap();
                if !properness_condition(p) || lower_bound_count(p) > BigUint::from(cap) {
                    continue;
                }
                let r = verify_all_proper(p, cap, 1).unwrap();
                assert!(r.violations.is_empty(), "n={n} q={q} s={s}: {:?}", r.violations);
                assert_eq!(r.proper, r.total);
                checked += 1;
            }
        }
    }
    assert!(checked > 20, "only {checked} parameter sets checked");
}

#[test]
fn s_equal_one_leaves_blocks_free() {
    let p = ConstructionParams::new(7, 3, 1).unwrap();
    assert_eq!(lower_bound_count(p), BigUint::from(36u32));
    assert_eq!(enumerate_pn(p).count(), 36);
}
