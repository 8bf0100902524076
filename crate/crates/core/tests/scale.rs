//! Generated-poset scale checks at the documented caps. Slow-ish, so run
//! explicitly: `cargo test -p mrd-core --test scale -- --ignored`.

use mrd_core::poset::{bundle_poset, power_set_poset, ChainBundle, ElementId};

#[test]
#[ignore]
fn power_set_at_the_ground_cap() {
    let ground: Vec<ElementId> = (0..16).map(|i| ElementId::new(format!("x{i:02}"))).collect();
    let poset = power_set_poset(&ground).unwrap();
    assert_eq!(poset.len(), 1 << 16);
    assert_eq!(poset.cover_count(), 16 * (1 << 15));
    let cls = poset.classify();
    assert_eq!(cls.common_chain_length, Some(16));
}

#[test]
#[ignore]
fn bundle_near_the_element_cap() {
    let bundle = ChainBundle::new(vec![99, 99, 99]).unwrap();
    let poset = bundle_poset(&bundle).unwrap();
    assert_eq!(poset.len(), 1_000_000);
    let cls = poset.classify();
    assert_eq!(cls.common_chain_length, Some(297));
}
