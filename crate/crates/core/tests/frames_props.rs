// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use actlat::frames::{
    check_nuclear, context_frame, dual_algebra, verify_transfer, ResiduatedFrame,
};
use actlat::models::{rule_quasieqs, validate_algebra, DEFAULT_VALUATION_BUDGET};
use fixedbitset::FixedBitSet;
use proptest::prelude::*;

/// Small monoid tables: cyclic groups, capped sums and union on subsets.
fn monoid() -> impl Strategy<Value = (Vec<usize>, usize)> {
    prop_oneof![
        (1usize..=5).prop_map(|k| ((0..k * k).map(|i| (i / k + i % k) % k).collect(), 0)),
        (1usize..=5).prop_map(|k| ((0..k * k).map(|i| (i / k + i % k).min(k - 1)).collect(), 0)),
        (1usize..=3).prop_map(|b| {
            let k = 1 << b;
            ((0..k * k).map(|i| (i / k) | (i % k)).collect(), 0)
        }),
    ]
}

fn frame() -> impl Strategy<Value = ResiduatedFrame> {
    monoid().prop_flat_map(|(table, eps)| {
        let m = (1..=table.len()).find(|k| k * k == table.len()).unwrap();
        prop::collection::btree_set(0..m, 0..=m).prop_map(move |d: BTreeSet<usize>| {
            context_frame("ctx", &table, eps, &d).unwrap()
        })
    })
}

fn subset(n: usize) -> impl Strategy<Value = FixedBitSet> {
    prop::collection::vec(any::<bool>(), n).prop_map(|bits| {
        let mut s = FixedBitSet::with_capacity(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            s.set(i, b);
        }
        s
    })
}

fn frame_and_sets() -> impl Strategy<Value = (ResiduatedFrame, FixedBitSet, FixedBitSet)> {
    frame().prop_flat_map(|f| {
        let n = f.nw();
        (Just(f), subset(n), subset(n))
    })
}

proptest! {
    #[test]
    fn context_frames_are_nuclear(f in frame()) {
        prop_assert!(check_nuclear(&f).passed());
    }

    #[test]
    fn galois_and_nucleus_laws((f, x, y) in frame_and_sets()) {
        let mut xy = x.clone();
        xy.union_with(&y);
        prop_assert!(f.rhd(&xy).is_subset(&f.rhd(&x)));
        let gx = f.gamma(&x);
        prop_assert!(x.is_subset(&gx));
        prop_assert_eq!(f.gamma(&gx), gx.clone());
        let gy = f.gamma(&y);
        prop_assert!(f.set_op(&gx, &gy).is_subset(&f.gamma(&f.set_op(&x, &y))));
    }

    #[test]
    fn dual_algebras_are_action_lattices(f in frame()) {
        let d = dual_algebra(&f, None).unwrap();
        let v = validate_algebra(&d.algebra);
        prop_assert!(v.is_valid(), "{}", v);
    }

    #[test]
    fn transfer_on_context_frames(f in frame()) {
        let d = dual_algebra(&f, None).unwrap();
        for q in rule_quasieqs(&["C", "Wk"]).unwrap() {
            let t = verify_transfer(&f, &d, &q, DEFAULT_VALUATION_BUDGET).unwrap();
            prop_assert!(t.agrees(), "{} gives {:?}", q, t);
        }
    }
}
