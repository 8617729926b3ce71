// SPDX-License-Identifier: Apache-2.0

#![allow(dead_code)]

use actlat::Formula;
use proptest::prelude::*;

pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["a", "b", "c"]).prop_map(Formula::var),
        1 => Just(Formula::Zero),
        1 => Just(Formula::One),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::meet(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::join(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::prod(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::lres(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::rres(l, r)),
            inner.prop_map(Formula::star),
        ]
    })
}

/// Formulas without residuals or zero, over two variables.
pub fn simple_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop::sample::select(vec!["a", "b"]).prop_map(Formula::var),
        1 => Just(Formula::One),
    ];
    leaf.prop_recursive(depth, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::join(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::prod(l, r)),
            inner.prop_map(Formula::star),
        ]
    })
}
