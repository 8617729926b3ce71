// SPDX-License-Identifier: Apache-2.0

mod common;

use actlat::models::{library, DEFAULT_VALUATION_BUDGET};
use actlat::progress::check_cyclic;
use actlat::rules::RuleSet;
use actlat::search::{prove, refute, RefuteOutcome, SearchConfig};
use actlat::Sequent;
use proptest::prelude::*;

fn small_cfg() -> SearchConfig {
    SearchConfig {
        depth: 16,
        visit_cap: 20_000,
        goal_visit_cap: 2_000,
        ..SearchConfig::default()
    }
}

fn goal() -> impl Strategy<Value = Sequent> {
    (prop::collection::vec(common::simple_formula(2), 0..=2), common::simple_formula(2))
        .prop_map(|(ante, succ)| Sequent::new(ante, succ))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn found_proofs_check_and_are_never_refuted(g in goal()) {
        let rs = RuleSet::builtin();
        let models: Vec<_> = library().into_iter().filter(|m| m.name != "rel_algebra(3)").collect();
        let found = prove(&g, &rs, &small_cfg()).unwrap();
        if let Some(p) = found.outcome.proof() {
            prop_assert!(check_cyclic(p).unwrap().verdict.is_accepted());
            prop_assert_eq!(p.conclusion().unwrap(), &g);
            let out = refute(&g, &rs, &models, DEFAULT_VALUATION_BUDGET).unwrap();
            prop_assert_eq!(out, RefuteOutcome::Unknown);
        }
    }
}
