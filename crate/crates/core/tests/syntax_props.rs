// SPDX-License-Identifier: Apache-2.0

mod common;

use actlat::syntax::{parse_formula, parse_sequent};
use actlat::Sequent;
use proptest::prelude::*;

proptest! {
    #[test]
    fn printed_formulas_parse_back(f in common::formula(5)) {
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text).unwrap(), f);
    }

    #[test]
    fn printing_is_a_fixed_point(f in common::formula(5)) {
        let once = f.to_string();
        let twice = parse_formula(&once).unwrap().to_string();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn printed_sequents_parse_back(
        ante in prop::collection::vec(common::formula(3), 0..4),
        succ in common::formula(3),
    ) {
        let s = Sequent::new(ante, succ);
        prop_assert_eq!(parse_sequent(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn size_counts_subterms(f in common::formula(5)) {
        prop_assert!(f.subformulas().contains(&f));
        prop_assert!(f.subformulas().len() <= f.size());
    }
}
