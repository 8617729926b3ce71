// SPDX-License-Identifier: Apache-2.0

mod common;

use std::sync::OnceLock;

use actlat::models::{eval, library, FiniteActionLattice, Valuation};
use actlat::proof::{check_wf, id_expand};
use actlat::{Formula, Sequent};
use proptest::prelude::*;

fn lib() -> &'static [FiniteActionLattice] {
    static LIB: OnceLock<Vec<FiniteActionLattice>> = OnceLock::new();
    LIB.get_or_init(library)
}

proptest! {
    #[test]
    fn residuation_in_library_models(m in 0usize..6, x in any::<u16>(), y in any::<u16>(), z in any::<u16>()) {
        let a = &lib()[m % lib().len()];
        let n = a.size();
        let (x, y, z) = (x as usize % n, y as usize % n, z as usize % n);
        let xy = a.mul(x, y);
        prop_assert_eq!(a.le(xy, z), a.le(y, a.under(x, z)));
        prop_assert_eq!(a.le(xy, z), a.le(x, a.over(z, y)));
        let s = a.power_join(x);
        prop_assert!(a.le(a.mul(s, s), s));
        prop_assert!(a.le(x, s));
    }

    #[test]
    fn identity_expansion_checks(f in common::formula(3)) {
        let p = id_expand(&f);
        prop_assert_eq!(p.sequent(), &Sequent::new(vec![f.clone()], f.clone()));
        prop_assert!(check_wf(&p, 3).is_ok());
    }

    #[test]
    fn eval_is_monotone_in_joins(f in common::simple_formula(3), g in common::simple_formula(3), vals in prop::collection::vec(0usize..64, 2)) {
        for a in lib().iter().take(4) {
            let n = a.size();
            let v: Valuation = ["a", "b"].iter().map(|s| s.to_string()).zip(vals.iter().map(|x| x % n)).collect();
            let fv = eval(a, &v, &f).unwrap();
            let jv = eval(a, &v, &Formula::join(f.clone(), g.clone())).unwrap();
            prop_assert!(a.le(fv, jv));
        }
    }
}
