//! Property tests over the permutation layer and the braid action.

use hb_core::braid::apply_braid;
use hb_core::perm::Perm;
use hb_core::search::NielsenTuple;
use proptest::prelude::*;

fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n as u16).collect::<Vec<u16>>())
        .prop_shuffle()
        .prop_map(|images| Perm::new(images).unwrap())
}

fn arb_tuple(n: usize, r: usize) -> impl Strategy<Value = NielsenTuple> {
    proptest::collection::vec(arb_perm(n), r - 1).prop_map(move |mut elems| {
        let prod = elems.iter().fold(Perm::identity(n), |a, x| a.mul(x));
        elems.push(prod.inverse());
        NielsenTuple::new(elems)
    })
}

proptest! {
    #[test]
    fn composition_is_associative(a in arb_perm(9), b in arb_perm(9), c in arb_perm(9)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }

    #[test]
    fn inverse_cancels(a in arb_perm(9)) {
        prop_assert!(a.mul(&a.inverse()).is_identity());
        prop_assert!(a.inverse().mul(&a).is_identity());
    }

    #[test]
    fn conjugation_preserves_cycle_type(a in arb_perm(9), g in arb_perm(9)) {
        prop_assert_eq!(a.conj(&g).cycle_type(), a.cycle_type());
        prop_assert_eq!(a.conj(&g).index(), a.index());
    }

    #[test]
    fn cycle_notation_round_trips(a in arb_perm(11)) {
        let s = a.cycle_string();
        prop_assert_eq!(Perm::parse_cycles(&s, 11).unwrap(), a.clone());
        let imgs = a.image_string();
        prop_assert_eq!(Perm::parse_images(&imgs).unwrap(), a);
    }

    #[test]
    fn order_annihilates(a in arb_perm(10)) {
        prop_assert!(a.pow(a.order()).is_identity());
    }

    #[test]
    fn braid_moves_preserve_product_and_invert(t in arb_tuple(8, 5)) {
        prop_assert!(t.is_product_one());
        for i in 0..4 {
            let f = apply_braid(&t, i, false);
            prop_assert!(f.is_product_one());
            prop_assert_eq!(apply_braid(&f, i, true), t.clone());
        }
    }

    #[test]
    fn braid_relation_on_arbitrary_tuples(t in arb_tuple(8, 4)) {
        let lhs = apply_braid(&apply_braid(&apply_braid(&t, 0, false), 1, false), 0, false);
        let rhs = apply_braid(&apply_braid(&apply_braid(&t, 1, false), 0, false), 1, false);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn distant_braid_moves_commute(t in arb_tuple(8, 5)) {
        let ab = apply_braid(&apply_braid(&t, 0, false), 2, false);
        let ba = apply_braid(&apply_braid(&t, 2, false), 0, false);
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn braid_moves_preserve_class_multiset(t in arb_tuple(8, 4)) {
        let mut before: Vec<Vec<u16>> = t.elems.iter().map(|x| x.cycle_type()).collect();
        before.sort();
        for i in 0..3 {
            let moved = apply_braid(&t, i, false);
            let mut after: Vec<Vec<u16>> = moved.elems.iter().map(|x| x.cycle_type()).collect();
            after.sort();
            prop_assert_eq!(&after, &before);
        }
    }
}
