use altforms::forms::{build_alt_form, evaluate, rank};
use altforms::parse::{parse_element, render_element};
use altforms::{make_tower, TowerField, TowerParams, DEFAULT_SIZE_GUARD};
use proptest::prelude::*;

fn towers() -> impl Strategy<Value = TowerField> {
    prop_oneof![
        Just((2u64, 1usize, 3usize)),
        Just((2, 1, 4)),
        Just((2, 1, 5)),
        Just((3, 1, 3)),
        Just((2, 2, 2)),
        Just((5, 1, 2)),
    ]
    .prop_map(|(p, s, n)| make_tower(TowerParams { p, s, n }, DEFAULT_SIZE_GUARD).unwrap())
}

proptest! {
    #[test]
    fn field_axioms(tower in towers(), a in 0u64..512, b in 0u64..512, c in 0u64..512) {
        let x = tower.element_from_index(a as u128 % tower.order());
        let y = tower.element_from_index(b as u128 % tower.order());
        let z = tower.element_from_index(c as u128 % tower.order());

        prop_assert_eq!(tower.add(&x, &y), tower.add(&y, &x));
        prop_assert_eq!(tower.mul(&x, &y), tower.mul(&y, &x));
        prop_assert_eq!(
            tower.mul(&x, &tower.mul(&y, &z)),
            tower.mul(&tower.mul(&x, &y), &z)
        );
        prop_assert_eq!(
            tower.mul(&x, &tower.add(&y, &z)),
            tower.add(&tower.mul(&x, &y), &tower.mul(&x, &z))
        );
        prop_assert_eq!(tower.add(&x, &tower.neg(&x)), tower.zero());
        if !tower.is_zero(&x) {
            let xi = tower.inv(&x).unwrap();
            prop_assert_eq!(tower.mul(&x, &xi), tower.one());
        }
    }

    #[test]
    fn frobenius_is_additive_multiplicative(tower in towers(), a in 0u64..512, b in 0u64..512, i in 1usize..5) {
        let i = i % tower.n();
        prop_assume!(i != 0);
        let x = tower.element_from_index(a as u128 % tower.order());
        let y = tower.element_from_index(b as u128 % tower.order());
        prop_assert_eq!(
            tower.frobenius(&tower.add(&x, &y), i),
            tower.add(&tower.frobenius(&x, i), &tower.frobenius(&y, i))
        );
        prop_assert_eq!(
            tower.frobenius(&tower.mul(&x, &y), i),
            tower.mul(&tower.frobenius(&x, i), &tower.frobenius(&y, i))
        );
    }

    #[test]
    fn alt_forms_are_alternating_with_even_rank(tower in towers(), b in 1u64..512, i in 1usize..5) {
        let i = i % tower.n();
        prop_assume!(i != 0);
        let b = tower.element_from_index(b as u128 % tower.order());
        prop_assume!(!tower.is_zero(&b));
        let form = build_alt_form(&tower, &b, i).unwrap();
        prop_assert!(form.is_alternating(&tower));
        let rep = rank(&tower, &form).unwrap();
        prop_assert_eq!(rep.rank % 2, 0);
        prop_assert_eq!(rep.rank + rep.radical_basis.len(), tower.n());
    }

    #[test]
    fn evaluation_is_skew(tower in towers(), b in 1u64..512, a in 0u64..512, c in 0u64..512) {
        let bv = tower.element_from_index(b as u128 % tower.order());
        prop_assume!(!tower.is_zero(&bv));
        let form = build_alt_form(&tower, &bv, 1).unwrap();
        let x = tower.element_from_index(a as u128 % tower.order());
        let y = tower.element_from_index(c as u128 % tower.order());
        let fxy = evaluate(&tower, &form, &x, &y).unwrap();
        let fyx = evaluate(&tower, &form, &y, &x).unwrap();
        prop_assert_eq!(fxy, tower.k_neg(&fyx));
        prop_assert!(tower.k_is_zero(&evaluate(&tower, &form, &x, &x).unwrap()));
    }

    #[test]
    fn shorthand_round_trip(tower in towers(), a in 0u64..512) {
        let x = tower.element_from_index(a as u128 % tower.order());
        let text = render_element(&tower, &x);
        prop_assert_eq!(parse_element(&tower, &text).unwrap(), x);
    }
}
