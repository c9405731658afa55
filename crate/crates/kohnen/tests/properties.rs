use kohnen::quad_invariants::is_square_mod4;
use kohnen::{BaseField, CycRat, FieldElement};
use proptest::prelude::*;

fn element() -> impl Strategy<Value = FieldElement> {
    (-60i64..60, -60i64..60).prop_map(|(a, b)| FieldElement::from_ints(a, b))
}

fn field() -> impl Strategy<Value = BaseField> {
    prop::sample::select(vec![2i64, 3, 5, 10, 13, 79]).prop_map(|d| BaseField::new(d).unwrap())
}

proptest! {
    #[test]
    fn ring_laws(f in field(), x in element(), y in element(), z in element()) {
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        prop_assert_eq!(f.mul(&f.mul(&x, &y), &z), f.mul(&x, &f.mul(&y, &z)));
        prop_assert_eq!(f.mul(&x, &(&y + &z)), &f.mul(&x, &y) + &f.mul(&x, &z));
    }

    #[test]
    fn norm_and_trace(f in field(), x in element(), y in element()) {
        prop_assert_eq!(f.norm(&f.mul(&x, &y)), f.norm(&x) * f.norm(&y));
        prop_assert_eq!(f.trace(&(&x + &y)), f.trace(&x) + f.trace(&y));
        prop_assert_eq!(f.mul(&x, &f.conj(&x)), FieldElement::from_rational(f.norm(&x)));
        if !x.is_zero() {
            prop_assert_eq!(f.mul(&x, &f.inv(&x)), FieldElement::one());
        }
    }

    #[test]
    fn format_parse_round_trip(f in field(), x in element()) {
        prop_assert_eq!(f.parse_element(&f.format(&x)).unwrap(), x);
    }

    #[test]
    fn squares_are_squares_mod_4(f in field(), x in element(), y in element()) {
        let sq = f.mul(&x, &x);
        prop_assume!(!sq.is_zero());
        prop_assert!(is_square_mod4(&f, &sq));
        // adding a multiple of 4 keeps the class
        let shifted = &sq + &y.scale_int(4);
        if !shifted.is_zero() {
            prop_assert!(is_square_mod4(&f, &shifted));
        }
    }

    #[test]
    fn cyclotomic_field_laws(m in prop::sample::select(vec![3u32, 4, 5, 8, 12]), i in 0i64..24, j in 0i64..24,
                             p in -9i64..9, q in 1i64..9) {
        let a = &CycRat::root_of_unity(m, i) + &CycRat::from_frac(p, q);
        let b = CycRat::root_of_unity(m, j);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&b * &b.conj(), CycRat::one());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv(), CycRat::one());
        }
    }
}
