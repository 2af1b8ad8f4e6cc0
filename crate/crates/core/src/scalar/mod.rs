//! Exact scalars: ℚ, Laurent polynomials ℚ[q, q⁻¹] and rational functions ℚ(q).

mod dense;
mod function;
mod laurent;
mod parse;

pub use function::Scalar;
pub use laurent::{LaurentPoly, Rational};
pub use parse::parse_scalar;

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn laurent() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-3i64..=3, -4i64..=4), 0..4).prop_map(|t| {
            LaurentPoly::from_terms(t.into_iter().map(|(e, c)| (e, Rational::from_integer(c.into()))))
        })
    }

    fn scalar() -> impl Strategy<Value = Scalar> {
        (laurent(), laurent()).prop_map(|(n, d)| {
            if d.is_zero() {
                Scalar::from_laurent(n)
            } else {
                Scalar::from_fraction(n, d).unwrap()
            }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&a - &a).is_zero());
            if !a.is_zero() {
                prop_assert!((&a * &a.inv().unwrap()).is_one());
            }
        }

        #[test]
        fn canonical_representation(n in laurent(), d in laurent(), k in laurent()) {
            prop_assume!(!d.is_zero() && !k.is_zero());
            // n/d and (nk)/(dk) are the same value and must be stored identically
            let x = Scalar::from_fraction(n.clone(), d.clone()).unwrap();
            let y = Scalar::from_fraction(&n * &k, &d * &k).unwrap();
            prop_assert_eq!(&x, &y);
            prop_assert_eq!(x.to_string(), y.to_string());
            prop_assert_eq!(x.is_regular_at_zero(), y.is_regular_at_zero());
        }

        #[test]
        fn bar_is_involutive_automorphism(a in scalar(), b in scalar()) {
            prop_assert_eq!(a.bar().bar(), a.clone());
            prop_assert_eq!((&a + &b).bar(), &a.bar() + &b.bar());
            prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
        }

        #[test]
        fn print_parse_round_trip(a in scalar()) {
            let back: Scalar = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn series_matches_eval(a in scalar()) {
            if a.is_regular_at_zero() {
                let c = a.series(0, 0);
                prop_assert_eq!(&c[0], &a.eval_at_zero().unwrap());
            }
        }
    }
}
