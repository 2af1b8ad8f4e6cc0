use std::sync::OnceLock;

use proptest::prelude::*;
use qcrystal::crystal::{generate, RootOperators};
use qcrystal::dual_perfect::{verify_dual_perfect, Certificate, Verdict};
use qcrystal::global::solve_global;
use qcrystal::io::{read_space, write_space};
use qcrystal::matcher::match_bases;
use qcrystal::space::{global_basis_space, Basis, PreDualPerfectSpace};
use qcrystal::strings::{all_string_data, GoodSequence};
use qcrystal::{CartanDatum, HWModule, Scalar};

struct Fixture {
    space: PreDualPerfectSpace<Scalar>,
    basis: Basis<Scalar>,
    cert: Certificate<Scalar>,
}

fn adjoint() -> &'static Fixture {
    static CELL: OnceLock<Fixture> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = HWModule::build(CartanDatum::a2(), &[1, 1], 5).unwrap();
        let k = RootOperators::new(&m);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let (space, basis, _) = global_basis_space(&m, &g, &gb).unwrap();
        let cert = verify_dual_perfect(&space, &basis).unwrap().certificate().unwrap().clone();
        Fixture { space, basis, cert }
    })
}

fn units(n: usize) -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec((prop_oneof![-4i64..=-1, 1i64..=4], -3i64..=3), n)
        .prop_map(|v| v.into_iter().map(|(c, k)| Scalar::from_int(c) * Scalar::q_pow(k)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rescaling_keeps_levels_and_graph(f in units(8)) {
        let fx = adjoint();
        let r = fx.basis.rescaled(&f);
        let Verdict::Certified(c) = verify_dual_perfect(&fx.space, &r).unwrap() else {
            panic!("rescaled basis refuted");
        };
        for (a, b) in c.colors.iter().zip(&fx.cert.colors) {
            prop_assert_eq!(&a.ell, &b.ell);
            prop_assert_eq!(&a.f, &b.f);
        }
    }

    #[test]
    fn string_data_ignore_rescaling(f in units(8)) {
        let fx = adjoint();
        let r = fx.basis.rescaled(&f);
        let c = verify_dual_perfect(&fx.space, &r).unwrap().certificate().unwrap().clone();
        let seq = GoodSequence::cyclic(2);
        prop_assert_eq!(
            all_string_data(&seq, &c, r.len()).unwrap(),
            all_string_data(&seq, &fx.cert, fx.basis.len()).unwrap()
        );
    }

    #[test]
    fn matcher_recovers_identity(mut f in units(8)) {
        let fx = adjoint();
        for h in fx.cert.highest() {
            f[h] = Scalar::one();
        }
        let r = fx.basis.rescaled(&f);
        let c = verify_dual_perfect(&fx.space, &r).unwrap().certificate().unwrap().clone();
        let m = match_bases(&fx.space, &fx.basis, &fx.cert, &r, &c, &GoodSequence::cyclic(2)).unwrap();
        prop_assert_eq!(m.psi, (0..8).collect::<Vec<_>>());
        prop_assert!(m.checks.passed());
    }

    #[test]
    fn space_files_round_trip(f in units(8)) {
        let fx = adjoint();
        let r = fx.basis.rescaled(&f);
        let text = write_space(&fx.space, &[("r", &r)]);
        let (s, bases) = read_space::<Scalar>(&text).unwrap();
        prop_assert_eq!(&s, &fx.space);
        prop_assert_eq!(&bases["r"], &r);
    }
}
