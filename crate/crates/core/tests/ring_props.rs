use mvk::ring::{
    in_ideal, mod_tau, mod_tau_lef, tau_to_one, Atom, AtomFlags, GradedClass, IdealGenerator,
    Monomial,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn pool() -> Vec<Atom> {
    [("S", 2), ("C", 1), ("V", 3), ("p", 0)]
        .into_iter()
        .map(|(n, d)| Atom::new(n, d, AtomFlags::default()))
        .collect()
}

/// Homogeneous class of grade `d` with up to six terms.
fn class(d: u32) -> impl Strategy<Value = GradedClass> {
    prop::collection::vec((-4i64..=4, 0u32..=d, prop::collection::vec(0usize..4, 0..3)), 0..6).prop_map(
        move |terms| {
            let atoms = pool();
            let mut x = GradedClass::zero();
            for (c, split, idx) in terms {
                let chosen: Vec<Atom> = idx.iter().map(|&i| atoms[i].clone()).collect();
                let ad: u32 = chosen.iter().map(mvk::ring::Generator::dim).sum();
                if ad > d {
                    continue;
                }
                let rest = d - ad;
                let tau = split.min(rest);
                x.add_term(Monomial::new(tau, rest - tau, chosen), BigInt::from(c));
            }
            x
        },
    )
}

fn pair() -> impl Strategy<Value = (GradedClass, GradedClass, GradedClass)> {
    (0u32..5, 0u32..5).prop_flat_map(|(d, e)| (class(d), class(d), class(e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tau_to_one_is_a_ring_map((x, y, z) in pair()) {
        prop_assert_eq!(tau_to_one(&(&x + &y)), &tau_to_one(&x) + &tau_to_one(&y));
        prop_assert_eq!(tau_to_one(&(&x * &z)), &tau_to_one(&x) * &tau_to_one(&z));
    }

    // Products of normal forms are reduced again: the map lands in the quotient.
    #[test]
    fn mod_tau_is_a_ring_map((x, y, z) in pair()) {
        prop_assert_eq!(mod_tau(&(&x + &y)), &mod_tau(&x) + &mod_tau(&y));
        prop_assert_eq!(mod_tau(&(&x * &z)), mod_tau(&(&mod_tau(&x) * &mod_tau(&z))));
    }

    #[test]
    fn mod_tau_lef_is_a_ring_map((x, y, z) in pair()) {
        prop_assert_eq!(mod_tau_lef(&(&x + &y)), &mod_tau_lef(&x) + &mod_tau_lef(&y));
        prop_assert_eq!(mod_tau_lef(&(&x * &z)), mod_tau_lef(&(&mod_tau_lef(&x) * &mod_tau_lef(&z))));
    }

    #[test]
    fn reductions_split_off_the_ideal((x, _, _) in pair()) {
        for (gen, red) in [(IdealGenerator::Tau, mod_tau(&x)), (IdealGenerator::TauLef, mod_tau_lef(&x))] {
            let rest = &x - &red;
            let q = in_ideal(&rest, gen).expect("difference lies in the ideal");
            let m = GradedClass::monomial(gen.monomial(), BigInt::from(1));
            prop_assert_eq!(&q * &m, rest);
            prop_assert!(red.terms().all(|(mono, _)| mono.divide(&gen.monomial()).is_none()));
        }
    }

    #[test]
    fn shift_is_multiplication_by_tau((x, _, _) in pair(), k in 0u32..4) {
        prop_assert_eq!(x.shift(k), &x * &GradedClass::tau_pow(k));
        prop_assert_eq!(tau_to_one(&x.shift(k)), tau_to_one(&x));
    }
}

#[test]
fn units_map_to_units() {
    assert_eq!(tau_to_one(&GradedClass::one()).as_graded(), &GradedClass::one());
    assert_eq!(mod_tau(&GradedClass::one()), GradedClass::one());
    assert_eq!(mod_tau_lef(&GradedClass::one()), GradedClass::one());
}
