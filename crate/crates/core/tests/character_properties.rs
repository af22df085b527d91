mod common;

use proptest::prelude::*;

use gapcert::characters::{char_eval, kronecker, make_character};

proptest! {
    #[test]
    fn multiplicative_in_top_argument(
        a in -1_000_000i64..1_000_000,
        b in -1_000_000i64..1_000_000,
        n in -1_000_000i64..1_000_000,
    ) {
        prop_assume!(n != 0);
        let lhs = kronecker(a * b, n).unwrap();
        prop_assert_eq!(lhs, kronecker(a, n).unwrap() * kronecker(b, n).unwrap());
    }

    #[test]
    fn character_is_periodic(delta in -100_000i64..100_000, n in -1_000_000i64..1_000_000, j in -5i64..5) {
        if let Ok(chi) = make_character(delta) {
            let q = chi.modulus() as i64;
            prop_assert_eq!(char_eval(&chi, n), char_eval(&chi, n + j * q));
        }
    }
}

#[test]
fn legendre_matches_euler_criterion() {
    for p in (3u64..200).filter(|&p| gapcert::numth::is_prime(p)) {
        for a in 0..p as i64 {
            assert_eq!(kronecker(a, p as i64).unwrap(), common::euler_symbol(a, p), "({a}/{p})");
        }
    }
}

#[test]
fn nonprincipal_characters_sum_to_zero() {
    let mut count = 0;
    for mag in 3i64..=10_000 {
        for delta in [mag, -mag] {
            let Ok(chi) = make_character(delta) else { continue };
            let q = chi.modulus() as i64;
            let sum: i64 = (1..=q).map(|n| char_eval(&chi, n) as i64).sum();
            assert_eq!(sum, 0, "delta = {delta}");
            count += 1;
        }
    }
    // 3/pi^2 of all integers, on each side, are fundamental discriminants
    assert!(count > 6_000, "{count}");
}
