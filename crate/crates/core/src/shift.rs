//! Shifting an admissible tuple into classes where a quadratic character is `-1`.
//!
//! With `D = g D'` (`g` the largest prime factor of the conductor) and a base
//! residue `n'` keeping every `n' + h_i` coprime to `D`, the candidates
//! `D'y + n'` for `y = 1..g` are scanned. The weighted count
//!
//! ```text
//! H = sum_{y=1}^{g} prod_i (1 - chi(D'y + n' + h_i))
//! ```
//!
//! is bounded below by `g - k 2^(k-1) sqrt(g)` via the Weil bound, which
//! forces a hit once `g` is large. The search itself is exhaustive, so it
//! never relies on that bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{char_eval, QuadraticCharacter};
use crate::error::{Error, Result};
use crate::numth::{crt, factorize, gcd};
use crate::tuples::AdmissibleTuple;

/// Largest `g` scanned by [`compute_h`] and [`find_negative_shift`].
pub const MAX_SCAN_PRIME: u64 = 10_000_000;

/// `compute_h` keeps `H` exact in `u128`, which caps the tuple size.
pub const MAX_H_TUPLE_SIZE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusSplit {
    pub d: u64,
    /// Largest prime factor of `d`.
    pub g: u64,
    pub d_prime: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShiftResult {
    /// `l = D'y' + n' (mod D)`.
    pub l: u64,
    pub nprime: u64,
    pub yprime: u64,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftSearchStats {
    pub g: u64,
    pub k: usize,
    pub nprime: u64,
    /// Exact value of the weighted count `H`.
    pub h: u128,
    /// `g - k 2^(k-1) sqrt(g)`.
    pub weil_floor: f64,
    /// Number of `y` for which some `chi(D'y + n' + h_i)` vanishes.
    pub zero_y_count: u64,
    /// Number of `y` for which every `chi(D'y + n' + h_i)` is `-1`.
    pub all_minus_one_count: u64,
}

impl ShiftSearchStats {
    /// Whether `H` meets the Weil floor.
    pub fn meets_weil_floor(&self) -> bool {
        self.h as f64 >= self.weil_floor
    }
}

pub fn split_modulus(chi: &QuadraticCharacter) -> ModulusSplit {
    let d = chi.modulus();
    let g = factorize(d)
        .ok()
        .and_then(|f| f.largest_prime())
        .expect("conductor of a nonprincipal character is >= 3");
    ModulusSplit {
        d,
        g,
        d_prime: d / g,
    }
}

/// Smallest residue per prime `p | D` avoiding every `-h_i mod p`, glued by CRT.
///
/// The result lies in `[0, rad(D))`; since coprimality to `D` only depends on
/// the primes dividing `D`, it serves as a residue mod `D` as well.
pub fn find_coprime_base(offsets: &[u64], chi: &QuadraticCharacter) -> Result<u64> {
    let fac = factorize(chi.modulus())?;
    let mut congruences = Vec::new();
    for p in fac.primes() {
        let mut hit = vec![false; p as usize];
        for &h in offsets {
            hit[((p - h % p) % p) as usize] = true;
        }
        let r = hit
            .iter()
            .position(|&b| !b)
            .ok_or(Error::NoCoprimeShift { prime: p })?;
        congruences.push((r as u64, p));
    }
    Ok(crt(&congruences)?.0)
}

fn check_scan(chi: &QuadraticCharacter) -> Result<ModulusSplit> {
    let split = split_modulus(chi);
    if split.g == 2 {
        return Err(Error::NotSupported(format!(
            "conductor {} is a power of 2; the scan needs an odd prime factor",
            split.d
        )));
    }
    if split.g > MAX_SCAN_PRIME {
        return Err(Error::Resource(format!(
            "largest prime factor {} exceeds the scan budget {MAX_SCAN_PRIME}",
            split.g
        )));
    }
    Ok(split)
}

fn all_minus_one(chi: &QuadraticCharacter, x: u64, offsets: &[u64]) -> bool {
    offsets
        .iter()
        .all(|&h| char_eval(chi, (x + h) as i64) == -1)
}

/// Finds the least `y' <= g` with `chi(D'y' + n' + h_i) = -1` for all `i`.
pub fn find_negative_shift(t: &AdmissibleTuple, chi: &QuadraticCharacter) -> Result<ShiftResult> {
    let split = check_scan(chi)?;
    let offsets = t.offsets();
    let nprime = find_coprime_base(offsets, chi)?;
    let hit = (1..=split.g)
        .into_par_iter()
        .find_first(|&y| all_minus_one(chi, split.d_prime * y + nprime, offsets));
    match hit {
        Some(y) => {
            let l = (split.d_prime * y + nprime) % split.d;
            // re-check on the reduced residue, independent of the scan
            let verified = offsets
                .iter()
                .all(|&h| char_eval(chi, l as i64 + h as i64) == -1);
            if !verified {
                return Err(Error::Domain(format!(
                    "shift l = {l} failed re-verification"
                )));
            }
            Ok(ShiftResult {
                l,
                nprime,
                yprime: y,
                verified,
            })
        }
        None => Err(Error::ShiftNotFound(Box::new(compute_h(offsets, chi, nprime)?))),
    }
}

/// Exact `H` and tallies over `y = 1..g` for a given base residue.
pub fn compute_h(offsets: &[u64], chi: &QuadraticCharacter, nprime: u64) -> Result<ShiftSearchStats> {
    let split = check_scan(chi)?;
    let k = offsets.len();
    if k == 0 || k > MAX_H_TUPLE_SIZE {
        return Err(Error::Domain(format!(
            "tuple size {k} outside 1..={MAX_H_TUPLE_SIZE}"
        )));
    }
    for (i, &h) in offsets.iter().enumerate() {
        let v = (nprime as u128 + h as u128) % split.d as u128;
        if gcd(v as u64, split.d) != 1 {
            return Err(Error::Domain(format!(
                "gcd(n' + h_{} , D) = gcd({} + {h}, {}) != 1",
                i + 1,
                nprime,
                split.d
            )));
        }
    }
    let nprime_red = nprime % split.d;
    let (h, zero_y, all_neg) = (1..=split.g)
        .into_par_iter()
        .map(|y| {
            let x = split.d_prime * y + nprime_red;
            let mut product: u128 = 1;
            let mut zero = false;
            let mut negatives = 0usize;
            for &off in offsets {
                match char_eval(chi, (x + off) as i64) {
                    -1 => {
                        product <<= 1;
                        negatives += 1;
                    }
                    0 => zero = true,
                    _ => {
                        product = 0;
                    }
                }
            }
            (product, zero as u64, (negatives == k) as u64)
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let kf = k as f64;
    let gf = split.g as f64;
    Ok(ShiftSearchStats {
        g: split.g,
        k,
        nprime,
        h,
        weil_floor: gf - kf * 2f64.powi(k as i32 - 1) * gf.sqrt(),
        zero_y_count: zero_y,
        all_minus_one_count: all_neg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::make_character;
    use crate::tuples::{is_admissible, parse_tuple};

    fn tuple(s: &str) -> AdmissibleTuple {
        is_admissible(&parse_tuple(s).unwrap()).unwrap()
    }

    #[test]
    fn split_examples() {
        let s = split_modulus(&make_character(-20).unwrap());
        assert_eq!((s.g, s.d_prime), (5, 4));
        let s = split_modulus(&make_character(13).unwrap());
        assert_eq!((s.g, s.d_prime), (13, 1));
        let s = split_modulus(&make_character(280).unwrap());
        assert_eq!((s.d, s.g, s.d_prime), (280, 7, 40));
    }

    #[test]
    fn coprime_base_examples() {
        let chi = make_character(13).unwrap();
        assert_eq!(find_coprime_base(&[0, 2], &chi).unwrap(), 1);
        let chi5 = make_character(5).unwrap();
        assert_eq!(find_coprime_base(&[0], &chi5).unwrap(), 1);
        let chi3 = make_character(-3).unwrap();
        assert!(matches!(
            find_coprime_base(&[0, 1, 2], &chi3),
            Err(Error::NoCoprimeShift { prime: 3 })
        ));
        // 280 = 2^3 * 5 * 7: residues 1 mod 2, 1 mod 5, 1 mod 7 for the tuple [0,2,6]
        let chi280 = make_character(280).unwrap();
        let n = find_coprime_base(&[0, 2, 6], &chi280).unwrap();
        for h in [0u64, 2, 6] {
            assert_eq!(gcd(n + h, 280), 1);
        }
    }

    #[test]
    fn negative_shift_examples() {
        let chi13 = make_character(13).unwrap();
        let r = find_negative_shift(&tuple("0 2"), &chi13).unwrap();
        assert_eq!(r.l, 5);
        assert!(r.verified);
        assert_eq!((r.nprime, r.yprime), (1, 4));

        let chi5 = make_character(5).unwrap();
        let r = find_negative_shift(&tuple("0"), &chi5).unwrap();
        assert!([2, 3].contains(&r.l));

        match find_negative_shift(&tuple("0 2"), &chi5) {
            Err(Error::ShiftNotFound(stats)) => assert_eq!(stats.all_minus_one_count, 0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_of_two_conductor_unsupported() {
        for delta in [-4, 8, -8] {
            let chi = make_character(delta).unwrap();
            assert!(matches!(
                find_negative_shift(&tuple("0"), &chi),
                Err(Error::NotSupported(_))
            ));
        }
    }

    #[test]
    fn h_single_offset() {
        // sum_{y=1}^{13} (1 - chi(y + 1)) by direct enumeration
        let chi = make_character(13).unwrap();
        let oracle: i64 = (1..=13).map(|y| 1 - chi.eval(y + 1) as i64).sum();
        let s = compute_h(&[0], &chi, 1).unwrap();
        assert_eq!(s.h as i64, oracle);
        assert_eq!(s.h, 13);
        assert_eq!(s.zero_y_count, 1);
    }

    #[test]
    fn h_precondition() {
        let chi = make_character(13).unwrap();
        let err = compute_h(&[0, 1], &chi, 12).unwrap_err();
        assert!(err.to_string().contains("h_2"), "{err}");
    }

    #[test]
    fn h_not_found_case() {
        let chi5 = make_character(5).unwrap();
        let s = compute_h(&[0, 2], &chi5, 1).unwrap();
        assert_eq!(s.all_minus_one_count, 0);
        // only zero-y terms contribute, each at most 2^(k-1)
        assert!(s.h <= s.zero_y_count as u128 * 2);
        assert!(s.zero_y_count <= 2);
    }
}
