#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gapcert::characters::{make_character, PolyOverFp, QuadraticCharacter};
use gapcert::numth::pow_mod;
use gapcert::tuples::{is_admissible, CandidateTuple};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn is_prime_naive(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Admissibility by direct residue coverage over every prime `p <= k`.
pub fn admissible_oracle(offsets: &[u64]) -> Option<u64> {
    let k = offsets.len() as u64;
    (2..=k).filter(|&p| is_prime_naive(p)).find(|&p| {
        let mut seen = vec![false; p as usize];
        for &h in offsets {
            seen[(h % p) as usize] = true;
        }
        seen.iter().all(|&s| s)
    })
}

/// `a^((p-1)/2) mod p` mapped to `{-1, 0, 1}`.
pub fn euler_symbol(a: i64, p: u64) -> i8 {
    match pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p) {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

/// Sorted distinct offsets starting at 0 with `k` elements below `max_offset`.
pub fn random_candidate(rng: &mut impl Rng, k: usize, max_offset: u64) -> CandidateTuple {
    let mut v = vec![0u64];
    while v.len() < k {
        let h = rng.gen_range(1..=max_offset);
        if !v.contains(&h) {
            v.push(h);
        }
    }
    v.sort_unstable();
    CandidateTuple::new(v.into_iter().map(|h| h as i64).collect()).unwrap()
}

/// Random admissible tuple of size `k`, built greedily by rejecting offsets
/// that would cover every class of some prime.
pub fn random_admissible(rng: &mut impl Rng, k: usize, max_offset: u64) -> Vec<u64> {
    loop {
        let mut v: Vec<u64> = vec![0];
        let mut attempts = 0;
        while v.len() < k && attempts < 20 * k + 100 {
            attempts += 1;
            let h = rng.gen_range(1..=max_offset);
            if v.contains(&h) {
                continue;
            }
            let mut trial = v.clone();
            trial.push(h);
            trial.sort_unstable();
            if admissible_oracle_full(&trial, k as u64) {
                v = trial;
            }
        }
        if v.len() == k {
            return v;
        }
    }
}

/// No prime `p <= bound` has all of its classes covered.
fn admissible_oracle_full(offsets: &[u64], bound: u64) -> bool {
    (2..=bound).filter(|&p| is_prime_naive(p)).all(|p| {
        let mut seen = vec![false; p as usize];
        for &h in offsets {
            seen[(h % p) as usize] = true;
        }
        !seen.iter().all(|&s| s)
    })
}

pub fn admissible(offsets: &[u64]) -> gapcert::tuples::AdmissibleTuple {
    is_admissible(&CandidateTuple::new(offsets.iter().map(|&h| h as i64).collect()).unwrap()).unwrap()
}

/// Uniformly chosen fundamental discriminant with `lo <= |delta| <= hi`.
pub fn random_fundamental(rng: &mut impl Rng, lo: i64, hi: i64) -> QuadraticCharacter {
    loop {
        let mag = rng.gen_range(lo..=hi);
        let delta = if rng.gen_bool(0.5) { mag } else { -mag };
        if let Ok(chi) = make_character(delta) {
            return chi;
        }
    }
}

/// Random monic squarefree polynomial of the given degree over `F_p`.
pub fn random_squarefree(rng: &mut impl Rng, p: u64, degree: usize) -> PolyOverFp {
    loop {
        let mut c: Vec<i64> = (0..degree).map(|_| rng.gen_range(0..p as i64)).collect();
        c.push(1);
        let q = PolyOverFp::new(p, &c).unwrap();
        if q.is_squarefree() {
            return q;
        }
    }
}
