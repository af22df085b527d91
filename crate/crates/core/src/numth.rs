//! Exact integer number theory: sieving, factorization, CRT.
//!
//! Every modular product goes through a `u128` intermediate, so all routines
//! are exact over the full `u64` range.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest sieve limit accepted by [`primes_up_to`].
pub const DEFAULT_SIEVE_BUDGET: u64 = 1_000_000_000;

/// Trial division runs over primes up to this bound before switching to rho.
const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

const SEGMENT_BYTES: usize = 1 << 15;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes up to `limit`, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of listed primes `<= x` (x may exceed the table limit only if
    /// the caller knows the answer is unaffected).
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.primes
    }
}

pub fn primes_up_to(limit: u64) -> Result<PrimeTable> {
    primes_up_to_with_budget(limit, DEFAULT_SIEVE_BUDGET)
}

/// Segmented sieve of Eratosthenes over odd numbers.
pub fn primes_up_to_with_budget(limit: u64, budget: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Domain(format!("sieve limit must be >= 2, got {limit}")));
    }
    if limit > budget {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds the configured budget {budget}"
        )));
    }

    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_sieve(root);

    let mut primes = vec![2u64];
    // Each segment covers the odd numbers lo, lo+2, ..., lo + 2*(SEGMENT_BYTES-1).
    let mut marks = vec![false; SEGMENT_BYTES];
    let mut lo = 3u64;
    while lo <= limit {
        let span = SEGMENT_BYTES.min(((limit - lo) / 2 + 1) as usize);
        let hi = lo + 2 * (span as u64 - 1);
        marks[..span].fill(true);
        for &p in base.iter().skip(1) {
            let sq = p * p;
            if sq > hi {
                break;
            }
            // first odd multiple of p that is >= max(lo, p^2)
            let mut start = if sq >= lo { sq } else { lo.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut j = ((start - lo) / 2) as usize;
            while j < span {
                marks[j] = false;
                j += p as usize;
            }
        }
        primes.extend(
            marks[..span]
                .iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| lo + 2 * i as u64),
        );
        lo = hi + 2;
    }
    Ok(PrimeTable { limit, primes })
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

fn trial_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| simple_sieve(TRIAL_DIVISION_LIMIT))
}

/// Prime factorization `n = prod p^e` with strictly increasing primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn largest_prime(&self) -> Option<u64> {
        self.factors.last().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of the distinct prime factors.
    pub fn radical(&self) -> u64 {
        self.primes().product()
    }
}

/// Complete factorization of any `1 <= n < 2^64`.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::Domain("cannot factor 0".into()));
    }
    let mut rest = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for &p in trial_primes() {
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        let mut big = Vec::new();
        split_large(rest, &mut big);
        big.sort_unstable();
        for p in big {
            match factors.last_mut() {
                Some((q, e)) if *q == p => *e += 1,
                _ => factors.push((p, 1)),
            }
        }
    }
    Ok(Factorization { n, factors })
}

fn split_large(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_large(d, out);
    split_large(n / d, out);
}

/// Brent's variant of Pollard rho; `n` must be odd composite without small factors.
fn pollard_brent(n: u64) -> u64 {
    let f = |x: u64, c: u64| ((mul_mod(x, x, n) as u128 + c as u128) % n as u128) as u64;
    for c in 1u64.. {
        let mut y = 2u64;
        let mut r = 1u64;
        let mut q = 1u64;
        let mut g = 1u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y, c);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y, c);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys, c);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Solves `x = r_i (mod m_i)` for pairwise coprime moduli; returns `(x, prod m_i)`
/// with `0 <= x < prod m_i`.
pub fn crt(congruences: &[(u64, u64)]) -> Result<(u64, u64)> {
    let mut x = 0u64;
    let mut modulus = 1u64;
    for &(r, m) in congruences {
        if m == 0 {
            return Err(Error::Domain("modulus 0 in CRT system".into()));
        }
        let g = gcd(modulus, m);
        if g != 1 {
            return Err(Error::Domain(format!(
                "moduli not pairwise coprime: gcd({modulus}, {m}) = {g}"
            )));
        }
        let combined = modulus.checked_mul(m).ok_or_else(|| {
            Error::Resource(format!("CRT modulus {modulus} * {m} overflows 64 bits"))
        })?;
        // x' = x + modulus * ((r - x) * modulus^-1 mod m)
        let inv = mod_inverse(modulus % m, m).unwrap_or(0);
        let diff = ((r % m) + m - (x % m)) % m;
        let t = mul_mod(diff, inv, m);
        x = ((x as u128 + modulus as u128 * t as u128) % combined as u128) as u64;
        modulus = combined;
    }
    Ok((x, modulus))
}
