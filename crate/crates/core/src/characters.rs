//! Kronecker symbols, real primitive quadratic characters and character sums
//! of polynomial arguments over prime fields.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numth::{factorize, is_prime, mod_inverse};

/// Largest polynomial degree accepted by [`PolyOverFp`].
pub const MAX_POLY_DEGREE: usize = 64;

/// Largest prime for which [`poly_char_sum`] evaluates the sum exhaustively.
pub const MAX_EXHAUSTIVE_PRIME: u64 = 10_000_000;

// (2/n) for odd n, indexed by n mod 8.
const TWO_TABLE: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// The complete Kronecker symbol `(a/n)`, defined for every pair except `(0, 0)`.
pub fn kronecker(a: i64, n: i64) -> Result<i8> {
    if a == 0 && n == 0 {
        return Err(Error::Domain("Kronecker symbol (0/0) is undefined".into()));
    }
    let mut a = a as i128;
    let mut b = n as i128;
    if b == 0 {
        return Ok(if a.abs() == 1 { 1 } else { 0 });
    }
    if a % 2 == 0 && b % 2 == 0 {
        return Ok(0);
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = if v.is_multiple_of(2) {
        1
    } else {
        TWO_TABLE[(a & 7) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    // b is odd and positive from here on
    loop {
        if a == 0 {
            return Ok(if b > 1 { 0 } else { k });
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TWO_TABLE[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// A real primitive character `n -> (delta/n)` attached to a fundamental discriminant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct QuadraticCharacter {
    delta: i64,
}

impl QuadraticCharacter {
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// The conductor `|delta|`.
    pub fn modulus(&self) -> u64 {
        self.delta.unsigned_abs()
    }

    pub fn eval(&self, n: i64) -> i8 {
        char_eval(self, n)
    }
}

impl TryFrom<i64> for QuadraticCharacter {
    type Error = Error;

    fn try_from(delta: i64) -> Result<Self> {
        make_character(delta)
    }
}

impl From<QuadraticCharacter> for i64 {
    fn from(chi: QuadraticCharacter) -> i64 {
        chi.delta
    }
}

impl fmt::Display for QuadraticCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}", self.delta)
    }
}

/// Validates `delta` as a fundamental discriminant other than 1.
pub fn make_character(delta: i64) -> Result<QuadraticCharacter> {
    if delta == 0 || delta == 1 {
        return Err(Error::Validation(format!(
            "{delta} does not define a nonprincipal character"
        )));
    }
    if delta == i64::MIN {
        return Err(Error::Validation("discriminant out of range".into()));
    }
    let squarefree = |m: i64| -> Result<bool> {
        Ok(m.unsigned_abs() == 1 || factorize(m.unsigned_abs())?.is_squarefree())
    };
    match delta.rem_euclid(4) {
        1 => {
            if !squarefree(delta)? {
                return Err(Error::Validation(format!(
                    "{delta} = 1 mod 4 but is not squarefree"
                )));
            }
        }
        0 => {
            let m = delta / 4;
            let r = m.rem_euclid(4);
            if r != 2 && r != 3 {
                return Err(Error::Validation(format!(
                    "{delta} = 4*{m} but {m} = {r} mod 4 (need 2 or 3)"
                )));
            }
            if !squarefree(m)? {
                return Err(Error::Validation(format!(
                    "{delta} = 4*{m} but {m} is not squarefree"
                )));
            }
        }
        r => {
            return Err(Error::Validation(format!(
                "{delta} = {r} mod 4; a fundamental discriminant is 0 or 1 mod 4"
            )))
        }
    }
    Ok(QuadraticCharacter { delta })
}

pub fn char_eval(chi: &QuadraticCharacter, n: i64) -> i8 {
    // delta is nonzero, so the symbol is always defined
    kronecker(chi.delta, n).expect("delta != 0")
}

/// A polynomial over `F_p` for an odd prime `p`, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyOverFp {
    p: u64,
    coefficients: Vec<u64>,
    squarefree: bool,
}

impl PolyOverFp {
    /// Builds `sum coefficients[i] * y^i` reduced mod `p`.
    pub fn new(p: u64, coefficients: &[i64]) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::Domain(format!("{p} is not an odd prime")));
        }
        let mut coeffs: Vec<u64> = coefficients
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u64)
            .collect();
        trim(&mut coeffs);
        if coeffs.is_empty() {
            return Err(Error::Domain("the zero polynomial has no leading coefficient".into()));
        }
        if coeffs.len() - 1 > MAX_POLY_DEGREE {
            return Err(Error::Domain(format!(
                "degree {} exceeds the maximum {MAX_POLY_DEGREE}",
                coeffs.len() - 1
            )));
        }
        let squarefree = is_squarefree(&coeffs, p);
        Ok(PolyOverFp {
            p,
            coefficients: coeffs,
            squarefree,
        })
    }

    /// `prod (y + roots[i])`.
    pub fn from_shifts(p: u64, shifts: &[i64]) -> Result<Self> {
        let mut c = vec![1i64];
        for &s in shifts {
            let s = s.rem_euclid(p as i64) as i128;
            let mut next = vec![0i64; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] = ((next[i] as i128 + ci as i128 * s) % p as i128) as i64;
                next[i + 1] = ((next[i + 1] as i128 + ci as i128) % p as i128) as i64;
            }
            c = next;
        }
        Self::new(p, &c)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    pub fn is_squarefree(&self) -> bool {
        self.squarefree
    }

    pub fn eval(&self, y: u64) -> u64 {
        let p = self.p as u128;
        let y = y as u128 % p;
        self.coefficients
            .iter()
            .rev()
            .fold(0u128, |acc, &c| (acc * y + c as u128) % p) as u64
    }
}

fn trim(c: &mut Vec<u64>) {
    while c.last() == Some(&0) {
        c.pop();
    }
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let lead_inv = mod_inverse(*b.last().unwrap(), p).unwrap();
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let factor = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
        for (i, &bi) in b.iter().enumerate() {
            let sub = (factor as u128 * bi as u128 % p as u128) as u64;
            r[shift + i] = (r[shift + i] + p - sub) % p;
        }
        trim(&mut r);
    }
    r
}

/// Squarefree test over `F_p` via `gcd(Q, Q')`.
///
/// If `Q' = 0` then `Q(y) = R(y^p) = R(y)^p` in characteristic `p`, which has
/// repeated roots whenever `deg Q >= 1`.
fn is_squarefree(q: &[u64], p: u64) -> bool {
    if q.len() <= 2 {
        return true;
    }
    let mut d: Vec<u64> = q
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| (i as u128 * c as u128 % p as u128) as u64)
        .collect();
    trim(&mut d);
    if d.is_empty() {
        return false;
    }
    let (mut a, mut b) = (q.to_vec(), d);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a.len() == 1
}

/// Table of quadratic residues mod `p` (index `v` is true iff `v` is a nonzero square).
fn square_table(p: u64) -> Vec<bool> {
    let mut is_sq = vec![false; p as usize];
    for y in 1..=(p - 1) / 2 {
        is_sq[(y as u128 * y as u128 % p as u128) as usize] = true;
    }
    is_sq
}

/// `sum_{y=1}^{p} (Q(y)/p)`, evaluated exhaustively.
pub fn poly_char_sum(p: u64, q: &PolyOverFp) -> Result<i64> {
    if q.p != p {
        return Err(Error::Domain(format!(
            "polynomial is over F_{} but the sum was requested over F_{p}",
            q.p
        )));
    }
    if p > MAX_EXHAUSTIVE_PRIME {
        return Err(Error::Resource(format!(
            "p = {p} exceeds the exhaustive evaluation budget {MAX_EXHAUSTIVE_PRIME}"
        )));
    }
    let is_sq = square_table(p);
    let sum = (1..=p)
        .map(|y| {
            let v = q.eval(y);
            match v {
                0 => 0i64,
                _ if is_sq[v as usize] => 1,
                _ => -1,
            }
        })
        .sum();
    Ok(sum)
}

/// A character sum together with its Weil bound `(d - 1) sqrt(p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeilMargin {
    pub sum: i64,
    pub bound: f64,
    pub satisfied: bool,
}

pub fn weil_margin(p: u64, q: &PolyOverFp) -> Result<WeilMargin> {
    if q.degree() == 0 {
        return Err(Error::Domain("Weil bound needs degree >= 1".into()));
    }
    if !q.squarefree {
        return Err(Error::Domain(
            "polynomial is not squarefree over F_p; the Weil bound does not apply".into(),
        ));
    }
    let sum = poly_char_sum(p, q)?;
    let bound = (q.degree() as f64 - 1.0) * (p as f64).sqrt();
    Ok(WeilMargin {
        sum,
        bound,
        satisfied: (sum.unsigned_abs() as f64) <= bound,
    })
}
