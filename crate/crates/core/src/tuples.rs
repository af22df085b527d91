//! Admissible k-tuples: parsing, verification, construction and narrowing.
//!
//! A tuple `h_1 < ... < h_k` is admissible when, for every prime `p`, the
//! residues `h_i mod p` miss at least one class. Only primes `p <= k` can be
//! covered, so those are the only ones checked.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numth::primes_up_to;

/// A strictly increasing list of offsets that has not been checked for admissibility.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateTuple {
    offsets: Vec<u64>,
}

impl CandidateTuple {
    /// Normalizes to `h_1 = 0`; fails if the offsets are empty or not strictly increasing.
    pub fn new(offsets: Vec<i64>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::Domain("a tuple needs at least one offset".into()));
        }
        if let Some(i) = offsets.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "offsets not strictly increasing at position {}: {} then {}",
                i + 1,
                offsets[i],
                offsets[i + 1]
            )));
        }
        let base = offsets[0];
        Ok(CandidateTuple {
            offsets: offsets.iter().map(|&h| (h - base) as u64).collect(),
        })
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn diameter(&self) -> u64 {
        self.offsets[self.offsets.len() - 1] - self.offsets[0]
    }
}

/// A tuple whose admissibility has been verified.
///
/// Only [`is_admissible`] and the constructors in this module produce values
/// of this type; offsets are always normalized so that `h_1 = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AdmissibleTuple {
    offsets: Vec<u64>,
}

impl AdmissibleTuple {
    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn diameter(&self) -> u64 {
        self.offsets[self.offsets.len() - 1]
    }

    /// SHA-256 of the canonical file rendering.
    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(write_tuple(self).as_bytes()))
    }

    fn from_window(window: &[u64]) -> Self {
        let base = window[0];
        AdmissibleTuple {
            offsets: window.iter().map(|&h| h - base).collect(),
        }
    }
}

/// The prime `p` at which a tuple meets every residue class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InadmissibilityWitness {
    pub prime: u64,
    /// `0..p`, every class hit by some `h_i`.
    pub residues: Vec<u64>,
}

impl fmt::Display for InadmissibilityWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "not admissible: the offsets cover every residue class mod {}",
            self.prime
        )
    }
}

impl std::error::Error for InadmissibilityWitness {}

/// Parses the tuple file format: `#` starts a comment line, integers are
/// separated by whitespace or commas and must be strictly increasing.
pub fn parse_tuple(text: &str) -> Result<CandidateTuple> {
    let mut offsets: Vec<i64> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') {
            continue;
        }
        for token in trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let value: i64 = token.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{token}` is not an integer"),
            })?;
            if let Some(&last) = offsets.last() {
                if value <= last {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("{value} does not exceed the previous entry {last}"),
                    });
                }
            }
            offsets.push(value);
        }
    }
    if offsets.is_empty() {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            message: "no offsets found".into(),
        });
    }
    CandidateTuple::new(offsets)
}

/// One offset per line, preceded by a header comment with `k` and the diameter.
pub fn write_tuple(t: &AdmissibleTuple) -> String {
    let mut out = format!(
        "# admissible k-tuple\n# k = {}\n# diameter = {}\n",
        t.k(),
        t.diameter()
    );
    for h in &t.offsets {
        out.push_str(&h.to_string());
        out.push('\n');
    }
    out
}

/// Checks every prime `p <= k` and reports the smallest covering prime, if any.
pub fn is_admissible(t: &CandidateTuple) -> std::result::Result<AdmissibleTuple, InadmissibilityWitness> {
    let k = t.k() as u64;
    if k < 2 {
        return Ok(AdmissibleTuple {
            offsets: t.offsets.clone(),
        });
    }
    let primes = primes_up_to(k).expect("k fits the sieve budget").into_vec();
    let offsets = &t.offsets;
    let covering = primes
        .par_iter()
        .with_min_len(16)
        .find_first(|&&p| covers_all_classes(offsets, p));
    match covering {
        Some(&p) => Err(InadmissibilityWitness {
            prime: p,
            residues: (0..p).collect(),
        }),
        None => Ok(AdmissibleTuple {
            offsets: offsets.clone(),
        }),
    }
}

/// Residues are tracked incrementally along the sorted offsets, which avoids
/// a division per element when consecutive gaps are small relative to `p`.
fn covers_all_classes(offsets: &[u64], p: u64) -> bool {
    let mut seen = vec![false; p as usize];
    let mut distinct = 0u64;
    let mut r = offsets[0] % p;
    let mut prev = offsets[0];
    for (i, &h) in offsets.iter().enumerate() {
        let gap = h - prev;
        r += if gap < p { gap } else { gap % p };
        if r >= p {
            r -= p;
        }
        prev = h;
        if !seen[r as usize] {
            seen[r as usize] = true;
            distinct += 1;
            if distinct == p {
                return true;
            }
        }
        // not enough elements left to reach the remaining classes
        if distinct + ((offsets.len() - 1 - i) as u64) < p {
            return false;
        }
    }
    false
}

/// The `k` consecutive primes following `pi(k)`, shifted to start at zero.
///
/// None of these primes is divisible by a prime `p <= k`, so class 0 is
/// missed for every such `p`.
pub fn construct_primes_tuple(k: usize) -> Result<AdmissibleTuple> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    let n = 2 * k as u64 + 6;
    let nf = n as f64;
    // p_n < n (ln n + ln ln n) for n >= 6
    let mut limit = (nf * (nf.ln() + nf.ln().ln())).ceil() as u64 + 10;
    loop {
        let table = primes_up_to(limit)?;
        let skip = table.count_up_to(k as u64);
        if table.len() >= skip + k {
            let window = &table.primes()[skip..skip + k];
            return Ok(AdmissibleTuple::from_window(window));
        }
        limit *= 2;
    }
}

fn check_target(t: &AdmissibleTuple, target_k: usize) -> Result<()> {
    if target_k == 0 {
        return Err(Error::Domain("target k must be >= 1".into()));
    }
    if target_k > t.k() {
        return Err(Error::Domain(format!(
            "target k = {target_k} exceeds the tuple size {}",
            t.k()
        )));
    }
    Ok(())
}

/// Keeps the first `target_k` offsets.
pub fn narrow_end(t: &AdmissibleTuple, target_k: usize) -> Result<AdmissibleTuple> {
    check_target(t, target_k)?;
    Ok(AdmissibleTuple::from_window(&t.offsets[..target_k]))
}

/// The contiguous window of `target_k` offsets with least diameter; ties go
/// to the leftmost window.
pub fn narrow_best_window(t: &AdmissibleTuple, target_k: usize) -> Result<AdmissibleTuple> {
    check_target(t, target_k)?;
    let (start, _) = t
        .offsets
        .windows(target_k)
        .enumerate()
        .map(|(i, w)| (i, w[target_k - 1] - w[0]))
        .min_by_key(|&(i, d)| (d, i))
        .expect("at least one window");
    Ok(AdmissibleTuple::from_window(
        &t.offsets[start..start + target_k],
    ))
}

/// `k ln k + k ln ln k - k`, the diameter envelope of the consecutive-primes
/// construction without its `o(k)` term. A heuristic, not a bound.
pub fn hk_asymptotic_bound(k: u64) -> Result<f64> {
    if k < 3 {
        return Err(Error::Domain(format!("k = {k} < 3 makes ln ln k non-positive")));
    }
    let kf = k as f64;
    Ok(kf * kf.ln() + kf * kf.ln().ln() - kf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn admissible(offsets: &[i64]) -> AdmissibleTuple {
        is_admissible(&CandidateTuple::new(offsets.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(parse_tuple("0 2 6").unwrap().offsets(), &[0, 2, 6]);
        assert_eq!(parse_tuple("# comment\n0\n4\n6").unwrap().offsets(), &[0, 4, 6]);
        assert_eq!(parse_tuple("0, 2,6\n\n 8").unwrap().offsets(), &[0, 2, 6, 8]);
        assert_eq!(parse_tuple("-6 -4 0").unwrap().offsets(), &[0, 2, 6]);
        match parse_tuple("0 2 2") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match parse_tuple("# header\n0\n2\nx3") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("x3"));
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_tuple("# nothing\n").is_err());
    }

    #[test]
    fn admissibility_examples() {
        let w = is_admissible(&parse_tuple("0 2 4").unwrap()).unwrap_err();
        assert_eq!(w.prime, 3);
        assert_eq!(w.residues, vec![0, 1, 2]);
        assert_eq!(admissible(&[0, 2, 6]).diameter(), 6);
        assert_eq!(admissible(&[0, 4, 6, 10, 12, 16]).k(), 6);
        assert_eq!(admissible(&[7]).offsets(), &[0]);
        // [0,1] covers both classes mod 2
        assert_eq!(is_admissible(&parse_tuple("0 1").unwrap()).unwrap_err().prime, 2);
    }

    #[test]
    fn primes_tuple_examples() {
        assert_eq!(construct_primes_tuple(1).unwrap().offsets(), &[0]);
        assert_eq!(construct_primes_tuple(3).unwrap().offsets(), &[0, 2, 6]);
        // primes 101..691 (p_26..p_125)
        let t = construct_primes_tuple(100).unwrap();
        assert_eq!(t.k(), 100);
        assert_eq!(t.diameter(), 590);
        let c = CandidateTuple::new(t.offsets().iter().map(|&h| h as i64).collect()).unwrap();
        assert!(is_admissible(&c).is_ok());
    }

    #[test]
    fn narrowing_examples() {
        let t = admissible(&[0, 4, 6, 10, 12, 16]);
        assert_eq!(narrow_end(&t, 4).unwrap().offsets(), &[0, 4, 6, 10]);
        assert_eq!(narrow_end(&t, 6).unwrap(), t);
        assert_eq!(narrow_best_window(&t, 6).unwrap(), t);
        // windows: [0,4,6] d=6, [4,6,10] d=6, [6,10,12] d=6, [10,12,16] d=6
        assert_eq!(narrow_best_window(&t, 3).unwrap().offsets(), &[0, 4, 6]);
        assert!(matches!(narrow_end(&t, 0), Err(Error::Domain(_))));
        assert!(matches!(narrow_best_window(&t, 0), Err(Error::Domain(_))));
        assert!(matches!(narrow_end(&t, 7), Err(Error::Domain(_))));
        let u = admissible(&[0, 2, 6, 8, 12, 18, 20]);
        assert_eq!(narrow_best_window(&u, 4).unwrap().offsets(), &[0, 2, 6, 8]);
        assert_eq!(narrow_best_window(&u, 2).unwrap().offsets(), &[0, 2]);
    }

    #[test]
    fn hk_envelope() {
        let v = hk_asymptotic_bound(3).unwrap();
        let expected = 3.0 * 3f64.ln() + 3.0 * 3f64.ln().ln() - 3.0;
        assert!((v - expected).abs() < 1e-12);
        assert!((v - 0.5779).abs() < 1e-3);
        let v16 = hk_asymptotic_bound(16).unwrap();
        assert!((v16 - (16.0 * 16f64.ln() + 16.0 * 16f64.ln().ln() - 16.0)).abs() < 1e-12);
        let v5229 = hk_asymptotic_bound(5229).unwrap();
        // 44770.569 + 11228.393 - 5229; the published 5229-tuple (diameter 49342) beats it
        assert!((v5229 - 50_769.962_439).abs() < 1e-5, "{v5229}");
        assert!(matches!(hk_asymptotic_bound(2), Err(Error::Domain(_))));
    }

    #[test]
    fn write_parse_round_trip() {
        let t = admissible(&[0, 4, 6, 10, 12, 16]);
        let text = write_tuple(&t);
        assert!(text.starts_with("# admissible k-tuple\n# k = 6\n# diameter = 16\n"));
        assert_eq!(parse_tuple(&text).unwrap().offsets(), t.offsets());
        assert_eq!(t.content_hash().len(), 64);
    }
}
