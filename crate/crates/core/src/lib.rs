//! Certificates for conditional bounds on gaps between primes.
//!
//! The crate chains four independent pieces of evidence into bounds on
//! `H_m`, the smallest gap containing `m + 1` primes infinitely often:
//!
//! * [`mk`]: certified lower bounds for the sieve constant `M_k` from an
//!   explicit one-dimensional quadrature certificate;
//! * [`tuples`]: admissible `k`-tuples, their verification and narrowing;
//! * [`shift`]: the search for a residue class on which a real primitive
//!   character takes the value `-1` at every tuple element;
//! * [`gaps`]: threshold arithmetic for the level of distribution and the
//!   final `H_m` claims and report.
//!
//! [`numth`] and [`characters`] hold the exact integer arithmetic shared by
//! the rest; [`cli`] wires everything into the `gapcert` binary.

// `!(x > y)` is used deliberately so that NaN fails every check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characters;
pub mod cli;
pub mod error;
pub mod gaps;
pub mod mk;
pub mod numth;
pub mod quadrature;
pub mod shift;
pub mod tuples;

pub use error::{Error, Result};
