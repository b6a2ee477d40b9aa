//! Exact-arithmetic engine for class numbers and type numbers of quaternion
//! orders of level (N1, N2), together with the ternary quadratic form
//! machinery (genus enumeration, representation numbers, local densities,
//! even Clifford orders) that verifies those numbers independently.
//!
//! Everything is computed over exact integers and rationals; no floating
//! point appears anywhere in the crate.

pub mod arith;
pub mod classtype;
pub mod clifford;
pub mod densities;
pub mod eisenstein;
pub mod hurwitz;
pub mod reference;
pub mod ternary;
pub mod verify;

mod par;

pub use arith::{Factorization, Int, Rational};
pub use classtype::{class_number, type_number, TypeNumberBreakdown};
pub use eisenstein::Level;
pub use ternary::{GenusKey, TernaryForm};

use std::fmt;

/// Crate-wide error type. Mathematical misuse is reported, never silently
/// absorbed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Input outside the mathematical domain of the operation.
    Domain(String),
    /// Caller violated an operation contract (e.g. p does not divide n).
    Misuse(String),
    /// An enumeration or search budget was exhausted.
    Budget(String),
    /// A quantity that must be an integer came out fractional; carries a
    /// diagnostic dump of the offending computation.
    NonIntegral(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Misuse(msg) => write!(f, "misuse: {msg}"),
            Error::Budget(msg) => write!(f, "budget exceeded: {msg}"),
            Error::NonIntegral(msg) => write!(f, "non-integral result: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
