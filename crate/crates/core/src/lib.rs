//! Coset growth of subgroups of free groups, core automata, and the
//! surgery, act and module constructions that produce maximal growth.
//!
//! Everything numeric is exact: counts are `BigUint`, densities and
//! deficits are `BigRational`. Floating point appears only in reporting.

pub mod acts;
pub mod error;
pub mod growth;
pub mod linmod;
pub mod par;
pub mod rational;
pub mod stallings;
pub mod surgery;
pub mod words;

pub use error::{Error, Result};
pub use rational::Rational;
