//! Carry propagation in abstract numeration systems.
//!
//! Representation languages are built from signatures, automata, rational
//! bases, greedy bases and β-expansions. For each one the crate enumerates
//! words in radix order, measures the carry propagation of the successor
//! function and, where the theory allows, computes its exact limit.

pub mod automata;
pub mod carry;
pub mod error;
pub mod numeration;
pub mod odometer;
pub mod poly;
pub mod recurrence;
pub mod roots;
pub mod signature;
pub mod spectral;
pub mod words;

pub use error::{Error, Result};
pub use poly::Poly;
pub use recurrence::{minimal_recurrence, LinearRecurrence};
pub use words::{Alphabet, Digit, Word};
