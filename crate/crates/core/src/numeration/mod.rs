//! Positional numeration systems beyond regular languages.

pub mod algebraic;
pub mod beta;
pub mod greedy;
pub mod rational_base;

pub use algebraic::{AlgebraicReal, NumberFieldElement};
pub use beta::{
    basis_from_beta, beta_builtin, beta_expand_one, BetaBasis, BetaProfile, ParryClass, QuasiGreedy,
};
pub use greedy::{Basis, BasisRule, GnsPce, GnsPceReport};
pub use rational_base::RationalBase;
