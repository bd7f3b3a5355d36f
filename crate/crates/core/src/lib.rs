//! Separable permutations, signed Schröder trees, Brownian excursion
//! extraction and the exact limit moments of pattern densities.

pub mod cli;
pub mod distribution;
pub mod error;
pub mod excursion;
pub mod experiments;
pub mod moments;
pub mod perm;
pub mod rational;
pub mod sampler;
pub mod tree;

pub use distribution::DistributionFunction;
pub use error::{ConditionCFailure, Error, Result};
pub use excursion::{Excursion, SignedExcursion};
pub use perm::Permutation;
pub use rational::Rational;
pub use tree::{SchroderTree, Sign, SignedTree};
