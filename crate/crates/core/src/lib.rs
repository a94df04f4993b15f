//! Learning orthogonal dictionaries `V = H_1 H_2 ... H_m` built from
//! Householder reflectors, from data `Y = VX + N` with Bernoulli-Uniform
//! sparse codes `X`.
//!
//! The estimators are closed-form and non-iterative: a single reflector is
//! recovered from the row means of `Y` in `O(np)`, and a product of `m`
//! reflectors sequentially in `O(nmp)`. A known-`X` orthogonal Procrustes
//! solver serves as the best-case baseline, and [`experiment`] drives seeded
//! Monte-Carlo sweeps that write CSV and SVG output.

pub mod baselines;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod householder;
pub mod metrics;
pub mod numeric;
pub mod sparse;
pub mod synthesis;

pub use error::{Error, Result};
pub use householder::{alternate_factorization, HouseholderFactor, OrthogonalProduct, Reflector};
pub use sparse::SparseMatrix;
pub use synthesis::{SparseModel, SyntheticInstance};
