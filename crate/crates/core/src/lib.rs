//! Sampling with derivatives (Hermite sampling) in shift-invariant spaces.
//!
//! The crate covers spaces `V(g) = { sum_k c_k g(. - k) }` generated by
//! Gaussians, totally positive functions of Gaussian type, the hyperbolic
//! secant, Hermite functions and sinc. It assembles derivative-sampling
//! operators, computes their frame bounds, reconstructs coefficients, audits
//! zero sets of analytic/meromorphic extensions (replication, argument
//! principle, Jensen's formula, Rolle transference) and tests multi-window
//! Gabor frames through their sampling reformulation.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gabor;
pub mod generators;
pub mod io;
pub mod par;
pub mod pointsets;
pub mod quad;
pub mod sampling;
pub mod sis;
pub mod special;
pub mod zeros;

pub use error::{Error, Result};
pub use generators::{Generator, GeneratorSpec};
pub use par::Exec;
pub use pointsets::MultiSet;
pub use sampling::{FrameBounds, SamplingOperator};
pub use sis::CoeffSeq;
