//! Subordinators and the Poisson process time-changed by them.
//!
//! The crate is organised in layers:
//!
//! - [`levy`]: Lévy triples `(α, β, Λ)`, the Laplace exponent `Ψ`, the
//!   jump-count rate `Ψ(1)`, jump atoms `m_j`, the jump generating function
//!   and the law of the jumps of `S` seen by `Π(S(·))`.
//! - [`samplers`]: paths of Poisson, compound Poisson, gamma, stable and
//!   truncated generic subordinators, with killing.
//! - [`subordination`]: `Π(S(·))` on a grid, jump extraction and the
//!   coarse-interval discretization.
//! - [`verify`]: Monte Carlo and deterministic checks of the identities that
//!   tie these together, with JSON/CSV reports.
//! - [`cli`]: the `subord` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod levy;
pub mod quad;
pub mod rng;
pub mod samplers;
pub mod special;
pub mod subordination;
pub mod variates;
pub mod verify;

pub use error::{Error, Result};
pub use levy::{Activity, LevyMeasure, LevyTriple, SJumpLaw};
pub use rng::{RngState, StreamRng};
pub use samplers::{SubordinatorPath, SubordinatorSampler};
pub use subordination::{JumpRecord, SubordinatedPoissonPath};
pub use verify::VerificationReport;
