//! Absolutely entangled sets of pure states.
//!
//! A set of pure states in `C^d` is absolutely entangled with respect to a
//! tensor factorization `C^{d_1} ⊗ … ⊗ C^{d_k}` when no global unitary maps
//! every state of the set to a fully product state. This crate provides
//!
//! - state, partition and sampling primitives ([`state`], [`haar`], [`rng`]),
//! - Schmidt spectra and entropies ([`entropy`]) and product tests
//!   together with the disentangling unitary for small sets ([`separability`]),
//! - the sufficient four-state test for two qubits ([`criterion`]),
//! - the explicit families and their overlap thresholds ([`constructions`]),
//! - entropy minimization over the unitary group ([`optimizer`]),
//! - Monte-Carlo relative-volume estimates and the block-sum diagnostic
//!   ([`volume`]).

pub mod constructions;
pub mod criterion;
pub mod entropy;
pub mod error;
pub mod haar;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod rng;
pub mod separability;
pub mod state;
pub mod triangular;
pub mod volume;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use rng::RunSeed;
pub use separability::Unitary;
pub use state::{Partition, PureState, StateSet};
