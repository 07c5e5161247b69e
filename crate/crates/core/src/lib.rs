//! Simulation and analysis of one-bit encryption with weakly random keys and a
//! single-qubit ciphertext.
//!
//! The key selects a pure state on the Bloch sphere; plaintext `0` is sent as
//! that state and plaintext `1` as its antipode. An adversary who knows the key
//! distribution (but not the key) must discriminate the two average states.
//! The crate provides:
//!
//! - exact Bloch-vector algebra for qubit states ([`bloch`]),
//! - min-entropy key sources, discrete and continuous ([`sources`]),
//! - the classical and quantum guessing bounds ([`bounds`]),
//! - discrete key codes on the sphere and their file format ([`codes`]),
//! - worst-case key distribution search ([`adversary`]),
//! - a Monte Carlo protocol simulator ([`protocol`]),
//! - experiment drivers used by the command-line tool ([`experiments`]).

// `!(x >= 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adversary;
pub mod bloch;
pub mod bounds;
pub mod codes;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod protocol;
pub mod rng;
pub mod sources;

pub use adversary::{AdversaryReport, SearchMethod};
pub use bloch::{DensityQubit, PureQubit, Vec3};
pub use bounds::CapGeometry;
pub use codes::{CodeKind, QubitCode};
pub use error::{Error, Result};
pub use rng::RngStream;
pub use sources::{CapDistribution, KeyDistribution};
