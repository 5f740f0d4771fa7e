//! Symbolic dynamics on Cantor space, finite sections of Koopman operators,
//! residual-based spectral towers and finite decision towers.

pub mod cantor;
pub mod dynamics;
pub mod error;
pub mod koopman;
pub mod spectral_sets;
pub mod tower;
pub mod xi;

pub use cantor::{CantorPoint, Dyadic, Norm, Word};
pub use dynamics::{MapDescriptor, SymbolicMap, TreeVersion};
pub use error::{Error, Result};
pub use spectral_sets::SpectralSet;

/// Crate version, embedded in every output artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
