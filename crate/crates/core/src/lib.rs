//! Orthonormalization of lattices of unitary translates.
//!
//! Given a seed vector and a commuting family of unitaries, the overlaps of
//! the translates determine a density on the torus. Where that density is
//! strictly positive, the Fourier coefficients of its inverse square root
//! produce a translation-stable orthonormal family. The crate covers the
//! one-dimensional engine ([`core1d`]) with its worked seeds ([`examples1d`]),
//! the coherent-state lattice ([`lattice2d`]), a truncated number-basis
//! realization of the operators involved ([`fock`]) and the kq representation
//! ([`zak`]).

pub mod core1d;
pub mod error;
pub mod examples1d;
pub mod fock;
pub mod lattice2d;
pub mod numeric;
pub mod torus;
pub mod zak;

pub use error::{Error, Result};
pub use torus::{CenteredGrid2D, CenteredSeq, TorusFunction1D, TorusFunction2D};
