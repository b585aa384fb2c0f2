//! Generation, block diagonalization, emission, and verification of
//! semidefinite programming relaxations that lower-bound the minimal Riesz
//! s-energy of point configurations on the 2-sphere.

pub mod scalar;
pub mod poly;
pub mod harmonics;
pub mod subsetspace;
pub mod groups;
pub mod sampling;
pub mod invariants;
pub mod sosmodel;
pub mod sdpgen;

pub use scalar::{CScalar, Scalar, DEFAULT_PRECISION};
pub use poly::{Expo, PolyError, SparsePoly};
