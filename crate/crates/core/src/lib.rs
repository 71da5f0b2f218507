//! Star bodies in ℝⁿ given by radial functions, their conical and hyperplane
//! section functions, and the equator transform
//!
//! ```text
//!     A f (ξ) = ∫_{S^{n-1} ∩ ξ⊥} ∂f/∂ψ (x) dx
//! ```
//!
//! where ψ is the latitude measured from the equator ξ⊥ towards the pole ξ.
//! A star body is 0-symmetric exactly when `A f ≡ 0` for `f = ρ^{n-1}/(n-1)`,
//! and `A f (ξ)` is the slope at `z = 0` of the conical section function
//! `z ↦ vol_{n-1}(K ∩ C(ξ, z))`. The [`detector`] module turns this into a
//! numerical symmetry test.
//!
//! The crate is `no_std` and only needs `alloc`. All evaluators are pure and
//! `Send + Sync`; IO, file formats and parallel sweeps live in the `starsym`
//! companion crate.
#![no_std]

extern crate alloc;

pub mod bodies;
pub mod detector;
mod error;
pub mod fd;
pub mod field;
pub mod gauss;
pub mod harmonics;
pub mod linalg;
pub mod oracle;
pub mod roots;
pub mod slice;
pub mod sphere;

pub use error::{Error, Result};
pub use field::{RadialField, ScalarField, Smoothness, SphereFunction};
pub use linalg::Rotation;
pub use sphere::{Direction, EquatorFrame, EquatorQuadrature, MAX_DIM, MIN_DIM};
