//! Constructive machinery for limit groups and reduced group C*-algebra norms.
//!
//! The crate is `no_std` (with `alloc`); file formats, the CLI and parallel
//! experiment drivers live in the companion `residua` crate.
//!
//! Modules, bottom-up:
//! - [`words`]: free-group words, cyclic decomposition, balls.
//! - [`algebra`]: finitely supported group-algebra elements and convolution.
//! - [`normbracket`]: certified `[lower, upper]` brackets for free-group norms.
//! - [`tower`]: iterated extensions of centralizers and discriminating maps.
//! - [`baumslag`]: checks of the quantitative power lemma.
//! - [`permrep`]: permutation representations and sparse operator norms.
//! - [`torus`]: exact Fourier-model norms for `Z^r` and the Klein bottle group.
//! - [`pipeline`]: end-to-end residual-freeness certificates.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod algebra;
pub mod baumslag;
pub mod linalg;
pub mod normbracket;
pub mod permrep;
pub mod pipeline;
pub mod rng;
pub mod torus;
pub mod tower;
pub mod words;

pub use algebra::{AlgebraElement, Coefficient, Context, Limits};
pub use normbracket::{sandwich, NormBracket};
pub use tower::{Homomorphism, SubgroupDescriptor, TowerDescriptor};
pub use words::{Basis, Letter, Word};

/// Header line carried by every CSV this project emits.
pub const CSV_VERSION_HEADER: &str = "# residua-csv v1";
