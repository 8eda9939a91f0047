//! Exact computation of proper elements in finite Coxeter groups.
//!
//! An element `w` of a rank-`n` Coxeter group is *proper* when
//! `ℓ(w) ≤ n + maxw0(W, d(w))`, where `d(w)` is the number of left descents
//! and `maxw0(W, x)` is the largest length of a longest element of a
//! standard parabolic subgroup generated by `x` simple reflections.
//!
//! The crate is split into:
//!
//! - [`coxeter`]: Coxeter matrices, diagram classification, longest lengths,
//!   group orders and `maxw0` (closed form and exhaustive).
//! - [`ring`] and [`element`]: an exact geometric representation of group
//!   elements over the integers or the golden integers.
//! - [`perm`]: one-line permutation models of types A, B and D.
//! - [`proper`]: the properness predicate, dihedral counts and the
//!   `I`-spherical reduced-word search.
//! - [`enumerate`]: layer-by-length generation, layer files and counting.
//! - [`asymptotics`]: Monte Carlo proportions, exhaustive proportions and
//!   the exponential upper-bound expressions.
//! - [`construction`]: the block-permutation family of proper permutations.

pub mod asymptotics;
pub mod construction;
pub mod coxeter;
pub mod element;
pub mod enumerate;
pub mod error;
pub mod perm;
pub mod proper;
pub mod ring;

pub use coxeter::{CoxeterMatrix, DiagramComponent, MaxW0Table, TypeLabel};
pub use element::{Engine, GroupElement};
pub use error::{Error, Result};
pub use perm::{Permutation, SignedPermutation};
pub use ring::RingScalar;
