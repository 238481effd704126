//! Exact-arithmetic toolkit for modified differential Lie triple systems.
//!
//! A Lie triple system is a vector space with a trilinear bracket that is
//! skew-symmetric in its first two slots and satisfies a ternary cyclic
//! identity together with a five-argument derivation identity. A modified
//! differential of weight `lambda` is a linear operator `d` with
//!
//! ```text
//! d([a,b,c]) = [d(a),b,c] + [a,d(b),c] + [a,b,d(c)] + lambda [a,b,c].
//! ```
//!
//! Everything is represented by structure constants over arbitrary-precision
//! rationals, so every check in this crate is exact: no tolerances and no
//! floating point anywhere.
//!
//! - [`linalg`] — rationals, dense matrices, reduced row echelon form,
//!   rank / nullspace / solve.
//! - [`lts`] — triple systems, modified differentials, representations,
//!   validators, and the standard constructions (adjoint, semidirect
//!   product, dual, scaling, induced from a Lie algebra).
//! - [`cochain`] — odd-degree cochain spaces over constrained bases, the
//!   coboundary `delta`, the weight map `phi`, the pair differential.
//! - [`cohomology`] — cocycle / coboundary / cohomology dimensions with
//!   explicit representatives.
//! - [`deformation`] — truncated one-parameter deformations, infinitesimals,
//!   formal isomorphisms, rigidity certification.
//! - [`extension`] — abelian extensions, cocycle extraction, equivalence.
//! - [`io`] — the JSON file format and report structures used by the CLI.
//!
//! With the default `parallel` feature the heavy inner loops (row
//! elimination, operator-matrix assembly, exhaustive identity checks) fan
//! out through rayon; disabling the feature runs the same loops
//! sequentially with bit-identical results.

pub mod cochain;
pub mod cohomology;
pub mod deformation;
pub mod error;
pub mod extension;
pub mod fixtures;
pub mod io;
pub mod linalg;
pub mod lts;
mod par;
pub mod sampling;
mod tensor;

pub use error::Error;
pub use linalg::{rat, rat_int, Matrix, Rational};
pub use tensor::TensorMap;
