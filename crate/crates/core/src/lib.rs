//! Exact structured linear algebra for infinite-matrix algebras, verifiable
//! at desk scale.
//!
//! The library provides:
//!
//! * exact scalars over the rationals and GF(p) for odd primes ([`scalar`]);
//! * finite-support and class-tagged windowed matrices with guarantee-region
//!   semantics, brackets, and involutions ([`matrix`], [`window`]);
//! * tail matrices: a finitary core plus eventually-constant diagonal tails,
//!   the exact closed form for shift-commutator preimages of finitary
//!   matrices ([`tail`]);
//! * the shift-commutator inverse operators, their verification and
//!   class-preservation reports, and exact bracket-span decomposition
//!   ([`perfectness`]);
//! * witness recovery for derivations ([`derivation`]) and for automorphisms,
//!   Lie automorphisms, and anti-automorphisms ([`automorphism`]);
//! * text file formats for all of the above ([`io`]) and deterministic
//!   pseudo-random generators for test corpora ([`sampling`]).
//!
//! All values are immutable, all operations are pure, and nothing ever
//! approximates: results are exact field elements or typed errors.

pub mod automorphism;
pub mod derivation;
pub mod error;
pub mod io;
pub mod linalg;
pub mod matrix;
pub mod ops;
pub mod perfectness;
pub mod sampling;
pub mod scalar;
pub mod tail;
pub mod window;

pub use error::MatrixError;
pub use matrix::{FinitaryMatrix, Guarantee, Involution, WindowedMatrix};
pub use scalar::{FieldSpec, Scalar, ScalarError};
pub use tail::TailMatrix;
pub use window::{BlockIndexMap, ClassTag, IndexWindow, IndexingMode};
