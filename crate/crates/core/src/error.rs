//! Error types shared across the matrix, tail, and witness modules.

pub use crate::scalar::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("indexing modes differ")]
    ModeMismatch,
    #[error("bad window [{lo},{hi}]: {reason}")]
    BadWindow { lo: i64, hi: i64, reason: &'static str },
    #[error("bandwidth {0} is negative")]
    NegativeBandwidth(i64),
    #[error("block size {0} must be >= 1")]
    BadBlockSize(i64),
    #[error("window too small: fewer than two blocks fit")]
    WindowTooSmall,
    #[error("window length not divisible by block size {block_size}")]
    BlockMisalignment { block_size: i64 },
    #[error("product undefined for {left} x {right} representations")]
    UndefinedProduct { left: &'static str, right: &'static str },
    #[error("symplectic involution needs an even, pair-aligned window")]
    UnpairedWindow,
    #[error("involution undefined on class {0}")]
    InvolutionUndefinedForClass(crate::window::ClassTag),
    #[error("not a finitary value (complete support unknown)")]
    NotFinitary,
    #[error("input is not band-tagged")]
    NotBand,
    #[error("stored entry at ({0}, {1}) violates the matrix's own tag or window")]
    EntryOutOfRange(i64, i64),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("tails overlap: two tails cover the same diagonal positions")]
    OverlappingTails,
    #[error("core entry at ({0}, {1}) lies inside a tail region")]
    CoreOverlapsTail(i64, i64),
    #[error("position ({0}, {1}) does not exist for this indexing mode")]
    InvalidIndex(i64, i64),
}
