use alloc::string::String;

use crate::grid::Backend;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("resolution {requested} exceeds the {backend} backend cap of {cap}")]
    ResolutionCap {
        requested: u32,
        cap: u32,
        backend: Backend,
    },

    #[error("index {index} is not representable at resolution {resolution} (need index < 2^{resolution})")]
    IndexOutOfRange { index: u64, resolution: u32 },

    #[error("coordinate {coord} is out of range at resolution {resolution}")]
    CoordinateOutOfRange { coord: u32, resolution: u32 },

    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("cannot lift from resolution {from} down to {to}")]
    CannotCoarsen { from: u32, to: u32 },

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {detail}")]
    InvalidParameter { name: &'static str, detail: String },
}

impl Error {
    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }
}
