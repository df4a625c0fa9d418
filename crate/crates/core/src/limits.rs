//! Resolution caps per value backend.
//!
//! The caps bound memory (`2^M` values per grid). They are process-wide
//! configuration, adjustable at startup; exceeding a cap is a hard error.

use core::sync::atomic::{AtomicU32, Ordering};

use crate::grid::Backend;

pub const DEFAULT_FLOAT_CAP: u32 = 26;
pub const DEFAULT_EXACT_CAP: u32 = 16;

/// Bit operations on cells use `usize`/`u64`; nothing beyond this is ever valid.
pub const ABSOLUTE_MAX_RESOLUTION: u32 = 30;

static FLOAT_CAP: AtomicU32 = AtomicU32::new(DEFAULT_FLOAT_CAP);
static EXACT_CAP: AtomicU32 = AtomicU32::new(DEFAULT_EXACT_CAP);

pub fn cap(backend: Backend) -> u32 {
    match backend {
        Backend::Float => FLOAT_CAP.load(Ordering::Relaxed),
        Backend::Exact => EXACT_CAP.load(Ordering::Relaxed),
    }
}

/// Sets the cap for one backend, clamped to [`ABSOLUTE_MAX_RESOLUTION`].
pub fn set_cap(backend: Backend, value: u32) {
    let value = value.min(ABSOLUTE_MAX_RESOLUTION);
    match backend {
        Backend::Float => FLOAT_CAP.store(value, Ordering::Relaxed),
        Backend::Exact => EXACT_CAP.store(value, Ordering::Relaxed),
    }
}
