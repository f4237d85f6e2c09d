//! Heat-kernel Beurling–Ahlfors extension of curves driven by a function `u`,
//! its complex dilatation, and the function-space diagnostics that quantify it.

pub mod circle;
pub mod diagnostics;
pub mod error;
pub mod extension;
pub mod field;
pub mod funcspace;
pub mod kernels;
pub mod numerics;

pub use error::{Error, Result};
