//! Heat kernels of two-dimensional magnetic Schrodinger operators with radial,
//! compactly supported magnetic fields, computed by partial-wave decomposition.
//!
//! The kernel is `e^{-tH}(x, y) = (2 pi)^{-1} sum_m p_m(r, r', t) e^{i m (theta - theta')}`
//! where `p_m` is the kernel of the half-line operator with potential
//! `(b(r) + m)^2 / r^2` and `b` is the cumulative flux of the field.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod exactkern;
pub mod field;
pub mod ode;
pub mod quad;
pub mod radial;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
