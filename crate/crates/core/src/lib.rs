//! Beamsplitter addition of photon-number distributions.
//!
//! `Z = X ⊞_η Y` is the photon-number law at one output port of a beamsplitter
//! with transmissivity `η` fed by independent states with photon-number laws
//! `X` and `Y`. Its Laguerre transform factorises,
//! `H̃_Z(t) = H̃_X(ηt) H̃_Y((1-η)t)`, and the crate recovers `Z` either by
//! Gauss-Laguerre quadrature or by extended-precision inclusion-exclusion over
//! binomial moments. The [`dynamics`] and [`continuous`] modules carry the
//! heat flow generated by a thermal `Y`, the de Bruijn identity, log-Sobolev
//! bounds and the comparison with radial Husimi densities.

#![no_std]
// `!(a > b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod beamsplitter;
pub mod continuous;
pub mod dynamics;
pub mod error;
pub mod pmf;
pub mod real;
pub mod transforms;

pub use beamsplitter::{beamsplit_add, Backend, BeamsplitConfig, Eta};
pub use error::{Error, Result};
pub use pmf::{GeometricSpec, Pmf, Tail, DEFAULT_TAIL_TOLERANCE};
pub use real::{Ext, Real, DEFAULT_PRECISION_BITS};
