//! Laguerre polynomials, moment sequences, generating functions and the
//! two inversions that take a transform back to a pmf.

mod dd;
pub mod inversion;
pub mod laguerre;
pub mod moments;
pub mod quadrature;

pub use inversion::{pmf_from_binomial_moments, GUARD_BITS};
pub use laguerre::{laguerre_batch, laguerre_batch_scaled, laguerre_eval};
pub use moments::{
    antinormal_ordered_characteristic, binomial_moments, binomial_moments_ext, binomial_moments_in,
    continuous_moments, eval_h_tilde_laguerre, normal_ordered_characteristic, ArgumentDomain,
    BinomialMomentSeq, ContinuousMomentSeq,
};
pub use quadrature::{
    gauss_laguerre_rule, laguerre_invert, laguerre_invert_with_tail, HTilde, HTildeFn,
    QuadratureRule,
};

/// Quadrature order that integrates the inversion of a product of transforms
/// with supports `n_x`, `n_y` exactly up to index `max_index`.
pub fn quadrature_order_for(n_x: usize, n_y: usize, max_index: usize) -> usize {
    n_x + n_y + max_index.div_ceil(2) + 2
}
