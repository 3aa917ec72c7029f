//! Inclusion-exclusion inversion of binomial moments,
//! `p[n] = sum_{m >= n} (-1)^(m-n) C(m, n) b[m]`, in extended precision.
//!
//! The alternating sum cancels terms as large as `C(M, n) max b`, so it runs in
//! [`Ext`] and tracks how many bits each entry loses. When the loss plus
//! [`GUARD_BITS`] exceeds the working width the inversion fails with
//! [`Error::PrecisionExhausted`] instead of returning noise.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::moments::BinomialMomentSeq;
use crate::error::{Error, Result};
use crate::pmf::{Pmf, DEFAULT_TAIL_TOLERANCE};
use crate::real::{Ext, Real};

/// Bits kept in reserve beyond the measured cancellation.
pub const GUARD_BITS: u32 = 64;

/// Entries below `2^ABSOLUTE_FLOOR_LOG2` need only be resolved absolutely.
const ABSOLUTE_FLOOR_LOG2: f64 = -64.0;

/// The pmf on `0..=M` whose binomial moments are `b`.
pub fn pmf_from_binomial_moments<R: Real>(
    b: &BinomialMomentSeq<R>,
    precision_bits: u32,
) -> Result<Pmf> {
    if precision_bits < 53 {
        return Err(Error::InvalidParameter(
            "precision must be at least 53 bits",
        ));
    }
    let ext: Vec<Ext> = b
        .values()
        .iter()
        .map(|v| v.to_ext(precision_bits))
        .collect();
    let values = invert_binomial_moments(&ext, precision_bits)?;
    Pmf::new(values, DEFAULT_TAIL_TOLERANCE)
}

/// Inclusion-exclusion on raw extended-precision moments. Negative entries
/// within the round-off of the working width are clamped to zero.
pub(crate) fn invert_binomial_moments(b: &[Ext], bits: u32) -> Result<Vec<f64>> {
    let order = b.len() - 1;
    let mut out = Vec::with_capacity(b.len());
    for (n, bn) in b.iter().enumerate() {
        let mut binom = Ext::new(1.0, bits);
        let mut acc = bn.clone();
        let mut max_log2 = bn.log2_abs();
        for (m, bm) in b.iter().enumerate().skip(n + 1) {
            binom = binom * Ext::from_usize(m, bits) / Ext::from_usize(m - n, bits);
            let term = binom.clone() * bm.clone();
            max_log2 = max_log2.max(term.log2_abs());
            acc = if (m - n) % 2 == 0 {
                acc + term
            } else {
                acc - term
            };
        }
        let value = acc.to_f64();
        if max_log2.is_finite() {
            let lost = max_log2 - acc.log2_abs().max(ABSOLUTE_FLOOR_LOG2);
            let required = lost.ceil().max(0.0) as u32 + GUARD_BITS;
            if required > bits {
                return Err(Error::PrecisionExhausted {
                    required_bits: required,
                    available_bits: bits,
                });
            }
        }
        if value < 0.0 {
            let roundoff = 16.0 * (order + 1) as f64 * (max_log2 - bits as f64).exp2();
            if value < -roundoff {
                return Err(Error::NotAPmf { index: n, value });
            }
            out.push(0.0);
        } else {
            out.push(value);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::total_variation;
    use crate::real::DEFAULT_PRECISION_BITS;
    use crate::transforms::moments::{binomial_moments, binomial_moments_ext};
    use alloc::vec;

    fn seq(b: Vec<f64>) -> BinomialMomentSeq<f64> {
        BinomialMomentSeq::new(b).unwrap()
    }

    #[test]
    fn small_examples() {
        let bits = DEFAULT_PRECISION_BITS;
        let p = pmf_from_binomial_moments(&seq(vec![1.0, 0.0, 0.0]), bits).unwrap();
        assert_eq!(p.probs(), &[1.0, 0.0, 0.0]);
        let p = pmf_from_binomial_moments(&seq(vec![1.0, 2.0, 1.0]), bits).unwrap();
        assert_eq!(p.probs(), &[0.0, 0.0, 1.0]);
        let p = pmf_from_binomial_moments(&seq(vec![1.0, 0.3, 0.0]), bits).unwrap();
        assert!((p.probs()[0] - 0.7).abs() < 1e-16);
        assert!((p.probs()[1] - 0.3).abs() < 1e-16);
    }

    #[test]
    fn round_trip_through_extended_moments() {
        let probs: Vec<f64> = (0..41).map(|n| ((n * 7 + 3) % 11) as f64 + 0.5).collect();
        let total: f64 = probs.iter().sum();
        let p = Pmf::new(probs.iter().map(|v| v / total).collect(), 1e-12).unwrap();
        let b = binomial_moments_ext(&p, 40, DEFAULT_PRECISION_BITS);
        let back = pmf_from_binomial_moments(&b, DEFAULT_PRECISION_BITS).unwrap();
        assert!(total_variation(&back, &p) < 1e-15);
    }

    #[test]
    fn inconsistent_moments_are_not_a_pmf() {
        let err = pmf_from_binomial_moments(&seq(vec![1.0, 2.0, 0.0]), 128);
        assert!(matches!(err, Err(Error::NotAPmf { index: 0, .. })));
    }

    #[test]
    fn narrow_precision_is_reported() {
        let probs = vec![1.0 / 61.0; 61];
        let p = Pmf::new(probs, 1e-12).unwrap();
        let b = binomial_moments(&p, 60).unwrap();
        assert!(matches!(
            pmf_from_binomial_moments(&b, 64),
            Err(Error::PrecisionExhausted {
                available_bits: 64,
                ..
            })
        ));
        assert!(pmf_from_binomial_moments(&b, 40).is_err());
    }
}
