//! Laguerre polynomials by the three-term recurrence
//! `(n+1) L_{n+1}(x) = (2n+1-x) L_n(x) - n L_{n-1}(x)`.

use alloc::vec::Vec;

/// `L_n(x)`.
pub fn laguerre_eval(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    if n == 0 {
        return prev;
    }
    for k in 1..n {
        let next = ((2 * k + 1) as f64 - x) * cur - k as f64 * prev;
        prev = cur;
        cur = next / (k + 1) as f64;
    }
    cur
}

/// `L_0(x), ..., L_max_n(x)` in one pass.
pub fn laguerre_batch(max_n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_n + 1);
    out.push(1.0);
    if max_n == 0 {
        return out;
    }
    out.push(1.0 - x);
    for k in 1..max_n {
        let next = (((2 * k + 1) as f64 - x) * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
        out.push(next);
    }
    out
}

pub(crate) const RESCALE_BITS: i32 = 300;
pub(crate) const RESCALE_ABOVE: f64 = 2.037035976334486e90; // 2^300

/// `e^{-x/2} L_n(x)` for `n = 0..=max_n`.
///
/// For `x >= 0` every value lies in `[-1, 1]`. The recurrence runs on an
/// exactly power-of-two rescaled pair so it neither overflows nor loses
/// relative accuracy at large `x`.
pub fn laguerre_batch_scaled(max_n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_n + 1);
    let half = -0.5 * x;
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    let mut exp2 = 0i32;
    out.push(scale(prev, exp2, half));
    if max_n == 0 {
        return out;
    }
    out.push(scale(cur, exp2, half));
    for k in 1..max_n {
        let next = (((2 * k + 1) as f64 - x) * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev = libm::scalbn(prev, -RESCALE_BITS);
            cur = libm::scalbn(cur, -RESCALE_BITS);
            exp2 += RESCALE_BITS;
        }
        out.push(scale(cur, exp2, half));
    }
    out
}

/// Scaled `(L_{n-1}(x), L_n(x))` up to a common positive factor, for ratios.
pub(crate) fn laguerre_pair_unnormalized(n: usize, x: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    let (mut prev, mut cur) = (1.0, 1.0 - x);
    for k in 1..n {
        let next = (((2 * k + 1) as f64 - x) * cur - k as f64 * prev) / (k + 1) as f64;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            prev = libm::scalbn(prev, -RESCALE_BITS);
            cur = libm::scalbn(cur, -RESCALE_BITS);
        }
    }
    (prev, cur)
}

const LN2_HI: f64 = 0.693_147_180_369_123_8;
const LN2_LO: f64 = 1.908_214_929_270_587_7e-10;

/// `mantissa * 2^exp2 * e^y` without intermediate overflow or underflow.
pub(crate) fn scale(mantissa: f64, exp2: i32, y: f64) -> f64 {
    if mantissa == 0.0 {
        return 0.0;
    }
    let m = libm::round(y / core::f64::consts::LN_2);
    let r = (y - m * LN2_HI) - m * LN2_LO;
    libm::scalbn(mantissa * libm::exp(r), exp2 + m as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Explicit sum `L_n(x) = sum_k C(n,k) (-x)^k / k!`, independent of the recurrence.
    fn laguerre_explicit(n: usize, x: f64) -> f64 {
        let mut term = 1.0;
        let mut total = 1.0;
        for k in 1..=n {
            term *= -x * (n - k + 1) as f64 / (k * k) as f64;
            total += term;
        }
        total
    }

    #[test]
    fn small_degree_values() {
        assert_eq!(laguerre_eval(0, 3.7), 1.0);
        assert_eq!(laguerre_eval(1, 0.5), 0.5);
        assert_eq!(laguerre_eval(2, 2.0), -1.0);
    }

    #[test]
    fn recurrence_matches_explicit_sum() {
        for &x in &[0.0, 0.3, 1.0, 2.5, -1.5, -4.0] {
            let batch = laguerre_batch(12, x);
            for (n, &l) in batch.iter().enumerate() {
                let exact = laguerre_explicit(n, x);
                assert!(
                    (l - exact).abs() < 1e-11 * exact.abs().max(1.0),
                    "n={n} x={x}"
                );
                assert_eq!(l, laguerre_eval(n, x));
            }
        }
    }

    #[test]
    fn scaled_batch_matches_and_stays_bounded() {
        for &x in &[0.0, 0.7, 5.0, 20.0] {
            let plain = laguerre_batch(30, x);
            let scaled = laguerre_batch_scaled(30, x);
            let factor = (-0.5 * x).exp();
            for n in 0..=30 {
                let want = plain[n] * factor;
                assert!(
                    (scaled[n] - want).abs() < 1e-14 * plain[n].abs().max(1.0),
                    "n={n} x={x}"
                );
            }
        }
        for &x in &[500.0, 1500.0, 3000.0] {
            let scaled = laguerre_batch_scaled(800, x);
            assert!(scaled
                .iter()
                .all(|v| v.is_finite() && v.abs() <= 1.0 + 1e-12));
            assert!(scaled[800].abs() > 0.0);
        }
    }

    #[test]
    fn scale_handles_extreme_exponents() {
        assert!((scale(1.5, 0, 0.0) - 1.5).abs() < 1e-16);
        let v = scale(1.0, 1000, -700.0);
        let want = (1000.0 * core::f64::consts::LN_2 - 700.0).exp();
        assert!((v / want - 1.0).abs() < 1e-13);
    }
}
