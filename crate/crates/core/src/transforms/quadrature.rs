//! Gauss-Laguerre quadrature and the Laguerre inversion
//! `p[m] = int_0^inf e^{-s} H~(-s) L_m(s) ds`.
//!
//! Nodes come from the eigenvalues of the Jacobi matrix (implicit QL), polished
//! by Newton's method on `L_K`. Weights are evaluated from the closed form
//! `w = s / ((K+1)^2 L_{K+1}(s)^2)` rather than from eigenvectors, so that the
//! tiny weights at large nodes keep full relative accuracy. Alongside `w` the
//! rule stores `w e^{s}`, which is what the inversion multiplies against the
//! bounded scaled quantities `e^{-s/2} L_m(s)` and `e^{-s/2} H~(-s)`.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::dd::Dd;
use super::laguerre::{
    laguerre_batch_scaled, laguerre_pair_unnormalized, scale, RESCALE_ABOVE, RESCALE_BITS,
};
use crate::error::{Error, Result};
use crate::pmf::{Pmf, Tail, DEFAULT_TAIL_TOLERANCE};

/// Gauss-Laguerre nodes and weights for the weight function `e^{-s}` on `[0, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    scaled_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Plain weights; those at very large nodes underflow to zero.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_k e^{s_k}`.
    pub fn scaled_weights(&self) -> &[f64] {
        &self.scaled_weights
    }

    /// `sum_k w_k f(s_k)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| w * f(s))
            .sum()
    }
}

const MAX_QL_SWEEPS: usize = 60;
const MAX_NEWTON_STEPS: usize = 50;

/// The `order`-point Gauss-Laguerre rule.
pub fn gauss_laguerre_rule(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::InvalidParameter(
            "quadrature order must be at least 1",
        ));
    }
    let mut diag: Vec<f64> = (0..order).map(|i| (2 * i + 1) as f64).collect();
    let mut off: Vec<f64> = (0..order).map(|i| (i + 1) as f64).collect();
    off[order - 1] = 0.0;
    symmetric_tridiagonal_eigenvalues(&mut diag, &mut off)
        .map_err(|_| Error::ConvergenceFailure { order })?;
    diag.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mut nodes = Vec::with_capacity(order);
    for &guess in &diag {
        nodes.push(newton_polish(order, guess).ok_or(Error::ConvergenceFailure { order })?);
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) || !(nodes[0] > 0.0) {
        return Err(Error::ConvergenceFailure { order });
    }

    let mut weights = Vec::with_capacity(order);
    let mut scaled_weights = Vec::with_capacity(order);
    for node in nodes.iter_mut() {
        let (x, scaled) = polish_and_weigh(order, *node);
        *node = x.hi;
        scaled_weights.push(scaled);
        weights.push(scaled * (-x.hi).exp() * (1.0 - x.lo));
    }
    if nodes.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::ConvergenceFailure { order });
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        scaled_weights,
    })
}

fn newton_polish(order: usize, mut x: f64) -> Option<f64> {
    let k = order as f64;
    let mut last = f64::INFINITY;
    for _ in 0..MAX_NEWTON_STEPS {
        // x L_K'(x) = K (L_K(x) - L_{K-1}(x)); the unknown common factor cancels.
        let (prev, cur) = laguerre_pair_unnormalized(order, x);
        let denom = k * (cur - prev);
        if denom == 0.0 || !denom.is_finite() {
            return None;
        }
        let step = x * cur / denom;
        if !step.is_finite() {
            return None;
        }
        // Once steps stop shrinking they are rounding noise in L_K.
        if step.abs() >= last && step.abs() <= 1e-10 * x.abs() {
            return Some(x);
        }
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            return Some(x);
        }
        last = step.abs();
    }
    None
}

/// `(L_{n-1}(x), L_n(x)) 2^{-e}` in double-double, with the exponent `e`.
fn laguerre_pair_dd(n: usize, x: Dd) -> (Dd, Dd, i32) {
    let (mut prev, mut cur) = (Dd::new(1.0), Dd::new(1.0) - x);
    let mut exp2 = 0;
    for k in 1..n {
        let coef = Dd::new((2 * k + 1) as f64) - x;
        let next = (coef * cur - Dd::new(k as f64) * prev) / Dd::new((k + 1) as f64);
        prev = cur;
        cur = next;
        if cur.hi.abs() > RESCALE_ABOVE {
            prev = prev.scalbn(-RESCALE_BITS);
            cur = cur.scalbn(-RESCALE_BITS);
            exp2 += RESCALE_BITS;
        }
    }
    (prev, cur, exp2)
}

/// Two Newton steps on `L_K` in double-double from a double-precision root,
/// then the scaled weight `s e^s / ((K+1)^2 L_{K+1}(s)^2)` at the refined root.
fn polish_and_weigh(order: usize, start: f64) -> (Dd, f64) {
    let k = Dd::new(order as f64);
    let mut x = Dd::new(start);
    for _ in 0..2 {
        let (prev, cur, _) = laguerre_pair_dd(order, x);
        let denom = k * (cur - prev);
        if denom.hi == 0.0 {
            break;
        }
        x = x - x * cur / denom;
    }
    let (prev, cur, exp2) = laguerre_pair_dd(order, x);
    // At a root of L_K the recurrence gives (K+1) L_{K+1} = -K L_{K-1}; the
    // general step keeps the small L_K term.
    let coef = Dd::new((2 * order + 1) as f64) - x;
    let next = (coef * cur - k * prev) / Dd::new((order + 1) as f64);
    let k1 = Dd::new((order + 1) as f64);
    let denom = k1 * k1 * next * next;
    let q = x / denom;
    // e^{x.hi + x.lo} = e^{x.hi} (1 + x.lo).
    let scaled = scale(q.hi * (1.0 + x.lo), -2 * exp2, x.hi);
    (x, scaled)
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e[0..n-1]` (`e[n-1]` ignored), by implicit QL with Wilkinson
/// shifts. Results are left in `d`, unsorted.
fn symmetric_tridiagonal_eigenvalues(d: &mut [f64], e: &mut [f64]) -> core::result::Result<(), ()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(());
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Something that can evaluate `H~` at non-positive arguments.
pub trait HTilde {
    /// `e^{-s/2} H~(-s)` for `s >= 0`. The factor keeps values bounded by one
    /// for genuine pmfs even where `H~(-s)` itself would overflow.
    fn eval_scaled(&self, s: f64) -> f64;

    /// [`HTilde::eval_scaled`] together with a bound on the magnitudes that
    /// entered it, which sets the rounding level of the value.
    fn eval_scaled_with_bound(&self, s: f64) -> (f64, f64) {
        let v = self.eval_scaled(s);
        (v, v.abs())
    }
}

impl HTilde for Pmf {
    fn eval_scaled(&self, s: f64) -> f64 {
        self.eval_scaled_with_bound(s).0
    }

    fn eval_scaled_with_bound(&self, s: f64) -> (f64, f64) {
        let ls = laguerre_batch_scaled(self.support_bound(), s);
        self.probs()
            .iter()
            .zip(&ls)
            .fold((0.0, 0.0), |(v, b), (p, l)| (v + p * l, b + p * l.abs()))
    }
}

/// Adapts a plain closure `t -> H~(t)` (for `t <= 0`).
#[derive(Debug, Clone, Copy)]
pub struct HTildeFn<F>(pub F);

impl<F: Fn(f64) -> f64> HTilde for HTildeFn<F> {
    fn eval_scaled(&self, s: f64) -> f64 {
        (-0.5 * s).exp() * (self.0)(-s)
    }
}

/// Recovers `p[0..=max_index]` from `H~` with the given rule.
///
/// Exact (up to rounding) when `H~` is a polynomial of degree `N` and the
/// rule order satisfies `N + max_index <= 2K - 1`.
pub fn laguerre_invert<H: HTilde + ?Sized>(
    htilde: &H,
    max_index: usize,
    rule: &QuadratureRule,
) -> Result<Pmf> {
    laguerre_invert_with_tail(
        htilde,
        max_index,
        rule,
        Tail::Finite,
        DEFAULT_TAIL_TOLERANCE,
    )
}

/// [`laguerre_invert`] for transforms of distributions with an unstored tail.
pub fn laguerre_invert_with_tail<H: HTilde + ?Sized>(
    htilde: &H,
    max_index: usize,
    rule: &QuadratureRule,
    tail: Tail,
    tail_tolerance: f64,
) -> Result<Pmf> {
    invert_scaled(|s| htilde.eval_scaled_with_bound(s), max_index, rule)
        .finish(tail, tail_tolerance)
}

/// Quadrature sums with the matching sums of term magnitudes, where each
/// transform value is replaced by its rounding bound.
#[derive(Debug, Clone)]
pub(crate) struct RawInversion {
    pub values: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub order: usize,
}

pub(crate) fn invert_scaled(
    scaled: impl Fn(f64) -> (f64, f64),
    max_index: usize,
    rule: &QuadratureRule,
) -> RawInversion {
    let mut values = alloc::vec![0.0; max_index + 1];
    let mut magnitudes = alloc::vec![0.0; max_index + 1];
    for (&s, &w) in rule.nodes.iter().zip(&rule.scaled_weights) {
        let (value, bound) = scaled(s);
        let (h, hb) = (w * value, w * bound);
        if hb == 0.0 {
            continue;
        }
        let ls = laguerre_batch_scaled(max_index, s);
        for ((v, a), l) in values.iter_mut().zip(magnitudes.iter_mut()).zip(&ls) {
            *v += h * l;
            *a += hb * l.abs();
        }
    }
    RawInversion {
        values,
        magnitudes,
        order: rule.order(),
    }
}

/// Entries this many rounding units below zero still count as round-off.
const ROUNDOFF_UNITS: f64 = 32.0;

impl RawInversion {
    /// Round-off level of entry `n`. Nodes rounded to double precision move a
    /// degree-`2K` integrand by about `2K` units relative to its magnitude,
    /// hence the growth with the rule order.
    pub fn noise(&self, n: usize) -> f64 {
        let units = ROUNDOFF_UNITS.max(4.0 * self.order as f64);
        units * f64::EPSILON * self.magnitudes[n]
    }

    /// Clamps round-off negatives, rejects genuine ones, renormalizes.
    pub fn finish(mut self, tail: Tail, tail_tolerance: f64) -> Result<Pmf> {
        for n in 0..self.values.len() {
            let v = self.values[n];
            if v < 0.0 {
                if v >= -self.noise(n) {
                    self.values[n] = 0.0;
                } else {
                    return Err(Error::NotAPmf { index: n, value: v });
                }
            }
        }
        if !tail.is_finite() {
            // Past the last entry that stands out of the noise nothing is resolved.
            let keep = (0..self.values.len())
                .rev()
                .find(|&n| self.values[n] > self.noise(n))
                .map_or(1, |n| n + 1);
            self.values.truncate(keep);
        }
        let sum: f64 = self.values.iter().sum();
        if !(sum > 0.0) {
            return Err(Error::NotAPmf {
                index: 0,
                value: sum,
            });
        }
        let deficit = (sum - 1.0).abs();
        if deficit > tail_tolerance {
            return Err(Error::MassDeficit {
                sum,
                tolerance: tail_tolerance,
            });
        }
        for v in &mut self.values {
            *v /= sum;
        }
        Pmf::with_tail(self.values, tail_tolerance, tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{geometric_pmf, total_variation, GeometricSpec};
    use crate::transforms::moments::{eval_h_tilde_laguerre, ArgumentDomain};
    use alloc::vec;

    #[test]
    fn one_and_two_point_rules() {
        let r = gauss_laguerre_rule(1).unwrap();
        assert!((r.nodes()[0] - 1.0).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);

        let r = gauss_laguerre_rule(2).unwrap();
        let sq = 2f64.sqrt();
        assert!((r.nodes()[0] - (2.0 - sq)).abs() < 1e-15);
        assert!((r.nodes()[1] - (2.0 + sq)).abs() < 1e-15);
        assert!((r.weights()[0] - (2.0 + sq) / 4.0).abs() < 1e-15);
        assert!((r.weights()[1] - (2.0 - sq) / 4.0).abs() < 1e-15);
        assert_eq!(
            gauss_laguerre_rule(0),
            Err(Error::InvalidParameter(
                "quadrature order must be at least 1"
            ))
        );
    }

    #[test]
    fn weights_sum_to_one_and_moments_are_factorials() {
        for order in [1usize, 3, 8, 17, 32, 64] {
            let r = gauss_laguerre_rule(order).unwrap();
            let total: f64 = r.weights().iter().sum();
            assert!((total - 1.0).abs() < 1e-13, "K={order} sum={total}");
            // sum_k w_k s_k^j = j! for j <= 2K - 1, compared in log space.
            let mut ln_fact = 0.0;
            for j in 0..2 * order {
                if j > 0 {
                    ln_fact += (j as f64).ln();
                }
                let got: f64 = r
                    .nodes()
                    .iter()
                    .zip(r.scaled_weights())
                    .map(|(&s, &w)| (w.ln() - s + j as f64 * s.ln() - ln_fact).exp())
                    .sum();
                assert!((got - 1.0).abs() < 1e-11, "K={order} j={j} ratio={got}");
            }
        }
    }

    #[test]
    fn large_rules_stay_accurate() {
        let r = gauss_laguerre_rule(300).unwrap();
        assert!(r.nodes().iter().all(|s| s.is_finite()));
        let total: f64 = r.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-13);
        assert!(r.scaled_weights().iter().all(|&w| w > 0.0 && w.is_finite()));
    }

    #[test]
    fn inversion_examples() {
        let rule = gauss_laguerre_rule(3).unwrap();
        let delta = laguerre_invert(&HTildeFn(|_| 1.0), 3, &rule).unwrap();
        assert!(total_variation(&delta, &Pmf::point_mass(0)) < 1e-14);

        let rule = gauss_laguerre_rule(2).unwrap();
        let p = laguerre_invert(&HTildeFn(|t| 1.0 + 0.3 * t), 1, &rule).unwrap();
        assert!((p.probs()[0] - 0.7).abs() < 1e-15);
        assert!((p.probs()[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn truncated_geometric_round_trip() {
        let g = geometric_pmf(&GeometricSpec::new(1.0, 2f64.powi(-61))).unwrap();
        assert_eq!(g.support_bound(), 60);
        let rule = gauss_laguerre_rule(64).unwrap();
        let back = laguerre_invert(&g, 60, &rule).unwrap();
        let err = back
            .probs()
            .iter()
            .zip(g.probs())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn closure_and_pmf_evaluators_agree() {
        let p = Pmf::new(vec![0.2, 0.5, 0.3], 1e-12).unwrap();
        let via_closure =
            HTildeFn(|t| eval_h_tilde_laguerre(&p, t, ArgumentDomain::NonPositive).unwrap());
        for &s in &[0.0, 0.5, 3.0, 12.0] {
            assert!((p.eval_scaled(s) - via_closure.eval_scaled(s)).abs() < 1e-14);
        }
    }

    #[test]
    fn inconsistent_transform_is_rejected() {
        // 1 + 2t is not the transform of a pmf: p[0] = -1.
        let rule = gauss_laguerre_rule(2).unwrap();
        let err = laguerre_invert(&HTildeFn(|t| 1.0 + 2.0 * t), 1, &rule);
        assert!(matches!(err, Err(Error::NotAPmf { index: 0, .. })));
    }
}
