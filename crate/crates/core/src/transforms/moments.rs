//! Binomial and continuous moment sequences and the generating functions
//! built from them.
//!
//! For a pmf `p`, the binomial moments are `b[m] = E(X)_(m) / m! = sum_n C(n,m) p[n]`
//! and the continuous counterpart has `d[k] = E|X_c|^(2k) / k! = sum_j C(k,j) b[j]`.
//! The ordinary and exponential generating functions are
//! `H(t) = sum b[m] t^m`, `H~(t) = sum b[m] t^m / m!`, and likewise `phi`, `phi~` for `d`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::laguerre::laguerre_batch;
use crate::error::{Error, Result};
use crate::pmf::{Pmf, DEFAULT_TAIL_TOLERANCE};
use crate::real::{Ext, Real};

/// Which arguments a generating-function evaluator accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArgumentDomain {
    /// Only `t <= 0`; the series are treated as formal sums elsewhere.
    #[default]
    NonPositive,
    /// Any finite `t`, at the caller's risk.
    Unrestricted,
}

impl ArgumentDomain {
    fn check(self, t: f64) -> Result<()> {
        if !t.is_finite() || (t > 0.0 && self == ArgumentDomain::NonPositive) {
            return Err(Error::DomainError { t });
        }
        Ok(())
    }
}

/// `b[m] = E(X)_(m) / m!` for `m = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinomialMomentSeq<R: Real = f64> {
    b: Vec<R>,
    source_mean: f64,
    /// Computed through the whole stored support, so `H` is a polynomial.
    complete: bool,
}

impl<R: Real> BinomialMomentSeq<R> {
    /// Wraps a raw sequence; requires `b[0] = 1` and non-negative entries.
    pub fn new(b: Vec<R>) -> Result<Self> {
        let first = b.first().ok_or(Error::EmptyPmf)?.to_f64();
        if (first - 1.0).abs() > DEFAULT_TAIL_TOLERANCE {
            return Err(Error::MassDeficit {
                sum: first,
                tolerance: DEFAULT_TAIL_TOLERANCE,
            });
        }
        for (index, v) in b.iter().enumerate() {
            let value = v.to_f64();
            if !value.is_finite() {
                return Err(Error::Overflow);
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let source_mean = b.get(1).map_or(0.0, Real::to_f64);
        Ok(Self {
            b,
            source_mean,
            complete: false,
        })
    }

    pub fn values(&self) -> &[R] {
        &self.b
    }

    /// Highest stored order `M`.
    pub fn order(&self) -> usize {
        self.b.len() - 1
    }

    pub fn source_mean(&self) -> f64 {
        self.source_mean
    }

    pub fn to_f64(&self) -> BinomialMomentSeq<f64> {
        BinomialMomentSeq {
            b: self.b.iter().map(Real::to_f64).collect(),
            source_mean: self.source_mean,
            complete: self.complete,
        }
    }

    /// `H~(t)` by its power series.
    pub fn eval_h_tilde(&self, t: f64, domain: ArgumentDomain) -> Result<f64> {
        domain.check(t)?;
        Ok(exponential_series(&self.b, t))
    }

    /// `H(t)` by Horner's rule; [`Error::Divergent`] if the terms keep growing.
    ///
    /// Moments taken through a pmf's whole stored support give a polynomial,
    /// which is always accepted for `t <= 0`.
    pub fn eval_h(&self, t: f64, domain: ArgumentDomain) -> Result<f64> {
        domain.check(t)?;
        if self.complete && t <= 0.0 {
            return Ok(horner(&self.b, t));
        }
        ordinary_series(&self.b, t)
    }
}

/// `d[k] = E|X_c|^(2k) / k!` for `k = 0..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousMomentSeq<R: Real = f64> {
    d: Vec<R>,
}

impl<R: Real> ContinuousMomentSeq<R> {
    pub fn values(&self) -> &[R] {
        &self.d
    }

    pub fn order(&self) -> usize {
        self.d.len() - 1
    }

    pub fn to_f64(&self) -> ContinuousMomentSeq<f64> {
        ContinuousMomentSeq {
            d: self.d.iter().map(Real::to_f64).collect(),
        }
    }

    /// `phi~(t)`; at `t = -|zeta|^2` this is the anti-normally ordered
    /// characteristic function of the counterpart.
    pub fn eval_phi_tilde(&self, t: f64, domain: ArgumentDomain) -> Result<f64> {
        domain.check(t)?;
        Ok(exponential_series(&self.d, t))
    }

    /// `phi(t) = sum d[k] t^k`.
    pub fn eval_phi(&self, t: f64, domain: ArgumentDomain) -> Result<f64> {
        domain.check(t)?;
        ordinary_series(&self.d, t)
    }
}

/// Binomial moments of `p` up to order `max_order`, in double precision.
pub fn binomial_moments(p: &Pmf, max_order: usize) -> Result<BinomialMomentSeq<f64>> {
    binomial_moments_in(p, max_order, ())
}

/// Binomial moments of `p` carried in `bits`-bit extended precision.
pub fn binomial_moments_ext(p: &Pmf, max_order: usize, bits: u32) -> BinomialMomentSeq<Ext> {
    binomial_moments_in(p, max_order, bits).expect("extended precision does not overflow")
}

/// `b[m] = sum_{n >= m} C(n, m) p[n]`, accumulating rows of Pascal's triangle
/// upward in `n`.
pub fn binomial_moments_in<R: Real>(
    p: &Pmf,
    max_order: usize,
    precision: R::Precision,
) -> Result<BinomialMomentSeq<R>> {
    let zero = R::from_f64(0.0, precision);
    let mut b = vec![zero.clone(); max_order + 1];
    let mut row = vec![zero; max_order + 1];
    row[0] = R::from_f64(1.0, precision);
    for (n, &pn) in p.probs().iter().enumerate() {
        if n > 0 {
            for m in (1..=n.min(max_order)).rev() {
                row[m] = row[m].clone() + row[m - 1].clone();
            }
        }
        if pn == 0.0 {
            continue;
        }
        let mass = R::from_f64(pn, precision);
        for m in 0..=n.min(max_order) {
            b[m] = b[m].clone() + row[m].clone() * mass.clone();
        }
    }
    if b.iter().any(|v| !v.to_f64().is_finite()) {
        return Err(Error::Overflow);
    }
    Ok(BinomialMomentSeq {
        b,
        source_mean: p.mean(),
        complete: max_order >= p.support_bound(),
    })
}

/// `d[k] = sum_{j <= k} C(k, j) b[j]`, the moment form of `H~(t) = e^{-t} phi~(t)`.
pub fn continuous_moments<R: Real>(b: &BinomialMomentSeq<R>) -> Result<ContinuousMomentSeq<R>> {
    let values = b.values();
    let precision = values[0].precision();
    let zero = R::from_f64(0.0, precision);
    let mut row = vec![zero; values.len()];
    let mut d = Vec::with_capacity(values.len());
    row[0] = R::from_f64(1.0, precision);
    for k in 0..values.len() {
        if k > 0 {
            for j in (1..=k).rev() {
                row[j] = row[j].clone() + row[j - 1].clone();
            }
        }
        let mut acc = R::from_f64(0.0, precision);
        for j in 0..=k {
            acc = acc + row[j].clone() * values[j].clone();
        }
        if !acc.to_f64().is_finite() {
            return Err(Error::Overflow);
        }
        d.push(acc);
    }
    Ok(ContinuousMomentSeq { d })
}

/// `H~(t) = sum_n p[n] L_n(-t)`, evaluated by one batched Laguerre recurrence.
pub fn eval_h_tilde_laguerre(p: &Pmf, t: f64, domain: ArgumentDomain) -> Result<f64> {
    domain.check(t)?;
    let ls = laguerre_batch(p.support_bound(), -t);
    Ok(p.probs().iter().zip(&ls).map(|(pn, l)| pn * l).sum())
}

/// Normally ordered characteristic function `chi_N(zeta) = H~(-|zeta|^2)`.
pub fn normal_ordered_characteristic(p: &Pmf, zeta_abs: f64) -> f64 {
    eval_h_tilde_laguerre(p, -zeta_abs * zeta_abs, ArgumentDomain::NonPositive)
        .expect("argument is non-positive")
}

/// Anti-normally ordered characteristic function `chi_A(zeta) = phi~(-|zeta|^2)`.
pub fn antinormal_ordered_characteristic<R: Real>(
    d: &ContinuousMomentSeq<R>,
    zeta_abs: f64,
) -> f64 {
    exponential_series(d.values(), -zeta_abs * zeta_abs)
}

fn exponential_series<R: Real>(coeffs: &[R], t: f64) -> f64 {
    let precision = coeffs[0].precision();
    let t = R::from_f64(t, precision);
    let mut power = R::from_f64(1.0, precision);
    let mut acc = coeffs[0].clone();
    for (m, c) in coeffs.iter().enumerate().skip(1) {
        power = power * t.clone() / R::from_usize(m, precision);
        acc = acc + c.clone() * power.clone();
    }
    acc.to_f64()
}

fn ordinary_series<R: Real>(coeffs: &[R], t: f64) -> Result<f64> {
    if looks_divergent(coeffs, t) {
        return Err(Error::Divergent { t });
    }
    Ok(horner(coeffs, t))
}

fn horner<R: Real>(coeffs: &[R], t: f64) -> f64 {
    let precision = coeffs[0].precision();
    let t = R::from_f64(t, precision);
    let mut acc = R::from_f64(0.0, precision);
    for c in coeffs.iter().rev() {
        acc = acc * t.clone() + c.clone();
    }
    acc.to_f64()
}

/// Divergence heuristic: the geometric-mean growth of `|c[m] t^m|` over the
/// second half of the non-zero terms is at least one.
fn looks_divergent<R: Real>(coeffs: &[R], t: f64) -> bool {
    if t == 0.0 {
        return false;
    }
    let log_t = t.abs().log2();
    let logs: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .map(|(m, c)| (m, c.log2_abs() + m as f64 * log_t))
        .filter(|(_, l)| l.is_finite())
        .collect();
    if logs.len() < 4 {
        return false;
    }
    let (m_mid, l_mid) = logs[logs.len() / 2];
    let (m_last, l_last) = logs[logs.len() - 1];
    (l_last - l_mid) / (m_last - m_mid) as f64 >= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{geometric_pmf, GeometricSpec};
    use crate::real::DEFAULT_PRECISION_BITS;

    fn geom(mean: f64, eps: f64) -> Pmf {
        geometric_pmf(&GeometricSpec::new(mean, eps)).unwrap()
    }

    #[test]
    fn binomial_moment_examples() {
        let b = binomial_moments(&Pmf::point_mass(0), 3).unwrap();
        assert_eq!(b.values(), &[1.0, 0.0, 0.0, 0.0]);
        let b = binomial_moments(&Pmf::point_mass(2), 2).unwrap();
        assert_eq!(b.values(), &[1.0, 2.0, 1.0]);
        let b = binomial_moments(&geom(1.0, 1e-20), 5).unwrap();
        for &v in b.values() {
            assert!((v - 1.0).abs() < 1e-12, "{v}");
        }
        assert!((b.source_mean() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extended_moments_agree_with_double() {
        let p = Pmf::new(vec![0.1, 0.2, 0.3, 0.4], 1e-12).unwrap();
        let lo = binomial_moments(&p, 4).unwrap();
        let hi = binomial_moments_ext(&p, 4, DEFAULT_PRECISION_BITS).to_f64();
        for (a, b) in lo.values().iter().zip(hi.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn h_tilde_examples() {
        let d0 = Pmf::point_mass(0);
        for &t in &[0.0, -0.5, -7.0] {
            assert_eq!(
                eval_h_tilde_laguerre(&d0, t, ArgumentDomain::NonPositive).unwrap(),
                1.0
            );
        }
        let g = geom(1.0, 1e-16);
        let h = eval_h_tilde_laguerre(&g, -1.0, ArgumentDomain::NonPositive).unwrap();
        assert!((h - (-1.0f64).exp()).abs() < 1e-12, "{h}");
        let d1 = Pmf::point_mass(1);
        let h = eval_h_tilde_laguerre(&d1, -0.5, ArgumentDomain::NonPositive).unwrap();
        assert!((h - 0.5).abs() < 1e-15);
        let b = binomial_moments(&d1, 1).unwrap();
        assert!((b.eval_h_tilde(-0.5, ArgumentDomain::NonPositive).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn positive_arguments_need_override() {
        let b = binomial_moments(&Pmf::point_mass(1), 1).unwrap();
        assert_eq!(
            b.eval_h_tilde(0.5, ArgumentDomain::NonPositive),
            Err(Error::DomainError { t: 0.5 })
        );
        assert_eq!(
            b.eval_h_tilde(0.5, ArgumentDomain::Unrestricted).unwrap(),
            1.5
        );
        assert!(
            eval_h_tilde_laguerre(&Pmf::point_mass(1), 1.0, ArgumentDomain::NonPositive).is_err()
        );
    }

    #[test]
    fn ordinary_generating_function_examples() {
        let g = geom(1.0, 1e-14);
        let b = binomial_moments(&g, g.support_bound()).unwrap();
        let h = b.eval_h(-1.0, ArgumentDomain::NonPositive).unwrap();
        assert!((h - 0.5).abs() < 1e-12, "{h}");
        let b0 = binomial_moments(&Pmf::point_mass(0), 0).unwrap();
        assert_eq!(b0.eval_h(-3.0, ArgumentDomain::NonPositive).unwrap(), 1.0);
        let b2 = binomial_moments(&Pmf::point_mass(2), 2).unwrap();
        assert_eq!(b2.eval_h(-1.0, ArgumentDomain::NonPositive).unwrap(), 0.0);
        // H(t) = (1 + t)^N for a point mass at N; the terms grow but the sum is exact.
        let b8 = binomial_moments(&Pmf::point_mass(8), 8).unwrap();
        assert_eq!(
            b8.eval_h(-5.0, ArgumentDomain::NonPositive).unwrap(),
            65536.0
        );
        let partial = binomial_moments(&Pmf::point_mass(8), 6).unwrap();
        assert!(partial.eval_h(-5.0, ArgumentDomain::NonPositive).is_err());
        let growing = BinomialMomentSeq::new(vec![1.0, 10.0, 100.0, 1e3, 1e4, 1e5]).unwrap();
        assert!(matches!(
            growing.eval_h(-1.0, ArgumentDomain::NonPositive),
            Err(Error::Divergent { .. })
        ));
    }

    #[test]
    fn continuous_moment_examples() {
        let g = geom(1.0, 1e-16);
        let d = continuous_moments(&binomial_moments(&g, 6).unwrap()).unwrap();
        for (k, &v) in d.values().iter().enumerate() {
            let want = 2f64.powi(k as i32);
            assert!((v - want).abs() < 1e-9 * want, "k={k} {v}");
        }
        let d = continuous_moments(&binomial_moments(&Pmf::point_mass(0), 4).unwrap()).unwrap();
        assert_eq!(d.values(), &[1.0; 5]);
        let d = continuous_moments(&binomial_moments(&Pmf::point_mass(1), 4).unwrap()).unwrap();
        assert_eq!(d.values(), &[1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn geometric_phi_closed_forms() {
        // phi~(t) = exp(t (1 + lambda)), phi(t) = 1 / (1 - (1 + lambda) t).
        let g = geom(0.5, 1e-18);
        let bits = DEFAULT_PRECISION_BITS;
        let d = continuous_moments(&binomial_moments_ext(&g, 120, bits)).unwrap();
        let t = -0.7;
        let pt = d.eval_phi_tilde(t, ArgumentDomain::NonPositive).unwrap();
        assert!((pt - (1.5 * t).exp()).abs() < 1e-12, "{pt}");
        let ph = d.eval_phi(-0.2, ArgumentDomain::NonPositive).unwrap();
        assert!((ph - 1.0 / 1.3).abs() < 1e-10, "{ph}");
        assert!((antinormal_ordered_characteristic(&d, 0.7f64.sqrt()) - pt).abs() < 1e-15);
    }
}
