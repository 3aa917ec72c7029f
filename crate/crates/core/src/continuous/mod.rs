//! The continuous counterpart of a photon-number law, in radial form.
//!
//! `X_c` is circularly symmetric with `u = |r|^2` distributed as
//! `f(u) = sum_n p[n] e^{-u} u^n / n!`, a Poisson-kernel mixture of
//! `Gamma(n+1, 1)` densities. Integrals over the plane reduce to integrals in
//! `u`; the angular factor and the `1/π` cancel in every log-ratio.

pub mod integrate;

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::pmf::{relative_entropy, Pmf};
use integrate::integrate_adaptive;

/// Radial density `f(u)` of the continuous counterpart of a pmf.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    base: Pmf,
    /// `ln p[n] - ln n!`, `-inf` where `p[n] = 0`.
    ln_coeffs: Vec<f64>,
}

/// Builds the evaluator for `f(u)`.
pub fn radial_density(p: &Pmf) -> RadialDensity {
    let mut ln_fact = 0.0;
    let ln_coeffs = p
        .probs()
        .iter()
        .enumerate()
        .map(|(n, &pn)| {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            if pn > 0.0 {
                pn.ln() - ln_fact
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    RadialDensity {
        base: p.clone(),
        ln_coeffs,
    }
}

impl RadialDensity {
    pub fn base(&self) -> &Pmf {
        &self.base
    }

    /// `ln f(u)`, by log-sum-exp over the mixture terms.
    pub fn ln_eval(&self, u: f64) -> f64 {
        if u == 0.0 {
            return self.ln_coeffs[0];
        }
        let ln_u = u.ln();
        let term = |n: usize, c: f64| c + n as f64 * ln_u;
        let peak = self
            .ln_coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| term(n, c))
            .fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            return peak;
        }
        let sum: f64 = self
            .ln_coeffs
            .iter()
            .enumerate()
            .map(|(n, &c)| (term(n, c) - peak).exp())
            .sum();
        peak + sum.ln() - u
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.ln_eval(u).exp()
    }

    /// Smallest `U = 2^k` with `∫_U^∞ f < tail_mass`, using
    /// `∫_U^∞ e^{-u} u^n / n! du = P(Poisson(U) <= n)`.
    pub fn tail_limit(&self, tail_mass: f64) -> f64 {
        let mut u = 1.0;
        while self.mass_beyond(u) >= tail_mass {
            u *= 2.0;
        }
        u
    }

    fn mass_beyond(&self, u: f64) -> f64 {
        // P(Poisson(u) <= n) accumulated upward in n, in log space.
        let ln_u = u.ln();
        let mut ln_term = -u;
        let mut ln_cdf = ln_term;
        let mut total = 0.0;
        for (n, &pn) in self.base.probs().iter().enumerate() {
            if n > 0 {
                ln_term += ln_u - (n as f64).ln();
                ln_cdf = log_add(ln_cdf, ln_term);
            }
            total += pn * ln_cdf.exp();
        }
        total
    }

    /// `∫_0^∞ g(u) f(u) du`, integrated on `[0, U]` with the default parameters.
    pub fn integrate_against(&self, g: impl Fn(f64) -> f64) -> Result<f64> {
        let params = IntegrationParams::default();
        let upper = self.tail_limit(params.tail_mass);
        let r = integrate_adaptive(
            |u| g(u) * self.eval(u),
            0.0,
            upper,
            params.initial_panels,
            params.abs_tol,
            params.max_panels,
        );
        if r.error_estimate > params.accept_tol {
            return Err(Error::NonIntegrable {
                error_estimate: r.error_estimate,
            });
        }
        Ok(r.value)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Controls for [`continuous_relative_entropy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationParams {
    /// Mass each density may leave beyond the upper limit.
    pub tail_mass: f64,
    /// Target for the summed error estimate.
    pub abs_tol: f64,
    /// An estimate above this after refinement is reported as an error.
    pub accept_tol: f64,
    pub initial_panels: usize,
    pub max_panels: usize,
}

impl Default for IntegrationParams {
    fn default() -> Self {
        Self {
            tail_mass: 1e-13,
            abs_tol: 1e-12,
            accept_tol: 1e-9,
            initial_panels: 16,
            max_panels: 4000,
        }
    }
}

/// `D(X_c‖Y_c) = ∫ f_X (ln f_X - ln f_Y) du`.
pub fn continuous_relative_entropy(
    fx: &RadialDensity,
    fy: &RadialDensity,
    params: &IntegrationParams,
) -> Result<f64> {
    let upper = fx
        .tail_limit(params.tail_mass)
        .max(fy.tail_limit(params.tail_mass));
    let integrand = |u: f64| {
        let lx = fx.ln_eval(u);
        if lx == f64::NEG_INFINITY {
            return 0.0;
        }
        lx.exp() * (lx - fy.ln_eval(u))
    };
    let r = integrate_adaptive(
        integrand,
        0.0,
        upper,
        params.initial_panels,
        params.abs_tol,
        params.max_panels,
    );
    if !r.value.is_finite() || r.error_estimate > params.accept_tol {
        return Err(Error::NonIntegrable {
            error_estimate: r.error_estimate,
        });
    }
    Ok(r.value)
}

/// Slack allowed in the log-sum comparison.
pub const LOG_SUM_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumReport {
    pub continuous: f64,
    pub discrete: f64,
    pub holds: bool,
}

/// Compares `D(X_c‖Y_c)` with `D(X‖Y)`.
pub fn check_log_sum(x: &Pmf, y: &Pmf) -> Result<LogSumReport> {
    let continuous = continuous_relative_entropy(
        &radial_density(x),
        &radial_density(y),
        &IntegrationParams::default(),
    )?;
    let discrete = relative_entropy(x, y);
    Ok(LogSumReport {
        continuous,
        discrete,
        holds: discrete == f64::INFINITY || continuous <= discrete + LOG_SUM_TOLERANCE,
    })
}
