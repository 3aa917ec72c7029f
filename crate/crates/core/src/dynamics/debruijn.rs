//! Tilted distributions, the de Bruijn identity, the geometric score and the
//! log-Sobolev inequalities built from them.

use alloc::vec::Vec;

use crate::beamsplitter::{beamsplit_add, BeamsplitConfig, Eta};
use crate::error::{Error, Result};
use crate::pmf::{
    geometric_pmf, relative_entropy, relative_entropy_to_geometric, GeometricSpec, Pmf, Tail,
};

/// `p⁺[n] = (n+1) p[n+1] / λ` and `p⁻[n] = (n+1) p[n] / (1+λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TiltedPair {
    pub plus: Pmf,
    pub minus: Pmf,
}

fn positive_mean(p: &Pmf) -> Result<f64> {
    let lambda = p.mean();
    if lambda > 0.0 {
        Ok(lambda)
    } else {
        Err(Error::ZeroMean)
    }
}

/// Builds `p⁺` and `p⁻` with `λ = mean(p)`.
///
/// For a pmf with an unstored tail `p⁺[N]` would need `p[N+1]`, so both
/// sequences stop at `N - 1` and the dropped mass of `p⁻` joins the tolerance.
pub fn tilted_pair(p: &Pmf) -> Result<TiltedPair> {
    let lambda = positive_mean(p)?;
    let probs = p.probs();
    let n_max = p.support_bound();
    let plus: Vec<f64> = (0..n_max)
        .map(|n| (n + 1) as f64 * probs[n + 1] / lambda)
        .collect();
    let minus_len = if p.tail().is_finite() {
        n_max + 1
    } else {
        n_max
    };
    let minus: Vec<f64> = (0..minus_len)
        .map(|n| (n + 1) as f64 * probs[n] / (1.0 + lambda))
        .collect();
    let (tail, tolerance) = if p.tail().is_finite() {
        (Tail::Finite, p.tail_tolerance().max(1e-12))
    } else {
        let dropped = (n_max + 1) as f64 * probs[n_max] / (1.0 + lambda);
        (Tail::Truncated, p.tail_tolerance().max(1e-12) + dropped)
    };
    Ok(TiltedPair {
        plus: Pmf::with_tail(plus, tolerance, tail)?,
        minus: Pmf::with_tail(minus, tolerance, tail)?,
    })
}

/// `c · d` with `0 · inf = 0`.
fn weighted(c: f64, d: f64) -> f64 {
    if c == 0.0 {
        0.0
    } else {
        c * d
    }
}

/// `(λ_Y(1+λ)/η) D(p⁻‖p⁺) + ((1+λ_Y)λ/η) D(p⁺‖p⁻)`, the η-derivative of
/// `D(Z_η‖G_η)` with `p` the law of `Z_η` and `λ = mean(p)`.
pub fn debruijn_rhs(p: &Pmf, eta: Eta, lambda_y: f64) -> Result<f64> {
    if eta.value() == 0.0 {
        return Err(Error::EtaZero);
    }
    if !(lambda_y >= 0.0 && lambda_y.is_finite()) {
        return Err(Error::InvalidParameter("lambda_y must be finite and >= 0"));
    }
    let lambda = positive_mean(p)?;
    let pair = tilted_pair(p)?;
    let e = eta.value();
    let a = lambda_y * (1.0 + lambda) / e;
    let b = (1.0 + lambda_y) * lambda / e;
    Ok(weighted(a, relative_entropy(&pair.minus, &pair.plus))
        + weighted(b, relative_entropy(&pair.plus, &pair.minus)))
}

/// Truncation used for the thermal input of the numeric derivative.
pub const THERMAL_TRUNCATION: f64 = 1e-15;

/// `D(Z_η‖G_η)` for `Z_η = X ⊞_η Geom(λ_Y)` and `G_η` the geometric law of the same mean.
pub fn channel_divergence(x: &Pmf, lambda_y: f64, eta: Eta) -> Result<f64> {
    let y = geometric_pmf(&GeometricSpec::new(lambda_y, THERMAL_TRUNCATION))?;
    let z = beamsplit_add(x, &y, eta, &BeamsplitConfig::default())?;
    let mean = eta.value() * x.mean() + eta.complement() * lambda_y;
    Ok(relative_entropy_to_geometric(&z, mean))
}

/// Central difference of [`channel_divergence`] in `η` with half-width `h`.
pub fn debruijn_lhs_numeric(x: &Pmf, lambda_y: f64, eta: Eta, h: f64) -> Result<f64> {
    let (lo, hi) = (eta.value() - h, eta.value() + h);
    if !(h > 0.0 && lo > 0.0 && hi <= 1.0) {
        return Err(Error::InvalidParameter(
            "difference stencil must lie in (0, 1]",
        ));
    }
    let up = channel_divergence(x, lambda_y, Eta::new(hi)?)?;
    let down = channel_divergence(x, lambda_y, Eta::new(lo)?)?;
    Ok((up - down) / (2.0 * h))
}

/// The geometric score `ρ` and the functionals `J⁺`, `J⁻`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreProfile {
    /// `ρ[n]`; `None` where `p[n] = 0`, which leaves the ratio undefined.
    pub rho: Vec<Option<f64>>,
    pub j_plus: f64,
    pub j_minus: f64,
    /// `Σ p[n] ρ[n]`, including the limiting terms where `p[n] = 0`.
    pub centering: f64,
}

/// `ρ[n] = n p[n-1] λ / (p[n](1+λ)) - n`, `J⁺ = Σ p[n] ρ[n]² / n`,
/// `J⁻ = Σ p[n] ρ[n]² / (n + ρ[n])`.
///
/// Terms with `p[n] = 0 < p[n-1]` take their limits as `p[n] → 0`: `+inf` in
/// `J⁺` and `n p[n-1] λ / (1+λ)` in `J⁻`. A finite support contributes such a
/// term at `n = N + 1`.
pub fn score(p: &Pmf) -> Result<ScoreProfile> {
    let lambda = positive_mean(p)?;
    let probs = p.probs();
    let top = if p.tail().is_finite() {
        probs.len()
    } else {
        probs.len() - 1
    };
    let at = |n: usize| probs.get(n).copied().unwrap_or(0.0);
    let mut rho = Vec::with_capacity(probs.len());
    rho.push(Some(0.0));
    let (mut j_plus, mut j_minus, mut centering) = (0.0, 0.0, 0.0);
    for n in 1..=top {
        let nf = n as f64;
        let (prev, cur) = (at(n - 1), at(n));
        // a = p[n](n + ρ[n]); the terms below are written through it so that
        // no ratio is formed where p[n] is tiny.
        let a = nf * prev * lambda / (1.0 + lambda);
        let weighted_rho = a - nf * cur;
        centering += weighted_rho;
        if n < probs.len() {
            rho.push(if cur > 0.0 {
                Some(weighted_rho / cur)
            } else {
                None
            });
        }
        if cur > 0.0 {
            j_plus += weighted_rho * weighted_rho / (nf * cur);
            j_minus += if a > 0.0 {
                weighted_rho * weighted_rho / a
            } else {
                f64::INFINITY
            };
        } else if prev > 0.0 {
            j_plus = f64::INFINITY;
            j_minus += a;
        }
    }
    Ok(ScoreProfile {
        rho,
        j_plus,
        j_minus,
        centering,
    })
}

/// Absolute slack allowed before a bound counts as violated.
pub const BOUND_ABS_TOLERANCE: f64 = 1e-10;
/// Relative slack allowed before a bound counts as violated.
pub const BOUND_REL_TOLERANCE: f64 = 1e-9;

fn holds(lhs: f64, rhs: f64) -> bool {
    rhs == f64::INFINITY || lhs <= rhs + BOUND_ABS_TOLERANCE + BOUND_REL_TOLERANCE * rhs.abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSobolevReport {
    /// `D(X‖Geom(mean X))`.
    pub lhs: f64,
    /// `λ(1+λ)(D(p⁻‖p⁺) + D(p⁺‖p⁻))`.
    pub rhs_entropic: f64,
    /// `(1+λ)(J⁺ + J⁻)`.
    pub rhs_quadratic: f64,
    pub entropic_holds: bool,
    pub quadratic_holds: bool,
}

/// Evaluates both log-Sobolev bounds on `p`.
pub fn check_log_sobolev(p: &Pmf) -> Result<LogSobolevReport> {
    let lambda = positive_mean(p)?;
    let lhs = relative_entropy_to_geometric(p, lambda);
    let pair = tilted_pair(p)?;
    let rhs_entropic = lambda
        * (1.0 + lambda)
        * (relative_entropy(&pair.minus, &pair.plus) + relative_entropy(&pair.plus, &pair.minus));
    let s = score(p)?;
    let rhs_quadratic = (1.0 + lambda) * (s.j_plus + s.j_minus);
    Ok(LogSobolevReport {
        lhs,
        rhs_entropic,
        rhs_quadratic,
        entropic_holds: holds(lhs, rhs_entropic),
        quadratic_holds: holds(lhs, rhs_quadratic),
    })
}

/// `H(X ⊞_η Y) - η H(X) - (1-η) H(Y)`.
pub fn entropy_concavity_gap(x: &Pmf, y: &Pmf, eta: Eta, cfg: &BeamsplitConfig) -> Result<f64> {
    let z = beamsplit_add(x, y, eta, cfg)?;
    Ok(z.entropy() - eta.value() * x.entropy() - eta.complement() * y.entropy())
}
