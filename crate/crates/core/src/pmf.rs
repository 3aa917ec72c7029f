//! Probability mass functions on the non-negative integers.
//!
//! A [`Pmf`] stores the masses `p[0..=N]` together with the amount of missing
//! mass it is allowed to carry and a description of what lies beyond index `N`.
//! Geometric laws remember their mean so that divergences against them can use
//! the closed form instead of the truncated head.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Default admitted deviation of the total mass from one.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Largest number of stored entries a geometric truncation may produce.
const MAX_GEOMETRIC_LEN: usize = 1 << 24;

/// What lies beyond the last stored index of a [`Pmf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// The stored entries are the whole support.
    Finite,
    /// The stored entries are the head of a distribution with unstored mass.
    Truncated,
    /// The stored entries are the head of `Geom(mean)`.
    Geometric { mean: f64 },
}

impl Tail {
    pub fn is_finite(&self) -> bool {
        matches!(self, Tail::Finite)
    }
}

/// A validated probability mass function on `0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    probs: Vec<f64>,
    tail_tolerance: f64,
    tail: Tail,
}

impl Pmf {
    /// Validates `values` as a finitely supported pmf.
    pub fn new(values: Vec<f64>, tail_tolerance: f64) -> Result<Self> {
        Self::with_tail(values, tail_tolerance, Tail::Finite)
    }

    /// Validates `values` as the head of a distribution with an unstored tail.
    pub fn truncated(values: Vec<f64>, tail_tolerance: f64) -> Result<Self> {
        Self::with_tail(values, tail_tolerance, Tail::Truncated)
    }

    pub fn with_tail(values: Vec<f64>, tail_tolerance: f64, tail: Tail) -> Result<Self> {
        if !(tail_tolerance >= 0.0 && tail_tolerance.is_finite()) {
            return Err(Error::InvalidParameter(
                "tail tolerance must be finite and >= 0",
            ));
        }
        if let Tail::Geometric { mean } = tail {
            if !(mean >= 0.0 && mean.is_finite()) {
                return Err(Error::InvalidParameter(
                    "geometric mean must be finite and >= 0",
                ));
            }
        }
        if values.is_empty() {
            return Err(Error::EmptyPmf);
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > tail_tolerance {
            return Err(Error::MassDeficit {
                sum,
                tolerance: tail_tolerance,
            });
        }
        Ok(Self {
            probs: values,
            tail_tolerance,
            tail,
        })
    }

    /// The point mass at `k`.
    pub fn point_mass(k: usize) -> Self {
        let mut probs = alloc::vec![0.0; k + 1];
        probs[k] = 1.0;
        Self {
            probs,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            tail: Tail::Finite,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<f64> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Largest stored index `N`.
    pub fn support_bound(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Mass at `n`, using the closed form past the stored support of a geometric head.
    pub fn prob(&self, n: usize) -> f64 {
        match self.probs.get(n) {
            Some(&p) => p,
            None => match self.tail {
                Tail::Geometric { mean } => geometric_ln_mass(mean, n).exp(),
                _ => 0.0,
            },
        }
    }

    /// Natural log of [`Pmf::prob`], computed without underflow for geometric tails.
    pub fn ln_prob(&self, n: usize) -> f64 {
        match self.probs.get(n) {
            Some(&p) => p.ln(),
            None => match self.tail {
                Tail::Geometric { mean } => geometric_ln_mass(mean, n),
                _ => f64::NEG_INFINITY,
            },
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, &p)| n as f64 * p)
            .sum()
    }

    /// Shannon entropy in nats, with `0 log 0 = 0`.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }
}

/// Parameters of a truncated geometric law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricSpec {
    pub mean: f64,
    pub truncation_epsilon: f64,
}

impl GeometricSpec {
    pub fn new(mean: f64, truncation_epsilon: f64) -> Self {
        Self {
            mean,
            truncation_epsilon,
        }
    }
}

/// `ln P(G = n)` for `G ~ Geom(mean)`, i.e. `n ln(λ/(1+λ)) - ln(1+λ)`.
pub fn geometric_ln_mass(mean: f64, n: usize) -> f64 {
    if n == 0 {
        return -mean.ln_1p();
    }
    if mean == 0.0 {
        return f64::NEG_INFINITY;
    }
    n as f64 * (mean.ln() - mean.ln_1p()) - mean.ln_1p()
}

/// Entropy of `Geom(mean)` in nats: `(1+λ) ln(1+λ) - λ ln λ`.
pub fn geometric_entropy(mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    (1.0 + mean) * mean.ln_1p() - mean * mean.ln()
}

/// Builds the head of `Geom(mean)` on `0..=N`, with `N` the smallest index whose
/// missing tail `(λ/(1+λ))^(N+1)` is at most the truncation epsilon.
pub fn geometric_pmf(spec: &GeometricSpec) -> Result<Pmf> {
    let GeometricSpec {
        mean,
        truncation_epsilon: eps,
    } = *spec;
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::InvalidParameter(
            "geometric mean must be finite and >= 0",
        ));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(
            "truncation epsilon must lie in (0, 1)",
        ));
    }
    if mean == 0.0 {
        return Pmf::with_tail(alloc::vec![1.0], eps, Tail::Geometric { mean });
    }
    let ln_ratio = mean.ln() - mean.ln_1p();
    let mut len = (eps.ln() / ln_ratio).ceil().max(1.0);
    if len > MAX_GEOMETRIC_LEN as f64 {
        return Err(Error::InvalidParameter("geometric truncation is too long"));
    }
    // Settle rounding in the logarithms so that len is exactly minimal.
    while len > 1.0 && ((len - 1.0) * ln_ratio).exp() <= eps {
        len -= 1.0;
    }
    while (len * ln_ratio).exp() > eps {
        len += 1.0;
    }
    let len = len as usize;
    let ratio = mean / (1.0 + mean);
    let head = 1.0 / (1.0 + mean);
    let probs = (0..len).map(|n| head * ratio.powi(n as i32)).collect();
    // The stored sum also carries rounding from the powers.
    let tolerance = eps + 4.0 * len as f64 * f64::EPSILON;
    Pmf::with_tail(probs, tolerance, Tail::Geometric { mean })
}

/// `D(p || q)` in nats; `+inf` when `p` charges a state that `q` does not.
///
/// Past its stored support a geometric `q` uses the closed form.
pub fn relative_entropy(p: &Pmf, q: &Pmf) -> f64 {
    let mut total = 0.0;
    for (n, &pn) in p.probs.iter().enumerate() {
        if pn > 0.0 {
            let ln_q = q.ln_prob(n);
            if ln_q == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            total += pn * (pn.ln() - ln_q);
        }
    }
    total
}

/// `D(p || Geom(mean))` using the closed form of the geometric mass everywhere.
pub fn relative_entropy_to_geometric(p: &Pmf, mean: f64) -> f64 {
    let mut total = 0.0;
    for (n, &pn) in p.probs.iter().enumerate() {
        if pn > 0.0 {
            let ln_g = geometric_ln_mass(mean, n);
            if ln_g == f64::NEG_INFINITY {
                return f64::INFINITY;
            }
            total += pn * (pn.ln() - ln_g);
        }
    }
    total
}

/// Half the l1 distance over the union of the stored supports.
pub fn total_variation(p: &Pmf, q: &Pmf) -> f64 {
    total_variation_slices(p.probs(), q.probs())
}

pub(crate) fn total_variation_slices(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], n: usize| v.get(n).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|n| (at(p, n) - at(q, n)).abs()).sum::<f64>()
}
