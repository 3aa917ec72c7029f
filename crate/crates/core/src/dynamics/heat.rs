//! The discrete heat equation along `Z_η = X ⊞_η Geom(λ_Y)`:
//! `∂p[n]/∂η = Δ u[n]` with `u[n] = (n/η)(p[n-1] λ_Y - p[n](1+λ_Y))`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::beamsplitter::Eta;
use crate::error::{Error, Result};
use crate::pmf::{Pmf, Tail};

/// A signed sequence indexed by `n`, such as `∂p[n]/∂η`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedSeq {
    pub values: Vec<f64>,
}

impl SignedSeq {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values.get(n).copied().unwrap_or(0.0)
    }
}

fn check_lambda(lambda_y: f64) -> Result<()> {
    if lambda_y >= 0.0 && lambda_y.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter("lambda_y must be finite and >= 0"))
    }
}

/// `rhs[n] = u[n+1] - u[n]` for `n = 0..=N+1`.
pub fn heat_rhs(p: &Pmf, eta: Eta, lambda_y: f64) -> Result<SignedSeq> {
    if eta.value() == 0.0 {
        return Err(Error::EtaZero);
    }
    check_lambda(lambda_y)?;
    let probs = p.probs();
    let at = |n: usize| probs.get(n).copied().unwrap_or(0.0);
    let e = eta.value();
    let u = |n: usize| {
        if n == 0 {
            0.0
        } else {
            (n as f64 / e) * (at(n - 1) * lambda_y - at(n) * (1.0 + lambda_y))
        }
    };
    let values = (0..probs.len() + 1).map(|n| u(n + 1) - u(n)).collect();
    Ok(SignedSeq { values })
}

/// Default integration step in `τ = -ln η`.
pub const DEFAULT_TAU_STEP: f64 = 1e-3;

/// Entries this far below zero after a step are clamped; anything lower fails.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveConfig {
    eta_grid: Vec<f64>,
    /// Largest RK4 step in `τ`.
    pub tau_step: f64,
    /// Shrink the step so the explicit scheme stays stable on the truncated state.
    pub stability_limit: bool,
    /// Number of states kept; chosen from the input and `λ_Y` if absent.
    pub state_size: Option<usize>,
}

impl EvolveConfig {
    /// `eta_grid` must start at 1, decrease strictly and stay in `(0, 1]`.
    pub fn new(eta_grid: Vec<f64>) -> Result<Self> {
        if eta_grid.first() != Some(&1.0) {
            return Err(Error::InvalidParameter("eta grid must start at 1"));
        }
        if eta_grid.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
            return Err(Error::InvalidParameter("eta grid must lie in (0, 1]"));
        }
        if eta_grid.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::InvalidParameter(
                "eta grid must be strictly decreasing",
            ));
        }
        Ok(Self {
            eta_grid,
            tau_step: DEFAULT_TAU_STEP,
            stability_limit: true,
            state_size: None,
        })
    }

    pub fn eta_grid(&self) -> &[f64] {
        &self.eta_grid
    }
}

/// Points computed before a failure, and the failure itself if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub points: Vec<(f64, Pmf)>,
    pub failure: Option<Error>,
}

/// Smallest `n` with `P(Geom(λ) > n) <= eps`.
fn geometric_reach(lambda: f64, eps: f64) -> usize {
    if lambda == 0.0 {
        return 0;
    }
    let ln_ratio = lambda.ln() - lambda.ln_1p();
    (eps.ln() / ln_ratio).ceil().max(0.0) as usize
}

fn default_state_size(x: &Pmf, lambda_y: f64) -> usize {
    2 * x.len() + geometric_reach(lambda_y.max(x.mean()), 1e-15) + 8
}

/// `dp/dτ = v[n] - v[n+1]` with `v[n] = n(p[n-1] λ - p[n](1+λ))` and no flux past the last state.
fn generator(p: &[f64], lambda: f64, out: &mut [f64]) {
    let s = p.len();
    let v = |n: usize| {
        if n == 0 || n >= s {
            0.0
        } else {
            n as f64 * (p[n - 1] * lambda - p[n] * (1.0 + lambda))
        }
    };
    for (n, slot) in out.iter_mut().enumerate().take(s) {
        *slot = v(n) - v(n + 1);
    }
}

struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    fn new(len: usize) -> Self {
        Self {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            tmp: vec![0.0; len],
        }
    }

    fn step(&mut self, p: &mut [f64], lambda: f64, h: f64) {
        fn stage(tmp: &mut [f64], p: &[f64], k: &[f64], c: f64) {
            for ((t, &pi), &ki) in tmp.iter_mut().zip(p).zip(k) {
                *t = pi + c * ki;
            }
        }
        generator(p, lambda, &mut self.k1);
        stage(&mut self.tmp, p, &self.k1, 0.5 * h);
        generator(&self.tmp, lambda, &mut self.k2);
        stage(&mut self.tmp, p, &self.k2, 0.5 * h);
        generator(&self.tmp, lambda, &mut self.k3);
        stage(&mut self.tmp, p, &self.k3, h);
        generator(&self.tmp, lambda, &mut self.k4);
        for (i, pi) in p.iter_mut().enumerate() {
            *pi += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Integrates the heat equation from `η = 1` (where `p = X`) down the grid.
pub fn evolve_heat(x: &Pmf, lambda_y: f64, cfg: &EvolveConfig) -> Result<Vec<(f64, Pmf)>> {
    let t = evolve_heat_partial(x, lambda_y, cfg)?;
    match t.failure {
        Some(e) => Err(e),
        None => Ok(t.points),
    }
}

/// Like [`evolve_heat`] but keeps the points reached before a step failure.
pub fn evolve_heat_partial(x: &Pmf, lambda_y: f64, cfg: &EvolveConfig) -> Result<Trajectory> {
    check_lambda(lambda_y)?;
    if !(cfg.tau_step > 0.0 && cfg.tau_step.is_finite()) {
        return Err(Error::InvalidParameter("tau step must be positive"));
    }
    let size = cfg
        .state_size
        .unwrap_or_else(|| default_state_size(x, lambda_y))
        .max(x.len());
    let mut h_max = cfg.tau_step;
    if cfg.stability_limit {
        h_max = h_max.min(1.0 / (2.0 * (size + 1) as f64 * (1.0 + 2.0 * lambda_y)));
    }
    let tail = if lambda_y == 0.0 && x.tail().is_finite() {
        Tail::Finite
    } else {
        Tail::Truncated
    };

    let mut state = vec![0.0; size];
    state[..x.len()].copy_from_slice(x.probs());
    let mut rk = Rk4::new(size);
    let mut points = Vec::with_capacity(cfg.eta_grid.len());
    points.push((1.0, x.clone()));
    let mut tau = 0.0;
    for &eta in &cfg.eta_grid[1..] {
        let target = -eta.ln();
        let steps = ((target - tau) / h_max).ceil().max(1.0) as usize;
        let h = (target - tau) / steps as f64;
        for k in 0..steps {
            rk.step(&mut state, lambda_y, h);
            let here = (-(tau + (k + 1) as f64 * h)).exp();
            for (index, v) in state.iter_mut().enumerate() {
                if !v.is_finite() || *v < -CLAMP_TOLERANCE || *v > 1.0 + CLAMP_TOLERANCE {
                    let failure = Error::StepFailure {
                        eta: here,
                        index,
                        value: *v,
                    };
                    return Ok(Trajectory {
                        points,
                        failure: Some(failure),
                    });
                }
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        tau = target;
        let sum: f64 = state.iter().sum();
        for v in &mut state {
            *v /= sum;
        }
        let keep = state.iter().rposition(|&v| v > 0.0).map_or(1, |n| n + 1);
        let tolerance = x.tail_tolerance().max(CLAMP_TOLERANCE);
        points.push((
            eta,
            Pmf::with_tail(state[..keep].to_vec(), tolerance, tail)?,
        ));
    }
    Ok(Trajectory {
        points,
        failure: None,
    })
}
