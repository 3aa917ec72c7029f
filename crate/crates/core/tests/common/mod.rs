#![allow(dead_code)]

use beamsplit_core::pmf::{geometric_pmf, GeometricSpec, Pmf};
use rand::Rng;

/// Uniform random weights on `0..=support`, normalized.
pub fn random_finite<R: Rng>(rng: &mut R, support: usize) -> Pmf {
    let w: Vec<f64> = (0..=support).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = w.iter().sum();
    Pmf::new(w.iter().map(|v| v / total).collect(), 1e-12).unwrap()
}

/// Head of a mixture of geometric laws, truncated where every component has
/// tail mass below `eps`.
pub fn geometric_mixture(components: &[(f64, f64)], eps: f64) -> Pmf {
    let heads: Vec<Pmf> = components
        .iter()
        .map(|&(_, mean)| geometric_pmf(&GeometricSpec::new(mean, eps)).unwrap())
        .collect();
    let len = heads.iter().map(Pmf::len).max().unwrap();
    let total: f64 = components.iter().map(|c| c.0).sum();
    let mut probs = vec![0.0; len];
    for (&(w, _), head) in components.iter().zip(&heads) {
        for (n, slot) in probs.iter_mut().enumerate() {
            // Past a shorter head the closed form keeps the component exact.
            *slot += w / total * head.prob(n);
        }
    }
    Pmf::truncated(probs, eps * 2.0 + 1e-15).unwrap()
}

pub fn random_mixture<R: Rng>(rng: &mut R, max_components: usize, mean_range: (f64, f64)) -> Pmf {
    let k = rng.random_range(1..=max_components);
    let comps: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            (
                rng.random::<f64>() + 0.05,
                rng.random_range(mean_range.0..mean_range.1),
            )
        })
        .collect();
    geometric_mixture(&comps, 1e-15)
}

/// Output law of one port for Fock inputs `|j>|k>`, from the explicit
/// expansion of the mode transformation.
pub fn fock_output(j: usize, k: usize, eta: f64) -> Vec<f64> {
    let (t, r) = (eta.sqrt(), (1.0 - eta).sqrt());
    let ln_fact = |n: usize| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
    let binom = |n: usize, m: usize| (ln_fact(n) - ln_fact(m) - ln_fact(n - m)).exp();
    let total = j + k;
    (0..=total)
        .map(|n| {
            let mut amp = 0.0;
            for i in 0..=j.min(n) {
                if n - i > k {
                    continue;
                }
                let sign = if (n - i) % 2 == 1 { -1.0 } else { 1.0 };
                amp += sign
                    * binom(j, i)
                    * binom(k, n - i)
                    * t.powi(i as i32)
                    * r.powi((j - i) as i32)
                    * r.powi((n - i) as i32)
                    * t.powi((k + i - n) as i32);
            }
            let norm = 0.5 * (ln_fact(n) + ln_fact(total - n) - ln_fact(j) - ln_fact(k));
            (amp * norm.exp()).powi(2)
        })
        .collect()
}

/// `X ⊞_η Y` for finite inputs as a mixture of Fock-state outputs.
pub fn fock_oracle(x: &Pmf, y: &Pmf, eta: f64) -> Vec<f64> {
    let mut out = vec![0.0; x.len() + y.len() - 1];
    for (j, &pj) in x.probs().iter().enumerate() {
        for (k, &pk) in y.probs().iter().enumerate() {
            for (n, q) in fock_output(j, k, eta).into_iter().enumerate() {
                out[n] += pj * pk * q;
            }
        }
    }
    out
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    (0..len)
        .map(|n| (a.get(n).copied().unwrap_or(0.0) - b.get(n).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

pub fn tv(a: &[f64], b: &[f64]) -> f64 {
    let len = a.len().max(b.len());
    0.5 * (0..len)
        .map(|n| (a.get(n).copied().unwrap_or(0.0) - b.get(n).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

/// [`random_finite`] with the support bound drawn uniformly from `0..=max_support`.
pub fn random_finite_upto<R: Rng>(rng: &mut R, max_support: usize) -> Pmf {
    let support = rng.random_range(0..=max_support);
    random_finite(rng, support)
}
