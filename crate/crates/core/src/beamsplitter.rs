//! `Z = X ⊞_η Y`, computed from `H̃_Z(t) = H̃_X(ηt) H̃_Y((1-η)t)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pmf::{Pmf, Tail};
use crate::real::{Ext, Real, DEFAULT_PRECISION_BITS};
use crate::transforms::inversion::invert_binomial_moments;
use crate::transforms::moments::{binomial_moments_in, BinomialMomentSeq};
use crate::transforms::quadrature::{gauss_laguerre_rule, invert_scaled, HTilde, QuadratureRule};
use crate::transforms::quadrature_order_for;

/// Beamsplitter transmissivity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Eta(f64);

impl Eta {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Eta(value))
        } else {
            Err(Error::InvalidParameter("eta out of range"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - η`.
    pub fn complement(self) -> f64 {
        1.0 - self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Backend {
    /// Gauss-Laguerre inversion of the product transform.
    #[default]
    Quadrature,
    /// Binomial-moment convolution and inclusion-exclusion in extended precision.
    ExactMoments,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamsplitConfig {
    pub backend: Backend,
    /// Highest output index; defaults to `N_X + N_Y`.
    pub m_max: Option<usize>,
    /// Mantissa width used by [`Backend::ExactMoments`].
    pub precision_bits: u32,
    /// Replaces the default quadrature order.
    pub quadrature_order: Option<usize>,
}

impl Default for BeamsplitConfig {
    fn default() -> Self {
        Self {
            backend: Backend::Quadrature,
            m_max: None,
            precision_bits: DEFAULT_PRECISION_BITS,
            quadrature_order: None,
        }
    }
}

impl BeamsplitConfig {
    pub fn with_backend(backend: Backend) -> Self {
        Self {
            backend,
            ..Self::default()
        }
    }
}

/// `c[k] = sum_m C(k, m) η^m (1-η)^(k-m) x[m] y[k-m]`, the coefficient form of
/// `F_Z(t) = F_X(ηt) F_Y((1-η)t)` for any pair of exponential generating
/// functions. Applies equally to binomial and continuous moments.
pub fn scaled_product_coefficients<R: Real>(x: &[R], y: &[R], eta: Eta) -> Result<Vec<R>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let Some(first) = x.first() else {
        return Ok(Vec::new());
    };
    let precision = first.precision();
    let one = R::from_f64(1.0, precision);
    let a = R::from_f64(eta.value(), precision);
    // In extended precision 1 - η is formed there, not rounded in f64 first.
    let b = one.clone() - a.clone();
    let len = x.len();
    let mut pow_a = Vec::with_capacity(len);
    let mut pow_b = Vec::with_capacity(len);
    let (mut pa, mut pb) = (one.clone(), one.clone());
    for _ in 0..len {
        pow_a.push(pa.clone());
        pow_b.push(pb.clone());
        pa = pa * a.clone();
        pb = pb * b.clone();
    }
    let xs: Vec<R> = x
        .iter()
        .zip(&pow_a)
        .map(|(v, p)| v.clone() * p.clone())
        .collect();
    let ys: Vec<R> = y
        .iter()
        .zip(&pow_b)
        .map(|(v, p)| v.clone() * p.clone())
        .collect();

    let mut row = alloc::vec![R::from_f64(0.0, precision); len];
    row[0] = one;
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        if k > 0 {
            for m in (1..=k).rev() {
                row[m] = row[m].clone() + row[m - 1].clone();
            }
        }
        let mut acc = R::from_f64(0.0, precision);
        for m in 0..=k {
            acc = acc + row[m].clone() * xs[m].clone() * ys[k - m].clone();
        }
        if !acc.to_f64().is_finite() {
            return Err(Error::Overflow);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Binomial moments of `X ⊞_η Y` from those of `X` and `Y`.
pub fn beamsplit_moments<R: Real>(
    bx: &BinomialMomentSeq<R>,
    by: &BinomialMomentSeq<R>,
    eta: Eta,
) -> Result<BinomialMomentSeq<R>> {
    let c = scaled_product_coefficients(bx.values(), by.values(), eta)?;
    BinomialMomentSeq::new(c)
}

/// Tail of the output. Two geometric heads combine into a geometric head.
fn output_tail(x: &Pmf, y: &Pmf, eta: Eta) -> Tail {
    if eta.value() == 1.0 {
        return x.tail();
    }
    if eta.value() == 0.0 {
        return y.tail();
    }
    match (x.tail(), y.tail()) {
        (Tail::Finite, Tail::Finite) => Tail::Finite,
        (Tail::Geometric { mean: a }, Tail::Geometric { mean: b }) => Tail::Geometric {
            mean: eta.value() * a + eta.complement() * b,
        },
        _ => Tail::Truncated,
    }
}

fn output_bound(x: &Pmf, y: &Pmf, cfg: &BeamsplitConfig) -> Result<usize> {
    let natural = x.support_bound() + y.support_bound();
    match cfg.m_max {
        None => Ok(natural),
        Some(m) if m < natural && x.tail().is_finite() && y.tail().is_finite() => Err(
            Error::InvalidParameter("m_max must cover the output support N_X + N_Y"),
        ),
        Some(m) => Ok(m),
    }
}

/// `X ⊞_η Y`.
///
/// The output tail tolerance is the sum of the input tolerances plus an
/// estimate of the numerical error of the chosen backend.
pub fn beamsplit_add(x: &Pmf, y: &Pmf, eta: Eta, cfg: &BeamsplitConfig) -> Result<Pmf> {
    let m_max = output_bound(x, y, cfg)?;
    match cfg.backend {
        Backend::Quadrature => {
            let order = cfg.quadrature_order.unwrap_or_else(|| {
                quadrature_order_for(x.support_bound(), y.support_bound(), m_max)
            });
            let rule = gauss_laguerre_rule(order)?;
            beamsplit_add_with_rule(x, y, eta, m_max, &rule)
        }
        Backend::ExactMoments => beamsplit_add_exact(x, y, eta, m_max, cfg.precision_bits),
    }
}

/// Quadrature backend with a caller-supplied rule, for sweeps that reuse one rule.
pub fn beamsplit_add_with_rule(
    x: &Pmf,
    y: &Pmf,
    eta: Eta,
    m_max: usize,
    rule: &QuadratureRule,
) -> Result<Pmf> {
    let (a, b) = (eta.value(), eta.complement());
    let raw = invert_scaled(
        // e^{-s/2} factors as e^{-as/2} e^{-bs/2} since a + b = 1.
        |s| {
            let (hx, bx) = x.eval_scaled_with_bound(a * s);
            let (hy, by) = y.eval_scaled_with_bound(b * s);
            (hx * hy, bx * by)
        },
        m_max,
        rule,
    );
    let noise: f64 = (0..=m_max).map(|n| raw.noise(n)).sum();
    let tolerance = x.tail_tolerance() + y.tail_tolerance() + noise;
    raw.finish(output_tail(x, y, eta), tolerance)
}

fn beamsplit_add_exact(x: &Pmf, y: &Pmf, eta: Eta, m_max: usize, bits: u32) -> Result<Pmf> {
    if bits < 53 {
        return Err(Error::InvalidParameter(
            "precision must be at least 53 bits",
        ));
    }
    let bx = binomial_moments_in::<Ext>(x, m_max, bits)?;
    let by = binomial_moments_in::<Ext>(y, m_max, bits)?;
    let c = scaled_product_coefficients(bx.values(), by.values(), eta)?;
    let mut values = invert_binomial_moments(&c, bits)?;
    let sum: f64 = values.iter().sum();
    let tolerance =
        x.tail_tolerance() + y.tail_tolerance() + 4.0 * values.len() as f64 * f64::EPSILON;
    if (sum - 1.0).abs() > tolerance {
        return Err(Error::MassDeficit { sum, tolerance });
    }
    for v in &mut values {
        *v /= sum;
    }
    Pmf::with_tail(values, tolerance, output_tail(x, y, eta))
}
