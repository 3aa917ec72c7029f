//! Scalar abstraction shared by the double-precision and extended-precision
//! moment routines.
//!
//! Inclusion-exclusion over binomial moments cancels terms of size
//! `C(m, n) * b[m]`, so the moment pipeline is generic over [`Real`] and can be
//! run in [`Ext`], a binary floating-point type with a caller-chosen mantissa.

use core::cmp::Ordering;
use core::fmt::Debug;
use core::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

/// Default mantissa width of [`Ext`] in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    type Precision: Copy + Debug;

    fn from_f64(x: f64, precision: Self::Precision) -> Self;
    fn to_f64(&self) -> f64;
    fn precision(&self) -> Self::Precision;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Approximate `log2 |x|`; `-inf` for zero.
    fn log2_abs(&self) -> f64;

    /// Rounds the value into an [`Ext`] of the given width.
    fn to_ext(&self, bits: u32) -> Ext;

    fn from_usize(n: usize, precision: Self::Precision) -> Self {
        Self::from_f64(n as f64, precision)
    }
}

impl Real for f64 {
    type Precision = ();

    fn from_f64(x: f64, _: ()) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn precision(&self) {}
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn log2_abs(&self) -> f64 {
        f64::abs(*self).log2()
    }
    fn to_ext(&self, bits: u32) -> Ext {
        Ext::new(*self, bits)
    }
}

type Big = FBig<HalfEven, 2>;

/// Binary floating point with a fixed mantissa width, rounding half to even.
#[derive(Clone, Debug, PartialEq)]
pub struct Ext {
    value: Big,
    bits: u32,
}

impl Ext {
    /// Panics if `x` is not finite.
    pub fn new(x: f64, bits: u32) -> Self {
        let value = Big::try_from(x).expect("finite f64");
        Self::rounded(value, bits)
    }

    fn rounded(value: Big, bits: u32) -> Self {
        Self {
            value: value.with_precision(bits as usize).value(),
            bits,
        }
    }

    fn combine(self, rhs: Self, op: impl FnOnce(Big, Big) -> Big) -> Self {
        let bits = self.bits.max(rhs.bits);
        Self::rounded(op(self.value, rhs.value), bits)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Mul for Ext {
    type Output = Ext;
    fn mul(self, rhs: Ext) -> Ext {
        self.combine(rhs, |a, b| a * b)
    }
}

impl Div for Ext {
    type Output = Ext;
    fn div(self, rhs: Ext) -> Ext {
        self.combine(rhs, |a, b| a / b)
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext {
            value: -self.value,
            bits: self.bits,
        }
    }
}

impl Real for Ext {
    type Precision = u32;

    fn from_f64(x: f64, bits: u32) -> Self {
        Ext::new(x, bits)
    }
    fn to_f64(&self) -> f64 {
        self.value.to_f64().value()
    }
    fn precision(&self) -> u32 {
        self.bits
    }
    fn abs(&self) -> Self {
        if self.value < Big::ZERO {
            -self.clone()
        } else {
            self.clone()
        }
    }
    fn is_zero(&self) -> bool {
        self.value == Big::ZERO
    }
    fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let repr = self.value.repr();
        // |x| lies in [2^(e + d - 1), 2^(e + d)) for a d-bit significand.
        (repr.exponent() as f64) + (repr.digits() as f64) - 0.5
    }
    fn to_ext(&self, bits: u32) -> Ext {
        Ext::rounded(self.value.clone(), bits)
    }
}
