//! Adaptive Gauss-Kronrod (7, 15) integration on a finite interval.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the Kronrod nodes with odd index.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// The 15-point Kronrod estimate and its distance from the embedded Gauss rule.
/// Endpoints are never evaluated.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
    }
}

/// Result of [`integrate_adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
}

/// Bisects the panel with the largest error until the summed error is at most
/// `abs_tol` or `max_panels` panels are in use.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    initial_panels: usize,
    abs_tol: f64,
    max_panels: usize,
) -> Integral {
    let initial_panels = initial_panels.max(1);
    let width = (b - a) / initial_panels as f64;
    let mut heap = BinaryHeap::with_capacity(max_panels + 2);
    for i in 0..initial_panels {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == initial_panels {
            b
        } else {
            lo + width
        };
        heap.push(gk15(&f, lo, hi));
    }
    let mut error: f64 = heap.iter().map(|p| p.error).sum();
    loop {
        let converged = error <= abs_tol;
        if converged || heap.len() >= max_panels {
            return finish(&heap, converged);
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Too narrow to split further.
            heap.push(worst);
            return finish(&heap, false);
        }
        let left = gk15(&f, worst.a, mid);
        let right = gk15(&f, mid, worst.b);
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
}

fn finish(heap: &BinaryHeap<Panel>, converged: bool) -> Integral {
    Integral {
        value: heap.iter().map(|p| p.value).sum(),
        error_estimate: heap.iter().map(|p| p.error).sum(),
        converged,
    }
}
