//! One-dimensional quadrature: the 7/15-point Gauss–Kronrod pair, an adaptive
//! bisection driver on top of it, and a fixed composite rule.
//!
//! Integrands that fail (return NaN or an infinity) poison the result; callers
//! check [`QuadResult::value`] for finiteness.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Kronrod abscissae, the odd-indexed ones are the Gauss points.
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
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of a single rule application.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleEstimate {
    pub value: f64,
    pub error: f64,
    /// Gauss (7-point) value on the same interval.
    pub gauss: f64,
}

/// Applies the 15-point Kronrod rule on `[a, b]` with the QUADPACK error heuristic.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> RuleEstimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    RuleEstimate {
        value,
        error,
        gauss: res_g * half,
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
            converged: true,
        }
    }

    fn merge(self, other: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + other.value,
            error: self.error + other.error,
            intervals: self.intervals + other.intervals,
            converged: self.converged && other.converged,
        }
    }
}

/// Tolerance and budget for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 200,
        }
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: RuleEstimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .partial_cmp(&other.est.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod integration over `[a, b]`.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, opts: &QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult::zero();
    }
    let first = gk15(f, a, b);
    let mut total = first.value;
    let mut err = first.error;
    if !total.is_finite() {
        return QuadResult {
            value: total,
            error: f64::INFINITY,
            intervals: 1,
            converged: false,
        };
    }
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, est: first });
    let tol = |v: f64| opts.abs_tol.max(opts.rel_tol * v.abs());
    while err > tol(total) && heap.len() < opts.max_intervals {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine resolution
            heap.push(worst);
            break;
        }
        let left = gk15(f, worst.a, mid);
        let right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.est.value;
        err += left.error + right.error - worst.est.error;
        if !total.is_finite() {
            return QuadResult {
                value: total,
                error: f64::INFINITY,
                intervals: heap.len() + 2,
                converged: false,
            };
        }
        heap.push(Piece {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            est: right,
        });
    }
    // re-sum to shed the cancellation accumulated by incremental updates
    let mut pieces: Vec<Piece> = heap.into_vec();
    pieces.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap_or(Ordering::Equal));
    let value: f64 = pieces.iter().map(|p| p.est.value).sum();
    let error: f64 = pieces.iter().map(|p| p.est.error).sum();
    QuadResult {
        value,
        error,
        intervals: pieces.len(),
        converged: error <= tol(value),
    }
}

/// Adaptive integration with forced breakpoints; only breakpoints strictly
/// inside `(a, b)` are used.
pub fn adaptive_with_breaks<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> QuadResult {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    pts.dedup();
    let mut lo = a;
    let mut out = QuadResult::zero();
    for hi in pts.into_iter().chain(std::iter::once(b)) {
        out = out.merge(adaptive(f, lo, hi, opts));
        lo = hi;
    }
    out
}

/// Composite 15-point Kronrod rule on `panels` equal panels. The error is
/// the summed Kronrod/Gauss discrepancy.
pub fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> (f64, f64) {
    let h = (b - a) / panels as f64;
    let mut value = 0.0;
    let mut err = 0.0;
    for i in 0..panels {
        let lo = a + h * i as f64;
        let est = gk15(f, lo, lo + h);
        value += est.value;
        err += (est.value - est.gauss).abs();
    }
    (value, err)
}
