//! Summation helpers and series certificates shared by the analytic modules.

use serde::Serialize;

use crate::Real;

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn from_usize<T: Real>(x: usize) -> T {
    T::from_usize(x).expect("index representable in scalar type")
}

/// A value together with a bound on the error of its evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Approx<T> {
    pub value: T,
    pub error_bound: T,
    pub terms: usize,
}

impl<T: Real> Approx<T> {
    pub fn exact(value: T) -> Self {
        Self { value, error_bound: T::zero(), terms: 0 }
    }
}

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator<T> {
    sum: T,
    carry: T,
}

impl<T: Real> Accumulator<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.carry
    }
}

/// Sums terms in order of decreasing magnitude with compensation.
pub fn sum_descending<T: Real>(terms: &mut [T]) -> T {
    terms.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap_or(std::cmp::Ordering::Equal));
    let mut acc = Accumulator::new();
    for &t in terms.iter() {
        acc.add(t);
    }
    acc.total()
}

/// Outcome of a summability certificate for a positive series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesVerdict<T> {
    Converges { sum: T, tail_bound: T, terms: usize },
    Diverges { terms: usize },
    Undetermined { partial: T, terms: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct SeriesOptions {
    /// Number of trailing terms whose ratios must sustain the certificate.
    pub window: usize,
    pub max_terms: usize,
    /// Stop once the tail bound falls below this fraction of the partial sum.
    pub rel_tol: f64,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { window: 50, max_terms: 1 << 16, rel_tol: 1e-15 }
    }
}

const RATIO_SLACK: f64 = 1e-12;
const EXPONENT_SLACK: f64 = 1e-4;
const EXPONENT_SPREAD: f64 = 1e-2;

/// Certifies convergence or divergence of `sum_{j >= first} exp(ln_term(j))`.
///
/// Convergence needs either a ratio bound below one over the last `window`
/// terms (geometric tail) or a stable local power-law exponent above one
/// (integral-test tail). Divergence needs terms that stop decreasing, or a
/// stable local exponent at most one, which dominates a harmonic series.
pub fn certify_series<T: Real>(
    ln_term: impl Fn(usize) -> T,
    first: usize,
    opts: SeriesOptions,
) -> SeriesVerdict<T> {
    let window = opts.window.max(4);
    let mut logs: Vec<T> = Vec::new();
    let mut checkpoint = (first + 2 * window + 14).max(64);
    let cap = opts.max_terms.max(checkpoint);
    loop {
        while logs.len() < checkpoint - first + 1 {
            let j = first + logs.len();
            let v = ln_term(j);
            if v.is_nan() {
                return SeriesVerdict::Undetermined { partial: T::nan(), terms: logs.len() };
            }
            if v == T::infinity() {
                return SeriesVerdict::Diverges { terms: logs.len() + 1 };
            }
            logs.push(v);
        }
        let n = logs.len();
        let lo = n - window - 1;
        let mut max_lr = T::neg_infinity();
        let mut min_lr = T::infinity();
        let mut s_min = T::infinity();
        let mut s_max = T::neg_infinity();
        for i in lo..n - 1 {
            let lr = logs[i + 1] - logs[i];
            max_lr = max_lr.max(lr);
            min_lr = min_lr.min(lr);
            let j = from_usize::<T>(first + i);
            let s = -lr / (T::one() + T::one() / j).ln();
            s_min = s_min.min(s);
            s_max = s_max.max(s);
        }
        let last_log = logs[n - 1];
        let stable = s_min.is_finite()
            && s_max.is_finite()
            && (s_max - s_min) <= lit::<T>(EXPONENT_SPREAD) * s_min.abs().max(T::one());

        if min_lr >= -lit::<T>(RATIO_SLACK) && last_log > T::neg_infinity() {
            return SeriesVerdict::Diverges { terms: n };
        }
        if stable && s_max <= T::one() + lit::<T>(EXPONENT_SLACK) {
            return SeriesVerdict::Diverges { terms: n };
        }

        let mut bound = T::infinity();
        if stable {
            if s_min > T::one() + lit::<T>(EXPONENT_SLACK) {
                let k = from_usize::<T>(first + n - 1);
                bound = last_log.exp() * k / (s_min - T::one());
            }
        } else {
            // Ratios may still be drifting upward; pad by the drift seen in the window.
            let padded = max_lr + (max_lr - min_lr);
            if padded < -lit::<T>(RATIO_SLACK) {
                let rho = padded.exp();
                bound = last_log.exp() * rho / (T::one() - rho);
            }
        }
        if last_log == T::neg_infinity() {
            bound = T::zero();
        }
        if bound.is_finite() {
            let sum = sum_exp(&logs);
            if bound <= lit::<T>(opts.rel_tol) * sum || checkpoint >= cap {
                return SeriesVerdict::Converges { sum, tail_bound: bound, terms: n };
            }
        }
        if checkpoint >= cap {
            return SeriesVerdict::Undetermined { partial: sum_exp(&logs), terms: n };
        }
        checkpoint = (checkpoint * 2).min(cap);
    }
}

fn sum_exp<T: Real>(logs: &[T]) -> T {
    let mut terms: Vec<T> = logs.iter().map(|l| l.exp()).collect();
    sum_descending(&mut terms)
}

/// Ordinary least squares slope and intercept of `y` on `x`.
pub fn linear_fit<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let n = from_usize::<T>(x.len());
    let mx = x.iter().fold(T::zero(), |a, &b| a + b) / n;
    let my = y.iter().fold(T::zero(), |a, &b| a + b) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        sxx = sxx + (a - mx) * (a - mx);
        sxy = sxy + (a - mx) * (b - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}
