//! Gamma-family special functions and the Riemann zeta function.

use crate::numeric::lit;
use crate::Real;

const MAX_ITER: usize = 500;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)|.
pub fn ln_gamma<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut a = lit::<T>(LANCZOS_COEF[0]);
    let t = x + lit::<T>(LANCZOS_G) + half;
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a = a + lit::<T>(c) / (x + T::from_usize(i).unwrap());
    }
    half * (T::PI() + T::PI()).ln() + (x + half) * t.ln() - t + a.ln()
}

pub fn gamma<T: Real>(x: T) -> T {
    if x > T::zero() {
        ln_gamma(x).exp()
    } else {
        let pi = T::PI();
        pi / ((pi * x).sin() * gamma(T::one() - x))
    }
}

/// `γ(a, x) / (Γ(a) x^a)`, bounded by `1/Γ(a+1)` and smooth at `x = 0`.
///
/// Uses the power series below `x = a + 1` and the continued fraction for
/// the upper function above it.
pub fn gamma_star<T: Real>(a: T, x: T) -> T {
    assert!(a > T::zero(), "gamma_star needs a > 0");
    if x <= T::zero() {
        return (-ln_gamma(a + T::one())).exp();
    }
    if x < a + T::one() {
        (series_sum(a, x).ln() - x - ln_gamma(a)).exp()
    } else {
        let p = T::one() - upper_regularized_cf(a, x);
        p * (-a * x.ln()).exp()
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn lower_regularized<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x < a + T::one() {
        (series_sum(a, x).ln() - x + a * x.ln() - ln_gamma(a)).exp()
    } else {
        T::one() - upper_regularized_cf(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x)`.
pub fn upper_regularized<T: Real>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    if x < a + T::one() {
        T::one() - lower_regularized(a, x)
    } else {
        upper_regularized_cf(a, x)
    }
}

// sum_{n>=0} x^n / (a (a+1) ... (a+n))
fn series_sum<T: Real>(a: T, x: T) -> T {
    let mut ap = a;
    let mut del = T::one() / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap = ap + T::one();
        del = del * x / ap;
        sum = sum + del;
        if del.abs() < sum.abs() * T::epsilon() {
            break;
        }
    }
    sum
}

// modified Lentz evaluation of the continued fraction for Q(a, x)
fn upper_regularized_cf<T: Real>(a: T, x: T) -> T {
    let tiny = T::min_positive_value() / T::epsilon();
    let two = lit::<T>(2.0);
    let mut b = x + T::one() - a;
    let mut c = T::one() / tiny;
    let mut d = T::one() / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let i = T::from_usize(i).unwrap();
        let an = -i * (i - a);
        b = b + two;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = T::one() / d;
        let del = d * c;
        h = h * del;
        if (del - T::one()).abs() < T::epsilon() {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

const BERNOULLI_OVER_FACT: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
    -3_617.0 / 10_670_622_842_880_000.0,
];

/// Riemann zeta for real `s > 1`, by Euler–Maclaurin summation.
pub fn riemann_zeta<T: Real>(s: T) -> T {
    assert!(s > T::one(), "riemann_zeta needs s > 1");
    let n = 20usize;
    let nt = T::from_usize(n).unwrap();
    let mut sum = T::zero();
    for k in (1..n).rev() {
        sum = sum + T::from_usize(k).unwrap().powf(-s);
    }
    let n_pow = nt.powf(-s);
    sum = sum + n_pow * nt / (s - T::one()) + n_pow * lit::<T>(0.5);
    // derivative factors s (s+1) ... (s+2k-2) / n^(2k-1)
    let mut rising = s;
    let mut power = n_pow / nt;
    for (k, &b) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum = sum + lit::<T>(b) * rising * power;
        let k2 = T::from_usize(2 * k + 1).unwrap();
        rising = rising * (s + k2) * (s + k2 + T::one());
        power = power / (nt * nt);
    }
    sum
}
