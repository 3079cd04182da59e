use crate::error::{Error, Result};
use crate::group::{self, GroupElement};
use crate::kernel::{KernelTables, Law, WalkSpec};
use crate::numeric::{lit, sum_descending, Approx};
use crate::Real;

const MAX_MODES: usize = 100_000;
// stop once the neglected modes are this small relative to the largest term
const MODE_TOL: f64 = 1e-18;

impl<T: Real> KernelTables<T> {
    /// Upper bound on h_i for every i > k.
    fn h_sup_beyond(&self, k: usize) -> T {
        self.n() / (self.n() - T::one()) * self.tail_mass(k)
    }

    /// n-step probability p^(n)(0, y) for any y with |y| = `rad`.
    pub fn pn(&self, n: u32, rad: usize) -> Approx<T> {
        if n == 0 {
            return Approx::exact(if rad == 0 { T::one() } else { T::zero() });
        }
        if n == 1 && rad == 0 {
            return Approx::exact(T::zero());
        }
        let nn = self.n();
        let power = |f: T| f.powi(n as i32);
        let mut terms = Vec::new();
        if rad > 0 {
            terms.push(-power(self.f(rad)) * nn.powi(-(rad as i32)));
        }
        let mut k = rad;
        let mut scale = T::zero();
        let (tail, error) = loop {
            k += 1;
            let term = (nn - T::one()) * power(self.f(k)) * nn.powi(-(k as i32));
            scale = scale.max(term.abs());
            terms.push(term);
            // modes beyond k have f in [1 - hsup, 1]; count them as f = 1
            let weight = nn.powi(-(k as i32));
            let hsup = self.h_sup_beyond(k);
            let spread = (T::from_u32(n).unwrap() * hsup).min(T::one());
            let err = weight * spread;
            if err <= lit::<T>(MODE_TOL) * scale || weight <= T::min_positive_value() || k >= MAX_MODES {
                break (weight, err);
            }
        };
        terms.push(tail);
        Approx { value: sum_descending(&mut terms), error_bound: error, terms: k }
    }

    /// Continuous-time probability p_t(0, y) for any y with |y| = `rad`.
    pub fn pt(&self, t: T, rad: usize) -> Approx<T> {
        let nn = self.n();
        let mut terms = Vec::new();
        if rad > 0 {
            terms.push(-(-self.h(rad) * t).exp() * nn.powi(-(rad as i32)));
        }
        let (value, error, k) = self.weighted_modes(t, rad, T::zero(), &mut terms);
        let _ = value;
        Approx { value: sum_descending(&mut terms), error_bound: error, terms: k }
    }

    /// 1 - p_t(0, 0), evaluated without cancellation.
    pub fn pt_complement(&self, t: T) -> Approx<T> {
        let nn = self.n();
        let mut terms = Vec::new();
        let mut k = 0;
        let mut scale = T::zero();
        let error = loop {
            k += 1;
            let term = (nn - T::one()) * nn.powi(-(k as i32)) * -(-self.h(k) * t).exp_m1();
            scale = scale.max(term);
            terms.push(term);
            let weight = nn.powi(-(k as i32));
            let err = weight * -(-t * self.h_sup_beyond(k)).exp_m1();
            if (err <= lit::<T>(MODE_TOL) * scale && k > 1) || weight <= T::min_positive_value() || k >= MAX_MODES {
                break err;
            }
        };
        Approx { value: sum_descending(&mut terms), error_bound: error, terms: k }
    }

    /// P_t(0, B_R) = Σ_{x in B_R} p_t(0, x).
    ///
    /// Modes at or below R cancel across spheres, leaving
    /// (N-1) Σ_{j>R} e^{-h_j t} N^(R-j).
    pub fn pt_ball(&self, t: T, radius: usize) -> Approx<T> {
        let mut terms = Vec::new();
        let (_, error, k) = self.weighted_modes(t, radius, lit::<T>(radius as f64), &mut terms);
        Approx { value: sum_descending(&mut terms), error_bound: error, terms: k }
    }

    // pushes (N-1) e^{-h_j t} N^(shift - j) for j > from, then the tail estimate
    fn weighted_modes(&self, t: T, from: usize, shift: T, terms: &mut Vec<T>) -> (T, T, usize) {
        let nn = self.n();
        let ln_n = nn.ln();
        let mut scale = terms.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let mut k = from;
        loop {
            k += 1;
            let weight = ((shift - T::from_usize(k).unwrap()) * ln_n).exp();
            let term = (nn - T::one()) * weight * (-self.h(k) * t).exp();
            scale = scale.max(term);
            terms.push(term);
            let err = weight * -(-t * self.h_sup_beyond(k)).exp_m1();
            if err <= lit::<T>(MODE_TOL) * scale || weight <= T::min_positive_value() || k >= MAX_MODES {
                terms.push(weight);
                return (T::zero(), err, k);
            }
        }
    }
}

/// Exact n-step law of a finitely supported walk on B_J, by dense matrix powers.
#[derive(Debug, Clone)]
pub struct BruteForce<T> {
    pub elements: Vec<GroupElement>,
    pub probabilities: Vec<T>,
}

impl<T: Real> BruteForce<T> {
    /// Probability of the element with the given index.
    pub fn at(&self, index: usize) -> T {
        self.probabilities[index]
    }
}

/// Repeated multiplication by the one-step matrix over (Z_N)^J.
pub fn brute_force_pn<T: Real>(spec: &WalkSpec, n: u32, cap: u64) -> Result<BruteForce<T>> {
    spec.validate()?;
    let r = match &spec.law {
        Law::Explicit { r } => r,
        _ => return Err(Error::Unsupported("brute force needs an explicit finitely supported law".into())),
    };
    let elements = group::enumerate_ball(spec.order, r.len(), cap)?;
    let size = elements.len();
    let mut step = vec![T::zero(); size];
    for (idx, y) in elements.iter().enumerate().skip(1) {
        let j = y.norm();
        let sphere = group::sphere_size(spec.order, j)? as f64;
        step[idx] = lit::<T>(r[j - 1] / sphere);
    }
    // translation invariance: P[x][y] = step[y - x]
    let mut diff_index = vec![0usize; size * size];
    for (i, x) in elements.iter().enumerate() {
        for (k, y) in elements.iter().enumerate() {
            diff_index[i * size + k] = y.subtract(x)?.index() as usize;
        }
    }
    let mut dist = vec![T::zero(); size];
    dist[0] = T::one();
    for _ in 0..n {
        let mut next = vec![T::zero(); size];
        for (i, &pi) in dist.iter().enumerate() {
            if pi == T::zero() {
                continue;
            }
            for (k, slot) in next.iter_mut().enumerate() {
                *slot = *slot + pi * step[diff_index[i * size + k]];
            }
        }
        dist = next;
    }
    Ok(BruteForce { elements, probabilities: dist })
}

/// Continuation rule for h beyond the supplied values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HTail<T> {
    /// h_j = 0 beyond the last value (finitely supported law).
    Zero,
    /// h_(J+m) = h_J ratio^m.
    Geometric { ratio: T },
}

/// Recovers r_1..r_J from h_1..h_J by inverting the h-r relation.
///
/// With `normalize`, the input is taken up to scale and the output rescaled
/// so that the full r-series sums to one.
pub fn r_from_h<T: Real>(order: u32, h: &[T], tail: HTail<T>, normalize: bool) -> Result<Vec<T>> {
    if order < 2 {
        return Err(Error::InvalidOrder(order as u64));
    }
    if h.is_empty() {
        return Err(Error::InvalidArgument("empty h-sequence".into()));
    }
    if let Some(k) = h.iter().position(|&v| !(v > T::zero())) {
        return Err(Error::InvalidArgument(format!("h_{} must be positive", k + 1)));
    }
    let n = T::from_u32(order).unwrap();
    let n1 = n - T::one();
    let last = h.len();
    // beyond[k] = Σ_{j>k} h_j N^(k-j)
    let mut beyond = vec![T::zero(); last + 1];
    beyond[last] = match tail {
        HTail::Zero => T::zero(),
        HTail::Geometric { ratio } => {
            let x = ratio / n;
            if !(x < T::one() && ratio > T::zero()) {
                return Err(Error::Divergence("h tail ratio must lie in (0, N)".into()));
            }
            h[last - 1] * x / (T::one() - x)
        }
    };
    for k in (0..last).rev() {
        beyond[k] = (h[k] + beyond[k + 1]) / n;
    }
    let mut r: Vec<T> = (1..=last).map(|k| n1 / n * h[k - 1] - n1 * n1 / n * beyond[k]).collect();
    if normalize {
        let total = h[0] - r[0] / n1;
        for v in &mut r {
            *v = *v / total;
        }
    }
    if let Some(k) = r.iter().position(|&v| !(v > T::zero())) {
        return Err(Error::InvalidKernel { k: k + 1, value: r[k].to_f64().unwrap_or(f64::NAN) });
    }
    Ok(r)
}

/// c_0..c_(L-1) from d_0..d_(L-1) for mu = 1 walks:
/// c_m = (N-1)/N d_m - ((N-1)^2/N) Σ_{i>m} d_i N^(2(m-i)),
/// with d continued geometrically by `tail_ratio` past the last value.
pub fn c_from_d_unit_mu<T: Real>(order: u32, d: &[T], tail_ratio: T) -> Result<Vec<T>> {
    if order < 2 {
        return Err(Error::InvalidOrder(order as u64));
    }
    if d.is_empty() {
        return Err(Error::InvalidArgument("empty d-sequence".into()));
    }
    let n = T::from_u32(order).unwrap();
    let n2 = n * n;
    let n1 = n - T::one();
    let x = tail_ratio / n2;
    if !(x < T::one()) {
        return Err(Error::Divergence("d tail ratio must be below N^2".into()));
    }
    let last = d.len();
    let mut beyond = vec![T::zero(); last];
    beyond[last - 1] = d[last - 1] * x / (T::one() - x);
    for m in (0..last - 1).rev() {
        beyond[m] = (d[m + 1] + beyond[m + 1]) / n2;
    }
    Ok((0..last).map(|m| n1 / n * d[m] - n1 * n1 / n * beyond[m]).collect())
}
