//! The distance chain Z_n = |ξ_n| and its running maximum Z*_n.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::KernelTables;
use crate::numeric::{certify_series, from_usize, lit, sum_descending, Approx, SeriesOptions, SeriesVerdict};
use crate::Real;

/// Default number of levels materialized for dense matrices.
pub const DEFAULT_LEVEL_CAP: usize = 64;

/// Distance chain of an r_j-walk.
#[derive(Debug, Clone)]
pub struct DistanceChain<T> {
    tables: KernelTables<T>,
}

/// Law of the first passage τ_j = inf{n : Z_n >= j} from 0: geometric on {1, 2, ...}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Passage<T> {
    pub success: T,
    pub mean: T,
}

impl<T: Real> Passage<T> {
    pub fn pmf(&self, n: u32) -> T {
        if n == 0 {
            return T::zero();
        }
        (T::one() - self.success).powi(n as i32 - 1) * self.success
    }
}

/// Law of the holding time T_i at distance i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Holding<T> {
    pub stay: T,
    pub mean: T,
}

impl<T: Real> Holding<T> {
    pub fn pmf(&self, n: u32) -> T {
        if n == 0 {
            return T::zero();
        }
        self.stay.powi(n as i32 - 1) * (T::one() - self.stay)
    }
}

/// Law of the running maximum Z*_n at level j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MaxLaw<T> {
    /// P_0[Z*_n = j]
    pub pmf: T,
    /// P_0[Z*_n >= j]
    pub survival: T,
}

impl<T: Real> DistanceChain<T> {
    pub fn new(tables: KernelTables<T>) -> Self {
        Self { tables }
    }

    pub fn tables(&self) -> &KernelTables<T> {
        &self.tables
    }

    fn n(&self) -> T {
        T::from_u32(self.tables.order()).unwrap()
    }

    /// One-step transition probability p_ij.
    pub fn p(&self, i: usize, j: usize) -> T {
        let n = self.n();
        let n1 = n - T::one();
        if j > i {
            self.tables.r(j)
        } else if j == i {
            if i == 0 {
                T::zero()
            } else {
                self.tables.cumulative(i - 1) + self.tables.r(i) * (n - lit::<T>(2.0)) / n1
            }
        } else if j > 0 {
            self.tables.r(i) * n.powi(-((i - j) as i32))
        } else {
            self.tables.r(i) / (n.powi(i as i32 - 1) * n1)
        }
    }

    /// Σ_j p_ij with the levels beyond i summed as one tail mass.
    pub fn row_sum(&self, i: usize) -> T {
        let mut terms: Vec<T> = (0..=i).map(|j| self.p(i, j)).collect();
        terms.push(self.tables.tail_mass(i));
        sum_descending(&mut terms)
    }

    /// Dense block p_ij for i, j < levels.
    pub fn matrix(&self, levels: usize) -> Vec<Vec<T>> {
        (0..levels).map(|i| (0..levels).map(|j| self.p(i, j)).collect()).collect()
    }

    /// D_i = Σ_j j p_ij by direct summation.
    pub fn drift(&self, i: usize) -> Result<Approx<T>> {
        let mut terms: Vec<T> = (1..=i).map(|j| from_usize::<T>(j) * self.p(i, j)).collect();
        if self.tables.has_finite_support() {
            terms.extend((i + 1..=self.tables.truncation()).map(|j| from_usize::<T>(j) * self.tables.r(j)));
            return Ok(Approx { value: sum_descending(&mut terms), error_bound: T::zero(), terms: terms.len() });
        }
        let verdict = certify_series(
            |j| from_usize::<T>(j).ln() + self.tables.r(j).ln(),
            i + 1,
            SeriesOptions::default(),
        );
        match verdict {
            SeriesVerdict::Converges { sum, tail_bound, terms: k } => {
                terms.push(sum);
                let value = sum_descending(&mut terms);
                Ok(Approx { value, error_bound: tail_bound + value * T::epsilon() * lit::<T>(4.0), terms: k + i })
            }
            _ => Err(Error::Indeterminate("first moment of the jump law is not certified finite".into())),
        }
    }

    /// τ_j from 0; success probability Σ_{i>=j} r_i.
    pub fn hitting(&self, j: usize) -> Result<Passage<T>> {
        if j == 0 {
            return Err(Error::ZeroRadius);
        }
        let success = self.tables.tail_mass(j - 1);
        Ok(Passage { success, mean: T::one() / success })
    }

    /// Holding time at distance i.
    pub fn exit(&self, i: usize) -> Holding<T> {
        let stay = self.p(i, i);
        Holding { stay, mean: T::one() / (T::one() - stay) }
    }

    /// P_0[Z*_n = j] and P_0[Z*_n >= j].
    pub fn max_dist(&self, n: u32, j: usize) -> Result<MaxLaw<T>> {
        if n == 0 || j == 0 {
            return Err(Error::InvalidArgument("need n >= 1 and j >= 1".into()));
        }
        let nt = T::from_u32(n).unwrap();
        // F^n = exp(n ln(1 - tail)) without cancellation near 1
        let ln_below = |k: usize| nt * (-self.tables.tail_mass(k)).ln_1p();
        let at_most = ln_below(j).exp();
        let below = ln_below(j - 1).exp();
        Ok(MaxLaw { pmf: at_most - below, survival: -ln_below(j - 1).exp_m1() })
    }

    /// Transition matrix of Z*_n on levels 0..levels.
    pub fn max_matrix(&self, levels: usize) -> MaxChainMatrix<T> {
        let entries = (0..levels)
            .map(|i| {
                (0..levels)
                    .map(|j| {
                        if j < i {
                            T::zero()
                        } else if j == i {
                            self.tables.cumulative(i)
                        } else {
                            self.tables.r(j)
                        }
                    })
                    .collect()
            })
            .collect();
        MaxChainMatrix { entries }
    }
}

/// Dense upper-triangular block of the running-maximum chain.
///
/// Paths between levels i <= j never leave [i, j], so every entry of a
/// power of the block equals the corresponding entry of the infinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxChainMatrix<T> {
    pub entries: Vec<Vec<T>>,
}

impl<T: Real> MaxChainMatrix<T> {
    pub fn levels(&self) -> usize {
        self.entries.len()
    }

    /// Panics unless both indices are below [`levels`](Self::levels).
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i][j]
    }

    fn multiply(&self, other: &Self) -> Self {
        let m = self.levels();
        let mut out = vec![vec![T::zero(); m]; m];
        for i in 0..m {
            for k in i..m {
                let a = self.entries[i][k];
                if a == T::zero() {
                    continue;
                }
                for j in k..m {
                    out[i][j] = out[i][j] + a * other.entries[k][j];
                }
            }
        }
        Self { entries: out }
    }

    /// n-th matrix power by repeated squaring.
    pub fn power(&self, n: u32) -> Self {
        let m = self.levels();
        let mut result =
            Self { entries: (0..m).map(|i| (0..m).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect() };
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.multiply(&base);
            }
            base = base.multiply(&base);
            e >>= 1;
        }
        result
    }
}

/// n-step entry of the running-maximum chain for r_j = (1-a) a^(j-1).
pub fn max_matrix_n_geometric<T: Real>(a: T, n: u32, i: usize, j: usize) -> T {
    let nt = T::from_u32(n).unwrap();
    let at_most = |k: usize| (nt * (-a.powi(k as i32)).ln_1p()).exp();
    if j < i {
        T::zero()
    } else if j == i {
        at_most(i)
    } else {
        at_most(j) - at_most(j - 1)
    }
}

fn check_geometric<T: Real>(order: u32, c: T) -> Result<(T, T)> {
    if order < 2 {
        return Err(Error::InvalidOrder(order as u64));
    }
    let n = T::from_u32(order).unwrap();
    if !(c > T::zero() && c < n) {
        return Err(Error::InvalidSpec("geometric law needs 0 < c < N".into()));
    }
    Ok((n, c / n))
}

/// One-step transition probability of the c^j-walk's distance chain in closed form.
pub fn p_geometric<T: Real>(order: u32, c: T, i: usize, j: usize) -> Result<T> {
    let (n, a) = check_geometric(order, c)?;
    let n1 = n - T::one();
    let one = T::one();
    Ok(if j > i {
        (one - a) * a.powi(j as i32 - 1)
    } else if j == i {
        if i == 0 {
            T::zero()
        } else {
            one - a.powi(i as i32) * (n - lit::<T>(2.0)) / n1 - a.powi(i as i32 - 1) / n1
        }
    } else if j > 0 {
        (one - a) * a.powi(i as i32 - 1) * n.powi(-((i - j) as i32))
    } else {
        (one - a) * (c / (n * n)).powi(i as i32 - 1) / n1
    })
}

/// Mean holding time at distance i >= 1 for the c^j-walk.
pub fn exit_mean_geometric<T: Real>(order: u32, c: T, i: usize) -> Result<T> {
    let (n, _) = check_geometric(order, c)?;
    if i == 0 {
        return Err(Error::InvalidArgument("closed form holds for i >= 1; at 0 the chain leaves at once".into()));
    }
    Ok((n / c).powi(i as i32) * (n - T::one()) / (n * (T::one() + T::one() / c) - lit::<T>(2.0)))
}

/// Expected distance after one step from i for the c^j-walk.
pub fn drift_geometric<T: Real>(order: u32, c: T, i: usize) -> Result<T> {
    let (n, a) = check_geometric(order, c)?;
    if i == 0 {
        return Ok(n / (n - c));
    }
    let n1 = n - T::one();
    let ni = n.powi(i as i32);
    let bracket = c / (n - c) - (n - c) * (ni - T::one()) / (ni * n1 * n1);
    Ok(from_usize::<T>(i) + a.powi(i as i32 - 1) * bracket)
}

/// Level L_N(c) beyond which the drift of the c^j-walk (c < 1) turns negative.
pub fn drift_threshold<T: Real>(order: u32, c: T) -> Result<T> {
    let (n, _) = check_geometric(order, c)?;
    let ratio = (n - T::one()) / (n - c);
    let arg = T::one() - c * ratio * ratio;
    if !(arg > T::zero()) || c >= T::one() {
        return Err(Error::Domain(format!("threshold exists only for c < 1, got c = {c}")));
    }
    Ok(-arg.ln() / n.ln())
}

/// Mean passage time past the drift threshold of a c^j-walk, c < 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ThresholdPassage<T> {
    /// E_0 τ_T with the integer level T = floor(L) + 1.
    pub integer_level: T,
    /// (N/c)^L, the same expression at the real level L.
    pub real_level: T,
    /// 1/(1-c).
    pub limit: T,
}

pub fn threshold_passage<T: Real>(order: u32, c: T) -> Result<ThresholdPassage<T>> {
    let level = drift_threshold(order, c)?;
    let n = T::from_u32(order).unwrap();
    let base = n / c;
    Ok(ThresholdPassage {
        integer_level: base.powf(level.floor()),
        real_level: base.powf(level),
        limit: T::one() / (T::one() - c),
    })
}

/// E_0 (Z*_n)^M for the c^j-walk with its upper bound on E_0 Z_n^M.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MaxMoment<T> {
    pub exact: Approx<T>,
    pub bound: T,
}

pub fn max_moment<T: Real>(order: u32, c: T, n: u32, m: T) -> Result<MaxMoment<T>> {
    let (_, a) = check_geometric(order, c)?;
    if n == 0 || !(m > T::zero()) {
        return Err(Error::InvalidArgument("need n >= 1 and M > 0".into()));
    }
    let one = T::one();
    let nt = T::from_u32(n).unwrap();
    let factor = one / a - one;
    let mut exact = Vec::new();
    let mut bound = Vec::new();
    let mut j = 0usize;
    let err = loop {
        j += 1;
        let jt = from_usize::<T>(j);
        let aj = a.powi(j as i32);
        let upper = one - aj;
        let lower = one - a.powi(j as i32 - 1);
        let mut inner = Vec::with_capacity(n as usize);
        for k in 1..=n {
            inner.push(upper.powi((n - k) as i32) * lower.powi(k as i32 - 1));
        }
        exact.push(jt.powf(m) * aj * factor * sum_descending(&mut inner));
        bound.push(nt * factor * jt.powf(m) * aj * upper.powi(n as i32 - 1));
        // remaining terms are at most n (1/a - 1) Σ_{i>j} i^M a^i
        let next = from_usize::<T>(j + 1);
        let rho = a * ((next + one) / next).powf(m);
        if rho < one {
            let tail = nt * factor * next.powf(m) * a.powi(j as i32 + 1) / (one - rho);
            let scale = exact.iter().fold(T::zero(), |s, &x| s + x);
            if tail <= lit::<T>(1e-16) * scale || tail <= T::min_positive_value() {
                break tail;
            }
        }
        if j > 100_000 {
            return Err(Error::Indeterminate("moment series did not settle".into()));
        }
    };
    let value = sum_descending(&mut exact);
    Ok(MaxMoment {
        exact: Approx { value, error_bound: err + value * T::epsilon() * lit::<T>(4.0), terms: j },
        bound: sum_descending(&mut bound) + err,
    })
}

/// Exit behaviour of a (mu, (eta^j), N)-walk from B_j on the time scale N^(j/mu).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Timescale<T> {
    pub steps: u64,
    /// P_0[Z*_n <= j]
    pub at_most: T,
    /// P_0[Z*_n = j]
    pub exactly: T,
    /// Limit of P_0[Z*_n <= j] as j grows: 0, 1/e or 1.
    pub level_limit: T,
    /// Large-N limits of P_0[Z*_n = j] and P_0[Z*_n = j+1].
    pub order_limit: (T, T),
}

pub fn timescale_probability<T: Real>(order: u32, mu: T, eta: T, j: usize) -> Result<Timescale<T>> {
    if order < 2 {
        return Err(Error::InvalidOrder(order as u64));
    }
    if !(mu >= T::one() && eta > T::zero()) || j == 0 {
        return Err(Error::InvalidArgument("need mu >= 1, eta > 0 and j >= 1".into()));
    }
    let n = T::from_u32(order).unwrap();
    let a = eta * n.powf(-T::one() / mu);
    if !(a < T::one()) {
        return Err(Error::Divergence("eta must be below N^(1/mu)".into()));
    }
    let steps_t = n.powf(from_usize::<T>(j) / mu).floor();
    let steps = steps_t.to_u64().ok_or_else(|| Error::InvalidArgument("time scale overflows".into()))?;
    let ln_at_most = |k: usize| steps_t * (-a.powi(k as i32)).ln_1p();
    let at_most = ln_at_most(j).exp();
    let exactly = at_most - ln_at_most(j - 1).exp();
    let one = T::one();
    let level_limit = if eta > one {
        T::zero()
    } else if eta == one {
        (-one).exp()
    } else {
        one
    };
    let ej = (-eta.powi(j as i32)).exp();
    Ok(Timescale { steps, at_most, exactly, level_limit, order_limit: (ej, one - ej) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{build_tables, WalkSpec};

    fn chain(n: u32, c: f64) -> DistanceChain<f64> {
        DistanceChain::new(build_tables(&WalkSpec::geometric(n, c), 1e-15).unwrap())
    }

    #[test]
    fn origin_never_stays() {
        assert_eq!(chain(2, 1.0).p(0, 0), 0.0);
    }

    #[test]
    fn binary_stay_probability() {
        let ch = chain(2, 1.0);
        for i in 1..10 {
            assert!((ch.p(i, i) - (1.0 - 0.5f64.powi(i as i32 - 1))).abs() < 1e-15);
        }
    }

    #[test]
    fn rows_are_stochastic_and_match_closed_form() {
        for (n, c) in [(2u32, 1.0), (4, 2.0), (3, 0.7)] {
            let ch = chain(n, c);
            for i in 0..=10 {
                assert!((ch.row_sum(i) - 1.0).abs() < 1e-12);
                for j in 0..=12 {
                    let closed = p_geometric(n, c, i, j).unwrap();
                    assert!((ch.p(i, j) - closed).abs() < 1e-14, "N={n} c={c} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn passage_and_holding_examples() {
        let ch = chain(4, 2.0);
        assert!((ch.hitting(3).unwrap().mean - 4.0).abs() < 1e-12);
        let h = ch.hitting(3).unwrap();
        assert_eq!(h.pmf(1), h.success);
        assert!((exit_mean_geometric(2, 1.0f64, 2).unwrap() - 2.0).abs() < 1e-14);
        let b = chain(2, 1.0);
        assert!((b.exit(2).mean - 2.0).abs() < 1e-12);
        assert!(exit_mean_geometric(2, 1.0, 0).is_err());
    }

    #[test]
    fn drift_examples() {
        assert!((drift_geometric(4, 2.0f64, 0).unwrap() - 2.0).abs() < 1e-15);
        assert!((drift_geometric(2, 1.0, 3).unwrap() - (3.0 + 2f64.powi(-5))).abs() < 1e-15);
        let l = drift_threshold(2, 0.5f64).unwrap();
        assert!((l - 0.3626).abs() < 1e-4);
        assert!(drift_threshold(2, 1.0).is_err());
        assert!(drift_geometric(2, 0.5, 0).unwrap() > 0.0);
        assert!(drift_geometric(2, 0.5, 1).unwrap() < 1.0);
    }

    #[test]
    fn max_law_single_step_is_tail() {
        let ch = chain(3, 1.2);
        for j in 1..8 {
            assert!((ch.max_dist(1, j).unwrap().survival - ch.tables().tail_mass(j - 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn max_matrix_power_matches_closed_form() {
        let ch = chain(2, 1.0);
        let q5 = ch.max_matrix(16).power(5);
        for i in 0..=12 {
            for j in 0..=12 {
                let closed = max_matrix_n_geometric(0.5, 5, i, j);
                assert!((q5.get(i, j) - closed).abs() < 1e-13, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn max_moment_consistency() {
        let m = max_moment(2, 1.0, 1, 1.0).unwrap();
        assert!((m.exact.value - drift_geometric(2, 1.0f64, 0).unwrap()).abs() < 1e-12);
        let direct: f64 = (1..200)
            .map(|j| j as f64 * ((1.0 - 0.5f64.powi(j)).powi(10) - (1.0 - 0.5f64.powi(j - 1)).powi(10)))
            .sum();
        let m10 = max_moment(2, 1.0, 10, 1.0).unwrap();
        assert!((m10.exact.value - direct).abs() < 1e-12);
        assert!(m10.exact.value <= m10.bound);
    }

    #[test]
    fn timescale_limits() {
        let t = timescale_probability(2, 1.0, 1.0, 20).unwrap();
        assert!((t.at_most - (-1.0f64).exp()).abs() < 1e-5);
        let far = timescale_probability(10_000, 2.0f64, 1.2, 2).unwrap();
        assert!((far.exactly / far.order_limit.0 - 1.0).abs() < 0.02);
    }
}
