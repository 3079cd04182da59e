//! Green-operator powers, degree classification, incomplete potentials,
//! last-exit integrals, return-time tails and occupation normings.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{build_tables, KernelTables, Law, Sequence, WalkSpec, DEFAULT_EPS};
use crate::numeric::{certify_series, from_usize, linear_fit, lit, sum_descending, SeriesOptions, SeriesVerdict};
use crate::special::{gamma, gamma_star, ln_gamma, riemann_zeta};
use crate::Real;

const MAX_MODES: usize = 20_000;
const MODE_TOL: f64 = 1e-17;

/// A series value with a bound on the neglected remainder, or a divergence flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PotentialValue<T> {
    pub value: T,
    pub truncation_error: T,
    pub divergent: bool,
    /// False when neither convergence nor divergence could be certified.
    pub certified: bool,
    pub terms: usize,
}

impl<T: Real> PotentialValue<T> {
    pub fn finite(value: T, truncation_error: T, terms: usize) -> Self {
        Self { value, truncation_error, divergent: false, certified: true, terms }
    }

    pub fn infinite(terms: usize) -> Self {
        Self { value: T::infinity(), truncation_error: T::zero(), divergent: true, certified: true, terms }
    }

    pub fn indeterminate(partial: T, terms: usize) -> Self {
        Self { value: partial, truncation_error: T::infinity(), divergent: false, certified: false, terms }
    }

    pub fn is_finite(&self) -> bool {
        self.certified && !self.divergent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoration {
    Plus,
    Minus,
    Undetermined,
}

impl std::fmt::Display for Decoration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Decoration::Plus => "plus",
            Decoration::Minus => "minus",
            Decoration::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeMethod {
    ClosedFormGeometric,
    ClosedFormMuFamily,
    RatioBounds,
    SummabilityTest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeReport<T> {
    pub gamma: T,
    pub decoration: Decoration,
    pub method: DegreeMethod,
    /// Interval bounds, present when only ratio limits are known.
    pub lower: Option<T>,
    pub upper: Option<T>,
}

// ln of the j-th term N^-j h_j^-zeta, arranged so that the linear trend of
// ln h_j cancels exactly when zeta equals the law's scale exponent
fn green_ln_term<T: Real>(tables: &KernelTables<T>, zeta: T, j: usize) -> T {
    let src = tables.source();
    let rest = src.ln_h_rest(j);
    let slope = T::one() - zeta / src.scale_mu;
    let trend = if slope == T::zero() { T::zero() } else { from_usize::<T>(j - 1) * src.ln_n * slope };
    -src.ln_n - zeta * rest - trend
}

fn certify_green<T: Real>(tables: &KernelTables<T>, zeta: T, first: usize) -> SeriesVerdict<T> {
    certify_series(|j| green_ln_term(tables, zeta, j), first, SeriesOptions::default())
}

/// G^zeta(0,0) = (N-1) Σ_j N^-j h_j^-zeta.
pub fn green_power<T: Real>(tables: &KernelTables<T>, zeta: T) -> Result<PotentialValue<T>> {
    if !(zeta > T::zero()) {
        return Err(Error::InvalidArgument("zeta must be positive".into()));
    }
    let n1 = tables.n() - T::one();
    Ok(match certify_green(tables, zeta, 1) {
        SeriesVerdict::Converges { sum, tail_bound, terms } => {
            let rounding = sum * T::epsilon() * from_usize::<T>(4);
            PotentialValue::finite(n1 * sum, n1 * (tail_bound + rounding), terms)
        }
        SeriesVerdict::Diverges { terms } => PotentialValue::infinite(terms),
        SeriesVerdict::Undetermined { partial, terms } => PotentialValue::indeterminate(n1 * partial, terms),
    })
}

/// Degree for a geometric ratio rho of the c- or d-sequence.
fn ratio_degree<T: Real>(mu: T, rho: T, ln_n: T) -> T {
    let x = mu * rho.ln() / ln_n;
    (mu - T::one() + x) / (T::one() - x)
}

/// Classifies the degree from the structure of the jump law.
pub fn degree_classify<T: Real>(spec: &WalkSpec) -> Result<DegreeReport<T>> {
    let tables: KernelTables<T> = build_tables(spec, DEFAULT_EPS)?;
    let n = tables.n();
    let ln_n = n.ln();
    let exact = |gamma: T, decoration, method| DegreeReport { gamma, decoration, method, lower: None, upper: None };
    match &spec.law {
        Law::Explicit { .. } => {
            Err(Error::Unsupported("explicit finitely supported laws have no degree classification".into()))
        }
        Law::Geometric { c } => {
            let c = lit::<T>(*c);
            Ok(exact(c.ln() / (n / c).ln(), Decoration::Minus, DegreeMethod::ClosedFormGeometric))
        }
        Law::MuC { mu, cseq: seq } | Law::MuD { mu, dseq: seq } => {
            let mu = lit::<T>(*mu);
            let (lo, hi) = seq
                .ratio_limits()
                .ok_or_else(|| Error::Unsupported("sequence rule exposes no ratio limits".into()))?;
            if lo != hi {
                let lower = ratio_degree(mu, lit::<T>(lo), ln_n);
                let upper = ratio_degree(mu, lit::<T>(hi), ln_n);
                let mean = mean_log_ratio(seq);
                let gamma = ratio_degree(mu, lit::<T>(mean.exp()), ln_n).max(lower).min(upper);
                return Ok(DegreeReport {
                    gamma,
                    decoration: Decoration::Undetermined,
                    method: DegreeMethod::RatioBounds,
                    lower: Some(lower),
                    upper: Some(upper),
                });
            }
            if lo == 1.0 {
                let decoration = match certify_green(&tables, mu, 1) {
                    SeriesVerdict::Converges { .. } => Decoration::Plus,
                    SeriesVerdict::Diverges { .. } if seq.is_nondecreasing() || seq.ratio_sup_from(0) <= 1.0 => {
                        Decoration::Minus
                    }
                    _ => Decoration::Undetermined,
                };
                return Ok(exact(mu - T::one(), decoration, DegreeMethod::ClosedFormMuFamily));
            }
            let decoration =
                if seq.is_eventually_geometric() { Decoration::Minus } else { Decoration::Undetermined };
            Ok(exact(ratio_degree(mu, lit::<T>(lo), ln_n), decoration, DegreeMethod::ClosedFormMuFamily))
        }
    }
}

// average ln ratio over a long even window
fn mean_log_ratio(seq: &Sequence) -> f64 {
    const START: usize = 1 << 30;
    const WINDOW: usize = 1 << 10;
    (START..START + WINDOW).map(|k| seq.ratio(k).ln()).sum::<f64>() / WINDOW as f64
}

/// Degree estimated from the decay rate of h_j far out, with the decoration
/// taken from a summability certificate at the critical exponent.
pub fn degree_by_summability<T: Real>(tables: &KernelTables<T>) -> Result<DegreeReport<T>> {
    if tables.has_finite_support() {
        return Err(Error::Unsupported("finitely supported laws have no degree classification".into()));
    }
    let src = tables.source();
    // increments of ln h_j with the N^(-j/mu) trend removed
    let drift = match &tables.spec().law {
        Law::Geometric { .. } => T::zero(),
        Law::MuD { dseq, .. } => lit::<T>(mean_log_ratio(dseq)),
        Law::MuC { cseq, .. } => {
            // ratio part summed directly, plus the drift of s_j across the same window
            const START: usize = 1 << 30;
            const WINDOW: usize = 1 << 10;
            let s_drift = (tables.s(START + WINDOW + 1).ln() - tables.s(START + 1).ln()) / from_usize::<T>(WINDOW);
            lit::<T>(mean_log_ratio(cseq)) + s_drift
        }
        Law::Explicit { .. } => unreachable!(),
    };
    let zeta = src.ln_n / (src.ln_n / src.scale_mu - drift);
    if !(zeta > T::zero()) || !zeta.is_finite() {
        return Err(Error::Indeterminate("h-sequence does not decay geometrically".into()));
    }
    let decoration = match certify_green(tables, zeta, 1) {
        SeriesVerdict::Converges { .. } => Decoration::Plus,
        SeriesVerdict::Diverges { .. } => Decoration::Minus,
        SeriesVerdict::Undetermined { .. } => Decoration::Undetermined,
    };
    Ok(DegreeReport {
        gamma: zeta - T::one(),
        decoration,
        method: DegreeMethod::SummabilityTest,
        lower: None,
        upper: None,
    })
}

// (N-1) Σ_j N^-j mode(h_j), each mode bounded by `mode_bound`
fn mode_sum<T: Real>(tables: &KernelTables<T>, mode_bound: T, mode: impl Fn(T) -> T) -> PotentialValue<T> {
    let n = tables.n();
    let n1 = n - T::one();
    let mut terms = Vec::new();
    let mut k = 0;
    loop {
        k += 1;
        let weight = n.powi(-(k as i32));
        terms.push(n1 * weight * mode(tables.h(k)));
        let err = weight * mode_bound;
        let scale = terms.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        if err <= lit::<T>(MODE_TOL) * scale || err <= T::min_positive_value() || k >= MAX_MODES {
            let value = sum_descending(&mut terms);
            return PotentialValue::finite(value, err + value.abs() * T::epsilon() * from_usize::<T>(4), k);
        }
    }
}

/// g_t^(zeta) = (1/Γ(zeta)) ∫_0^t s^(zeta-1) p_s(0,0) ds, one incomplete gamma per mode.
pub fn g_t_zeta<T: Real>(tables: &KernelTables<T>, zeta: T, t: T) -> Result<PotentialValue<T>> {
    if !(zeta > T::zero() && t > T::zero()) {
        return Err(Error::InvalidArgument("zeta and t must be positive".into()));
    }
    let tz = t.powf(zeta);
    let bound = tz * (-ln_gamma(zeta + T::one())).exp();
    Ok(mode_sum(tables, bound, |h| tz * gamma_star(zeta, h * t)))
}

// (1 - e^-x) / x
fn phi<T: Real>(x: T) -> T {
    if x < lit::<T>(1e-8) {
        T::one() - x * lit::<T>(0.5)
    } else {
        -(-x).exp_m1() / x
    }
}

/// G_t^k(0,0) for k in {1, 2}.
pub fn incomplete_powers<T: Real>(tables: &KernelTables<T>, k: u32, t: T) -> Result<PotentialValue<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    match k {
        1 => g_t_zeta(tables, T::one(), t),
        2 => {
            let t2 = t * t;
            Ok(mode_sum(tables, t2, |h| {
                let p = phi(h * t);
                t2 * p * p
            }))
        }
        _ => Err(Error::InvalidArgument(format!("power k must be 1 or 2, got {k}"))),
    }
}

/// G_t^2 G(0,0); infinite when G itself diverges.
pub fn g2g<T: Real>(tables: &KernelTables<T>, t: T) -> Result<PotentialValue<T>> {
    if !(t > T::zero()) {
        return Err(Error::InvalidArgument("t must be positive".into()));
    }
    let green = green_power(tables, T::one())?;
    if green.divergent {
        return Ok(green);
    }
    if !green.certified {
        return Err(Error::Indeterminate("G(0,0) has no convergence certificate".into()));
    }
    let n = tables.n();
    let n1 = n - T::one();
    let t2 = t * t;
    let cut = lit::<T>(1e-10);
    let mut terms = Vec::new();
    let mut k = 0;
    // exact modes until h_j t is negligible; beyond that t^2 phi^2 / h ≈ t^2 / h
    while k < MAX_MODES {
        k += 1;
        let h = tables.h(k);
        let p = phi(h * t);
        terms.push(n1 * n.powi(-(k as i32)) * t2 * p * p / h);
        if tables.h(k + 1) * t < cut {
            break;
        }
    }
    let head = sum_descending(&mut terms);
    match certify_green(tables, T::one(), k + 1) {
        SeriesVerdict::Converges { sum, tail_bound, terms: more } => {
            let tail = n1 * t2 * sum;
            let err = n1 * t2 * tail_bound + tail * tables.h(k + 1) * t + head * T::epsilon() * from_usize::<T>(4);
            Ok(PotentialValue::finite(head + tail, err, k + more))
        }
        SeriesVerdict::Diverges { terms } => Ok(PotentialValue::infinite(k + terms)),
        SeriesVerdict::Undetermined { partial, terms } => {
            Ok(PotentialValue::indeterminate(head + n1 * t2 * partial, k + terms))
        }
    }
}

/// Predicted leading growth ((N-1)/(N D^mu)) Σ_{j <= mu log t / log N} d_j^-mu
/// of the incomplete potentials of a recurrent walk at its critical exponent.
pub fn asymptotic_benchmark<T: Real>(tables: &KernelTables<T>, mu: T, t: T) -> Result<T> {
    let spec = tables.spec();
    let seq_ok = match &spec.law {
        Law::MuC { cseq: s, .. } | Law::MuD { dseq: s, .. } => s.is_nondecreasing(),
        Law::Geometric { c } => *c == 1.0,
        Law::Explicit { .. } => false,
    };
    if !seq_ok {
        return Err(Error::Unsupported("benchmark needs a mu-family law with non-decreasing d_j".into()));
    }
    if (mu - tables.mu()).abs() > lit::<T>(1e-12) {
        return Err(Error::Unsupported("benchmark exponent must equal the walk's mu".into()));
    }
    if !(t > T::one()) {
        return Err(Error::InvalidArgument("t must exceed 1".into()));
    }
    // Σ d_j^-mu must diverge
    let opts = SeriesOptions::default();
    if !matches!(certify_series(|j| -mu * tables.ln_d(j), 0, opts), SeriesVerdict::Diverges { .. }) {
        return Err(Error::Unsupported("Σ d_j^-mu is not certified divergent; the walk is not critical".into()));
    }
    let n = tables.n();
    let top = (mu * t.ln() / n.ln()).floor().to_usize().unwrap_or(0);
    let mut terms: Vec<T> = (0..=top).map(|j| (-mu * tables.ln_d(j)).exp()).collect();
    let d_pow = tables.normalizer().powf(mu);
    Ok((n - T::one()) / (n * d_pow) * sum_descending(&mut terms))
}

/// ∫_0^∞ t^(mu-1) P_t(0, B_R) dt by modes, with the geometric closed form when available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LastExitValue<T> {
    pub series: PotentialValue<T>,
    pub closed_form: Option<T>,
}

pub fn last_exit_integral<T: Real>(tables: &KernelTables<T>, mu: T, radius: usize) -> Result<LastExitValue<T>> {
    if !(mu >= T::one()) {
        return Err(Error::InvalidArgument("mu must be at least 1".into()));
    }
    let n = tables.n();
    let n1 = n - T::one();
    let scale = gamma(mu) * n1;
    let r = from_usize::<T>(radius);
    // N^(R-j) h_j^-mu = exp((R - j) ln N - mu ln h_j)
    let series = match certify_series(
        |j| (r - from_usize::<T>(j)) * n.ln() - mu * tables.ln_h(j),
        radius + 1,
        SeriesOptions::default(),
    ) {
        SeriesVerdict::Converges { sum, tail_bound, terms } => {
            PotentialValue::finite(scale * sum, scale * (tail_bound + sum * T::epsilon() * lit::<T>(4.0)), terms)
        }
        SeriesVerdict::Diverges { terms } => PotentialValue::infinite(terms),
        SeriesVerdict::Undetermined { partial, terms } => PotentialValue::indeterminate(scale * partial, terms),
    };
    let closed_form = tables.geometric_ratio().and_then(|a| {
        // h_j = b a^(j-1) with b = (N - a)/(N - 1)
        let x = T::one() / (n * a.powf(mu));
        if x >= T::one() || series.divergent {
            return None;
        }
        let b = (n - a) / n1;
        Some(scale * b.powf(-mu) / n * a.powf(-mu * r) / (T::one() - x))
    });
    Ok(LastExitValue { series, closed_form })
}

/// The (mu, (eta^j), N) last-exit integral in closed form.
pub fn last_exit_closed_form<T: Real>(order: u32, mu: T, eta: T, radius: usize) -> Result<T> {
    if !(mu >= T::one() && eta > T::one()) {
        return Err(Error::Domain("closed form needs mu >= 1 and eta > 1".into()));
    }
    let n = T::from_u32(order).unwrap();
    let n1 = n - T::one();
    let base = (n.powf((mu + T::one()) / mu) / eta - T::one()).powf(mu);
    let eta_mu = eta.powf(mu);
    Ok(gamma(mu) * n1.powf(mu + T::one()) / base / (eta_mu - T::one())
        * (n / eta_mu).powi(radius as i32))
}

/// Return-time survival ρ_t = P[R > t] on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReturnTail<T> {
    pub grid: Vec<T>,
    pub rho: Vec<T>,
    /// Largest defect of the discretized renewal identity after clipping.
    pub residual: T,
    /// Largest adjustment made by clipping to [0, 1] and enforcing monotonicity.
    pub clip: T,
}

pub const RENEWAL_TOLERANCE: f64 = 1e-6;

impl<T: Real> ReturnTail<T> {
    /// Wraps externally supplied survival values (used for synthetic checks).
    pub fn from_values(grid: Vec<T>, rho: Vec<T>) -> Result<Self> {
        if grid.len() != rho.len() || grid.len() < 2 {
            return Err(Error::InvalidArgument("grid and values must have equal length >= 2".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("grid must be increasing".into()));
        }
        Ok(Self { grid, rho, residual: T::zero(), clip: T::zero() })
    }

    /// Survival of the first return time T = H + R, with H ~ Exp(1) the
    /// holding time at the origin: e^-t + ∫_0^t e^-s ρ_(t-s) ds.
    pub fn first_return_survival(&self) -> Vec<T> {
        let dt = self.grid[1] - self.grid[0];
        let half = lit::<T>(0.5);
        let decay: Vec<T> = self.grid.iter().map(|&t| (-(t - self.grid[0])).exp()).collect();
        (0..self.grid.len())
            .map(|n| {
                let mut acc = T::zero();
                for k in 0..=n {
                    let w = if k == 0 || k == n { half } else { T::one() };
                    acc = acc + w * decay[k] * self.rho[n - k];
                }
                decay[n] + dt * if n == 0 { T::zero() } else { acc }
            })
            .collect()
    }

    /// ρ at time t by linear interpolation (clamped to the grid).
    pub fn at(&self, t: T) -> T {
        interpolate(&self.grid, &self.rho, t)
    }
}

pub(crate) fn interpolate<T: Real>(grid: &[T], values: &[T], t: T) -> T {
    if t <= grid[0] {
        return values[0];
    }
    let last = grid.len() - 1;
    if t >= grid[last] {
        return values[last];
    }
    let dt = grid[1] - grid[0];
    let i = ((t - grid[0]) / dt).floor().to_usize().unwrap_or(0).min(last - 1);
    let w = (t - grid[i]) / dt;
    values[i] * (T::one() - w) + values[i + 1] * w
}

/// Solves ∫_0^t p_s(0,0) ρ_(t-s) ds + p_t(0,0) = 1 for ρ on a uniform grid of
/// `steps` intervals over [0, horizon] by trapezoidal forward substitution.
pub fn return_tail_solve<T: Real>(tables: &KernelTables<T>, horizon: T, steps: usize) -> Result<ReturnTail<T>> {
    if !(horizon > T::zero()) || steps < 100 {
        return Err(Error::InvalidArgument("need horizon > 0 and at least 100 steps".into()));
    }
    let dt = horizon / from_usize::<T>(steps);
    let half = lit::<T>(0.5);
    let grid: Vec<T> = (0..=steps).map(|i| from_usize::<T>(i) * dt).collect();
    let p: Vec<T> = grid.iter().map(|&t| tables.pt(t, 0).value).collect();
    let q: Vec<T> = grid.iter().map(|&t| tables.pt_complement(t).value).collect();
    let mut rho = vec![T::zero(); steps + 1];
    rho[0] = T::one();
    let mut clip = T::zero();
    for n in 1..=steps {
        let mut conv = T::zero();
        for k in 1..n {
            conv = conv + p[k] * rho[n - k];
        }
        let raw = (q[n] - dt * conv - dt * half * p[n] * rho[0]) / (dt * half * p[0]);
        let kept = raw.max(T::zero()).min(T::one()).min(rho[n - 1]);
        clip = clip.max((raw - kept).abs());
        rho[n] = kept;
    }
    let mut residual = T::zero();
    for n in 1..=steps {
        let mut conv = half * (p[0] * rho[n] + p[n] * rho[0]);
        for k in 1..n {
            conv = conv + p[k] * rho[n - k];
        }
        residual = residual.max((dt * conv - q[n]).abs());
    }
    if residual > lit::<T>(RENEWAL_TOLERANCE) {
        return Err(Error::SolverFailure {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tolerance: RENEWAL_TOLERANCE,
        });
    }
    Ok(ReturnTail { grid, rho, residual, clip })
}

/// E R^zeta from a solved tail, with a power-law extrapolation past the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MomentEstimate<T> {
    pub value: T,
    /// Fitted exponent a in ρ_t ~ C t^a over the last decade.
    pub tail_exponent: T,
    pub likely_divergent: bool,
}

pub fn return_moment<T: Real>(tail: &ReturnTail<T>, zeta: T) -> Result<MomentEstimate<T>> {
    if !(zeta > T::zero()) {
        return Err(Error::InvalidArgument("zeta must be positive".into()));
    }
    let horizon = *tail.grid.last().unwrap();
    let half = lit::<T>(0.5);
    let mut body = T::zero();
    for i in 0..tail.grid.len() - 1 {
        let du = tail.grid[i + 1].powf(zeta) - tail.grid[i].powf(zeta);
        body = body + half * (tail.rho[i] + tail.rho[i + 1]) * du;
    }
    let from = horizon / lit::<T>(10.0);
    let (xs, ys): (Vec<T>, Vec<T>) = tail
        .grid
        .iter()
        .zip(&tail.rho)
        .filter(|(&t, &r)| t >= from && t > T::zero() && r > T::zero())
        .map(|(&t, &r)| (t.ln(), r.ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::InvalidArgument("tail has no positive values over its last decade".into()));
    }
    let (a, c) = linear_fit(&xs, &ys);
    if a + zeta >= T::zero() {
        return Ok(MomentEstimate { value: T::infinity(), tail_exponent: a, likely_divergent: true });
    }
    // ∫_T^∞ C t^a zeta t^(zeta-1) dt
    let extra = c.exp() * zeta * horizon.powf(a + zeta) / -(a + zeta);
    Ok(MomentEstimate { value: body + extra, tail_exponent: a, likely_divergent: false })
}

/// Occupation-time norming a_t for the j^beta family at level mu.
pub fn norming<T: Real>(beta: T, mu: u32, t: T) -> Result<T> {
    if !(1..=3).contains(&mu) {
        return Err(Error::InvalidArgument(format!("level must be 1, 2 or 3, got {mu}")));
    }
    if !(beta >= T::zero()) {
        return Err(Error::InvalidArgument("beta must be non-negative".into()));
    }
    if !(t > T::one().exp()) {
        return Err(Error::Domain("norming needs t > e".into()));
    }
    let mu_t = T::from_u32(mu).unwrap();
    let critical = T::one() / mu_t;
    let half = lit::<T>(0.5);
    let tol = lit::<T>(1e-12);
    Ok(if (beta - critical).abs() <= tol {
        (t * t.ln().ln()).sqrt()
    } else if beta < critical {
        t.sqrt() * t.ln().powf((T::one() - mu_t * beta) * half)
    } else {
        t.sqrt()
    })
}

/// Covariance kernel of the j^beta occupation limit at hierarchical distance `dist`.
pub fn covariance_kernel_jbeta<T: Real>(order: u32, beta: T, normalizer: T, dist: usize) -> Result<T> {
    if !(beta > T::one()) {
        return Err(Error::Unsupported("covariance kernel needs beta > 1".into()));
    }
    if order < 2 {
        return Err(Error::InvalidOrder(order as u64));
    }
    let n = T::from_u32(order).unwrap();
    let n1 = n - T::one();
    let mut value = n1 * riemann_zeta(beta);
    if dist > 0 {
        let mut partial: Vec<T> = (1..=dist).map(|j| from_usize::<T>(j).powf(-beta)).collect();
        value = value - from_usize::<T>(dist).powf(-beta) - n1 * sum_descending(&mut partial);
    }
    Ok(lit::<T>(2.0) * n / normalizer * value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables(spec: WalkSpec) -> KernelTables<f64> {
        build_tables(&spec, 1e-14).unwrap()
    }

    #[test]
    fn critical_binary_walk_green_diverges() {
        let t = tables(WalkSpec::geometric(2, 1.0));
        let g = green_power(&t, 1.0).unwrap();
        assert!(g.divergent && g.certified && g.value.is_infinite());
    }

    #[test]
    fn half_power_closed_form() {
        let t = tables(WalkSpec::geometric(2, 1.0));
        let g = green_power(&t, 0.5).unwrap();
        let exact = (2.0f64 / 3.0).sqrt() * 0.5 / (1.0 - 0.5f64.sqrt());
        assert!((g.value - exact).abs() <= g.truncation_error + 1e-14, "{g:?}");
        assert!((g.value - 1.3938).abs() < 1e-4);
    }

    #[test]
    fn explicit_law_green_diverges() {
        let t = tables(WalkSpec::explicit(2, vec![0.5, 0.5]));
        assert!(green_power(&t, 0.5).unwrap().divergent);
    }

    #[test]
    fn geometric_degree_examples() {
        let d: DegreeReport<f64> = degree_classify(&WalkSpec::geometric(4, 2.0)).unwrap();
        assert!((d.gamma - 1.0).abs() < 1e-15);
        assert_eq!(d.decoration, Decoration::Minus);
        let m: DegreeReport<f64> = degree_classify(&WalkSpec::mu_c(3, 2.0, Sequence::Constant { value: 1.0 })).unwrap();
        assert!((m.gamma - 1.0).abs() < 1e-15);
        assert_eq!(m.decoration, Decoration::Minus);
    }

    #[test]
    fn j_beta_decorations() {
        let minus: DegreeReport<f64> = degree_classify(&WalkSpec::j_beta(16, 1.0, 0.5)).unwrap();
        assert_eq!((minus.gamma, minus.decoration), (0.0, Decoration::Minus));
        let plus: DegreeReport<f64> = degree_classify(&WalkSpec::j_beta(16, 1.0, 1.5)).unwrap();
        assert_eq!(plus.decoration, Decoration::Plus);
    }

    #[test]
    fn alternating_ratios_give_bounds() {
        let spec = WalkSpec::mu_c(4, 1.0, Sequence::Alternating { low: 0.5, high: 2.0 });
        let d: DegreeReport<f64> = degree_classify(&spec).unwrap();
        assert_eq!(d.method, DegreeMethod::RatioBounds);
        assert_eq!(d.decoration, Decoration::Undetermined);
        let (lo, hi) = (d.lower.unwrap(), d.upper.unwrap());
        assert!(lo < d.gamma && d.gamma < hi);
        assert!(d.gamma.abs() < 1e-12);
    }

    #[test]
    fn list_without_tail_is_unsupported() {
        let spec = WalkSpec::mu_c(2, 1.0, Sequence::List { values: vec![1.0], tail_ratio: None });
        assert!(degree_classify::<f64>(&spec).is_err());
        assert!(matches!(degree_classify::<f64>(&WalkSpec::explicit(2, vec![1.0])), Err(Error::Unsupported(_))));
    }

    #[test]
    fn summability_agrees_with_closed_form_for_geometric() {
        for (n, c) in [(2u32, 0.5), (4, 2.0), (16, 3.0)] {
            let spec = WalkSpec::geometric(n, c);
            let a: DegreeReport<f64> = degree_classify(&spec).unwrap();
            let b = degree_by_summability(&tables(spec)).unwrap();
            assert!((a.gamma - b.gamma).abs() < 1e-12);
            assert_eq!(a.decoration, b.decoration);
        }
    }

    #[test]
    fn g_t_zeta_unit_matches_exponential_modes() {
        let t = tables(WalkSpec::geometric(3, 1.5));
        let time = 7.0;
        let v = g_t_zeta(&t, 1.0, time).unwrap().value;
        let direct: f64 = (1..200).map(|j| 2.0 * 3f64.powi(-j) * (1.0 - (-t.h(j as usize) * time).exp()) / t.h(j as usize)).sum();
        assert!((v - direct).abs() < 1e-12 * direct);
        assert_eq!(incomplete_powers(&t, 1, time).unwrap().value, v);
        assert!(g_t_zeta(&t, 1.0, 1e-9).unwrap().value < 1e-8);
    }

    #[test]
    fn second_power_small_time() {
        let t = tables(WalkSpec::geometric(2, 1.0));
        let time = 1e-5;
        let v = incomplete_powers(&t, 2, time).unwrap().value;
        assert!((v / (time * time) - 1.0).abs() < 1e-4);
        assert!(incomplete_powers(&t, 3, 1.0).is_err());
    }

    #[test]
    fn g2g_behaviour() {
        let t = tables(WalkSpec::geometric(2, 1.0));
        assert!(g2g(&t, 10.0).unwrap().divergent);
        let w = tables(WalkSpec::geometric(4, 2.0));
        let mut prev = 0.0;
        for k in 1..=6 {
            let v = g2g(&w, 10f64.powi(k)).unwrap();
            assert!(v.is_finite() && v.value > prev);
            prev = v.value;
        }
        assert!(g2g(&w, 1e-8).unwrap().value < 1e-12);
    }

    #[test]
    fn last_exit_closed_form_matches_series() {
        let spec = WalkSpec::mu_c(16, 2.0, Sequence::Geometric { eta: 1.5 });
        let t = tables(spec);
        let v = last_exit_integral(&t, 2.0, 2).unwrap();
        let reference = last_exit_closed_form(16, 2.0, 1.5, 2).unwrap();
        assert!((v.series.value - reference).abs() < 1e-10 * reference);
        assert!((v.closed_form.unwrap() - reference).abs() < 1e-12 * reference);
        let v0 = last_exit_integral(&t, 2.0, 0).unwrap().series.value;
        let v1 = last_exit_integral(&t, 2.0, 1).unwrap().series.value;
        assert!(v1 > v0);
    }

    #[test]
    fn recurrent_last_exit_is_infinite() {
        let t = tables(WalkSpec::geometric(2, 1.0));
        assert!(last_exit_integral(&t, 1.0, 0).unwrap().series.divergent);
    }

    #[test]
    fn return_tail_basic_shape() {
        let t = tables(WalkSpec::geometric(2, 1.0));
        let tail = return_tail_solve(&t, 10.0, 1000).unwrap();
        assert_eq!(tail.rho[0], 1.0);
        assert!(tail.rho.windows(2).all(|w| w[1] <= w[0]));
        assert!(tail.residual < 1e-6);
    }

    #[test]
    fn synthetic_moment() {
        let grid: Vec<f64> = (0..=200_000).map(|i| i as f64 * 0.01).collect();
        let rho: Vec<f64> = grid.iter().map(|t| (1.0 + t).powi(-2)).collect();
        let tail = ReturnTail::from_values(grid, rho).unwrap();
        let m = return_moment(&tail, 1.0).unwrap();
        assert!((m.value - 1.0).abs() < 1e-3, "{m:?}");
        assert!(return_moment(&tail, 2.5).unwrap().likely_divergent);
    }

    #[test]
    fn norming_regimes() {
        assert!((norming(1.5f64, 1, 100.0).unwrap() - 10.0).abs() < 1e-12);
        let e_e = std::f64::consts::E.exp();
        assert!((norming(1.0, 1, e_e).unwrap() - e_e.sqrt()).abs() < 1e-12);
        let expect = (100.0 * 100f64.ln()).sqrt();
        assert!((norming(0.0, 1, 100.0).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn covariance_kernel_values() {
        let pi2 = std::f64::consts::PI.powi(2) / 6.0;
        let k0 = covariance_kernel_jbeta(2, 2.0, 0.5, 0).unwrap();
        assert!((k0 - 8.0 * pi2).abs() < 1e-12);
        let k1 = covariance_kernel_jbeta(2, 2.0, 0.5, 1).unwrap();
        assert!((k1 - 8.0 * (pi2 - 1.0 - 1.0)).abs() < 1e-12);
        assert!(covariance_kernel_jbeta(2, 1.0, 0.5, 0).is_err());
    }
}
