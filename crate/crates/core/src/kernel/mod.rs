//! Jump laws of r_j-walks and their exact transition probabilities.

mod modes;
mod spec;
mod transition;

use serde::Serialize;

pub(crate) use modes::ModeSource;
use modes::{scaled_tail, Modes};
pub use spec::{Law, Sequence, WalkSpec};
pub use transition::{brute_force_pn, c_from_d_unit_mu, r_from_h, BruteForce, HTail};

use crate::error::{Error, Result};
use crate::numeric::{lit, Accumulator};
use crate::Real;

/// Default truncation tolerance for the neglected r-tail.
pub const DEFAULT_EPS: f64 = 1e-13;

const MAX_LEVELS: usize = 1_000_000;

/// Tabulated r, f, h, s, d with the normalizer and truncation data.
#[derive(Debug, Clone)]
pub struct KernelTables<T> {
    spec: WalkSpec,
    source: ModeSource<T>,
    truncation: usize,
    r: Vec<T>,
    f: Vec<T>,
    h: Vec<T>,
    s: Vec<T>,
    d: Vec<T>,
    normalizer: T,
    tail_bound: T,
}

/// One row of the CSV export.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TableRow<T> {
    pub j: usize,
    pub r: T,
    pub f: T,
    pub h: T,
    pub s: T,
    pub d: T,
}

/// Builds tables for `spec`, truncating once the remaining r-mass is below `eps`.
pub fn build_tables<T: Real>(spec: &WalkSpec, eps: f64) -> Result<KernelTables<T>> {
    spec.validate()?;
    if !(eps > 0.0 && eps <= 1e-6) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1e-6], got {eps}")));
    }
    let n: T = T::from_u32(spec.order).unwrap();
    let ln_n = n.ln();
    let one = T::one();
    let (source, normalizer) = match &spec.law {
        Law::Explicit { r } => {
            let r: Vec<T> = r.iter().map(|&v| lit::<T>(v)).collect();
            let mut tails = vec![T::zero(); r.len() + 1];
            let mut acc = Accumulator::new();
            for j in (0..r.len()).rev() {
                acc.add(r[j]);
                tails[j] = acc.total();
            }
            let modes = Modes::Finite { r, tails };
            (ModeSource { n, ln_n, scale_mu: one, modes }, one)
        }
        Law::Geometric { c } => {
            let c = lit::<T>(*c);
            let a = c / n;
            let b = (n * n - c) / (n * (n - one));
            let scale_mu = ln_n / (n / c).ln();
            (ModeSource { n, ln_n, scale_mu, modes: Modes::Geometric { a, b, c } }, one - a)
        }
        Law::MuC { mu, cseq } => {
            let mu_t = lit::<T>(*mu);
            let q = (-ln_n / mu_t).exp();
            let (_, limsup) = ratio_limits(cseq)?;
            if lit::<T>(limsup) * q >= one {
                return Err(Error::Divergence(format!(
                    "limsup c_(j+1)/c_j = {limsup} is not below N^(1/mu) = {}",
                    (ln_n / mu_t).exp()
                )));
            }
            let total = lit::<T>(cseq.value(0)) * scaled_tail(cseq, 0, q);
            if !total.is_finite() {
                return Err(Error::Divergence("c-series did not converge".into()));
            }
            let ln_norm = -total.ln();
            let modes = Modes::MuC { seq: cseq.clone(), q, ln_norm };
            (ModeSource { n, ln_n, scale_mu: mu_t, modes }, ln_norm.exp())
        }
        Law::MuD { mu, dseq } => {
            let mu_t = lit::<T>(*mu);
            let q = (-ln_n / mu_t).exp();
            let (_, limsup) = ratio_limits(dseq)?;
            if lit::<T>(limsup) * q / n >= one {
                return Err(Error::Divergence(format!("limsup d_(j+1)/d_j = {limsup} makes Σ h_j/N^j diverge")));
            }
            let unscaled = ModeSource {
                n,
                ln_n,
                scale_mu: mu_t,
                modes: Modes::MuD { seq: dseq.clone(), q, ln_norm: T::zero() },
            };
            let total = unscaled.tail(0);
            if !(total > T::zero() && total.is_finite()) {
                return Err(Error::Divergence("h-series did not normalize".into()));
            }
            let ln_norm = -total.ln();
            let modes = Modes::MuD { seq: dseq.clone(), q, ln_norm };
            (ModeSource { n, ln_n, scale_mu: mu_t, modes }, ln_norm.exp())
        }
    };

    let eps_t = lit::<T>(eps);
    let truncation = if let Modes::Finite { r, .. } = &source.modes {
        r.len()
    } else {
        let mut j = 1;
        loop {
            let t = source.tail(j);
            if t.is_nan() {
                return Err(Error::Divergence(format!("tail mass beyond level {j} is undefined")));
            }
            if t < eps_t {
                break j;
            }
            j += 1;
            if j > MAX_LEVELS {
                return Err(Error::Divergence("r-tail does not fall below eps".into()));
            }
        }
    };

    let mut r = Vec::with_capacity(truncation);
    let mut h = Vec::with_capacity(truncation);
    let mut s = Vec::with_capacity(truncation);
    let mut d = Vec::with_capacity(truncation);
    for j in 1..=truncation {
        let rj = source.r(j);
        if !(rj > T::zero()) {
            return Err(Error::InvalidKernel { k: j, value: rj.to_f64().unwrap_or(f64::NAN) });
        }
        r.push(rj);
        h.push(source.h(j));
        s.push(source.s(j));
        d.push(source.d_prev(j));
    }
    let f = h.iter().map(|&hj| one - hj).collect();
    let tail_bound = source.tail(truncation);
    Ok(KernelTables { spec: spec.clone(), source, truncation, r, f, h, s, d, normalizer, tail_bound })
}

fn ratio_limits(seq: &Sequence) -> Result<(f64, f64)> {
    seq.ratio_limits()
        .ok_or_else(|| Error::Unsupported("sequence rule gives no ratio bound; supply a tail ratio".into()))
}

impl<T: Real> KernelTables<T> {
    pub fn new(spec: &WalkSpec) -> Result<Self> {
        build_tables(spec, DEFAULT_EPS)
    }

    pub fn spec(&self) -> &WalkSpec {
        &self.spec
    }

    pub fn order(&self) -> u32 {
        self.spec.order
    }

    pub(crate) fn n(&self) -> T {
        self.source.n
    }

    /// Truncation index J.
    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Normalizer D.
    pub fn normalizer(&self) -> T {
        self.normalizer
    }

    /// Scale exponent mu of the law (1 for geometric and explicit laws).
    pub fn mu(&self) -> T {
        lit::<T>(self.spec.mu())
    }

    /// Bound on the r-mass beyond level J.
    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn r_table(&self) -> &[T] {
        &self.r
    }

    pub fn f_table(&self) -> &[T] {
        &self.f
    }

    pub fn h_table(&self) -> &[T] {
        &self.h
    }

    pub fn s_table(&self) -> &[T] {
        &self.s
    }

    /// d_0 .. d_(J-1).
    pub fn d_table(&self) -> &[T] {
        &self.d
    }

    /// r_j for any j >= 1.
    pub fn r(&self, j: usize) -> T {
        if j == 0 {
            return T::zero();
        }
        if j <= self.truncation {
            self.r[j - 1]
        } else {
            self.source.r(j)
        }
    }

    /// h_j for any j >= 1.
    pub fn h(&self, j: usize) -> T {
        if j >= 1 && j <= self.truncation {
            self.h[j - 1]
        } else {
            self.source.h(j)
        }
    }

    /// f_j = 1 - h_j.
    pub fn f(&self, j: usize) -> T {
        if j >= 1 && j <= self.truncation {
            self.f[j - 1]
        } else {
            T::one() - self.source.h(j)
        }
    }

    pub fn s(&self, j: usize) -> T {
        if j >= 1 && j <= self.truncation {
            self.s[j - 1]
        } else {
            self.source.s(j)
        }
    }

    /// d_k for any k >= 0.
    pub fn d(&self, k: usize) -> T {
        if k < self.truncation {
            self.d[k]
        } else {
            self.source.d_prev(k + 1)
        }
    }

    pub fn ln_d(&self, k: usize) -> T {
        self.source.ln_d_prev(k + 1)
    }

    /// c_k for any k >= 0.
    pub fn c(&self, k: usize) -> T {
        self.source.c_prev(k + 1)
    }

    /// Σ_{i>j} r_i for any j >= 0.
    pub fn tail_mass(&self, j: usize) -> T {
        self.source.tail(j)
    }

    /// Σ_{i<=j} r_i, computed as 1 minus the tail.
    pub fn cumulative(&self, j: usize) -> T {
        T::one() - self.source.tail(j)
    }

    pub fn ln_h(&self, j: usize) -> T {
        self.source.ln_h(j)
    }

    pub(crate) fn source(&self) -> &ModeSource<T> {
        &self.source
    }

    pub fn has_finite_support(&self) -> bool {
        self.source.is_finite_support()
    }

    /// a with r_j proportional to a^(j-1) when the law is exactly geometric.
    pub fn geometric_ratio(&self) -> Option<T> {
        self.source.geometric_ratio()
    }

    pub fn rows(&self) -> Vec<TableRow<T>> {
        (1..=self.truncation)
            .map(|j| TableRow { j, r: self.r[j - 1], f: self.f[j - 1], h: self.h[j - 1], s: self.s[j - 1], d: self.d[j - 1] })
            .collect()
    }
}
