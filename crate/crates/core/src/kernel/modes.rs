//! Per-level quantities r_j, Σ_{i>j} r_i and h_j evaluated at any level, so
//! that evaluations far beyond the tabulated range stay exact.

use crate::kernel::spec::Sequence;
use crate::numeric::{lit, Accumulator};
use crate::Real;

const MAX_TAIL_TERMS: usize = 200_000;

#[derive(Debug, Clone)]
pub(crate) enum Modes<T> {
    /// Finitely supported law; `tails[j]` is the mass beyond level j.
    Finite { r: Vec<T>, tails: Vec<T> },
    /// r_j = (1-a) a^(j-1), h_j = b a^(j-1).
    Geometric { a: T, b: T, c: T },
    /// r_j = D c_(j-1) q^(j-1).
    MuC { seq: Sequence, q: T, ln_norm: T },
    /// h_j = D d_(j-1) q^(j-1), r_j = h_j rho_j.
    MuD { seq: Sequence, q: T, ln_norm: T },
}

#[derive(Debug, Clone)]
pub(crate) struct ModeSource<T> {
    pub n: T,
    pub ln_n: T,
    /// Exponent with h_j proportional to N^(-(j-1)/scale_mu) up to a slowly varying factor.
    pub scale_mu: T,
    pub modes: Modes<T>,
}

/// Σ_{m>=0} (s_(k+m)/s_k) w^m with a geometric remainder bound.
pub(crate) fn scaled_tail<T: Real>(seq: &Sequence, k: usize, w: T) -> T {
    let mut acc = Accumulator::new();
    acc.add(T::one());
    let mut term = T::one();
    for m in 0..MAX_TAIL_TERMS {
        term = term * lit::<T>(seq.ratio(k + m)) * w;
        acc.add(term);
        let rho = lit::<T>(seq.ratio_sup_from(k + m + 1)) * w;
        if rho < T::one() && term * rho / (T::one() - rho) <= T::epsilon() * acc.total() {
            return acc.total();
        }
        if term == T::zero() {
            return acc.total();
        }
    }
    T::nan()
}

impl<T: Real> ModeSource<T> {
    fn idx(j: usize) -> T {
        T::from_usize(j).unwrap()
    }

    // MuD helper: w ratio(j-1) S(j, w) with w = q / N
    fn mud_x(&self, seq: &Sequence, q: T, j: usize) -> T {
        let w = q / self.n;
        w * lit::<T>(seq.ratio(j - 1)) * scaled_tail(seq, j, w)
    }

    fn mud_rho(&self, seq: &Sequence, q: T, j: usize) -> T {
        let n1 = self.n - T::one();
        n1 / self.n - n1 * n1 / self.n * self.mud_x(seq, q, j)
    }

    // MuC helper: s_j
    fn muc_s(&self, seq: &Sequence, q: T, j: usize) -> T {
        self.n / (self.n - T::one()) + q * lit::<T>(seq.ratio(j - 1)) * scaled_tail(seq, j, q)
    }

    pub fn r(&self, j: usize) -> T {
        debug_assert!(j >= 1);
        match &self.modes {
            Modes::Finite { r, .. } => r.get(j - 1).copied().unwrap_or_else(T::zero),
            Modes::Geometric { a, .. } => (T::one() - *a) * a.powi((j - 1) as i32),
            Modes::MuC { seq, q, ln_norm } => {
                (*ln_norm + lit::<T>(seq.ln_value(j - 1)) + Self::idx(j - 1) * q.ln()).exp()
            }
            Modes::MuD { seq, q, .. } => self.h(j) * self.mud_rho(seq, *q, j),
        }
    }

    /// Σ_{i>j} r_i.
    pub fn tail(&self, j: usize) -> T {
        match &self.modes {
            Modes::Finite { tails, .. } => tails.get(j).copied().unwrap_or_else(T::zero),
            Modes::Geometric { a, .. } => a.powi(j as i32),
            Modes::MuC { seq, q, ln_norm } => {
                (*ln_norm + lit::<T>(seq.ln_value(j)) + Self::idx(j) * q.ln()).exp() * scaled_tail(seq, j, *q)
            }
            Modes::MuD { seq, q, .. } => {
                if j == 0 {
                    let h1 = self.h(1);
                    h1 - h1 * self.mud_rho(seq, *q, 1) / (self.n - T::one())
                } else {
                    self.h(j) * (self.n - T::one()) * self.mud_x(seq, *q, j)
                }
            }
        }
    }

    pub fn h(&self, j: usize) -> T {
        debug_assert!(j >= 1);
        match &self.modes {
            Modes::Finite { .. } => self.r(j) * self.n / (self.n - T::one()) + self.tail(j),
            Modes::Geometric { a, b, .. } => *b * a.powi((j - 1) as i32),
            Modes::MuC { seq, q, .. } => self.r(j) * self.muc_s(seq, *q, j),
            Modes::MuD { seq, q, ln_norm } => {
                (*ln_norm + lit::<T>(seq.ln_value(j - 1)) + Self::idx(j - 1) * q.ln()).exp()
            }
        }
    }

    /// `ln h_j + (j-1) ln N / scale_mu`, free of the linear trend so that
    /// comparisons across many levels do not lose precision.
    pub fn ln_h_rest(&self, j: usize) -> T {
        match &self.modes {
            Modes::Finite { .. } => self.h(j).ln() + Self::idx(j - 1) * self.ln_n / self.scale_mu,
            Modes::Geometric { b, .. } => b.ln(),
            Modes::MuC { seq, q, ln_norm } => {
                *ln_norm + lit::<T>(seq.ln_value(j - 1)) + self.muc_s(seq, *q, j).ln()
            }
            Modes::MuD { seq, ln_norm, .. } => *ln_norm + lit::<T>(seq.ln_value(j - 1)),
        }
    }

    pub fn ln_h(&self, j: usize) -> T {
        self.ln_h_rest(j) - Self::idx(j - 1) * self.ln_n / self.scale_mu
    }

    /// s_j = h_j / r_j.
    pub fn s(&self, j: usize) -> T {
        match &self.modes {
            Modes::Geometric { a, b, .. } => *b / (T::one() - *a),
            Modes::MuC { seq, q, .. } => self.muc_s(seq, *q, j),
            Modes::MuD { seq, q, .. } => T::one() / self.mud_rho(seq, *q, j),
            Modes::Finite { .. } => self.h(j) / self.r(j),
        }
    }

    /// c_(j-1), the c-sequence value feeding level j.
    pub fn c_prev(&self, j: usize) -> T {
        match &self.modes {
            Modes::Geometric { c, .. } => c.powi((j - 1) as i32),
            Modes::MuC { seq, .. } => lit::<T>(seq.value(j - 1)),
            Modes::MuD { seq, q, .. } => lit::<T>(seq.value(j - 1)) * self.mud_rho(seq, *q, j),
            Modes::Finite { .. } => self.r(j) * self.n.powi((j - 1) as i32),
        }
    }

    /// d_(j-1) = c_(j-1) s_j.
    pub fn d_prev(&self, j: usize) -> T {
        match &self.modes {
            Modes::MuD { seq, .. } => lit::<T>(seq.value(j - 1)),
            Modes::Finite { .. } => self.h(j) * self.n.powi((j - 1) as i32),
            _ => self.c_prev(j) * self.s(j),
        }
    }

    pub fn ln_d_prev(&self, j: usize) -> T {
        match &self.modes {
            Modes::MuD { seq, .. } => lit::<T>(seq.ln_value(j - 1)),
            Modes::MuC { seq, q, .. } => lit::<T>(seq.ln_value(j - 1)) + self.muc_s(seq, *q, j).ln(),
            Modes::Geometric { c, .. } => Self::idx(j - 1) * c.ln() + self.s(j).ln(),
            Modes::Finite { .. } => self.d_prev(j).ln(),
        }
    }

    pub fn is_finite_support(&self) -> bool {
        matches!(self.modes, Modes::Finite { .. })
    }

    /// Quotient a with r_j proportional to a^(j-1), for exactly geometric laws.
    pub fn geometric_ratio(&self) -> Option<T> {
        match &self.modes {
            Modes::Geometric { a, .. } => Some(*a),
            Modes::MuC { seq: Sequence::Geometric { eta }, q, .. } => Some(lit::<T>(*eta) * *q),
            Modes::MuC { seq: Sequence::Constant { .. }, q, .. } => Some(*q),
            _ => None,
        }
    }
}
