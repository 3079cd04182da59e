//! Seeded simulation of hierarchical walks and the estimators built on it.
//!
//! Replica k draws from `ChaCha8Rng` seeded with the run seed and switched to
//! stream k, so every replica's randomness is fixed by (seed, k) alone and
//! results do not depend on how replicas are scheduled across threads.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Exp1, WeightedAliasIndex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::kernel::{KernelTables, Law};
use crate::numeric::{certify_series, SeriesOptions, SeriesVerdict};
use crate::potential::green_power;

/// Two-sided 99% normal quantile.
const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Discrete,
    /// Rate-1 exponential holding times between jumps.
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimConfig {
    pub seed: u64,
    pub replicas: usize,
    /// Number of steps (discrete) or time span (continuous).
    pub horizon: f64,
    pub scheme: Scheme,
    #[serde(default)]
    pub track_full: bool,
}

impl SimConfig {
    pub fn new(seed: u64, replicas: usize, horizon: f64, scheme: Scheme) -> Self {
        Self { seed, replicas, horizon, scheme, track_full: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas == 0 {
            return Err(Error::InvalidArgument("replicas must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument("horizon must be positive and finite".into()));
        }
        Ok(())
    }

    fn steps(&self) -> u64 {
        self.horizon.floor() as u64
    }
}

/// Random stream for replica `k`.
pub fn replica_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

/// Exact sampler of the jump distance.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    /// P(J >= k) = a^(k-1).
    Geometric { ln_a: f64 },
    /// Alias table over r_1..r_H and the tail beyond H; the tail is then
    /// walked sequentially with the exact r_j.
    Table { alias: WeightedAliasIndex<f64>, head: usize, tail: f64, r: Vec<f64>, source: Box<KernelTables<f64>> },
}

impl JumpSampler {
    pub fn new(tables: &KernelTables<f64>) -> Result<Self> {
        if let Some(a) = tables.geometric_ratio() {
            return Ok(Self { kind: SamplerKind::Geometric { ln_a: a.ln() } });
        }
        let head = tables.truncation();
        let r = tables.r_table().to_vec();
        let tail = tables.tail_mass(head);
        let mut weights = r.clone();
        if tail > 0.0 {
            weights.push(tail);
        }
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidArgument(format!("jump law cannot be tabulated: {e}")))?;
        Ok(Self { kind: SamplerKind::Table { alias, head, tail, r, source: Box::new(tables.clone()) } })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.kind {
            SamplerKind::Geometric { ln_a } => {
                // U in (0, 1]
                let u: f64 = 1.0 - rng.gen::<f64>();
                1 + (u.ln() / ln_a).floor() as usize
            }
            SamplerKind::Table { alias, head, tail, r, source } => {
                let idx = alias.sample(rng);
                if idx < r.len() {
                    return idx + 1;
                }
                let mut u = rng.gen::<f64>() * tail;
                let mut j = head + 1;
                loop {
                    let rj = source.r(j);
                    if u < rj || rj == 0.0 {
                        return j;
                    }
                    u -= rj;
                    j += 1;
                }
            }
        }
    }
}

/// Result of one simulated path.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PathSummary {
    pub replica: usize,
    pub final_distance: usize,
    pub max_distance: usize,
    pub jumps: u64,
    /// Elapsed time (continuous) or steps (discrete).
    pub elapsed: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_position: Option<String>,
}

fn run_replicas<T: Send>(config: &SimConfig, f: impl Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send) -> Vec<T> {
    let seed = config.seed;
    (0..config.replicas)
        .into_par_iter()
        .map(|k| {
            let mut rng = replica_rng(seed, k);
            f(k, &mut rng)
        })
        .collect()
}

/// Runs `config.replicas` independent paths from the origin.
pub fn simulate(tables: &KernelTables<f64>, config: &SimConfig) -> Result<Vec<PathSummary>> {
    config.validate()?;
    let sampler = JumpSampler::new(tables)?;
    let order = tables.order();
    Ok(run_replicas(config, |k, rng| {
        let mut x = GroupElement::origin(order).expect("validated order");
        let mut max_distance = 0;
        let mut jumps = 0u64;
        let elapsed = match config.scheme {
            Scheme::Discrete => {
                for _ in 0..config.steps() {
                    x.jump_uniform_sphere(sampler.sample(rng), rng);
                    max_distance = max_distance.max(x.norm());
                    jumps += 1;
                }
                config.steps() as f64
            }
            Scheme::Continuous => {
                let mut t: f64 = Exp1.sample(rng);
                while t <= config.horizon {
                    x.jump_uniform_sphere(sampler.sample(rng), rng);
                    max_distance = max_distance.max(x.norm());
                    jumps += 1;
                    let hold: f64 = Exp1.sample(rng);
                    t += hold;
                }
                config.horizon
            }
        };
        PathSummary {
            replica: k,
            final_distance: x.norm(),
            max_distance,
            jumps,
            elapsed,
            final_position: config.track_full.then(|| x.to_string()),
        }
    }))
}

/// Distance sequences Z_0 = 0, Z_1, ..., Z_steps of discrete-time paths.
pub fn distance_paths(tables: &KernelTables<f64>, seed: u64, replicas: usize, steps: usize) -> Result<Vec<Vec<usize>>> {
    let config = SimConfig::new(seed, replicas, steps.max(1) as f64, Scheme::Discrete);
    config.validate()?;
    let sampler = JumpSampler::new(tables)?;
    let order = tables.order();
    Ok(run_replicas(&config, |_, rng| {
        let mut x = GroupElement::origin(order).expect("validated order");
        let mut path = Vec::with_capacity(steps + 1);
        path.push(0);
        for _ in 0..steps {
            x.jump_uniform_sphere(sampler.sample(rng), rng);
            path.push(x.norm());
        }
        path
    }))
}

/// Sample summary with a 99% normal-approximation half-width for the mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EmpiricalStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub half_width_99: f64,
}

impl EmpiricalStats {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let variance = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Self { count: samples.len(), mean, variance, min, max, half_width_99: Z99 * (variance / n).sqrt() })
    }
}

/// First-return times censored at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReturnTimeReport {
    /// min(T, horizon) per replica.
    pub samples: Vec<f64>,
    pub censored: Vec<bool>,
    pub censored_fraction: f64,
    pub horizon: f64,
    /// Statistics of the uncensored return times; withheld when all are censored.
    pub stats: Option<EmpiricalStats>,
}

impl ReturnTimeReport {
    /// Empirical P[T > t] for t below the horizon.
    pub fn survival(&self, t: f64) -> f64 {
        let above = self.samples.iter().zip(&self.censored).filter(|(&s, &c)| c || s > t).count();
        above as f64 / self.samples.len() as f64
    }
}

/// First return to the origin after leaving it, continuous time.
pub fn estimate_return_time(tables: &KernelTables<f64>, config: &SimConfig) -> Result<ReturnTimeReport> {
    config.validate()?;
    if config.scheme != Scheme::Continuous {
        return Err(Error::InvalidArgument("return times are estimated in continuous time".into()));
    }
    let sampler = JumpSampler::new(tables)?;
    let order = tables.order();
    let horizon = config.horizon;
    let out: Vec<(f64, bool)> = run_replicas(config, |_, rng| {
        let mut x = GroupElement::origin(order).expect("validated order");
        let mut t: f64 = Exp1.sample(rng);
        while t <= horizon {
            x.jump_uniform_sphere(sampler.sample(rng), rng);
            if x.is_origin() {
                return (t, false);
            }
            let hold: f64 = Exp1.sample(rng);
            t += hold;
        }
        (horizon, true)
    });
    let censored_count = out.iter().filter(|(_, c)| *c).count();
    let returned: Vec<f64> = out.iter().filter(|(_, c)| !c).map(|(t, _)| *t).collect();
    Ok(ReturnTimeReport {
        censored_fraction: censored_count as f64 / out.len() as f64,
        stats: EmpiricalStats::from_samples(&returned),
        samples: out.iter().map(|(t, _)| *t).collect(),
        censored: out.iter().map(|(_, c)| *c).collect(),
        horizon,
    })
}

fn require_transient(tables: &KernelTables<f64>) -> Result<()> {
    let g = green_power(tables, 1.0)?;
    if !g.is_finite() {
        return Err(Error::Unsupported("walk is not certified transient".into()));
    }
    Ok(())
}

/// Last exit times from B_R before the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LastExitReport {
    pub samples: Vec<f64>,
    pub stats: EmpiricalStats,
    /// Fraction of paths in B_R at some time within the final 10% of the horizon.
    pub late_fraction: f64,
    pub horizon: f64,
}

impl LastExitReport {
    /// Empirical E L^zeta with its 99% half-width.
    pub fn moment(&self, zeta: f64) -> EmpiricalStats {
        let powered: Vec<f64> = self.samples.iter().map(|l| l.powf(zeta)).collect();
        EmpiricalStats::from_samples(&powered).expect("non-empty samples")
    }
}

pub fn estimate_last_exit(tables: &KernelTables<f64>, config: &SimConfig, radius: usize) -> Result<LastExitReport> {
    config.validate()?;
    if config.scheme != Scheme::Continuous {
        return Err(Error::InvalidArgument("last exit times are estimated in continuous time".into()));
    }
    require_transient(tables)?;
    let sampler = JumpSampler::new(tables)?;
    let order = tables.order();
    let horizon = config.horizon;
    let samples: Vec<f64> = run_replicas(config, |_, rng| {
        let mut x = GroupElement::origin(order).expect("validated order");
        let mut last = 0.0;
        let mut t: f64 = Exp1.sample(rng);
        while t <= horizon {
            let inside = x.norm() <= radius;
            x.jump_uniform_sphere(sampler.sample(rng), rng);
            if inside && x.norm() > radius {
                last = t;
            }
            let hold: f64 = Exp1.sample(rng);
            t += hold;
        }
        if x.norm() <= radius {
            horizon
        } else {
            last
        }
    });
    let late = samples.iter().filter(|&&l| l >= 0.9 * horizon).count();
    Ok(LastExitReport {
        stats: EmpiricalStats::from_samples(&samples).expect("replicas >= 1"),
        late_fraction: late as f64 / samples.len() as f64,
        samples,
        horizon,
    })
}

/// Time spent in B_R up to the horizon, one sample per replica.
pub fn ball_occupation(tables: &KernelTables<f64>, config: &SimConfig, radius: usize) -> Result<Vec<f64>> {
    config.validate()?;
    let sampler = JumpSampler::new(tables)?;
    let order = tables.order();
    let horizon = config.horizon;
    Ok(run_replicas(config, |_, rng| {
        let mut x = GroupElement::origin(order).expect("validated order");
        let mut t = 0.0;
        let mut occupied = 0.0;
        loop {
            let hold: f64 = Exp1.sample(rng);
            let stop = (t + hold).min(horizon);
            if x.norm() <= radius {
                occupied += stop - t;
            }
            t += hold;
            if t >= horizon {
                return occupied;
            }
            x.jump_uniform_sphere(sampler.sample(rng), rng);
        }
    }))
}

/// Normalized occupation integrals of a finitely supported function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OccupationReport {
    pub samples: Vec<f64>,
    pub normalizer: f64,
    /// Kolmogorov–Smirnov distance to the unit exponential law.
    pub ks: f64,
    pub stats: EmpiricalStats,
}

/// Normalization of ∫_0^t F(X_s) ds for a critical (mu = 1) recurrent walk:
/// (N-1) ΣF Σ_{j <= log t / log N} d_j^-1 / (N D).
pub fn occupation_normalizer(tables: &KernelTables<f64>, total_weight: f64, t: f64) -> Result<f64> {
    let critical = match &tables.spec().law {
        Law::Geometric { c } => *c == 1.0,
        Law::MuC { mu, cseq: s } | Law::MuD { mu, dseq: s } => *mu == 1.0 && s.is_nondecreasing(),
        Law::Explicit { .. } => false,
    };
    if !critical {
        return Err(Error::Unsupported("occupation limit requires a recurrent walk with mu = 1".into()));
    }
    if !matches!(
        certify_series(|j| -tables.ln_d(j), 0, SeriesOptions::default()),
        SeriesVerdict::Diverges { .. }
    ) {
        return Err(Error::Unsupported("occupation limit requires a recurrent walk (Σ 1/d_j certified divergent)".into()));
    }
    if !(t > 1.0) {
        return Err(Error::InvalidArgument("t must exceed 1".into()));
    }
    let n = tables.order() as f64;
    let top = (t.ln() / n.ln()).floor() as usize;
    let harmonic: f64 = (0..=top).map(|j| (-tables.ln_d(j)).exp()).sum();
    Ok((n - 1.0) * total_weight * harmonic / (n * tables.normalizer()))
}

pub fn occupation_statistic(
    tables: &KernelTables<f64>,
    weights: &[(GroupElement, f64)],
    t: f64,
    config: &SimConfig,
) -> Result<OccupationReport> {
    config.validate()?;
    if weights.is_empty() || weights.iter().any(|(x, w)| !(*w >= 0.0) || x.order() != tables.order()) {
        return Err(Error::InvalidArgument("F needs non-negative weights on points of the walk's group".into()));
    }
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("F must not vanish identically".into()));
    }
    let normalizer = occupation_normalizer(tables, total, t)?;
    let sampler = JumpSampler::new(tables)?;
    let order = tables.order();
    let weight_of = |x: &GroupElement| weights.iter().find(|(y, _)| y == x).map_or(0.0, |(_, w)| *w);
    let samples: Vec<f64> = run_replicas(config, |_, rng| {
        let mut x = GroupElement::origin(order).expect("validated order");
        let mut clock = 0.0;
        let mut acc = 0.0;
        loop {
            let hold: f64 = Exp1.sample(rng);
            let w = weight_of(&x);
            if w > 0.0 {
                acc += w * ((clock + hold).min(t) - clock);
            }
            clock += hold;
            if clock >= t {
                return acc / normalizer;
            }
            x.jump_uniform_sphere(sampler.sample(rng), rng);
        }
    });
    let ks = ks_statistic(&samples, |x| if x <= 0.0 { 0.0 } else { -(-x).exp_m1() })?;
    Ok(OccupationReport { stats: EmpiricalStats::from_samples(&samples).expect("replicas >= 1"), samples, normalizer, ks })
}

/// sup_x |F_n(x) - F(x)| between the empirical CDF of `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument("KS statistic needs at least two samples".into()));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}
