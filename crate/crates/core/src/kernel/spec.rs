use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a jump law on Ω_N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkSpec {
    #[serde(rename = "N")]
    pub order: u32,
    pub law: Law,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Law {
    /// Finite list r_1..r_J, zero beyond.
    #[serde(rename = "explicit")]
    Explicit { r: Vec<f64> },
    /// r_j = (1 - c/N)(c/N)^(j-1).
    #[serde(rename = "geometric")]
    Geometric { c: f64 },
    /// r_j = D c_(j-1) / N^((j-1)/mu).
    #[serde(rename = "muC")]
    MuC { mu: f64, cseq: Sequence },
    /// h_j = D d_(j-1) / N^((j-1)/mu), with r derived from h.
    #[serde(rename = "muD")]
    MuD { mu: f64, dseq: Sequence },
}

/// Closed-form rule for a positive sequence s_0, s_1, ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Sequence {
    /// s_k = value.
    Constant { value: f64 },
    /// s_k = (k+1)^beta.
    Power { beta: f64 },
    /// s_k = eta^k.
    Geometric { eta: f64 },
    /// s_0 = 1 and consecutive ratios alternate low, high, low, ...
    Alternating { low: f64, high: f64 },
    /// Listed values, continued geometrically with `tail_ratio` if given.
    #[serde(rename_all = "camelCase")]
    List {
        values: Vec<f64>,
        #[serde(default)]
        tail_ratio: Option<f64>,
    },
}

impl WalkSpec {
    pub fn geometric(order: u32, c: f64) -> Self {
        Self { order, law: Law::Geometric { c } }
    }

    pub fn explicit(order: u32, r: Vec<f64>) -> Self {
        Self { order, law: Law::Explicit { r } }
    }

    pub fn mu_c(order: u32, mu: f64, cseq: Sequence) -> Self {
        Self { order, law: Law::MuC { mu, cseq } }
    }

    pub fn mu_d(order: u32, mu: f64, dseq: Sequence) -> Self {
        Self { order, law: Law::MuD { mu, dseq } }
    }

    /// The j^beta walk: d_j = (j+1)^beta.
    pub fn j_beta(order: u32, mu: f64, beta: f64) -> Self {
        Self::mu_d(order, mu, Sequence::Power { beta })
    }

    /// Scale exponent mu of the law; geometric and explicit laws use 1.
    pub fn mu(&self) -> f64 {
        match &self.law {
            Law::MuC { mu, .. } | Law::MuD { mu, .. } => *mu,
            _ => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidOrder(self.order as u64));
        }
        let n = self.order as f64;
        match &self.law {
            Law::Explicit { r } => {
                if r.is_empty() {
                    return Err(Error::InvalidSpec("explicit law needs at least one r_j".into()));
                }
                if let Some((k, v)) = r.iter().enumerate().find(|(_, &v)| !(v > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidSpec(format!("r_{} = {v} must be positive", k + 1)));
                }
                let total: f64 = r.iter().sum();
                if (total - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSpec(format!("r sums to {total}, not 1")));
                }
            }
            Law::Geometric { c } => {
                if !(*c > 0.0 && *c < n) {
                    return Err(Error::InvalidSpec(format!("geometric law needs 0 < c < N, got c = {c}")));
                }
            }
            Law::MuC { mu, cseq: s } | Law::MuD { mu, dseq: s } => {
                if !(*mu > 0.0 && mu.is_finite()) {
                    return Err(Error::InvalidSpec(format!("mu must be positive, got {mu}")));
                }
                s.validate()?;
            }
        }
        Ok(())
    }
}

impl Sequence {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidSpec(format!("sequence {what} must be positive")));
        match self {
            Sequence::Constant { value } if !(*value > 0.0) => bad("value"),
            Sequence::Power { beta } if !beta.is_finite() => {
                Err(Error::InvalidSpec("power exponent must be finite".into()))
            }
            Sequence::Geometric { eta } if !(*eta > 0.0) => bad("ratio eta"),
            Sequence::Alternating { low, high } if !(*low > 0.0 && *high > 0.0) => bad("ratios"),
            Sequence::List { values, tail_ratio } => {
                if values.is_empty() || values.iter().any(|v| !(*v > 0.0)) {
                    return bad("values");
                }
                if matches!(tail_ratio, Some(t) if !(*t > 0.0)) {
                    return bad("tail ratio");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// ln s_k.
    pub fn ln_value(&self, k: usize) -> f64 {
        match self {
            Sequence::Constant { value } => value.ln(),
            Sequence::Power { beta } => beta * ((k + 1) as f64).ln(),
            Sequence::Geometric { eta } => k as f64 * eta.ln(),
            Sequence::Alternating { low, high } => {
                let pairs = (k / 2) as f64 * (low.ln() + high.ln());
                if k % 2 == 1 {
                    pairs + low.ln()
                } else {
                    pairs
                }
            }
            Sequence::List { values, tail_ratio } => {
                if k < values.len() {
                    values[k].ln()
                } else {
                    match tail_ratio {
                        Some(t) => values[values.len() - 1].ln() + (k + 1 - values.len()) as f64 * t.ln(),
                        None => f64::NAN,
                    }
                }
            }
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        self.ln_value(k).exp()
    }

    /// s_(k+1) / s_k.
    pub fn ratio(&self, k: usize) -> f64 {
        match self {
            Sequence::Constant { .. } => 1.0,
            Sequence::Power { beta } => ((k + 2) as f64 / (k + 1) as f64).powf(*beta),
            Sequence::Geometric { eta } => *eta,
            Sequence::Alternating { low, high } => {
                if k.is_multiple_of(2) {
                    *low
                } else {
                    *high
                }
            }
            Sequence::List { values, tail_ratio } => {
                if k + 1 < values.len() {
                    values[k + 1] / values[k]
                } else {
                    tail_ratio.unwrap_or(f64::NAN)
                }
            }
        }
    }

    /// sup over i >= k of s_(i+1)/s_i.
    pub fn ratio_sup_from(&self, k: usize) -> f64 {
        match self {
            Sequence::Power { beta } if *beta < 0.0 => 1.0,
            Sequence::Alternating { low, high } => low.max(*high),
            Sequence::List { values, tail_ratio } => {
                let tail = tail_ratio.unwrap_or(f64::NAN);
                (k..values.len().saturating_sub(1)).map(|i| values[i + 1] / values[i]).fold(tail, f64::max)
            }
            _ => self.ratio(k),
        }
    }

    /// (liminf, limsup) of consecutive ratios, when the rule determines them.
    pub fn ratio_limits(&self) -> Option<(f64, f64)> {
        match self {
            Sequence::Constant { .. } | Sequence::Power { .. } => Some((1.0, 1.0)),
            Sequence::Geometric { eta } => Some((*eta, *eta)),
            Sequence::Alternating { low, high } => Some((low.min(*high), low.max(*high))),
            Sequence::List { tail_ratio, .. } => tail_ratio.map(|t| (t, t)),
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Sequence::Constant { .. } => true,
            Sequence::Power { beta } => *beta >= 0.0,
            Sequence::Geometric { eta } => *eta >= 1.0,
            Sequence::Alternating { low, high } => *low >= 1.0 && *high >= 1.0,
            Sequence::List { values, tail_ratio } => {
                values.windows(2).all(|w| w[1] >= w[0]) && tail_ratio.is_some_and(|t| t >= 1.0)
            }
        }
    }

    /// True when the sequence is eventually exactly geometric.
    pub fn is_eventually_geometric(&self) -> bool {
        matches!(self, Sequence::Constant { .. } | Sequence::Geometric { .. })
            || matches!(self, Sequence::List { tail_ratio: Some(_), .. })
            || matches!(self, Sequence::Power { beta } if *beta == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_json_forms() {
        let g: WalkSpec = serde_json::from_str(r#"{"N":2,"law":{"type":"geometric","c":1.0}}"#).unwrap();
        assert_eq!(g, WalkSpec::geometric(2, 1.0));
        let m: WalkSpec =
            serde_json::from_str(r#"{"N":2,"law":{"type":"muC","mu":2.0,"cseq":{"type":"power","beta":0.5}}}"#)
                .unwrap();
        assert_eq!(m, WalkSpec::mu_c(2, 2.0, Sequence::Power { beta: 0.5 }));
        let d: WalkSpec =
            serde_json::from_str(r#"{"N":2,"law":{"type":"muD","mu":1.0,"dseq":{"type":"power","beta":1.0}}}"#)
                .unwrap();
        assert_eq!(d, WalkSpec::j_beta(2, 1.0, 1.0));
        let e: WalkSpec = serde_json::from_str(r#"{"N":2,"law":{"type":"explicit","r":[0.5,0.25,0.25]}}"#).unwrap();
        assert_eq!(e, WalkSpec::explicit(2, vec![0.5, 0.25, 0.25]));
        let l: Sequence = serde_json::from_str(r#"{"type":"list","values":[1,2],"tailRatio":1.5}"#).unwrap();
        assert_eq!(l, Sequence::List { values: vec![1.0, 2.0], tail_ratio: Some(1.5) });
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(WalkSpec::geometric(2, 2.0).validate().is_err());
        assert!(WalkSpec::geometric(2, 0.0).validate().is_err());
        assert!(WalkSpec::explicit(2, vec![0.5, 0.4]).validate().is_err());
        assert!(WalkSpec::explicit(2, vec![0.5, 0.5, 0.0]).validate().is_err());
        assert!(WalkSpec::mu_c(2, -1.0, Sequence::Constant { value: 1.0 }).validate().is_err());
        assert!(WalkSpec::mu_c(2, 1.0, Sequence::Constant { value: 0.0 }).validate().is_err());
        assert!(WalkSpec::geometric(1, 0.5).validate().is_err());
    }

    #[test]
    fn sequence_values_and_ratios_agree() {
        let seqs = [
            Sequence::Constant { value: 2.0 },
            Sequence::Power { beta: 0.7 },
            Sequence::Geometric { eta: 1.3 },
            Sequence::Alternating { low: 0.5, high: 3.0 },
            Sequence::List { values: vec![1.0, 4.0, 2.0], tail_ratio: Some(1.1) },
        ];
        for s in &seqs {
            for k in 0..12 {
                let r = s.value(k + 1) / s.value(k);
                assert!((r - s.ratio(k)).abs() < 1e-12 * r, "{s:?} k={k}");
                assert!(s.ratio_sup_from(k) >= s.ratio(k) - 1e-15);
            }
        }
    }
}
