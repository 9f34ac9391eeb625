//! Rank schedules for Tucker and tensor-train formats, unweighted and weighted,
//! with predicted storage cost.

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::error::{Error, Result};
use crate::testbed::default_gamma;
use crate::tt::tt_cost;
use crate::tucker::tucker_cost;

/// Relative slack below which `x` is treated as the integer it rounds to
/// before taking the ceiling.
pub const CEIL_SNAP: f64 = 1e-10;

/// Largest rank a schedule may produce; values are exact in f64 below it.
pub const MAX_RANK: f64 = (1u64 << 53) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    TuckerUnweighted,
    TtUnweighted,
    TuckerWeighted,
    TtWeighted,
}

impl Regime {
    pub fn is_weighted(self) -> bool {
        matches!(self, Regime::TuckerWeighted | Regime::TtWeighted)
    }

    pub fn is_tt(self) -> bool {
        matches!(self, Regime::TtUnweighted | Regime::TtWeighted)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::TuckerUnweighted => "tucker-unweighted",
            Regime::TtUnweighted => "tt-unweighted",
            Regime::TuckerWeighted => "tucker-weighted",
            Regime::TtWeighted => "tt-weighted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerParams {
    pub epsilon: f64,
    pub k: f64,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub delta_prime: Option<f64>,
    /// Explicit `γ_j`; defaults to `j^{-(1+δ′)/k}` in weighted regimes.
    #[serde(default)]
    pub gamma: Option<Vec<f64>>,
}

impl SchedulerParams {
    pub fn unweighted(epsilon: f64, k: f64, dims: Vec<usize>) -> Self {
        Self {
            epsilon,
            k,
            dims,
            delta: None,
            delta_prime: None,
            gamma: None,
        }
    }

    pub fn weighted(epsilon: f64, k: f64, dims: Vec<usize>, delta: f64, delta_prime: f64) -> Self {
        Self {
            delta: Some(delta),
            delta_prime: Some(delta_prime),
            ..Self::unweighted(epsilon, k, dims)
        }
    }

    fn check_common(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidSchedule(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidSchedule(format!("k = {} must be positive", self.k)));
        }
        if self.dims.is_empty() || self.dims.contains(&0) {
            return Err(Error::InvalidSchedule(format!("dims {:?} must be non-empty and ≥ 1", self.dims)));
        }
        Ok(())
    }

    /// Validated `(n, δ, δ′, γ)` for weighted regimes; `γ` has `len` entries.
    fn weighted_inputs(&self, len: usize) -> Result<(f64, f64, f64, Vec<f64>)> {
        self.check_common()?;
        let n = self.dims[0];
        if self.dims.iter().any(|&d| d != n) {
            return Err(Error::InvalidSchedule(format!(
                "weighted schedules need equal dims, got {:?}",
                self.dims
            )));
        }
        let delta = self
            .delta
            .ok_or_else(|| Error::InvalidSchedule("delta is required in weighted mode".into()))?;
        let delta_prime = self
            .delta_prime
            .ok_or_else(|| Error::InvalidSchedule("delta_prime is required in weighted mode".into()))?;
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidSchedule(format!("delta = {delta} must be positive")));
        }
        let n = n as f64;
        if !(delta_prime > delta + self.k / n) {
            return Err(Error::InvalidSchedule(format!(
                "delta_prime = {delta_prime} must exceed delta + k/n = {}",
                delta + self.k / n
            )));
        }
        let gamma = match &self.gamma {
            Some(g) if g.len() < len => {
                return Err(Error::InvalidSchedule(format!("gamma has {} entries, need {len}", g.len())));
            }
            Some(g) if g.iter().any(|x| !x.is_finite() || *x <= 0.0) => {
                return Err(Error::InvalidSchedule("gamma entries must be positive and finite".into()));
            }
            Some(g) => g[..len].to_vec(),
            None => default_gamma(len, self.k, delta_prime),
        };
        Ok((n, delta, delta_prime, gamma))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSchedule {
    pub regime: Regime,
    pub epsilon: f64,
    pub k: f64,
    pub dims: Vec<usize>,
    pub delta: Option<f64>,
    pub delta_prime: Option<f64>,
    pub ranks: Vec<u64>,
    /// Dimension-truncation index, weighted TT only.
    #[serde(rename = "M")]
    pub m: Option<usize>,
    pub predicted_cost: u64,
    /// `ε^{k/(1+δ′)}` as printed for the truncation index, reported only.
    #[serde(rename = "paper_M_value")]
    pub printed_m_value: Option<f64>,
    pub cost_saturated: bool,
}

impl RankSchedule {
    /// Pretty JSON with keys in declaration order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn cost(&self) -> Cost {
        Cost {
            value: self.predicted_cost,
            saturated: self.cost_saturated,
        }
    }

    /// `Σ ln r_j` over active ranks.
    pub fn log_cost(&self) -> f64 {
        self.ranks.iter().filter(|&&r| r > 0).map(|&r| (r as f64).ln()).sum()
    }

    /// Active ranks, i.e. up to the truncation index in weighted TT.
    pub fn active_ranks(&self) -> &[u64] {
        match self.m {
            Some(m) => &self.ranks[..m.min(self.ranks.len())],
            None => &self.ranks,
        }
    }
}

/// `⌈x⌉`, with values within `CEIL_SNAP` (relative) of an integer snapped to it.
pub fn ceil_rank(x: f64) -> Result<u64> {
    if !x.is_finite() || x > MAX_RANK {
        return Err(Error::InvalidSchedule(format!("rank {x:e} exceeds {MAX_RANK:e}")));
    }
    let nearest = x.round();
    let r = if (x - nearest).abs() <= CEIL_SNAP * nearest.abs().max(1.0) {
        nearest
    } else {
        x.ceil()
    };
    Ok(r.max(0.0) as u64)
}

fn finish(p: &SchedulerParams, regime: Regime, ranks: Vec<u64>, m: Option<usize>, printed_m: Option<f64>) -> RankSchedule {
    let ranks_usize: Vec<usize> = ranks.iter().map(|&r| r as usize).collect();
    let cost = if regime.is_tt() {
        tt_cost(&ranks_usize)
    } else {
        tucker_cost(&ranks_usize)
    };
    RankSchedule {
        regime,
        epsilon: p.epsilon,
        k: p.k,
        dims: p.dims.clone(),
        delta: if regime.is_weighted() { p.delta } else { None },
        delta_prime: if regime.is_weighted() { p.delta_prime } else { None },
        ranks,
        m,
        predicted_cost: cost.value,
        printed_m_value: printed_m,
        cost_saturated: cost.saturated,
    }
}

/// `r_j = ⌈ε^{-n_j/k}⌉`.
pub fn tucker_ranks_unweighted(p: &SchedulerParams) -> Result<RankSchedule> {
    p.check_common()?;
    let ranks = p
        .dims
        .iter()
        .map(|&n| ceil_rank(p.epsilon.powf(-(n as f64) / p.k)))
        .collect::<Result<_>>()?;
    Ok(finish(p, Regime::TuckerUnweighted, ranks, None, None))
}

/// `r_j = ⌈ε^{-(n_1+…+n_j)/k}⌉` for the `m−1` bonds.
pub fn tt_ranks_unweighted(p: &SchedulerParams) -> Result<RankSchedule> {
    p.check_common()?;
    let mut prefix = 0usize;
    let ranks = p.dims[..p.dims.len() - 1]
        .iter()
        .map(|&n| {
            prefix += n;
            ceil_rank(p.epsilon.powf(-(prefix as f64) / p.k))
        })
        .collect::<Result<_>>()?;
    Ok(finish(p, Regime::TtUnweighted, ranks, None, None))
}

/// Per-mode factor `γ_j^n j^{(1+δ)n/k} ε^{-n/k}`.
fn weighted_factor(j: usize, gamma: f64, n: f64, k: f64, delta: f64, epsilon: f64) -> f64 {
    gamma.powf(n) * (j as f64).powf((1.0 + delta) * n / k) * epsilon.powf(-n / k)
}

/// `r_j = ⌈γ_j^n j^{(1+δ)n/k} ε^{-n/k}⌉`.
pub fn tucker_ranks_weighted(p: &SchedulerParams) -> Result<RankSchedule> {
    let (n, delta, _, gamma) = p.weighted_inputs(p.dims.len())?;
    let ranks = gamma
        .iter()
        .enumerate()
        .map(|(i, &g)| ceil_rank(weighted_factor(i + 1, g, n, p.k, delta, p.epsilon)))
        .collect::<Result<_>>()?;
    Ok(finish(p, Regime::TuckerWeighted, ranks, None, None))
}

/// Dimension-truncation index `M = ⌈ε^{-1/(1+δ′)}⌉`.
pub fn truncation_index(epsilon: f64, delta_prime: f64) -> Result<usize> {
    Ok(ceil_rank(epsilon.powf(-1.0 / (1.0 + delta_prime)))? as usize)
}

/// `ε^{k/(1+δ′)}`, the printed form of the truncation index.
pub fn printed_truncation_value(epsilon: f64, k: f64, delta_prime: f64) -> f64 {
    epsilon.powf(k / (1.0 + delta_prime))
}

/// Weighted TT recursion `r_j = ⌈r_{j-1}·γ_j^n j^{(1+δ)n/k} ε^{-n/k}⌉`, `r_0 = 1`,
/// for `j = 1..=len` without dimension truncation.
pub fn tt_weighted_recursion(p: &SchedulerParams, len: usize) -> Result<Vec<u64>> {
    let (n, delta, _, gamma) = p.weighted_inputs(len)?;
    let mut prev = 1u64;
    gamma
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            prev = ceil_rank(prev as f64 * weighted_factor(i + 1, g, n, p.k, delta, p.epsilon))?;
            Ok(prev)
        })
        .collect()
}

/// Weighted TT ranks for the `m−1` bonds, zero beyond `M`.
pub fn tt_ranks_weighted(p: &SchedulerParams) -> Result<RankSchedule> {
    let bonds = p.dims.len().saturating_sub(1);
    let (_, _, delta_prime, _) = p.weighted_inputs(bonds.max(1))?;
    let m = truncation_index(p.epsilon, delta_prime)?;
    let active = bonds.min(m);
    let mut ranks = tt_weighted_recursion(p, active)?;
    ranks.resize(bonds, 0);
    let printed = printed_truncation_value(p.epsilon, p.k, delta_prime);
    Ok(finish(p, Regime::TtWeighted, ranks, Some(m), Some(printed)))
}

pub fn schedule(regime: Regime, p: &SchedulerParams) -> Result<RankSchedule> {
    match regime {
        Regime::TuckerUnweighted => tucker_ranks_unweighted(p),
        Regime::TtUnweighted => tt_ranks_unweighted(p),
        Regime::TuckerWeighted => tucker_ranks_weighted(p),
        Regime::TtWeighted => tt_ranks_weighted(p),
    }
}
