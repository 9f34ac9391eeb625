//! Registry of closed-form test functions on products of unit boxes.
//!
//! A point is the concatenation of the subdomain coordinates, subdomain `j`
//! owning `dims[j]` consecutive entries.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Sobolev order `k`, or analytic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Finite(f64),
    Analytic,
}

impl Serialize for Smoothness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Smoothness::Finite(k) => s.serialize_f64(*k),
            Smoothness::Analytic => s.serialize_str("analytic"),
        }
    }
}

impl<'de> Deserialize<'de> for Smoothness {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) if k > 0.0 && k.is_finite() => Ok(Smoothness::Finite(k)),
            Raw::Num(k) => Err(serde::de::Error::custom(format!("smoothness must be positive, got {k}"))),
            Raw::Str(s) if s == "analytic" => Ok(Smoothness::Analytic),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "smoothness must be a number or \"analytic\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub id: String,
    /// Per-subdomain dimensions; the arity is `dims.len()`.
    pub dims: Vec<usize>,
    pub smoothness: Smoothness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arity {
    Any,
    /// Exactly two subdomains of equal dimension.
    Pair,
    /// Exactly two one-dimensional subdomains.
    UnitPair,
}

/// A registered evaluator and its metadata.
#[derive(Debug, Clone, Copy)]
pub struct Entry {
    pub id: &'static str,
    pub smoothness: Smoothness,
    pub weighted: bool,
    pub params: &'static [(&'static str, f64)],
    arity: Arity,
    eval: fn(&Ctx<'_>, &[f64]) -> f64,
}

struct Ctx<'a> {
    dims: &'a [usize],
    gamma: &'a [f64],
    params: &'a BTreeMap<String, f64>,
}

impl Ctx<'_> {
    fn subdomains<'p>(&self, x: &'p [f64]) -> impl Iterator<Item = &'p [f64]> + use<'p, '_> {
        let mut offset = 0;
        self.dims.iter().map(move |&n| {
            let s = &x[offset..offset + n];
            offset += n;
            s
        })
    }

    fn param(&self, name: &str) -> f64 {
        self.params[name]
    }
}

fn sine_product(x: &[f64]) -> f64 {
    x.iter().map(|&x| (PI * x).sin()).product()
}

fn rank_one(_: &Ctx<'_>, x: &[f64]) -> f64 {
    sine_product(x)
}

fn brownian_bridge(_: &Ctx<'_>, x: &[f64]) -> f64 {
    x[0].min(x[1]) - x[0] * x[1]
}

fn weighted_product(c: &Ctx<'_>, x: &[f64]) -> f64 {
    c.subdomains(x)
        .zip(c.gamma)
        .map(|(s, &g)| 1.0 + g * sine_product(s))
        .product()
}

fn weighted_coupled(c: &Ctx<'_>, x: &[f64]) -> f64 {
    let s: f64 = c.subdomains(x).zip(c.gamma).map(|(s, &g)| g * sine_product(s)).sum();
    1.0 / (1.0 + s)
}

fn weighted_exp(c: &Ctx<'_>, x: &[f64]) -> f64 {
    c.subdomains(x)
        .zip(c.gamma)
        .map(|(s, &g)| g * s.iter().sum::<f64>())
        .sum::<f64>()
        .exp()
}

fn squared_distance(c: &Ctx<'_>, x: &[f64]) -> f64 {
    let n = c.dims[0];
    x[..n].iter().zip(&x[n..]).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn gauss_kernel(c: &Ctx<'_>, x: &[f64]) -> f64 {
    (-c.param("c") * squared_distance(c, x)).exp()
}

fn abs_diff(c: &Ctx<'_>, x: &[f64]) -> f64 {
    squared_distance(c, x).sqrt()
}

const REGISTRY: &[Entry] = &[
    Entry {
        id: "rank_one",
        smoothness: Smoothness::Analytic,
        weighted: false,
        params: &[],
        arity: Arity::Any,
        eval: rank_one,
    },
    Entry {
        id: "brownian_bridge",
        smoothness: Smoothness::Finite(1.5),
        weighted: false,
        params: &[],
        arity: Arity::UnitPair,
        eval: brownian_bridge,
    },
    Entry {
        id: "weighted_product",
        smoothness: Smoothness::Analytic,
        weighted: true,
        params: &[],
        arity: Arity::Any,
        eval: weighted_product,
    },
    Entry {
        id: "weighted_coupled",
        smoothness: Smoothness::Analytic,
        weighted: true,
        params: &[],
        arity: Arity::Any,
        eval: weighted_coupled,
    },
    Entry {
        id: "weighted_exp",
        smoothness: Smoothness::Analytic,
        weighted: true,
        params: &[],
        arity: Arity::Any,
        eval: weighted_exp,
    },
    Entry {
        id: "gauss_kernel",
        smoothness: Smoothness::Analytic,
        weighted: false,
        params: &[("c", 1.0)],
        arity: Arity::Pair,
        eval: gauss_kernel,
    },
    Entry {
        id: "abs_diff",
        smoothness: Smoothness::Finite(1.5),
        weighted: false,
        params: &[],
        arity: Arity::Pair,
        eval: abs_diff,
    },
];

pub fn registry() -> &'static [Entry] {
    REGISTRY
}

pub fn lookup(id: &str) -> Result<&'static Entry> {
    REGISTRY
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownFunction(id.to_string()))
}

/// Default weights `γ_j = j^{-(1+δ′)/k}`, `j = 1..=m`.
pub fn default_gamma(m: usize, k: f64, delta_prime: f64) -> Vec<f64> {
    (1..=m).map(|j| (j as f64).powf(-(1.0 + delta_prime) / k)).collect()
}

impl FunctionSpec {
    /// Spec with registry metadata, default parameters and, for weighted
    /// entries, `γ_j = j^{-3}` (k = 1, δ′ = 2).
    pub fn new(id: &str, dims: Vec<usize>) -> Result<Self> {
        let entry = lookup(id)?;
        let gamma = entry.weighted.then(|| default_gamma(dims.len(), 1.0, 2.0));
        let spec = Self {
            id: id.to_string(),
            dims,
            smoothness: entry.smoothness,
            gamma,
            params: entry.params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        };
        validate(&spec)?;
        Ok(spec)
    }

    pub fn with_gamma(mut self, gamma: Vec<f64>) -> Result<Self> {
        self.gamma = Some(gamma);
        validate(&self)?;
        Ok(self)
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Result<Self> {
        self.params.insert(name.to_string(), value);
        validate(&self)?;
        Ok(self)
    }

    pub fn arity(&self) -> usize {
        self.dims.len()
    }
}

/// Checks that `spec` is consistent with its registry entry.
pub fn validate(spec: &FunctionSpec) -> Result<()> {
    let entry = lookup(&spec.id)?;
    let bad = |reason: String| Error::InvalidFunction {
        id: spec.id.clone(),
        reason,
    };
    if spec.dims.is_empty() || spec.dims.contains(&0) {
        return Err(bad(format!("dims {:?} must be non-empty and ≥ 1", spec.dims)));
    }
    match entry.arity {
        Arity::Any => {}
        Arity::Pair if spec.dims.len() == 2 && spec.dims[0] == spec.dims[1] => {}
        Arity::UnitPair if spec.dims == [1, 1] => {}
        Arity::Pair => return Err(bad(format!("needs two subdomains of equal dimension, got {:?}", spec.dims))),
        Arity::UnitPair => return Err(bad(format!("needs dims [1, 1], got {:?}", spec.dims))),
    }
    if spec.smoothness != entry.smoothness {
        return Err(bad(format!(
            "smoothness {:?} disagrees with the registered {:?}",
            spec.smoothness, entry.smoothness
        )));
    }
    match (&spec.gamma, entry.weighted) {
        (Some(g), true) => {
            if g.len() < spec.dims.len() {
                return Err(bad(format!("gamma has {} entries, need {}", g.len(), spec.dims.len())));
            }
            if let Some(x) = g.iter().find(|x| !x.is_finite() || **x < 0.0) {
                return Err(bad(format!("gamma entry {x} must be finite and non-negative")));
            }
        }
        (None, true) => return Err(bad("weighted function needs gamma".into())),
        (Some(_), false) => return Err(bad("gamma given for an unweighted function".into())),
        (None, false) => {}
    }
    for (name, value) in &spec.params {
        if !entry.params.iter().any(|(p, _)| p == name) {
            return Err(bad(format!("unknown parameter `{name}`")));
        }
        if !value.is_finite() || *value <= 0.0 {
            return Err(bad(format!("parameter `{name}` = {value} must be positive")));
        }
    }
    if let Some((name, _)) = entry.params.iter().find(|(p, _)| !spec.params.contains_key(*p)) {
        return Err(bad(format!("missing parameter `{name}`")));
    }
    Ok(())
}

/// Deterministic value of `spec` at `point ∈ [0,1]^{Σ n_j}`.
pub fn evaluate(spec: &FunctionSpec, point: &[f64]) -> Result<f64> {
    validate(spec)?;
    let entry = lookup(&spec.id)?;
    let total: usize = spec.dims.iter().sum();
    if point.len() != total {
        return Err(Error::InvalidFunction {
            id: spec.id.clone(),
            reason: format!("point has {} coordinates, expected {total}", point.len()),
        });
    }
    if point.iter().any(|x| !(-1e-12..=1.0 + 1e-12).contains(x)) {
        return Err(Error::Evaluation {
            id: spec.id.clone(),
            point: point.to_vec(),
        });
    }
    let ctx = Ctx {
        dims: &spec.dims,
        gamma: spec.gamma.as_deref().unwrap_or(&[]),
        params: &spec.params,
    };
    Ok((entry.eval)(&ctx, point))
}
