use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::arrivals::GapLaw;
use crate::error::{Error, Result};
use crate::occupancy::{Capacity, Holding, LocationConfig};

/// Shape values swept by default.
pub const DEFAULT_ALPHAS: [f64; 5] = [0.3, 0.4, 0.5, 0.8, 0.9];

/// Arrival rates swept by default.
pub const DEFAULT_RATES: [f64; 5] = [0.3, 0.4, 0.5, 0.8, 0.9];

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_NODES: u32 = 20;
pub const DEFAULT_HORIZON: f64 = 100.0;
pub const DEFAULT_REPLICATIONS: u64 = 20;

/// Generator named in every provenance block.
pub const GENERATOR: &str = "chacha8";

/// Parses a gap law: `exp:<rate>`, `pareto1:<shape>` or `lomax:<shape>:<scale>`.
pub fn parse_law(spec: &str) -> Result<GapLaw> {
    let parts: Vec<&str> = spec.trim().split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number `{s}` in law `{spec}`")))
    };
    match parts.as_slice() {
        ["exp", rate] => GapLaw::exponential(num(rate)?),
        ["pareto1", shape] => GapLaw::pareto1(num(shape)?),
        ["lomax", shape, scale] => GapLaw::lomax(num(shape)?, num(scale)?),
        _ => Err(Error::Config(format!(
            "unknown law `{spec}` (expected exp:<rate>, pareto1:<shape> or lomax:<shape>:<scale>)"
        ))),
    }
}

pub fn law_spec(law: &GapLaw) -> String {
    match law {
        GapLaw::Exponential(p) => format!("exp:{}", p.rate()),
        GapLaw::ParetoOne(p) => format!("pareto1:{}", p.shape()),
        GapLaw::Lomax(p) => format!("lomax:{}:{}", p.shape(), p.scale()),
    }
}

/// Location capacity as configured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacitySpec {
    /// Same as the node budget.
    #[default]
    Nodes,
    Unbounded,
    Count(u32),
}

impl FromStr for CapacitySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "nodes" => Ok(Self::Nodes),
            "unbounded" => Ok(Self::Unbounded),
            other => other
                .parse::<u32>()
                .ok()
                .filter(|&n| n >= 1)
                .map(Self::Count)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "capacity must be `nodes`, `unbounded` or a positive integer, got `{other}`"
                    ))
                }),
        }
    }
}

impl fmt::Display for CapacitySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Nodes => f.write_str("nodes"),
            Self::Unbounded => f.write_str("unbounded"),
            Self::Count(n) => write!(f, "{n}"),
        }
    }
}

impl<'de> Deserialize<'de> for CapacitySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(n) => n.to_string(),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Holding time: a gap law or `infinite`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldingSpec(pub Holding);

impl FromStr for HoldingSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "infinite" {
            Ok(Self(Holding::Infinite))
        } else {
            parse_law(s).map(|law| Self(Holding::Law(law)))
        }
    }
}

impl fmt::Display for HoldingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Holding::Infinite => f.write_str("infinite"),
            Holding::Law(law) => f.write_str(&law_spec(law)),
        }
    }
}

impl<'de> Deserialize<'de> for HoldingSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawSpec(pub GapLaw);

impl<'de> Deserialize<'de> for LawSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        parse_law(&String::deserialize(d)?)
            .map(LawSpec)
            .map_err(serde::de::Error::custom)
    }
}

/// Every knob of the experiments, with the documented defaults. Config files
/// are flat TOML using these field names; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub label: String,
    pub seed: u64,
    pub horizon: f64,
    pub replications: u64,
    /// Node budget: PMF range `0..=nodes` and default location capacity.
    pub nodes: u32,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub rates: Vec<f64>,
    /// Rate of the exponential baseline curve.
    pub exp_rate: f64,
    pub x_max: f64,
    pub x_step: f64,
    /// Upper end of the crossover search interval.
    pub crossover_max: f64,
    pub capacity: CapacitySpec,
    pub holding: HoldingSpec,
    /// Gap law driving the `simulate` command.
    pub arrivals: LawSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            label: "default".into(),
            seed: DEFAULT_SEED,
            horizon: DEFAULT_HORIZON,
            replications: DEFAULT_REPLICATIONS,
            nodes: DEFAULT_NODES,
            alphas: DEFAULT_ALPHAS.to_vec(),
            betas: vec![1.0],
            rates: DEFAULT_RATES.to_vec(),
            exp_rate: 1.0,
            x_max: 50.0,
            x_step: 0.1,
            crossover_max: 1e3,
            capacity: CapacitySpec::Nodes,
            holding: HoldingSpec(Holding::Law(GapLaw::exponential(1.0).expect("valid rate"))),
            arrivals: LawSpec(GapLaw::exponential(0.9).expect("valid rate")),
        }
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split([';', ','])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number `{s}` for `{key}`")))
        })
        .collect()
}

fn parse_scalar<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{raw}` for `{key}`")))
}

fn check_list(key: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::Config(format!("`{key}` must not be empty")));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::Config(format!(
            "`{key}` entries must be positive, got {v}"
        )));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config(format!(
            "`{key}` must be strictly increasing"
        )));
    }
    Ok(())
}

fn check_positive(key: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "`{key}` must be positive and finite, got {v}"
        )))
    }
}

impl ExperimentConfig {
    pub const KEYS: [&'static str; 15] = [
        "label",
        "seed",
        "horizon",
        "replications",
        "nodes",
        "alphas",
        "betas",
        "rates",
        "exp_rate",
        "x_max",
        "x_step",
        "crossover_max",
        "capacity",
        "holding",
        "arrivals",
    ];

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("horizon", self.horizon)?;
        check_positive("exp_rate", self.exp_rate)?;
        check_positive("x_max", self.x_max)?;
        check_positive("x_step", self.x_step)?;
        check_positive("crossover_max", self.crossover_max)?;
        if self.replications < 1 {
            return Err(Error::Config("`replications` must be at least 1".into()));
        }
        if self.nodes < 1 {
            return Err(Error::Config("`nodes` must be at least 1".into()));
        }
        if self.x_step > self.x_max {
            return Err(Error::Config("`x_step` must not exceed `x_max`".into()));
        }
        check_list("alphas", &self.alphas)?;
        check_list("betas", &self.betas)?;
        check_list("rates", &self.rates)?;
        Ok(())
    }

    /// Raw string form of one key, as written to provenance blocks.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "label" => self.label.clone(),
            "seed" => self.seed.to_string(),
            "horizon" => self.horizon.to_string(),
            "replications" => self.replications.to_string(),
            "nodes" => self.nodes.to_string(),
            "alphas" => join(&self.alphas),
            "betas" => join(&self.betas),
            "rates" => join(&self.rates),
            "exp_rate" => self.exp_rate.to_string(),
            "x_max" => self.x_max.to_string(),
            "x_step" => self.x_step.to_string(),
            "crossover_max" => self.crossover_max.to_string(),
            "capacity" => self.capacity.to_string(),
            "holding" => self.holding.to_string(),
            "arrivals" => law_spec(&self.arrivals.0),
            _ => return None,
        })
    }

    /// Sets one key from its string form. Lists accept `;` or `,`.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<()> {
        match key {
            "label" => self.label = raw.to_string(),
            "seed" => self.seed = parse_scalar(key, raw)?,
            "horizon" => self.horizon = parse_scalar(key, raw)?,
            "replications" => self.replications = parse_scalar(key, raw)?,
            "nodes" => self.nodes = parse_scalar(key, raw)?,
            "alphas" => self.alphas = parse_list(key, raw)?,
            "betas" => self.betas = parse_list(key, raw)?,
            "rates" => self.rates = parse_list(key, raw)?,
            "exp_rate" => self.exp_rate = parse_scalar(key, raw)?,
            "x_max" => self.x_max = parse_scalar(key, raw)?,
            "x_step" => self.x_step = parse_scalar(key, raw)?,
            "crossover_max" => self.crossover_max = parse_scalar(key, raw)?,
            "capacity" => self.capacity = raw.parse()?,
            "holding" => self.holding = raw.parse()?,
            "arrivals" => self.arrivals = LawSpec(parse_law(raw)?),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Keys whose value differs from the default.
    pub fn overrides(&self) -> Vec<&'static str> {
        let defaults = Self::default();
        Self::KEYS
            .iter()
            .copied()
            .filter(|k| self.get(k) != defaults.get(k))
            .collect()
    }

    /// All keys plus version, generator and override list.
    pub fn provenance(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
            ("generator".to_string(), GENERATOR.to_string()),
        ];
        for key in Self::KEYS {
            out.push((key.to_string(), self.get(key).expect("known key")));
        }
        let overrides = self.overrides();
        out.push((
            "overrides".to_string(),
            if overrides.is_empty() {
                "none".to_string()
            } else {
                overrides.join(";")
            },
        ));
        out
    }

    /// Rebuilds a config from a provenance block. Keys that are not config
    /// keys (version, table name, cell markers) are skipped.
    pub fn from_provenance(entries: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in entries {
            if Self::KEYS.contains(&k.as_str()) {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn capacity(&self) -> Capacity {
        match self.capacity {
            CapacitySpec::Nodes => Capacity::bounded(self.nodes).expect("nodes validated >= 1"),
            CapacitySpec::Count(n) => Capacity::bounded(n).expect("parsed >= 1"),
            CapacitySpec::Unbounded => Capacity::Unbounded,
        }
    }

    pub fn location(&self) -> LocationConfig {
        LocationConfig::new(self.capacity(), self.holding.0)
    }

    /// `0, x_step, 2 x_step, ..` up to `x_max`.
    pub fn x_grid(&self) -> Vec<f64> {
        let steps = (self.x_max / self.x_step + 1e-9).floor() as usize;
        (0..=steps).map(|i| i as f64 * self.x_step).collect()
    }
}
