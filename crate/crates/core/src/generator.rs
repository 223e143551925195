//! Seeded random instances.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::value::Value;

/// Name recorded next to every seed so experiments can be rerun elsewhere.
pub const RNG_NAME: &str = "chacha8";

/// Largest supported number of quantization digits (10^18 fits in a u64).
pub const MAX_QUANTIZATION: u32 = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Uniform on [0, 1].
    Uniform01,
    /// Normal(1/2, 1/10), negative draws clamped to 0.
    Gaussian,
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Distribution::Uniform01 => "uniform01",
            Distribution::Gaussian => "gaussian",
        })
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform01" | "uniform" => Ok(Distribution::Uniform01),
            "gaussian" => Ok(Distribution::Gaussian),
            _ => Err(Error::input(format!(
                "unknown distribution {s:?} (expected uniform01 or gaussian)"
            ))),
        }
    }
}

fn default_quantization() -> u32 {
    6
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub num_agents: usize,
    pub num_goods: usize,
    pub distribution: Distribution,
    #[serde(default)]
    pub sop: bool,
    pub seed: u64,
    #[serde(default = "default_quantization")]
    pub quantization: u32,
}

impl GenSpec {
    pub fn new(num_agents: usize, num_goods: usize, distribution: Distribution, seed: u64) -> Self {
        GenSpec {
            num_agents,
            num_goods,
            distribution,
            sop: false,
            seed,
            quantization: default_quantization(),
        }
    }

    pub fn with_sop(mut self, sop: bool) -> Self {
        self.sop = sop;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_agents == 0 {
            return Err(Error::input("num_agents must be at least 1"));
        }
        if self.quantization > MAX_QUANTIZATION {
            return Err(Error::input(format!(
                "quantization must be at most {MAX_QUANTIZATION} digits, got {}",
                self.quantization
            )));
        }
        Ok(())
    }
}

/// Parses a GenSpec JSON document.
pub fn parse_gen_spec(text: &[u8]) -> Result<GenSpec> {
    let spec: GenSpec = serde_json::from_slice(text).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    spec.validate()?;
    Ok(spec)
}

pub fn serialize_gen_spec(spec: &GenSpec) -> Vec<u8> {
    let mut out = serde_json::to_vec(spec).expect("GenSpec serializes");
    out.push(b'\n');
    out
}

/// Draws an n×m valuation matrix row by row from one ChaCha8 stream seeded
/// with `spec.seed`, rounds each draw to `quantization` decimal digits and
/// stores it as an exact fraction over 10^digits. With `sop` every row is
/// then sorted in descending order.
pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let scale = 10u64.pow(spec.quantization);
    let normal = Normal::<f64>::new(0.5, 0.1).expect("valid normal parameters");
    let mut rows = Vec::with_capacity(spec.num_agents);
    for _ in 0..spec.num_agents {
        let mut row: Vec<u64> = (0..spec.num_goods)
            .map(|_| {
                let x: f64 = match spec.distribution {
                    Distribution::Uniform01 => rng.random::<f64>(),
                    Distribution::Gaussian => f64::max(normal.sample(&mut rng), 0.0),
                };
                (x * scale as f64).round() as u64
            })
            .collect();
        if spec.sop {
            row.sort_unstable_by(|a, b| b.cmp(a));
        }
        rows.push(row.into_iter().map(|q| Value::from_ratio(q, scale)).collect());
    }
    Instance::new(spec.num_agents, spec.num_goods, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let spec = GenSpec::new(4, 9, Distribution::Gaussian, 17);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = GenSpec::new(4, 9, Distribution::Gaussian, 18);
        assert_ne!(generate(&spec).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn quantized_values_in_range() {
        for dist in [Distribution::Uniform01, Distribution::Gaussian] {
            let inst = generate(&GenSpec::new(5, 11, dist, 3)).unwrap();
            for row in inst.valuations() {
                for v in row {
                    assert!(*v <= Value::from_integer(2));
                    assert_eq!(v.scale(1_000_000).denom_biguint(), 1u32.into());
                }
            }
        }
    }

    #[test]
    fn sop_rows_share_ranking() {
        let inst = generate(&GenSpec::new(3, 8, Distribution::Uniform01, 5).with_sop(true)).unwrap();
        for row in inst.valuations() {
            assert!(row.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = parse_gen_spec(br#"{"num_agents":3,"num_goods":5,"distribution":"gaussian","seed":9}"#).unwrap();
        assert_eq!(spec.quantization, 6);
        assert!(!spec.sop);
        assert_eq!(parse_gen_spec(&serialize_gen_spec(&spec)).unwrap(), spec);
        assert!(parse_gen_spec(br#"{"num_agents":0,"num_goods":5,"distribution":"gaussian","seed":9}"#).is_err());
        assert!(parse_gen_spec(br#"{"num_agents":1,"num_goods":5,"distribution":"gaussian","seed":9,"x":1}"#).is_err());
    }
}
