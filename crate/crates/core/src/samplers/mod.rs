//! Samplers for every particle model: noisy photons, distinguishable
//! particles, mean-field "simulated bosons", the uniform collision-free
//! distribution and the adversarial two-block mixture, plus an exact oracle.

mod boson;
mod classical;
pub mod oracle;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{FockPattern, Unitary};

pub use boson::{sample_distinguishable, sample_ideal_output, sample_noisy_output};
pub use classical::{adversarial_alpha, sample_dad, sample_meanfield, sample_uniform_cf, AlphaChoice};

/// Per-photon loss probability `lambda` and pairwise overlap `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawNoise")]
pub struct NoiseParams {
    lambda: f64,
    x: f64,
}

#[derive(Deserialize)]
struct RawNoise {
    lambda: f64,
    x: f64,
}

impl TryFrom<RawNoise> for NoiseParams {
    type Error = Error;

    fn try_from(raw: RawNoise) -> Result<Self> {
        NoiseParams::new(raw.lambda, raw.x)
    }
}

impl NoiseParams {
    pub const IDEAL: NoiseParams = NoiseParams { lambda: 0.0, x: 1.0 };

    pub fn new(lambda: f64, x: f64) -> Result<Self> {
        for (name, v) in [("lambda", lambda), ("x", x)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        Ok(Self { lambda, x })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Average pairwise fidelity `F = x^2`.
    pub fn fidelity(&self) -> f64 {
        self.x * self.x
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::IDEAL
    }
}

/// One detection event: the output pattern and how many photons were lost.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClickRecord {
    pub unitary_id: usize,
    pub pattern: FockPattern,
    pub lost: usize,
}

impl ClickRecord {
    pub fn new(unitary_id: usize, pattern: FockPattern, n: usize) -> Result<Self> {
        let detected = pattern.total();
        if detected > n {
            return Err(Error::InvalidInput(format!(
                "{detected} photons detected but only {n} injected"
            )));
        }
        Ok(Self {
            unitary_id,
            pattern,
            lost: n - detected,
        })
    }

    pub fn detected(&self) -> usize {
        self.pattern.total()
    }
}

/// Survivors split into the mutually interfering set and classical singletons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalPartition {
    pub interfering: Vec<usize>,
    pub singletons: Vec<usize>,
}

/// Keep each of the photons in modes `0..n` independently with probability
/// `1 - lambda`.
pub fn apply_loss<R: Rng + ?Sized>(n: usize, lambda: f64, rng: &mut R) -> Vec<usize> {
    let lambda = lambda.clamp(0.0, 1.0);
    (0..n).filter(|_| !rng.random_bool(lambda)).collect()
}

/// Each survivor joins the interfering set with probability `x`.
pub fn collapse_internal<R: Rng + ?Sized>(survivors: &[usize], x: f64, rng: &mut R) -> InternalPartition {
    let x = x.clamp(0.0, 1.0);
    let mut part = InternalPartition {
        interfering: Vec::with_capacity(survivors.len()),
        singletons: Vec::new(),
    };
    for &s in survivors {
        if rng.random_bool(x) {
            part.interfering.push(s);
        } else {
            part.singletons.push(s);
        }
    }
    part
}

/// Particle model used to generate clicks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    /// Photons with the configured loss and distinguishability.
    Ideal,
    Distinguishable,
    #[serde(rename = "meanfield")]
    MeanField,
    Uniform,
    /// Adversarial mixture of two uniform blocks.
    Dad,
}

impl Species {
    pub const ALL: [Species; 5] = [
        Species::Ideal,
        Species::Distinguishable,
        Species::MeanField,
        Species::Uniform,
        Species::Dad,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Species::Ideal => "ideal",
            Species::Distinguishable => "distinguishable",
            Species::MeanField => "meanfield",
            Species::Uniform => "uniform",
            Species::Dad => "dad",
        }
    }
}

impl std::str::FromStr for Species {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "ideal" | "id" | "boson" => Species::Ideal,
            "distinguishable" | "d" => Species::Distinguishable,
            "meanfield" | "mean-field" | "sb" => Species::MeanField,
            "uniform" => Species::Uniform,
            "dad" | "adversarial" => Species::Dad,
            other => return Err(Error::InvalidInput(format!("unknown species {other:?}"))),
        })
    }
}

impl std::fmt::Display for Species {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything needed to generate records from one unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Source {
    pub species: Species,
    pub noise: NoiseParams,
    /// Weight of the favoured block for the adversarial mixture.
    #[serde(default)]
    pub alpha: AlphaChoice,
}

impl Source {
    pub fn new(species: Species, noise: NoiseParams) -> Self {
        Self {
            species,
            noise,
            alpha: AlphaChoice::default(),
        }
    }

    pub fn ideal() -> Self {
        Self::new(Species::Ideal, NoiseParams::IDEAL)
    }
}

/// Record generator bound to one unitary; caches single-photon tables.
pub struct Sampler<'a> {
    u: &'a Unitary,
    unitary_id: usize,
    n: usize,
    source: Source,
    block: usize,
    columns: Vec<WeightedIndex<f64>>,
}

impl<'a> Sampler<'a> {
    /// `block` is the size `K` of the favoured mode block of the adversarial
    /// mixture; other species ignore it.
    pub fn new(u: &'a Unitary, unitary_id: usize, n: usize, source: Source, block: usize) -> Result<Self> {
        let m = u.dim();
        if n > m {
            return Err(Error::InvalidInput(format!("{n} photons do not fit in {m} modes")));
        }
        if source.species == Species::Dad && (block < n || block > m) {
            return Err(Error::InvalidInput(format!(
                "block size K = {block} outside [{n}, {m}]"
            )));
        }
        let columns = (0..n).map(|k| column_table(u, k)).collect::<Result<_>>()?;
        Ok(Self {
            u,
            unitary_id,
            n,
            source,
            block,
            columns,
        })
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<ClickRecord> {
        let m = self.u.dim();
        let survivors = apply_loss(self.n, self.source.noise.lambda(), rng);
        let k = survivors.len();
        let pattern = match self.source.species {
            Species::Ideal => {
                let part = collapse_internal(&survivors, self.source.noise.x(), rng);
                let mut out = boson::sample_ideal_output(self.u, &part.interfering, rng)?;
                for &s in &part.singletons {
                    out.add_photon(self.columns[s].sample(rng));
                }
                out
            }
            Species::Distinguishable => {
                let mut out = FockPattern::vacuum(m);
                for &s in &survivors {
                    out.add_photon(self.columns[s].sample(rng));
                }
                out
            }
            Species::MeanField => classical::meanfield_from(self.u, &survivors, rng)?,
            Species::Uniform => sample_uniform_cf(m, k, rng)?,
            Species::Dad => {
                let alpha = self.source.alpha.resolve(m, k, self.block)?;
                sample_dad(m, k, self.block, alpha, rng)?
            }
        };
        ClickRecord::new(self.unitary_id, pattern, self.n)
    }
}

pub(crate) fn column_table(u: &Unitary, k: usize) -> Result<WeightedIndex<f64>> {
    let weights: Vec<f64> = (0..u.dim()).map(|j| u.transition_probability(j, k)).collect();
    WeightedIndex::new(weights).map_err(|e| Error::InvalidInput(format!("column {k}: {e}")))
}

pub(crate) fn weighted_choice<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Result<usize> {
    let dist =
        WeightedIndex::new(weights).map_err(|e| Error::InvalidInput(format!("cannot sample from weights: {e}")))?;
    Ok(dist.sample(rng))
}
