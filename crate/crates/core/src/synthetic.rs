//! Synthetic writer populations with a known informative/noise split.
//!
//! Each writer owns a prototype drawn uniformly from the unit hypercube on the
//! first `informative_dims` features. Genuine signatures scatter around the
//! prototype with Gaussian noise of scale `writer_spread` on those features.
//! Skilled forgeries sit at the prototype displaced by Gaussian noise of
//! scale `forgery_offset` on the informative features. The remaining features
//! hold writer-independent noise of scale `noise_scale`, so a dissimilarity
//! on them has the same law for same-writer and different-writer pairs.

use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Label, SignatureRecord, WriterId};
use crate::error::{Error, Result};
use crate::rng::{self, tag};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub n_writers: usize,
    pub genuine_per_writer: usize,
    pub skilled_per_writer: usize,
    pub dim: usize,
    pub informative_dims: usize,
    pub writer_spread: f64,
    pub forgery_offset: f64,
    /// Scale of the writer-independent noise features.
    #[serde(default = "default_noise_scale")]
    pub noise_scale: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    /// Desk-scale profile: 60 writers, 64 features of which 16 informative.
    fn default() -> Self {
        GeneratorConfig {
            n_writers: 60,
            genuine_per_writer: 24,
            skilled_per_writer: 10,
            dim: 64,
            informative_dims: 16,
            writer_spread: 0.05,
            forgery_offset: 0.1,
            noise_scale: default_noise_scale(),
            seed: 0,
        }
    }
}

fn default_noise_scale() -> f64 {
    0.3
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_writers == 0 {
            return Err(Error::Config("n_writers must be at least 1".into()));
        }
        if self.informative_dims == 0 || self.informative_dims > self.dim {
            return Err(Error::Config(format!(
                "informative_dims must be in 1..={}, got {}",
                self.dim, self.informative_dims
            )));
        }
        for (name, v) in [
            ("writer_spread", self.writer_spread),
            ("forgery_offset", self.forgery_offset),
            ("noise_scale", self.noise_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_informative(&self, feature: usize) -> bool {
        feature < self.informative_dims
    }
}

/// Generates the population described by `config`. Writer ids run from 1.
pub fn generate(config: &GeneratorConfig) -> Result<Dataset> {
    config.validate()?;
    let k = config.informative_dims;
    let noise = config.noise_scale;
    let mut records = Vec::with_capacity(config.n_writers * (config.genuine_per_writer + config.skilled_per_writer));
    for w in 1..=config.n_writers as u32 {
        let mut rng = rng::stream(config.seed, &[tag::GENERATOR, u64::from(w)]);
        let prototype: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let mut gauss = || -> f64 { rng.sample(StandardNormal) };

        for s in 0..config.genuine_per_writer {
            let features = (0..config.dim)
                .map(|j| if j < k { prototype[j] + config.writer_spread * gauss() } else { noise * gauss() })
                .collect();
            records.push(SignatureRecord {
                writer: WriterId(w),
                label: Label::Genuine,
                sample_index: s as u32,
                features,
            });
        }
        for s in 0..config.skilled_per_writer {
            let features = (0..config.dim)
                .map(|j| if j < k { prototype[j] + config.forgery_offset * gauss() } else { noise * gauss() })
                .collect();
            records.push(SignatureRecord {
                writer: WriterId(w),
                label: Label::SkilledForgery,
                sample_index: s as u32,
                features,
            });
        }
    }
    Dataset::new(records, config.dim)
}
