//! Exact and sampled evaluation of the quasirandomness measures.

mod cd;
mod disc;
mod expansion;
mod octahedron;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub use cd::{cd_threshold_defect, CdResult, CdScope};
pub use disc::{disc_defect, DiscResult};
pub use expansion::{
    expansion_count, expansion_defect, partite_expansion_identity_check, stirling2, PartiteReport,
};
pub use octahedron::{
    deviation, deviation_with, eta, eta_with, DevResult, FactoredPredicate, OctahedronConvention,
    OctahedronSpec,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Sampled,
}

/// How a measure is evaluated. `exact_threshold` caps the number of
/// enumeration steps an exact run may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureConfig {
    pub mode: Mode,
    pub sample_count: u64,
    pub seed: u64,
    pub exact_threshold: u128,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        MeasureConfig { mode: Mode::Exact, sample_count: 100_000, seed: 0, exact_threshold: 1 << 30 }
    }
}

impl MeasureConfig {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn sampled(sample_count: u64, seed: u64) -> Self {
        MeasureConfig { mode: Mode::Sampled, sample_count, seed, ..Self::default() }
    }

    pub fn with_threshold(mut self, exact_threshold: u128) -> Self {
        self.exact_threshold = exact_threshold;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == Mode::Sampled && self.sample_count == 0 {
            return invalid("sampled mode needs sample_count > 0");
        }
        Ok(())
    }

    pub(crate) fn guard(&self, what: &'static str, steps: u128) -> Result<()> {
        if steps > self.exact_threshold {
            return Err(crate::Error::TooLarge { what, steps, threshold: self.exact_threshold });
        }
        Ok(())
    }
}

/// Sample mean and standard error of the mean from integer moments.
pub(crate) fn mean_and_se(sum: f64, sum_sq: f64, count: u64) -> (f64, f64) {
    let m = count as f64;
    let mean = sum / m;
    if count < 2 {
        return (mean, f64::NAN);
    }
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    (mean, (var / m).sqrt())
}
