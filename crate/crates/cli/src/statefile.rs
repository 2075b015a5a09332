//! JSON state files.
//!
//! ```json
//! {
//!   "format": "multischmidt-state/1",
//!   "name": "W_3",
//!   "dims": [2, 2, 2],
//!   "amplitudes": [[0.0, 0.0], [0.5773502691896258, 0.0], ...],
//!   "seed": null
//! }
//! ```
//!
//! Amplitudes are listed row-major over `(i_1, …, i_m)` with party 1 the
//! slowest index, so `|i_1 … i_m⟩` sits at `Σ_k i_k ∏_{l>k} N_l`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use multischmidt::{CVector, DimensionProfile, PureState, C64};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "multischmidt-state/1";
/// Norm deviations above this are rejected.
pub const REJECT_TOL: f64 = 1e-8;
/// Norm deviations above this (and within [`REJECT_TOL`]) are renormalized
/// with a warning.
pub const WARN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub format: String,
    #[serde(default)]
    pub name: Option<String>,
    pub dims: Vec<usize>,
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl StateFile {
    pub fn from_state(name: Option<String>, state: &PureState, seed: Option<u64>) -> Self {
        Self {
            format: FORMAT.to_string(),
            name,
            dims: state.profile().dims().to_vec(),
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
            seed,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("state files always serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text).context("malformed state file")?;
        if file.format != FORMAT {
            bail!("unsupported state file format {:?} (expected {FORMAT:?})", file.format);
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    /// Validates the file and builds the state. The second value is a
    /// warning when the amplitudes had to be renormalized.
    pub fn to_state(&self) -> Result<(PureState, Option<String>)> {
        let profile = DimensionProfile::new(self.dims.clone())?;
        if self.amplitudes.len() != profile.total() {
            bail!(
                "{} amplitudes given but dims {:?} need {}",
                self.amplitudes.len(),
                self.dims,
                profile.total()
            );
        }
        let amps = CVector::from_iterator(
            self.amplitudes.len(),
            self.amplitudes.iter().map(|[re, im]| C64::new(*re, *im)),
        );
        let norm = amps.norm();
        let dev = (norm - 1.0).abs();
        if !(dev <= REJECT_TOL) {
            bail!("amplitudes have norm {norm}, more than {REJECT_TOL:e} away from 1");
        }
        let warning = (dev > WARN_TOL).then(|| format!("renormalized amplitudes (norm was {norm})"));
        Ok((PureState::normalized(profile, amps)?, warning))
    }
}

pub fn write(path: &Path, file: &StateFile) -> Result<()> {
    std::fs::write(path, file.to_json()).with_context(|| format!("writing {}", path.display()))
}
