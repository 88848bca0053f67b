//! TOML configuration and command-line overrides.
//!
//! One key-value document drives every subcommand; any CLI flag overrides
//! the corresponding key. The fully resolved configuration is echoed into
//! the output header so results are reproducible from the file alone.

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub state: StateSection,
    pub detector: DetectorSection,
    pub scan: ScanSection,
    pub sampling: SamplingSection,
    pub noise: NoiseSection,
    pub oracle: OracleSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSection {
    /// Squeezing amplitude |lambda| (dimensionless, < 1).
    pub lambda: f64,
    /// Relative phase in degrees; 0 is the symmetric state, 180 the
    /// antisymmetric one.
    pub phi_deg: f64,
}

impl Default for StateSection {
    fn default() -> Self {
        Self { lambda: 0.36, phi_deg: 180.0 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorSection {
    pub bins: usize,
    pub efficiency: f64,
}

impl Default for DetectorSection {
    fn default() -> Self {
        Self { bins: 8, efficiency: 0.135 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    /// Which wave plate varies: "qwp" or "hwp".
    pub axis: String,
    /// Angle of the other wave plate, degrees.
    pub fixed_deg: f64,
    pub start_deg: f64,
    pub stop_deg: f64,
    pub step_deg: f64,
    /// Requested outputs; omitted kinds leave their columns empty.
    pub outputs: Vec<String>,
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            axis: "qwp".into(),
            fixed_deg: 0.0,
            start_deg: 0.0,
            stop_deg: 90.0,
            step_deg: 2.5,
            outputs: vec![
                "second-order".into(),
                "mprime-mineig".into(),
                "s-nl-moments".into(),
            ],
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSection {
    /// Shot count; present (via file or flag) switches scans to sampling
    /// mode.
    pub shots: Option<u64>,
    pub seed: u64,
    pub resamples: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self { shots: None, seed: 1, resamples: 200 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub bins: usize,
    pub cos_theta_start: f64,
    pub cos_theta_stop: f64,
    pub cos_theta_step: f64,
    pub nbar_start: f64,
    pub nbar_stop: f64,
    pub nbar_step: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            bins: 8,
            cos_theta_start: 0.0,
            cos_theta_stop: 1.0,
            cos_theta_step: 0.1,
            nbar_start: 0.0,
            nbar_stop: 0.6,
            nbar_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleSection {
    /// Wave-plate grid (applied to QWP and HWP independently), degrees.
    pub angles_deg: Vec<f64>,
    /// Fock cutoff; 0 selects the tail-bound default for the state.
    pub cutoff: usize,
    pub tolerance: f64,
    /// Test hook: multiplies the oracle path's efficiency to verify the
    /// check fails on a deliberate mismatch.
    pub eta_factor: f64,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            angles_deg: vec![0.0, 22.5, 45.0, 67.5, 90.0],
            cutoff: 0,
            tolerance: 1e-8,
            eta_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// CSV destination; stdout when omitted.
    pub csv: Option<String>,
    /// Optional JSON mirror.
    pub json: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&std::path::Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    CliError::Config(format!("cannot read config {}: {e}", p.display()))
                })?;
                toml::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    /// Resolved-config echo for output headers: one `# key = value` line
    /// per setting, in a fixed order.
    pub fn echo_lines(&self) -> Vec<String> {
        let text = toml::to_string(self).expect("config serializes");
        let mut section = String::new();
        let mut lines = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') {
                section = line.trim_matches(['[', ']']).to_string();
            } else {
                lines.push(format!("{}.{}", section, line));
            }
        }
        lines
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanOutput {
    SecondOrder,
    MprimeMineig,
    SNlMoments,
}

pub fn parse_outputs(names: &[String]) -> Result<Vec<ScanOutput>, CliError> {
    names
        .iter()
        .map(|n| match n.as_str() {
            "second-order" => Ok(ScanOutput::SecondOrder),
            "mprime-mineig" => Ok(ScanOutput::MprimeMineig),
            "s-nl-moments" => Ok(ScanOutput::SNlMoments),
            other => Err(CliError::Config(format!(
                "unknown output '{other}' (expected second-order, mprime-mineig, s-nl-moments)"
            ))),
        })
        .collect()
}
