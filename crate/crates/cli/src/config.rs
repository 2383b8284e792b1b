//! Experiment configuration files (TOML).

use std::path::{Path, PathBuf};

use grafting::graft::{graft, GraftedComplex, WeightedMulticurve};
use grafting::pants::{CurveGluing, FNSurface, PantsDecomposition, Slot};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentName {
    Area,
    Degraft,
    Spine,
    DeflateRate,
    Slimness,
    Cantor,
    HexagonLemmas,
}

impl ExperimentName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::Area => "area",
            ExperimentName::Degraft => "degraft",
            ExperimentName::Spine => "spine",
            ExperimentName::DeflateRate => "deflate-rate",
            ExperimentName::Slimness => "slimness",
            ExperimentName::Cantor => "cantor",
            ExperimentName::HexagonLemmas => "hexagon-lemmas",
        }
    }

    /// Whether the experiment reads the surface and multicurve blocks.
    pub fn needs_surface(&self) -> bool {
        !matches!(self, ExperimentName::Cantor | ExperimentName::HexagonLemmas)
    }
}

/// Named pants decompositions, or explicit gluings
/// `[pants_a, slot_a, pants_b, slot_b]` per curve.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DecompositionSpec {
    Named(String),
    Gluings(Vec<[usize; 4]>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceBlock {
    pub genus: usize,
    pub decomposition: DecompositionSpec,
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MulticurveBlock {
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentBlock {
    pub name: ExperimentName,
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    #[serde(default = "defaults::n_pairs")]
    pub n_pairs: usize,
    #[serde(default = "defaults::net_step")]
    pub net_step: f64,
    #[serde(default = "defaults::ts")]
    pub ts: Vec<f64>,
    #[serde(default = "defaults::grid_step")]
    pub grid_step: f64,
    /// Monte-Carlo sample count (area).
    #[serde(default = "defaults::samples")]
    pub samples: usize,
    /// Weight scale factors (degraft).
    #[serde(default = "defaults::scales")]
    pub scales: Vec<f64>,
    /// Refinement depths (cantor).
    #[serde(default = "defaults::depths")]
    pub depths: Vec<usize>,
    /// Random configurations: extra ones for area (default 0), the sample
    /// size for hexagon-lemmas (default 100).
    pub configs: Option<usize>,
    /// Boundary lengths of extra pants to run the spine oracle on.
    #[serde(default)]
    pub pants: Vec<[f64; 3]>,
    #[serde(default = "defaults::node_cap")]
    pub node_cap: usize,
}

mod defaults {
    pub fn seed() -> u64 {
        1
    }
    pub fn n_pairs() -> usize {
        500
    }
    pub fn net_step() -> f64 {
        0.02
    }
    pub fn ts() -> Vec<f64> {
        vec![1.0, 0.5, 0.25, 0.125]
    }
    pub fn grid_step() -> f64 {
        0.01
    }
    pub fn samples() -> usize {
        1_000_000
    }
    pub fn scales() -> Vec<f64> {
        vec![1.0, 0.5, 0.25, 0.125]
    }
    pub fn depths() -> Vec<usize> {
        vec![4, 6, 8, 10, 12]
    }
    pub fn node_cap() -> usize {
        grafting::graft::DEFAULT_NODE_CAP
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// Directory for CSV files.
    pub dir: Option<PathBuf>,
    /// File name; defaults to `<experiment>.csv`.
    pub file: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub surface: Option<SurfaceBlock>,
    pub multicurve: Option<MulticurveBlock>,
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn config_error(m: impl Into<String>) -> CliError {
    CliError::Config(m.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Schema checks beyond what deserialisation enforces.
    pub fn validate(&self) -> Result<(), CliError> {
        let x = &self.experiment;
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(config_error(format!("{name} must be positive, got {v}")))
            }
        };
        positive("net-step", x.net_step)?;
        positive("grid-step", x.grid_step)?;
        for &t in &x.ts {
            positive("ts entry", t)?;
        }
        for &s in &x.scales {
            positive("scales entry", s)?;
        }
        for p in &x.pants {
            for &l in p {
                positive("pants length", l)?;
            }
        }
        if x.n_pairs == 0 || x.samples == 0 || x.configs == Some(0) || x.node_cap == 0 {
            return Err(config_error("n-pairs, samples, configs and node-cap must be positive"));
        }
        if x.ts.is_empty() || x.scales.is_empty() || x.depths.is_empty() {
            return Err(config_error("ts, scales and depths must be non-empty"));
        }
        if x.depths.iter().any(|&d| d == 0 || d > 20) {
            return Err(config_error("depths must lie in 1..=20"));
        }
        if x.name.needs_surface() {
            let (s, m) = match (&self.surface, &self.multicurve) {
                (Some(s), Some(m)) => (s, m),
                _ => {
                    return Err(config_error(format!(
                        "experiment {} needs [surface] and [multicurve]",
                        x.name.as_str()
                    )))
                }
            };
            if m.weights.len() != s.lengths.len() {
                return Err(config_error(format!("{} weights for {} curves", m.weights.len(), s.lengths.len())));
            }
            if m.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
                return Err(config_error("weights must be finite and non-negative"));
            }
            self.grafted()?;
        }
        Ok(())
    }

    pub fn decomposition(&self) -> Result<PantsDecomposition, CliError> {
        let s = self.surface.as_ref().ok_or_else(|| config_error("missing [surface]"))?;
        let dec = match &s.decomposition {
            DecompositionSpec::Named(n) => match (n.as_str(), s.genus) {
                ("theta", 2) => PantsDecomposition::genus2_theta(),
                ("loops", 2) => PantsDecomposition::genus2_loops(),
                ("ring", 3) => PantsDecomposition::genus3_ring(),
                (other, g) => return Err(config_error(format!("no named decomposition {other:?} in genus {g}"))),
            },
            DecompositionSpec::Gluings(gl) => {
                let curves = gl
                    .iter()
                    .map(|&[pa, sa, pb, sb]| CurveGluing {
                        a: Slot { pants: pa, slot: sa },
                        b: Slot { pants: pb, slot: sb },
                    })
                    .collect();
                PantsDecomposition::new(s.genus, curves).map_err(|e| config_error(e.to_string()))?
            }
        };
        if dec.genus() != s.genus {
            return Err(config_error(format!("decomposition has genus {}, surface says {}", dec.genus(), s.genus)));
        }
        Ok(dec)
    }

    pub fn fn_surface(&self) -> Result<FNSurface, CliError> {
        let s = self.surface.as_ref().ok_or_else(|| config_error("missing [surface]"))?;
        FNSurface::new(self.decomposition()?, s.lengths.clone(), s.twists.clone())
            .map_err(|e| config_error(e.to_string()))
    }

    pub fn multicurve(&self) -> Result<WeightedMulticurve, CliError> {
        let m = self.multicurve.as_ref().ok_or_else(|| config_error("missing [multicurve]"))?;
        WeightedMulticurve::new(m.weights.clone()).map_err(|e| config_error(e.to_string()))
    }

    pub fn grafted(&self) -> Result<GraftedComplex, CliError> {
        graft(&self.fn_surface()?, &self.multicurve()?).map_err(|e| config_error(e.to_string()))
    }

    pub fn file_name(&self) -> String {
        self.output.file.clone().unwrap_or_else(|| format!("{}.csv", self.experiment.name.as_str()))
    }
}
