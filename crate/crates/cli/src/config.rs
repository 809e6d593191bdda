//! Problem configuration: JSON schema for the solve subcommand.

use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use icurv_core::grid::{GridFunction, SphereGrid};
use icurv_core::harmonics::harmonic;
use icurv_core::solver::SolverConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub n: usize,
    pub alpha: f64,
    pub resolution: usize,
    #[serde(rename = "R")]
    pub curvature: CurvatureSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    pub output: OutputSpec,
}

/// Curvature weight: a named preset or an even-degree harmonic expansion.
/// Restricting to even degrees makes antipodal symmetry structural.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurvatureSpec {
    Preset { preset: String },
    Harmonics {
        harmonics: Vec<HarmonicTerm>,
        #[serde(default = "default_offset")]
        offset: f64,
    },
}

fn default_offset() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub degree: u32,
    pub index: usize,
    pub coeff: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSpec {
    pub report: PathBuf,
    pub fields: PathBuf,
}


impl ProblemConfig {
    pub fn load(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config JSON: {e}"))
    }

    /// Samples the curvature weight on the grid; fails when a node goes
    /// nonpositive or a term breaks the symmetry rules.
    pub fn sample_curvature(&self, grid: &Arc<SphereGrid>) -> Result<GridFunction, String> {
        let values: Vec<f64> = match &self.curvature {
            CurvatureSpec::Preset { preset } => match preset.as_str() {
                "constant" => vec![1.0; grid.len()],
                "even-harmonic" => {
                    let coeff = if self.n == 1 { 0.5 } else { 0.3 };
                    grid.points()
                        .iter()
                        .map(|p| 1.0 + coeff * harmonic(self.n, 2, 0, p).unwrap())
                        .collect()
                }
                other => return Err(format!("unknown R preset '{other}'")),
            },
            CurvatureSpec::Harmonics { harmonics, offset } => {
                for term in harmonics {
                    if term.degree % 2 != 0 {
                        return Err(format!(
                            "R harmonics must have even degree for antipodal symmetry (got degree {})",
                            term.degree
                        ));
                    }
                }
                grid.points()
                    .iter()
                    .map(|p| {
                        let mut v = *offset;
                        for term in harmonics {
                            v += term.coeff
                                * harmonic(self.n, term.degree, term.index, p)
                                    .map_err(|e| e.to_string())?;
                        }
                        Ok(v)
                    })
                    .collect::<Result<Vec<f64>, String>>()?
            }
        };
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0))
        {
            return Err(format!(
                "sampled R is not positive: node {index} at {:?} holds {value}",
                &grid.points()[index][..self.n + 1]
            ));
        }
        GridFunction::new(grid, values).map_err(|e| e.to_string())
    }
}
