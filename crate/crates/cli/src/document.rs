//! JSON shapes read and written by the command-line tool.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use nestmod::{InstanceSpec, Nest, Operator, C64};

use crate::CliError;

/// An `n×n` grid of `[re, im]` pairs, row-major.
pub type MatrixGrid = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub nest: Vec<usize>,
    pub generators: Vec<MatrixGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

pub fn grid_of(t: &Operator) -> MatrixGrid {
    let n = t.side();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let z = t.get(i, j);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

impl InstanceDocument {
    pub fn from_spec(spec: &InstanceSpec) -> Self {
        Self {
            nest: spec.nest.boundaries().to_vec(),
            generators: spec.seed_matrices.iter().map(grid_of).collect(),
            label: Some(spec.label.clone()),
            tolerance: None,
        }
    }

    /// Validates boundaries and grid shapes.
    pub fn to_spec(&self) -> Result<InstanceSpec, CliError> {
        let nest = Nest::new(self.nest.clone()).map_err(|e| CliError::Input(format!("nest: {e}")))?;
        let n = nest.dimension();
        let mut seeds = Vec::with_capacity(self.generators.len());
        for (g, grid) in self.generators.iter().enumerate() {
            if grid.len() != n || grid.iter().any(|row| row.len() != n) {
                return Err(CliError::Input(format!("generator {g} is not {n}×{n}")));
            }
            let rows: Vec<Vec<C64>> = grid
                .iter()
                .map(|row| row.iter().map(|&[re, im]| C64::new(re, im)).collect())
                .collect();
            seeds.push(Operator::from_rows(&rows).map_err(|e| CliError::Input(format!("generator {g}: {e}")))?);
        }
        if let Some(tol) = self.tolerance {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(CliError::Input(format!("tolerance must be finite and nonnegative, got {tol}")));
            }
        }
        InstanceSpec::new(nest, seeds, self.label.clone().unwrap_or_default())
            .map_err(|e| CliError::Input(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessDocument {
    pub check: String,
    pub note: String,
    pub residual: f64,
    pub matrix: MatrixGrid,
}

/// Results for one instance. Absent sections are omitted.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct InstanceReport {
    pub label: String,
    pub nest: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng_seed: Option<u64>,
    pub dimensions: IndexMap<String, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bands: Option<Vec<[usize; 2]>>,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub clauses: IndexMap<String, bool>,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub informational: IndexMap<String, bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precondition_failure: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessDocument>,
    #[serde(skip_serializing_if = "IndexMap::is_empty")]
    pub bases: IndexMap<String, Vec<MatrixGrid>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub tool: String,
    pub command: String,
    pub tolerance: f64,
    pub results: Vec<InstanceReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
}
