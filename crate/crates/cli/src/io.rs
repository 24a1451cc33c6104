//! JSON file formats.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use slicemap_core::duality::TensorElement;
use slicemap_core::superop::{CbEstimate, SuperOp};
use slicemap_core::verify::PropertyReport;
use slicemap_core::{ComplexMatrix, FactorDims, C64};

use crate::CliError;

/// Row-major matrix with `[re, im]` entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        Self {
            rows: a.rows(),
            cols: a.cols(),
            data: a.to_row_major().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let data: Vec<C64> = self.data.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Ok(ComplexMatrix::from_row_major(self.rows, self.cols, data)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperOpFile {
    pub dim: usize,
    pub choi: MatrixFile,
}

impl SuperOpFile {
    #[cfg(test)]
    pub fn from_superop(phi: &SuperOp) -> Self {
        Self {
            dim: phi.dim(),
            choi: MatrixFile::from_matrix(phi.choi()),
        }
    }

    pub fn to_superop(&self) -> Result<SuperOp, CliError> {
        Ok(SuperOp::from_choi(self.choi.to_matrix()?, self.dim)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementFile {
    pub m: usize,
    pub n: usize,
    pub mat: MatrixFile,
}

impl ElementFile {
    pub fn from_element(u: &TensorElement) -> Self {
        let FactorDims { m, n } = u.dims();
        Self {
            m,
            n,
            mat: MatrixFile::from_matrix(u.mat()),
        }
    }

    pub fn to_element(&self) -> Result<TensorElement, CliError> {
        let dims = FactorDims::new(self.m, self.n)?;
        Ok(TensorElement::new(dims, self.mat.to_matrix()?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateFile {
    pub value: f64,
    pub level: usize,
    pub restarts: usize,
    pub converged: bool,
    pub witness: MatrixFile,
}

impl EstimateFile {
    pub fn from_estimate(est: &CbEstimate) -> Self {
        Self {
            value: est.value,
            level: est.level,
            restarts: est.restarts,
            converged: est.converged,
            witness: MatrixFile::from_matrix(&est.witness),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportFile<'a> {
    pub pass: bool,
    pub seed: u64,
    pub trials: usize,
    pub reports: &'a [PropertyReport],
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json(path.display().to_string(), e))
}

/// Writes pretty JSON to `path`, or to standard output when `path` is `None`.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Json("output".into(), e))?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.display().to_string(), e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io("stdout".into(), e)),
    }
}
