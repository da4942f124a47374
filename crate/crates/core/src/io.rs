//! JSON interchange for matrices: `{"dims": [...], "re": [[...]], "im": [[...]]}`.
//!
//! Floats are written in shortest round-trip form (never more than 17
//! significant digits), so a written matrix reads back bit-identical.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, DensityMatrix, HermitianMatrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&HermitianMatrix> for MatrixFile {
    fn from(m: &HermitianMatrix) -> Self {
        let n = m.order();
        let data = m.matrix();
        MatrixFile {
            dims: m.dims().to_vec(),
            re: (0..n).map(|i| (0..n).map(|j| data[(i, j)].re).collect()).collect(),
            im: (0..n).map(|i| (0..n).map(|j| data[(i, j)].im).collect()).collect(),
        }
    }
}

impl MatrixFile {
    /// Validates shape and hermiticity.
    pub fn to_hermitian(&self) -> Result<HermitianMatrix> {
        let n = self.re.len();
        if self.im.len() != n
            || self.re.iter().any(|r| r.len() != n)
            || self.im.iter().any(|r| r.len() != n)
        {
            return Err(Error::Format("re and im must be square arrays of equal size".into()));
        }
        if self.re.iter().flatten().chain(self.im.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::Format("non-finite entry".into()));
        }
        let data = CMatrix::from_fn(n, n, |i, j| Complex64::new(self.re[i][j], self.im[i][j]));
        HermitianMatrix::new(self.dims.clone(), data)
    }
}

pub fn to_json(m: &HermitianMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MatrixFile::from(m))?)
}

pub fn from_json(text: &str) -> Result<HermitianMatrix> {
    let file: MatrixFile = serde_json::from_str(text)?;
    file.to_hermitian()
}

pub fn write_matrix(path: &Path, m: &HermitianMatrix) -> Result<()> {
    fs::write(path, to_json(m)? + "\n")?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<HermitianMatrix> {
    from_json(&fs::read_to_string(path)?)
}

pub fn read_density(path: &Path) -> Result<DensityMatrix> {
    DensityMatrix::new(read_matrix(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
