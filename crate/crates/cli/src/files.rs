//! Matrix files: `{"dims":[..],"matrix":[[[re,im],..],..],"name":..,"convention":..}`.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use coherence::witness::Convention;
use coherence::{ComplexMatrix, DensityMatrix, DimSignature, Witness};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, sig: &DimSignature) -> Self {
        let n = m.order();
        Self {
            dims: sig.dims().to_vec(),
            matrix: (0..n)
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            name: None,
            convention: None,
        }
    }

    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self::from_matrix(rho.matrix(), rho.sig())
    }

    pub fn from_witness(w: &Witness, name: Option<String>) -> Self {
        Self {
            name,
            convention: Some(w.convention().tag().to_string()),
            ..Self::from_matrix(w.matrix(), w.sig())
        }
    }

    pub fn signature(&self) -> Result<DimSignature> {
        Ok(DimSignature::new(self.dims.clone())?)
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.matrix.len();
        if let Some((i, row)) = self.matrix.iter().enumerate().find(|(_, r)| r.len() != n) {
            bail!("row {i} has {} entries, expected {n}", row.len());
        }
        let data = self
            .matrix
            .iter()
            .flatten()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Ok(ComplexMatrix::new(n, n, data)?)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        Ok(DensityMatrix::from_loaded(self.to_matrix()?, self.signature()?)?)
    }

    pub fn convention(&self) -> Result<Convention> {
        match &self.convention {
            None => Ok(Convention::NullOnIncoherent),
            Some(tag) => Convention::from_tag(tag)
                .with_context(|| format!("unknown convention {tag:?}, expected \"null\" or \"nonneg\"")),
        }
    }

    pub fn to_witness(&self) -> Result<Witness> {
        Ok(Witness::new(self.to_matrix()?, self.signature()?, self.convention()?)?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("matrix file serializes");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()).with_context(|| format!("writing {}", path.display()))
    }
}

pub fn load_state(path: &Path) -> Result<DensityMatrix> {
    MatrixFile::load(path)?
        .to_state()
        .with_context(|| format!("{} is not a valid state", path.display()))
}

/// Witness and its display name: the file's `name`, else the file stem.
pub fn load_witness(path: &Path) -> Result<(String, Witness)> {
    let file = MatrixFile::load(path)?;
    let w = file
        .to_witness()
        .with_context(|| format!("{} is not a valid witness", path.display()))?;
    let name = match file.name {
        Some(n) => n,
        None => path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("W")
            .to_string(),
    };
    Ok((name, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use coherence::states::x_state;

    #[test]
    fn state_round_trip_is_byte_stable() {
        let rho = x_state(0.3, 0.7).unwrap();
        let text = MatrixFile::from_state(&rho).to_json();
        let again = MatrixFile::from_state(&MatrixFile::parse(&text).unwrap().to_state().unwrap()).to_json();
        assert_eq!(text, again);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let f = MatrixFile::parse(r#"{"dims":[2],"matrix":[[[1,0],[0,0]],[[0,0]]]}"#).unwrap();
        assert!(f.to_matrix().is_err());
    }

    #[test]
    fn witness_convention_defaults_to_null() {
        let f = MatrixFile::parse(r#"{"dims":[2],"matrix":[[[0,0],[1,0]],[[1,0],[0,0]]]}"#).unwrap();
        assert_eq!(f.to_witness().unwrap().convention(), Convention::NullOnIncoherent);
        let bad = MatrixFile {
            convention: Some("sometimes".into()),
            ..f
        };
        assert!(bad.to_witness().is_err());
    }
}
