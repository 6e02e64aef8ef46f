//! Stable JSON representations of the domain types.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major nested
//! arrays of pairs. Coefficient maps serialize in their lexicographic
//! iteration order, so output is byte-deterministic. Diagonal-block
//! variables are 1-based in the file format (matching the usual
//! mathematical indexing); in-memory indices are 0-based.

use serde::{Deserialize, Serialize};

use crate::cmatrix::CMatrix;
use crate::error::{Error, Result};
use crate::factorization::{AglerDecomposition, DiagonalMonomialBlock, StructuredFactorization};
use crate::gramfit::GramCertificate;
use crate::kernel::HermitianKernelPoly;
use crate::multiindex::MultiIndex;
use crate::poly::MatrixPoly;
use crate::tuple::CommutingTuple;
use crate::C64;

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn complex_to_json(c: C64) -> ComplexJson {
    [c.re, c.im]
}

pub fn complex_from_json(j: ComplexJson) -> C64 {
    C64::new(j[0], j[1])
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| complex_to_json(m[(r, c)])).collect())
        .collect()
}

/// Parse a dense matrix; rows must be equally long. `expect_cols` pins the
/// width of empty matrices (`[]` has zero rows and unknowable width).
pub fn matrix_from_json(j: &MatrixJson, expect_cols: Option<usize>) -> Result<CMatrix> {
    let rows = j.len();
    let cols = j.first().map(|r| r.len()).or(expect_cols).unwrap_or(0);
    for (r, row) in j.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::invalid(format!(
                "ragged matrix: row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |r, c| complex_from_json(j[r][c])))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyCoeffJson {
    pub index: Vec<u32>,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyJson {
    pub nvars: usize,
    pub rows: usize,
    pub cols: usize,
    pub coeffs: Vec<PolyCoeffJson>,
}

impl From<&MatrixPoly> for PolyJson {
    fn from(p: &MatrixPoly) -> Self {
        PolyJson {
            nvars: p.nvars(),
            rows: p.rows(),
            cols: p.cols(),
            coeffs: p
                .iter()
                .map(|(index, matrix)| PolyCoeffJson {
                    index: index.exponents().to_vec(),
                    matrix: matrix_to_json(matrix),
                })
                .collect(),
        }
    }
}

impl TryFrom<&PolyJson> for MatrixPoly {
    type Error = Error;

    fn try_from(j: &PolyJson) -> Result<MatrixPoly> {
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| {
                let m = matrix_from_json(&c.matrix, Some(j.cols))?;
                Ok((MultiIndex::new(c.index.clone()), m))
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixPoly::from_coeffs(j.nvars, j.rows, j.cols, coeffs)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelCoeffJson {
    pub index_z: Vec<u32>,
    pub index_w: Vec<u32>,
    pub matrix: MatrixJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelJson {
    pub nvars: usize,
    pub size: usize,
    pub coeffs: Vec<KernelCoeffJson>,
}

impl From<&HermitianKernelPoly> for KernelJson {
    fn from(k: &HermitianKernelPoly) -> Self {
        KernelJson {
            nvars: k.nvars(),
            size: k.size(),
            coeffs: k
                .iter()
                .map(|((iz, iw), matrix)| KernelCoeffJson {
                    index_z: iz.exponents().to_vec(),
                    index_w: iw.exponents().to_vec(),
                    matrix: matrix_to_json(matrix),
                })
                .collect(),
        }
    }
}

impl TryFrom<&KernelJson> for HermitianKernelPoly {
    type Error = Error;

    fn try_from(j: &KernelJson) -> Result<HermitianKernelPoly> {
        let mut k = HermitianKernelPoly::zero(j.nvars, j.size);
        for c in &j.coeffs {
            if c.index_z.len() != j.nvars || c.index_w.len() != j.nvars {
                return Err(Error::invalid(format!(
                    "kernel coefficient index arity {}/{} != nvars {}",
                    c.index_z.len(),
                    c.index_w.len(),
                    j.nvars
                )));
            }
            let m = matrix_from_json(&c.matrix, Some(j.size))?;
            if m.nrows() != j.size || m.ncols() != j.size {
                return Err(Error::invalid(format!(
                    "kernel coefficient is {}x{}, expected {0}x{0} with size {}",
                    m.nrows(),
                    m.ncols(),
                    j.size
                )));
            }
            k.add_to_coeff(
                (
                    MultiIndex::new(c.index_z.clone()),
                    MultiIndex::new(c.index_w.clone()),
                ),
                &m,
            );
        }
        Ok(k)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagJson {
    /// 1-based variable index.
    pub var: usize,
    pub exponents: Vec<u32>,
}

/// One factor of a structured factorization: `{"scalar": [[..]]}` or
/// `{"diag": {"var": i, "exponents": [..]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorJson {
    Scalar(MatrixJson),
    Diag(DiagJson),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationJson {
    pub nvars: usize,
    pub factors: Vec<FactorJson>,
}

impl From<&StructuredFactorization> for FactorizationJson {
    fn from(f: &StructuredFactorization) -> Self {
        let mut factors = Vec::with_capacity(f.scalars().len() + f.diagonals().len());
        for (j, scalar) in f.scalars().iter().enumerate() {
            factors.push(FactorJson::Scalar(matrix_to_json(scalar)));
            if let Some(d) = f.diagonals().get(j) {
                factors.push(FactorJson::Diag(DiagJson {
                    var: d.var() + 1,
                    exponents: d.exponents().to_vec(),
                }));
            }
        }
        FactorizationJson {
            nvars: f.nvars(),
            factors,
        }
    }
}

impl TryFrom<&FactorizationJson> for StructuredFactorization {
    type Error = Error;

    fn try_from(j: &FactorizationJson) -> Result<StructuredFactorization> {
        let mut scalars = Vec::new();
        let mut diagonals = Vec::new();
        for (k, factor) in j.factors.iter().enumerate() {
            match factor {
                FactorJson::Scalar(m) => {
                    if scalars.len() != diagonals.len() {
                        return Err(Error::invalid(format!(
                            "factor {k}: expected a diagonal block, found a scalar"
                        )));
                    }
                    scalars.push(matrix_from_json(m, None)?);
                }
                FactorJson::Diag(d) => {
                    if scalars.len() != diagonals.len() + 1 {
                        return Err(Error::invalid(format!(
                            "factor {k}: expected a scalar, found a diagonal block"
                        )));
                    }
                    if d.var == 0 || d.var > j.nvars {
                        return Err(Error::invalid(format!(
                            "factor {k}: variable {} out of range 1..={}",
                            d.var, j.nvars
                        )));
                    }
                    diagonals.push(DiagonalMonomialBlock::new(d.var - 1, d.exponents.clone()));
                }
            }
        }
        if scalars.len() != diagonals.len() + 1 {
            return Err(Error::invalid(
                "factor list must alternate scalar, diag, ..., scalar".to_string(),
            ));
        }
        Ok(StructuredFactorization::new(j.nvars, scalars, diagonals))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    pub nvars: usize,
    #[serde(rename = "R")]
    pub r: MatrixJson,
    /// `N + 1` parts: the defect-free `P0` first, then one per variable.
    pub parts: Vec<PolyJson>,
}

impl From<&AglerDecomposition> for DecompositionJson {
    fn from(d: &AglerDecomposition) -> Self {
        let mut parts = Vec::with_capacity(d.nvars() + 1);
        parts.push(PolyJson::from(d.p0()));
        for i in 0..d.nvars() {
            parts.push(PolyJson::from(d.var_part(i)));
        }
        DecompositionJson {
            nvars: d.nvars(),
            r: matrix_to_json(d.r()),
            parts,
        }
    }
}

impl TryFrom<&DecompositionJson> for AglerDecomposition {
    type Error = Error;

    fn try_from(j: &DecompositionJson) -> Result<AglerDecomposition> {
        if j.parts.len() != j.nvars + 1 {
            return Err(Error::invalid(format!(
                "decomposition needs {} parts (P0 plus one per variable), found {}",
                j.nvars + 1,
                j.parts.len()
            )));
        }
        let r = matrix_from_json(&j.r, None)?;
        let mut parts = j
            .parts
            .iter()
            .map(MatrixPoly::try_from)
            .collect::<Result<Vec<_>>>()?;
        let p0 = parts.remove(0);
        Ok(AglerDecomposition::new(j.nvars, r, p0, parts))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub dim: usize,
    pub matrices: Vec<MatrixJson>,
}

impl From<&CommutingTuple> for TupleJson {
    fn from(t: &CommutingTuple) -> Self {
        TupleJson {
            dim: t.dim(),
            matrices: t.matrices().iter().map(matrix_to_json).collect(),
        }
    }
}

impl TryFrom<&TupleJson> for CommutingTuple {
    type Error = Error;

    fn try_from(j: &TupleJson) -> Result<CommutingTuple> {
        let matrices = j
            .matrices
            .iter()
            .map(|m| matrix_from_json(m, Some(j.dim)))
            .collect::<Result<Vec<_>>>()?;
        let t = CommutingTuple::new(matrices)?;
        if t.dim() != j.dim {
            return Err(Error::invalid(format!(
                "tuple dim field {} does not match matrices of size {}",
                j.dim,
                t.dim()
            )));
        }
        Ok(t)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub degree: usize,
    pub basis: Vec<Vec<u32>>,
    pub grams: Vec<MatrixJson>,
    pub residual: f64,
    pub iterations: usize,
}

impl From<&GramCertificate> for CertificateJson {
    fn from(c: &GramCertificate) -> Self {
        CertificateJson {
            degree: c.degree,
            basis: c.basis.iter().map(|i| i.exponents().to_vec()).collect(),
            grams: c.grams.iter().map(matrix_to_json).collect(),
            residual: c.residual,
            iterations: c.iterations,
        }
    }
}

impl TryFrom<&CertificateJson> for GramCertificate {
    type Error = Error;

    fn try_from(j: &CertificateJson) -> Result<GramCertificate> {
        Ok(GramCertificate {
            degree: j.degree,
            basis: j.basis.iter().map(|e| MultiIndex::new(e.clone())).collect(),
            grams: j
                .grams
                .iter()
                .map(|m| matrix_from_json(m, None))
                .collect::<Result<Vec<_>>>()?,
            residual: j.residual,
            iterations: j.iterations,
        })
    }
}
