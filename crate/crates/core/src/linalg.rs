//! Dense symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Everything here works on small dense matrices (dimension up to a few
//! hundred). A [`SymMatrix`] is stored as a full row-major `k×k` buffer
//! whose symmetry is established once at construction time.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Off-diagonal Frobenius mass, relative to `1 + ||A||_F`, below which a
/// Jacobi sweep loop stops.
pub const JACOBI_TOL: f64 = 1e-13;
/// Hard cap on cyclic sweeps.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense symmetric real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle
    /// (`i <= j`) and mirroring it.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        ensure!(dim >= 1, Input, "matrix dimension must be at least 1");
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Ok(SymMatrix { dim, data })
    }

    /// Builds a matrix from square rows. Only the upper triangle is read;
    /// the lower triangle is overwritten by its mirror image.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        for (i, r) in rows.iter().enumerate() {
            ensure!(
                r.as_ref().len() == dim,
                Input,
                "row {i} has {} entries, expected {dim}",
                r.as_ref().len()
            );
        }
        Self::from_fn(dim, |i, j| rows[i].as_ref()[j])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Row-major view of all `k×k` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn neg(&self) -> SymMatrix {
        SymMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| -v).collect(),
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Rows and columns of `self` at the strictly increasing index set `s`.
    pub fn principal_minor(&self, s: &[usize]) -> Result<SymMatrix> {
        validate_subset(s, self.dim)?;
        let k = s.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in s {
            for &j in s {
                data.push(self.get(i, j));
            }
        }
        Ok(SymMatrix { dim: k, data })
    }

    /// Copies the principal minor at `s` into `buf` without validation.
    /// `s` must hold valid, distinct indices.
    pub(crate) fn minor_into(&self, s: &[usize], buf: &mut Vec<f64>) {
        buf.clear();
        for &i in s {
            let row = self.row(i);
            for &j in s {
                buf.push(row[j]);
            }
        }
    }

    /// Full eigendecomposition, eigenvalues sorted descending.
    pub fn eigh(&self) -> Result<Spectrum> {
        self.decompose(true)
    }

    /// Eigenvalues only, sorted descending.
    pub fn eigvalsh(&self) -> Result<Spectrum> {
        self.decompose(false)
    }

    fn decompose(&self, want_vectors: bool) -> Result<Spectrum> {
        ensure!(self.is_finite(), Input, "matrix has a non-finite entry");
        let k = self.dim;
        let mut a = self.data.clone();
        let mut v = if want_vectors {
            let mut v = vec![0.0; k * k];
            for i in 0..k {
                v[i * k + i] = 1.0;
            }
            Some(v)
        } else {
            None
        };
        let stats = jacobi_diagonalize(&mut a, k, v.as_deref_mut());
        let diag: Vec<f64> = (0..k).map(|i| a[i * k + i]).collect();
        let order = descending_order(&diag);
        let values = order.iter().map(|&i| diag[i]).collect();
        let vectors = v.map(|v| {
            let mut out = vec![0.0; k * k];
            for (col, &src) in order.iter().enumerate() {
                for row in 0..k {
                    out[row * k + col] = v[row * k + src];
                }
            }
            out
        });
        Ok(Spectrum {
            values,
            vectors,
            sweeps: stats.sweeps,
            residual: stats.residual,
        })
    }

    /// Largest eigenvalue.
    pub fn lambda_max(&self) -> Result<f64> {
        Ok(self.eigvalsh()?.values[0])
    }

    /// Smallest eigenvalue.
    pub fn lambda_min(&self) -> Result<f64> {
        Ok(*self.eigvalsh()?.values.last().unwrap())
    }

    /// `(1/k) * sum_{i,j} a_ij`, the Rayleigh quotient at the all-ones
    /// vector. Never exceeds the largest eigenvalue.
    pub fn avg_sum_lower_bound(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.dim as f64
    }

    /// `max(|lambda_1|, |lambda_k|)`.
    pub fn spectral_norm(&self) -> Result<f64> {
        let s = self.eigvalsh()?;
        Ok(s.values[0].abs().max(s.values[self.dim - 1].abs()))
    }

    /// Log-determinant of a positive definite matrix via Cholesky.
    pub fn log_det_psd(&self) -> Result<f64> {
        ensure!(self.is_finite(), Input, "matrix has a non-finite entry");
        let k = self.dim;
        let mut l = vec![0.0; k * k];
        let mut log_det = 0.0;
        for j in 0..k {
            let mut d = self.get(j, j);
            for t in 0..j {
                d -= l[j * k + t] * l[j * k + t];
            }
            if d.is_nan() || d <= 0.0 {
                return Err(Error::Domain(format!(
                    "matrix is not positive definite (pivot {j} = {d:e})"
                )));
            }
            let d = d.sqrt();
            l[j * k + j] = d;
            log_det += 2.0 * d.ln();
            for i in (j + 1)..k {
                let mut s = self.get(i, j);
                for t in 0..j {
                    s -= l[i * k + t] * l[j * k + t];
                }
                l[i * k + j] = s / d;
            }
        }
        Ok(log_det)
    }

    /// Serializes in the text format: a line with `k`, then `k` rows of
    /// `k` numbers with 17 significant digits.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{}", self.dim).unwrap();
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", row.join(" ")).unwrap();
        }
        out
    }

    /// Parses the text format written by [`SymMatrix::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let dim: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
        if dim == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for tok in tokens.by_ref() {
            let v: f64 = tok
                .parse()
                .map_err(|e| Error::Parse(format!("bad entry {tok:?}: {e}")))?;
            data.push(v);
        }
        if data.len() != dim * dim {
            return Err(Error::Parse(format!(
                "expected {} entries, found {}",
                dim * dim,
                data.len()
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(Error::Parse(format!("matrix is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SymMatrix { dim, data })
    }
}

/// Dense `rows × cols` real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(rows >= 1 && cols >= 1, Input, "matrix must be at least 1x1");
        ensure!(
            data.len() == rows * cols,
            Input,
            "expected {} entries, got {}",
            rows * cols,
            data.len()
        );
        Ok(Matrix { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `XᵀX`, accumulated row by row in a fixed order.
    pub fn gram(&self) -> SymMatrix {
        let p = self.cols;
        let mut g = vec![0.0; p * p];
        for r in 0..self.rows {
            let row = &self.data[r * p..(r + 1) * p];
            for i in 0..p {
                let xi = row[i];
                let gi = &mut g[i * p..(i + 1) * p];
                for j in i..p {
                    gi[j] += xi * row[j];
                }
            }
        }
        for i in 0..p {
            for j in (i + 1)..p {
                g[j * p + i] = g[i * p + j];
            }
        }
        SymMatrix { dim: p, data: g }
    }

    /// `X v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

/// Eigenvalues sorted descending, optionally with orthonormal eigenvectors
/// stored column-wise (row-major `k×k`, column `j` pairs with `values[j]`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<Vec<f64>>,
    /// Number of Jacobi sweeps performed.
    pub sweeps: usize,
    /// Off-diagonal Frobenius mass left when the iteration stopped.
    pub residual: f64,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> f64 {
        self.values[0]
    }

    pub fn min(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `V Λ Vᵀ`, if vectors were computed.
    pub fn reconstruct(&self) -> Option<SymMatrix> {
        let v = self.vectors.as_ref()?;
        let k = self.dim();
        SymMatrix::from_fn(k, |i, j| {
            (0..k).map(|t| v[i * k + t] * self.values[t] * v[j * k + t]).sum()
        })
        .ok()
    }
}

pub(crate) struct JacobiStats {
    pub sweeps: usize,
    pub residual: f64,
}

fn off_diagonal_norm(a: &[f64], k: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                s += a[i * k + j] * a[i * k + j];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi on the row-major buffer `a` (overwritten with a diagonal
/// matrix). When `v` is given it must start as the identity and receives
/// the accumulated rotations.
pub(crate) fn jacobi_diagonalize(a: &mut [f64], k: usize, mut v: Option<&mut [f64]>) -> JacobiStats {
    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_TOL * (1.0 + scale);
    let mut sweeps = 0;
    let mut residual = off_diagonal_norm(a, k);
    while residual >= tol && sweeps < JACOBI_MAX_SWEEPS {
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for r in 0..k {
                    let arp = a[r * k + p];
                    let arq = a[r * k + q];
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p * k + r];
                    let aqr = a[q * k + r];
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
                a[p * k + q] = 0.0;
                a[q * k + p] = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for r in 0..k {
                        let vrp = v[r * k + p];
                        let vrq = v[r * k + q];
                        v[r * k + p] = c * vrp - s * vrq;
                        v[r * k + q] = s * vrp + c * vrq;
                    }
                }
            }
        }
        sweeps += 1;
        residual = off_diagonal_norm(a, k);
    }
    JacobiStats { sweeps, residual }
}

/// Largest eigenvalue of the row-major buffer, which is destroyed.
/// Bit-identical to `SymMatrix::eigvalsh().values[0]` on the same entries.
pub(crate) fn lambda_max_in_place(a: &mut [f64], k: usize) -> f64 {
    if k == 1 {
        return a[0];
    }
    jacobi_diagonalize(a, k, None);
    (0..k).map(|i| a[i * k + i]).fold(f64::NEG_INFINITY, f64::max)
}

/// Indices that sort `values` descending; ties keep their original order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap());
    idx
}

/// Checks that `s` is nonempty, strictly increasing and below `dim`.
pub fn validate_subset(s: &[usize], dim: usize) -> Result<()> {
    ensure!(!s.is_empty(), Input, "index set must be nonempty");
    for w in s.windows(2) {
        ensure!(
            w[0] < w[1],
            Input,
            "index set must be strictly increasing (found {} then {})",
            w[0],
            w[1]
        );
    }
    let last = *s.last().unwrap();
    ensure!(last < dim, Input, "index {last} out of range for dimension {dim}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eigh_small_analytic_cases() {
        let s = SymMatrix::identity(3).unwrap().eigh().unwrap();
        assert_eq!(s.values, vec![1.0, 1.0, 1.0]);

        let a = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let s = a.eigh().unwrap();
        assert!(close(s.values[0], 3.0, 1e-12) && close(s.values[1], 1.0, 1e-12));

        let a = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let s = a.eigh().unwrap();
        assert!(close(s.values[0], 1.0, 1e-12) && close(s.values[1], -1.0, 1e-12));
    }

    #[test]
    fn eigh_rejects_non_finite() {
        let a = SymMatrix::from_rows(&[[f64::NAN, 0.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(a.eigh(), Err(Error::Input(_))));
    }

    #[test]
    fn from_rows_mirrors_upper_triangle() {
        let a = SymMatrix::from_rows(&[[1.0, 2.0], [7.0, 3.0]]).unwrap();
        assert_eq!(a.get(1, 0), 2.0);
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn principal_minor_cases() {
        let a = SymMatrix::diag(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(a.principal_minor(&[0, 2]).unwrap(), SymMatrix::diag(&[1.0, 3.0]).unwrap());

        let b = SymMatrix::from_rows(&[[1.0, 0.9, 0.0], [0.9, 1.0, 0.0], [0.0, 0.0, 1.5]]).unwrap();
        assert_eq!(
            b.principal_minor(&[0, 1]).unwrap(),
            SymMatrix::from_rows(&[[1.0, 0.9], [0.9, 1.0]]).unwrap()
        );
        assert_eq!(b.principal_minor(&[0, 1, 2]).unwrap(), b);

        assert!(matches!(b.principal_minor(&[0, 3]), Err(Error::Input(_))));
        assert!(matches!(b.principal_minor(&[1, 1]), Err(Error::Input(_))));
        assert!(matches!(b.principal_minor(&[2, 1]), Err(Error::Input(_))));
        assert!(matches!(b.principal_minor(&[]), Err(Error::Input(_))));
    }

    #[test]
    fn avg_sum_and_norm_examples() {
        let a = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert_eq!(a.avg_sum_lower_bound(), 3.0);
        assert!(close(a.spectral_norm().unwrap(), 3.0, 1e-12));
        assert_eq!(SymMatrix::identity(4).unwrap().avg_sum_lower_bound(), 1.0);
        let b = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        assert_eq!(b.avg_sum_lower_bound(), 1.0);
        assert!(close(SymMatrix::diag(&[-3.0, 2.0]).unwrap().spectral_norm().unwrap(), 3.0, 0.0));
        assert!(close(SymMatrix::identity(5).unwrap().spectral_norm().unwrap(), 1.0, 0.0));
    }

    #[test]
    fn log_det_examples() {
        assert_eq!(SymMatrix::identity(3).unwrap().log_det_psd().unwrap(), 0.0);
        let d = SymMatrix::diag(&[2.0, 8.0]).unwrap().log_det_psd().unwrap();
        assert!(close(d, 16f64.ln(), 1e-14));
        let a = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        assert!(close(a.log_det_psd().unwrap(), 3f64.ln(), 1e-14));
        let bad = SymMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(bad.log_det_psd(), Err(Error::Domain(_))));
    }

    #[test]
    fn text_format_round_trip() {
        let a = SymMatrix::from_rows(&[[0.1, -2.5e-7], [-2.5e-7, 1.0 / 3.0]]).unwrap();
        let text = a.to_text();
        assert!(text.starts_with("2\n"));
        assert_eq!(SymMatrix::from_text(&text).unwrap(), a);
        assert!(SymMatrix::from_text("2\n1 2\n3 4\n").is_err());
        assert!(SymMatrix::from_text("2\n1 2 2\n").is_err());
        assert!(SymMatrix::from_text("").is_err());
    }

    #[test]
    fn gram_matches_definition() {
        let x = Matrix::from_row_major(3, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let g = x.gram();
        assert_eq!(g.get(0, 0), 35.0);
        assert_eq!(g.get(0, 1), 44.0);
        assert_eq!(g.get(1, 1), 56.0);
    }
}
