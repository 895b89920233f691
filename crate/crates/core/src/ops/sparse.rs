use std::io::{self, Write};

use crate::{Error, Result};

/// Entries with magnitude below this are not stored.
pub const DROP_TOLERANCE: f64 = 1e-15;

/// Compressed sparse row matrix with sorted, deduplicated column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseOperator {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicates are summed in insertion order, so two triplet lists that
    /// list the contributions to `(i, j)` and `(j, i)` in the same order give
    /// bitwise-equal entries.
    pub fn from_triplets(rows: usize, cols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut k = 0;
        while k < triplets.len() {
            let (r, c, _) = triplets[k];
            debug_assert!(r < rows && c < cols);
            let mut sum = 0.0;
            while k < triplets.len() && triplets[k].0 == r && triplets[k].1 == c {
                sum += triplets[k].2;
                k += 1;
            }
            if sum.abs() >= DROP_TOLERANCE {
                col_idx.push(c);
                values.push(sum);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_triplets(
            n,
            n,
            values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `r` as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        for (r, yr) in y.iter_mut().enumerate() {
            *yr = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// Applies the matrix to a vector of 2D values, component by component.
    pub fn mul_vec2(&self, x: &[[f64; 2]]) -> Vec<[f64; 2]> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r).fold([0.0, 0.0], |acc, (c, v)| {
                    [acc[0] + v * x[c][0], acc[1] + v * x[c][1]]
                })
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).map(|(_, v)| v).sum())
            .collect()
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut t: Vec<(usize, usize, f64)> = self.entries().collect();
        t.extend(other.entries().map(|(r, c, v)| (r, c, s * v)));
        Self::from_triplets(self.rows, self.cols, t)
    }

    /// True when every stored entry equals its transpose exactly.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.entries().all(|(r, c, v)| self.get(c, r) == v)
    }

    /// Writes the matrix in Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.rows, self.cols, self.nnz())?;
        for (r, c, v) in self.entries() {
            writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v)?;
        }
        Ok(())
    }
}

/// Convergence summary of [`solve_cg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    /// Final `‖b − Ax‖₂ / ‖b‖₂`.
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for a symmetric positive-definite `a`.
///
/// `x` holds the initial guess on entry and the solution on exit.
pub fn solve_cg(
    a: &SparseOperator,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<CgOutcome> {
    let n = a.rows();
    assert_eq!(b.len(), n);
    assert_eq!(x.len(), n);
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(CgOutcome {
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diag()
        .iter()
        .map(|&d| {
            if d > 0.0 {
                Ok(1.0 / d)
            } else {
                Err(Error::Solver(format!("nonpositive diagonal entry {d}")))
            }
        })
        .collect::<Result<_>>()?;

    let mut ax = vec![0.0; n];
    a.mul_vec_into(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(r, z)| r * z).sum();
    let mut ap = vec![0.0; n];
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut res = norm(&r) / b_norm;
    let mut it = 0;
    while res > rel_tol {
        if it >= max_iter {
            return Err(Error::Solver(format!(
                "conjugate gradients stalled at relative residual {res:e} after {it} iterations"
            )));
        }
        a.mul_vec_into(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(p, q)| p * q).sum();
        if !(pap > 0.0) {
            return Err(Error::Solver(format!("breakdown: pᵀAp = {pap:e}")));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(r, z)| r * z).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        it += 1;
        res = norm(&r) / b_norm;
    }
    Ok(CgOutcome {
        iterations: it,
        relative_residual: res,
    })
}
