//! Compressed-row sparse storage and a sparse Cholesky factorization.

use std::io::Write;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Side};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sparse matrix in compressed-row form with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_offsets: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds the matrix from raw parts.
    ///
    /// # Panics
    /// If the parts are inconsistent or a row's columns are not strictly
    /// increasing.
    pub fn from_parts(nrows: usize, ncols: usize, row_offsets: Vec<usize>, cols: Vec<usize>, values: Vec<f64>) -> Self {
        assert_eq!(row_offsets.len(), nrows + 1);
        assert_eq!(cols.len(), values.len());
        assert_eq!(*row_offsets.last().unwrap(), cols.len());
        for r in 0..nrows {
            let row = &cols[row_offsets[r]..row_offsets[r + 1]];
            assert!(row.windows(2).all(|w| w[0] < w[1]), "row {r} columns not sorted");
            assert!(row.iter().all(|&c| c < ncols));
        }
        Self { nrows, ncols, row_offsets, cols, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.cols[span.clone()], &self.values[span])
    }

    pub(crate) fn row_values_mut(&mut self, r: usize) -> (&[usize], &mut [f64]) {
        let span = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.cols[span.clone()], &mut self.values[span])
    }

    /// Stored entry at `(r, c)`, zero when absent.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map(|k| vals[k]).unwrap_or(0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    pub fn mul_complex(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter().zip(vals).map(|(&c, &v)| x[c] * v).sum()
            })
            .collect()
    }

    /// Submatrix with the given row and column index lists (in list order).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CsrMatrix {
        let mut local = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            local[c] = k;
        }
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        row_offsets.push(0);
        let mut out_cols = Vec::new();
        let mut out_vals = Vec::new();
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for &r in rows {
            scratch.clear();
            let (rc, rv) = self.row(r);
            for (&c, &v) in rc.iter().zip(rv) {
                if local[c] != usize::MAX {
                    scratch.push((local[c], v));
                }
            }
            scratch.sort_unstable_by_key(|e| e.0);
            for &(c, v) in &scratch {
                out_cols.push(c);
                out_vals.push(v);
            }
            row_offsets.push(out_cols.len());
        }
        CsrMatrix { nrows: rows.len(), ncols: cols.len(), row_offsets, cols: out_cols, values: out_vals }
    }

    /// Writes the matrix in MatrixMarket coordinate format (1-based indices).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (r, c, v) in self.iter() {
            writeln!(w, "{} {} {}", r + 1, c + 1, v)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Right-hand sides are solved in fixed-size column blocks so results do
/// not depend on the number of worker threads.
const RHS_BLOCK: usize = 32;

/// Sparse `L L^T` factorization of a symmetric positive definite matrix
/// (fill-reducing ordering chosen by the backend). Immutable after
/// construction and safe to share across threads.
pub struct SparseCholesky {
    n: usize,
    llt: Llt<usize, f64>,
}

impl SparseCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
        }
        let n = a.nrows();
        // Only the lower triangle is read by the factorization.
        let triplets: Vec<Triplet<usize, usize, f64>> =
            a.iter().filter(|&(r, c, _)| c <= r).map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = mat.sp_cholesky(Side::Lower).map_err(|e| Error::Factorization(e.to_string()))?;
        Ok(Self { n, llt })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` for a complex right-hand side by solving its real and
    /// imaginary parts together.
    pub fn solve_complex(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        assert_eq!(b.len(), self.n);
        let mut rhs = Mat::<f64>::from_fn(self.n, 2, |i, j| if j == 0 { b[i].re } else { b[i].im });
        self.llt.solve_in_place(rhs.as_mut());
        let x: Vec<Complex64> = (0..self.n).map(|i| Complex64::new(rhs[(i, 0)], rhs[(i, 1)])).collect();
        check_finite(&x)?;
        Ok(x)
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(b.len(), self.n);
        let mut rhs = Mat::<f64>::from_fn(self.n, 1, |i, _| b[i]);
        self.llt.solve_in_place(rhs.as_mut());
        let x: Vec<f64> = (0..self.n).map(|i| rhs[(i, 0)]).collect();
        if let Some(i) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSolution(i));
        }
        Ok(x)
    }

    /// Solves `A X = B` for every column of the sparse `B` and returns the
    /// requested rows of `X`, column by column. Blocks of columns are solved
    /// in parallel; only the selected rows of each block are kept.
    pub fn solve_columns(&self, b: &CsrMatrix, rows: &[usize]) -> Result<Vec<Vec<f64>>> {
        assert_eq!(b.nrows(), self.n);
        let ncols = b.ncols();
        let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); ncols];
        for (r, c, v) in b.iter() {
            entries[c].push((r, v));
        }
        let blocks: Vec<Result<Vec<Vec<f64>>>> = entries
            .par_chunks(RHS_BLOCK)
            .map(|chunk| {
                let mut rhs = Mat::<f64>::zeros(self.n, chunk.len());
                for (j, col) in chunk.iter().enumerate() {
                    for &(r, v) in col {
                        rhs[(r, j)] = v;
                    }
                }
                self.llt.solve_in_place(rhs.as_mut());
                (0..chunk.len())
                    .map(|j| {
                        let x: Vec<f64> = rows.iter().map(|&i| rhs[(i, j)]).collect();
                        match x.iter().position(|v| !v.is_finite()) {
                            Some(i) => Err(Error::NonFiniteSolution(rows[i])),
                            None => Ok(x),
                        }
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::with_capacity(ncols);
        for block in blocks {
            out.extend(block?);
        }
        Ok(out)
    }
}

fn check_finite(x: &[Complex64]) -> Result<()> {
    match x.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
        Some(i) => Err(Error::NonFiniteSolution(i)),
        None => Ok(()),
    }
}
