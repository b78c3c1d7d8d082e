//! Small dense-matrix helpers: complex products with real matrices, pattern
//! connectivity, and power iterations for nonnegative matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `A x` for a real matrix and a complex vector. Columns are accumulated in
/// order, so the result does not depend on threading.
pub fn mul_complex(a: &DMatrix<f64>, x: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), x.len());
    let mut y = vec![Complex64::new(0.0, 0.0); a.nrows()];
    for (j, xj) in x.iter().enumerate() {
        for (yi, &aij) in y.iter_mut().zip(a.column(j).iter()) {
            *yi += xj * aij;
        }
    }
    y
}

/// `x^T A` for a real matrix and a real vector.
pub fn left_mul(x: &[f64], a: &DMatrix<f64>) -> Vec<f64> {
    assert_eq!(a.nrows(), x.len());
    (0..a.ncols()).map(|j| a.column(j).iter().zip(x).map(|(v, w)| v * w).sum()).collect()
}

/// Whether the directed graph with an edge `i -> j` for every positive
/// entry `A[i, j]` is strongly connected.
pub fn is_irreducible(a: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let v = if forward { a[(i, j)] } else { a[(j, i)] };
                if v > 0.0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

#[derive(Debug, Clone)]
pub struct PerronVector {
    /// Left eigenvector, normalized to unit 1-norm.
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `max_i |(q^T A)_i - q_i|`.
    pub residual: f64,
}

/// Left eigenvector of a nonnegative irreducible matrix with Perron root 1,
/// by power iteration on `q <- q^T A` with 1-norm normalization from the
/// uniform start. Matrices with zero entries are iterated as `(A + I) / 2`
/// so imprimitive patterns still converge.
pub fn left_perron_vector(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<PerronVector> {
    let n = a.nrows();
    let shift = a.iter().any(|&v| v <= 0.0);
    let mut q = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let aq = left_mul(&q, a);
        residual = aq.iter().zip(&q).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if residual < tol {
            return Ok(PerronVector { vector: q, iterations: it - 1, residual });
        }
        let next: Vec<f64> = if shift { aq.iter().zip(&q).map(|(x, y)| 0.5 * (x + y)).collect() } else { aq };
        let s: f64 = next.iter().map(|v| v.abs()).sum();
        q = next.into_iter().map(|v| v / s).collect();
    }
    Err(Error::PowerIteration { what: "left Perron vector", iterations: max_iter, residual })
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralRadius {
    pub value: f64,
    /// Collatz–Wielandt bracket `[min_i (Ax)_i / x_i, max_i (Ax)_i / x_i]`.
    pub lower: f64,
    pub upper: f64,
    pub iterations: usize,
}

/// Spectral radius of a nonnegative square matrix by power iteration, stopped
/// when the Collatz–Wielandt bracket is narrower than `tol` relative to its
/// upper end. The identity shift is used when the matrix has zero entries.
pub fn spectral_radius_nonnegative(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<SpectralRadius> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    if n == 0 {
        return Ok(SpectralRadius { value: 0.0, lower: 0.0, upper: 0.0, iterations: 0 });
    }
    let shift = if a.iter().any(|&v| v <= 0.0) { 1.0 } else { 0.0 };
    let mut x = nalgebra::DVector::from_element(n, 1.0 / n as f64);
    let mut width = f64::INFINITY;
    for it in 1..=max_iter {
        let mut y = a * &x;
        y += &x * shift;
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (yi, xi) in y.iter().zip(x.iter()) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let (lo, hi) = (lo - shift, hi - shift);
        width = hi - lo;
        if hi <= 0.0 {
            return Ok(SpectralRadius { value: 0.0, lower: 0.0, upper: 0.0, iterations: it });
        }
        if width <= tol * hi {
            return Ok(SpectralRadius { value: 0.5 * (lo + hi), lower: lo.max(0.0), upper: hi, iterations: it });
        }
        let s = y.iter().sum::<f64>();
        x = y / s;
    }
    Err(Error::PowerIteration { what: "spectral radius", iterations: max_iter, residual: width })
}

/// Largest eigenvalue modulus from a dense Schur decomposition.
pub fn dense_spectral_radius(a: &DMatrix<f64>) -> f64 {
    a.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}
