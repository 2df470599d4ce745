//! Dense complex linear algebra used across the crate.
//!
//! Eigendecompositions and LU factorisations are delegated to `faer`; the
//! small helpers here (Kronecker products, matrix exponential, tiny pivoted
//! solves) are what the physics modules actually call.

use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, MatRef, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> Mat<C64> {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn kron(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Mat<C64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    let mut out = Mat::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn scale(a: MatRef<'_, C64>, s: C64) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn frobenius(a: MatRef<'_, C64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            acc += a[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn max_abs(a: MatRef<'_, C64>) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Induced 1-norm (max column sum).
pub fn norm1(a: MatRef<'_, C64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn is_hermitian(a: MatRef<'_, C64>, tol: f64) -> bool {
    let n = a.nrows();
    let scale = max_abs(a).max(1.0);
    for i in 0..n {
        for j in i..n {
            if (a[(i, j)] - a[(j, i)].conj()).norm() > tol * scale {
                return false;
            }
        }
    }
    true
}

pub fn submatrix(a: MatRef<'_, C64>, rows: &[usize], cols: &[usize]) -> Mat<C64> {
    Mat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

pub fn matvec(a: MatRef<'_, C64>, v: &[C64]) -> Vec<C64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum())
        .collect()
}

/// General eigendecomposition `A = R diag(w) R^{-1}`; columns of `R` are
/// normalised to unit 2-norm.
pub fn eig(a: MatRef<'_, C64>) -> Result<(Vec<C64>, Mat<C64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let e = a
        .to_owned()
        .eigen()
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let w: Vec<C64> = e.S().column_vector().iter().copied().collect();
    let u = e.U();
    let mut r = Mat::zeros(n, n);
    for j in 0..n {
        let nrm = (0..n).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        let nrm = if nrm > 0.0 { nrm } else { 1.0 };
        for i in 0..n {
            r[(i, j)] = u[(i, j)] / nrm;
        }
    }
    Ok((w, r))
}

/// Hermitian eigendecomposition with ascending real eigenvalues and an
/// orthonormal eigenbasis.
pub fn eigh(a: MatRef<'_, C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), Mat::zeros(0, 0)));
    }
    let e = a
        .to_owned()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("hermitian eigendecomposition failed: {e:?}")))?;
    let w: Vec<f64> = e.S().column_vector().iter().map(|z| z.re).collect();
    Ok((w, e.U().to_owned()))
}

pub fn inverse(a: MatRef<'_, C64>) -> Mat<C64> {
    a.to_owned().partial_piv_lu().inverse()
}

/// `f(A)` for Hermitian `A`, evaluated through its eigenbasis.
pub fn hermitian_function(a: MatRef<'_, C64>, f: impl Fn(f64) -> C64) -> Result<Mat<C64>> {
    let (w, u) = eigh(a)?;
    let n = w.len();
    let mut fu = Mat::zeros(n, n);
    for j in 0..n {
        let fj = f(w[j]);
        for i in 0..n {
            fu[(i, j)] = u[(i, j)] * fj;
        }
    }
    Ok(&fu * u.adjoint())
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: MatRef<'_, C64>) -> Mat<C64> {
    let n = a.nrows();
    let nrm = norm1(a);
    let squarings = if nrm > 0.25 {
        (nrm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = scale(a, c(0.5f64.powi(squarings as i32)));
    let mut sum = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = scale((&term * &scaled).as_ref(), c(1.0 / k as f64));
        sum = &sum + &term;
        if max_abs(term.as_ref()) < 1e-18 * max_abs(sum.as_ref()).max(1.0) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Solves a small dense system with partial pivoting. Returns `None` for a
/// numerically singular matrix.
pub fn solve_small(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Option<Vec<C64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))?;
        if a[piv][col].norm() <= 1e-300_f64.max(1e-15 * scale) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == ZERO {
                continue;
            }
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![ZERO; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}
