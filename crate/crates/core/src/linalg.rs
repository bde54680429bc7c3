//! Thin safe wrappers over the LAPACK routines used in this crate.
//!
//! Matrices are dense, column-major `Vec<Complex64>` of size `n * n`.

use std::os::raw::c_char;

use lapack_sys::{zgecon_, zgeev_, zgetrf_, zgetrs_, zggev_, zlange_, zpotrf_, ztrtri_};
use num_complex::Complex64;

use crate::error::{Error, Result};

const N: c_char = b'N' as c_char;
const L: c_char = b'L' as c_char;

/// Dense column-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[j * self.n + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[j * self.n + i]
    }
}

fn dim(n: usize) -> i32 {
    i32::try_from(n).expect("matrix dimension fits in a LAPACK integer")
}

/// Eigenvalues of a general complex matrix (balanced QR, `zgeev`).
pub fn eigenvalues(mut a: CMatrix) -> Result<Vec<Complex64>> {
    let n = dim(a.n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut w = vec![Complex64::new(0.0, 0.0); a.n];
    let mut dummy = [Complex64::new(0.0, 0.0); 1];
    let mut dummy2 = [Complex64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0; 2 * a.n];
    let mut info = 0;
    // workspace query
    let mut query = [Complex64::new(0.0, 0.0); 1];
    let lwork = -1;
    unsafe {
        zgeev_(
            &N,
            &N,
            &n,
            a.data.as_mut_ptr() as _,
            &n,
            w.as_mut_ptr() as _,
            dummy.as_mut_ptr() as _,
            &1,
            dummy2.as_mut_ptr() as _,
            &1,
            query.as_mut_ptr() as _,
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let lwork = (query[0].re as i32).max(2 * n);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zgeev_(
            &N,
            &N,
            &n,
            a.data.as_mut_ptr() as _,
            &n,
            w.as_mut_ptr() as _,
            dummy.as_mut_ptr() as _,
            &1,
            dummy2.as_mut_ptr() as _,
            &1,
            work.as_mut_ptr() as _,
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    Ok(w)
}

/// Generalized eigenvalues of the pencil `A - λB` as `(alpha, beta)` pairs,
/// `λ = alpha / beta` (QZ, `zggev`). Infinite eigenvalues have `beta ≈ 0`.
pub fn generalized_eigenvalues(
    mut a: CMatrix,
    mut b: CMatrix,
) -> Result<Vec<(Complex64, Complex64)>> {
    assert_eq!(a.n, b.n, "pencil matrices must have equal size");
    let n = dim(a.n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut alpha = vec![Complex64::new(0.0, 0.0); a.n];
    let mut beta = vec![Complex64::new(0.0, 0.0); a.n];
    let mut dummy = [Complex64::new(0.0, 0.0); 1];
    let mut dummy2 = [Complex64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0; 8 * a.n];
    let mut info = 0;
    let mut query = [Complex64::new(0.0, 0.0); 1];
    unsafe {
        zggev_(
            &N,
            &N,
            &n,
            a.data.as_mut_ptr() as _,
            &n,
            b.data.as_mut_ptr() as _,
            &n,
            alpha.as_mut_ptr() as _,
            beta.as_mut_ptr() as _,
            dummy.as_mut_ptr() as _,
            &1,
            dummy2.as_mut_ptr() as _,
            &1,
            query.as_mut_ptr() as _,
            &-1,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    let lwork = (query[0].re as i32).max(2 * n);
    let mut work = vec![Complex64::new(0.0, 0.0); lwork as usize];
    unsafe {
        zggev_(
            &N,
            &N,
            &n,
            a.data.as_mut_ptr() as _,
            &n,
            b.data.as_mut_ptr() as _,
            &n,
            alpha.as_mut_ptr() as _,
            beta.as_mut_ptr() as _,
            dummy.as_mut_ptr() as _,
            &1,
            dummy2.as_mut_ptr() as _,
            &1,
            work.as_mut_ptr() as _,
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(Error::Eigensolver(info));
    }
    Ok(alpha.into_iter().zip(beta).collect())
}

/// Lower Cholesky factor `L` of a Hermitian positive definite matrix, with
/// no pivoting. On failure reports the offending (0-based) pivot.
pub fn cholesky_lower(mut a: CMatrix) -> Result<CMatrix> {
    let n = dim(a.n);
    let mut info = 0;
    unsafe {
        zpotrf_(&L, &n, a.data.as_mut_ptr() as _, &n, &mut info);
    }
    if info > 0 {
        let k = (info - 1) as usize;
        return Err(Error::NotPositiveDefinite {
            pivot: k,
            value: a[(k, k)].re,
        });
    }
    if info < 0 {
        return Err(Error::InvalidArgument(format!("zpotrf argument {}", -info)));
    }
    for j in 0..a.n {
        for i in 0..j {
            a[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(a)
}

/// Inverse of a lower-triangular matrix.
pub fn invert_lower(mut l: CMatrix) -> Result<CMatrix> {
    let n = dim(l.n);
    let mut info = 0;
    unsafe {
        ztrtri_(&L, &N, &n, l.data.as_mut_ptr() as _, &n, &mut info);
    }
    if info != 0 {
        return Err(Error::InvalidArgument(format!("singular triangular factor ({info})")));
    }
    Ok(l)
}

/// LU factorization with partial pivoting (`zgetrf`).
#[derive(Clone, Debug)]
pub struct LuFactor {
    lu: CMatrix,
    ipiv: Vec<i32>,
    anorm: f64,
}

impl LuFactor {
    /// Factorizes `a`; `None` if an exact zero pivot occurs.
    pub fn new(mut a: CMatrix) -> Option<Self> {
        let n = dim(a.n);
        let one: c_char = b'1' as c_char;
        let mut rwork = vec![0.0; a.n];
        let anorm = unsafe { zlange_(&one, &n, &n, a.data.as_ptr() as _, &n, rwork.as_mut_ptr()) };
        let mut ipiv = vec![0i32; a.n];
        let mut info = 0;
        unsafe {
            zgetrf_(&n, &n, a.data.as_mut_ptr() as _, &n, ipiv.as_mut_ptr(), &mut info);
        }
        (info == 0).then_some(LuFactor { lu: a, ipiv, anorm })
    }

    /// Reciprocal 1-norm condition number estimate (`zgecon`).
    pub fn rcond(&self) -> f64 {
        let n = dim(self.lu.n);
        let one: c_char = b'1' as c_char;
        let mut work = vec![Complex64::new(0.0, 0.0); 2 * self.lu.n];
        let mut rwork = vec![0.0; 2 * self.lu.n];
        let mut rcond = 0.0;
        let mut info = 0;
        unsafe {
            zgecon_(
                &one,
                &n,
                self.lu.data.as_ptr() as _,
                &n,
                &self.anorm,
                &mut rcond,
                work.as_mut_ptr() as _,
                rwork.as_mut_ptr(),
                &mut info,
            );
        }
        if info == 0 {
            rcond
        } else {
            0.0
        }
    }

    /// Overwrites the column-major `n x ncols` block `b` with `A^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [Complex64], ncols: usize) -> Result<()> {
        let n = dim(self.lu.n);
        assert_eq!(b.len(), self.lu.n * ncols);
        let nrhs = dim(ncols);
        let mut info = 0;
        unsafe {
            zgetrs_(
                &N,
                &n,
                &nrhs,
                self.lu.data.as_ptr() as _,
                &n,
                self.ipiv.as_ptr(),
                b.as_mut_ptr() as _,
                &n,
                &mut info,
            );
        }
        if info != 0 {
            return Err(Error::InvalidArgument(format!("zgetrs argument {}", -info)));
        }
        Ok(())
    }
}
