//! Small dense complex matrices used as algebra coefficients.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Mul};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;

/// Square `dim × dim` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Matrix unit `E_{row,col}`.
    pub fn unit(dim: usize, row: usize, col: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        m.data[row * dim + col] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn from_row_major(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "matrix data has wrong length");
        CMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let n = self.dim;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            y[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// Operator (spectral) norm.
    ///
    /// Closed form for `dim ≤ 2`; otherwise `tr((M*M)^{2^k})^{1/2^k}` after
    /// 48 squarings, which bounds the top eigenvalue from above.
    pub fn op_norm(&self) -> f64 {
        match self.dim {
            0 => 0.0,
            1 => self.data[0].norm(),
            2 => op_norm_2x2([self.data[0], self.data[1], self.data[2], self.data[3]]),
            _ => top_eigenvalue_upper(&(self.adjoint() * self)).max(0.0).sqrt(),
        }
    }
}

/// Spectral norm of `[[m0, m1], [m2, m3]]` from the Gram matrix eigenvalues.
pub fn op_norm_2x2(m: [Complex64; 4]) -> f64 {
    let p = m[0].norm_sqr() + m[2].norm_sqr();
    let s = m[1].norm_sqr() + m[3].norm_sqr();
    let q = m[0].conj() * m[1] + m[2].conj() * m[3];
    let half = 0.5 * (p - s);
    let top = 0.5 * (p + s) + (half * half + q.norm_sqr()).sqrt();
    top.max(0.0).sqrt()
}

/// Upper estimate of the largest eigenvalue of a positive semidefinite
/// Hermitian matrix by normalized repeated squaring.
pub fn top_eigenvalue_upper(g: &CMatrix) -> f64 {
    let t0 = g.trace().re;
    if t0 <= 0.0 {
        return 0.0;
    }
    let mut a = g.scale(Complex64::new(1.0 / t0, 0.0));
    let mut log_scale = t0.ln();
    let mut power = 1.0f64;
    for _ in 0..48 {
        let sq = &a * &a;
        let t = sq.trace().re;
        if t <= 0.0 {
            break;
        }
        a = sq.scale(Complex64::new(1.0 / t, 0.0));
        log_scale = 2.0 * log_scale + t.ln();
        power *= 2.0;
    }
    (log_scale / power).exp()
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

impl Mul<&CMatrix> for CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        &self * rhs
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&CMatrix> for CMatrix {
    fn add_assign(&mut self, rhs: &CMatrix) {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}
