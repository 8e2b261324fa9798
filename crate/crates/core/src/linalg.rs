//! Small dense complex linear algebra helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// ‖M†M − I‖_F.
pub fn unitarity_residual(m: &CMat) -> f64 {
    let n = m.ncols();
    frobenius(&(m.adjoint() * m - CMat::identity(n, n)))
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    frobenius(&(m - m.adjoint()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

/// Eigendecomposition of a Hermitian matrix, reusable for exp(−itH) at many t.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEig {
    pub fn new(h: &CMat) -> Self {
        let d = h.nrows();
        if d == 0 {
            return HermitianEig { values: vec![], vectors: CMat::zeros(0, 0) };
        }
        if d == 1 {
            return HermitianEig { values: vec![h[(0, 0)].re], vectors: CMat::identity(1, 1) };
        }
        let e = SymmetricEigen::new(h.clone());
        HermitianEig { values: e.eigenvalues.iter().copied().collect(), vectors: e.eigenvectors }
    }

    /// exp(−i t H).
    pub fn evolve(&self, t: f64) -> CMat {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for (col, &lam) in self.values.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -t * lam);
            for row in 0..d {
                scaled[(row, col)] *= ph;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// exp(−i t H) for Hermitian H.
pub fn expm_herm(h: &CMat, t: f64) -> CMat {
    HermitianEig::new(h).evolve(t)
}

/// Diagonal matrix from real entries.
pub fn diag_real(values: &[f64]) -> CMat {
    let d = values.len();
    CMat::from_fn(d, d, |r, col| if r == col { c(values[r]) } else { Complex64::new(0.0, 0.0) })
}

/// Wrap an angle into [−π, π).
pub fn wrap_pi(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let y = (x + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if y >= std::f64::consts::PI { y - two_pi } else { y }
}

/// Determinant of a small complex matrix (LU).
pub fn det(m: &CMat) -> Complex64 {
    if m.nrows() == 0 {
        return c(1.0);
    }
    m.clone().determinant()
}
