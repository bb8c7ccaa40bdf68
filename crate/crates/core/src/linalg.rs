//! Complex matrix aliases and the handful of dense helpers shared by the optimizers.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn cis(phase: f64) -> C64 {
    Complex::new(libm::cos(phase), libm::sin(phase))
}

/// Squared Frobenius norm.
pub fn frob2(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Promotes a real matrix to complex.
pub fn to_complex(m: &RMatrix) -> CMatrix {
    m.map(|x| Complex::new(x, 0.0))
}

/// Trace of a complex square matrix, real part only.
pub fn trace_re(m: &CMatrix) -> f64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)].re).sum()
}
