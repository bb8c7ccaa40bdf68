//! Closed-form MMSE precoder and receive scaling, per-user MMSE, and sum rate.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{Complex, SymmetricEigen};

use crate::cascade::effective_channel;
use crate::channel::{ChannelSet, DftOperator};
use crate::error::{Error, Result};
use crate::linalg::{frob2, CMatrix, CVector, C64};
use crate::matching::MatchingMatrix;

/// BS precoder `F` (N×M) with real receive scaling `α` and transmit power `P` (watts).
#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    pub f: CMatrix,
    pub alpha: f64,
    pub power: f64,
}

/// MMSE precoder for effective channel `h` (M×N):
///
/// `α = √(tr([HᴴH + (Mσ²/P)I]⁻² HᴴH) / P)`, `F = α⁻¹ (HᴴH + (Mσ²/P)I)⁻¹ Hᴴ`.
///
/// Evaluated in the M×M user domain through `(HᴴH + ρI)⁻¹Hᴴ = Hᴴ(HHᴴ + ρI)⁻¹`. With
/// `σ² > 0` the Gram matrix is inverted by Cholesky; with `σ² = 0` a pseudo-inverse from
/// the eigendecomposition of `HHᴴ` is used. When the channel carries no energy at all
/// (`α = 0`) the returned `F` spreads the power uniformly, which leaves the MSE at `M`.
pub fn mmse_precoder(h: &CMatrix, power: f64, noise_var: f64) -> Result<Precoder> {
    let (m, n) = h.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidDimension("empty effective channel".into()));
    }
    if !(power > 0.0) {
        return Err(Error::Domain(format!("transmit power {power} must be positive")));
    }
    if !(noise_var >= 0.0) {
        return Err(Error::Domain(format!("noise variance {noise_var} is negative")));
    }
    let rho = m as f64 * noise_var / power;
    let gram = h * h.adjoint();
    let g_inv = if rho > 0.0 {
        let shifted = &gram + CMatrix::identity(m, m) * Complex::new(rho, 0.0);
        match shifted.clone().cholesky() {
            Some(ch) => ch.inverse(),
            None => pseudo_inverse(&shifted)?,
        }
    } else {
        pseudo_inverse(&gram)?
    };
    let alpha2 = (&g_inv * &g_inv * &gram).trace().re / power;
    if !(alpha2 > 0.0) {
        return Ok(Precoder {
            f: CMatrix::from_element(n, m, Complex::new(libm::sqrt(power / (n * m) as f64), 0.0)),
            alpha: 0.0,
            power,
        });
    }
    let alpha = libm::sqrt(alpha2);
    let f = h.adjoint() * g_inv / Complex::new(alpha, 0.0);
    Ok(Precoder { f, alpha, power })
}

fn pseudo_inverse(herm: &CMatrix) -> Result<CMatrix> {
    let eig = SymmetricEigen::new(herm.clone());
    let max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    if !(max > 0.0) {
        return Err(Error::Singular(
            "effective channel is zero and the noise variance is zero".into(),
        ));
    }
    let tol = max * 1e-12 * herm.nrows() as f64;
    let inv_diag = eig.eigenvalues.map(|l| {
        if l > tol {
            Complex::new(1.0 / l, 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let q = &eig.eigenvectors;
    Ok(q * CMatrix::from_diagonal(&inv_diag) * q.adjoint())
}

/// `‖α H F − I‖²_F + M α² σ²` for an effective channel `h`.
pub fn mse_for_channel(h: &CMatrix, precoder: &Precoder, noise_var: f64) -> f64 {
    let m = h.nrows();
    let e = h * &precoder.f * Complex::new(precoder.alpha, 0.0) - CMatrix::identity(m, m);
    frob2(&e) + m as f64 * precoder.alpha * precoder.alpha * noise_var
}

/// Sum MSE of the single-cell system for switching matrix `matching`.
pub fn system_mse(
    channels: &ChannelSet,
    dft: &DftOperator,
    matching: &MatchingMatrix,
    precoder: &Precoder,
    noise_var: f64,
) -> Result<f64> {
    let h = effective_channel(channels, dft, matching)?;
    if precoder.f.shape() != (h.ncols(), h.nrows()) {
        return Err(Error::DimensionMismatch(format!(
            "precoder is {:?}, effective channel is {:?}",
            precoder.f.shape(),
            h.shape()
        )));
    }
    Ok(mse_for_channel(&h, precoder, noise_var))
}

/// Per-user MMSE `‖row_m(G) − e_mᵀ‖² + |α_m|²σ²` for a scaled gain `G` (M×M).
pub fn per_user_mmse(g: &CMatrix, alphas: &[C64], noise_var: f64) -> Result<Vec<f64>> {
    let m = g.nrows();
    if g.ncols() != m || alphas.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "gain is {:?} with {} scalings",
            g.shape(),
            alphas.len()
        )));
    }
    Ok((0..m)
        .map(|u| {
            let row: f64 = (0..m)
                .map(|j| {
                    let target = if j == u { 1.0 } else { 0.0 };
                    (g[(u, j)] - Complex::new(target, 0.0)).norm_sqr()
                })
                .sum();
            row + alphas[u].norm_sqr() * noise_var
        })
        .collect())
}

/// Per-user MMSE of the single-cell model: `G = αHF`, every user scaled by `α`.
pub fn single_cell_user_mmse(h: &CMatrix, precoder: &Precoder, noise_var: f64) -> Result<Vec<f64>> {
    let g = h * &precoder.f * Complex::new(precoder.alpha, 0.0);
    let alphas = alloc::vec![Complex::new(precoder.alpha, 0.0); h.nrows()];
    per_user_mmse(&g, &alphas, noise_var)
}

/// `log₂(1 / min(MMSE_m, 1))` for each user.
pub fn user_rates(mmse: &[f64]) -> Result<Vec<f64>> {
    mmse.iter()
        .map(|&e| {
            if !(e > 0.0) {
                Err(Error::Domain(format!("MMSE {e} must be positive")))
            } else {
                Ok(-libm::log2(e.min(1.0)))
            }
        })
        .collect()
}

/// Sum rate in bit/s/Hz, `Σ_m log₂(1 / min(MMSE_m, 1))`.
pub fn sum_rate(mmse: &[f64]) -> Result<f64> {
    Ok(user_rates(mmse)?.iter().sum())
}

/// Optimal complex receive scaling of user `m`: `α_m = v_m* / (‖v‖² + σ²)`.
pub fn receive_scaling_multicell(v: &CVector, m: usize, noise_var: f64) -> Result<C64> {
    if m >= v.len() {
        return Err(Error::DimensionMismatch(format!(
            "user index {m} out of range for {} users",
            v.len()
        )));
    }
    let denom = v.norm_squared() + noise_var;
    if !(denom > 0.0) {
        return Err(Error::Singular(
            "zero effective channel with zero noise variance".into(),
        ));
    }
    Ok(v[m].conj() / denom)
}

/// `‖α v − e_m‖² + σ²|α|²`, the per-user cost minimized by [`receive_scaling_multicell`].
pub fn multicell_user_cost(v: &CVector, m: usize, alpha: C64, noise_var: f64) -> f64 {
    let fit: f64 = v
        .iter()
        .enumerate()
        .map(|(j, vj)| {
            let target = if j == m { 1.0 } else { 0.0 };
            (alpha * vj - Complex::new(target, 0.0)).norm_sqr()
        })
        .sum();
    fit + noise_var * alpha.norm_sqr()
}
