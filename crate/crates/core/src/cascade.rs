//! End-to-end channel through the lens: `H = H_suᴴ U Υ U H_bs + H_buᴴ`.

use crate::channel::{ChannelSet, DftOperator};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::matching::MatchingMatrix;
use alloc::format;

/// Precomputed beam-domain factors `L = H_suᴴU` (M×K), `R = UH_bs` (K×N) and the direct
/// term `D = H_buᴴ` (M×N), so that `H(Υ) = L Υ R + D` costs one row gather and one product.
#[derive(Debug, Clone)]
pub struct LensCascade {
    pub left: CMatrix,
    pub right: CMatrix,
    pub direct: CMatrix,
}

impl LensCascade {
    pub fn new(channels: &ChannelSet, dft: &DftOperator) -> Result<Self> {
        let (k, _, _) = channels.dims()?;
        if dft.size() != k {
            return Err(Error::DimensionMismatch(format!(
                "DFT operator has size {}, channels have {k} ports",
                dft.size()
            )));
        }
        let u = dft.matrix();
        Ok(Self {
            left: channels.h_su.adjoint() * u,
            right: u * &channels.h_bs,
            direct: channels.h_bu.adjoint(),
        })
    }

    pub fn ports(&self) -> usize {
        self.left.ncols()
    }

    pub fn users(&self) -> usize {
        self.left.nrows()
    }

    pub fn tx_width(&self) -> usize {
        self.right.ncols()
    }

    pub fn effective(&self, matching: &MatchingMatrix) -> CMatrix {
        &self.left * matching.apply_left(&self.right) + &self.direct
    }
}

/// `H_suᴴ U Υ U H_bs + H_buᴴ`.
pub fn effective_channel(
    channels: &ChannelSet,
    dft: &DftOperator,
    matching: &MatchingMatrix,
) -> Result<CMatrix> {
    let cascade = LensCascade::new(channels, dft)?;
    if matching.size() != cascade.ports() {
        return Err(Error::DimensionMismatch(format!(
            "matching has {} ports, channels have {}",
            matching.size(),
            cascade.ports()
        )));
    }
    Ok(cascade.effective(matching))
}
