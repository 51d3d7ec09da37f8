//! Quantum Fisher information of a state for the generator `A`, and the size bound it implies.

use std::f64::consts::LN_2;

use crate::error::Result;
use crate::linalg::{self, EIGEN_FLOOR};
use crate::spectra::{DensityMatrix, ObservableSpectrum, PureState};

/// `ℱ = 2 Σ_{λ_i+λ_j>0} (λ_i − λ_j)²/(λ_i + λ_j) |⟨i|A|j⟩|²`.
pub fn quantum_fisher_information(rho: &DensityMatrix, spectrum: &ObservableSpectrum) -> Result<f64> {
    spectrum.check_dim(rho.dim())?;
    let (values, vectors) = linalg::eigh(rho.entries());
    let a_in_eigenbasis = vectors.adjoint() * spectrum.operator() * &vectors;
    let mut f = 0.0;
    for (i, &li) in values.iter().enumerate() {
        for (j, &lj) in values.iter().enumerate() {
            let (li, lj) = (li.max(0.0), lj.max(0.0));
            if li + lj > EIGEN_FLOOR {
                f += (li - lj).powi(2) / (li + lj) * a_in_eigenbasis[(i, j)].norm_sqr();
            }
        }
    }
    Ok(2.0 * f)
}

/// `V(Ψ, A) = ⟨A²⟩ − ⟨A⟩²`.
pub fn pure_variance(state: &PureState, spectrum: &ObservableSpectrum) -> Result<f64> {
    Ok(state.ensemble(spectrum)?.variance())
}

/// `√(ℱ/((8 ln 2) b))`: largest size compatible with the Fisher information for target `b`.
pub fn qfi_size_bound(fisher: f64, b: f64) -> f64 {
    (fisher / (8.0 * LN_2 * b)).sqrt()
}
