//! Pure-state decompositions of mixed states and the POVM ↔ ensemble correspondence.

use crate::error::{domain, MacromicError, Result};
use crate::linalg::{self, CMatrix};
use crate::spectra::{DensityMatrix, PureState};

const POVM_TOL: f64 = 1e-10;

/// Weights `q_k` and pure states `|Ψ_k⟩` with `Σ q_k |Ψ_k⟩⟨Ψ_k| = ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleDecomposition {
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl EnsembleDecomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return domain("one weight per state, at least one state");
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(MacromicError::DimensionMismatch { expected: dim, found: s.dim() });
        }
        if weights.iter().any(|&q| !(q >= 0.0)) {
            return domain("ensemble weights must be non-negative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return domain(format!("ensemble weights sum to {total}"));
        }
        Ok(EnsembleDecomposition { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `Σ q_k |Ψ_k⟩⟨Ψ_k|`.
    pub fn mixture(&self) -> CMatrix {
        let d = self.states[0].dim();
        self.weights.iter().zip(&self.states).fold(CMatrix::zeros(d, d), |acc, (q, s)| {
            let v = s.amplitudes();
            acc + (v * v.adjoint()).scale(*q)
        })
    }

    /// Largest entrywise deviation of the mixture from `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.mixture(), rho.entries())
    }

    /// `Σ q_k f(Ψ_k)`.
    pub fn average(&self, mut f: impl FnMut(&PureState) -> Result<f64>) -> Result<f64> {
        self.weights.iter().zip(&self.states).try_fold(0.0, |acc, (q, s)| Ok(acc + q * f(s)?))
    }
}

fn check_povm(povm: &[CMatrix], dim: usize) -> Result<()> {
    if povm.is_empty() {
        return domain("POVM must have at least one element");
    }
    let mut sum = CMatrix::zeros(dim, dim);
    for (i, e) in povm.iter().enumerate() {
        if e.shape() != (dim, dim) {
            return Err(MacromicError::DimensionMismatch { expected: dim, found: e.nrows() });
        }
        if linalg::hermiticity_defect(e) > POVM_TOL {
            return domain(format!("POVM element {i} is not Hermitian"));
        }
        if linalg::eigvalsh(e)[0] < -POVM_TOL {
            return domain(format!("POVM element {i} is not positive semi-definite"));
        }
        sum += e;
    }
    let defect = linalg::max_abs_diff(&sum, &CMatrix::identity(dim, dim));
    if defect > POVM_TOL {
        return domain(format!("POVM elements sum to identity only within {defect:e}"));
    }
    Ok(())
}

/// `ρ_i = √ρ E_i √ρ / tr(ρE_i)` with weights `tr(ρE_i)`. Zero-weight outcomes are dropped.
pub fn rho_distortion(rho: &DensityMatrix, povm: &[CMatrix]) -> Result<Vec<(f64, DensityMatrix)>> {
    check_povm(povm, rho.dim())?;
    let root = linalg::psd_sqrt(rho.entries());
    let mut out = Vec::with_capacity(povm.len());
    for e in povm {
        let m = &root * e * &root;
        let w = m.trace().re;
        if w > 1e-15 {
            out.push((w, DensityMatrix::from_channel_output(m.unscale(w))));
        }
    }
    Ok(out)
}

/// [`rho_distortion`] when every conditional state is pure (rank-one POVM elements, or a pure `ρ`).
pub fn rho_distortion_ensemble(rho: &DensityMatrix, povm: &[CMatrix]) -> Result<EnsembleDecomposition> {
    let parts = rho_distortion(rho, povm)?;
    let mut weights = Vec::with_capacity(parts.len());
    let mut states = Vec::with_capacity(parts.len());
    for (w, sigma) in parts {
        let (values, vectors) = linalg::eigh(sigma.entries());
        let top = values[values.len() - 1];
        if top < 1.0 - 1e-8 {
            return domain("a POVM element yields a mixed conditional state; rank-one elements are required");
        }
        weights.push(w);
        states.push(PureState::normalized(vectors.column(values.len() - 1).into_owned())?);
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|q| *q /= total);
    EnsembleDecomposition::new(weights, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVector};
    use crate::sampling;

    #[test]
    fn eigenprojectors_give_spectral_decomposition() {
        let rho = sampling::full_rank_state(&mut sampling::seeded(1), 3);
        let (values, vectors) = linalg::eigh(rho.entries());
        let povm: Vec<CMatrix> = (0..3).map(|i| {
            let v = vectors.column(i);
            v * v.adjoint()
        }).collect();
        let ens = rho_distortion_ensemble(&rho, &povm).unwrap();
        let mut w = ens.weights().to_vec();
        w.sort_by(f64::total_cmp);
        for (a, b) in w.iter().zip(&values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_povm_returns_rho() {
        let rho = sampling::full_rank_state(&mut sampling::seeded(2), 2);
        let parts = rho_distortion(&rho, &[CMatrix::identity(2, 2)]).unwrap();
        assert_eq!(parts.len(), 1);
        assert!(parts[0].1.max_entry_distance(&rho) < 1e-12);
        assert!(rho_distortion_ensemble(&rho, &[CMatrix::identity(2, 2)]).is_err());
    }

    #[test]
    fn random_rank_one_povm_reconstructs() {
        let mut rng = sampling::seeded(5);
        let rho = sampling::full_rank_state(&mut rng, 2);
        // Columns of a random 2×6 co-isometry give rank-one elements summing to identity.
        let g = sampling::ginibre(&mut rng, 6, 2);
        let v = &g * linalg::inv_sqrt(&(g.adjoint() * &g)).unwrap();
        let povm: Vec<CMatrix> = (0..6).map(|i| {
            let row: CVector = v.row(i).adjoint();
            &row * row.adjoint()
        }).collect();
        let ens = rho_distortion_ensemble(&rho, &povm).unwrap();
        assert_eq!(ens.len(), 6);
        assert!(ens.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn invalid_povms_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        let half = CMatrix::identity(2, 2).scale(0.5);
        assert!(rho_distortion(&rho, std::slice::from_ref(&half)).is_err());
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.5, 0.0), c(-0.5, 0.0)]));
        let rest = CMatrix::identity(2, 2) - &neg;
        assert!(rho_distortion(&rho, &[neg, rest]).is_err());
    }
}
