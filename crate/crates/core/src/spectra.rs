//! Observables, branch ensembles, states and the entropy primitives shared by every measure.
//!
//! All matrices live in the eigenbasis of the reference observable `A`, with basis
//! index `ℓ` standing for the eigenvector `|A_ℓ⟩`. Entropies are in bits.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{domain, MacromicError, Result};
use crate::linalg::{self, c, CMatrix, CVector, EIGEN_FLOOR};

const NORM_TOL: f64 = 1e-12;

/// Non-degenerate spectrum of the reference observable, stored ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSpectrum {
    eigenvalues: Vec<f64>,
}

impl ObservableSpectrum {
    pub fn new(eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return domain("spectrum must contain at least one eigenvalue");
        }
        if eigenvalues.iter().any(|a| !a.is_finite()) {
            return domain("spectrum contains a non-finite eigenvalue");
        }
        if eigenvalues.windows(2).any(|w| w[1] <= w[0]) {
            return domain("spectrum must be strictly increasing (non-degenerate)");
        }
        Ok(ObservableSpectrum { eigenvalues })
    }

    /// `k + 1` equally spaced eigenvalues `ℓ·span/k` covering `[0, span]`.
    pub fn equally_spaced(k: usize, span: f64) -> Result<Self> {
        if k == 0 {
            return Self::new(vec![0.0]);
        }
        if span <= 0.0 || !span.is_finite() {
            return domain(format!("span must be positive, got {span}"));
        }
        Self::new((0..=k).map(|l| l as f64 * span / k as f64).collect())
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Distance between the extreme eigenvalues.
    pub fn span(&self) -> f64 {
        self.eigenvalues[self.len() - 1] - self.eigenvalues[0]
    }

    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return domain("scale factor must be positive");
        }
        Self::new(self.eigenvalues.iter().map(|a| a * alpha).collect())
    }

    /// `A` as a diagonal matrix.
    pub fn operator(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            self.len(),
            self.eigenvalues.iter().map(|&a| c(a, 0.0)),
        ))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if dim != self.len() {
            return Err(MacromicError::DimensionMismatch { expected: self.len(), found: dim });
        }
        Ok(())
    }
}

/// Weights `p_ℓ` attached to the eigenvalues of an observable.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchEnsemble {
    weights: Vec<f64>,
    spectrum: ObservableSpectrum,
}

impl BranchEnsemble {
    pub fn new(weights: Vec<f64>, spectrum: ObservableSpectrum) -> Result<Self> {
        spectrum.check_dim(weights.len())?;
        if weights.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return domain("branch weights must be non-negative");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return domain(format!("branch weights sum to {total}, expected 1"));
        }
        Ok(BranchEnsemble { weights, spectrum })
    }

    pub fn uniform(spectrum: ObservableSpectrum) -> Self {
        let n = spectrum.len();
        BranchEnsemble { weights: vec![1.0 / n as f64; n], spectrum }
    }

    /// Weights are read off the diagonal of `rho`.
    pub fn from_populations(rho: &DensityMatrix, spectrum: &ObservableSpectrum) -> Result<Self> {
        spectrum.check_dim(rho.dim())?;
        let mut weights = rho.populations();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|p| *p = p.max(0.0) / total);
        Ok(BranchEnsemble { weights, spectrum: spectrum.clone() })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn spectrum(&self) -> &ObservableSpectrum {
        &self.spectrum
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.pairs().map(|(p, a)| p * a).sum()
    }

    /// `V = Σ p a² − (Σ p a)²`, evaluated around the mean to avoid cancellation.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.pairs().map(|(p, a)| p * (a - m) * (a - m)).sum()
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(&self.weights).unwrap_or(0.0)
    }

    /// Same weights on the rescaled spectrum `αA`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Ok(BranchEnsemble { weights: self.weights.clone(), spectrum: self.spectrum.scaled(alpha)? })
    }

    /// `(p_ℓ, a_ℓ)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.weights.iter().copied().zip(self.spectrum.eigenvalues().iter().copied())
    }
}

/// Normalized pure state in the `A` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return domain(format!("state has squared norm {norm2}, expected 1"));
        }
        Ok(PureState { amplitudes })
    }

    /// Normalizes a non-zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return domain("cannot normalize a zero vector");
        }
        Ok(PureState { amplitudes: amplitudes.unscale(norm) })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// `|c_ℓ|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// The branch ensemble this state induces on `spectrum`.
    pub fn ensemble(&self, spectrum: &ObservableSpectrum) -> Result<BranchEnsemble> {
        spectrum.check_dim(self.dim())?;
        let mut weights = self.probabilities();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|p| *p /= total);
        Ok(BranchEnsemble { weights, spectrum: spectrum.clone() })
    }
}

/// Hermitian, positive semi-definite, unit-trace matrix in the `A` eigenbasis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return domain("density matrix must be square and non-empty");
        }
        let defect = linalg::hermiticity_defect(&entries);
        if defect > NORM_TOL {
            return domain(format!("matrix is not Hermitian (defect {defect:e})"));
        }
        let tr = linalg::trace(&entries);
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return domain(format!("trace is {tr}, expected 1"));
        }
        let lowest = linalg::eigvalsh(&entries)[0];
        if lowest < -EIGEN_FLOOR {
            return domain(format!("matrix has negative eigenvalue {lowest:e}"));
        }
        Ok(DensityMatrix { entries: linalg::hermitian_part(&entries) })
    }

    /// Wraps a matrix produced by a trace-preserving map; only Hermiticity is enforced.
    pub(crate) fn from_channel_output(entries: CMatrix) -> Self {
        DensityMatrix { entries: linalg::hermitian_part(&entries) }
    }

    pub fn from_pure(state: &PureState) -> Self {
        let v = state.amplitudes();
        DensityMatrix { entries: v * v.adjoint() }
    }

    /// `diag(weights)`.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(CMatrix::from_diagonal(&CVector::from_iterator(
            weights.len(),
            weights.iter().map(|&p| c(p, 0.0)),
        )))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { entries: CMatrix::identity(dim, dim).unscale(dim as f64) }
    }

    /// Qubit state `(1 + xσx + yσy + zσz)/2` from a Bloch vector.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        if x * x + y * y + z * z > 1.0 + NORM_TOL {
            return domain("Bloch vector lies outside the unit ball");
        }
        Self::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5 * (1.0 + z), 0.0), c(0.5 * x, -0.5 * y), c(0.5 * x, 0.5 * y), c(0.5 * (1.0 - z), 0.0)],
        ))
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Real diagonal `ρ_ℓℓ`.
    pub fn populations(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.entries)
    }

    /// Number of eigenvalues above the clipping floor.
    pub fn rank(&self) -> usize {
        self.eigenvalues().iter().filter(|&&l| l > EIGEN_FLOOR).count()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// `λρ + (1−λ)σ`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<Self> {
        if other.dim() != self.dim() {
            return Err(MacromicError::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        if !(0.0..=1.0).contains(&lambda) {
            return domain("mixing weight must lie in [0, 1]");
        }
        Ok(DensityMatrix {
            entries: self.entries.scale(lambda) + other.entries.scale(1.0 - lambda),
        })
    }

    /// `⟨A⟩ = tr ρA`.
    pub fn expectation(&self, spectrum: &ObservableSpectrum) -> Result<f64> {
        spectrum.check_dim(self.dim())?;
        Ok(self.populations().iter().zip(spectrum.eigenvalues()).map(|(p, a)| p * a).sum())
    }

    /// Largest entrywise distance to another state.
    pub fn max_entry_distance(&self, other: &DensityMatrix) -> f64 {
        linalg::max_abs_diff(&self.entries, &other.entries)
    }
}

/// `Σ √p_ℓ |ℓ⟩_m |A_ℓ⟩_M`: a register entangled with the macroscopic branches.
#[derive(Debug, Clone, PartialEq)]
pub struct MicroMacroState {
    ensemble: BranchEnsemble,
}

impl MicroMacroState {
    pub fn new(weights: Vec<f64>, spectrum: ObservableSpectrum) -> Result<Self> {
        Ok(MicroMacroState { ensemble: BranchEnsemble::new(weights, spectrum)? })
    }

    pub fn from_ensemble(ensemble: BranchEnsemble) -> Self {
        MicroMacroState { ensemble }
    }

    pub fn ensemble(&self) -> &BranchEnsemble {
        &self.ensemble
    }

    pub fn weights(&self) -> &[f64] {
        self.ensemble.weights()
    }

    pub fn spectrum(&self) -> &ObservableSpectrum {
        self.ensemble.spectrum()
    }

    pub fn branches(&self) -> usize {
        self.ensemble.len()
    }

    /// `|Ψ⟩⟨Ψ|` of `Σ √p_ℓ |A_ℓ⟩` in the branch basis. Because the state is
    /// maximally correlated, its coherence structure is that of this matrix.
    pub fn branch_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&superposition_state(&self.ensemble))
    }

    /// Full bipartite state on `m ⊗ M` (register index major).
    pub fn joint_state(&self) -> DensityMatrix {
        let d = self.branches();
        let mut v = CVector::zeros(d * d);
        for (l, &p) in self.weights().iter().enumerate() {
            v[l * d + l] = c(p.sqrt(), 0.0);
        }
        DensityMatrix { entries: &v * v.adjoint() }
    }
}

/// Shannon entropy `−Σ p log₂ p` with `0·log 0 = 0`.
///
/// Sub-normalized vectors (conditional slices) are accepted as given.
pub fn shannon_entropy(probs: &[f64]) -> Result<f64> {
    if let Some(p) = probs.iter().find(|&&p| p < -1e-12 || p.is_nan()) {
        return domain(format!("probability {p} is negative"));
    }
    let total: f64 = probs.iter().filter(|&&p| p > 0.0).sum();
    if total > 1.0 + 1e-9 {
        return domain(format!("probabilities sum to {total} > 1"));
    }
    Ok(linalg::entropy_bits(probs))
}

/// Shannon entropy after renormalizing a non-negative vector.
pub fn shannon_entropy_normalized(weights: &[f64]) -> Result<f64> {
    let total: f64 = weights.iter().filter(|&&p| p > 0.0).sum();
    if !(total > 0.0) {
        return domain("weights have zero total mass");
    }
    let probs: Vec<f64> = weights.iter().map(|p| p / total).collect();
    shannon_entropy(&probs)
}

/// `S(ρ) = −tr ρ log₂ ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    linalg::entropy_bits(&rho.eigenvalues())
}

/// Entropy of an arbitrary matrix that is expected to be a state.
pub fn hermitian_entropy(m: &CMatrix) -> Result<f64> {
    let defect = linalg::hermiticity_defect(m);
    if defect > NORM_TOL {
        return domain(format!("matrix is not Hermitian (defect {defect:e})"));
    }
    Ok(linalg::entropy_bits(&linalg::eigvalsh(m)))
}

/// `Σ √p_ℓ |A_ℓ⟩`.
pub fn superposition_state(ens: &BranchEnsemble) -> PureState {
    let amps = DVector::from_iterator(ens.len(), ens.weights().iter().map(|&p| Complex64::new(p.sqrt(), 0.0)));
    PureState { amplitudes: amps }
}

/// `𝒢(ρ) = Σ |A_ℓ⟩⟨A_ℓ| ρ |A_ℓ⟩⟨A_ℓ|`: the diagonal of ρ.
pub fn dephase_fully(rho: &DensityMatrix) -> DensityMatrix {
    let diag = CMatrix::from_diagonal(&rho.entries.diagonal());
    DensityMatrix { entries: diag }
}
