//! Decay of micro–macro entanglement when the environment reads the macroscopic part.

use serde::Serialize;

use crate::error::{domain, MacromicError, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::pointers::{DephasingChannel, PointerModel};
use crate::quadrature;
use crate::roof::discrete_mutual_information;
use crate::spectra::{von_neumann_entropy, DensityMatrix, MicroMacroState, ObservableSpectrum};

pub use crate::discord::relative_entropy_coherence;

/// Default node count for discretized Gaussian pointers.
pub const DEFAULT_NODES: usize = 64;

/// Kraus operators `K_x` on the macroscopic system, written in the branch basis.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return domain("a channel needs at least one Kraus operator");
        };
        let d = first.nrows();
        if let Some(k) = operators.iter().find(|k| k.shape() != (d, d)) {
            return Err(MacromicError::DimensionMismatch { expected: d, found: k.nrows().max(k.ncols()) });
        }
        let sum = operators.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
        let defect = linalg::max_abs_diff(&sum, &CMatrix::identity(d, d));
        if defect > 1e-10 {
            return domain(format!("Kraus operators are not normalized (defect {defect:e})"));
        }
        Ok(KrausChannel { operators })
    }

    /// The channel that does nothing.
    pub fn identity(dim: usize) -> Self {
        KrausChannel { operators: vec![CMatrix::identity(dim, dim)] }
    }

    /// Projective measurement of the branch label.
    pub fn projective(dim: usize) -> Self {
        let operators = (0..dim)
            .map(|l| CMatrix::from_fn(dim, dim, |i, j| if i == l && j == l { c(1.0, 0.0) } else { c(0.0, 0.0) }))
            .collect();
        KrausChannel { operators }
    }

    /// Gaussian pointer of width `delta` with its outcome discretized on `nodes`
    /// Gauss–Hermite points centred on the spectrum; completeness is restored per level.
    pub fn gaussian_dephasing(spectrum: &ObservableSpectrum, delta: f64, nodes: usize) -> Result<Self> {
        let mut weights = node_weights(spectrum, delta, nodes)?;
        for l in 0..spectrum.len() {
            let total: f64 = weights.iter().map(|row| row[l]).sum();
            weights.iter_mut().for_each(|row| row[l] /= total);
        }
        let operators = weights
            .into_iter()
            .map(|row| CMatrix::from_diagonal(&CVector::from_iterator(row.len(), row.iter().map(|s| c(s.sqrt(), 0.0)))))
            .collect();
        Self::new(operators)
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    /// `E_x = K_x† K_x`.
    pub fn effects(&self) -> impl Iterator<Item = CMatrix> + '_ {
        self.operators.iter().map(|k| k.adjoint() * k)
    }

    /// `Σ K_x ρ K_x†`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(MacromicError::DimensionMismatch { expected: self.dim(), found: rho.dim() });
        }
        let d = rho.dim();
        let out = self.operators.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k * rho.entries() * k.adjoint());
        Ok(DensityMatrix::from_channel_output(out))
    }
}

fn check_dims(state: &MicroMacroState, channel: &KrausChannel) -> Result<()> {
    if state.branches() != channel.dim() {
        return Err(MacromicError::DimensionMismatch { expected: state.branches(), found: channel.dim() });
    }
    Ok(())
}

/// `E_F = H(p_ℓ)` of a micro–macro state.
pub fn ef_micro_macro(state: &MicroMacroState) -> f64 {
    state.ensemble().entropy()
}

/// Information `I_{ℰ,K}(P:ℓ)` the Kraus outcome carries about the branch label, with
/// `p(x|ℓ) = (E_x)_ℓℓ`.
pub fn environment_mi(state: &MicroMacroState, channel: &KrausChannel) -> Result<f64> {
    check_dims(state, channel)?;
    let effects: Vec<CMatrix> = channel.effects().collect();
    let rows: Vec<Vec<f64>> = (0..state.branches())
        .map(|l| effects.iter().map(|e| e[(l, l)].re.max(0.0)).collect())
        .collect();
    discrete_mutual_information(state.weights(), &rows)
}

/// Average entanglement of the Kraus-induced pure-state ensemble against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayCheck {
    /// `Σ_x p(x) S(ρ_x^m)`, an upper bound on `E_F` after the channel.
    pub avg_branch_entropy: f64,
    /// `H(p_ℓ) − I_{ℰ,K}`.
    pub bound: f64,
    pub holds: bool,
}

impl DecayCheck {
    pub fn slack(&self) -> f64 {
        self.bound - self.avg_branch_entropy
    }
}

/// Outcome probabilities and register-side states `[√(p_ℓ p_ℓ′)(E_x)_{ℓ′ℓ}]/p(x)`.
pub fn conditional_register_states(state: &MicroMacroState, channel: &KrausChannel) -> Result<Vec<(f64, DensityMatrix)>> {
    check_dims(state, channel)?;
    let p = state.weights();
    let d = p.len();
    let mut out = Vec::new();
    for e in channel.effects() {
        let m = CMatrix::from_fn(d, d, |l, lp| e[(lp, l)] * (p[l] * p[lp]).sqrt());
        let px = m.trace().re;
        if px > 1e-15 {
            out.push((px, DensityMatrix::from_channel_output(m.unscale(px))));
        }
    }
    Ok(out)
}

/// Checks `Σ_x p(x) S(ρ_x^m) ≤ H(p_ℓ) − I_{ℰ,K}`, which bounds the entanglement left after the channel.
pub fn ef_decay_bound_check(state: &MicroMacroState, channel: &KrausChannel) -> Result<DecayCheck> {
    let avg: f64 = conditional_register_states(state, channel)?
        .iter()
        .map(|(px, rho)| px * von_neumann_entropy(rho))
        .sum();
    let bound = ef_micro_macro(state) - environment_mi(state, channel)?;
    Ok(DecayCheck { avg_branch_entropy: avg, bound, holds: avg <= bound + 1e-10 })
}

/// Distillable entanglement left after the macroscopic part passes `Φ^Δ`:
/// `S(𝒢(ρ)) − S(Φ^Δ(ρ))` on the branch matrix of the state.
pub fn distillable_after_dephasing(state: &MicroMacroState, delta: f64) -> Result<f64> {
    let rho = state.branch_matrix();
    let dephased = DephasingChannel::new(delta)?.apply(&rho, state.spectrum())?;
    Ok((state.ensemble().entropy() - von_neumann_entropy(&dephased)).max(0.0))
}

/// Joint state of register and macroscopic system after `Φ^Δ` acts on the latter.
pub fn dephased_joint_state(state: &MicroMacroState, delta: f64) -> Result<DensityMatrix> {
    let channel = DephasingChannel::new(delta)?;
    let d = state.branches();
    let g = channel.factors(state.spectrum());
    let joint = state.joint_state();
    let out = CMatrix::from_fn(d * d, d * d, |r, col| joint.entries()[(r, col)] * g[(r % d, col % d)]);
    Ok(DensityMatrix::from_channel_output(out))
}

/// Closed form `1 − h₂((1 − e^{−N²/(8Δ²)})/2)` for two equal branches a distance `N` apart.
pub fn two_branch_distillable(span: f64, delta: f64) -> f64 {
    let damp = (-(span * span) / (8.0 * delta * delta)).exp();
    1.0 - crate::roof::binary_entropy(0.5 * (1.0 - damp))
}

/// `(E_x)_ℓℓ` on each Gauss–Hermite node before renormalization, one row per node.
fn node_weights(spectrum: &ObservableSpectrum, delta: f64, nodes: usize) -> Result<Vec<Vec<f64>>> {
    let model = PointerModel::gaussian(delta)?;
    let a = spectrum.eigenvalues();
    let centre = 0.5 * (a[0] + a[a.len() - 1]);
    let sigma = (delta * delta + spectrum.span().powi(2) / 4.0).sqrt();
    Ok(quadrature::gauss_hermite(nodes)
        .into_iter()
        .filter(|&(_, w)| w > 0.0)
        .map(|(y, w)| {
            let x = centre + 2f64.sqrt() * sigma * y;
            // ∫ f ≈ Σ w e^{y²} √2 σ f(x)
            let jacobian = 2f64.sqrt() * sigma * (w.ln() + y * y).exp();
            a.iter().map(|&al| jacobian * model.density(x - al)).collect()
        })
        .collect())
}

/// Total pointer mass per level captured by the nodes; 1 up to quadrature error.
pub fn gaussian_node_mass(spectrum: &ObservableSpectrum, delta: f64, nodes: usize) -> Result<Vec<f64>> {
    let rows = node_weights(spectrum, delta, nodes)?;
    Ok((0..spectrum.len()).map(|l| rows.iter().map(|r| r[l]).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutual_info::mutual_information;
    use crate::pointers::PointerModel;
    use crate::sampling;
    use crate::spectra::BranchEnsemble;
    use rand::RngExt;

    fn state(weights: Vec<f64>, levels: Vec<f64>) -> MicroMacroState {
        MicroMacroState::new(weights, ObservableSpectrum::new(levels).unwrap()).unwrap()
    }

    #[test]
    fn ef_examples() {
        assert!((ef_micro_macro(&state(vec![0.5, 0.5], vec![0.0, 1.0])) - 1.0).abs() < 1e-15);
        assert_eq!(ef_micro_macro(&state(vec![1.0, 0.0], vec![0.0, 1.0])), 0.0);
        assert!((ef_micro_macro(&state(vec![0.25; 4], vec![0.0, 1.0, 2.0, 3.0])) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn environment_mi_extremes() {
        let s = state(vec![0.2, 0.3, 0.5], vec![0.0, 1.0, 2.0]);
        assert_eq!(environment_mi(&s, &KrausChannel::identity(3)).unwrap(), 0.0);
        let full = environment_mi(&s, &KrausChannel::projective(3)).unwrap();
        assert!((full - s.ensemble().entropy()).abs() < 1e-14);
    }

    #[test]
    fn discretized_pointer_approaches_continuous() {
        let n = 1.0;
        let s = state(vec![0.5, 0.5], vec![0.0, n]);
        let channel = KrausChannel::gaussian_dephasing(s.spectrum(), n, DEFAULT_NODES).unwrap();
        let discrete = environment_mi(&s, &channel).unwrap();
        let continuous = mutual_information(s.ensemble(), &PointerModel::gaussian(n).unwrap()).unwrap().bits;
        assert!((discrete - continuous).abs() < 1e-4, "{discrete} vs {continuous}");
        for m in gaussian_node_mass(s.spectrum(), n, DEFAULT_NODES).unwrap() {
            assert!((m - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn decay_check_extremes() {
        let s = state(vec![0.2, 0.3, 0.5], vec![0.0, 1.0, 2.0]);
        let id = ef_decay_bound_check(&s, &KrausChannel::identity(3)).unwrap();
        assert!((id.avg_branch_entropy - s.ensemble().entropy()).abs() < 1e-12);
        assert!((id.bound - id.avg_branch_entropy).abs() < 1e-12 && id.holds);
        let proj = ef_decay_bound_check(&s, &KrausChannel::projective(3)).unwrap();
        assert!(proj.avg_branch_entropy.abs() < 1e-12 && proj.bound.abs() < 1e-12 && proj.holds);
    }

    #[test]
    fn decay_check_random() {
        let mut rng = sampling::seeded(17);
        for _ in 0..50 {
            let ens: BranchEnsemble = sampling::ensemble(&mut rng, 3, 1.0);
            let s = MicroMacroState::from_ensemble(ens);
            let channel = KrausChannel::new(sampling::kraus_operators(&mut rng, 3, 5)).unwrap();
            let check = ef_decay_bound_check(&s, &channel).unwrap();
            assert!(check.holds, "{check:?}");
        }
    }

    #[test]
    fn distillable_examples() {
        let n = 1.0;
        let s = state(vec![0.5, 0.5], vec![0.0, n]);
        assert!((distillable_after_dephasing(&s, 1e9).unwrap() - 1.0).abs() < 1e-12);
        assert!(distillable_after_dephasing(&s, 1e-9).unwrap().abs() < 1e-12);
        let expect = two_branch_distillable(n, n);
        assert!((distillable_after_dephasing(&s, n).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn distillable_equals_coherent_information() {
        let s = state(vec![0.2, 0.3, 0.5], vec![0.0, 0.3, 1.0]);
        let joint = dephased_joint_state(&s, 0.4).unwrap();
        let macro_side = linalg::partial_trace_first(joint.entries(), 3, 3);
        let coherent = linalg::entropy_bits(&linalg::eigvalsh(&macro_side)) - von_neumann_entropy(&joint);
        assert!((coherent - distillable_after_dephasing(&s, 0.4).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn distillable_is_coherence_of_dephased_state() {
        let mut rng = sampling::seeded(23);
        for _ in 0..20 {
            let s = MicroMacroState::from_ensemble(sampling::ensemble(&mut rng, 4, 1.0));
            let delta = 0.05 + rng.random::<f64>();
            let dephased = DephasingChannel::new(delta).unwrap().apply(&s.branch_matrix(), s.spectrum()).unwrap();
            let chain = relative_entropy_coherence(&dephased);
            assert!((distillable_after_dephasing(&s, delta).unwrap() - chain).abs() < 1e-10);
        }
    }

    #[test]
    fn coherence_examples() {
        assert_eq!(relative_entropy_coherence(&DensityMatrix::diagonal(&[0.3, 0.7]).unwrap()), 0.0);
        let plus = MicroMacroState::new(vec![0.5, 0.5], ObservableSpectrum::new(vec![0.0, 1.0]).unwrap()).unwrap();
        assert!((relative_entropy_coherence(&plus.branch_matrix()) - 1.0).abs() < 1e-12);
        let rho = sampling::full_rank_state(&mut sampling::seeded(2), 2);
        let limit = crate::discord::c_delta(&rho, &ObservableSpectrum::new(vec![0.0, 1.0]).unwrap(), 1e-6).unwrap();
        assert!((relative_entropy_coherence(&rho) - limit).abs() < 1e-6);
    }
}
