//! `C_Δ(ρ, A) = S(Φ^Δ(ρ)) − S(ρ)`: the entropy an unread Gaussian pointer adds to the
//! state, its form as a difference of quantum mutual informations, and related tools.

use serde::Serialize;

use crate::error::{domain, MacromicError, Result};
use crate::linalg::{self, CMatrix, EIGEN_FLOOR};
use crate::mutual_info::MicEstimate;
use crate::pointers::DephasingChannel;
use crate::spectra::{dephase_fully, von_neumann_entropy, DensityMatrix, ObservableSpectrum};
use crate::threshold::{largest_width_reaching, Bracket, TARGET_SLACK};

const NOISE_FLOOR: f64 = 1e-10;

/// `S(Φ^Δ(ρ)) − S(ρ)` in bits, with round-off below zero clipped.
pub fn c_delta(rho: &DensityMatrix, spectrum: &ObservableSpectrum, delta: f64) -> Result<f64> {
    let dephased = DephasingChannel::new(delta)?.apply(rho, spectrum)?;
    let v = von_neumann_entropy(&dephased) - von_neumann_entropy(rho);
    if v < -NOISE_FLOOR {
        return Err(MacromicError::Numeric {
            message: "dephasing lowered the entropy".into(),
            estimate: v,
            abs_error: v.abs(),
        });
    }
    Ok(v.max(0.0))
}

/// `C_R(ρ) = S(𝒢(ρ)) − S(ρ)`.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> f64 {
    (von_neumann_entropy(&dephase_fully(rho)) - von_neumann_entropy(rho)).max(0.0)
}

/// Overlaps `⟨ξ_Δ(· − a_i)|ξ_Δ(· − a_j)⟩ = exp(−(a_i − a_j)²/(8Δ²))` of shifted Gaussian pointers.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerGram {
    gram: CMatrix,
}

impl PointerGram {
    pub fn new(spectrum: &ObservableSpectrum, delta: f64) -> Result<Self> {
        Ok(PointerGram { gram: DephasingChannel::new(delta)?.factors(spectrum) })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.gram
    }

    /// Pointer states as columns of `G^{1/2}`, an exact finite representation of the shifted packets.
    pub fn pointer_states(&self) -> CMatrix {
        linalg::psd_sqrt(&self.gram)
    }
}

/// Entropies of the system–pointer state after the coupling, and of its fully dephased twin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QmiBreakdown {
    /// `ℐ(P:M)` of the coupled state.
    pub quantum: f64,
    /// `ℐ(P:M)` of the coupled, previously dephased state.
    pub classical: f64,
    /// `S` of the pointer marginal computed from the joint state.
    pub pointer_entropy: f64,
    /// Same quantity from the `√(p_i p_j) G_ij` matrix.
    pub pointer_entropy_gram: f64,
}

impl QmiBreakdown {
    pub fn difference(&self) -> f64 {
        self.quantum - self.classical
    }
}

/// `Σ ρ_ij |i⟩⟨j| ⊗ |ξ_i⟩⟨ξ_j|` on `M ⊗ P` with pointer vectors given as columns.
fn coupled_state(rho: &CMatrix, pointers: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let mut out = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let block = pointers.column(i) * pointers.column(j).adjoint() * rho[(i, j)];
            out.view_mut((i * d, j * d), (d, d)).copy_from(&block);
        }
    }
    out
}

fn mutual_information_of(joint: &CMatrix, d: usize) -> (f64, f64) {
    let s = |m: &CMatrix| linalg::entropy_bits(&linalg::eigvalsh(m));
    let pointer = s(&linalg::partial_trace_first(joint, d, d));
    (s(&linalg::partial_trace_second(joint, d, d)) + pointer - s(joint), pointer)
}

/// Both quantum mutual informations between system and pointer, built from the explicit
/// `d²`-dimensional joint states.
pub fn qmi_breakdown(rho: &DensityMatrix, spectrum: &ObservableSpectrum, delta: f64) -> Result<QmiBreakdown> {
    spectrum.check_dim(rho.dim())?;
    let gram = PointerGram::new(spectrum, delta)?;
    let pointers = gram.pointer_states();
    let d = rho.dim();
    let (quantum, pointer_entropy) = mutual_information_of(&coupled_state(rho.entries(), &pointers), d);
    let (classical, _) = mutual_information_of(&coupled_state(dephase_fully(rho).entries(), &pointers), d);
    let p = rho.populations();
    let w = CMatrix::from_fn(d, d, |i, j| gram.matrix()[(i, j)] * (p[i].max(0.0) * p[j].max(0.0)).sqrt());
    let pointer_entropy_gram = linalg::entropy_bits(&linalg::eigvalsh(&w));
    Ok(QmiBreakdown { quantum, classical, pointer_entropy, pointer_entropy_gram })
}

/// `C_Δ` as `ℐ(P:M)_{ρ′} − ℐ(P:M)_{𝒢(ρ)′}`.
pub fn c_delta_via_qmi(rho: &DensityMatrix, spectrum: &ObservableSpectrum, delta: f64) -> Result<f64> {
    Ok(qmi_breakdown(rho, spectrum, delta)?.difference())
}

/// `MIC~_b`: largest `Δ` with `C_Δ(ρ) ≥ b`; zero when even `C_R(ρ) < b`.
pub fn mic_tilde(rho: &DensityMatrix, spectrum: &ObservableSpectrum, b: f64) -> Result<MicEstimate> {
    spectrum.check_dim(rho.dim())?;
    if !(b > 0.0) {
        return domain(format!("information target must be positive, got {b}"));
    }
    if relative_entropy_coherence(rho) < b - TARGET_SLACK {
        return Ok(MicEstimate::ZERO);
    }
    largest_width_reaching(|d| c_delta(rho, spectrum, d), b, spectrum.span(), Bracket::default())
}

/// `¼ tr(ρA² − P_ρ A ρ A)`, the weak-pointer coefficient of `C_Δ`.
pub fn weak_limit_coefficient(rho: &DensityMatrix, spectrum: &ObservableSpectrum) -> Result<f64> {
    spectrum.check_dim(rho.dim())?;
    let a = spectrum.operator();
    let r = rho.entries();
    let support = linalg::support_projector(r, EIGEN_FLOOR);
    let first = (r * &a * &a).trace().re;
    let second = (&support * &a * r * &a).trace().re;
    Ok((0.25 * (first - second)).max(0.0))
}

/// `h(t) = −t log₂ t`.
pub fn h_bits(t: f64) -> f64 {
    if t <= 0.0 { 0.0 } else { -t * t.log2() }
}

/// Coefficient of `h(Δ⁻²)` in `C_Δ` extracted from `C` at `Δ` and `2Δ`.
///
/// With `C ≈ κ_h h(t) + κ_1 t`, `t = Δ⁻²`, the difference `C(2Δ)/t₂ − C(Δ)/t₁` equals `2κ_h`,
/// which removes the linear term that makes the direct ratio converge only logarithmically.
pub fn weak_limit_coefficient_estimate(rho: &DensityMatrix, spectrum: &ObservableSpectrum, delta: f64) -> Result<f64> {
    let (t1, t2) = (delta.powi(-2), (2.0 * delta).powi(-2));
    let c1 = c_delta(rho, spectrum, delta)?;
    let c2 = c_delta(rho, spectrum, 2.0 * delta)?;
    Ok(0.5 * (c2 / t2 - c1 / t1))
}

/// Quantum relative entropy `S(ρ ‖ σ)` in bits; `+∞` when `ρ` has weight outside the support of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(MacromicError::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let (values, vectors) = linalg::eigh(sigma.entries());
    let in_basis = vectors.adjoint() * rho.entries() * &vectors;
    let mut cross = 0.0;
    for (k, &l) in values.iter().enumerate() {
        let weight = in_basis[(k, k)].re;
        if l <= EIGEN_FLOOR * 1e-4 {
            if weight > NOISE_FLOOR {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross -= weight * l.log2();
    }
    Ok((cross - von_neumann_entropy(rho)).max(0.0))
}

/// `S(ρ ‖ Φ^{Δ/√2}(ρ))`, a lower bound on `C_Δ(ρ)`.
pub fn relative_entropy_lower_bound(rho: &DensityMatrix, spectrum: &ObservableSpectrum, delta: f64) -> Result<f64> {
    let sigma = DephasingChannel::new(delta / 2f64.sqrt())?.apply(rho, spectrum)?;
    relative_entropy(rho, &sigma)
}

/// Kraus operator that shifts eigenvalues by `shift`: non-zero only where `a_i − a_j = shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovariantKraus {
    shift: f64,
    matrix: CMatrix,
}

impl CovariantKraus {
    pub fn new(shift: f64, matrix: CMatrix, spectrum: &ObservableSpectrum) -> Result<Self> {
        spectrum.check_dim(matrix.nrows())?;
        spectrum.check_dim(matrix.ncols())?;
        let a = spectrum.eigenvalues();
        let tol = 1e-9 * spectrum.span().max(1.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                if matrix[(i, j)].norm() > 1e-14 && (a[i] - a[j] - shift).abs() > tol {
                    return domain(format!("entry ({i}, {j}) is incompatible with shift {shift}"));
                }
            }
        }
        Ok(CovariantKraus { shift, matrix })
    }

    /// Builds an operator from coefficients listed along the allowed pairs `(i, j)`.
    pub fn from_coefficients(shift: f64, coefficients: &[((usize, usize), num_complex::Complex64)], spectrum: &ObservableSpectrum) -> Result<Self> {
        let d = spectrum.len();
        let mut m = CMatrix::zeros(d, d);
        for &((i, j), v) in coefficients {
            if i >= d || j >= d {
                return Err(MacromicError::DimensionMismatch { expected: d, found: i.max(j) + 1 });
            }
            m[(i, j)] = v;
        }
        Self::new(shift, m, spectrum)
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }
}

/// Outcome probabilities `w_μ` and normalized post-measurement states of a covariant instrument.
/// Outcomes with zero probability are omitted.
pub fn covariant_kraus_apply(
    rho: &DensityMatrix,
    spectrum: &ObservableSpectrum,
    ops: &[CovariantKraus],
) -> Result<Vec<(f64, DensityMatrix)>> {
    spectrum.check_dim(rho.dim())?;
    let d = rho.dim();
    let completeness = ops.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.matrix.adjoint() * &k.matrix);
    let defect = linalg::max_abs_diff(&completeness, &CMatrix::identity(d, d));
    if defect > 1e-10 {
        return domain(format!("Kraus operators are not normalized (defect {defect:e})"));
    }
    let mut out = Vec::with_capacity(ops.len());
    for k in ops {
        let m = &k.matrix * rho.entries() * k.matrix.adjoint();
        let w = m.trace().re;
        if w > 1e-15 {
            out.push((w, DensityMatrix::from_channel_output(m.unscale(w))));
        }
    }
    Ok(out)
}

/// Average state `Σ_μ K_μ ρ K_μ†` of a covariant instrument.
pub fn covariant_channel(rho: &DensityMatrix, spectrum: &ObservableSpectrum, ops: &[CovariantKraus]) -> Result<DensityMatrix> {
    let d = rho.dim();
    let parts = covariant_kraus_apply(rho, spectrum, ops)?;
    let sum = parts.iter().fold(CMatrix::zeros(d, d), |acc, (w, s)| acc + s.entries().scale(*w));
    Ok(DensityMatrix::from_channel_output(sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CVector};
    use crate::roof::binary_entropy;
    use crate::sampling;

    /// Pure two-level state `(|0⟩ + |1⟩)/√2`.
    fn plus_state() -> DensityMatrix {
        let v = CVector::from_vec(vec![c(0.5f64.sqrt(), 0.0), c(0.5f64.sqrt(), 0.0)]);
        DensityMatrix::new(&v * v.adjoint()).unwrap()
    }

    fn two(n: f64) -> ObservableSpectrum {
        ObservableSpectrum::new(vec![0.0, n]).unwrap()
    }

    #[test]
    fn incoherent_states_have_none() {
        let rho = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(c_delta(&rho, &two(1.0), 0.4).unwrap(), 0.0);
        assert!(c_delta_via_qmi(&rho, &two(1.0), 0.4).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pure_two_peak_closed_form() {
        let n: f64 = 1.5;
        for delta in [0.2f64, 1.0, 3.0] {
            let damp = (-n * n / (8.0 * delta * delta)).exp();
            let expect = binary_entropy(0.5 * (1.0 - damp));
            assert!((c_delta(&plus_state(), &two(n), delta).unwrap() - expect).abs() < 1e-12);
            assert!((c_delta_via_qmi(&plus_state(), &two(n), delta).unwrap() - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn narrow_pointer_gives_coherence() {
        let rho = sampling::full_rank_state(&mut sampling::seeded(12), 3);
        let spectrum = ObservableSpectrum::new(vec![0.0, 0.4, 1.0]).unwrap();
        let narrow = c_delta(&rho, &spectrum, 1e-9).unwrap();
        assert!((narrow - relative_entropy_coherence(&rho)).abs() < 1e-12);
    }

    #[test]
    fn qmi_route_matches_and_pointer_entropies_agree() {
        let mut rng = sampling::seeded(21);
        let spectrum = ObservableSpectrum::new(vec![0.0, 0.7, 1.0]).unwrap();
        for delta in [0.1, 0.5, 2.0] {
            let rho = sampling::full_rank_state(&mut rng, 3);
            let q = qmi_breakdown(&rho, &spectrum, delta).unwrap();
            assert!((q.pointer_entropy - q.pointer_entropy_gram).abs() < 1e-10);
            assert!((q.difference() - c_delta(&rho, &spectrum, delta).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn mic_tilde_examples() {
        let b = binary_entropy(0.5 * (1.0 - (-0.125f64).exp()));
        let m = mic_tilde(&plus_state(), &two(2.0), b).unwrap();
        assert!((m.delta - 2.0).abs() < 1e-8);
        let incoherent = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        assert_eq!(mic_tilde(&incoherent, &two(1.0), 0.1).unwrap(), MicEstimate::ZERO);
    }

    #[test]
    fn weak_coefficient_examples() {
        let spectrum = ObservableSpectrum::new(vec![0.0, 1.0, 3.0]).unwrap();
        let psi = sampling::pure_state(&mut sampling::seeded(2), 3);
        let v = psi.ensemble(&spectrum).unwrap().variance();
        let k = weak_limit_coefficient(&psi.density_matrix(), &spectrum).unwrap();
        assert!((k - v / 4.0).abs() < 1e-12);
        let full = sampling::full_rank_state(&mut sampling::seeded(3), 3);
        assert!(weak_limit_coefficient(&full, &spectrum).unwrap().abs() < 1e-12);
    }

    #[test]
    fn two_point_extraction_recovers_coefficient() {
        let spectrum = ObservableSpectrum::new(vec![0.0, 0.4, 1.0]).unwrap();
        let rho = sampling::density_matrix(&mut sampling::seeded(6), 3, 2);
        let k = weak_limit_coefficient(&rho, &spectrum).unwrap();
        let est = weak_limit_coefficient_estimate(&rho, &spectrum, 100.0).unwrap();
        assert!((est / k - 1.0).abs() < 1e-3, "{est} vs {k}");
    }

    #[test]
    fn relative_entropy_bound() {
        let spectrum = two(1.0);
        let rho = DensityMatrix::diagonal(&[0.4, 0.6]).unwrap();
        assert_eq!(relative_entropy_lower_bound(&rho, &spectrum, 0.3).unwrap(), 0.0);
        let mut rng = sampling::seeded(30);
        for _ in 0..20 {
            let rho = sampling::full_rank_state(&mut rng, 2);
            let lower = relative_entropy_lower_bound(&rho, &spectrum, 0.5).unwrap();
            assert!(lower <= c_delta(&rho, &spectrum, 0.5).unwrap() + 1e-9);
        }
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let mixed = DensityMatrix::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(relative_entropy(&pure, &mixed).unwrap(), f64::INFINITY);
    }

    #[test]
    fn kraus_examples() {
        let spectrum = ObservableSpectrum::new(vec![0.0, 1.0, 2.0]).unwrap();
        let rho = sampling::full_rank_state(&mut sampling::seeded(1), 3);
        let id = CovariantKraus::new(0.0, CMatrix::identity(3, 3), &spectrum).unwrap();
        let out = covariant_kraus_apply(&rho, &spectrum, &[id]).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out[0].0 - 1.0).abs() < 1e-14 && out[0].1.max_entry_distance(&rho) < 1e-14);
        let projectors: Vec<CovariantKraus> = (0..3)
            .map(|l| CovariantKraus::from_coefficients(0.0, &[((l, l), c(1.0, 0.0))], &spectrum).unwrap())
            .collect();
        let avg = covariant_channel(&rho, &spectrum, &projectors).unwrap();
        assert!(avg.max_entry_distance(&dephase_fully(&rho)) < 1e-14);
        let bad = CMatrix::from_fn(3, 3, |i, j| if i == 0 && j == 2 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert!(CovariantKraus::new(1.0, bad, &spectrum).is_err());
        let half = CovariantKraus::new(0.0, CMatrix::identity(3, 3).scale(0.5), &spectrum).unwrap();
        assert!(covariant_kraus_apply(&rho, &spectrum, &[half]).is_err());
    }
}
