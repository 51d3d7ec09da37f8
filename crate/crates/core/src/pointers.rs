//! Pointer readout kernels, the response distribution they induce, and the
//! partial dephasing channel `Φ^Δ` left behind by an unread pointer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{c, CMatrix};
use crate::quadrature;
use crate::spectra::{BranchEnsemble, DensityMatrix, ObservableSpectrum};

/// Shape of the pointer wave packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointerKind {
    /// Flat window of width `Δ`.
    Square,
    /// Gaussian of standard deviation `Δ` (in the outcome density).
    Gaussian,
}

impl std::fmt::Display for PointerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PointerKind::Square => "square",
            PointerKind::Gaussian => "gaussian",
        })
    }
}

/// A pointer of a given shape and resolution width `Δ > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointerModel {
    kind: PointerKind,
    delta: f64,
}

impl PointerModel {
    pub fn new(kind: PointerKind, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return domain(format!("pointer width must be positive and finite, got {delta}"));
        }
        Ok(PointerModel { kind, delta })
    }

    pub fn square(delta: f64) -> Result<Self> {
        Self::new(PointerKind::Square, delta)
    }

    pub fn gaussian(delta: f64) -> Result<Self> {
        Self::new(PointerKind::Gaussian, delta)
    }

    pub fn kind(&self) -> PointerKind {
        self.kind
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Same shape, width multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(self.kind, self.delta * alpha)
    }

    /// Pointer amplitude `ξ_Δ(u)`, with `ξ_Δ² = povm density`.
    pub fn amplitude(&self, u: f64) -> f64 {
        match self.kind {
            PointerKind::Square => self.density(u).sqrt(),
            PointerKind::Gaussian => {
                (2.0 * PI * self.delta * self.delta).powf(-0.25) * (-u * u / (4.0 * self.delta * self.delta)).exp()
            }
        }
    }

    /// Outcome density `ξ_Δ²(u)` at displacement `u = x − a`.
    ///
    /// The square window is half-open: `u ∈ [−Δ/2, Δ/2)`, i.e. the eigenvalue
    /// `a` lies in `(x − Δ/2, x + Δ/2]`.
    pub fn density(&self, u: f64) -> f64 {
        let d = self.delta;
        match self.kind {
            PointerKind::Square => {
                if (-0.5 * d..0.5 * d).contains(&u) {
                    1.0 / d
                } else {
                    0.0
                }
            }
            PointerKind::Gaussian => (-u * u / (2.0 * d * d)).exp() / ((2.0 * PI).sqrt() * d),
        }
    }

    /// Interval outside which the kernel is zero (square) or below ~1e-15 of its peak (Gaussian).
    pub fn support_half_width(&self) -> f64 {
        match self.kind {
            PointerKind::Square => 0.5 * self.delta,
            PointerKind::Gaussian => 8.0 * self.delta,
        }
    }
}

/// POVM density `ξ_Δ²(x − a)` for outcome `x` given eigenvalue `a`.
pub fn povm_density(model: &PointerModel, x: f64, a: f64) -> f64 {
    model.density(x - a)
}

/// `p(x) = Σ_ℓ p_ℓ ξ_Δ²(x − a_ℓ)` for a pointer measuring a branch ensemble.
#[derive(Debug, Clone)]
pub struct ResponseDistribution {
    model: PointerModel,
    ensemble: BranchEnsemble,
}

impl ResponseDistribution {
    pub fn new(model: PointerModel, ensemble: BranchEnsemble) -> Self {
        ResponseDistribution { model, ensemble }
    }

    pub fn model(&self) -> &PointerModel {
        &self.model
    }

    pub fn ensemble(&self) -> &BranchEnsemble {
        &self.ensemble
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ensemble.pairs().map(|(p, a)| p * self.model.density(x - a)).sum()
    }

    /// Joint density `p_ℓ ξ_Δ²(x − a_ℓ)` for each branch.
    pub fn joint(&self, x: f64) -> Vec<f64> {
        self.ensemble.pairs().map(|(p, a)| p * self.model.density(x - a)).collect()
    }

    /// Disjoint intervals carrying all the probability mass.
    pub fn support(&self) -> Vec<(f64, f64)> {
        let h = self.model.support_half_width();
        quadrature::merge_intervals(
            self.ensemble
                .pairs()
                .filter(|&(p, _)| p > 0.0)
                .map(|(_, a)| (a - h, a + h))
                .collect(),
        )
    }

    /// `∫ p(x) dx`, which should be 1.
    pub fn total_mass(&self) -> Result<f64> {
        let pieces = self.support();
        Ok(quadrature::integrate_pieces(|x| self.density(x), &pieces, quadrature::Tolerance::default())?.value)
    }
}

/// Off-diagonal damping `exp(−(a_i − a_j)²/(8Δ²))` of the partial dephasing channel.
pub fn dephasing_factor(delta: f64, a_i: f64, a_j: f64) -> f64 {
    let d = (a_i - a_j) / delta;
    (-d * d / 8.0).exp()
}

/// The unread-pointer channel `Φ^Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingChannel {
    delta: f64,
}

impl DephasingChannel {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return domain(format!("dephasing width must be positive, got {delta}"));
        }
        Ok(DephasingChannel { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `Φ^α ∘ Φ^β = Φ^γ` with `γ⁻² = α⁻² + β⁻²`.
    pub fn compose(&self, other: &DephasingChannel) -> DephasingChannel {
        let inv = self.delta.powi(-2) + other.delta.powi(-2);
        DephasingChannel { delta: inv.powf(-0.5) }
    }

    /// Matrix of damping factors for a spectrum (the Gram matrix of shifted Gaussian pointers).
    pub fn factors(&self, spectrum: &ObservableSpectrum) -> CMatrix {
        let a = spectrum.eigenvalues();
        CMatrix::from_fn(a.len(), a.len(), |i, j| c(dephasing_factor(self.delta, a[i], a[j]), 0.0))
    }

    pub fn apply(&self, rho: &DensityMatrix, spectrum: &ObservableSpectrum) -> Result<DensityMatrix> {
        spectrum.check_dim(rho.dim())?;
        let damped = rho.entries().component_mul(&self.factors(spectrum));
        Ok(DensityMatrix::from_channel_output(damped))
    }

    /// Same channel evaluated as the average of `e^{−ikA} ρ e^{ikA}` over the
    /// momentum kick density, with `nodes`-point Gauss–Hermite quadrature.
    pub fn apply_by_unitary_mixture(
        &self,
        rho: &DensityMatrix,
        spectrum: &ObservableSpectrum,
        nodes: usize,
    ) -> Result<DensityMatrix> {
        spectrum.check_dim(rho.dim())?;
        let a = spectrum.eigenvalues();
        let d = a.len();
        let mut out = CMatrix::zeros(d, d);
        // k = y/(√2 Δ) turns the kick density into e^{−y²}/√π.
        for (y, w) in quadrature::gauss_hermite(nodes) {
            let k = y / (2f64.sqrt() * self.delta);
            let weight = w / PI.sqrt();
            for i in 0..d {
                for j in 0..d {
                    let phase = c(0.0, -k * (a[i] - a[j])).exp();
                    out[(i, j)] += rho.entries()[(i, j)] * phase * weight;
                }
            }
        }
        Ok(DensityMatrix::from_channel_output(out))
    }
}

/// `Φ^Δ(ρ)`: entry `(i, j)` multiplied by [`dephasing_factor`].
pub fn apply_partial_dephasing(rho: &DensityMatrix, spectrum: &ObservableSpectrum, delta: f64) -> Result<DensityMatrix> {
    DephasingChannel::new(delta)?.apply(rho, spectrum)
}

/// Normalized density of the momentum kick `k` imparted by a width-`Δ` Gaussian pointer,
/// `√(2/π) Δ e^{−2Δ²k²}`.
pub fn momentum_density(delta: f64, k: f64) -> f64 {
    (2.0 / PI).sqrt() * delta * (-2.0 * delta * delta * k * k).exp()
}
