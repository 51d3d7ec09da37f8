//! Two-peak (qubit) analytics: pure-state information and size as functions of the
//! coherence `x`, and the analytic convex roof of the size over the XZ disk.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::threshold::invert_increasing;

const DISK_TOL: f64 = 1e-12;

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    crate::linalg::entropy_bits(&[p, 1.0 - p])
}

/// `Ĩ_0(x)`: information a perfect two-peak readout gets from a pure state with
/// off-diagonal `x/2`, i.e. `h₂((1 + √(1 − x²))/2)`.
pub fn tilde_i0(x: f64) -> f64 {
    let x = x.abs().min(1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - x * x).sqrt()))
}

fn check_x(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0 + DISK_TOL) {
        return domain(format!("coherence x = {x} lies outside [-1, 1]"));
    }
    Ok(())
}

/// Square-pointer information of the pure two-peak state: `Ĩ_0(x)·min(N/Δ, 1)`.
pub fn pure_mi_2peak(x: f64, delta: f64, span: f64) -> Result<f64> {
    check_x(x)?;
    if !(delta > 0.0 && span > 0.0) {
        return domain("width and span must be positive");
    }
    Ok(tilde_i0(x) * (span / delta).min(1.0))
}

/// Size of the pure two-peak state: `N·Ĩ_0(x)/b` when `Ĩ_0(x) ≥ b`, else 0.
pub fn pure_mic_2peak(x: f64, b: f64, span: f64) -> Result<f64> {
    check_x(x)?;
    if !(b > 0.0) {
        return domain(format!("information target must be positive, got {b}"));
    }
    let i0 = tilde_i0(x);
    Ok(if i0 >= b - crate::threshold::TARGET_SLACK { span * i0 / b } else { 0.0 })
}

/// `r = Ĩ_0⁻¹(b)`: the coherence below which the size vanishes. Saturates at 1 for `b ≥ 1`.
pub fn tilde_i0_inverse(b: f64) -> f64 {
    if b >= 1.0 {
        return 1.0;
    }
    invert_increasing(tilde_i0, b, 1e-12, 1.0, 1e-12)
}

/// A qubit state with Bloch coordinates `(x_ρ, 0, z_ρ)` on levels `{0, N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochStateXZ {
    pub x_rho: f64,
    pub z_rho: f64,
    pub span: f64,
}

impl BlochStateXZ {
    pub fn new(x_rho: f64, z_rho: f64, span: f64) -> Result<Self> {
        if x_rho * x_rho + z_rho * z_rho > 1.0 + DISK_TOL {
            return domain(format!("({x_rho}, {z_rho}) lies outside the Bloch disk"));
        }
        if !(span > 0.0) {
            return domain("span must be positive");
        }
        Ok(BlochStateXZ { x_rho, z_rho, span })
    }

    pub fn is_pure(&self) -> bool {
        self.x_rho * self.x_rho + self.z_rho * self.z_rho >= 1.0 - 1e-12
    }
}

/// Largest `n_x` reachable by a decomposition of `(x, z)` whose other end sits on the
/// zero-size chord `x = r`.
pub fn nx_max(x_rho: f64, z_rho: f64, r: f64) -> f64 {
    let (x, z) = (x_rho, z_rho.abs());
    if z <= (1.0 - x) * ((1.0 + r) / (1.0 - r)).sqrt() {
        return 1.0;
    }
    let s = (1.0 - r * r).sqrt();
    let num = 2.0 * r * r * x * (x * x + z * z + 1.0)
        + r * (2.0 * x * x * (s * z - 3.0) + (z * z - 1.0) * (2.0 * s * z + z * z + 1.0) - x.powi(4))
        - 2.0 * x * (x * x * (s * z - 1.0) + (z * z - 1.0) * (s * z + 1.0));
    let den = 2.0 * z * z * (2.0 * r * r - 2.0 * r * x + x * x - 1.0) + (x * x - 2.0 * r * x + 1.0).powi(2) + z.powi(4);
    (num / den).clamp(x, 1.0)
}

/// Analytic convex roof of the size over the XZ disk.
///
/// `min_{n ∈ [x_ρ, n_x^max]} (x_ρ − r)/(n − r) · MIC_b(n)`, minimized by a coarse scan
/// followed by golden-section refinement from three seeds.
pub fn roof_mic_2peak(state: &BlochStateXZ, b: f64) -> Result<f64> {
    if !(b > 0.0) {
        return domain(format!("information target must be positive, got {b}"));
    }
    let x = state.x_rho.abs();
    if state.is_pure() {
        return pure_mic_2peak(x, b, state.span);
    }
    let r = tilde_i0_inverse(b);
    if x <= r {
        return Ok(0.0);
    }
    let hi = nx_max(x, state.z_rho, r);
    let objective = |n: f64| (x - r) / (n - r) * state.span * tilde_i0(n) / b;
    if hi - x < 1e-14 {
        return Ok(objective(x));
    }
    let mut best = objective(x).min(objective(hi));
    let scan = 64;
    let step = (hi - x) / scan as f64;
    let mut best_i = 0;
    let mut best_scan = f64::INFINITY;
    for i in 0..=scan {
        let v = objective(x + i as f64 * step);
        if v < best_scan {
            best_scan = v;
            best_i = i;
        }
    }
    let centre = x + best_i as f64 * step;
    let seeds = [(x, x + 2.0 * step), ((centre - step).max(x), (centre + step).min(hi)), (hi - 2.0 * step, hi)];
    for (a, c) in seeds {
        best = best.min(golden_section(&objective, a.max(x), c.min(hi), 1e-10));
    }
    Ok(best.min(best_scan))
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b)).min(fc).min(fd)
}

/// Mutual information of a discrete channel `p(x|ℓ)` with prior `p_ℓ`, in bits.
pub fn discrete_mutual_information(prior: &[f64], channel: &[Vec<f64>]) -> Result<f64> {
    if channel.len() != prior.len() {
        return domain("one channel row per prior entry is required");
    }
    let outcomes = channel.first().map_or(0, Vec::len);
    if channel.iter().any(|row| row.len() != outcomes) {
        return domain("channel rows must have equal length");
    }
    let mut total = 0.0;
    for x in 0..outcomes {
        let px: f64 = prior.iter().zip(channel).map(|(p, row)| p * row[x]).sum();
        for (p, row) in prior.iter().zip(channel) {
            let joint = p * row[x];
            if joint > 0.0 {
                total += joint * (row[x] / px).log2();
            }
        }
    }
    Ok(total.max(0.0))
}

/// Probability of guessing a uniformly chosen label from one outcome, `½ Σ_x max_ℓ p(x|ℓ)` for two labels.
pub fn guessing_probability(channel: &[Vec<f64>]) -> f64 {
    let outcomes = channel.first().map_or(0, Vec::len);
    (0..outcomes)
        .map(|x| channel.iter().map(|row| row[x]).fold(0.0, f64::max))
        .sum::<f64>()
        / channel.len() as f64
}

/// The two extreme two-label channels with guessing probability `pc`, returned as
/// `(least informative MI, most informative MI)`.
///
/// The first has every outcome with posterior `(pc, 1 − pc)`; the second reveals the label
/// outright with probability `2pc − 1` and is uninformative otherwise.
pub fn guessing_mi_extremes(pc: f64) -> Result<(f64, f64)> {
    if !(0.5..=1.0).contains(&pc) {
        return domain(format!("guessing probability must lie in [1/2, 1], got {pc}"));
    }
    let prior = [0.5, 0.5];
    let flat = vec![vec![pc, 1.0 - pc], vec![1.0 - pc, pc]];
    let q = 2.0 * pc - 1.0;
    let sharp = vec![vec![q, 0.0, 1.0 - q], vec![0.0, q, 1.0 - q]];
    debug_assert!((guessing_probability(&flat) - pc).abs() < 1e-12);
    debug_assert!((guessing_probability(&sharp) - pc).abs() < 1e-12);
    Ok((discrete_mutual_information(&prior, &flat)?, discrete_mutual_information(&prior, &sharp)?))
}
