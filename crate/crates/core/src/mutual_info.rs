//! Mutual information between a branch label and a pointer reading, and the
//! size measure MIC_b built on it.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::Result;
use crate::pointers::{PointerKind, PointerModel, ResponseDistribution};
use crate::quadrature::{self, Tolerance};
use crate::spectra::BranchEnsemble;
use crate::threshold::{largest_width_reaching, Bracket};

pub use crate::threshold::MicEstimate;

/// How an information value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MiMethod {
    ClosedForm,
    Quadrature,
}

impl std::fmt::Display for MiMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MiMethod::ClosedForm => "ClosedForm",
            MiMethod::Quadrature => "Quadrature",
        })
    }
}

/// Mutual information in bits with its provenance and error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MiResult {
    pub bits: f64,
    pub method: MiMethod,
    pub est_abs_error: f64,
}

impl MiResult {
    fn exact(bits: f64) -> Self {
        MiResult { bits, method: MiMethod::ClosedForm, est_abs_error: 0.0 }
    }
}

/// `I_Δ(A:ℓ) = H(p_ℓ) − ∫ p(x) H(p(ℓ|x)) dx` for a branch ensemble read by `model`.
///
/// Square pointers are evaluated exactly cell by cell. Gaussian pointers integrate
/// `p(x)·KL(p(ℓ|x) ‖ p_ℓ)`, which is non-negative pointwise, by adaptive Gauss–Kronrod.
pub fn mutual_information(ens: &BranchEnsemble, model: &PointerModel) -> Result<MiResult> {
    mutual_information_with(ens, model, Tolerance::default())
}

/// [`mutual_information`] with an explicit quadrature tolerance (Gaussian pointers only).
pub fn mutual_information_with(ens: &BranchEnsemble, model: &PointerModel, tol: Tolerance) -> Result<MiResult> {
    let active: Vec<(f64, f64)> = ens.pairs().filter(|&(p, _)| p > 0.0).collect();
    if active.len() < 2 {
        return Ok(MiResult::exact(0.0));
    }
    match model.kind() {
        PointerKind::Square => Ok(MiResult::exact(square_mi(&active, model.delta()))),
        PointerKind::Gaussian => gaussian_mi(ens, &active, model, tol),
    }
}

/// Sweep over the breakpoints `a_ℓ ± Δ/2`. Within a cell the active branches `S`
/// share `p(x) = W_S/Δ`, and the integral collapses to `−Σ (width/Δ) W_S log₂ W_S`.
fn square_mi(active: &[(f64, f64)], delta: f64) -> f64 {
    let half = 0.5 * delta;
    // (centre, side, weight, step); widths are formed from centre and side separately so
    // a cell bounded by one branch's own edges has width exactly Δ.
    let mut events: Vec<(f64, f64, f64, i32)> = Vec::with_capacity(2 * active.len());
    for &(p, a) in active {
        events.push((a, -1.0, p, 1));
        events.push((a, 1.0, p, -1));
    }
    events.sort_by(|x, y| (x.0 + x.1 * half).total_cmp(&(y.0 + y.1 * half)).then(x.3.cmp(&y.3)));
    let mut total = 0.0;
    let mut weight = 0.0;
    let mut count = 0i32;
    let (mut last_a, mut last_s) = (events[0].0, events[0].1);
    for (a, side, p, step) in events {
        let width = (a - last_a) / delta + 0.5 * (side - last_s);
        if count > 0 && width > 0.0 && weight > 0.0 {
            total -= width * weight * weight.log2();
        }
        count += step;
        weight = if count == 0 { 0.0 } else { weight + step as f64 * p };
        last_a = a;
        last_s = side;
    }
    total.max(0.0)
}

fn gaussian_mi(ens: &BranchEnsemble, active: &[(f64, f64)], model: &PointerModel, tol: Tolerance) -> Result<MiResult> {
    let delta = model.delta();
    let log_w: Vec<f64> = active.iter().map(|&(p, _)| p.ln()).collect();
    let integrand = |x: f64| {
        let s: Vec<f64> = active.iter().map(|&(_, a)| -(x - a) * (x - a) / (2.0 * delta * delta)).collect();
        let peak = s.iter().zip(&log_w).map(|(s, l)| s + l).fold(f64::NEG_INFINITY, f64::max);
        let lse = peak + s.iter().zip(&log_w).map(|(s, l)| (s + l - peak).exp()).sum::<f64>().ln();
        active
            .iter()
            .zip(&s)
            .map(|(&(p, a), &s)| p * model.density(x - a) * (s - lse))
            .sum::<f64>()
            / LN_2
    };
    let pieces = ResponseDistribution::new(*model, ens.clone()).support();
    let r = quadrature::integrate_pieces(integrand, &pieces, tol)?;
    let bound = ens.entropy();
    Ok(MiResult {
        bits: r.value.clamp(0.0, bound),
        method: MiMethod::Quadrature,
        est_abs_error: r.abs_error,
    })
}

/// `MIC_b`: largest `Δ` at which the pointer still yields `b` bits about the branch.
///
/// Zero when even the sharpest pointer falls short of `b`.
pub fn mic(ens: &BranchEnsemble, kind: PointerKind, b: f64) -> Result<MicEstimate> {
    let scale = ens.spectrum().span();
    if b > 0.0 && ens.entropy() < b - crate::threshold::TARGET_SLACK {
        return Ok(MicEstimate::ZERO);
    }
    largest_width_reaching(
        |d| Ok(mutual_information(ens, &PointerModel::new(kind, d)?)?.bits),
        b,
        scale,
        Bracket::default(),
    )
}

/// `V/((2 ln 2) Δ²)`, an upper bound on the Gaussian-pointer information.
pub fn variance_upper_bound(ens: &BranchEnsemble, delta: f64) -> f64 {
    ens.variance() / (2.0 * LN_2 * delta * delta)
}
