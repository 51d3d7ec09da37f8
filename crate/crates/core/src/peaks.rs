//! Closed forms for `k + 1` equally weighted, equally spaced peaks on `[0, N]` read
//! by a square pointer. `r = Δ/(2N)` is the width-to-span ratio.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::spectra::{BranchEnsemble, ObservableSpectrum};
use crate::threshold::{largest_width_reaching, Bracket, TARGET_SLACK};

/// Largest `k` scanned when `b > 1` is not of the form `log₂(k + 1)`.
pub const EXTRAPOLATION_MAX_K: usize = 64;

/// The peak family with `k + 1` peaks spanning `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeaksFamily {
    pub k: usize,
    pub span: f64,
}

impl PeaksFamily {
    pub fn new(k: usize, span: f64) -> Result<Self> {
        if !(span > 0.0) || !span.is_finite() {
            return domain(format!("peak span must be positive, got {span}"));
        }
        Ok(PeaksFamily { k, span })
    }

    pub fn ratio(&self, delta: f64) -> f64 {
        delta / (2.0 * self.span)
    }

    pub fn ensemble(&self) -> Result<BranchEnsemble> {
        Ok(BranchEnsemble::uniform(ObservableSpectrum::equally_spaced(self.k, self.span)?))
    }

    pub fn mi(&self, delta: f64) -> f64 {
        peaks_mi(delta, self.span, self.k)
    }
}

/// Probability `P_n` that the pointer window holds exactly `n` peaks, for `n = 1..=k+1`
/// (index 0 of the returned vector is `P_1`).
pub fn outcome_class_probs(r: f64, k: usize) -> Result<Vec<f64>> {
    if !(r > 0.0) {
        return domain(format!("ratio must be positive, got {r}"));
    }
    if k == 0 {
        return domain("at least two peaks are required");
    }
    let kf = k as f64;
    let mut p = vec![0.0; k + 1];
    if r >= 0.5 {
        for n in 1..=k {
            p[n - 1] = n as f64 / (kf * (kf + 1.0) * r);
        }
        p[k] = 1.0 - 1.0 / (2.0 * r);
    } else {
        let c = (2.0 * r * kf).floor() as usize;
        let denom = 2.0 * (kf + 1.0) * r;
        for n in 1..c {
            p[n - 1] = 2.0 * n as f64 / (kf * denom);
        }
        let cf = c as f64;
        if c >= 1 {
            p[c - 1] = (cf * (kf - cf) * ((cf + 1.0) / kf - 2.0 * r) + 2.0 * cf / kf) / denom;
        }
        p[c] = (cf + 1.0) * (kf - cf + 1.0) * (2.0 * r - cf / kf) / denom;
    }
    Ok(p)
}

/// `log₂ H!(k)` with the hyperfactorial `H!(k) = Π_{n=1..k} nⁿ`.
pub fn hyperfactorial_log2(k: usize) -> f64 {
    (1..=k).map(|n| n as f64 * (n as f64).log2()).sum()
}

/// Square-pointer information of the peak family at width `delta`.
pub fn peaks_mi(delta: f64, span: f64, k: usize) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let kf = k as f64;
    if delta >= span {
        return span / delta * wide_constant(k);
    }
    let probs = outcome_class_probs(delta / (2.0 * span), k).expect("positive ratio and k");
    let loss: f64 = probs.iter().enumerate().map(|(i, p)| p * ((i + 1) as f64).log2()).sum();
    ((kf + 1.0).log2() - loss).max(0.0)
}

/// `log₂(k+1) − 2 log₂ H!(k)/(k(k+1))`: the information at `Δ = N`.
fn wide_constant(k: usize) -> f64 {
    let kf = k as f64;
    (kf + 1.0).log2() - 2.0 * hyperfactorial_log2(k) / (kf * (kf + 1.0))
}

/// Size of the `k + 1`-peak state for target `b`.
pub fn peaks_mic(b: f64, span: f64, k: usize) -> Result<f64> {
    if !(b > 0.0) {
        return domain(format!("information target must be positive, got {b}"));
    }
    if k == 0 || ((k + 1) as f64).log2() < b - TARGET_SLACK {
        return Ok(0.0);
    }
    let wide = wide_constant(k);
    if b <= wide {
        return Ok(span * wide / b);
    }
    Ok(largest_width_reaching(|d| Ok(peaks_mi(d, span, k)), b, span, Bracket::default())?.delta)
}

/// Best size over the peak family and the peak count achieving it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeaksMic {
    pub delta: f64,
    pub k: usize,
    /// True when `b > 1` is not `log₂` of an integer and the family was scanned numerically.
    pub extrapolated: bool,
}

/// `k` with `log₂(k + 1) = b`, if any.
fn exact_peak_count(b: f64) -> Option<usize> {
    let k = (2f64.powf(b) - 1.0).round();
    (k >= 1.0 && ((k + 1.0).log2() - b).abs() < 1e-9).then_some(k as usize)
}

/// Largest size any member of the peak family reaches for target `b`.
pub fn peaks_best_mic(b: f64, span: f64) -> Result<PeaksMic> {
    if !(b > 0.0) {
        return domain(format!("information target must be positive, got {b}"));
    }
    if b <= 1.0 {
        return Ok(PeaksMic { delta: span / b, k: 1, extrapolated: false });
    }
    if let Some(k) = exact_peak_count(b) {
        return Ok(PeaksMic { delta: span / k as f64, k, extrapolated: false });
    }
    let mut best = PeaksMic { delta: 0.0, k: 1, extrapolated: true };
    for k in 1..=EXTRAPOLATION_MAX_K {
        let d = peaks_mic(b, span, k)?;
        if d > best.delta {
            best = PeaksMic { delta: d, k, extrapolated: true };
        }
    }
    Ok(best)
}

/// Span `N` of the best peak state whose size equals `mic_value` at target `b`.
///
/// Any `b ∈ (0, 1]` is accepted; above one bit `b` must equal `log₂(k + 1)`.
pub fn calibration_span(mic_value: f64, b: f64) -> Result<f64> {
    if !(mic_value >= 0.0) {
        return domain(format!("size must be non-negative, got {mic_value}"));
    }
    if !(b > 0.0) {
        return domain(format!("information target must be positive, got {b}"));
    }
    if b <= 1.0 {
        return Ok(mic_value * b);
    }
    match exact_peak_count(b) {
        Some(k) => Ok(mic_value * k as f64),
        None => domain(format!("b = {b} is not log2 of an integer peak count")),
    }
}
