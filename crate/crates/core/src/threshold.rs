//! Largest width `Δ` at which a quantity that decreases with `Δ` still reaches a target.

use serde::Serialize;

use crate::error::{domain, Result};

/// Values within this of the target count as reaching it (float plateaus such as `log₂ 4`).
pub const TARGET_SLACK: f64 = 1e-12;

/// Outcome of a threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MicEstimate {
    /// Largest width found; 0 when the target is unreachable.
    pub delta: f64,
    /// True when the bracket hit its upper cap before the quantity dropped below target.
    pub capped: bool,
}

impl MicEstimate {
    pub const ZERO: MicEstimate = MicEstimate { delta: 0.0, capped: false };
}

/// Bracket and tolerance policy for [`largest_width_reaching`].
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo_factor: f64,
    pub hi_factor: f64,
    pub cap_factor: f64,
    pub rel_tol: f64,
}

impl Default for Bracket {
    fn default() -> Self {
        Bracket { lo_factor: 1e-9, hi_factor: 10.0, cap_factor: 2f64.powi(60), rel_tol: 1e-10 }
    }
}

/// Largest `Δ` with `f(Δ) ≥ target`, assuming `f` is non-increasing.
///
/// `scale` sets the bracket: the search starts on `[lo·scale, hi·scale]` and doubles the
/// upper end while `f` still reaches the target. Ties go to the larger width.
pub fn largest_width_reaching(
    mut f: impl FnMut(f64) -> Result<f64>,
    target: f64,
    scale: f64,
    bracket: Bracket,
) -> Result<MicEstimate> {
    if !(target > 0.0) {
        return domain(format!("information target must be positive, got {target}"));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Ok(MicEstimate::ZERO);
    }
    let reaches = |v: f64| v >= target - TARGET_SLACK;
    let mut lo = bracket.lo_factor * scale;
    if !reaches(f(lo)?) {
        return Ok(MicEstimate::ZERO);
    }
    let cap = bracket.cap_factor * scale;
    let mut hi = bracket.hi_factor * scale;
    while reaches(f(hi)?) {
        lo = hi;
        if hi >= cap {
            return Ok(MicEstimate { delta: cap, capped: true });
        }
        hi = (2.0 * hi).min(cap);
    }
    for _ in 0..400 {
        if hi - lo <= bracket.rel_tol * hi {
            break;
        }
        // Geometric midpoint while the bracket spans decades, arithmetic afterwards.
        let mid = if hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if reaches(f(mid)?) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MicEstimate { delta: lo, capped: false })
}

/// Inverse of an increasing function on `[lo, hi]` by bisection.
pub fn invert_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if f(lo) >= target {
        return lo;
    }
    if f(hi) < target {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_hyperbolic_threshold() {
        let r = largest_width_reaching(|d| Ok(1.0 / d), 0.25, 1.0, Bracket::default()).unwrap();
        assert!((r.delta - 4.0).abs() < 1e-9);
        assert!(!r.capped);
    }

    #[test]
    fn unreachable_target_gives_zero() {
        let r = largest_width_reaching(|_| Ok(1.0), 1.5, 1.0, Bracket::default()).unwrap();
        assert_eq!(r, MicEstimate::ZERO);
    }

    #[test]
    fn plateau_end_is_found() {
        let f = |d: f64| Ok(if d <= 2.0 { 1.0 } else { 2.0 / d });
        let r = largest_width_reaching(f, 1.0, 1.0, Bracket::default()).unwrap();
        assert!((r.delta - 2.0).abs() < 1e-9);
    }

    #[test]
    fn cap_is_flagged() {
        let r = largest_width_reaching(|_| Ok(1.0), 0.5, 1.0, Bracket::default()).unwrap();
        assert!(r.capped);
        assert_eq!(r.delta, 2f64.powi(60));
    }

    #[test]
    fn rejects_non_positive_target() {
        assert!(largest_width_reaching(|_| Ok(1.0), 0.0, 1.0, Bracket::default()).is_err());
    }

    #[test]
    fn inversion() {
        let x = invert_increasing(|x| x * x, 0.25, 0.0, 1.0, 1e-12);
        assert!((x - 0.5).abs() < 1e-11);
    }
}
