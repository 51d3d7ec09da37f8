//! Adaptive 21-point Gauss–Kronrod integration (QUADPACK error model) and Gauss–Hermite nodes.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;

use crate::error::{MacromicError, Result};

// 21-point Kronrod abscissae (positive half, descending) and weights; the
// odd entries are the 10-point Gauss abscissae.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_292_418,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Result of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_subdivisions: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = 0.0;
    let mut kronrod = WGK[10] * fc;
    let mut abs_k = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let abs_k = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_k);
    }
    Segment { a, b, value, error }
}

/// Globally adaptive 21-point Gauss–Kronrod integration over `[a, b]`.
///
/// Fails with [`MacromicError::Numeric`] (carrying the partial estimate) when the
/// subdivision budget runs out before `abs` or `rel·|value|` is reached.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let first = gk21(&mut f, a, b);
    let mut evaluations = 21;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;
    while error > tol.abs.max(tol.rel * value.abs()) {
        if subdivisions >= tol.max_subdivisions {
            return Err(MacromicError::Numeric {
                message: format!("quadrature on [{a}, {b}] exhausted {subdivisions} subdivisions"),
                estimate: value,
                abs_error: error,
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        let left = gk21(&mut f, worst.a, mid);
        let right = gk21(&mut f, mid, worst.b);
        evaluations += 42;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        // Roundoff in the running sums; recompute once the budget is tight.
        if error <= tol.abs.max(tol.rel * value.abs()) {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(Integral { value, abs_error: error, evaluations })
}

/// Integrates over a union of disjoint intervals, summing values and errors.
pub fn integrate_pieces(
    mut f: impl FnMut(f64) -> f64,
    pieces: &[(f64, f64)],
    tol: Tolerance,
) -> Result<Integral> {
    let share = Tolerance {
        abs: tol.abs / pieces.len().max(1) as f64,
        ..tol
    };
    let mut total = Integral { value: 0.0, abs_error: 0.0, evaluations: 0 };
    for &(a, b) in pieces {
        let part = integrate(&mut f, a, b, share)?;
        total.value += part.value;
        total.abs_error += part.abs_error;
        total.evaluations += part.evaluations;
    }
    Ok(total)
}

/// Gauss–Hermite nodes and weights for `∫ e^{-y²} h(y) dy`.
pub fn gauss_hermite(nodes: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(nodes.max(1)).expect("positive node count");
    GaussHermite::new(degree)
        .as_node_weight_pairs()
        .to_vec()
}

/// Merges overlapping closed intervals; input need not be sorted.
pub fn merge_intervals(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| x.powi(5) - 3.0 * x * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
        assert_eq!(r.evaluations, 21);
    }

    #[test]
    fn gaussian_mass() {
        let r = integrate(|x| (-x * x).exp(), -12.0, 12.0, Tolerance::default()).unwrap();
        assert!((r.value - PI.sqrt()).abs() < 1e-13, "{r:?}");
    }

    #[test]
    fn kink_is_resolved_adaptively() {
        let r = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, Tolerance::default()).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-10);
        assert!(r.evaluations > 21);
    }

    #[test]
    fn exhausted_budget_reports_partial_estimate() {
        let tol = Tolerance { abs: 1e-300, rel: 0.0, max_subdivisions: 3 };
        match integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, tol) {
            Err(MacromicError::Numeric { estimate, .. }) => assert!((estimate - 4.0 / 3.0).abs() < 1e-3),
            other => panic!("expected numeric failure, got {other:?}"),
        }
    }

    #[test]
    fn hermite_rule_integrates_moments() {
        let rule = gauss_hermite(20);
        let m2: f64 = rule.iter().map(|&(y, w)| w * y * y).sum();
        assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-13);
    }

    #[test]
    fn merging() {
        let m = merge_intervals(vec![(3.0, 4.0), (0.0, 1.0), (0.5, 2.0)]);
        assert_eq!(m, vec![(0.0, 2.0), (3.0, 4.0)]);
    }
}
