//! Seeded random states, ensembles and channels for property checks and sweeps.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, inv_sqrt, CMatrix, CVector};
use crate::spectra::{BranchEnsemble, DensityMatrix, ObservableSpectrum, PureState};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// `rows × cols` matrix of independent standard complex Gaussians.
pub fn ginibre(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| c(normal(rng), normal(rng)))
}

/// Uniform point on the probability simplex.
pub fn probability_vector(rng: &mut Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = e.iter().sum();
    e.into_iter().map(|x| x / total).collect()
}

/// `n` distinct sorted eigenvalues in `[0, span]` including both ends.
pub fn spectrum(rng: &mut Rng, n: usize, span: f64) -> ObservableSpectrum {
    loop {
        let mut a: Vec<f64> = (0..n).map(|i| match i {
            0 => 0.0,
            1 => span,
            _ => rng.random::<f64>() * span,
        }).collect();
        a.sort_by(f64::total_cmp);
        if let Ok(s) = ObservableSpectrum::new(a) {
            return s;
        }
    }
}

pub fn ensemble(rng: &mut Rng, n: usize, span: f64) -> BranchEnsemble {
    BranchEnsemble::new(probability_vector(rng, n), spectrum(rng, n, span)).expect("simplex sample")
}

/// Haar-random pure state.
pub fn pure_state(rng: &mut Rng, dim: usize) -> PureState {
    let v = CVector::from_fn(dim, |_, _| c(normal(rng), normal(rng)));
    PureState::normalized(v).expect("non-zero Gaussian vector")
}

/// Induced-measure random state of the given rank.
pub fn density_matrix(rng: &mut Rng, dim: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, rank.clamp(1, dim));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).expect("Wishart sample is a state")
}

/// Full-rank random state (Hilbert–Schmidt measure).
pub fn full_rank_state(rng: &mut Rng, dim: usize) -> DensityMatrix {
    density_matrix(rng, dim, dim)
}

/// Random Kraus operators `K_1..K_m` on dimension `dim`, from a random isometry.
pub fn kraus_operators(rng: &mut Rng, dim: usize, count: usize) -> Vec<CMatrix> {
    let g = ginibre(rng, dim * count, dim);
    let v = &g * inv_sqrt(&(g.adjoint() * &g)).expect("Gaussian matrix has full column rank");
    (0..count).map(|x| v.rows(x * dim, dim).into_owned()).collect()
}

/// Random covariant Kraus set for equally spaced levels `0..dim` (unit spacing): each
/// operator shifts by an integer `δ` and carries random coefficients on that diagonal.
/// The shift-zero operator is always present so the set can be normalized.
pub fn covariant_kraus(rng: &mut Rng, dim: usize, count: usize) -> Vec<(i64, CMatrix)> {
    let d = dim as i64;
    let mut shifts = vec![0i64];
    for _ in 1..count.max(1) {
        shifts.push(rng.random_range(-(d - 1)..=(d - 1)));
    }
    let mut ops: Vec<(i64, CMatrix)> = shifts
        .into_iter()
        .map(|s| {
            let m = CMatrix::from_fn(dim, dim, |i, j| {
                if i as i64 - j as i64 == s { c(normal(rng), normal(rng)) } else { c(0.0, 0.0) }
            });
            (s, m)
        })
        .collect();
    let mut norm = vec![0.0; dim];
    for (_, k) in &ops {
        for (j, n) in norm.iter_mut().enumerate() {
            *n += k.column(j).norm_squared();
        }
    }
    for (_, k) in &mut ops {
        for (j, n) in norm.iter().enumerate() {
            k.column_mut(j).unscale_mut(n.sqrt());
        }
    }
    ops
}

/// Uniform point in the XZ Bloch disk.
pub fn bloch_xz(rng: &mut Rng) -> (f64, f64) {
    loop {
        let (x, z) = (2.0 * rng.random::<f64>() - 1.0, 2.0 * rng.random::<f64>() - 1.0);
        if x * x + z * z <= 1.0 {
            return (x, z);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kraus_sets_are_complete() {
        let mut rng = seeded(7);
        let ks = kraus_operators(&mut rng, 3, 5);
        let sum = ks.iter().fold(CMatrix::zeros(3, 3), |acc, k| acc + k.adjoint() * k);
        assert!(crate::linalg::max_abs_diff(&sum, &CMatrix::identity(3, 3)) < 1e-12);
    }

    #[test]
    fn covariant_sets_are_complete_and_banded() {
        let mut rng = seeded(3);
        let ks = covariant_kraus(&mut rng, 4, 4);
        let sum = ks.iter().fold(CMatrix::zeros(4, 4), |acc, (_, k)| acc + k.adjoint() * k);
        assert!(crate::linalg::max_abs_diff(&sum, &CMatrix::identity(4, 4)) < 1e-12);
        for (s, k) in &ks {
            for i in 0..4 {
                for j in 0..4 {
                    if i as i64 - j as i64 != *s {
                        assert_eq!(k[(i, j)], c(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn seeds_reproduce() {
        let a = density_matrix(&mut seeded(11), 3, 2);
        let b = density_matrix(&mut seeded(11), 3, 2);
        assert_eq!(a, b);
        assert_eq!(a.rank(), 2);
    }

    #[test]
    fn trial_streams_differ() {
        let a: f64 = trial_rng(1, 0).random();
        let b: f64 = trial_rng(1, 1).random();
        assert_ne!(a, b);
    }
}
