//! Numerical convex roofs: minimize `Σ q_k f(Ψ_k)` over pure-state decompositions.
//!
//! Decompositions of a rank-`r` state with eigenpairs `(λ_j, e_j)` are parametrized by an
//! `n × r` complex matrix `W`: with `U = W (W†W)^{−1/2}` the vectors
//! `ψ̃_i = Σ_j U_ij √λ_j e_j` always mix back to `ρ`. Extremal decompositions need at
//! most `n = r²` elements, all rank-one.

use argmin::core::{CostFunction, Error as ArgminError, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::RngExt;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MacromicError, Result};
use crate::linalg::{self, c, CMatrix, CVector, EIGEN_FLOOR};
use crate::mutual_info::{mutual_information_with, MicEstimate};
use crate::pointers::{PointerKind, PointerModel};
use crate::quadrature::Tolerance;
use crate::roof::decomposition::EnsembleDecomposition;
use crate::sampling;
use crate::spectra::{DensityMatrix, ObservableSpectrum, PureState};
use crate::threshold::{largest_width_reaching, Bracket};

/// Largest dimension handled by the numerical search.
pub const MAX_SEARCH_DIM: usize = 4;

/// Multistart settings.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SearchOptions {
    pub starts: usize,
    pub max_iters: u64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { starts: 32, max_iters: 4000, seed: 0x5eed }
    }
}

/// Best decomposition found by the search.
#[derive(Debug, Clone)]
pub struct RoofSearch {
    pub value: f64,
    pub decomposition: EnsembleDecomposition,
    pub starts: usize,
}

/// Eigen-data of the state restricted to its support.
struct Support {
    dim: usize,
    rank: usize,
    scaled: Vec<CVector>,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Support {
        let (values, vectors) = linalg::eigh(rho.entries());
        let scaled: Vec<CVector> = values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > EIGEN_FLOOR)
            .map(|(j, &l)| vectors.column(j).scale(l.sqrt()))
            .collect();
        Support { dim: rho.dim(), rank: scaled.len(), scaled }
    }

    fn elements(&self) -> usize {
        self.rank * self.rank
    }

    fn params(&self) -> usize {
        2 * self.elements() * self.rank
    }

    /// Maps parameters to (weight, normalized vector) pairs; `None` if `W` is rank deficient.
    fn decode(&self, p: &[f64]) -> Option<Vec<(f64, CVector)>> {
        let (n, r) = (self.elements(), self.rank);
        let w = CMatrix::from_fn(n, r, |i, j| c(p[2 * (i * r + j)], p[2 * (i * r + j) + 1]));
        let u = &w * linalg::inv_sqrt(&(w.adjoint() * &w))?;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut v = CVector::zeros(self.dim);
            for j in 0..r {
                v += &self.scaled[j] * u[(i, j)];
            }
            let q = v.norm_squared();
            if q > 1e-14 {
                out.push((q, v.unscale(q.sqrt())));
            }
        }
        Some(out)
    }

    /// Parameters of the spectral decomposition (`W` = first `r` rows of the identity).
    fn spectral_start(&self) -> Vec<f64> {
        let r = self.rank;
        let mut p = vec![0.0; self.params()];
        for j in 0..r {
            p[2 * (j * r + j)] = 1.0;
        }
        p
    }
}

struct Objective<'a, F> {
    support: &'a Support,
    f: &'a F,
}

impl<F> CostFunction for Objective<'_, F>
where
    F: Fn(&PureState) -> Result<f64> + Sync,
{
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        match self.support.decode(p) {
            None => Ok(f64::INFINITY),
            Some(parts) => {
                let mut total = 0.0;
                for (q, v) in parts {
                    let state = PureState::normalized(v).map_err(|e| ArgminError::msg(e.to_string()))?;
                    total += q * (self.f)(&state).map_err(|e| ArgminError::msg(e.to_string()))?;
                }
                Ok(total)
            }
        }
    }
}

fn finish(support: &Support, p: &[f64]) -> Result<EnsembleDecomposition> {
    let parts = support.decode(p).ok_or_else(|| MacromicError::Numeric {
        message: "search ended on a degenerate parametrization".into(),
        estimate: f64::NAN,
        abs_error: f64::INFINITY,
    })?;
    let total: f64 = parts.iter().map(|(q, _)| q).sum();
    let mut weights = Vec::with_capacity(parts.len());
    let mut states = Vec::with_capacity(parts.len());
    for (q, v) in parts {
        weights.push(q / total);
        states.push(PureState::normalized(v)?);
    }
    EnsembleDecomposition::new(weights, states)
}

/// Multistart Nelder–Mead over rank-one decompositions of `rho`, minimizing the average of `f`.
///
/// Start 0 is the spectral decomposition; the others are Gaussian random. Starts run in
/// parallel and are combined by a min-reduction that breaks ties by start index, so the
/// result does not depend on scheduling. The value is an upper bound on the true roof.
pub fn search_roof<F>(rho: &DensityMatrix, f: &F, opts: SearchOptions) -> Result<RoofSearch>
where
    F: Fn(&PureState) -> Result<f64> + Sync,
{
    if rho.dim() > MAX_SEARCH_DIM {
        return Err(MacromicError::Unsupported(format!(
            "numerical roof search is limited to dimension {MAX_SEARCH_DIM}, got {}",
            rho.dim()
        )));
    }
    let support = Support::of(rho);
    if support.rank <= 1 {
        let state = PureState::normalized(support.scaled[0].clone())?;
        let value = f(&state)?;
        return Ok(RoofSearch { value, decomposition: EnsembleDecomposition::new(vec![1.0], vec![state])?, starts: 0 });
    }
    let results: Vec<(usize, f64, Vec<f64>)> = (0..opts.starts.max(1))
        .into_par_iter()
        .map(|start| {
            let x0 = if start == 0 {
                support.spectral_start()
            } else {
                let mut rng = sampling::trial_rng(opts.seed, start as u64);
                (0..support.params()).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
            };
            let mut simplex = vec![x0.clone()];
            for i in 0..x0.len() {
                let mut v = x0.clone();
                v[i] += 0.5;
                simplex.push(v);
            }
            let solver = NelderMead::new(simplex).with_sd_tolerance(1e-12).expect("positive tolerance");
            let objective = Objective { support: &support, f };
            let outcome = Executor::new(objective, solver).configure(|s| s.max_iters(opts.max_iters)).run();
            match outcome {
                Ok(res) => {
                    let state = res.state();
                    let best = state.get_best_param().cloned().unwrap_or(x0);
                    (start, state.get_best_cost(), best)
                }
                Err(_) => (start, f64::INFINITY, x0),
            }
        })
        .collect();
    let (_, value, params) = results
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    if !value.is_finite() {
        return Err(MacromicError::Numeric {
            message: "every roof search start failed".into(),
            estimate: value,
            abs_error: f64::INFINITY,
        });
    }
    Ok(RoofSearch { value, decomposition: finish(&support, &params)?, starts: opts.starts })
}

/// Direct convex roof of the pointer information.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RoofMi {
    pub bits: f64,
    /// True when the qubit reduction (or a pure input) gives the exact roof.
    pub exact: bool,
    /// Multistarts used by the numerical search (0 on the exact path).
    pub starts: usize,
}

const SEARCH_TOL: Tolerance = Tolerance { abs: 1e-11, rel: 1e-9, max_subdivisions: 2000 };

fn pure_mi(state: &PureState, spectrum: &ObservableSpectrum, model: &PointerModel, tol: Tolerance) -> Result<f64> {
    Ok(mutual_information_with(&state.ensemble(spectrum)?, model, tol)?.bits)
}

/// Pure two-level state with off-diagonal modulus `x⊥/2`; for a qubit its information
/// is the exact roof, since the pure-state information is convex and non-decreasing in `x`.
fn transverse_pure_state(rho: &DensityMatrix) -> Result<PureState> {
    let x = (2.0 * rho.entries()[(0, 1)].norm()).min(1.0);
    let p = 0.5 * (1.0 + (1.0 - x * x).sqrt());
    PureState::new(CVector::from_vec(vec![c(p.sqrt(), 0.0), c((1.0 - p).sqrt(), 0.0)]))
}

/// `min Σ q_k I_Δ(Ψ_k)` over decompositions of `rho`.
///
/// Qubits reduce exactly to the pure state with the same transverse coherence. Pure inputs
/// are evaluated directly. Dimensions 3 and 4 use [`search_roof`] and return an upper bound.
pub fn direct_roof_mi(rho: &DensityMatrix, spectrum: &ObservableSpectrum, model: &PointerModel) -> Result<RoofMi> {
    direct_roof_mi_with(rho, spectrum, model, SearchOptions::default())
}

pub fn direct_roof_mi_with(
    rho: &DensityMatrix,
    spectrum: &ObservableSpectrum,
    model: &PointerModel,
    opts: SearchOptions,
) -> Result<RoofMi> {
    spectrum.check_dim(rho.dim())?;
    if rho.dim() == 2 {
        let bits = pure_mi(&transverse_pure_state(rho)?, spectrum, model, Tolerance::default())?;
        return Ok(RoofMi { bits, exact: true, starts: 0 });
    }
    if rho.rank() <= 1 {
        let state = rho_top_state(rho)?;
        return Ok(RoofMi { bits: pure_mi(&state, spectrum, model, Tolerance::default())?, exact: true, starts: 0 });
    }
    let f = |s: &PureState| pure_mi(s, spectrum, model, SEARCH_TOL);
    let found = search_roof(rho, &f, opts)?;
    Ok(RoofMi { bits: found.value, exact: false, starts: found.starts })
}

fn rho_top_state(rho: &DensityMatrix) -> Result<PureState> {
    let (values, vectors) = linalg::eigh(rho.entries());
    PureState::normalized(vectors.column(values.len() - 1).into_owned())
}

/// `MIC′_b`: largest `Δ` at which the roof information still reaches `b`.
pub fn mic_prime(rho: &DensityMatrix, spectrum: &ObservableSpectrum, kind: PointerKind, b: f64) -> Result<MicEstimate> {
    mic_prime_with(rho, spectrum, kind, b, SearchOptions::default())
}

pub fn mic_prime_with(
    rho: &DensityMatrix,
    spectrum: &ObservableSpectrum,
    kind: PointerKind,
    b: f64,
    opts: SearchOptions,
) -> Result<MicEstimate> {
    spectrum.check_dim(rho.dim())?;
    if rho.dim() == 2 {
        let ens = transverse_pure_state(rho)?.ensemble(spectrum)?;
        return crate::mutual_info::mic(&ens, kind, b);
    }
    largest_width_reaching(
        |d| Ok(direct_roof_mi_with(rho, spectrum, &PointerModel::new(kind, d)?, opts)?.bits),
        b,
        spectrum.span(),
        Bracket { rel_tol: 1e-7, ..Bracket::default() },
    )
}
