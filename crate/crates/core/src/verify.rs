//! Randomized invariant suites. Each trial returns a slack: the distance to violating the
//! invariant at its tolerance, so a trial fails when its slack is negative.

use std::f64::consts::LN_2;

use rand::RngExt;
use rayon::prelude::*;
use serde::Serialize;

use crate::discord::{c_delta, c_delta_via_qmi, covariant_channel, CovariantKraus};
use crate::error::{domain, Result};
use crate::fragility::{
    distillable_after_dephasing, ef_decay_bound_check, relative_entropy_coherence, KrausChannel, DEFAULT_NODES,
};
use crate::linalg;
use crate::mutual_info::{mic, mutual_information, variance_upper_bound};
use crate::peaks::{outcome_class_probs, peaks_mi, PeaksFamily};
use crate::pointers::{DephasingChannel, PointerKind, PointerModel};
use crate::roof::{mic_prime, pure_mic_2peak, qfi_size_bound, quantum_fisher_information, roof_mic_2peak, BlochStateXZ};
use crate::sampling::{self, Rng};
use crate::spectra::{
    dephase_fully, shannon_entropy, von_neumann_entropy, BranchEnsemble, DensityMatrix, MicroMacroState,
    ObservableSpectrum, PureState,
};

type TrialFn = fn(&mut Rng) -> Result<f64>;

/// A named randomized check.
#[derive(Clone, Copy)]
pub struct Suite {
    pub name: &'static str,
    pub about: &'static str,
    pub default_trials: usize,
    trial: TrialFn,
}

impl std::fmt::Debug for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Suite").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    /// Smallest slack over trials that completed; `null` when none did.
    pub worst_slack: Option<f64>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

const fn suite(name: &'static str, about: &'static str, default_trials: usize, trial: TrialFn) -> Suite {
    Suite { name, about, default_trials, trial }
}

pub const SUITES: &[Suite] = &[
    suite("entropy-dephasing", "full dephasing never lowers von Neumann entropy", 200, entropy_dephasing),
    suite("dephasing-semigroup", "composition of widths alpha, beta equals width gamma", 100, dephasing_semigroup),
    suite("dephasing-scale", "dephasing is invariant under joint rescaling", 100, dephasing_scale),
    suite("dephasing-commute", "partial and full dephasing commute and compose to full", 100, dephasing_commute),
    suite("dephasing-trace", "partial dephasing preserves trace and Hermiticity exactly", 100, dephasing_trace),
    suite("unitary-mixture", "kick-average representation matches the entrywise formula", 100, unitary_mixture),
    suite("variance-bound", "Gaussian pointer information stays below V/(2 ln2 delta^2)", 1000, variance_bound),
    suite("mi-monotone", "Gaussian pointer information falls with delta", 100, mi_monotone),
    suite("mi-scale", "information is unchanged under joint rescaling", 100, mi_scale),
    suite("mic-consistency", "information at the computed MIC equals the target", 100, mic_consistency),
    suite("peaks-engine", "peak-family closed form equals the square-pointer engine", 240, peaks_engine),
    suite("outcome-probs", "peak outcome classes sum to one", 200, outcome_probs),
    suite("qfi-bound", "qubit MIC is bounded by the Fisher information", 200, qfi_bound),
    suite("roof-dominance", "qubit roof lies below explicit decompositions", 200, roof_dominance),
    suite("roof-monotone", "qubit roof grows with x at fixed z", 200, roof_monotone),
    suite("xz-reduction", "qubit MIC depends only on transverse coherence", 100, xz_reduction),
    suite("discord-equivalence", "entropy and mutual-information routes to C_delta agree", 100, discord_equivalence),
    suite("discord-pure-ordering", "C_delta dominates pointer information on pure states", 100, discord_pure_ordering),
    suite("discord-covariant", "covariant channels do not raise C_delta", 100, discord_covariant),
    suite("discord-convexity", "C_delta is convex along mixing segments", 100, discord_convexity),
    suite("discord-monotone", "C_delta falls with delta", 100, discord_monotone),
    suite("ef-decay", "environment information bounds entanglement decay", 500, ef_decay),
    suite("weak-noise-ef", "weak Gaussian noise costs at most V/(2 ln2 delta^2)", 100, weak_noise_ef),
    suite("ed-chain", "distillable entanglement equals coherence of the dephased state", 100, ed_chain),
];

pub fn find_suite(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

/// Runs `trials` trials of a suite; trial `i` draws from `trial_rng(seed, i)`, so reports
/// are independent of thread count.
pub fn run_suite(suite: &Suite, trials: usize, seed: u64) -> VerifyReport {
    let slacks: Vec<Option<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| (suite.trial)(&mut sampling::trial_rng(seed, i)).ok().filter(|s| !s.is_nan()))
        .collect();
    let failures = slacks.iter().filter(|s| s.is_none_or(|v| v < 0.0)).count();
    let worst_slack = slacks.iter().flatten().copied().reduce(f64::min);
    VerifyReport { suite: suite.name.to_owned(), trials, failures, worst_slack }
}

pub fn run_named(name: &str, trials: Option<usize>, seed: u64) -> Result<VerifyReport> {
    match find_suite(name) {
        Some(s) => Ok(run_suite(s, trials.unwrap_or(s.default_trials), seed)),
        None => domain(format!("unknown suite {name:?}")),
    }
}

fn dim(rng: &mut Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

fn random_state(rng: &mut Rng, lo: usize, hi: usize) -> DensityMatrix {
    let d = dim(rng, lo, hi);
    let rank = rng.random_range(1..=d);
    sampling::density_matrix(rng, d, rank)
}

fn random_ensemble(rng: &mut Rng, lo: usize, hi: usize) -> BranchEnsemble {
    let n = dim(rng, lo, hi);
    sampling::ensemble(rng, n, 1.0)
}

fn random_pure(rng: &mut Rng, lo: usize, hi: usize) -> PureState {
    let d = dim(rng, lo, hi);
    sampling::pure_state(rng, d)
}

fn log_uniform(rng: &mut Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

fn entropy_dephasing(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 5);
    let dephased = dephase_fully(&rho);
    let exact = (shannon_entropy(&rho.populations())? - von_neumann_entropy(&dephased)).abs();
    Ok((von_neumann_entropy(&dephased) - von_neumann_entropy(&rho) + 1e-12).min(1e-12 - exact))
}

fn dephasing_semigroup(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 5);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let (alpha, beta) = (log_uniform(rng, 0.05, 5.0), log_uniform(rng, 0.05, 5.0));
    let (a, b) = (DephasingChannel::new(alpha)?, DephasingChannel::new(beta)?);
    let twice = a.apply(&b.apply(&rho, &spectrum)?, &spectrum)?;
    let gamma = DephasingChannel::new((alpha.powi(-2) + beta.powi(-2)).powf(-0.5))?;
    Ok(1e-12 - twice.max_entry_distance(&gamma.apply(&rho, &spectrum)?))
}

fn dephasing_scale(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 5);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let delta = log_uniform(rng, 0.05, 5.0);
    let alpha = log_uniform(rng, 0.01, 100.0);
    let base = DephasingChannel::new(delta)?.apply(&rho, &spectrum)?;
    let scaled = DephasingChannel::new(alpha * delta)?.apply(&rho, &spectrum.scaled(alpha)?)?;
    Ok(1e-12 - base.max_entry_distance(&scaled))
}

fn dephasing_commute(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 5);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let phi = DephasingChannel::new(log_uniform(rng, 0.05, 5.0))?;
    let full = dephase_fully(&rho);
    let left = dephase_fully(&phi.apply(&rho, &spectrum)?);
    let right = phi.apply(&full, &spectrum)?;
    Ok(1e-12 - left.max_entry_distance(&full).max(right.max_entry_distance(&full)))
}

fn dephasing_trace(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 5);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let out = DephasingChannel::new(log_uniform(rng, 0.01, 10.0))?.apply(&rho, &spectrum)?;
    let trace_defect = (linalg::trace(out.entries()) - linalg::trace(rho.entries())).norm();
    Ok(-(trace_defect + linalg::hermiticity_defect(out.entries())))
}

fn unitary_mixture(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 5);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let phi = DephasingChannel::new(log_uniform(rng, 0.2, 5.0))?;
    let mixture = phi.apply_by_unitary_mixture(&rho, &spectrum, 80)?;
    Ok(1e-8 - mixture.max_entry_distance(&phi.apply(&rho, &spectrum)?))
}

fn variance_bound(rng: &mut Rng) -> Result<f64> {
    let ens = random_ensemble(rng, 2, 6);
    let mut worst = f64::INFINITY;
    for delta in [0.1, 0.3, 1.0, 3.0, 10.0] {
        let mi = mutual_information(&ens, &PointerModel::gaussian(delta)?)?;
        worst = worst.min(variance_upper_bound(&ens, delta) - mi.bits + 1e-7 + mi.est_abs_error);
    }
    Ok(worst)
}

fn mi_monotone(rng: &mut Rng) -> Result<f64> {
    let ens = random_ensemble(rng, 2, 5);
    let mut worst = f64::INFINITY;
    for _ in 0..10 {
        let (d1, d2) = (log_uniform(rng, 0.05, 20.0), log_uniform(rng, 0.05, 20.0));
        let (lo, hi) = (d1.min(d2), d1.max(d2));
        let a = mutual_information(&ens, &PointerModel::gaussian(lo)?)?;
        let b = mutual_information(&ens, &PointerModel::gaussian(hi)?)?;
        worst = worst.min(a.bits - b.bits + a.est_abs_error + b.est_abs_error + 1e-12);
    }
    Ok(worst)
}

fn mi_scale(rng: &mut Rng) -> Result<f64> {
    let ens = random_ensemble(rng, 2, 5);
    let kind = if rng.random::<bool>() { PointerKind::Gaussian } else { PointerKind::Square };
    let delta = log_uniform(rng, 0.05, 20.0);
    let alpha = log_uniform(rng, 0.01, 100.0);
    let base = mutual_information(&ens, &PointerModel::new(kind, delta)?)?.bits;
    let scaled = mutual_information(&ens.scaled(alpha)?, &PointerModel::new(kind, alpha * delta)?)?.bits;
    Ok(1e-9 - (base - scaled).abs())
}

fn mic_consistency(rng: &mut Rng) -> Result<f64> {
    let ens = random_ensemble(rng, 2, 5);
    let kind = if rng.random::<bool>() { PointerKind::Gaussian } else { PointerKind::Square };
    let b = ens.entropy() * (0.05 + 0.9 * rng.random::<f64>());
    let m = mic(&ens, kind, b)?;
    if m.delta == 0.0 {
        return Ok(1e-5);
    }
    let at = mutual_information(&ens, &PointerModel::new(kind, m.delta)?)?.bits;
    Ok(1e-5 - (at - b).abs())
}

fn peaks_engine(rng: &mut Rng) -> Result<f64> {
    let k = rng.random_range(1..=12);
    let family = PeaksFamily::new(k, log_uniform(rng, 0.1, 10.0))?;
    let delta = family.span * log_uniform(rng, 0.01, 10.0);
    let engine = mutual_information(&family.ensemble()?, &PointerModel::square(delta)?)?.bits;
    Ok(1e-9 - (peaks_mi(delta, family.span, family.k) - engine).abs())
}

fn outcome_probs(rng: &mut Rng) -> Result<f64> {
    let probs = outcome_class_probs(log_uniform(rng, 0.01, 10.0), rng.random_range(1..=64))?;
    Ok(1e-12 - (probs.iter().sum::<f64>() - 1.0).abs())
}

fn qubit_levels() -> ObservableSpectrum {
    ObservableSpectrum::new(vec![0.0, 1.0]).expect("two increasing levels")
}

fn qfi_bound(rng: &mut Rng) -> Result<f64> {
    let rho = sampling::full_rank_state(rng, 2);
    let b = [0.05, 0.1, 0.3][rng.random_range(0..3)];
    let spectrum = qubit_levels();
    let bound = qfi_size_bound(quantum_fisher_information(&rho, &spectrum)?, b);
    let m = mic_prime(&rho, &spectrum, PointerKind::Gaussian, b)?;
    Ok(bound - m.delta + 1e-8 * bound.max(1e-3))
}

fn interior_point(rng: &mut Rng) -> (f64, f64) {
    loop {
        let (x, z) = sampling::bloch_xz(rng);
        if x * x + z * z < 1.0 - 1e-6 {
            return (x, z);
        }
    }
}

fn roof_dominance(rng: &mut Rng) -> Result<f64> {
    let (x, z) = interior_point(rng);
    let b = log_uniform(rng, 0.01, 0.9);
    let theta = std::f64::consts::PI * rng.random::<f64>();
    let (ux, uz) = (theta.cos(), theta.sin());
    // chord through (x, z) along (ux, uz): t² + 2t(x ux + z uz) + x² + z² − 1 = 0
    let proj = x * ux + z * uz;
    let root = (proj * proj - x * x - z * z + 1.0).sqrt();
    let (t1, t2) = (-proj + root, -proj - root);
    let q1 = -t2 / (t1 - t2);
    let (n1, n2) = (x + t1 * ux, x + t2 * ux);
    let decomposition = q1 * pure_mic_2peak(n1.abs(), b, 1.0)? + (1.0 - q1) * pure_mic_2peak(n2.abs(), b, 1.0)?;
    let roof = roof_mic_2peak(&BlochStateXZ::new(x, z, 1.0)?, b)?;
    Ok(decomposition - roof + 1e-9 * decomposition.max(1.0))
}

fn roof_monotone(rng: &mut Rng) -> Result<f64> {
    let (x, z) = interior_point(rng);
    let edge = (1.0 - z * z).sqrt();
    let x2 = x.abs() + rng.random::<f64>() * (edge - x.abs());
    let b = log_uniform(rng, 0.01, 0.9);
    let lo = roof_mic_2peak(&BlochStateXZ::new(x.abs(), z, 1.0)?, b)?;
    let hi = roof_mic_2peak(&BlochStateXZ::new(x2, z, 1.0)?, b)?;
    Ok(hi - lo + 1e-9 * hi.max(1.0))
}

fn xz_reduction(rng: &mut Rng) -> Result<f64> {
    let rho = sampling::full_rank_state(rng, 2);
    let m = rho.entries();
    let (x, y, z) = (2.0 * m[(0, 1)].re, -2.0 * m[(0, 1)].im, (m[(0, 0)] - m[(1, 1)]).re);
    let b = log_uniform(rng, 0.01, 0.9);
    let spectrum = qubit_levels();
    let original = mic_prime(&rho, &spectrum, PointerKind::Gaussian, b)?.delta;
    let mirrored = mic_prime(&DensityMatrix::from_bloch(x, -y, z)?, &spectrum, PointerKind::Gaussian, b)?.delta;
    let rotated = mic_prime(&DensityMatrix::from_bloch(x.hypot(y), 0.0, z)?, &spectrum, PointerKind::Gaussian, b)?.delta;
    let tol = 1e-9 * original.max(1e-3);
    Ok(tol - (original - mirrored).abs().max((original - rotated).abs()))
}

fn discord_equivalence(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 3);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let delta = log_uniform(rng, 0.05, 20.0);
    Ok(1e-9 - (c_delta(&rho, &spectrum, delta)? - c_delta_via_qmi(&rho, &spectrum, delta)?).abs())
}

fn discord_pure_ordering(rng: &mut Rng) -> Result<f64> {
    let psi = random_pure(rng, 2, 4);
    let spectrum = sampling::spectrum(rng, psi.dim(), 1.0);
    let delta = log_uniform(rng, 0.05, 20.0);
    let mi = mutual_information(&psi.ensemble(&spectrum)?, &PointerModel::gaussian(delta)?)?;
    Ok(c_delta(&psi.density_matrix(), &spectrum, delta)? - mi.bits + mi.est_abs_error + 1e-10)
}

fn unit_levels(d: usize) -> Result<ObservableSpectrum> {
    ObservableSpectrum::new((0..d).map(|i| i as f64).collect())
}

fn discord_covariant(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 4);
    let spectrum = unit_levels(rho.dim())?;
    let count = rng.random_range(1..=4);
    let ops = sampling::covariant_kraus(rng, rho.dim(), count)
        .into_iter()
        .map(|(shift, m)| CovariantKraus::new(shift as f64, m, &spectrum))
        .collect::<Result<Vec<_>>>()?;
    let out = covariant_channel(&rho, &spectrum, &ops)?;
    let delta = log_uniform(rng, 0.05, 20.0);
    Ok(c_delta(&rho, &spectrum, delta)? - c_delta(&out, &spectrum, delta)? + 1e-10)
}

fn discord_convexity(rng: &mut Rng) -> Result<f64> {
    let d = dim(rng, 2, 4);
    let rank = rng.random_range(1..=d);
    let (r1, r2) = (sampling::density_matrix(rng, d, rank), sampling::full_rank_state(rng, d));
    let spectrum = sampling::spectrum(rng, d, 1.0);
    let delta = log_uniform(rng, 0.05, 20.0);
    let (c1, c2) = (c_delta(&r1, &spectrum, delta)?, c_delta(&r2, &spectrum, delta)?);
    let mut worst = f64::INFINITY;
    for i in 1..=9 {
        let lambda = i as f64 / 10.0;
        let mixed = c_delta(&r1.mix(&r2, lambda)?, &spectrum, delta)?;
        worst = worst.min(lambda * c1 + (1.0 - lambda) * c2 - mixed + 1e-10);
    }
    Ok(worst)
}

fn discord_monotone(rng: &mut Rng) -> Result<f64> {
    let rho = random_state(rng, 2, 4);
    let spectrum = sampling::spectrum(rng, rho.dim(), 1.0);
    let (d1, d2) = (log_uniform(rng, 0.05, 20.0), log_uniform(rng, 0.05, 20.0));
    let (lo, hi) = (d1.min(d2), d1.max(d2));
    Ok(c_delta(&rho, &spectrum, lo)? - c_delta(&rho, &spectrum, hi)? + 1e-10)
}

fn ef_decay(rng: &mut Rng) -> Result<f64> {
    let state = MicroMacroState::from_ensemble(sampling::ensemble(rng, 3, 1.0));
    let channel = KrausChannel::new(sampling::kraus_operators(rng, 3, 5))?;
    Ok(ef_decay_bound_check(&state, &channel)?.slack() + 1e-10)
}

fn weak_noise_ef(rng: &mut Rng) -> Result<f64> {
    let ens = random_ensemble(rng, 2, 4);
    let delta = rng.random_range(20.0..50.0);
    let state = MicroMacroState::from_ensemble(ens);
    let channel = KrausChannel::gaussian_dephasing(state.spectrum(), delta, DEFAULT_NODES)?;
    let check = ef_decay_bound_check(&state, &channel)?;
    let floor = state.ensemble().entropy() - state.ensemble().variance() / (2.0 * LN_2 * delta * delta);
    Ok(check.avg_branch_entropy - floor + 1e-8)
}

fn ed_chain(rng: &mut Rng) -> Result<f64> {
    let state = MicroMacroState::from_ensemble(random_ensemble(rng, 2, 5));
    let delta = log_uniform(rng, 0.01, 20.0);
    let dephased = DephasingChannel::new(delta)?.apply(&state.branch_matrix(), state.spectrum())?;
    let chain = relative_entropy_coherence(&dephased);
    Ok(1e-10 - (distillable_after_dephasing(&state, delta)? - chain).abs())
}
