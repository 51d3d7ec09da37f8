//! Branch ensembles, superpositions and micro-macro states with their entropies.

use macromic::{
    dephase_fully, shannon_entropy, superposition_state, von_neumann_entropy, BranchEnsemble, MicroMacroState,
    ObservableSpectrum,
};

fn main() -> macromic::Result<()> {
    let ens = BranchEnsemble::new(vec![0.5, 0.3, 0.2], ObservableSpectrum::new(vec![0.0, 1.0, 4.0])?)?;
    println!("mean {:.3}, variance {:.3}, H(p) {:.6} bits", ens.mean(), ens.variance(), ens.entropy());

    let psi = superposition_state(&ens);
    let rho = psi.density_matrix();
    let full = dephase_fully(&rho);
    println!("superposition: S(ρ) = {:.2e}, S(𝒢ρ) = {:.6}", von_neumann_entropy(&rho), von_neumann_entropy(&full));
    println!("populations give back H(p): {:.6}", shannon_entropy(&full.populations())?);

    let state = MicroMacroState::from_ensemble(ens);
    let joint = state.joint_state();
    println!("micro-macro joint state: dim {}, purity {:.6}", joint.dim(), joint.purity());
    Ok(())
}
