//! Numerical convex roof for a qutrit, and the Fisher-information bound on qubit sizes.

use macromic::roof::{direct_roof_mi, mic_prime, qfi_size_bound, quantum_fisher_information};
use macromic::{mutual_information, sampling, DensityMatrix, ObservableSpectrum, PointerKind, PointerModel};

fn main() -> macromic::Result<()> {
    let mut rng = sampling::seeded(3);
    let rho = sampling::density_matrix(&mut rng, 3, 2);
    let spectrum = ObservableSpectrum::new(vec![0.0, 0.5, 1.0])?;
    let model = PointerModel::gaussian(0.4)?;
    let roof = direct_roof_mi(&rho, &spectrum, &model)?;
    let diagonal = mutual_information(&macromic::BranchEnsemble::from_populations(&rho, &spectrum)?, &model)?;
    println!("rank-2 qutrit, Δ = 0.4: roof {:.6} bits from {} starts (pure state with the same populations: {:.6})", roof.bits, roof.starts, diagonal.bits);

    let levels = ObservableSpectrum::new(vec![0.0, 1.0])?;
    let qubit = DensityMatrix::from_bloch(0.7, 0.2, 0.4)?;
    let fisher = quantum_fisher_information(&qubit, &levels)?;
    println!("\nqubit with F = {fisher:.6}");
    for b in [1e-3, 0.05, 0.1, 0.3] {
        let size = mic_prime(&qubit, &levels, PointerKind::Gaussian, b)?;
        println!("  b = {b}: MIC' = {:.6}, bound = {:.6}", size.delta, qfi_size_bound(fisher, b));
    }
    Ok(())
}
