//! Gaussian pointers: information against width, the variance bound and its weak limit.

use std::f64::consts::LN_2;

use macromic::{mic, mutual_information, variance_upper_bound, BranchEnsemble, ObservableSpectrum, PointerKind, PointerModel};

fn main() -> macromic::Result<()> {
    let ens = BranchEnsemble::new(vec![0.2, 0.5, 0.3], ObservableSpectrum::new(vec![0.0, 0.4, 1.0])?)?;
    println!("H(p) = {:.6} bits, V = {:.6}", ens.entropy(), ens.variance());
    println!("{:>8} {:>14} {:>14} {:>10}", "Δ", "I_Δ", "V/(2ln2Δ²)", "ratio");
    for delta in [0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0] {
        let mi = mutual_information(&ens, &PointerModel::gaussian(delta)?)?;
        let bound = variance_upper_bound(&ens, delta);
        println!("{delta:8.1} {:14.6e} {bound:14.6e} {:10.6}", mi.bits, mi.bits / bound);
    }
    let wide = 100.0 * ens.spectrum().span();
    let weak = ens.variance() / (2.0 * LN_2 * wide * wide);
    println!("\nweak limit at Δ = {wide}: I/(V/(2 ln2 Δ²)) = {:.6}", mutual_information(&ens, &PointerModel::gaussian(wide)?)?.bits / weak);

    for b in [0.01, 0.1, 0.5, 1.0] {
        let size = mic(&ens, PointerKind::Gaussian, b)?;
        println!("MIC_{b} = {:.6}", size.delta);
    }
    Ok(())
}
