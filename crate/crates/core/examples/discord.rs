//! Discord-type measure C_Δ: two evaluation routes, the weak-pointer limit and its size.

use macromic::discord::{c_delta, mic_tilde, qmi_breakdown, weak_limit_coefficient, weak_limit_coefficient_estimate};
use macromic::{sampling, ObservableSpectrum};

fn main() -> macromic::Result<()> {
    let mut rng = sampling::seeded(5);
    let rho = sampling::density_matrix(&mut rng, 3, 2);
    let spectrum = ObservableSpectrum::new(vec![0.0, 0.3, 1.0])?;
    for delta in [0.1, 0.5, 2.0] {
        let q = qmi_breakdown(&rho, &spectrum, delta)?;
        println!(
            "Δ = {delta}: C_Δ = {:.9}, quantum − classical = {:.9}",
            c_delta(&rho, &spectrum, delta)?,
            q.difference()
        );
    }
    let exact = weak_limit_coefficient(&rho, &spectrum)?;
    let fitted = weak_limit_coefficient_estimate(&rho, &spectrum, 100.0)?;
    println!("\nweak-pointer coefficient: exact {exact:.6}, from C at Δ = 100 and 200 {fitted:.6}");
    println!("size at b = 0.05: {:.6}", mic_tilde(&rho, &spectrum, 0.05)?.delta);
    Ok(())
}
