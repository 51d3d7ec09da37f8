//! Micro–macro entanglement under an environment that reads the macroscopic observable.

use macromic::fragility::{
    distillable_after_dephasing, ef_decay_bound_check, ef_micro_macro, environment_mi, KrausChannel, DEFAULT_NODES,
};
use macromic::{sampling, MicroMacroState, ObservableSpectrum};

fn main() -> macromic::Result<()> {
    let state = MicroMacroState::new(vec![0.25, 0.25, 0.5], ObservableSpectrum::new(vec![0.0, 1.0, 2.0])?)?;
    println!("E_F = {:.6} bits", ef_micro_macro(&state));
    println!("{:>6} {:>12} {:>12} {:>12}", "Δ", "I_env", "E_F bound", "E_D");
    for delta in [0.2, 0.5, 1.0, 5.0, 50.0] {
        let channel = KrausChannel::gaussian_dephasing(state.spectrum(), delta, DEFAULT_NODES)?;
        let check = ef_decay_bound_check(&state, &channel)?;
        println!(
            "{delta:6.1} {:12.6} {:12.6} {:12.6}",
            environment_mi(&state, &channel)?,
            check.bound,
            distillable_after_dephasing(&state, delta)?
        );
    }

    let mut rng = sampling::seeded(1);
    let worst = (0..200)
        .map(|_| {
            let s = MicroMacroState::from_ensemble(sampling::ensemble(&mut rng, 3, 1.0));
            let k = KrausChannel::new(sampling::kraus_operators(&mut rng, 3, 5))?;
            Ok(ef_decay_bound_check(&s, &k)?.slack())
        })
        .collect::<macromic::Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    println!("\nrandom channels: smallest slack of the decay bound over 200 trials {worst:.3e}");
    Ok(())
}
