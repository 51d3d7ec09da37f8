//! The partial dephasing channel: composition, kick-average form and covariant channels.

use macromic::discord::{c_delta, covariant_channel, CovariantKraus};
use macromic::{dephase_fully, sampling, DephasingChannel, ObservableSpectrum};

fn main() -> macromic::Result<()> {
    let mut rng = sampling::seeded(7);
    let rho = sampling::full_rank_state(&mut rng, 3);
    let spectrum = ObservableSpectrum::new(vec![0.0, 1.0, 2.0])?;
    let (a, b) = (DephasingChannel::new(0.8)?, DephasingChannel::new(1.5)?);
    let twice = a.apply(&b.apply(&rho, &spectrum)?, &spectrum)?;
    let once = a.compose(&b).apply(&rho, &spectrum)?;
    println!("composed width {:.6}: entrywise gap {:.2e}", a.compose(&b).delta(), twice.max_entry_distance(&once));

    let kicks = a.apply_by_unitary_mixture(&rho, &spectrum, 64)?;
    println!("kick average vs entrywise: {:.2e}", kicks.max_entry_distance(&a.apply(&rho, &spectrum)?));
    let full = dephase_fully(&rho);
    println!("commutes with full dephasing: {:.2e}", a.apply(&full, &spectrum)?.max_entry_distance(&full));

    let ops = sampling::covariant_kraus(&mut rng, 3, 3)
        .into_iter()
        .map(|(shift, m)| CovariantKraus::new(shift as f64, m, &spectrum))
        .collect::<macromic::Result<Vec<_>>>()?;
    let out = covariant_channel(&rho, &spectrum, &ops)?;
    println!(
        "covariant channel: C_Δ {:.6} → {:.6}",
        c_delta(&rho, &spectrum, 0.5)?,
        c_delta(&out, &spectrum, 0.5)?
    );
    Ok(())
}
