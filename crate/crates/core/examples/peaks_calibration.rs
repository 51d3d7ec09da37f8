//! Peak families: closed-form information, sizes, and calibrating a span from a measured size.

use macromic::peaks::{calibration_span, peaks_best_mic, peaks_mi, peaks_mic, PeaksFamily};
use macromic::{mutual_information, PointerModel};

fn main() -> macromic::Result<()> {
    println!("information of k+1 peaks over N = 1 against r = Δ/(2N)");
    println!("{:>6} {:>10} {:>10} {:>10}", "r", "k=1", "k=3", "k=7");
    for r in [0.05, 0.25, 0.5, 1.0, 2.0] {
        let row: Vec<String> = [1, 3, 7].iter().map(|&k| format!("{:10.6}", peaks_mi(2.0 * r, 1.0, k))).collect();
        println!("{r:6.2} {}", row.join(" "));
    }

    // the closed form agrees with the general square-pointer engine
    let family = PeaksFamily::new(3, 1.0)?;
    let engine = mutual_information(&family.ensemble()?, &PointerModel::square(0.7)?)?;
    println!("\nk=3, Δ=0.7: closed form {:.12}, engine {:.12}", family.mi(0.7), engine.bits);

    println!("\nsizes for N = 1");
    for (b, k) in [(0.5, 1), (1.0, 1), (2.0, 3), (3.0, 7)] {
        println!("  b = {b}: k = {k} gives MIC = {:.6}", peaks_mic(b, 1.0, k)?);
    }
    let best = peaks_best_mic(1.5, 1.0)?;
    println!("  b = 1.5: best over k is {:.6} at k = {} (extrapolated: {})", best.delta, best.k, best.extrapolated);

    // a measured size of 4.0 at b = 0.5 corresponds to this span
    println!("\nspan giving MIC 4.0 at b = 0.5: {:.6}", calibration_span(4.0, 0.5)?);
    Ok(())
}
