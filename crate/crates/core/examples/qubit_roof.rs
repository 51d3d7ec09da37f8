//! Analytic convex roof of the size over the XZ Bloch disk, and the guessing-probability range.

use macromic::roof::{guessing_mi_extremes, pure_mic_2peak, roof_mic_2peak, tilde_i0_inverse, BlochStateXZ};

fn main() -> macromic::Result<()> {
    for b in [0.082, 1.0 / 3.0] {
        let r = tilde_i0_inverse(b);
        println!("b = {b:.3}: zero-size region |x| ≤ {r:.6}");
        println!("{:>6} {:>10} {:>10} {:>10}", "x", "z=0", "z=0.5", "pure");
        for x in [0.2, 0.4, 0.6, 0.8] {
            let mixed = |z: f64| -> macromic::Result<String> {
                if x * x + z * z > 1.0 {
                    return Ok("-".into());
                }
                Ok(format!("{:.6}", roof_mic_2peak(&BlochStateXZ::new(x, z, 1.0)?, b)?))
            };
            println!("{x:6.2} {:>10} {:>10} {:10.6}", mixed(0.0)?, mixed(0.5)?, pure_mic_2peak(x, b, 1.0)?);
        }
    }
    let (flat, sharp) = guessing_mi_extremes(2.0 / 3.0)?;
    println!("\nguessing probability 2/3 allows between {flat:.4} and {sharp:.4} bits");
    Ok(())
}
