//! The continuous relaxation of the scheduling problem is classic valley
//! filling: pour a fixed amount of charging energy into the cheapest slots
//! until the filled load reaches a common water level. This example fills a
//! two-valley day and shows the level emerging.

use evcs::baselines::valley_fill_exact;
use evcs::error::Result;

fn main() -> Result<()> {
    let exo = vec![5.0, 3.5, 1.8, 0.9, 1.2, 2.6, 4.1, 5.2, 3.0, 1.5, 1.1, 2.4];
    let energy = 6.0;
    let fill = valley_fill_exact(&exo, energy, 1.0, 0.0, 2.0)?;

    println!("energy to place: {energy} kW-slots, per-slot cap 2.0");
    println!("water level: {:.6}\n", fill.level);
    println!("slot   exo    added  filled");
    for (t, (l, x)) in exo.iter().zip(&fill.x).enumerate() {
        let bar = "#".repeat((5.0 * (l + x)).round() as usize);
        println!("{:4}  {l:5.2}  {x:5.2}  {:6.2}  {bar}", t + 1, l + x);
    }

    let quadratic = |x: &[f64]| -> f64 {
        x.iter().zip(&exo).map(|(x, l)| (l + x) * (l + x)).sum()
    };
    let flat = vec![energy / exo.len() as f64; exo.len()];
    println!(
        "\nsum of squared loads: valley fill {:.4}, uniform spread {:.4}, none {:.4}",
        quadratic(&fill.x),
        quadratic(&flat),
        quadratic(&vec![0.0; exo.len()])
    );
    Ok(())
}
