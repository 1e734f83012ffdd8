//! Sorted quasienergy snapshots of the two-boson flagship along both torus
//! directions.

use aah_floquet::*;

fn main() {
    let params = ModelParams::new(2.0)
        .unwrap()
        .with_tilt_ratio(3, 2)
        .unwrap()
        .with_interaction(20.0);
    let basis = FockBasis::enumerate(21, 2).unwrap();
    let seeds = SeedDecomposition::decompose(&basis).unwrap();
    let engine = FloquetEngine::new(params, &basis, &seeds, PropagatorSettings::default());
    let tau = std::f64::consts::TAU;

    println!("--- along phi at beta = 0 (top 6 phases) ---");
    for ip in 0..8 {
        let phi = tau * ip as f64 / 21.0;
        let rf = engine.reduced(0.0, phi);
        let top: Vec<String> = rf.eigenphases[90..]
            .iter()
            .map(|p| format!("{p:+.3}"))
            .collect();
        println!("phi {phi:+.3}: {}", top.join(" "));
    }
    println!("--- along beta at phi = 0 (top 6 phases) ---");
    for ib in 0..8 {
        let beta = tau * ib as f64 / 16.0;
        let rf = engine.reduced(beta, 0.0);
        let top: Vec<String> = rf.eigenphases[90..]
            .iter()
            .map(|p| format!("{p:+.3}"))
            .collect();
        println!("beta {beta:+.3}: {}", top.join(" "));
    }
}
