//! Scan the center-of-mass gauge scale: overlap of the doublon eigenvector
//! in adjacent sectors versus the compensation rate.

use aah_floquet::*;
use num_complex::Complex64 as C64;

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
    let dphi = tau / 21.0;
    let com = seeds.com_cells(&basis);

    let rf0 = engine.reduced(0.0, 0.0);
    let rf1 = engine.reduced(0.0, dphi);
    // the doublon is the top band at both sectors (phases ~1.678)
    println!(
        "phases: s0 top {:.4}, s1 top {:.4}",
        rf0.eigenphases[95], rf1.eigenphases[95]
    );
    for scale in [-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0] {
        let mut dot = C64::new(0.0, 0.0);
        for r in 0..96 {
            dot += rf0.eigenvectors[(r, 95)].conj()
                * rf1.eigenvectors[(r, 95)]
                * C64::from_polar(1.0, -scale * dphi * com[r]);
        }
        println!("scale {scale:+.1}: |overlap| = {:.4}", dot.norm());
    }
}
