//! Is the band-94/95 near-touching at the flagship parameters physical or a
//! slicing artifact? Track the top eigenphases under slice refinement.

use aah_floquet::*;

fn main() {
    let params = ModelParams::new(2.0)
        .unwrap()
        .with_tilt_ratio(3, 2)
        .unwrap()
        .with_interaction(20.0);
    let basis = FockBasis::enumerate(21, 2).unwrap();
    let seeds = SeedDecomposition::decompose(&basis).unwrap();
    let tau = std::f64::consts::TAU;
    let (beta, phi) = (tau * 10.0 / 16.0, tau * 5.0 / 16.0);
    for slices in [384usize, 768, 1536, 3072] {
        let settings = PropagatorSettings {
            slices_per_period: Some(slices),
            ..Default::default()
        };
        let engine = FloquetEngine::new(params, &basis, &seeds, settings);
        let t = std::time::Instant::now();
        let rf = engine.reduced(beta, phi);
        let top: Vec<f64> = rf.eigenphases[92..].to_vec();
        println!(
            "slices {slices:5}: top phases {:?} gap {:.6} ({:?})",
            top,
            top[3] - top[2],
            t.elapsed()
        );
    }
    // scan the neighborhood for the minimal gap at high slicing
    let settings = PropagatorSettings {
        slices_per_period: Some(1536),
        ..Default::default()
    };
    let engine = FloquetEngine::new(params, &basis, &seeds, settings);
    let mut min_gap = f64::INFINITY;
    let mut at = (0.0, 0.0);
    for i in 0..7 {
        for j in 0..7 {
            let b = beta + tau / 16.0 * (i as f64 - 3.0) / 3.0;
            let p = phi + tau / 16.0 * (j as f64 - 3.0) / 3.0;
            let rf = engine.reduced(b, p);
            let g = rf.eigenphases[95] - rf.eigenphases[94];
            if g < min_gap {
                min_gap = g;
                at = (b, p);
            }
        }
    }
    println!("neighborhood min gap {min_gap:.6} at ({:.4}, {:.4})", at.0, at.1);
}
