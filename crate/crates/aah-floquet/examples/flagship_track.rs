//! Trace the doublon band along the labeling's actual spanning tree: row 0
//! in φ from (0,0), then down β at a fixed φ, printing claim confidences,
//! phases and rank moves.

use aah_floquet::linalg::from_ndarray;
use aah_floquet::linalg::CMat;
use aah_floquet::*;
use num_complex::Complex64 as C64;

fn best_claim(prev: &CMat, prev_col: usize, cur: &CMat) -> (usize, f64, f64) {
    let n = prev.nrows();
    let mut best = (0usize, 0.0f64);
    let mut second = 0.0f64;
    for c in 0..cur.ncols() {
        let mut dot = C64::new(0.0, 0.0);
        for r in 0..n {
            dot += prev[(r, prev_col)].conj() * cur[(r, c)];
        }
        let w = dot.norm();
        if w > best.1 {
            second = best.1;
            best = (c, w);
        } else if w > second {
            second = w;
        }
    }
    (best.0, best.1, second)
}

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
    let nb = 16;
    let target_ip = 5;

    // row 0: from (0, 0) to (0, phi_target)
    let mut prev = engine.reduced(0.0, 0.0);
    let mut col = 95usize;
    println!(
        "(0,0): doublon phase {:.4} (rank 95)",
        prev.eigenphases[col]
    );
    for ip in 1..=target_ip {
        let phi = tau * ip as f64 / nb as f64;
        let rf = engine.reduced(0.0, phi);
        let (c, w, w2) = best_claim(
            &from_ndarray(&prev.eigenvectors),
            col,
            &from_ndarray(&rf.eigenvectors),
        );
        println!(
            "phi step {ip:2}: col {c:2} (conf {w:.3}/{w2:.3}) phase {:+.4}",
            rf.eigenphases[c]
        );
        prev = rf;
        col = c;
    }
    // down beta at fixed phi
    let phi = tau * target_ip as f64 / nb as f64;
    for ib in 1..=nb {
        let beta = tau * ib as f64 / nb as f64;
        let rf = engine.reduced(beta, phi);
        let (c, w, w2) = best_claim(
            &from_ndarray(&prev.eigenvectors),
            col,
            &from_ndarray(&rf.eigenvectors),
        );
        println!(
            "beta step {ib:2}: col {c:2} (conf {w:.3}/{w2:.3}) phase {:+.4}",
            rf.eigenphases[c]
        );
        prev = rf;
        col = c;
    }
}
