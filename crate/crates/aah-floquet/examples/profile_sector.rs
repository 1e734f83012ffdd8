//! Micro-timing of the sector propagation pieces at the two-boson flagship.

use aah_floquet::linalg::{exp_scaled_hermitian, CMat};
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
    let sector = SectorOperator::new(&basis, &seeds, &params);
    let symbol = sector.hop_symbol(1.3);

    let t0 = std::time::Instant::now();
    let mut h = CMat::zeros(96, 96);
    for _ in 0..1000 {
        h = sector.assemble(0.37, 1.0, &symbol, &params);
    }
    println!("assemble x1000: {:?}", t0.elapsed());

    let step = C64::new(0.0, -4.0 / 384.0);
    let t1 = std::time::Instant::now();
    let mut u = CMat::identity(96, 96);
    for _ in 0..100 {
        u = exp_scaled_hermitian(&h, step);
    }
    println!("exp x100: {:?}", t1.elapsed());

    let t2 = std::time::Instant::now();
    let mut acc = CMat::identity(96, 96);
    for _ in 0..1000 {
        acc = &u * &acc;
    }
    println!("matmul x1000: {:?} {:?}", t2.elapsed(), acc[(0, 0)]);
}
