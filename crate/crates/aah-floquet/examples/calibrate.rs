//! Scratch calibration: Chern conventions and pump quantization.

use aah_floquet::*;

fn main() {
    let basis = FockBasis::enumerate(5, 1).unwrap();
    let seeds = SeedDecomposition::decompose(&basis).unwrap();
    let settings = PropagatorSettings::default();
    let ch = ChernSettings::default();

    let params1 = ModelParams::new(2.0).unwrap().with_tilt_ratio(3, 1).unwrap();
    let engine1 = FloquetEngine::new(params1, &basis, &seeds, settings);
    let e1 = GridEigens::compute(&engine1, TorusGrid::new(24, 24));
    let s1 = chern_all(&e1, &Grouping::Auto, &ch).unwrap();
    println!("fig1  chern (expect -2,4,-2):    {:?}", s1.chern);

    let params2 = ModelParams::new(4.0).unwrap();
    let engine2 = FloquetEngine::new(params2, &basis, &seeds, settings);
    let e2 = GridEigens::compute(&engine2, TorusGrid::new(24, 24));
    let s2 = chern_all(&e2, &Grouping::Auto, &ch).unwrap();
    println!("fig2a chern (expect 4,-8,4):     {:?}", s2.chern);

    let params3 = ModelParams::new(4.0).unwrap().with_tilt_ratio(2, 5).unwrap();
    let engine3 = FloquetEngine::new(params3, &basis, &seeds, settings);
    let (s3, g3) = chern_all_refined(&engine3, TorusGrid::new(24, 24), &Grouping::Auto, &ch, 3).unwrap();
    println!(
        "fig2d chern (expect -20,40,-20): {:?} at {}x{}",
        s3.chern, g3.n_beta, g3.n_phi
    );

    let params4 = ModelParams::new(4.0).unwrap().with_tilt_ratio(5, 2).unwrap();
    let engine4 = FloquetEngine::new(params4, &basis, &seeds, settings);
    let e4 = GridEigens::compute(&engine4, TorusGrid::new(24, 24));
    let s4 = chern_all(&e4, &Grouping::Auto, &ch).unwrap();
    println!("fig2g chern (expect 4,-8,4):     {:?}", s4.chern);

    // pump on L = 21, all three bands, M = 2000
    let basis21 = FockBasis::enumerate(21, 1).unwrap();
    let seeds21 = SeedDecomposition::decompose(&basis21).unwrap();
    let engine = FloquetEngine::new(params1, &basis21, &seeds21, settings);
    for band in 0..3 {
        let t = std::time::Instant::now();
        let protocol = PumpProtocol {
            periods: 2000,
            band,
            initial: InitialKind::Wannier { r0: 10 },
            frame: PumpFrame::Rotated,
        };
        let options = PumpOptions {
            chern_hint: Some(s1.chern[band] as f64),
            ..Default::default()
        };
        let traj = run_pump(&engine, &protocol, &options).unwrap();
        println!(
            "pump band{band} M=2000: drift {:+.4} (chern {:+}) on {} cells ({:?})",
            traj.drift, s1.chern[band], traj.cells, t.elapsed()
        );
    }
}
