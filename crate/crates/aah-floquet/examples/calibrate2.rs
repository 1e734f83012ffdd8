//! Scratch calibration for the two-boson flagship: U = 20, T1 = 2, T1/T2 = 3/2.

use aah_floquet::*;

fn main() {
    let params = ModelParams::new(2.0)
        .unwrap()
        .with_tilt_ratio(3, 2)
        .unwrap()
        .with_interaction(20.0);
    let basis = FockBasis::enumerate(21, 2).unwrap();
    let seeds = SeedDecomposition::decompose(&basis).unwrap();
    println!("D = {}, D_S = {}", basis.dimension(), seeds.cardinality());
    let engine = FloquetEngine::new(params, &basis, &seeds, PropagatorSettings::default());

    let t0 = std::time::Instant::now();
    let rf = engine.reduced(0.0, 0.0);
    println!("one reduced point: {:?}", t0.elapsed());
    println!(
        "top eigenphases: {:?}",
        &rf.eigenphases[91..]
    );
    println!(
        "bottom eigenphases: {:?}",
        &rf.eigenphases[..4]
    );

    let t1 = std::time::Instant::now();
    let eigens = GridEigens::compute(&engine, TorusGrid::new(16, 21));
    println!("16x16 grid eigens: {:?}", t1.elapsed());
    let ch = ChernSettings::default();
    let set = chern_all(&eigens, &Grouping::Auto, &ch).unwrap();
    println!(
        "groups: {} total chern {}; last group {:?} chern {}",
        set.band_groups.len(),
        set.total(),
        set.band_groups.last().unwrap(),
        set.chern.last().unwrap()
    );
    println!("group sizes: {:?}", set.band_groups.iter().map(|g| g.len()).collect::<Vec<_>>());
    println!("cherns: {:?}", set.chern);

    // top-band gap across the grid
    let (gap, at) = eigens.boundary_gap(94);
    println!("gap below band 95: {gap:.4} at {:?}", at);
    let (gap_w, at_w) = eigens.boundary_gap(95);
    println!("wrap gap above band 95: {gap_w:.4} at {:?}", at_w);

    // pump smoke test, M = 100
    for (label, initial) in [
        ("wannier", InitialKind::Wannier { r0: 10 }),
        ("gauss07", InitialKind::Gaussian { r0: 10, sigma: 0.7 }),
    ] {
        let t2 = std::time::Instant::now();
        let protocol = PumpProtocol {
            periods: 400,
            band: 95,
            initial,
            frame: PumpFrame::Rotated,
        };
        let options = PumpOptions {
            chern_hint: Some(-2.0),
            ..Default::default()
        };
        match run_pump(&engine, &protocol, &options) {
            Ok(traj) => println!(
                "pump band95 {label} M=400: drift {:+.4} on {} cells, norm {:.1e} ({:?})",
                traj.drift, traj.cells, traj.max_norm_drift, t2.elapsed()
            ),
            Err(e) => println!("pump band95 {label} M=400 failed: {e}"),
        }
    }
}
