//! Full-scale two-boson flagship pump: M = 2000, Wannier on band 95.

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
    let periods: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(2000);
    let t = std::time::Instant::now();
    let protocol = PumpProtocol {
        periods,
        band: 95,
        initial: InitialKind::Wannier { r0: 10 },
        frame: PumpFrame::Rotated,
    };
    let options = PumpOptions {
        chern_hint: Some(-2.0),
        ..Default::default()
    };
    match run_pump(&engine, &protocol, &options) {
        Ok(traj) => {
            let show: Vec<(usize, f64)> = traj
                .samples
                .iter()
                .step_by((periods / 20).max(1))
                .cloned()
                .collect();
            println!(
                "band95 wannier M={periods}: drift {:+.4} on {} cells ({:?})",
                traj.drift,
                traj.cells,
                t.elapsed()
            );
            println!("x(m): {show:?}");
        }
        Err(e) => println!("failed: {e}"),
    }
}
