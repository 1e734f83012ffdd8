//! Print the band-95 continuation across the 21 sectors at beta = 0.

use aah_floquet::pumping::band_bloch_states;
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
    match band_bloch_states(&engine, 95, 0.0) {
        Ok(states) => {
            println!("band-95 phases across the 21 sectors:");
            for (s, p) in states.phases.iter().enumerate() {
                println!("  s={s:2} phi={:.3}: {p:+.5}", std::f64::consts::TAU * s as f64 / 21.0);
            }
        }
        Err(e) => println!("construction failed: {e}"),
    }
}
