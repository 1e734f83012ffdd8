//! Two-boson flagship Chern on the 16x16 torus grid.

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
    let t = std::time::Instant::now();
    let eigens = GridEigens::compute(&engine, TorusGrid::new(16, 21));
    println!("grid eigens in {:?}, ambiguous points: {}", t.elapsed(), eigens.ambiguous.len());
    let settings = ChernSettings::default();
    let c95 = band_chern(&eigens, 95..96, &settings);
    println!("band95 chern: {:?}", c95);
    let set = chern_all(&eigens, &Grouping::Auto, &settings);
    match set {
        Ok(s) => println!(
            "auto groups: {} total {}; top group {:?} -> {}",
            s.band_groups.len(),
            s.total(),
            s.band_groups.last().unwrap(),
            s.chern.last().unwrap()
        ),
        Err(e) => println!("chern_all: {e}"),
    }
}
