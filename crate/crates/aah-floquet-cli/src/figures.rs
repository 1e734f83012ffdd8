//! Pre-canned experiment bundles reproducing the headline result sets.
//!
//! Each figure id expands to a list of (subdirectory, config) pairs run in
//! order. Two-particle bundles print a runtime estimate before starting.

use crate::config::*;

pub struct FigureRun {
    pub subdir: String,
    pub config: ExperimentConfig,
}

fn model(t1: f64, tilt: &str, u: f64) -> ModelConfig {
    ModelConfig {
        hopping: 2.5,
        drive_amplitude: 2.5,
        drive_period: t1,
        tilt_ratio: tilt.into(),
        interaction: u,
        superlattice: "1/3".into(),
        beta: 0.0,
    }
}

fn base(task: Task, model: ModelConfig, cells: usize, particles: usize, out: &str) -> ExperimentConfig {
    ExperimentConfig {
        task,
        model,
        system: SystemConfig { cells, particles },
        numerics: NumericsConfig::default(),
        output: OutputConfig {
            dir: out.into(),
            format: "csv".into(),
        },
    }
}

/// One-particle bundle: bands + chern (+ optional obc) + pumps of all three
/// bands with the given initial kinds.
fn one_particle_set(
    prefix: &str,
    t1: f64,
    tilt: &str,
    periods: usize,
    initials: &[&str],
    with_obc: bool,
    auto_refine: bool,
) -> Vec<FigureRun> {
    let mut runs = Vec::new();
    let mut bands = base(Task::Bands, model(t1, tilt, 0.0), 21, 1, "");
    bands.numerics.band_grid = (61, 61);
    runs.push(FigureRun {
        subdir: format!("{prefix}/bands"),
        config: bands,
    });
    let mut chern = base(Task::Chern, model(t1, tilt, 0.0), 21, 1, "");
    chern.numerics.auto_refine = auto_refine;
    runs.push(FigureRun {
        subdir: format!("{prefix}/chern"),
        config: chern,
    });
    if with_obc {
        let obc = base(Task::Obc, model(t1, tilt, 0.0), 21, 1, "");
        runs.push(FigureRun {
            subdir: format!("{prefix}/obc"),
            config: obc,
        });
    }
    for &initial in initials {
        for band in 0..3 {
            let mut pump = base(Task::Pump, model(t1, tilt, 0.0), 21, 1, "");
            pump.numerics.periods = periods;
            pump.numerics.band = band;
            pump.numerics.initial = initial.into();
            runs.push(FigureRun {
                subdir: format!("{prefix}/pump_{initial}_band{band}"),
                config: pump,
            });
        }
    }
    runs
}

/// Two-particle bundle at L = 21: spectrum cut + chern + selected pumps.
fn two_particle_set(
    prefix: &str,
    t1: f64,
    tilt: &str,
    u: f64,
    periods: usize,
    pumps: &[(usize, &str)],
) -> Vec<FigureRun> {
    let mut runs = Vec::new();
    let mut cut = base(Task::Bands, model(t1, tilt, u), 21, 2, "");
    cut.numerics.band_grid = (61, 1);
    runs.push(FigureRun {
        subdir: format!("{prefix}/spectrum"),
        config: cut,
    });
    let chern = base(Task::Chern, model(t1, tilt, u), 21, 2, "");
    runs.push(FigureRun {
        subdir: format!("{prefix}/chern"),
        config: chern,
    });
    for &(band, initial) in pumps {
        let mut pump = base(Task::Pump, model(t1, tilt, u), 21, 2, "");
        pump.numerics.periods = periods;
        pump.numerics.band = band;
        pump.numerics.initial = initial.into();
        runs.push(FigureRun {
            subdir: format!("{prefix}/pump_{initial}_band{band}"),
            config: pump,
        });
    }
    runs
}

/// Expand a figure id; `ci_scale` shortens the two-particle pump cycles from
/// 2000 to 400 periods (drift tolerance widens from 0.05·|C| to 0.1·|C|).
pub fn expand(figure: &str, ci_scale: bool) -> Option<Vec<FigureRun>> {
    let two_particle_periods = if ci_scale { 400 } else { 2000 };
    match figure {
        "fig1" => Some(one_particle_set(
            "fig1",
            2.0,
            "3/1",
            2000,
            &["wannier", "gaussian"],
            false,
            false,
        )),
        "fig2" => {
            let mut runs = Vec::new();
            runs.extend(one_particle_set("fig2/untilted", 4.0, "0/1", 2000, &["wannier"], true, false));
            runs.extend(one_particle_set("fig2/ratio_2_5", 4.0, "2/5", 2000, &["wannier"], true, true));
            runs.extend(one_particle_set("fig2/ratio_5_2", 4.0, "5/2", 2000, &["wannier"], true, false));
            Some(runs)
        }
        "fig3" => {
            let mut runs = Vec::new();
            runs.extend(two_particle_set(
                "fig3/tilted_3_2",
                2.0,
                "3/2",
                20.0,
                two_particle_periods,
                &[(95, "wannier"), (95, "gaussian")],
            ));
            runs.extend(two_particle_set(
                "fig3/untilted",
                2.0,
                "0/1",
                20.0,
                two_particle_periods,
                &[(0, "wannier"), (95, "wannier")],
            ));
            Some(runs)
        }
        "fig4" => {
            let mut runs = Vec::new();
            for (u, label_u) in [(2.0, "u2"), (10.0, "u10")] {
                for (tilt, label_t) in [("1/1", "ratio_1_1"), ("1/2", "ratio_1_2")] {
                    runs.extend(two_particle_set(
                        &format!("fig4/{label_u}_{label_t}"),
                        1.0,
                        tilt,
                        u,
                        two_particle_periods,
                        &[(0, "wannier"), (95, "wannier")],
                    ));
                }
            }
            Some(runs)
        }
        "fig5" => {
            // high-Chern spot checks: T1 = 4, three tilt ratios
            let mut runs = Vec::new();
            for (tilt, label) in [("5/7", "ratio_5_7"), ("7/10", "ratio_7_10"), ("8/11", "ratio_8_11")] {
                runs.extend(one_particle_set(
                    &format!("fig5/{label}"),
                    4.0,
                    tilt,
                    2000,
                    &["wannier"],
                    true,
                    true,
                ));
            }
            Some(runs)
        }
        "figA" => {
            let mut cfg = base(Task::Momentum, model(2.0, "4/1", 0.0), 500, 1, "");
            cfg.numerics.periods = 1;
            // real-space Gaussian width in cells for the momentum diagnostic
            cfg.numerics.sigma = 10.0;
            Some(vec![FigureRun {
                subdir: "figA/momentum".into(),
                config: cfg,
            }])
        }
        _ => None,
    }
}

/// Crude wall-time estimate for a run, in seconds, used to warn before long
/// two-particle jobs.
pub fn estimate_seconds(config: &ExperimentConfig) -> f64 {
    let n2 = config.system.particles >= 2;
    let tilt = aah_floquet::Ratio::parse(&config.model.tilt_ratio).unwrap_or(
        aah_floquet::Ratio::new(0, 1).unwrap(),
    );
    let slices = config
        .numerics
        .slices_per_period
        .unwrap_or(64 * tilt.denominator().max(1) as usize * tilt.numerator().max(1) as usize);
    match config.task {
        Task::Chern if n2 => {
            let (nb, np) = config.numerics.chern_grid.unwrap_or((16, 16));
            nb as f64 * np as f64 * slices as f64 * 2.0e-3
        }
        Task::Pump if n2 => config.numerics.periods as f64 * slices as f64 * 6.0e-4,
        Task::Bands if n2 => {
            let (nb, np) = config.numerics.band_grid;
            nb as f64 * np as f64 * slices as f64 * 2.0e-3
        }
        _ => 5.0,
    }
}
