//! Task dispatch: validated config in, data files + manifest out.

use std::path::Path;

use aah_floquet::*;
use serde_json::json;

use crate::config::{ExperimentConfig, Task};
use crate::manifest::{ClockEcho, RunManifest, RunWriter};

#[derive(Debug)]
pub enum TaskError {
    Config(crate::config::ConfigError),
    Numerics(aah_floquet::Error),
    Io(std::io::Error),
}

impl std::fmt::Display for TaskError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TaskError::Config(e) => write!(f, "{e}"),
            TaskError::Numerics(e) => write!(f, "{e}"),
            TaskError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for TaskError {}

impl From<crate::config::ConfigError> for TaskError {
    fn from(e: crate::config::ConfigError) -> Self {
        TaskError::Config(e)
    }
}

impl From<aah_floquet::Error> for TaskError {
    fn from(e: aah_floquet::Error) -> Self {
        TaskError::Numerics(e)
    }
}

impl From<std::io::Error> for TaskError {
    fn from(e: std::io::Error) -> Self {
        TaskError::Io(e)
    }
}

impl TaskError {
    /// Exit codes: 2 config, 3 numerical convergence, 4 boundary contamination.
    pub fn exit_code(&self) -> i32 {
        match self {
            TaskError::Config(_) => 2,
            TaskError::Numerics(e) => match e {
                Error::BoundaryContamination { .. } => 4,
                Error::ConvergenceError { .. }
                | Error::NonIntegerResult { .. }
                | Error::GapClosure { .. }
                | Error::NormDrift { .. } => 3,
                _ => 2,
            },
            TaskError::Io(_) => 2,
        }
    }
}

/// Run one experiment; returns the written manifest.
pub fn run(config: &ExperimentConfig, out_dir: &Path) -> std::result::Result<RunManifest, TaskError> {
    let (params, warnings) = config.to_params()?;
    let clock = ClockEcho::from_params(&params);
    let settings = config.propagator_settings();
    let slices = settings.resolved_slices(&params);
    let mut writer = RunWriter::new(out_dir, config, &clock)?;
    let mut notes = Vec::new();

    let basis = FockBasis::enumerate_capped(
        config.system.cells,
        config.system.particles,
        config.numerics.dimension_cap,
    )?;
    let seeds = SeedDecomposition::decompose(&basis)?;
    let engine = FloquetEngine::new(params, &basis, &seeds, settings);

    let results = match config.task {
        Task::Bands => {
            let (nb, np) = config.numerics.band_grid;
            if np == 1 {
                // spectrum cut along beta at phi = 0
                let tau = std::f64::consts::TAU;
                let cut_rows: Vec<String> = (0..nb)
                    .flat_map(|ib| {
                        let beta = tau * ib as f64 / nb as f64;
                        let rf = engine.reduced(beta, 0.0);
                        let cut = floquet::anchor_cut(&rf.eigenphases);
                        let mut order: Vec<usize> = (0..rf.eigenphases.len()).collect();
                        order.sort_by(|&i, &j| {
                            floquet::shifted_phase(rf.eigenphases[i], cut)
                                .total_cmp(&floquet::shifted_phase(rf.eigenphases[j], cut))
                        });
                        order
                            .iter()
                            .enumerate()
                            .map(|(band, &i)| {
                                format!("{beta:.12},{band},{:.12}", rf.eigenphases[i])
                            })
                            .collect::<Vec<_>>()
                    })
                    .collect();
                writer.write_csv("spectrum_cut.csv", "beta,band,quasienergy", cut_rows.into_iter())?;
                json!({ "bands": seeds.cardinality(), "grid": [nb, 1] })
            } else {
                let bs = engine.band_structure(nb, np)?;
                let tau = std::f64::consts::TAU;
                let rows = (0..nb).flat_map(|ib| {
                    let sheets = &bs.sheets;
                    (0..np).flat_map(move |ip| {
                        let beta = tau * ib as f64 / nb as f64;
                        let phi = tau * ip as f64 / np as f64;
                        sheets.iter().enumerate().map(move |(band, sheet)| {
                            format!("{beta:.12},{phi:.12},{band},{:.12}", sheet[(ib, ip)])
                        })
                    })
                });
                writer.write_csv("bands.csv", "beta,phi,band,quasienergy", rows)?;
                if !bs.ambiguous.is_empty() {
                    notes.push(format!(
                        "band continuation ambiguous at {} grid points",
                        bs.ambiguous.len()
                    ));
                }
                json!({
                    "bands": bs.bands(),
                    "grid": [nb, np],
                    "ambiguous_points": bs.ambiguous.len(),
                    "phi_dispersion": (0..bs.bands()).map(|b| bs.phi_dispersion(b)).collect::<Vec<_>>(),
                    "beta_dispersion": (0..bs.bands()).map(|b| bs.beta_dispersion(b)).collect::<Vec<_>>(),
                })
            }
        }
        Task::Chern => {
            let grid = match config.numerics.chern_grid {
                Some((nb, np)) => TorusGrid::new(nb, np),
                None => TorusGrid::default_for(config.system.particles, config.system.cells),
            };
            let chern_settings = ChernSettings {
                gap_floor: config.numerics.gap_floor,
                ..Default::default()
            };
            let grouping = match &config.numerics.groups {
                Some(gs) => Grouping::Explicit(gs.iter().map(|&(a, b)| a..b).collect()),
                None => Grouping::Auto,
            };
            let (set, used) = if config.numerics.auto_refine {
                chern_all_refined(&engine, grid, &grouping, &chern_settings, 3)?
            } else {
                let eigens = GridEigens::compute(&engine, grid);
                (chern_all(&eigens, &grouping, &chern_settings)?, grid)
            };
            let value = json!({
                "groups": set.band_groups.iter().map(|g| [g.start, g.end]).collect::<Vec<_>>(),
                "chern": set.chern,
                "gap_ok": set.gap_ok,
                "total": set.total(),
                "grid": [used.n_beta, used.n_phi],
            });
            writer.write_json("chern.json", &value)?;
            value
        }
        Task::Obc => {
            let nb = config.numerics.beta_points;
            let tau = std::f64::consts::TAU;
            let betas: Vec<f64> = (0..nb).map(|i| tau * i as f64 / nb as f64).collect();
            let spectra = obc_quasienergies(&params, &betas, config.numerics.open_cells, &settings)?;
            let rows = spectra.iter().flat_map(|(beta, phases)| {
                phases
                    .iter()
                    .enumerate()
                    .map(move |(i, p)| format!("{beta:.12},{i},{p:.12}"))
                    .collect::<Vec<_>>()
            });
            writer.write_csv("obc_spectrum.csv", "beta,index,quasienergy", rows)?;
            json!({ "beta_points": nb, "open_cells": config.numerics.open_cells })
        }
        Task::Pump => {
            let r0 = config.numerics.r0.unwrap_or(config.system.cells / 2);
            let initial = match config.numerics.initial.as_str() {
                "wannier" => InitialKind::Wannier { r0 },
                "gaussian" => InitialKind::Gaussian {
                    r0,
                    sigma: config.numerics.sigma,
                },
                other => {
                    return Err(TaskError::Config(crate::config::ConfigError {
                        field: "numerics.initial".into(),
                        message: format!("unknown initial state {other:?}"),
                    }))
                }
            };
            let protocol = PumpProtocol {
                periods: config.numerics.periods,
                band: config.numerics.band,
                initial,
                frame: PumpFrame::Rotated,
            };
            let options = PumpOptions {
                embed_cells: config.numerics.embed_cells,
                chern_hint: config.numerics.chern_hint,
                dimension_cap: config.numerics.dimension_cap,
                ..Default::default()
            };
            let traj = run_pump(&engine, &protocol, &options)?;
            let rows = traj
                .samples
                .iter()
                .map(|(m, x)| format!("{m},{x:.12}"));
            writer.write_csv("pump.csv", "m,x_com", rows)?;
            json!({
                "band": config.numerics.band,
                "initial": config.numerics.initial,
                "periods": config.numerics.periods,
                "drift_cells": traj.drift,
                "lattice_cells": traj.cells,
                "max_norm_drift": traj.max_norm_drift,
            })
        }
        Task::Momentum => {
            let r0 = config.numerics.r0.unwrap_or(config.system.cells / 2);
            let sweep = momentum_sweep(&engine, r0, config.numerics.sigma, config.numerics.periods)?;
            let sites = 3 * config.system.cells;
            let tau = std::f64::consts::TAU;
            let dens_rows = sweep.times.iter().zip(&sweep.densities).flat_map(|(t, d)| {
                d.iter()
                    .enumerate()
                    .map(move |(s, w)| format!("{t:.9},{:.9},{w:.12e}", tau * s as f64 / sites as f64))
                    .collect::<Vec<_>>()
            });
            writer.write_csv("momentum_density.csv", "t,k,density", dens_rows)?;
            let peak_rows = sweep
                .times
                .iter()
                .zip(&sweep.argmax)
                .map(|(t, k)| format!("{t:.9},{k:.9}"));
            writer.write_csv("momentum_peak.csv", "t,k_argmax", peak_rows)?;
            json!({
                "samples": sweep.times.len(),
                "periods": config.numerics.periods,
                "sigma": config.numerics.sigma,
            })
        }
    };

    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(writer.finish(config, &clock, slices, warnings, notes, results)?)
}
