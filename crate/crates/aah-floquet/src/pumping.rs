//! Adiabatic Thouless pumping of band wavepackets, and the momentum-space
//! Bloch-oscillation diagnostic.
//!
//! Wannier and Gaussian packets are assembled from the reduced Floquet
//! eigenvectors on the L-point φ grid of a periodic construction ring, with
//! a parallel-transport gauge in φ (an erratic gauge destroys localization).
//! The packet is then embedded into a long open chain and evolved in the
//! rotating frame with the pump phase β stepped once per driving period:
//! β_m = 2π(m−1)/M. The center-of-mass drift over the cycle, in unit cells,
//! is the Chern number of the band.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::floquet::{anchor_cut, shifted_phase, FloquetEngine, PropagatorSettings};
use crate::fock::{FockBasis, FockState};
use crate::hamiltonian::{Boundary, Frame, LatticeOperator};
use crate::params::ModelParams;

const TAU: f64 = std::f64::consts::TAU;

/// Normalized many-body amplitude vector over a Fock basis.
#[derive(Debug, Clone)]
pub struct Wavepacket {
    pub amplitudes: Array1<C64>,
}

impl Wavepacket {
    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Initial packet shape on the chosen band.
#[derive(Debug, Clone, Copy)]
pub enum InitialKind {
    Wannier { r0: usize },
    Gaussian { r0: usize, sigma: f64 },
}

/// Evolution frame; only the rotating frame is supported (the lab frame
/// agrees on all site densities, the rotation being diagonal).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PumpFrame {
    Rotated,
}

#[derive(Debug, Clone, Copy)]
pub struct PumpProtocol {
    /// Number of driving periods M in one adiabatic cycle.
    pub periods: usize,
    /// Band index (in cut-anchored ascending order at β = 0).
    pub band: usize,
    pub initial: InitialKind,
    pub frame: PumpFrame,
}

#[derive(Debug, Clone, Copy)]
pub struct PumpOptions {
    /// Cells of the open evolution lattice; `None` auto-sizes from the band
    /// dispersion and the Chern hint.
    pub embed_cells: Option<usize>,
    /// Abort threshold for total density within `edge_cells` of either edge.
    pub edge_threshold: f64,
    pub edge_cells: usize,
    /// Regrow the lattice and restart on boundary contamination.
    pub auto_grow: bool,
    pub max_grows: usize,
    /// Expected displacement magnitude in cells, if known.
    pub chern_hint: Option<f64>,
    /// Cap for the embedded basis dimension.
    pub dimension_cap: usize,
}

impl Default for PumpOptions {
    fn default() -> Self {
        PumpOptions {
            embed_cells: None,
            edge_threshold: 1e-6,
            edge_cells: 3,
            auto_grow: true,
            max_grows: 2,
            chern_hint: None,
            dimension_cap: crate::fock::DEFAULT_DIMENSION_CAP,
        }
    }
}

/// Center-of-mass expectation at the stroboscopic times t = mT.
#[derive(Debug, Clone)]
pub struct PumpTrajectory {
    /// (m, ⟨x̂⟩) for m = 0..=M, in unit cells.
    pub samples: Vec<(usize, f64)>,
    /// ⟨x̂⟩(MT) − ⟨x̂⟩(0).
    pub drift: f64,
    /// Cells of the lattice actually used.
    pub cells: usize,
    /// Worst per-period norm deviation observed.
    pub max_norm_drift: f64,
}

/// Band eigenvectors on the L-point φ grid at fixed β, continued across φ
/// and gauge-fixed by parallel transport.
pub struct BandStates {
    /// Reduced eigenvectors ψ̃(φ_s), one column per φ grid point.
    pub vectors: Vec<Array1<C64>>,
    /// Band eigenphase at each φ_s.
    pub phases: Vec<f64>,
}

/// Follow one band across the φ grid by maximal eigenvector overlap, then
/// parallel-transport the phases and pin the global gauge.
pub fn band_bloch_states(engine: &FloquetEngine<'_>, band: usize, beta: f64) -> Result<BandStates> {
    let l = engine.basis.cells();
    let d_s = engine.seeds.cardinality();
    if band >= d_s {
        return Err(Error::InvalidParameter(format!(
            "band {band} out of range (D_S = {d_s})"
        )));
    }
    let column_dot = |p: &Array1<C64>, rf: &crate::floquet::ReducedFloquet, c: usize| -> C64 {
        (0..d_s).map(|r| p[r].conj() * rf.eigenvectors[(r, c)]).sum()
    };
    let mut vectors: Vec<Array1<C64>> = Vec::with_capacity(l);
    let mut phases: Vec<f64> = Vec::with_capacity(l);
    let mut prev: Option<Array1<C64>> = None;
    for s in 0..l {
        let phi = TAU * s as f64 / l as f64;
        let rf = engine.reduced(beta, phi);
        let col = match prev {
            None => {
                let cut = anchor_cut(&rf.eigenphases);
                let mut order: Vec<usize> = (0..d_s).collect();
                order.sort_by(|&i, &j| {
                    shifted_phase(rf.eigenphases[i], cut)
                        .total_cmp(&shifted_phase(rf.eigenphases[j], cut))
                });
                order[band]
            }
            Some(ref p) => {
                let (best, overlap) = (0..d_s)
                    .map(|c| (c, column_dot(p, &rf, c).norm()))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                if overlap < 0.5 {
                    return Err(Error::GapClosure {
                        i_beta: 0,
                        i_phi: s,
                        gap: overlap,
                        floor: 0.5,
                    });
                }
                best
            }
        };
        // isolation on the phi grid: nearest other phase must not coincide
        let here = rf.eigenphases[col];
        let nearest = rf
            .eigenphases
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != col)
            .map(|(_, &p)| crate::floquet::phase_distance(p, here))
            .fold(f64::INFINITY, f64::min);
        if nearest < 1e-8 {
            return Err(Error::GapClosure {
                i_beta: 0,
                i_phi: s,
                gap: nearest,
                floor: 1e-8,
            });
        }
        let mut v = Array1::from_shape_fn(d_s, |r| rf.eigenvectors[(r, col)]);
        if let Some(ref p) = prev {
            // align the phase so the overlap with the previous point is
            // real positive
            let dot: C64 = (0..d_s).map(|r| p[r].conj() * v[r]).sum();
            let corr = C64::from_polar(1.0, -dot.arg());
            v.mapv_inplace(|z| z * corr);
        }
        phases.push(here);
        prev = Some(v.clone());
        vectors.push(v);
    }
    // global gauge: the largest component of the φ = 0 vector real positive
    let v0 = &vectors[0];
    let lead = (0..d_s)
        .max_by(|&i, &j| v0[i].norm().total_cmp(&v0[j].norm()))
        .unwrap();
    let corr = C64::from_polar(1.0, -v0[lead].arg());
    for v in &mut vectors {
        v.mapv_inplace(|z| z * corr);
    }
    Ok(BandStates { vectors, phases })
}

/// Full-space Floquet eigenstate on the ring from a reduced eigenvector:
/// (1/√L) Σ_n Σ_j ψ̃_n e^{ijφ} T̂₃ʲ|n⟩.
fn full_state_from_reduced(
    engine: &FloquetEngine<'_>,
    reduced: &Array1<C64>,
    phi: f64,
) -> Array1<C64> {
    let l = engine.basis.cells();
    let d = engine.basis.dimension();
    let norm = 1.0 / (l as f64).sqrt();
    let mut amps = Array1::zeros(d);
    for n in 0..engine.seeds.cardinality() {
        let a = reduced[n];
        if a.norm() == 0.0 {
            continue;
        }
        for j in 0..l {
            let idx = engine.seeds.member(n, j);
            amps[idx] += a * C64::from_polar(norm, phi * j as f64);
        }
    }
    amps
}

fn packet_from_band(
    engine: &FloquetEngine<'_>,
    states: &BandStates,
    initial: InitialKind,
) -> Wavepacket {
    let l = engine.basis.cells();
    let d = engine.basis.dimension();
    let mut amps: Array1<C64> = Array1::zeros(d);
    for s in 0..l {
        let phi = TAU * s as f64 / l as f64;
        let (r0, weight) = match initial {
            InitialKind::Wannier { r0 } => (r0, 1.0),
            InitialKind::Gaussian { r0, sigma } => {
                // symmetric window: envelope is centered at φ = 0
                let centered = if phi > std::f64::consts::PI { phi - TAU } else { phi };
                (r0, (-centered * centered / (4.0 * sigma * sigma)).exp())
            }
        };
        let full = full_state_from_reduced(engine, &states.vectors[s], phi);
        let w = C64::from_polar(weight, -phi * r0 as f64);
        amps.iter_mut().zip(full.iter()).for_each(|(a, f)| *a += w * f);
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.mapv_inplace(|z| z / norm);
    Wavepacket { amplitudes: amps }
}

/// Wannier state of a band: uniform φ sum, localized at cell R₀.
pub fn wannier_state(
    engine: &FloquetEngine<'_>,
    band: usize,
    r0: usize,
    beta: f64,
) -> Result<Wavepacket> {
    let states = band_bloch_states(engine, band, beta)?;
    Ok(packet_from_band(engine, &states, InitialKind::Wannier { r0 }))
}

/// Gaussian state of a band: φ sum with envelope e^{−φ²/(4σ²)} over the
/// symmetric window (−π, π].
pub fn gaussian_state(
    engine: &FloquetEngine<'_>,
    band: usize,
    r0: usize,
    sigma: f64,
    beta: f64,
) -> Result<Wavepacket> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    let states = band_bloch_states(engine, band, beta)?;
    Ok(packet_from_band(
        engine,
        &states,
        InitialKind::Gaussian { r0, sigma },
    ))
}

/// Unit-cell center of mass ⟨x̂⟩ = (1/(qN)) Σ_j j ⟨n̂_j⟩ (sites are 1-based).
pub fn cell_position(basis: &FockBasis, params: &ModelParams, amps: &[C64]) -> f64 {
    let dens = LatticeOperator::site_densities(basis, amps);
    let q = params.sublattices() as f64;
    let n = basis.particles() as f64;
    dens.iter()
        .enumerate()
        .map(|(site0, &w)| (site0 + 1) as f64 * w)
        .sum::<f64>()
        / (q * n)
}

/// Scratch buffers for the Taylor stepper.
pub struct SliceWork {
    term: Vec<C64>,
    next: Vec<C64>,
}

impl SliceWork {
    pub fn new(dim: usize) -> Self {
        SliceWork {
            term: vec![C64::new(0.0, 0.0); dim],
            next: vec![C64::new(0.0, 0.0); dim],
        }
    }
}

/// Apply exp(−i·dt·H(t_mid, β)) to a vector by a scaled Taylor series.
/// Splits the step so each segment has ‖H‖·Δt ≤ 1/4; every segment converges
/// in a dozen terms with no cancellation.
fn apply_slice(
    op: &LatticeOperator,
    t_mid: f64,
    beta: f64,
    params: &ModelParams,
    dt: f64,
    norm_bound: f64,
    v: &mut [C64],
    work: &mut SliceWork,
) {
    let theta = norm_bound * dt;
    let segments = (theta / 0.25).ceil().max(1.0) as usize;
    let z = C64::new(0.0, -dt / segments as f64);
    for _ in 0..segments {
        // v accumulates Σ_k term_k with term_0 = v
        work.term.copy_from_slice(v);
        for k in 1..=30u32 {
            op.matvec(t_mid, beta, params, &work.term, &mut work.next);
            let f = z / k as f64;
            let mut term_norm = 0.0f64;
            for x in work.next.iter_mut() {
                *x *= f;
                term_norm += x.norm_sqr();
            }
            std::mem::swap(&mut work.term, &mut work.next);
            for (a, t) in v.iter_mut().zip(work.term.iter()) {
                *a += *t;
            }
            if term_norm.sqrt() < 1e-17 {
                break;
            }
        }
    }
}

/// Static bound on ‖H(t)‖_∞ over a period, used to size the Taylor split.
fn hop_norm_bound(op: &LatticeOperator, params: &ModelParams, beta: f64) -> f64 {
    // diagonal bound: |V| ·max|profile sum| + U pairs; sampled over a period
    let samples = 16;
    let t_period = params.common_period();
    let mut worst: f64 = 0.0;
    for k in 0..samples {
        let t = t_period * k as f64 / samples as f64;
        let d = op.diagonal(t, beta, params);
        let dmax = d.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        worst = worst.max(dmax);
    }
    worst + params.hopping.abs() * op.max_hop_row_sum()
}

/// Evolve a prepared packet on an open chain through M pump periods.
///
/// The drive phases use the local time τ ∈ [0, T) of each period; the common
/// period makes that exact (ω_F·T = 2π·a), so every period at the same β is
/// bit-identical.
pub fn evolve_pump(
    chain: &FockBasis,
    initial: &Wavepacket,
    params: &ModelParams,
    periods: usize,
    settings: &PropagatorSettings,
    options: &PumpOptions,
) -> Result<PumpTrajectory> {
    let dim = chain.dimension();
    let op = LatticeOperator::new(chain, Boundary::Open, Frame::Rotated, params);
    let slices = settings.resolved_slices(params);
    let t_period = params.common_period();
    let dt = t_period / slices as f64;
    let edge_sites = options.edge_cells * params.sublattices();

    let mut v: Vec<C64> = initial.amplitudes.to_vec();
    let mut work = SliceWork::new(dim);
    let mut samples = Vec::with_capacity(periods + 1);
    samples.push((0usize, cell_position(chain, params, &v)));
    let mut max_norm_drift: f64 = 0.0;

    for m in 1..=periods {
        let beta = TAU * (m - 1) as f64 / periods as f64;
        let bound = hop_norm_bound(&op, params, beta);
        for k in 0..slices {
            let t_mid = (k as f64 + 0.5) * dt;
            apply_slice(&op, t_mid, beta, params, dt, bound, &mut v, &mut work);
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let drift = (norm - 1.0).abs();
        max_norm_drift = max_norm_drift.max(drift);
        if drift > 1e-6 {
            return Err(Error::NormDrift { period: m, drift });
        }
        samples.push((m, cell_position(chain, params, &v)));
        // edge contamination
        let dens = LatticeOperator::site_densities(chain, &v);
        let sites = chain.sites();
        let edge: f64 = dens[..edge_sites.min(sites)]
            .iter()
            .chain(dens[sites.saturating_sub(edge_sites)..].iter())
            .sum();
        if edge > options.edge_threshold {
            return Err(Error::BoundaryContamination {
                period: m,
                density: edge,
                threshold: options.edge_threshold,
                cells: chain.cells(),
            });
        }
    }
    let drift = samples.last().unwrap().1 - samples[0].1;
    Ok(PumpTrajectory {
        samples,
        drift,
        cells: chain.cells(),
        max_norm_drift,
    })
}

/// Embed a ring packet into a longer open chain at a cell offset.
pub fn embed_packet(
    ring: &FockBasis,
    packet: &Wavepacket,
    chain: &FockBasis,
    cell_offset: usize,
) -> Wavepacket {
    assert!(chain.cells() >= ring.cells() + cell_offset);
    assert_eq!(chain.particles(), ring.particles());
    let mut amps: Array1<C64> = Array1::zeros(chain.dimension());
    let site_offset = 3 * cell_offset;
    for (idx, a) in packet.amplitudes.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let mut occ = vec![0u8; chain.sites()];
        for (s, &n) in ring.state(idx).occupations().iter().enumerate() {
            occ[site_offset + s] = n;
        }
        let tgt = chain
            .index_of(&FockState::new(occ))
            .expect("embedded state exists in the chain basis");
        amps[tgt] = *a;
    }
    Wavepacket { amplitudes: amps }
}

/// Largest |∂ε/∂φ| of a band on the φ grid, in cells per period; bounds the
/// ballistic spreading of its wavepackets.
fn max_group_slope(phases: &[f64]) -> f64 {
    let l = phases.len();
    let dphi = TAU / l as f64;
    (0..l)
        .map(|s| {
            let d = crate::floquet::phase_distance(phases[(s + 1) % l], phases[s]);
            d / dphi
        })
        .fold(0.0, f64::max)
}

/// Prepare the requested band packet on the engine's ring, embed it into an
/// auto-sized open chain, and run the stepwise-β pump.
pub fn run_pump(
    engine: &FloquetEngine<'_>,
    protocol: &PumpProtocol,
    options: &PumpOptions,
) -> Result<PumpTrajectory> {
    let states = band_bloch_states(engine, protocol.band, 0.0)?;
    let packet = packet_from_band(engine, &states, protocol.initial);
    let ring_cells = engine.basis.cells();
    let particles = engine.basis.particles();

    let slope = max_group_slope(&states.phases);
    let spread = (slope * protocol.periods as f64).ceil() as usize;
    let hint = options.chern_hint.map(|c| c.abs().ceil() as usize).unwrap_or(2);
    let base_margin = spread + hint + options.edge_cells + 6;

    let mut grow = 0usize;
    loop {
        let mut cells = options.embed_cells.unwrap_or(ring_cells + 2 * base_margin) + grow * base_margin.max(8);
        if particles > 1 {
            // keep gcd(cells, N) = 1 so the chain basis is constructible
            while crate::params::gcd(cells as u64, particles as u64) != 1 {
                cells += 1;
            }
        }
        let chain = FockBasis::enumerate_capped(cells, particles, options.dimension_cap)?;
        let offset = (cells - ring_cells) / 2;
        let embedded = embed_packet(engine.basis, &packet, &chain, offset);
        match evolve_pump(
            &chain,
            &embedded,
            &engine.params,
            protocol.periods,
            &engine.settings,
            options,
        ) {
            Err(Error::BoundaryContamination { .. })
                if options.auto_grow && grow < options.max_grows && options.embed_cells.is_none() =>
            {
                grow += 1;
                continue;
            }
            other => return other,
        }
    }
}

/// Per-sublattice L-point transforms assembled into the site-momentum
/// density over the 3L-point Brillouin zone; Σ_k |ψ_k|² = 1.
pub fn momentum_density(basis: &FockBasis, amps: &Array1<C64>) -> Result<Vec<f64>> {
    if basis.particles() != 1 {
        return Err(Error::WrongParticleNumber {
            particles: basis.particles(),
        });
    }
    let l = basis.cells();
    let sites = basis.sites();
    // site-ordered single-particle wavefunction
    let mut psi = vec![C64::new(0.0, 0.0); sites];
    for (idx, state) in basis.states().iter().enumerate() {
        if let Some(site) = state.occupations().iter().position(|&n| n == 1) {
            psi[site] = amps[idx];
        }
    }
    // three L-point sublattice transforms φ_{i,k}
    let mut sub = vec![vec![C64::new(0.0, 0.0); l]; 3];
    let lnorm = 1.0 / (l as f64).sqrt();
    for (i, out) in sub.iter_mut().enumerate() {
        for (s, slot) in out.iter_mut().enumerate() {
            let k = TAU * s as f64 / l as f64;
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..l {
                acc += C64::from_polar(lnorm, -k * j as f64) * psi[3 * j + i];
            }
            *slot = acc;
        }
    }
    // coherent combination on the 3L-point site grid:
    // ψ(κ_s) = (1/√3) Σ_i e^{−iκ_s (i+1)} φ_{i, (3κ_s mod 2π)}
    let inv_sqrt3 = 1.0 / 3.0f64.sqrt();
    let density: Vec<f64> = (0..sites)
        .map(|s| {
            let kappa = TAU * s as f64 / sites as f64;
            let fold = s % l;
            let mut acc = C64::new(0.0, 0.0);
            for (i, f) in sub.iter().enumerate() {
                acc += C64::from_polar(inv_sqrt3, -kappa * (i + 1) as f64) * f[fold];
            }
            acc.norm_sqr()
        })
        .collect();
    Ok(density)
}

/// Momentum-space density evolution of a one-particle wavepacket on a ring,
/// sampled every time slice through `periods` common periods.
pub struct MomentumSweep {
    /// Sample times (slice boundaries, including t = 0).
    pub times: Vec<f64>,
    /// Site-momentum density (3L values) at each sample.
    pub densities: Vec<Vec<f64>>,
    /// Argmax momentum at each sample, in [0, 2π).
    pub argmax: Vec<f64>,
}

/// Real-space Gaussian packet centered on cell `r0` with width `sigma`
/// cells, at zero initial momentum: a single momentum lobe whose peak the
/// Bloch oscillation sweeps through the zone.
pub fn real_space_gaussian(basis: &FockBasis, r0: usize, sigma_cells: f64) -> Result<Wavepacket> {
    if basis.particles() != 1 {
        return Err(Error::WrongParticleNumber {
            particles: basis.particles(),
        });
    }
    if !(sigma_cells > 0.0) {
        return Err(Error::InvalidParameter("sigma must be positive".into()));
    }
    let sites = basis.sites();
    let center = (3 * r0) as f64 + 1.0;
    let width = 3.0 * sigma_cells;
    let mut site_amp = vec![C64::new(0.0, 0.0); sites];
    for (s, a) in site_amp.iter_mut().enumerate() {
        let x = s as f64 - center;
        *a = C64::new((-x * x / (4.0 * width * width)).exp(), 0.0);
    }
    let mut amps: Array1<C64> = Array1::zeros(basis.dimension());
    for (idx, state) in basis.states().iter().enumerate() {
        if let Some(site0) = state.occupations().iter().position(|&n| n == 1) {
            amps[idx] = site_amp[site0];
        }
    }
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.mapv_inplace(|z| z / norm);
    Ok(Wavepacket { amplitudes: amps })
}

pub fn momentum_sweep(
    engine: &FloquetEngine<'_>,
    r0: usize,
    sigma_cells: f64,
    periods: usize,
) -> Result<MomentumSweep> {
    let basis = engine.basis;
    let params = &engine.params;
    let packet = real_space_gaussian(basis, r0, sigma_cells)?;
    let op = LatticeOperator::new(basis, Boundary::Periodic, Frame::Rotated, params);
    let slices = engine.settings.resolved_slices(params);
    let t_period = params.common_period();
    let dt = t_period / slices as f64;
    let dim = basis.dimension();
    let sites = basis.sites();
    let omega_f = params.omega_f();

    let mut v = packet.amplitudes.to_vec();
    let mut work = SliceWork::new(dim);
    let bound = hop_norm_bound(&op, params, params.beta);

    let mut times = Vec::new();
    let mut densities = Vec::new();
    let mut argmax = Vec::new();
    let mut record = |t: f64, v: &[C64]| -> Result<()> {
        // rotate back to the lab frame: site j picks up e^{−iω_F t j}
        let mut lab = Array1::zeros(dim);
        for (idx, state) in basis.states().iter().enumerate() {
            if let Some(site0) = state.occupations().iter().position(|&n| n == 1) {
                let j = (site0 + 1) as f64;
                lab[idx] = v[idx] * C64::from_polar(1.0, -omega_f * t * j);
            }
        }
        let dens = momentum_density(basis, &lab)?;
        let (kmax, _) = dens
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        times.push(t);
        argmax.push(TAU * kmax as f64 / sites as f64);
        densities.push(dens);
        Ok(())
    };
    record(0.0, &v)?;
    for m in 0..periods {
        for k in 0..slices {
            let t_mid = (k as f64 + 0.5) * dt;
            apply_slice(&op, t_mid, params.beta, params, dt, bound, &mut v, &mut work);
            let t_global = m as f64 * t_period + (k + 1) as f64 * dt;
            record(t_global, &v)?;
        }
    }
    Ok(MomentumSweep {
        times,
        densities,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::SeedDecomposition;

    fn engine_for<'a>(
        params: ModelParams,
        basis: &'a FockBasis,
        seeds: &'a SeedDecomposition,
    ) -> FloquetEngine<'a> {
        FloquetEngine::new(params, basis, seeds, PropagatorSettings::default())
    }

    fn fig1_params() -> ModelParams {
        ModelParams::new(2.0).unwrap().with_tilt_ratio(3, 1).unwrap()
    }

    #[test]
    fn wannier_states_are_normalized_and_orthogonal() {
        let params = fig1_params();
        let basis = FockBasis::enumerate(5, 1).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        let engine = engine_for(params, &basis, &seeds);
        let w2 = wannier_state(&engine, 0, 2, 0.0).unwrap();
        let w3 = wannier_state(&engine, 0, 3, 0.0).unwrap();
        assert!((w2.norm() - 1.0).abs() < 1e-12);
        let dot: C64 = w2
            .amplitudes
            .iter()
            .zip(w3.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!(dot.norm() < 1e-10, "overlap {dot}");
    }

    #[test]
    fn wannier_sum_is_band_projector() {
        use ndarray::Array2;
        let params = fig1_params();
        let basis = FockBasis::enumerate(5, 1).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        let engine = engine_for(params, &basis, &seeds);
        let states = band_bloch_states(&engine, 1, 0.0).unwrap();
        let d = basis.dimension();
        let l = basis.cells();
        // projector from Bloch states
        let mut proj = Array2::<C64>::zeros((d, d));
        for s in 0..l {
            let phi = TAU * s as f64 / l as f64;
            let full = full_state_from_reduced(&engine, &states.vectors[s], phi);
            for i in 0..d {
                for j in 0..d {
                    proj[(i, j)] += full[i] * full[j].conj();
                }
            }
        }
        // projector from Wannier states
        let mut wproj = Array2::<C64>::zeros((d, d));
        for r0 in 0..l {
            let w = packet_from_band(&engine, &states, InitialKind::Wannier { r0 });
            for i in 0..d {
                for j in 0..d {
                    wproj[(i, j)] += w.amplitudes[i] * w.amplitudes[j].conj();
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((proj[(i, j)] - wproj[(i, j)]).norm());
            }
        }
        assert!(worst < 1e-10, "projector mismatch {worst}");
    }

    #[test]
    fn wide_gaussian_recovers_wannier() {
        let params = fig1_params();
        let basis = FockBasis::enumerate(5, 1).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        let engine = engine_for(params, &basis, &seeds);
        let w = wannier_state(&engine, 0, 2, 0.0).unwrap();
        let g = gaussian_state(&engine, 0, 2, 1e6, 0.0).unwrap();
        let dot: C64 = w
            .amplitudes
            .iter()
            .zip(g.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        assert!((dot.norm() - 1.0).abs() < 1e-10);
        assert!((g.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_drive_pump_is_stationary() {
        // V = 0 with a tilt: the one-period propagator is the identity, so
        // any packet holds still stroboscopically.
        let mut params = fig1_params();
        params.drive_amplitude = 0.0;
        let chain = FockBasis::enumerate(9, 1).unwrap();
        let dim = chain.dimension();
        // arbitrary localized packet near the center
        let mut amps: Array1<C64> = Array1::zeros(dim);
        let mid = dim / 2;
        amps[mid] = C64::new(0.8, 0.0);
        amps[mid + 1] = C64::new(0.0, 0.5);
        amps[mid - 1] = C64::new(0.33, 0.2);
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.mapv_inplace(|z| z / norm);
        let packet = Wavepacket { amplitudes: amps };
        let traj = evolve_pump(
            &chain,
            &packet,
            &params,
            5,
            &PropagatorSettings::default(),
            &PumpOptions::default(),
        )
        .unwrap();
        for (_, x) in &traj.samples {
            assert!((x - traj.samples[0].1).abs() < 1e-8);
        }
        assert!(traj.drift.abs() < 1e-8);
        assert!(traj.max_norm_drift < 1e-8);
    }

    #[test]
    fn momentum_density_contract() {
        let basis = FockBasis::enumerate(8, 1).unwrap();
        let dim = basis.dimension();
        // uniform real-space state concentrates at k = 0
        let amps = Array1::from_elem(dim, C64::new(1.0 / (dim as f64).sqrt(), 0.0));
        let dens = momentum_density(&basis, &amps).unwrap();
        let total: f64 = dens.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let (kmax, _) = dens
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        assert_eq!(kmax, 0);
        // two particles are rejected
        let basis2 = FockBasis::enumerate(3, 2).unwrap();
        let amps2 = Array1::from_elem(basis2.dimension(), C64::new(0.0, 0.0));
        assert!(matches!(
            momentum_density(&basis2, &amps2),
            Err(Error::WrongParticleNumber { .. })
        ));
    }

    #[test]
    fn free_bloch_oscillation_sweeps_linearly() {
        // V = 0: the lab-frame momentum peak sweeps at exactly ω_F per unit
        // time (downhill in k: the site potential +ω_F·j exerts force −ω_F).
        let mut params = ModelParams::new(2.0).unwrap().with_tilt_ratio(4, 1).unwrap();
        params.drive_amplitude = 0.0;
        let basis = FockBasis::enumerate(40, 1).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        // bands are degenerate at V = 0, so build the packet by hand: a real
        // Gaussian over sites
        let _ = &seeds;
        let settings = PropagatorSettings::default();
        let dim = basis.dimension();
        let sites = basis.sites();
        let mut site_amp = vec![C64::new(0.0, 0.0); sites];
        let center = sites as f64 / 2.0;
        for (s, a) in site_amp.iter_mut().enumerate() {
            let x = s as f64 - center;
            *a = C64::new((-x * x / 60.0).exp(), 0.0);
        }
        let mut amps: Array1<C64> = Array1::zeros(dim);
        for (idx, state) in basis.states().iter().enumerate() {
            if let Some(site0) = state.occupations().iter().position(|&n| n == 1) {
                amps[idx] = site_amp[site0];
            }
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.mapv_inplace(|z| z / norm);

        let op = LatticeOperator::new(&basis, Boundary::Periodic, Frame::Rotated, &params);
        let slices = settings.resolved_slices(&params);
        let t_period = params.common_period();
        let dt = t_period / slices as f64;
        let omega_f = params.omega_f();
        let bound = hop_norm_bound(&op, &params, 0.0);
        let mut v = amps.to_vec();
        let mut work = SliceWork::new(dim);

        let density_argmax = |t: f64, v: &[C64]| -> f64 {
            let mut lab = Array1::zeros(dim);
            for (idx, state) in basis.states().iter().enumerate() {
                if let Some(site0) = state.occupations().iter().position(|&n| n == 1) {
                    lab[idx] = v[idx] * C64::from_polar(1.0, -omega_f * t * (site0 + 1) as f64);
                }
            }
            let dens = momentum_density(&basis, &lab).unwrap();
            let (kmax, _) = dens
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap();
            TAU * kmax as f64 / sites as f64
        };
        let k0 = density_argmax(0.0, &v);
        let spacing = TAU / sites as f64;
        for k in 0..slices {
            let t_mid = (k as f64 + 0.5) * dt;
            apply_slice(&op, t_mid, 0.0, &params, dt, bound, &mut v, &mut work);
            let t = (k + 1) as f64 * dt;
            let got = density_argmax(t, &v);
            let law = (k0 - omega_f * t).rem_euclid(TAU);
            let dist = crate::floquet::phase_distance(got, law);
            assert!(dist <= spacing + 1e-12, "t={t}: peak {got} vs law {law}");
        }
    }
}
