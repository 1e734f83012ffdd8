//! Chern numbers of Floquet bands on the (β, φ) torus.
//!
//! Uses the lattice gauge-field method: eigenvectors on a uniform grid,
//! U(1) links from determinants of inter-point overlap matrices restricted
//! to a band group, and the field strength from plaquette link products.
//! The result is an exact integer on any grid fine enough that no plaquette
//! phase reaches ±π, and grouped (non-Abelian) treatment makes touching
//! bands safe: the plaquette phase of a group is invariant under any
//! invertible mixing inside the group.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::floquet::{anchor_cut, shifted_phase, FloquetEngine};
use crate::linalg::{determinant, CMat};

const TAU: f64 = std::f64::consts::TAU;

/// Overlap quality below which a proposed label deviation from the sorted
/// order is rejected outright: slowly hybridizing (grid-resolved) avoided
/// crossings produce ambiguous overlaps and keep the sorted assignment.
const SWAP_CONFIDENCE: f64 = 0.8;

/// Avoided crossings narrower than this follow the eigenvector character
/// (diabatic labels); wider ones keep the sorted phase order. This is the
/// Landau-Zener scale of a 2000-period pump with order-0.1 band slopes, so
/// the labeled bands are the ones whose Chern numbers the pump measures.
const DIABATIC_GAP: f64 = 0.02;

/// Eigenphase isolation at the anchor point above which a band is considered
/// a candidate for diabatic tracking (gap measurement applies to its swaps).
const ANCHOR_ISOLATION: f64 = 0.05;


fn unwrap_near(x: f64, anchor: f64) -> f64 {
    let mut y = x;
    while y - anchor > std::f64::consts::PI {
        y -= TAU;
    }
    while y - anchor < -std::f64::consts::PI {
        y += TAU;
    }
    y
}

/// Overlap of one reduced eigenvector column with another.
fn column_dot(prev: &Array2<C64>, b: usize, cur: &Array2<C64>, c: usize) -> C64 {
    let n = prev.nrows();
    let mut dot = C64::new(0.0, 0.0);
    for r in 0..n {
        dot += prev[(r, b)].conj() * cur[(r, c)];
    }
    dot
}

/// Measured avoided gap where a tracked band's phase line crosses another
/// band's line inside the segment: one diagonalization at the intersection,
/// the tracked branch identified by overlap, the gap read off as the
/// distance to its nearest spectral neighbor there. `None` when the lines
/// do not cross inside the segment.
#[allow(clippy::too_many_arguments)]
fn crossing_gap(
    engine: &FloquetEngine<'_>,
    prev: &Array2<C64>,
    label: usize,
    line_a: (f64, f64),
    line_b: (f64, f64),
    from: (f64, f64),
    to: (f64, f64),
) -> Option<f64> {
    let bands = prev.ncols();
    let (ap, aq_raw) = line_a;
    let aq = unwrap_near(aq_raw, ap);
    let bp = unwrap_near(line_b.0, ap);
    let bq = unwrap_near(line_b.1, bp);
    let denom = (aq - ap) - (bq - bp);
    if denom.abs() < 1e-12 {
        return None;
    }
    let x0 = (bp - ap) / denom;
    if !(0.001..=0.999).contains(&x0) {
        return None;
    }
    let beta = from.0 + (to.0 - from.0) * x0;
    let phi = from.1 + (to.1 - from.1) * x0;
    let rf = engine.reduced(beta, phi);
    let cur = &rf.eigenvectors;
    let (best, _) = (0..bands)
        .map(|c| (c, column_dot(prev, label, cur, c).norm()))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap();
    let here = rf.eigenphases[best];
    let gap = rf
        .eigenphases
        .iter()
        .enumerate()
        .filter(|&(c, _)| c != best)
        .map(|(_, &p)| crate::floquet::phase_distance(p, here))
        .fold(f64::INFINITY, f64::min);
    Some(gap)
}

/// Label continuation from the previous point to the new one.
///
/// Anchor-isolated bands are tracked by eigenvector character: each claims
/// its best-overlap column, accepted only when the match is confident and
/// every phase-line crossing implied by the claimed rank change has a
/// measured avoided gap below the diabatic scale. All remaining labels fill
/// the remaining columns in sorted order. Returns (perm, clear) with
/// `perm[label] = sorted column index` and `clear = false` when a tracked
/// band had no overlap above 0.5.
#[allow(clippy::too_many_arguments)]
fn continue_point(
    engine: &FloquetEngine<'_>,
    prev: &Array2<C64>,
    prev_phases: &[f64],
    prev_perm: &[usize],
    cur: &Array2<C64>,
    cur_sorted_phases: &[f64],
    sorted_prev_phases: &[f64],
    isolated: &[bool],
    from: (f64, f64),
    to: (f64, f64),
) -> (Vec<usize>, bool) {
    let bands = prev.ncols();
    let mut perm = vec![usize::MAX; bands];
    let mut used = vec![false; bands];
    let mut clear = true;

    // character claims of the tracked bands, strongest first
    let mut claims: Vec<(usize, usize, f64)> = Vec::new();
    for b in 0..bands {
        if !isolated[b] {
            continue;
        }
        let (best, conf) = (0..bands)
            .map(|c| (c, column_dot(prev, b, cur, c).norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if conf < 0.5 {
            clear = false;
        }
        claims.push((b, best, conf));
    }
    claims.sort_by(|x, y| y.2.total_cmp(&x.2));
    for (b, c, conf) in claims {
        if used[c] || conf < SWAP_CONFIDENCE {
            continue;
        }
        let r_prev = prev_perm[b];
        let mut accept = true;
        if c != r_prev {
            // The claim changes the sorted rank by d: the d crossed bands
            // each shift one rank the other way. Measure every implied
            // phase-line crossing and demand they all be diabatic.
            let line_b = (prev_phases[b], cur_sorted_phases[c]);
            let partners: Vec<(usize, usize)> = if c > r_prev {
                (r_prev + 1..=c).map(|i| (i, i - 1)).collect()
            } else {
                (c..r_prev).map(|i| (i, i + 1)).collect()
            };
            for (i_prev, i_cur) in partners {
                let line_r = (sorted_prev_phases[i_prev], cur_sorted_phases[i_cur]);
                if let Some(gap) = crossing_gap(engine, prev, b, line_b, line_r, from, to) {
                    if gap >= DIABATIC_GAP {
                        accept = false;
                        break;
                    }
                }
            }
        }
        if accept {
            perm[b] = c;
            used[c] = true;
        }
    }

    // fill the rest by sorted order, preserving the previous relative order
    let mut rest: Vec<usize> = (0..bands).filter(|&b| perm[b] == usize::MAX).collect();
    rest.sort_by_key(|&b| prev_perm[b]);
    let free = (0..bands).filter(|&c| !used[c]);
    for (b, c) in rest.into_iter().zip(free) {
        perm[b] = c;
    }
    (perm, clear)
}

/// Uniform periodic grid over [0, 2π) × [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    pub n_beta: usize,
    pub n_phi: usize,
}

impl TorusGrid {
    pub fn new(n_beta: usize, n_phi: usize) -> Self {
        TorusGrid { n_beta, n_phi }
    }

    /// 24×24 for one particle. For interacting particles the quasimomentum
    /// direction must run over the L physical co-translation sectors (the
    /// reduced operator interpolates between them only for N = 1), so the
    /// default is 16×L.
    pub fn default_for(particles: usize, cells: usize) -> Self {
        if particles >= 2 {
            TorusGrid::new(16, cells)
        } else {
            TorusGrid::new(24, 24)
        }
    }

    pub fn beta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_beta as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_phi as f64
    }

    pub fn doubled(&self) -> Self {
        TorusGrid::new(2 * self.n_beta, 2 * self.n_phi)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChernSettings {
    /// Minimum inter-group eigenphase gap (on the circle) for isolation.
    pub gap_floor: f64,
    /// Allowed distance of the plaquette sum from an integer.
    pub integer_tol: f64,
}

impl Default for ChernSettings {
    fn default() -> Self {
        ChernSettings {
            gap_floor: 1e-6,
            integer_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Grouping {
    /// Merge bands whose minimal mutual gap anywhere on the grid is below
    /// the gap floor.
    Auto,
    Explicit(Vec<Range<usize>>),
}

/// Chern numbers per band group, with inter-group gap health flags.
#[derive(Debug, Clone)]
pub struct ChernSet {
    pub band_groups: Vec<Range<usize>>,
    pub chern: Vec<i64>,
    /// One flag per adjacent group pair on the quasienergy circle
    /// (`gap_ok[i]` covers the boundary between group i and group i+1,
    /// cyclically).
    pub gap_ok: Vec<bool>,
}

impl ChernSet {
    pub fn total(&self) -> i64 {
        self.chern.iter().sum()
    }
}

/// Eigen-systems of the reduced Floquet operator at every grid point.
///
/// Bands are labeled at (0, 0) by eigenphase past a common anchor cut, and
/// continued across the grid by eigenvector character: when a folded band
/// sweeps through another between two grid points (a dense two-particle
/// spectrum crosses an isolated band with avoided gaps of ~1e−3, far below
/// any affordable grid spacing), the overlap evidence is decisive and the
/// labels follow the character through; where hybridization is slow enough
/// for the grid to resolve, the sorted order stands. Both the pump dynamics
/// and the coarse-grid plaquette field belong to the character-continued
/// bands.
pub struct GridEigens {
    pub grid: TorusGrid,
    pub bands: usize,
    pub cut: f64,
    /// `phases[idx][band]`, idx = i_beta·n_phi + i_phi, in label order.
    phases: Vec<Vec<f64>>,
    /// Per-point eigenphases in ascending order past the cut (label-free,
    /// for gap analysis).
    sorted_phases: Vec<Vec<f64>>,
    /// Eigenvector columns in label order.
    vectors: Vec<Array2<C64>>,
    /// Grid points where a diabatic cluster match had overlap below 0.5.
    pub ambiguous: Vec<(usize, usize)>,
}

impl GridEigens {
    /// Diagonalize on every grid point in parallel (results keyed by grid
    /// index, independent of scheduling), then continue band labels from
    /// (0, 0): along row 0 in φ, then along β per column.
    pub fn compute(engine: &FloquetEngine<'_>, grid: TorusGrid) -> Self {
        let bands = engine.seeds.cardinality();
        let first = engine.reduced(0.0, 0.0);
        let cut = anchor_cut(&first.eigenphases);
        let total = grid.n_beta * grid.n_phi;
        let raw: Vec<(Vec<f64>, Array2<C64>)> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let ib = idx / grid.n_phi;
                let ip = idx % grid.n_phi;
                let rf = engine.reduced(grid.beta(ib), grid.phi(ip));
                let mut order: Vec<usize> = (0..bands).collect();
                order.sort_by(|&i, &j| {
                    shifted_phase(rf.eigenphases[i], cut)
                        .total_cmp(&shifted_phase(rf.eigenphases[j], cut))
                });
                let phases: Vec<f64> = order.iter().map(|&i| rf.eigenphases[i]).collect();
                let vectors =
                    Array2::from_shape_fn((bands, bands), |(r, c)| rf.eigenvectors[(r, order[c])]);
                (phases, vectors)
            })
            .collect();

        let sorted_phases: Vec<Vec<f64>> = raw.iter().map(|(p, _)| p.clone()).collect();
        // bands considered for diabatic tracking: isolated at the anchor
        let anchor = &sorted_phases[0];
        let isolated: Vec<bool> = (0..bands)
            .map(|b| {
                let here = shifted_phase(anchor[b], cut);
                let below = if b > 0 {
                    here - shifted_phase(anchor[b - 1], cut)
                } else {
                    here + TAU - shifted_phase(anchor[bands - 1], cut)
                };
                let above = if b + 1 < bands {
                    shifted_phase(anchor[b + 1], cut) - here
                } else {
                    TAU - here + shifted_phase(anchor[0], cut)
                };
                below.min(above) > ANCHOR_ISOLATION
            })
            .collect();
        let mut phases: Vec<Vec<f64>> = vec![Vec::new(); total];
        let mut vectors: Vec<Array2<C64>> = vec![Array2::zeros((0, 0)); total];
        let mut perms: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut ambiguous = Vec::new();

        for ip in 0..grid.n_phi {
            for ib in 0..grid.n_beta {
                let idx = ib * grid.n_phi + ip;
                let (p, v) = &raw[idx];
                if ib == 0 && ip == 0 {
                    phases[idx] = p.clone();
                    vectors[idx] = v.clone();
                    perms[idx] = (0..bands).collect();
                    continue;
                }
                let (prev_idx, from, to) = if ib == 0 {
                    // row 0: continue along φ
                    (ip - 1, (0.0, grid.phi(ip - 1)), (0.0, grid.phi(ip)))
                } else {
                    // continue along β from the row above
                    (
                        (ib - 1) * grid.n_phi + ip,
                        (grid.beta(ib - 1), grid.phi(ip)),
                        (grid.beta(ib), grid.phi(ip)),
                    )
                };
                let (perm, clear) = continue_point(
                    engine,
                    &vectors[prev_idx],
                    &phases[prev_idx],
                    &perms[prev_idx],
                    v,
                    p,
                    &sorted_phases[prev_idx],
                    &isolated,
                    from,
                    to,
                );
                if !clear {
                    ambiguous.push((ib, ip));
                }
                let ph: Vec<f64> = perm.iter().map(|&c| p[c]).collect();
                let vm = Array2::from_shape_fn((bands, bands), |(r, b)| v[(r, perm[b])]);
                phases[idx] = ph;
                vectors[idx] = vm;
                perms[idx] = perm;
            }
        }

        GridEigens {
            grid,
            bands,
            cut,
            phases,
            sorted_phases,
            vectors,
            ambiguous,
        }
    }

    #[inline]
    fn idx(&self, ib: usize, ip: usize) -> usize {
        (ib % self.grid.n_beta) * self.grid.n_phi + (ip % self.grid.n_phi)
    }

    /// Eigenphases at a grid point, in band-label order.
    pub fn phases_at(&self, ib: usize, ip: usize) -> &[f64] {
        &self.phases[self.idx(ib, ip)]
    }

    /// Minimal circular gap between sorted band `b` and band `b+1` (cyclic
    /// over the band index, so `b = bands−1` measures the wrap gap), together
    /// with the grid point attaining it.
    pub fn boundary_gap(&self, b: usize) -> (f64, (usize, usize)) {
        let mut min_gap = f64::INFINITY;
        let mut at = (0, 0);
        for ib in 0..self.grid.n_beta {
            for ip in 0..self.grid.n_phi {
                let ph = &self.sorted_phases[self.idx(ib, ip)];
                let lo = shifted_phase(ph[b], self.cut);
                let hi = if b + 1 < self.bands {
                    shifted_phase(ph[b + 1], self.cut)
                } else {
                    shifted_phase(ph[0], self.cut) + TAU
                };
                let gap = hi - lo;
                if gap < min_gap {
                    min_gap = gap;
                    at = (ib, ip);
                }
            }
        }
        (min_gap, at)
    }

    /// Multiply every eigenvector by an independent pseudo-random phase;
    /// Chern integers must not move (gauge invariance).
    pub fn with_random_gauge(&self, seed: u64) -> GridEigens {
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x2545f4914f6cdd1d);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            TAU * (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let mut out = v.clone();
                for c in 0..self.bands {
                    let ph = C64::from_polar(1.0, next());
                    for r in 0..self.bands {
                        out[(r, c)] *= ph;
                    }
                }
                out
            })
            .collect();
        GridEigens {
            grid: self.grid,
            bands: self.bands,
            cut: self.cut,
            phases: self.phases.clone(),
            sorted_phases: self.sorted_phases.clone(),
            vectors,
            ambiguous: self.ambiguous.clone(),
        }
    }

    /// Overlap-determinant link between two grid points, restricted to a
    /// band group.
    fn link(&self, from: usize, to: usize, group: &Range<usize>) -> C64 {
        let g = group.len();
        let va = &self.vectors[from];
        let vb = &self.vectors[to];
        let n = self.bands;
        let m = CMat::from_fn(g, g, |a, b| {
            let ca = group.start + a;
            let cb = group.start + b;
            let mut dot = C64::new(0.0, 0.0);
            for r in 0..n {
                dot += va[(r, ca)].conj() * vb[(r, cb)];
            }
            dot
        });
        determinant(&m)
    }

    /// Plaquette-summed Berry phase of a band group, divided by 2π.
    ///
    /// Loop orientation (φ first, then β) is fixed so that the Chern number
    /// equals the pump displacement in unit cells under the stepwise
    /// β = 2π(m−1)/M protocol.
    pub fn chern_sum(&self, group: &Range<usize>) -> f64 {
        let nb = self.grid.n_beta;
        let np = self.grid.n_phi;
        let mut total = 0.0f64;
        for ib in 0..nb {
            for ip in 0..np {
                let p00 = self.idx(ib, ip);
                let p10 = self.idx(ib + 1, ip);
                let p11 = self.idx(ib + 1, ip + 1);
                let p01 = self.idx(ib, ip + 1);
                let z = self.link(p00, p01, group)
                    * self.link(p01, p11, group)
                    * self.link(p11, p10, group)
                    * self.link(p10, p00, group);
                total += z.arg();
            }
        }
        total / TAU
    }
}

/// Chern number of one band group; the group must be spectrally isolated
/// from its complement everywhere on the grid.
pub fn band_chern(
    eigens: &GridEigens,
    group: Range<usize>,
    settings: &ChernSettings,
) -> Result<i64> {
    if group.start >= group.end || group.end > eigens.bands {
        return Err(Error::InvalidParameter(format!(
            "band group {group:?} out of range for {} bands",
            eigens.bands
        )));
    }
    if group.len() < eigens.bands {
        // check isolation at the two group boundaries (cyclic band index)
        let below = (group.start + eigens.bands - 1) % eigens.bands;
        let above = group.end - 1;
        for b in [below, above] {
            let (gap, (ib, ip)) = eigens.boundary_gap(b);
            if gap <= settings.gap_floor {
                return Err(Error::GapClosure {
                    i_beta: ib,
                    i_phi: ip,
                    gap,
                    floor: settings.gap_floor,
                });
            }
        }
    }
    let c = eigens.chern_sum(&group);
    let rounded = c.round();
    let dist = (c - rounded).abs();
    if dist > settings.integer_tol {
        return Err(Error::NonIntegerResult { value: c, dist });
    }
    Ok(rounded as i64)
}

/// Partition all bands into groups (auto-merging across sub-floor gaps) and
/// compute one integer per group.
pub fn chern_all(
    eigens: &GridEigens,
    grouping: &Grouping,
    settings: &ChernSettings,
) -> Result<ChernSet> {
    let groups = match grouping {
        Grouping::Explicit(g) => g.clone(),
        Grouping::Auto => auto_groups(eigens, settings),
    };
    // validate the partition
    let mut covered = 0;
    for g in &groups {
        if g.start != covered {
            return Err(Error::InvalidParameter(
                "band groups must partition the spectrum contiguously".into(),
            ));
        }
        covered = g.end;
    }
    if covered != eigens.bands {
        return Err(Error::InvalidParameter(
            "band groups must cover all bands".into(),
        ));
    }
    let chern = groups
        .iter()
        .map(|g| band_chern(eigens, g.clone(), settings))
        .collect::<Result<Vec<i64>>>()?;
    let gap_ok = groups
        .iter()
        .map(|g| {
            let boundary = (g.end + eigens.bands - 1) % eigens.bands;
            eigens.boundary_gap(boundary).0 > settings.gap_floor
        })
        .collect();
    Ok(ChernSet {
        band_groups: groups,
        chern,
        gap_ok,
    })
}

/// Boundaries with minimal grid-wide gap below the floor get merged.
/// If the wrap boundary (last band to first, across the cut) also closes,
/// the first and last groups are one circular group; the anchored cut lives
/// in the largest gap of the first grid point, so this only happens when the
/// spectrum has no isolated top/bottom group at all — merge everything.
fn auto_groups(eigens: &GridEigens, settings: &ChernSettings) -> Vec<Range<usize>> {
    let n = eigens.bands;
    let open: Vec<bool> = (0..n)
        .map(|b| eigens.boundary_gap(b).0 > settings.gap_floor)
        .collect();
    if open.iter().all(|&o| !o) {
        return vec![0..n];
    }
    let mut groups = Vec::new();
    let mut start = 0usize;
    for b in 0..n {
        if open[b] {
            groups.push(start..b + 1);
            start = b + 1;
        }
    }
    if start < n {
        // Wrap boundary closed: bands [start, n) continue into band 0 across
        // the cut. Keep the partition contiguous; band_chern will report the
        // closure if someone asks for this trailing group alone.
        groups.push(start..n);
    }
    groups
}

/// Compute Chern numbers, doubling the grid until two consecutive
/// resolutions agree on grouping and integers.
pub fn chern_all_refined(
    engine: &FloquetEngine<'_>,
    start: TorusGrid,
    grouping: &Grouping,
    settings: &ChernSettings,
    max_doublings: usize,
) -> Result<(ChernSet, TorusGrid)> {
    let mut grid = start;
    let eigens = GridEigens::compute(engine, grid);
    let mut current = chern_all(&eigens, grouping, settings);
    for _ in 0..max_doublings {
        let finer = grid.doubled();
        let eigens2 = GridEigens::compute(engine, finer);
        let next = chern_all(&eigens2, grouping, settings);
        match (&current, &next) {
            (Ok(a), Ok(b)) if a.band_groups == b.band_groups && a.chern == b.chern => {
                return Ok((b.clone(), finer));
            }
            _ => {
                current = next;
                grid = finer;
            }
        }
    }
    current.map(|c| (c, grid))
}
