//! Fixed-particle-number occupation basis on a chain of 3L sites, plus the
//! co-translation symmetry structure used to block-diagonalize everything.
//!
//! The co-translation `T̂₃` cyclically shifts all occupations by one unit
//! cell (three sites). For coprime (L, N) every orbit has exactly L members,
//! the basis splits into D_S = D/L orbits, and each orbit is represented by
//! a seed state. Bloch combinations of an orbit diagonalize `T̂₃` with
//! eigenvalue e^{iφ} (in the convention `T̂₃⁻¹|ψ⟩ = e^{iφ}|ψ⟩`).

use std::collections::HashMap;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::gcd;

/// Default cap on the basis dimension before enumeration is refused.
pub const DEFAULT_DIMENSION_CAP: usize = 5_000_000;

/// Occupation vector of length 3L summing to N.
///
/// Occupancies are stored as `u8`; sites never hold more than N bosons and
/// the supported regime is N ≤ 2, but nothing below assumes that bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    occ: Vec<u8>,
}

impl FockState {
    pub fn new(occ: Vec<u8>) -> Self {
        FockState { occ }
    }

    pub fn occupations(&self) -> &[u8] {
        &self.occ
    }

    pub fn sites(&self) -> usize {
        self.occ.len()
    }

    pub fn particles(&self) -> usize {
        self.occ.iter().map(|&n| n as usize).sum()
    }

    /// Cyclic shift of all occupations by one unit cell:
    /// |n₁,…,n_{3L}⟩ → |n_{3L−2}, n_{3L−1}, n_{3L}, n₁, …, n_{3(L−1)}⟩.
    pub fn cotranslate(&self) -> FockState {
        let s = self.occ.len();
        let mut occ = Vec::with_capacity(s);
        occ.extend_from_slice(&self.occ[s - 3..]);
        occ.extend_from_slice(&self.occ[..s - 3]);
        FockState { occ }
    }
}

/// Complete N-particle basis on 3L sites, deterministically ordered.
///
/// Ordering is lexicographic descending on occupation vectors, so the first
/// state piles all particles on site 1. Indices are reproducible across runs.
#[derive(Debug, Clone)]
pub struct FockBasis {
    cells: usize,
    particles: usize,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

/// D = C(3L+N−1, N), computed in u128 to survive large L before the cap check.
pub fn basis_dimension(cells: usize, particles: usize) -> u128 {
    let s = 3 * cells as u128 + particles as u128 - 1;
    let k = particles as u128;
    // binomial(s, k) with k small
    let mut d: u128 = 1;
    for i in 0..k {
        d = d * (s - i) / (i + 1);
    }
    d
}

impl FockBasis {
    /// Enumerate all C(3L+N−1, N) occupation states under the default cap.
    ///
    /// Requires L ≥ 2, N ≥ 1 and gcd(L, N) = 1 when N > 1; the non-coprime
    /// case is rejected because co-translation orbits are then non-uniform.
    pub fn enumerate(cells: usize, particles: usize) -> Result<Self> {
        Self::enumerate_capped(cells, particles, DEFAULT_DIMENSION_CAP)
    }

    /// Same as [`FockBasis::enumerate`] with an explicit dimension cap.
    pub fn enumerate_capped(cells: usize, particles: usize, cap: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::InvalidParameter("need at least 2 unit cells".into()));
        }
        if particles < 1 {
            return Err(Error::InvalidParameter("need at least 1 particle".into()));
        }
        if particles > 1 && gcd(cells as u64, particles as u64) != 1 {
            return Err(Error::CoprimalityViolation { cells, particles });
        }
        let dim = basis_dimension(cells, particles);
        if dim > cap as u128 {
            return Err(Error::OverflowRisk { dim, cap });
        }
        let sites = 3 * cells;
        let mut states = Vec::with_capacity(dim as usize);
        let mut occ = vec![0u8; sites];
        enumerate_desc(&mut occ, 0, particles as u8, &mut states);
        debug_assert_eq!(states.len(), dim as usize);
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(FockBasis {
            cells,
            particles,
            states,
            index,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn sites(&self) -> usize {
        3 * self.cells
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, index: usize) -> &FockState {
        &self.states[index]
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Lexicographically descending enumeration: fill site `pos` from high
/// occupancy to low, recurse on the remainder.
fn enumerate_desc(occ: &mut Vec<u8>, pos: usize, remaining: u8, out: &mut Vec<FockState>) {
    if pos + 1 == occ.len() {
        occ[pos] = remaining;
        out.push(FockState::new(occ.clone()));
        occ[pos] = 0;
        return;
    }
    for n in (0..=remaining).rev() {
        occ[pos] = n;
        enumerate_desc(occ, pos + 1, remaining - n, out);
    }
    occ[pos] = 0;
}

/// Partition of a basis into co-translation orbits.
///
/// `orbit_of[i] = (seed position, shift j)` with `state(i) = T̂₃ʲ|seed⟩`.
/// The seed of an orbit is its lowest-index member, which for N = 1 puts the
/// three seeds on the first unit cell.
#[derive(Debug, Clone)]
pub struct SeedDecomposition {
    seeds: Vec<usize>,
    orbit_of: Vec<(usize, usize)>,
    /// `members[s][j]` = basis index of T̂₃ʲ applied to seed `s`.
    members: Vec<Vec<usize>>,
}

impl SeedDecomposition {
    /// Decompose `basis` into orbits of exactly L states each.
    pub fn decompose(basis: &FockBasis) -> Result<Self> {
        let l = basis.cells();
        let dim = basis.dimension();
        let mut orbit_of = vec![(usize::MAX, usize::MAX); dim];
        let mut seeds = Vec::new();
        let mut members = Vec::new();
        for start in 0..dim {
            if orbit_of[start].0 != usize::MAX {
                continue;
            }
            // Walk the orbit once to find its members and the smallest index.
            let mut orbit = Vec::with_capacity(l);
            let mut cur = start;
            loop {
                orbit.push(cur);
                let next_state = basis.state(cur).cotranslate();
                cur = basis
                    .index_of(&next_state)
                    .expect("cotranslation stays inside the basis");
                if cur == start {
                    break;
                }
                if orbit.len() > l {
                    break;
                }
            }
            if orbit.len() != l {
                return Err(Error::OrbitSizeError {
                    index: start,
                    size: orbit.len(),
                    expected: l,
                });
            }
            let (pos_min, _) = orbit
                .iter()
                .enumerate()
                .min_by_key(|&(_, &idx)| idx)
                .expect("orbit non-empty");
            let seed_pos = seeds.len();
            seeds.push(orbit[pos_min]);
            // Relabel shifts so the seed carries shift 0.
            let mut mem = vec![0usize; l];
            for (walk, &idx) in orbit.iter().enumerate() {
                let j = (walk + l - pos_min) % l;
                orbit_of[idx] = (seed_pos, j);
                mem[j] = idx;
            }
            members.push(mem);
        }
        debug_assert_eq!(seeds.len() * l, dim);
        Ok(SeedDecomposition {
            seeds,
            orbit_of,
            members,
        })
    }

    /// Number of seed states, D_S = D/L.
    pub fn cardinality(&self) -> usize {
        self.seeds.len()
    }

    /// Basis index of seed number `s`.
    pub fn seed_index(&self, s: usize) -> usize {
        self.seeds[s]
    }

    pub fn seed_indices(&self) -> &[usize] {
        &self.seeds
    }

    /// (seed position, shift) of a basis index.
    pub fn orbit_of(&self, basis_index: usize) -> (usize, usize) {
        self.orbit_of[basis_index]
    }

    /// Basis index of T̂₃ʲ applied to seed `s`.
    pub fn member(&self, s: usize, shift: usize) -> usize {
        self.members[s][shift]
    }

    /// Seed position of a state, or `NotASeed`.
    pub fn seed_position(&self, basis: &FockBasis, state: &FockState) -> Result<usize> {
        let idx = basis.index_of(state).ok_or(Error::NotASeed)?;
        let (s, j) = self.orbit_of[idx];
        if j != 0 {
            return Err(Error::NotASeed);
        }
        Ok(s)
    }

    /// Normalized Bloch combination of the orbit of `seed`:
    /// (1/√L) Σ_j e^{ijφ} T̂₃ʲ|seed⟩, expressed over the full basis.
    pub fn bloch_vector(
        &self,
        basis: &FockBasis,
        seed: &FockState,
        phi: f64,
    ) -> Result<Array1<C64>> {
        let s = self.seed_position(basis, seed)?;
        Ok(self.bloch_vector_of(basis, s, phi))
    }

    /// Bloch combination by seed position (no `NotASeed` lookup).
    pub fn bloch_vector_of(&self, basis: &FockBasis, s: usize, phi: f64) -> Array1<C64> {
        let l = basis.cells();
        let norm = 1.0 / (l as f64).sqrt();
        let mut v = Array1::zeros(basis.dimension());
        for (j, &idx) in self.members[s].iter().enumerate() {
            v[idx] = C64::from_polar(norm, phi * j as f64);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dimension_formulas() {
        // N = 2, L = 21: D = C(64, 2) = 2016, D_S = 96.
        let basis = FockBasis::enumerate(21, 2).unwrap();
        assert_eq!(basis.dimension(), 2016);
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        assert_eq!(seeds.cardinality(), 96);

        // N = 1, L = 5: D = 3L = 15.
        let basis = FockBasis::enumerate(5, 1).unwrap();
        assert_eq!(basis.dimension(), 15);

        // N = 2, L = 5: D = C(16, 2) = 120, D_S = 24.
        let basis = FockBasis::enumerate(5, 2).unwrap();
        assert_eq!(basis.dimension(), 120);
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        assert_eq!(seeds.cardinality(), 24);
    }

    #[test]
    fn coprimality_enforced() {
        assert!(matches!(
            FockBasis::enumerate(4, 2),
            Err(Error::CoprimalityViolation { .. })
        ));
        assert!(matches!(
            FockBasis::enumerate(9, 3),
            Err(Error::CoprimalityViolation { .. })
        ));
        // N = 1 is always allowed.
        assert!(FockBasis::enumerate(4, 1).is_ok());
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            FockBasis::enumerate_capped(21, 2, 100),
            Err(Error::OverflowRisk { .. })
        ));
    }

    #[test]
    fn index_is_bijective() {
        let basis = FockBasis::enumerate(5, 2).unwrap();
        for i in 0..basis.dimension() {
            assert_eq!(basis.index_of(basis.state(i)), Some(i));
        }
    }

    #[test]
    fn cotranslate_examples() {
        // Single particle, L = 2.
        let s = FockState::new(vec![1, 0, 0, 0, 0, 0]);
        assert_eq!(s.cotranslate().occupations(), &[0, 0, 0, 1, 0, 0]);
        // Two particles, L = 2.
        let s = FockState::new(vec![1, 1, 0, 0, 0, 0]);
        assert_eq!(s.cotranslate().occupations(), &[0, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn cotranslate_period_is_l() {
        let basis = FockBasis::enumerate(5, 2).unwrap();
        for i in 0..basis.dimension() {
            let mut s = basis.state(i).clone();
            for _ in 0..basis.cells() {
                s = s.cotranslate();
            }
            assert_eq!(&s, basis.state(i));
        }
    }

    #[test]
    fn single_particle_seeds_sit_in_first_cell() {
        for l in [2usize, 5, 7] {
            let basis = FockBasis::enumerate(l, 1).unwrap();
            let seeds = SeedDecomposition::decompose(&basis).unwrap();
            assert_eq!(seeds.cardinality(), 3);
            let mut occupied_sites: Vec<usize> = seeds
                .seed_indices()
                .iter()
                .map(|&i| {
                    basis.state(i)
                        .occupations()
                        .iter()
                        .position(|&n| n == 1)
                        .unwrap()
                })
                .collect();
            occupied_sites.sort_unstable();
            assert_eq!(occupied_sites, vec![0, 1, 2]);
        }
    }

    #[test]
    fn orbits_partition_the_basis() {
        let basis = FockBasis::enumerate(5, 2).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        assert_eq!(seeds.cardinality(), 24);
        let mut seen = vec![0usize; basis.dimension()];
        for s in 0..seeds.cardinality() {
            for j in 0..basis.cells() {
                let idx = seeds.member(s, j);
                seen[idx] += 1;
                assert_eq!(seeds.orbit_of(idx), (s, j));
                // member really is T3^j of the seed
                let mut state = basis.state(seeds.seed_index(s)).clone();
                for _ in 0..j {
                    state = state.cotranslate();
                }
                assert_eq!(&state, basis.state(idx));
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
    }

    #[test]
    fn seeds_are_lowest_index_members() {
        let basis = FockBasis::enumerate(5, 2).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        for s in 0..seeds.cardinality() {
            let seed_idx = seeds.seed_index(s);
            for j in 0..basis.cells() {
                assert!(seeds.member(s, j) >= seed_idx);
            }
        }
    }

    #[test]
    fn not_a_seed_is_rejected() {
        let basis = FockBasis::enumerate(5, 1).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        // A particle on site 4 belongs to the orbit of site 1 with shift 1.
        let mut occ = vec![0u8; 15];
        occ[3] = 1;
        let state = FockState::new(occ);
        assert!(matches!(
            seeds.bloch_vector(&basis, &state, 0.0),
            Err(Error::NotASeed)
        ));
    }

    #[test]
    fn bloch_vectors_are_orthonormal_and_complete() {
        // Exhaustive check on small systems: the L-point phi grid of Bloch
        // vectors over all seeds is an orthonormal basis of the full space.
        for (l, n) in [(2usize, 1usize), (3, 1), (5, 1), (3, 2), (5, 2)] {
            let basis = FockBasis::enumerate(l, n).unwrap();
            let seeds = SeedDecomposition::decompose(&basis).unwrap();
            let mut all = Vec::new();
            for s in 0..seeds.cardinality() {
                for k in 0..l {
                    let phi = 2.0 * std::f64::consts::PI * k as f64 / l as f64;
                    all.push(seeds.bloch_vector_of(&basis, s, phi));
                }
            }
            assert_eq!(all.len(), basis.dimension());
            for (i, u) in all.iter().enumerate() {
                for (j, v) in all.iter().enumerate() {
                    let dot: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot.norm() - expect).abs() < 1e-12,
                        "L={l} N={n} i={i} j={j} dot={dot}"
                    );
                }
            }
        }
    }

    #[test]
    fn bloch_vector_amplitudes() {
        let basis = FockBasis::enumerate(5, 1).unwrap();
        let seeds = SeedDecomposition::decompose(&basis).unwrap();
        let seed = basis.state(seeds.seed_index(0)).clone();
        let v = seeds.bloch_vector(&basis, &seed, 0.0).unwrap();
        let nonzero: Vec<_> = v.iter().filter(|z| z.norm() > 1e-14).collect();
        assert_eq!(nonzero.len(), 5);
        for z in nonzero {
            assert!((z - C64::new(1.0 / 5.0f64.sqrt(), 0.0)).norm() < 1e-14);
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn cotranslate_preserves_particle_number(seed_idx in 0usize..120) {
            let basis = FockBasis::enumerate(5, 2).unwrap();
            let s = basis.state(seed_idx % basis.dimension());
            let t = s.cotranslate();
            prop_assert_eq!(s.particles(), t.particles());
            prop_assert!(basis.index_of(&t).is_some());
        }

        #[test]
        fn bloch_vector_is_normalized(s in 0usize..24, phi in 0.0f64..std::f64::consts::TAU) {
            let basis = FockBasis::enumerate(5, 2).unwrap();
            let seeds = SeedDecomposition::decompose(&basis).unwrap();
            let v = seeds.bloch_vector_of(&basis, s % seeds.cardinality(), phi);
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((norm - 1.0).abs() < 1e-12);
        }
    }
}
