//! Dense linear algebra helpers on top of `faer`.
//!
//! Everything here works on `faer::Mat<Complex64>`; the public crate surface
//! exposes `ndarray` types, converted at the boundary.

use faer::Mat;
use ndarray::Array2;
use num_complex::Complex64 as C64;

pub type CMat = Mat<C64>;

pub fn to_ndarray(m: &CMat) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

pub fn from_ndarray(a: &Array2<C64>) -> CMat {
    CMat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Max-norm of U†U − I.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let g = u.adjoint() * u;
    let n = u.ncols();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            worst = worst.max((g[(i, j)] - expect).norm());
        }
    }
    worst
}

/// Max-norm of A − A†.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and
/// orthonormal eigenvector columns.
pub fn eigh(h: &CMat) -> (Vec<f64>, CMat) {
    let evd = h
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("hermitian eigendecomposition failed");
    let s = evd.S().column_vector().to_owned();
    let vals: Vec<f64> = (0..h.nrows()).map(|i| s[i].re).collect();
    (vals, evd.U().to_owned())
}

/// exp(z·H) for Hermitian H, via Taylor series with scaling and squaring.
/// With purely imaginary z this is unitary to machine precision.
pub fn exp_scaled_hermitian(h: &CMat, z: C64) -> CMat {
    let n = h.nrows();
    // infinity norm of z*H decides the scaling
    let mut norm = 0.0f64;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += h[(i, j)].norm();
        }
        norm = norm.max(row);
    }
    norm *= z.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let zs = z / (1u64 << squarings) as f64;
    let a = CMat::from_fn(n, n, |i, j| h[(i, j)] * zs);

    let mut result = CMat::identity(n, n);
    let mut term = CMat::identity(n, n);
    for k in 1..=24u64 {
        term = &term * &a;
        let scale = C64::new(1.0 / k as f64, 0.0);
        term = CMat::from_fn(n, n, |i, j| term[(i, j)] * scale);
        let mut tnorm = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                tnorm = tnorm.max(term[(i, j)].norm());
            }
        }
        result = &result + &term;
        if tnorm < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Eigendecomposition of a unitary (normal) matrix.
///
/// Returns eigenphases in (−π, π] and exactly orthonormal eigenvector
/// columns. Built from two Hermitian solves: first (U+U†)/2 resolves cos ε,
/// then within each near-degenerate cos-cluster the anti-Hermitian part
/// resolves sin ε. Clusters where both agree are true degeneracies and any
/// orthonormal basis of the cluster is acceptable.
pub fn unitary_eigen(u: &CMat) -> (Vec<f64>, CMat) {
    let n = u.nrows();
    let half = C64::new(0.5, 0.0);
    let re_part = CMat::from_fn(n, n, |i, j| (u[(i, j)] + u[(j, i)].conj()) * half);
    let (cosvals, mut vecs) = eigh(&re_part);

    // chain-cluster the cos values
    const CLUSTER_TOL: f64 = 1e-7;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (cosvals[end] - cosvals[end - 1]).abs() < CLUSTER_TOL {
            end += 1;
        }
        let width = end - start;
        if width > 1 {
            // project U on the cluster and diagonalize its imaginary part
            let sub = vecs.as_ref().subcols(start, width);
            let w = sub.adjoint() * u * sub;
            let im_part =
                CMat::from_fn(width, width, |i, j| (w[(i, j)] - w[(j, i)].conj()) * C64::new(0.0, -0.5));
            let (_, rot) = eigh(&im_part);
            let rotated = sub * &rot;
            for (c, col) in (start..end).zip(0..width) {
                for r in 0..n {
                    vecs[(r, c)] = rotated[(r, col)];
                }
            }
        }
        start = end;
    }

    // eigenphases from the Rayleigh quotients of the refined vectors
    let w = vecs.adjoint() * u * &vecs;
    let phases: Vec<f64> = (0..n).map(|i| w[(i, i)].arg()).collect();
    (phases, vecs)
}

/// Determinant of a small complex matrix by LU with partial pivoting.
pub fn determinant(m: &CMat) -> C64 {
    let n = m.nrows();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    if n == 1 {
        return m[(0, 0)];
    }
    let mut a: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| m[(i, j)]).collect()).collect();
    let mut det = C64::new(1.0, 0.0);
    for col in 0..n {
        let (pivot, _) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        let inv = C64::new(1.0, 0.0) / a[col][col];
        for r in col + 1..n {
            let f = a[r][col] * inv;
            if f.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let sub = f * a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_unitary(n: usize, seed: u64) -> CMat {
        // deterministic pseudo-random Hermitian, exponentiated
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state as f64 / u64::MAX as f64) - 0.5
        };
        let raw = CMat::from_fn(n, n, |_, _| C64::new(next(), next()));
        let herm = CMat::from_fn(n, n, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * C64::new(0.5, 0.0));
        exp_scaled_hermitian(&herm, C64::new(0.0, -1.0))
    }

    #[test]
    fn exp_of_hermitian_is_unitary() {
        let h = random_unitary(8, 3); // not hermitian, but use its re part
        let herm = CMat::from_fn(8, 8, |i, j| (h[(i, j)] + h[(j, i)].conj()) * C64::new(0.5, 0.0));
        let u = exp_scaled_hermitian(&herm, C64::new(0.0, -0.7));
        assert!(unitarity_defect(&u) < 1e-13);
    }

    #[test]
    fn exp_matches_eigenbasis_route() {
        let raw = random_unitary(6, 11);
        let h = CMat::from_fn(6, 6, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * C64::new(0.5, 0.0));
        let dt = 0.37;
        let u = exp_scaled_hermitian(&h, C64::new(0.0, -dt));
        let (vals, vecs) = eigh(&h);
        let diag = CMat::from_fn(6, 6, |i, j| {
            if i == j {
                C64::from_polar(1.0, -dt * vals[i])
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let u_ref = &vecs * diag * vecs.adjoint();
        for i in 0..6 {
            for j in 0..6 {
                assert!((u[(i, j)] - u_ref[(i, j)]).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn unitary_eigen_reconstructs() {
        for seed in [1u64, 2, 9] {
            let u = random_unitary(10, seed);
            let (phases, vecs) = unitary_eigen(&u);
            // orthonormal columns
            assert!(unitarity_defect(&vecs) < 1e-12);
            // U v = e^{i eps} v
            let uv = &u * &vecs;
            for c in 0..10 {
                let lam = C64::from_polar(1.0, phases[c]);
                for r in 0..10 {
                    assert!((uv[(r, c)] - lam * vecs[(r, c)]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn unitary_eigen_handles_cos_degeneracy() {
        // diag(e^{i a}, e^{-i a}) has equal cos but distinct phases
        let a = 1.234f64;
        let u = CMat::from_fn(2, 2, |i, j| {
            if i != j {
                C64::new(0.0, 0.0)
            } else if i == 0 {
                C64::from_polar(1.0, a)
            } else {
                C64::from_polar(1.0, -a)
            }
        });
        // conjugate by a fixed rotation so the degeneracy is not pre-resolved
        let r = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => C64::new(0.6, 0.0),
            (0, 1) => C64::new(0.8, 0.0),
            (1, 0) => C64::new(-0.8, 0.0),
            _ => C64::new(0.6, 0.0),
        });
        let u = &r * u * r.adjoint();
        let (mut phases, vecs) = unitary_eigen(&u);
        assert!(unitarity_defect(&vecs) < 1e-13);
        phases.sort_by(f64::total_cmp);
        assert!((phases[0] + a).abs() < 1e-12);
        assert!((phases[1] - a).abs() < 1e-12);
    }

    #[test]
    fn determinant_of_known_matrices() {
        let id = CMat::identity(4, 4);
        assert!((determinant(&id) - C64::new(1.0, 0.0)).norm() < 1e-15);
        let u = random_unitary(7, 5);
        let d = determinant(&u);
        assert!((d.norm() - 1.0).abs() < 1e-12);
        // det of a product is the product of dets
        let v = random_unitary(7, 6);
        let uv = &u * &v;
        assert!((determinant(&uv) - d * determinant(&v)).norm() < 1e-11);
    }
}
