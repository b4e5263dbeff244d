//! Dense complex matrix kernels shared by the algebra and operator layers.
//!
//! Everything here works on plain `DMatrix<Complex64>`; the block structure of
//! the algebras lives one level up.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// Absolute distance under which two spectral values are treated as one point.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Singular values below this fraction of the largest count as zero.
pub const RANK_RTOL: f64 = 1e-10;

pub(crate) const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

/// Rotations stop once every off-diagonal pair is below this multiple of
/// the geometric mean of the corresponding diagonal entries.
const JACOBI_EPS: f64 = 1e-15;
const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided Jacobi: rotates the columns of `m` until they are mutually
/// orthogonal. The returned columns are `U Σ` and their norms the singular
/// values, in no particular order.
///
/// Hand-rolled because the nalgebra SVD (complex and real alike) can return
/// wrong factors without signalling failure on some rank-deficient inputs.
fn orthogonal_columns(m: &CMat) -> (CMat, Vec<f64>) {
    let mut a = m.clone();
    let n = a.ncols();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= JACOBI_EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..a.nrows() {
                    let ap = a[(k, p)];
                    let aq = a[(k, q)] * phase.conj();
                    a[(k, p)] = ap * c - aq * s;
                    a[(k, q)] = ap * s + aq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms = (0..n).map(|j| a.column(j).norm()).collect();
    (a, norms)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    // Orthogonalising the shorter side is cheaper and gives the same values.
    let (_, mut sv) = if m.ncols() <= m.nrows() {
        orthogonal_columns(m)
    } else {
        orthogonal_columns(&m.adjoint())
    };
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest singular value; zero for empty matrices.
pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Largest modulus of an entry.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()))
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

/// `(m - m*) / 2i`, the imaginary Hermitian part.
pub fn skew_part(m: &CMat) -> CMat {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
/// The input is symmetrised first, so small rounding asymmetries are ignored.
///
/// Cyclic complex Jacobi rather than nalgebra's `SymmetricEigen`, for the same
/// reliability reason as [`orthogonal_columns`].
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let mut a = hermitian_part(h);
    let mut v = identity(n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                let (alpha, beta) = (a[(p, p)].re, a[(q, q)].re);
                if r == 0.0
                    || r <= JACOBI_EPS * (alpha.abs() * beta.abs()).sqrt().max(JACOBI_EPS * r)
                {
                    continue;
                }
                rotated = true;
                // Column q is first multiplied by d = conj(apq)/|apq|, making
                // the pivot real, then a real Givens rotation clears it.
                let d = apq.conj() / r;
                let theta = (beta - alpha) / (2.0 * r);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let (kp, kq) = (a[(k, p)], a[(k, q)] * d);
                    a[(k, p)] = kp * c - kq * s;
                    a[(k, q)] = kp * s + kq * c;
                }
                for k in 0..n {
                    let (pk, qk) = (a[(p, k)], a[(q, k)] * d.conj());
                    a[(p, k)] = pk * c - qk * s;
                    a[(q, k)] = pk * s + qk * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    let (kp, kq) = (v[(k, p)], v[(k, q)] * d);
                    v[(k, p)] = kp * c - kq * s;
                    v[(k, q)] = kp * s + kq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &v.column(src));
    }
    (values, vectors)
}

/// Groups a sorted list into runs whose consecutive gaps are at most `tol`.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            if start < i {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// A joint eigenspace of a family of commuting Hermitian matrices.
#[derive(Debug, Clone)]
pub struct JointSpace {
    /// One eigenvalue per matrix in the family.
    pub values: Vec<f64>,
    /// Orthonormal basis (columns).
    pub basis: CMat,
}

/// Simultaneous diagonalisation of commuting Hermitian matrices by successive
/// refinement: each matrix is compressed onto the eigenspaces found so far and
/// those are split along its clustered eigenvalues.
pub fn joint_eigenspaces(family: &[CMat], n: usize, tol: f64) -> Vec<JointSpace> {
    if n == 0 {
        return Vec::new();
    }
    let mut spaces = vec![JointSpace {
        values: Vec::new(),
        basis: identity(n),
    }];
    for h in family {
        let mut refined = Vec::with_capacity(spaces.len());
        for space in spaces {
            let q = &space.basis;
            let compressed = q.adjoint() * h * q;
            let (vals, vecs) = hermitian_eigen(&compressed);
            for range in cluster_sorted(&vals, tol) {
                let mean = vals[range.clone()].iter().sum::<f64>() / range.len() as f64;
                let sub = vecs.columns(range.start, range.len()).into_owned();
                let mut values = space.values.clone();
                values.push(mean);
                refined.push(JointSpace {
                    values,
                    basis: q * sub,
                });
            }
        }
        spaces = refined;
    }
    spaces
}

/// `V f(Λ) V*` for a Hermitian input.
pub fn hermitian_map(h: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let fj = Complex64::new(f(vals[j]), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vecs.adjoint()
}

/// Eigenvalues of a positive semidefinite matrix below this fraction of the
/// largest are rounding noise around zero.
const PSD_NOISE_RTOL: f64 = 1e-14;

/// Square root of a positive semidefinite matrix. Eigenvalues at rounding
/// level are set to zero so that the kernel survives the square root.
pub fn psd_sqrt(h: &CMat) -> CMat {
    let (vals, _) = hermitian_eigen(h);
    let floor = vals.last().copied().unwrap_or(0.0).max(0.0) * PSD_NOISE_RTOL;
    hermitian_map(h, |x| if x <= floor { 0.0 } else { x.sqrt() })
}

/// Numerical rank by the relative singular-value cutoff.
pub fn rank(m: &CMat) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s >= RANK_RTOL * smax).count()
}

/// Orthogonal projector onto the column space of `m`.
pub fn range_projector(m: &CMat) -> CMat {
    let rows = m.nrows();
    if m.is_empty() {
        return zeros(rows, rows);
    }
    let (cols, norms) = orthogonal_columns(m);
    let smax = norms.iter().fold(0.0_f64, |a, s| a.max(*s));
    if smax == 0.0 {
        return zeros(rows, rows);
    }
    let mut p = zeros(rows, rows);
    for (j, s) in norms.iter().enumerate() {
        if *s >= RANK_RTOL * smax {
            let u = cols.column(j) / Complex64::new(*s, 0.0);
            p += &u * u.adjoint();
        }
    }
    p
}

/// Orthogonal projector onto the kernel of `m`.
pub fn kernel_projector(m: &CMat) -> CMat {
    let cols = m.ncols();
    identity(cols) - range_projector(&m.adjoint())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn is_finite(m: &CMat) -> bool {
    m.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_eigen_sorted_and_orthonormal() {
        let h = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&h);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        let gram = vecs.adjoint() * &vecs;
        assert!(max_abs(&(gram - identity(2))) < 1e-14);
    }

    #[test]
    fn clustering_chains_close_values() {
        let ranges = cluster_sorted(&[0.0, 1e-9, 1.0, 1.0 + 5e-9, 3.0], 1e-8);
        assert_eq!(ranges, vec![0..2, 2..4, 4..5]);
        assert!(cluster_sorted(&[], 1e-8).is_empty());
    }

    #[test]
    fn norm_of_nilpotent() {
        let m = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((spectral_norm(&m) - 2.0).abs() < 1e-14);
        assert_eq!(rank(&m), 1);
        let k = kernel_projector(&m);
        assert!((k[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(k[(1, 1)].norm() < 1e-14);
    }

    fn low_rank_samples() -> Vec<CMat> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut out = Vec::new();
        for n in 1..=7 {
            for k in 0..=n {
                let a = crate::sample::gaussian_matrix(&mut rng, n, k);
                let b = crate::sample::gaussian_matrix(&mut rng, k, n);
                out.push(&a * &b);
                out.push((&a * &b).adjoint() * (&a * &b) * c(40.0, 0.0));
            }
        }
        out
    }

    #[test]
    fn eigen_reconstructs_rank_deficient_hermitian_matrices() {
        for m in low_rank_samples() {
            let h = hermitian_part(&m);
            let (vals, vecs) = hermitian_eigen(&h);
            let lambda = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                vals.len(),
                vals.iter().map(|v| c(*v, 0.0)),
            ));
            let scale = max_abs(&h).max(1.0);
            assert!(max_abs(&(&vecs * lambda * vecs.adjoint() - &h)) < 1e-13 * scale);
            assert!(max_abs(&(vecs.adjoint() * &vecs - identity(h.nrows()))) < 1e-13);
        }
    }

    #[test]
    fn projectors_and_rank_on_rank_deficient_matrices() {
        for m in low_rank_samples() {
            let p = range_projector(&m);
            let k = kernel_projector(&m);
            assert!(max_abs(&(&p * &p - &p)) < 1e-12);
            assert!(max_abs(&(&p * &m - &m)) < 1e-12 * max_abs(&m).max(1.0));
            assert!(max_abs(&(&m * &k)) < 1e-12 * max_abs(&m).max(1.0));
            assert_eq!(rank(&m), p.trace().re.round() as usize);
            // Singular values squared are the eigenvalues of m*m.
            let (vals, _) = hermitian_eigen(&(m.adjoint() * &m));
            let sv = singular_values(&m);
            let top = vals.last().copied().unwrap_or(0.0).max(1.0);
            for (s, v) in sv.iter().zip(vals.iter().rev()) {
                assert!((s * s - v).abs() < 1e-12 * top);
            }
        }
    }
}
