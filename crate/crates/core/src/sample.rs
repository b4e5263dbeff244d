//! Random test inputs: algebras, modules, operators of prescribed type, and
//! density elements. Every generator draws only from the supplied RNG.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraDescriptor, AlgebraElement};
use crate::linalg::CMat;
use crate::module_space::{AdjointableOp, ModuleDescriptor, ModuleVector};
use crate::regular::{z_from_bounded, RegularOp};
use crate::unbounded::RationalSymbol;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-like unitary from the QR factorisation of a Gaussian matrix.
pub fn unitary_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let qr = gaussian_matrix(rng, n, n).qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMat::from_fn(n, n, |i, j| {
        if i == j && r[(i, i)].norm() > 0.0 {
            r[(i, i)] / r[(i, i)].norm()
        } else if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// Up to `max_blocks` blocks of size at most `max_dim`.
pub fn algebra<R: Rng + ?Sized>(
    rng: &mut R,
    max_blocks: usize,
    max_dim: usize,
) -> AlgebraDescriptor {
    let m = rng.random_range(1..=max_blocks.max(1));
    let dims = (0..m)
        .map(|_| rng.random_range(1..=max_dim.max(1)))
        .collect();
    AlgebraDescriptor::new(dims).expect("dimensions are positive")
}

/// A module `A^p` with `p ≤ max_rank` over a random algebra.
pub fn module<R: Rng + ?Sized>(
    rng: &mut R,
    max_rank: usize,
    max_blocks: usize,
    max_dim: usize,
) -> ModuleDescriptor {
    let a = algebra(rng, max_blocks, max_dim);
    let p = rng.random_range(1..=max_rank.max(1));
    ModuleDescriptor::new(a, p).expect("rank is positive")
}

/// Element with Gaussian block entries.
pub fn element<R: Rng + ?Sized>(rng: &mut R, alg: &AlgebraDescriptor) -> AlgebraElement {
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&d| gaussian_matrix(rng, d, d))
        .collect();
    AlgebraElement::from_blocks(alg.clone(), blocks).expect("blocks follow the descriptor")
}

/// Vector with Gaussian coordinates.
pub fn vector<R: Rng + ?Sized>(rng: &mut R, desc: &ModuleDescriptor) -> ModuleVector {
    let coords: Vec<_> = (0..desc.rank())
        .map(|_| element(rng, desc.algebra()))
        .collect();
    ModuleVector::from_coords(desc, &coords).expect("coordinates follow the descriptor")
}

fn op_from_blocks(
    domain: &ModuleDescriptor,
    codomain: &ModuleDescriptor,
    blocks: Vec<CMat>,
) -> AdjointableOp {
    AdjointableOp::from_blocks(domain, codomain, blocks).expect("blocks follow the descriptors")
}

/// Gaussian entries scaled by `scale`.
pub fn operator<R: Rng + ?Sized>(
    rng: &mut R,
    domain: &ModuleDescriptor,
    codomain: &ModuleDescriptor,
    scale: f64,
) -> AdjointableOp {
    let blocks = domain
        .algebra()
        .block_dims()
        .iter()
        .map(|&d| {
            gaussian_matrix(rng, codomain.rank() * d, domain.rank() * d)
                * Complex64::new(scale, 0.0)
        })
        .collect();
    op_from_blocks(domain, codomain, blocks)
}

/// `Σ U diag(λ) U*` blockwise, eigenvalues drawn by `eigen`.
pub fn diagonalizable<R: Rng + ?Sized>(
    rng: &mut R,
    desc: &ModuleDescriptor,
    mut eigen: impl FnMut(&mut R) -> Complex64,
) -> AdjointableOp {
    let blocks = desc
        .algebra()
        .block_dims()
        .iter()
        .map(|&d| {
            let n = desc.rank() * d;
            let u = unitary_matrix(rng, n);
            let lambda = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| eigen(rng)));
            &u * lambda * u.adjoint()
        })
        .collect();
    op_from_blocks(desc, desc, blocks)
}

/// Normal operator with Gaussian eigenvalues.
pub fn normal<R: Rng + ?Sized>(rng: &mut R, desc: &ModuleDescriptor) -> AdjointableOp {
    diagonalizable(rng, desc, |r| gaussian(r))
}

/// Selfadjoint operator with Gaussian eigenvalues.
pub fn selfadjoint<R: Rng + ?Sized>(rng: &mut R, desc: &ModuleDescriptor) -> AdjointableOp {
    diagonalizable(rng, desc, |r| Complex64::new(r.sample(StandardNormal), 0.0))
}

/// Positive operator with eigenvalues in `[lower, lower + 3)`.
pub fn positive<R: Rng + ?Sized>(
    rng: &mut R,
    desc: &ModuleDescriptor,
    lower: f64,
) -> AdjointableOp {
    diagonalizable(rng, desc, |r| {
        Complex64::new(lower + 3.0 * r.random::<f64>(), 0.0)
    })
}

/// Unitary operator.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, desc: &ModuleDescriptor) -> AdjointableOp {
    let blocks = desc
        .algebra()
        .block_dims()
        .iter()
        .map(|&d| unitary_matrix(rng, desc.rank() * d))
        .collect();
    op_from_blocks(desc, desc, blocks)
}

/// Two commuting normal operators sharing one eigenbasis per block.
pub fn commuting_normals<R: Rng + ?Sized>(
    rng: &mut R,
    desc: &ModuleDescriptor,
    mut eigen: impl FnMut(&mut R) -> Complex64,
) -> (AdjointableOp, AdjointableOp) {
    let mut s_blocks = Vec::new();
    let mut t_blocks = Vec::new();
    for &d in desc.algebra().block_dims() {
        let n = desc.rank() * d;
        let u = unitary_matrix(rng, n);
        let ls = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| eigen(rng)));
        let lt = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| eigen(rng)));
        s_blocks.push(&u * ls * u.adjoint());
        t_blocks.push(&u * lt * u.adjoint());
    }
    (
        op_from_blocks(desc, desc, s_blocks),
        op_from_blocks(desc, desc, t_blocks),
    )
}

/// Density element `ρ ≥ 0` with `Σ tr ρ_k = 1`; `full_support` forces `ρ` invertible.
pub fn density<R: Rng + ?Sized>(
    rng: &mut R,
    alg: &AlgebraDescriptor,
    full_support: bool,
) -> AlgebraElement {
    let mut blocks: Vec<CMat> = alg
        .block_dims()
        .iter()
        .map(|&d| {
            let rank = if full_support {
                d
            } else {
                rng.random_range(0..=d)
            };
            let g = gaussian_matrix(rng, d, rank);
            let mut m = &g * g.adjoint();
            if full_support {
                m += CMat::identity(d, d) * Complex64::new(0.05, 0.0);
            }
            m
        })
        .collect();
    let mut total: f64 = blocks.iter().map(|b| b.trace().re).sum();
    if total <= 0.0 {
        blocks[0][(0, 0)] = Complex64::new(1.0, 0.0);
        total = 1.0;
    }
    for b in &mut blocks {
        *b /= Complex64::new(total, 0.0);
    }
    AlgebraElement::from_blocks(alg.clone(), blocks).expect("blocks follow the descriptor")
}

/// Regular operator with a Gaussian bounded representative.
pub fn regular<R: Rng + ?Sized>(rng: &mut R, desc: &ModuleDescriptor) -> RegularOp {
    z_from_bounded(&operator(rng, desc, desc, 1.0))
}

/// Random rational symbol with integer coefficients, numerator and
/// denominator each of degree at most 3.
///
/// Numerator factors mix natural roots `n − r` (`r < 40`), half-integer roots
/// and zero-free factors; denominators use only factors without natural roots.
/// A quarter of the symbols get an imaginary or complex scale.
pub fn symbol<R: Rng + ?Sized>(rng: &mut R) -> RationalSymbol {
    fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    let mut num = vec![1.0];
    let mut deg = 0;
    let target = rng.random_range(0..=3);
    while deg < target {
        let factor = match rng.random_range(0..4) {
            0 => vec![-(rng.random_range(0..40) as f64), 1.0],
            1 => vec![-(2 * rng.random_range(0..20) + 1) as f64, 2.0],
            2 => vec![rng.random_range(1..10) as f64, 1.0],
            _ if deg + 2 <= target => vec![rng.random_range(1..5) as f64, 0.0, 1.0],
            _ => vec![1.0, 1.0],
        };
        deg += factor.len() - 1;
        num = mul(&num, &factor);
    }
    let mut den = vec![1.0];
    let mut deg = 0;
    let target = rng.random_range(0..=3);
    while deg < target {
        let factor = match rng.random_range(0..3) {
            0 => vec![rng.random_range(1..10) as f64, 1.0],
            1 => vec![-(2 * rng.random_range(0..20) + 1) as f64, 2.0],
            _ if deg + 2 <= target => vec![rng.random_range(1..5) as f64, 0.0, 1.0],
            _ => vec![1.0, 1.0],
        };
        deg += factor.len() - 1;
        den = mul(&den, &factor);
    }
    let scale = match rng.random_range(0..8) {
        0 => Complex64::new(0.0, 1.0),
        1 => Complex64::new(1.0, 1.0),
        2 | 3 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(rng.random_range(1..4) as f64, 0.0),
    };
    let num: Vec<Complex64> = num.iter().map(|x| scale * x).collect();
    let den: Vec<Complex64> = den.iter().map(|x| Complex64::new(*x, 0.0)).collect();
    RationalSymbol::from_coeffs(&num, &den).expect("denominator factors have no natural roots")
}
