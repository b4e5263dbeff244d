//! Finite-dimensional C*-algebras as direct sums of full matrix blocks.
//!
//! An element of `M_{d_1} ⊕ … ⊕ M_{d_m}` is stored as its list of blocks.
//! The eigen-level functional calculus of normal elements lives here and is
//! reused by every operator-level construction above it, since the square
//! adjointable operators on `A^p` again form such an algebra.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OpError, Result};
use crate::functions::ScalarFn;
use crate::linalg::{self, CMat, CLUSTER_TOL};

/// Default tolerance used throughout when the caller does not pass one.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    block_dims: Vec<usize>,
}

impl AlgebraDescriptor {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() || block_dims.contains(&0) {
            return Err(OpError::InvalidArgument(
                "block dimensions must be a non-empty list of positive integers".into(),
            ));
        }
        Ok(AlgebraDescriptor { block_dims })
    }

    /// The scalars `C`.
    pub fn complex() -> Self {
        AlgebraDescriptor {
            block_dims: vec![1],
        }
    }

    /// The full matrix algebra `M_d`.
    pub fn matrix(d: usize) -> Self {
        assert!(d > 0, "matrix algebra dimension must be positive");
        AlgebraDescriptor {
            block_dims: vec![d],
        }
    }

    /// `C^m`, the commutative algebra of `m` points.
    pub fn diagonal(m: usize) -> Self {
        assert!(m > 0, "number of points must be positive");
        AlgebraDescriptor {
            block_dims: vec![1; m],
        }
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    pub fn is_commutative(&self) -> bool {
        self.block_dims.iter().all(|&d| d == 1)
    }

    /// Complex dimension `Σ d_k²`.
    pub fn dimension(&self) -> usize {
        self.block_dims.iter().map(|d| d * d).sum()
    }

    /// The algebra of `p × p` matrices over this one, `M_p(A) = ⊕ M_{p d_k}`.
    pub fn amplify(&self, p: usize) -> Self {
        AlgebraDescriptor {
            block_dims: self.block_dims.iter().map(|d| d * p).collect(),
        }
    }

    /// Spatial tensor product: blocks indexed by pairs `(k, l)` in row-major order.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = Vec::with_capacity(self.num_blocks() * other.num_blocks());
        for a in &self.block_dims {
            for b in &other.block_dims {
                dims.push(a * b);
            }
        }
        AlgebraDescriptor { block_dims: dims }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    descriptor: AlgebraDescriptor,
    blocks: Vec<CMat>,
}

impl AlgebraElement {
    pub fn from_blocks(descriptor: AlgebraDescriptor, blocks: Vec<CMat>) -> Result<Self> {
        if blocks.len() != descriptor.num_blocks() {
            return Err(OpError::DescriptorMismatch(format!(
                "expected {} blocks, got {}",
                descriptor.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (b, &d)) in blocks.iter().zip(descriptor.block_dims()).enumerate() {
            if b.nrows() != d || b.ncols() != d {
                return Err(OpError::DescriptorMismatch(format!(
                    "block {k} has shape {}x{}, expected {d}x{d}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(AlgebraElement { descriptor, blocks })
    }

    pub fn zero(descriptor: &AlgebraDescriptor) -> Self {
        let blocks = descriptor
            .block_dims()
            .iter()
            .map(|&d| linalg::zeros(d, d))
            .collect();
        AlgebraElement {
            descriptor: descriptor.clone(),
            blocks,
        }
    }

    pub fn identity(descriptor: &AlgebraDescriptor) -> Self {
        Self::scalar(descriptor, linalg::ONE)
    }

    pub fn scalar(descriptor: &AlgebraDescriptor, c: Complex64) -> Self {
        let blocks = descriptor
            .block_dims()
            .iter()
            .map(|&d| linalg::identity(d) * c)
            .collect();
        AlgebraElement {
            descriptor: descriptor.clone(),
            blocks,
        }
    }

    /// Element of `C`.
    pub fn complex(c: Complex64) -> Self {
        Self::scalar(&AlgebraDescriptor::complex(), c)
    }

    /// Element of a one-block algebra `M_d` from a square matrix.
    pub fn from_matrix(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(OpError::InvalidArgument(
                "matrix must be square and non-empty".into(),
            ));
        }
        Ok(AlgebraElement {
            descriptor: AlgebraDescriptor::matrix(m.nrows()),
            blocks: vec![m],
        })
    }

    pub fn descriptor(&self) -> &AlgebraDescriptor {
        &self.descriptor
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &CMat {
        &self.blocks[k]
    }

    pub fn into_blocks(self) -> Vec<CMat> {
        self.blocks
    }

    fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        AlgebraElement {
            descriptor: self.descriptor.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_blocks(&self, other: &Self, f: impl Fn(&CMat, &CMat) -> CMat) -> Self {
        assert_eq!(
            self.descriptor, other.descriptor,
            "algebra descriptors differ"
        );
        AlgebraElement {
            descriptor: self.descriptor.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    /// Blockwise conjugate transpose.
    pub fn star(&self) -> Self {
        self.map_blocks(|b| b.adjoint())
    }

    /// C*-norm: the largest singular value over all blocks.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::spectral_norm)
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|b| b * c)
    }

    /// `‖a a* − a* a‖`.
    pub fn normality_residual(&self) -> f64 {
        let a_star = self.star();
        (&(self * &a_star) - &(&a_star * self)).norm()
    }

    pub fn is_selfadjoint(&self, tol: f64) -> bool {
        (self - &self.star()).norm() <= tol
    }

    /// Selfadjoint within `tol` with every eigenvalue `>= -tol`.
    pub fn is_positive(&self, tol: f64) -> bool {
        if !self.is_selfadjoint(tol) {
            return false;
        }
        self.blocks.iter().all(|b| {
            let (vals, _) = linalg::hermitian_eigen(b);
            vals.first().is_none_or(|&v| v >= -tol)
        })
    }

    /// Invertible in the algebra: every block has full numerical rank.
    pub fn is_invertible(&self) -> bool {
        self.blocks.iter().all(|b| linalg::rank(b) == b.nrows())
    }

    pub fn try_inverse(&self) -> Option<Self> {
        if !self.is_invertible() {
            return None;
        }
        let blocks: Option<Vec<CMat>> = self
            .blocks
            .iter()
            .map(|b| b.clone().try_inverse())
            .collect();
        blocks.map(|blocks| AlgebraElement {
            descriptor: self.descriptor.clone(),
            blocks,
        })
    }

    /// `Σ_k tr(self_k · a_k)`: the functional with this element as density.
    pub fn pair_trace(&self, a: &AlgebraElement) -> Complex64 {
        self.blocks
            .iter()
            .zip(&a.blocks)
            .map(|(r, x)| (r * x).trace())
            .sum()
    }

    pub fn trace(&self) -> Complex64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// Blockwise Kronecker product in the tensor algebra.
    pub fn kron(&self, other: &Self) -> Self {
        let mut blocks = Vec::with_capacity(self.blocks.len() * other.blocks.len());
        for a in &self.blocks {
            for b in &other.blocks {
                blocks.push(linalg::kron(a, b));
            }
        }
        AlgebraElement {
            descriptor: self.descriptor.tensor(&other.descriptor),
            blocks,
        }
    }

    /// Unitary diagonalisation of a normal element.
    ///
    /// The Hermitian parts `(a + a*)/2` and `(a − a*)/2i` commute when `a` is
    /// normal; their joint eigenspaces are the eigenspaces of `a`. Eigenvalues
    /// within [`CLUSTER_TOL`] are merged, across blocks as well.
    pub fn normal_eigensystem(&self, tol: f64) -> Result<NormalEigensystem> {
        let residual = self.normality_residual();
        if residual > tol {
            return Err(OpError::NotNormal { residual, tol });
        }
        Ok(self.diagonalize_normal())
    }

    /// [`Self::normal_eigensystem`] without the normality check, for callers
    /// that certified normality on a different representation.
    pub(crate) fn diagonalize_normal(&self) -> NormalEigensystem {
        struct Piece {
            value: Complex64,
            weight: usize,
            block: usize,
            basis: CMat,
        }
        let mut pieces = Vec::new();
        for (k, b) in self.blocks.iter().enumerate() {
            let family = [linalg::hermitian_part(b), linalg::skew_part(b)];
            for space in linalg::joint_eigenspaces(&family, b.nrows(), CLUSTER_TOL) {
                let m = space.basis.ncols();
                let rayleigh = (space.basis.adjoint() * b * &space.basis).trace() / m as f64;
                pieces.push(Piece {
                    value: rayleigh,
                    weight: m,
                    block: k,
                    basis: space.basis,
                });
            }
        }
        pieces.sort_by(|a, b| {
            a.value
                .re
                .total_cmp(&b.value.re)
                .then(a.value.im.total_cmp(&b.value.im))
        });

        // Greedy grouping against each group's first member keeps the result
        // independent of how finely the blocks were split.
        let mut groups: Vec<(Complex64, Vec<Piece>)> = Vec::new();
        for piece in pieces {
            match groups
                .iter_mut()
                .find(|(rep, _)| (*rep - piece.value).norm() <= CLUSTER_TOL)
            {
                Some((_, members)) => members.push(piece),
                None => groups.push((piece.value, vec![piece])),
            }
        }

        let mut eigenvalues = Vec::with_capacity(groups.len());
        let mut projections = Vec::with_capacity(groups.len());
        for (_, members) in &groups {
            let total: usize = members.iter().map(|p| p.weight).sum();
            let value = members
                .iter()
                .map(|p| p.value * p.weight as f64)
                .sum::<Complex64>()
                / total as f64;
            let mut proj = AlgebraElement::zero(&self.descriptor);
            for p in members.iter() {
                proj.blocks[p.block] += &p.basis * p.basis.adjoint();
            }
            eigenvalues.push(value);
            projections.push(proj);
        }
        NormalEigensystem {
            eigenvalues,
            projections,
        }
    }

    /// `Σ f(λ_i) P_i` over the eigensystem of a normal element.
    pub fn apply_scalar_function(&self, f: &ScalarFn, tol: f64) -> Result<Self> {
        self.normal_eigensystem(tol)?.apply(f, &self.descriptor)
    }
}

/// Eigenvalues of a normal element with their spectral projections.
#[derive(Debug, Clone)]
pub struct NormalEigensystem {
    pub eigenvalues: Vec<Complex64>,
    pub projections: Vec<AlgebraElement>,
}

impl NormalEigensystem {
    /// `Σ f(λ_i) P_i`.
    pub fn apply(&self, f: &ScalarFn, descriptor: &AlgebraDescriptor) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero(descriptor);
        for (lambda, p) in self.eigenvalues.iter().zip(&self.projections) {
            let value =
                f.try_eval(*lambda)
                    .ok_or_else(|| OpError::FunctionUndefinedAtSpectrum {
                        function: f.name().to_string(),
                        point: *lambda,
                    })?;
            out = &out + &p.scale(value);
        }
        Ok(out)
    }

    /// Rank of each projection (trace over all blocks).
    pub fn multiplicities(&self) -> Vec<usize> {
        self.projections
            .iter()
            .map(|p| p.trace().re.round() as usize)
            .collect()
    }

    /// `Σ λ_i P_i`.
    pub fn reconstruct(&self, descriptor: &AlgebraDescriptor) -> AlgebraElement {
        self.apply(&ScalarFn::identity(), descriptor)
            .expect("identity is total")
    }
}

/// Approximate unit of a finite-dimensional algebra: the single element `1`.
pub fn approximate_unit(descriptor: &AlgebraDescriptor) -> Vec<AlgebraElement> {
    vec![AlgebraElement::identity(descriptor)]
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        self.zip_blocks(rhs, |a, b| a + b)
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        self.zip_blocks(rhs, |a, b| a - b)
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Self) -> AlgebraElement {
        self.zip_blocks(rhs, |a, b| a * b)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.map_blocks(|b| -b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(entries: [Complex64; 4]) -> AlgebraElement {
        AlgebraElement::from_matrix(CMat::from_row_slice(2, 2, &entries)).unwrap()
    }

    fn diag(values: &[Complex64]) -> AlgebraElement {
        AlgebraElement::from_matrix(CMat::from_diagonal(&nalgebra::DVector::from_column_slice(
            values,
        )))
        .unwrap()
    }

    #[test]
    fn descriptor_validation() {
        assert!(AlgebraDescriptor::new(vec![]).is_err());
        assert!(AlgebraDescriptor::new(vec![2, 0]).is_err());
        let d = AlgebraDescriptor::new(vec![1, 1]).unwrap();
        assert!(d.is_commutative());
        assert_eq!(AlgebraDescriptor::new(vec![2, 1]).unwrap().dimension(), 5);
        assert!(AlgebraElement::from_blocks(d, vec![linalg::zeros(2, 2)]).is_err());
    }

    #[test]
    fn star_examples() {
        let a = AlgebraElement::complex(c(0.0, 1.0));
        assert_eq!(a.star().block(0)[(0, 0)], c(0.0, -1.0));
        let id = AlgebraElement::identity(&AlgebraDescriptor::matrix(3));
        assert_eq!(id.star(), id);
        let n = m2([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(
            n.star(),
            m2([c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
        );
    }

    #[test]
    fn norm_examples() {
        assert!((diag(&[c(3.0, 0.0), c(-4.0, 0.0)]).norm() - 4.0).abs() < 1e-14);
        assert_eq!(
            AlgebraElement::zero(&AlgebraDescriptor::matrix(2)).norm(),
            0.0
        );
        // a*a = diag(0, 4), so the norm is sqrt(4) = 2.
        let a = m2([c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((a.norm() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn positivity_examples() {
        // eigenvalues of [[2,1],[1,2]] are the roots of λ² − 4λ + 3: 1 and 3
        assert!(m2([c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]).is_positive(DEFAULT_TOL));
        assert!(!m2([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).is_positive(DEFAULT_TOL));
        let minus_one = AlgebraElement::scalar(&AlgebraDescriptor::matrix(2), c(-1.0, 0.0));
        assert!(!minus_one.is_positive(DEFAULT_TOL));
    }

    #[test]
    fn eigensystem_examples() {
        let es = diag(&[c(1.0, 0.0), c(0.0, 1.0)])
            .normal_eigensystem(DEFAULT_TOL)
            .unwrap();
        assert_eq!(es.eigenvalues.len(), 2);
        assert!((es.eigenvalues[0] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((es.eigenvalues[1] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((es.projections[1].block(0)[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);

        let id = AlgebraElement::identity(&AlgebraDescriptor::new(vec![2, 1]).unwrap());
        let es = id.normal_eigensystem(DEFAULT_TOL).unwrap();
        assert_eq!(es.eigenvalues.len(), 1);
        assert!((&es.projections[0] - &id).norm() < 1e-14);

        // λ² + 1 = 0
        let rot = m2([c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let es = rot.normal_eigensystem(DEFAULT_TOL).unwrap();
        assert!((es.eigenvalues[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((es.eigenvalues[1] - c(0.0, 1.0)).norm() < 1e-14);
        assert!((&es.reconstruct(rot.descriptor()) - &rot).norm() < 1e-13);
    }

    #[test]
    fn eigensystem_rejects_abnormal() {
        let n = m2([c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            n.normal_eigensystem(DEFAULT_TOL),
            Err(OpError::NotNormal { .. })
        ));
    }

    #[test]
    fn scalar_function_examples() {
        let a = diag(&[c(0.0, 0.0), c(2f64.ln(), 0.0)]);
        let e = a
            .apply_scalar_function(&ScalarFn::exp(), DEFAULT_TOL)
            .unwrap();
        assert!((&e - &diag(&[c(1.0, 0.0), c(2.0, 0.0)])).norm() < 1e-14);

        let rot = m2([c(0.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let same = rot
            .apply_scalar_function(&ScalarFn::identity(), DEFAULT_TOL)
            .unwrap();
        assert!((&same - &rot).norm() < 1e-13);

        let z = diag(&[c(0.0, 0.0), c(3.0, 0.0)])
            .apply_scalar_function(&ScalarFn::zmap(), DEFAULT_TOL)
            .unwrap();
        assert!((&z - &diag(&[c(0.0, 0.0), c(3.0 / 10f64.sqrt(), 0.0)])).norm() < 1e-15);

        let err = diag(&[c(0.0, 0.0)]).apply_scalar_function(&ScalarFn::recip(), DEFAULT_TOL);
        assert!(matches!(
            err,
            Err(OpError::FunctionUndefinedAtSpectrum { .. })
        ));
    }

    #[test]
    fn polynomial_agreement() {
        // f(t) = t² must agree with the algebra product a·a
        let rot = m2([c(0.5, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]);
        let sq = rot
            .apply_scalar_function(&ScalarFn::square(), DEFAULT_TOL)
            .unwrap();
        assert!((&sq - &(&rot * &rot)).norm() < 1e-13);
    }

    #[test]
    fn eigenvalues_merge_across_blocks() {
        let d = AlgebraDescriptor::new(vec![1, 2]).unwrap();
        let a = AlgebraElement::from_blocks(
            d.clone(),
            vec![
                CMat::from_element(1, 1, c(2.0, 0.0)),
                CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)]),
            ],
        )
        .unwrap();
        let es = a.normal_eigensystem(DEFAULT_TOL).unwrap();
        assert_eq!(es.eigenvalues.len(), 2);
        assert_eq!(es.multiplicities(), vec![2, 1]);
    }

    #[test]
    fn approximate_unit_is_identity() {
        for d in [AlgebraDescriptor::matrix(2), AlgebraDescriptor::diagonal(2)] {
            let net = approximate_unit(&d);
            assert_eq!(net, vec![AlgebraElement::identity(&d)]);
        }
    }
}
