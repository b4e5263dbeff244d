//! Free Hilbert C*-modules `E = A^p`, adjointable operators between them,
//! rank-one operators, and localisation to Hilbert spaces.
//!
//! Block layout: for each algebra block `k` of size `d_k`, a vector of `A^p`
//! is stored as the `(p·d_k) × d_k` matrix stacking its `p` coordinates, and
//! an operator `A^p → A^q` as the `(q·d_k) × (p·d_k)` matrix of its entries'
//! `k`-th blocks. With this layout `apply` is a plain matrix product per block
//! and `⟨v, w⟩ = w* v` blockwise.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraDescriptor, AlgebraElement, DEFAULT_TOL};
use crate::error::{OpError, Result};
use crate::linalg::{self, CMat};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModuleDescriptor {
    algebra: AlgebraDescriptor,
    rank: usize,
}

impl ModuleDescriptor {
    pub fn new(algebra: AlgebraDescriptor, rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(OpError::InvalidArgument(
                "module rank must be at least 1".into(),
            ));
        }
        Ok(ModuleDescriptor { algebra, rank })
    }

    /// `C^n` as a Hilbert space.
    pub fn hilbert(n: usize) -> Result<Self> {
        Self::new(AlgebraDescriptor::complex(), n)
    }

    pub fn algebra(&self) -> &AlgebraDescriptor {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Complex dimension `Σ_k p d_k²`.
    pub fn complex_dimension(&self) -> usize {
        self.rank * self.algebra.dimension()
    }

    /// Exterior tensor product `A^p ⊗ B^q = (A ⊗ B)^{pq}`.
    pub fn tensor(&self, other: &Self) -> Self {
        ModuleDescriptor {
            algebra: self.algebra.tensor(&other.algebra),
            rank: self.rank * other.rank,
        }
    }

    fn block_rows(&self, k: usize) -> usize {
        self.rank * self.algebra.block_dims()[k]
    }
}

fn check_same(a: &ModuleDescriptor, b: &ModuleDescriptor) -> Result<()> {
    if a != b {
        return Err(OpError::DescriptorMismatch(format!(
            "module over {:?} of rank {} vs module over {:?} of rank {}",
            a.algebra.block_dims(),
            a.rank,
            b.algebra.block_dims(),
            b.rank
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleVector {
    descriptor: ModuleDescriptor,
    blocks: Vec<CMat>,
}

impl ModuleVector {
    pub fn from_coords(descriptor: &ModuleDescriptor, coords: &[AlgebraElement]) -> Result<Self> {
        if coords.len() != descriptor.rank {
            return Err(OpError::DescriptorMismatch(format!(
                "expected {} coordinates, got {}",
                descriptor.rank,
                coords.len()
            )));
        }
        if let Some(bad) = coords
            .iter()
            .find(|c| c.descriptor() != descriptor.algebra())
        {
            return Err(OpError::DescriptorMismatch(format!(
                "coordinate lives in {:?}",
                bad.descriptor().block_dims()
            )));
        }
        let blocks = descriptor
            .algebra
            .block_dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let mut m = linalg::zeros(descriptor.rank * d, d);
                for (i, c) in coords.iter().enumerate() {
                    m.view_mut((i * d, 0), (d, d)).copy_from(c.block(k));
                }
                m
            })
            .collect();
        Ok(ModuleVector {
            descriptor: descriptor.clone(),
            blocks,
        })
    }

    pub fn zero(descriptor: &ModuleDescriptor) -> Self {
        let blocks = descriptor
            .algebra
            .block_dims()
            .iter()
            .map(|&d| linalg::zeros(descriptor.rank * d, d))
            .collect();
        ModuleVector {
            descriptor: descriptor.clone(),
            blocks,
        }
    }

    /// The `i`-th standard basis vector: `1` in coordinate `i`.
    pub fn unit(descriptor: &ModuleDescriptor, i: usize) -> Self {
        let mut v = Self::zero(descriptor);
        for (k, &d) in descriptor.algebra.block_dims().iter().enumerate() {
            v.blocks[k]
                .view_mut((i * d, 0), (d, d))
                .fill_with_identity();
        }
        v
    }

    /// Basis of `E` as a complex vector space, one vector per block entry.
    /// Ordering matches [`ModuleVector::to_complex_coords`].
    pub fn complex_basis(descriptor: &ModuleDescriptor) -> Vec<ModuleVector> {
        let mut out = Vec::with_capacity(descriptor.complex_dimension());
        for (k, &d) in descriptor.algebra.block_dims().iter().enumerate() {
            let rows = descriptor.block_rows(k);
            for col in 0..d {
                for row in 0..rows {
                    let mut v = Self::zero(descriptor);
                    v.blocks[k][(row, col)] = linalg::ONE;
                    out.push(v);
                }
            }
        }
        out
    }

    /// Column-major vectorisation of every block, concatenated.
    pub fn to_complex_coords(&self) -> nalgebra::DVector<Complex64> {
        let data: Vec<Complex64> = self.blocks.iter().flat_map(|b| b.iter().copied()).collect();
        nalgebra::DVector::from_vec(data)
    }

    pub fn descriptor(&self) -> &ModuleDescriptor {
        &self.descriptor
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn coord(&self, i: usize) -> AlgebraElement {
        let blocks = self
            .descriptor
            .algebra
            .block_dims()
            .iter()
            .zip(&self.blocks)
            .map(|(&d, b)| b.view((i * d, 0), (d, d)).into_owned())
            .collect();
        AlgebraElement::from_blocks(self.descriptor.algebra.clone(), blocks)
            .expect("coordinate shape follows the descriptor")
    }

    /// Right module action `v · a`.
    pub fn right_mul(&self, a: &AlgebraElement) -> Self {
        assert_eq!(
            a.descriptor(),
            self.descriptor.algebra(),
            "algebra mismatch"
        );
        ModuleVector {
            descriptor: self.descriptor.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(a.blocks())
                .map(|(v, x)| v * x)
                .collect(),
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ModuleVector {
            descriptor: self.descriptor.clone(),
            blocks: self.blocks.iter().map(|b| b * c).collect(),
        }
    }

    /// `‖⟨v, v⟩‖^{1/2}`.
    pub fn norm(&self) -> f64 {
        inner_product(self, self)
            .map(|g| g.norm().sqrt())
            .unwrap_or(0.0)
    }

    /// Elementary tensor `v ⊗ w` in `E ⊗ F`, coordinates ordered `(i, j) -> i·q + j`.
    pub fn tensor(&self, other: &Self) -> Self {
        let desc = self.descriptor.tensor(&other.descriptor);
        let mut coords = Vec::with_capacity(desc.rank);
        for i in 0..self.descriptor.rank {
            let vi = self.coord(i);
            for j in 0..other.descriptor.rank {
                coords.push(vi.kron(&other.coord(j)));
            }
        }
        ModuleVector::from_coords(&desc, &coords).expect("tensor coordinates follow the descriptor")
    }
}

impl Add for &ModuleVector {
    type Output = ModuleVector;
    fn add(self, rhs: Self) -> ModuleVector {
        assert_eq!(self.descriptor, rhs.descriptor, "module mismatch");
        ModuleVector {
            descriptor: self.descriptor.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ModuleVector {
    type Output = ModuleVector;
    fn sub(self, rhs: Self) -> ModuleVector {
        self + &rhs.scale(Complex64::new(-1.0, 0.0))
    }
}

/// `⟨v, w⟩ = Σ_i w_i* v_i`: linear in `v`, conjugate-linear in `w`.
pub fn inner_product(v: &ModuleVector, w: &ModuleVector) -> Result<AlgebraElement> {
    check_same(&v.descriptor, &w.descriptor)?;
    let blocks = v
        .blocks
        .iter()
        .zip(&w.blocks)
        .map(|(a, b)| b.adjoint() * a)
        .collect();
    AlgebraElement::from_blocks(v.descriptor.algebra.clone(), blocks)
}

/// An `A`-linear adjointable map `A^p → A^q`, i.e. a `q × p` matrix over `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointableOp {
    domain: ModuleDescriptor,
    codomain: ModuleDescriptor,
    blocks: Vec<CMat>,
}

impl AdjointableOp {
    pub fn from_entries(
        domain: &ModuleDescriptor,
        codomain: &ModuleDescriptor,
        entries: &[Vec<AlgebraElement>],
    ) -> Result<Self> {
        if domain.algebra != codomain.algebra {
            return Err(OpError::DescriptorMismatch(
                "domain and codomain algebras differ".into(),
            ));
        }
        if entries.len() != codomain.rank || entries.iter().any(|row| row.len() != domain.rank) {
            return Err(OpError::DescriptorMismatch(format!(
                "expected a {}x{} entry matrix",
                codomain.rank, domain.rank
            )));
        }
        if entries
            .iter()
            .flatten()
            .any(|e| e.descriptor() != domain.algebra())
        {
            return Err(OpError::DescriptorMismatch(
                "entry lives in a different algebra".into(),
            ));
        }
        let blocks = domain
            .algebra
            .block_dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                let mut m = linalg::zeros(codomain.rank * d, domain.rank * d);
                for (i, row) in entries.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        m.view_mut((i * d, j * d), (d, d)).copy_from(e.block(k));
                    }
                }
                m
            })
            .collect();
        Ok(AdjointableOp {
            domain: domain.clone(),
            codomain: codomain.clone(),
            blocks,
        })
    }

    /// Operator from its per-block matrices; shapes are validated.
    pub fn from_blocks(
        domain: &ModuleDescriptor,
        codomain: &ModuleDescriptor,
        blocks: Vec<CMat>,
    ) -> Result<Self> {
        if domain.algebra != codomain.algebra {
            return Err(OpError::DescriptorMismatch(
                "domain and codomain algebras differ".into(),
            ));
        }
        if blocks.len() != domain.algebra.num_blocks() {
            return Err(OpError::DescriptorMismatch("wrong number of blocks".into()));
        }
        for (k, b) in blocks.iter().enumerate() {
            if b.nrows() != codomain.block_rows(k) || b.ncols() != domain.block_rows(k) {
                return Err(OpError::DescriptorMismatch(format!(
                    "block {k} has the wrong shape"
                )));
            }
        }
        Ok(AdjointableOp {
            domain: domain.clone(),
            codomain: codomain.clone(),
            blocks,
        })
    }

    /// An operator on the Hilbert space `C^n` from a complex square matrix.
    pub fn from_matrix(m: CMat) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(OpError::InvalidArgument("matrix must be non-empty".into()));
        }
        let cod = ModuleDescriptor::hilbert(m.nrows())?;
        let dom = ModuleDescriptor::hilbert(m.ncols())?;
        Ok(AdjointableOp {
            domain: dom,
            codomain: cod,
            blocks: vec![m],
        })
    }

    pub fn identity(desc: &ModuleDescriptor) -> Self {
        let blocks = (0..desc.algebra.num_blocks())
            .map(|k| linalg::identity(desc.block_rows(k)))
            .collect();
        AdjointableOp {
            domain: desc.clone(),
            codomain: desc.clone(),
            blocks,
        }
    }

    pub fn zero(domain: &ModuleDescriptor, codomain: &ModuleDescriptor) -> Self {
        let blocks = (0..domain.algebra.num_blocks())
            .map(|k| linalg::zeros(codomain.block_rows(k), domain.block_rows(k)))
            .collect();
        AdjointableOp {
            domain: domain.clone(),
            codomain: codomain.clone(),
            blocks,
        }
    }

    pub fn scalar(desc: &ModuleDescriptor, c: Complex64) -> Self {
        Self::identity(desc).scale(c)
    }

    pub fn domain(&self) -> &ModuleDescriptor {
        &self.domain
    }

    pub fn codomain(&self) -> &ModuleDescriptor {
        &self.codomain
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn is_square(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn entry(&self, i: usize, j: usize) -> AlgebraElement {
        let blocks = self
            .domain
            .algebra
            .block_dims()
            .iter()
            .zip(&self.blocks)
            .map(|(&d, b)| b.view((i * d, j * d), (d, d)).into_owned())
            .collect();
        AlgebraElement::from_blocks(self.domain.algebra.clone(), blocks)
            .expect("entry shape follows the descriptor")
    }

    pub fn apply(&self, v: &ModuleVector) -> Result<ModuleVector> {
        check_same(&self.domain, &v.descriptor)?;
        Ok(ModuleVector {
            descriptor: self.codomain.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&v.blocks)
                .map(|(x, b)| x * b)
                .collect(),
        })
    }

    /// Entrywise star-transpose.
    pub fn adjoint(&self) -> Self {
        AdjointableOp {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// Operator norm: the C*-norm of `L(E, F)`.
    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .map(linalg::spectral_norm)
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_blocks(|b| b * c)
    }

    pub(crate) fn map_blocks(&self, f: impl Fn(&CMat) -> CMat) -> Self {
        AdjointableOp {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    /// Composition `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        check_same(&self.domain, &rhs.codomain)?;
        Ok(AdjointableOp {
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        check_same(&self.domain, &rhs.domain)?;
        check_same(&self.codomain, &rhs.codomain)?;
        Ok(AdjointableOp {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&rhs.blocks)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// `‖self − rhs‖`, or infinity when the shapes differ.
    pub fn distance(&self, rhs: &Self) -> f64 {
        if self.domain != rhs.domain || self.codomain != rhs.codomain {
            return f64::INFINITY;
        }
        self.blocks
            .iter()
            .zip(&rhs.blocks)
            .map(|(a, b)| linalg::spectral_norm(&(a - b)))
            .fold(0.0, f64::max)
    }

    /// `L(E) = M_p(A)` viewed as a block algebra with blocks of size `p·d_k`.
    pub fn to_element(&self) -> Result<AlgebraElement> {
        if !self.is_square() {
            return Err(OpError::DescriptorMismatch(
                "operator is not an endomorphism".into(),
            ));
        }
        AlgebraElement::from_blocks(
            self.domain.algebra.amplify(self.domain.rank),
            self.blocks.clone(),
        )
    }

    /// Inverse of [`AdjointableOp::to_element`].
    pub fn from_element(desc: &ModuleDescriptor, a: &AlgebraElement) -> Result<Self> {
        if a.descriptor() != &desc.algebra.amplify(desc.rank) {
            return Err(OpError::DescriptorMismatch(
                "element does not act on this module".into(),
            ));
        }
        Ok(AdjointableOp {
            domain: desc.clone(),
            codomain: desc.clone(),
            blocks: a.blocks().to_vec(),
        })
    }

    /// Exterior tensor product `S ⊗ T`, entries `(S ⊗ T)_{(i,j),(i',j')} = S_{ii'} ⊗ T_{jj'}`.
    pub fn tensor(&self, other: &Self) -> Self {
        let dom = self.domain.tensor(&other.domain);
        let cod = self.codomain.tensor(&other.codomain);
        let mut entries = Vec::with_capacity(cod.rank);
        for i in 0..self.codomain.rank {
            for j in 0..other.codomain.rank {
                let mut row = Vec::with_capacity(dom.rank);
                for i2 in 0..self.domain.rank {
                    let s = self.entry(i, i2);
                    for j2 in 0..other.domain.rank {
                        row.push(s.kron(&other.entry(j, j2)));
                    }
                }
                entries.push(row);
            }
        }
        AdjointableOp::from_entries(&dom, &cod, &entries)
            .expect("tensor entries follow the descriptors")
    }
}

impl Add for &AdjointableOp {
    type Output = AdjointableOp;
    fn add(self, rhs: Self) -> AdjointableOp {
        self.try_add(rhs).expect("operator shapes differ")
    }
}

impl Sub for &AdjointableOp {
    type Output = AdjointableOp;
    fn sub(self, rhs: Self) -> AdjointableOp {
        self.try_add(&-rhs).expect("operator shapes differ")
    }
}

impl Mul for &AdjointableOp {
    type Output = AdjointableOp;
    fn mul(self, rhs: Self) -> AdjointableOp {
        self.compose(rhs).expect("operator shapes differ")
    }
}

impl Neg for &AdjointableOp {
    type Output = AdjointableOp;
    fn neg(self) -> AdjointableOp {
        self.map_blocks(|b| -b)
    }
}

/// Rank-one operator `u ↦ v ⟨u, w⟩`.
pub fn theta(v: &ModuleVector, w: &ModuleVector) -> Result<AdjointableOp> {
    if v.descriptor.algebra != w.descriptor.algebra {
        return Err(OpError::DescriptorMismatch(
            "vectors live over different algebras".into(),
        ));
    }
    let blocks = v
        .blocks
        .iter()
        .zip(&w.blocks)
        .map(|(a, b)| a * b.adjoint())
        .collect();
    Ok(AdjointableOp {
        domain: w.descriptor.clone(),
        codomain: v.descriptor.clone(),
        blocks,
    })
}

/// Relative cutoff below which Gram eigenvalues count as null directions.
pub const GRAM_NULL_RTOL: f64 = 1e-12;

/// The Hilbert space `E_ω` obtained from `E` and the positive functional
/// `ω(a) = Σ_k tr(ρ_k a_k)`, together with the quotient map `v ↦ v̄`.
#[derive(Debug, Clone)]
pub struct LocalizedSpace {
    module: ModuleDescriptor,
    density: AlgebraElement,
    dimension: usize,
    /// `r × n` map from complex coordinates of `E` to `E_ω`.
    gram_root: CMat,
    /// `n × r` right inverse of `gram_root`.
    gram_root_pinv: CMat,
}

impl LocalizedSpace {
    pub fn module(&self) -> &ModuleDescriptor {
        &self.module
    }

    pub fn density(&self) -> &AlgebraElement {
        &self.density
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn gram_root(&self) -> &CMat {
        &self.gram_root
    }

    /// `ω(a)`.
    pub fn omega(&self, a: &AlgebraElement) -> Complex64 {
        self.density.pair_trace(a)
    }

    /// `v ↦ v̄`.
    pub fn project(&self, v: &ModuleVector) -> Result<nalgebra::DVector<Complex64>> {
        check_same(&self.module, &v.descriptor)?;
        Ok(&self.gram_root * v.to_complex_coords())
    }
}

/// Builds `E_ω` from the Gram form `g(v, w) = ω(⟨v, w⟩)` on complex coordinates.
pub fn localize(desc: &ModuleDescriptor, density: &AlgebraElement) -> Result<LocalizedSpace> {
    if density.descriptor() != desc.algebra() {
        return Err(OpError::DescriptorMismatch(
            "density lives in a different algebra".into(),
        ));
    }
    if !density.is_positive(DEFAULT_TOL) {
        return Err(OpError::NotPositiveFunctional);
    }
    let basis = ModuleVector::complex_basis(desc);
    let n = basis.len();
    // gram[(a, b)] = g(e_b, e_a), so that g(x, y) = y* · gram · x.
    let mut gram = linalg::zeros(n, n);
    for (a, ea) in basis.iter().enumerate() {
        for (b, eb) in basis.iter().enumerate() {
            let ip = inner_product(eb, ea)?;
            gram[(a, b)] = density.pair_trace(&ip);
        }
    }
    let (vals, vecs) = linalg::hermitian_eigen(&gram);
    let vmax = vals.iter().fold(0.0_f64, |m, v| m.max(*v));
    let keep: Vec<usize> = if vmax > 0.0 {
        (0..n)
            .filter(|&i| vals[i] > GRAM_NULL_RTOL * vmax)
            .collect()
    } else {
        Vec::new()
    };
    let r = keep.len();
    let mut gram_root = linalg::zeros(r, n);
    let mut gram_root_pinv = linalg::zeros(n, r);
    for (row, &i) in keep.iter().enumerate() {
        let s = vals[i].sqrt();
        let col = vecs.column(i);
        for j in 0..n {
            gram_root[(row, j)] = col[j].conj() * s;
            gram_root_pinv[(j, row)] = col[j] / s;
        }
    }
    Ok(LocalizedSpace {
        module: desc.clone(),
        density: density.clone(),
        dimension: r,
        gram_root,
        gram_root_pinv,
    })
}

/// Matrix of `x` acting on the complex coordinates of its domain.
fn coordinate_matrix(x: &AdjointableOp) -> CMat {
    let basis = ModuleVector::complex_basis(&x.domain);
    let rows = x.codomain.complex_dimension();
    let mut m = linalg::zeros(rows, basis.len());
    for (j, e) in basis.iter().enumerate() {
        let image = x.apply(e).expect("basis vector lives in the domain");
        m.set_column(j, &image.to_complex_coords());
    }
    m
}

/// `x_ω` on `E_ω → F_ω`, determined by `x_ω v̄ = (x v)‾`.
pub fn localize_op_between(
    x: &AdjointableOp,
    from: &LocalizedSpace,
    to: &LocalizedSpace,
) -> Result<CMat> {
    check_same(&x.domain, &from.module)?;
    check_same(&x.codomain, &to.module)?;
    if from.density != to.density {
        return Err(OpError::DescriptorMismatch(
            "spaces were localised at different functionals".into(),
        ));
    }
    Ok(&to.gram_root * coordinate_matrix(x) * &from.gram_root_pinv)
}

/// `x_ω` for an endomorphism of `E`.
pub fn localize_op(x: &AdjointableOp, space: &LocalizedSpace) -> Result<CMat> {
    localize_op_between(x, space, space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_vec(values: &[Complex64]) -> ModuleVector {
        let desc = ModuleDescriptor::hilbert(values.len()).unwrap();
        let coords: Vec<_> = values.iter().map(|&v| AlgebraElement::complex(v)).collect();
        ModuleVector::from_coords(&desc, &coords).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let ip = inner_product(&scalar_vec(&[c(2.0, 0.0)]), &scalar_vec(&[c(0.0, 3.0)])).unwrap();
        assert_eq!(ip.block(0)[(0, 0)], c(0.0, -6.0));

        let desc = ModuleDescriptor::new(AlgebraDescriptor::new(vec![2, 1]).unwrap(), 3).unwrap();
        let e = ModuleVector::unit(&desc, 1);
        assert_eq!(
            inner_product(&e, &e).unwrap(),
            AlgebraElement::identity(desc.algebra())
        );

        let m2 = AlgebraDescriptor::matrix(2);
        let desc = ModuleDescriptor::new(m2.clone(), 1).unwrap();
        let e11 = AlgebraElement::from_blocks(
            m2,
            vec![CMat::from_row_slice(
                2,
                2,
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            )],
        )
        .unwrap();
        let v = ModuleVector::from_coords(&desc, std::slice::from_ref(&e11)).unwrap();
        assert_eq!(inner_product(&v, &v).unwrap(), e11);
    }

    #[test]
    fn inner_product_rejects_mismatch() {
        let err = inner_product(
            &scalar_vec(&[c(1.0, 0.0)]),
            &scalar_vec(&[c(1.0, 0.0), c(0.0, 0.0)]),
        );
        assert!(matches!(err, Err(OpError::DescriptorMismatch(_))));
    }

    #[test]
    fn apply_examples() {
        let v = scalar_vec(&[c(1.0, 0.0), c(2.0, -1.0)]);
        let id = AdjointableOp::identity(v.descriptor());
        assert_eq!(id.apply(&v).unwrap(), v);
        let zero = AdjointableOp::zero(v.descriptor(), v.descriptor());
        assert_eq!(zero.apply(&v).unwrap(), ModuleVector::zero(v.descriptor()));
        let swap = AdjointableOp::from_matrix(CMat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        assert_eq!(
            swap.apply(&v).unwrap(),
            scalar_vec(&[c(2.0, -1.0), c(1.0, 0.0)])
        );
    }

    #[test]
    fn adjoint_examples() {
        let d = AdjointableOp::from_matrix(CMat::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        ))
        .unwrap();
        assert_eq!(d.adjoint(), d);
        let single = AdjointableOp::from_matrix(CMat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap();
        assert_eq!(single.adjoint().blocks()[0][(1, 0)], c(0.0, -1.0));
        assert_eq!(single.adjoint().blocks()[0][(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn theta_examples() {
        let one = scalar_vec(&[c(1.0, 0.0)]);
        assert_eq!(
            theta(&one, &one).unwrap(),
            AdjointableOp::identity(one.descriptor())
        );
        let zero = ModuleVector::zero(one.descriptor());
        assert_eq!(theta(&one, &zero).unwrap().norm(), 0.0);
        let desc = ModuleDescriptor::hilbert(2).unwrap();
        let t = theta(&ModuleVector::unit(&desc, 0), &ModuleVector::unit(&desc, 1)).unwrap();
        let e12 = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(t.blocks()[0], e12);
    }

    #[test]
    fn localize_examples() {
        let desc = ModuleDescriptor::hilbert(1).unwrap();
        let space = localize(&desc, &AlgebraElement::complex(c(1.0, 0.0))).unwrap();
        assert_eq!(space.dimension(), 1);
        let id = localize_op(&AdjointableOp::identity(&desc), &space).unwrap();
        assert!((id[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let space = localize(&desc, &AlgebraElement::complex(c(0.0, 0.0))).unwrap();
        assert_eq!(space.dimension(), 0);

        // ω = tr(diag(1,0) ·) on M₂: the Gram form of the four matrix units has rank 2.
        let m2 = AlgebraDescriptor::matrix(2);
        let desc = ModuleDescriptor::new(m2.clone(), 1).unwrap();
        let rho = AlgebraElement::from_blocks(
            m2,
            vec![CMat::from_row_slice(
                2,
                2,
                &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            )],
        )
        .unwrap();
        assert_eq!(localize(&desc, &rho).unwrap().dimension(), 2);
    }

    #[test]
    fn localize_rejects_non_positive_density() {
        let desc = ModuleDescriptor::hilbert(1).unwrap();
        let err = localize(&desc, &AlgebraElement::complex(c(-1.0, 0.0)));
        assert!(matches!(err, Err(OpError::NotPositiveFunctional)));
    }

    #[test]
    fn scalar_localisation_is_the_matrix_itself() {
        let t = AdjointableOp::from_matrix(CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 2.0), c(0.5, 0.0), c(-1.0, 0.0), c(3.0, -1.0)],
        ))
        .unwrap();
        let space = localize(t.domain(), &AlgebraElement::complex(c(1.0, 0.0))).unwrap();
        let local = localize_op(&t, &space).unwrap();
        // E_ω is C² with an orthonormal change of basis; the spectrum and norm survive
        assert!((linalg::spectral_norm(&local) - t.norm()).abs() < 1e-12);
        assert!((local.trace() - t.blocks()[0].trace()).norm() < 1e-12);
    }

    #[test]
    fn element_roundtrip() {
        let desc = ModuleDescriptor::new(AlgebraDescriptor::new(vec![1, 2]).unwrap(), 2).unwrap();
        let x = AdjointableOp::identity(&desc).scale(c(0.0, 2.0));
        let a = x.to_element().unwrap();
        assert_eq!(a.descriptor().block_dims(), &[2, 4]);
        assert_eq!(AdjointableOp::from_element(&desc, &a).unwrap(), x);
    }
}
