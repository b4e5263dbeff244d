//! Exterior tensor products of modules and of regular operators.

use crate::algebra::AlgebraElement;
use crate::error::{OpError, Result};
use crate::linalg;
use crate::module_space::{localize, localize_op, AdjointableOp, ModuleDescriptor, ModuleVector};
use crate::regular::{z_from_bounded, RegularOp};

/// `E ⊗ F` over the blockwise Kronecker algebra.
///
/// Algebra blocks are the pairs `(k, l)` in row-major order and the
/// coordinate `(i, j)` of `A^p ⊗ B^q` sits at index `i·q + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorModule {
    pub left: ModuleDescriptor,
    pub right: ModuleDescriptor,
    pub combined: ModuleDescriptor,
}

impl TensorModule {
    /// The elementary tensor `v ⊗ w`.
    pub fn elementary(&self, v: &ModuleVector, w: &ModuleVector) -> Result<ModuleVector> {
        if v.descriptor() != &self.left || w.descriptor() != &self.right {
            return Err(OpError::DescriptorMismatch(
                "factors do not match the tensor module".into(),
            ));
        }
        Ok(v.tensor(w))
    }
}

pub fn tensor_module(e: &ModuleDescriptor, f: &ModuleDescriptor) -> TensorModule {
    TensorModule {
        left: e.clone(),
        right: f.clone(),
        combined: e.tensor(f),
    }
}

/// `S ⊗ T`, built from the bounded representatives and re-encoded by its z-transform.
pub fn tensor_op(s: &RegularOp, t: &RegularOp) -> Result<RegularOp> {
    let (sb, tb) = (s.to_bounded()?, t.to_bounded()?);
    Ok(z_from_bounded(&sb.tensor(&tb)))
}

/// Largest norm of the localizations of `x` at the product functionals
/// `ρ ⊗ θ`, a lower bound for `‖x‖` on `E ⊗ F`.
pub fn product_localization_norm(
    x: &AdjointableOp,
    module: &TensorModule,
    densities: &[(AlgebraElement, AlgebraElement)],
) -> Result<f64> {
    if x.domain() != &module.combined || x.codomain() != &module.combined {
        return Err(OpError::DescriptorMismatch(
            "operator does not act on the tensor module".into(),
        ));
    }
    let mut best = 0.0f64;
    for (rho, theta) in densities {
        let space = localize(&module.combined, &rho.kron(theta))?;
        let local = localize_op(x, &space)?;
        if local.nrows() > 0 {
            best = best.max(linalg::spectral_norm(&local));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use crate::linalg::CMat;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag(values: &[f64]) -> RegularOp {
        let m = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|v| c(*v)),
        ));
        z_from_bounded(&AdjointableOp::from_matrix(m).unwrap())
    }

    #[test]
    fn diagonal_tensor() {
        let st = tensor_op(&diag(&[1.0, 2.0]), &diag(&[3.0])).unwrap();
        let b = st.to_bounded().unwrap();
        assert_eq!(b.domain().rank(), 2);
        let m = &b.blocks()[0];
        assert!((m[(0, 0)] - c(3.0)).norm() < 1e-12);
        assert!((m[(1, 1)] - c(6.0)).norm() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn tensor_with_identity_keeps_norm() {
        let s = diag(&[-4.0, 0.5]);
        let one = diag(&[1.0, 1.0, 1.0]);
        let st = tensor_op(&s, &one).unwrap().to_bounded().unwrap();
        assert!((st.norm() - 4.0).abs() < 1e-10);
    }

    #[test]
    fn elementary_tensors_factor_inner_products() {
        let a = AlgebraDescriptor::new(vec![1, 2]).unwrap();
        let e = ModuleDescriptor::new(a.clone(), 2).unwrap();
        let f = ModuleDescriptor::new(AlgebraDescriptor::matrix(2), 1).unwrap();
        let tm = tensor_module(&e, &f);
        let v = ModuleVector::unit(&e, 1);
        let w = ModuleVector::unit(&f, 0);
        let vw = tm.elementary(&v, &w).unwrap();
        let lhs = crate::module_space::inner_product(&vw, &vw).unwrap();
        let rhs = crate::module_space::inner_product(&v, &v)
            .unwrap()
            .kron(&crate::module_space::inner_product(&w, &w).unwrap());
        assert!((&lhs - &rhs).norm() < 1e-14);
        assert!(tm.elementary(&w, &v).is_err());
    }
}
