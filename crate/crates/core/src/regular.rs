//! Regular operators held by their z-transform.
//!
//! A [`RegularOp`] stores only the contraction `z = T (1 + T*T)^{-1/2}`; the
//! operator `T = z (1 − z*z)^{-1/2}` is rebuilt on demand. Constructions that
//! have a closed form in terms of `z` (adjoint, `T*T`, `|T|`) never leave the
//! z-picture.

use serde::Serialize;

use crate::algebra::DEFAULT_TOL;
use crate::error::{OpError, Result};
use crate::linalg::{self, CMat};
use crate::module_space::{localize_op, AdjointableOp, LocalizedSpace, ModuleDescriptor};

/// Eigenvalues of `1 − z*z` below this floor make `(1 − z*z)^{-1/2}` singular.
pub const DEFECT_FLOOR: f64 = 1e-13;

/// Slack allowed on `‖z‖ ≤ 1`.
pub const CONTRACTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Flags {
    pub normal: bool,
    pub selfadjoint: bool,
    pub positive: bool,
    pub strictly_positive: bool,
    pub bounded: bool,
}

#[derive(Debug, Clone)]
pub struct RegularOp {
    z: AdjointableOp,
    defect: AdjointableOp,
    flags: Flags,
}

impl RegularOp {
    /// Wraps a contraction as the z-transform of a regular operator.
    pub fn from_z(z: AdjointableOp) -> Result<Self> {
        let norm = z.norm();
        if !norm.is_finite() || norm > 1.0 + CONTRACTION_SLACK {
            return Err(OpError::InvalidArgument(format!(
                "z-transform must be a contraction, got norm {norm}"
            )));
        }
        let defect = defect_squared(&z).map_blocks(linalg::psd_sqrt);
        Ok(Self::from_parts(z, defect))
    }

    /// `z` together with `(1 − z*z)^{1/2}` computed independently of `z`.
    ///
    /// Subtracting `z*z` from `1` loses the relative accuracy of small defect
    /// eigenvalues, i.e. of large spectral values of `T`; constructions that
    /// know the defect directly pass it here.
    pub(crate) fn from_parts(z: AdjointableOp, defect: AdjointableOp) -> Self {
        let mut op = RegularOp {
            z,
            defect,
            flags: Flags::default(),
        };
        op.flags = op.classify(DEFAULT_TOL);
        op
    }

    pub fn z(&self) -> &AdjointableOp {
        &self.z
    }

    /// `(1 − z*z)^{1/2}`, whose range is the domain of `T`.
    pub fn defect(&self) -> &AdjointableOp {
        &self.defect
    }

    /// Flags computed at the default tolerance when the operator was built.
    pub fn flags(&self) -> Flags {
        self.flags
    }

    pub fn domain(&self) -> &ModuleDescriptor {
        self.z.domain()
    }

    pub fn codomain(&self) -> &ModuleDescriptor {
        self.z.codomain()
    }

    pub fn is_bounded(&self) -> bool {
        self.flags.bounded
    }

    pub fn is_square(&self) -> bool {
        self.z.is_square()
    }

    /// Classification read off the z-transform.
    pub fn classify(&self, tol: f64) -> Flags {
        let z = &self.z;
        let bounded = min_defect_eigenvalue(&self.defect) >= DEFECT_FLOOR;
        if !z.is_square() {
            return Flags {
                bounded,
                ..Flags::default()
            };
        }
        let zs = z.adjoint();
        let normal = (&(z * &zs) - &(&zs * z)).norm() <= tol;
        let selfadjoint = (z - &zs).norm() <= tol;
        let positive = z.to_element().map(|a| a.is_positive(tol)).unwrap_or(false);
        let strictly_positive = positive && z.blocks().iter().all(|b| linalg::rank(b) == b.nrows());
        Flags {
            normal,
            selfadjoint,
            positive,
            strictly_positive,
            bounded,
        }
    }

    /// The bounded representative `T = z (1 − z*z)^{-1/2}`.
    pub fn to_bounded(&self) -> Result<AdjointableOp> {
        bounded_from_z(self)
    }

    /// `T*`, with `z_{T*} = (z_T)*`.
    pub fn adjoint(&self) -> RegularOp {
        let z = self.z.adjoint();
        match self.to_bounded() {
            // (1 + T T*)^{-1/2} from T itself keeps full accuracy.
            Ok(t) => RegularOp::from_parts(z, gram_defect(&t.adjoint())),
            Err(_) => RegularOp::from_z(z).expect("adjoint of a contraction is a contraction"),
        }
    }

    /// `T*T`. With `δ` an eigenvalue of the defect `(1 − z*z)^{1/2}` and
    /// `c = 1 − δ²` the matching eigenvalue of `z*z`, the z-transform of `T*T`
    /// has eigenvalue `c / (δ⁴ + c²)^{1/2}` and defect `δ² / (δ⁴ + c²)^{1/2}`.
    pub fn t_star_t(&self) -> RegularOp {
        let z = self
            .defect
            .map_blocks(|d| linalg::hermitian_map(d, |x| square_z_map(x.clamp(0.0, 1.0)).0));
        let defect = self
            .defect
            .map_blocks(|d| linalg::hermitian_map(d, |x| square_z_map(x.clamp(0.0, 1.0)).1));
        RegularOp::from_parts(z, defect)
    }

    /// `T T*`.
    pub fn t_t_star(&self) -> RegularOp {
        self.adjoint().t_star_t()
    }

    /// `|T| = (T*T)^{1/2}`, whose z-transform is `(z*z)^{1/2}`; `1 + |T|² = 1 + T*T`
    /// so the defect is unchanged.
    pub fn absolute_value(&self) -> RegularOp {
        let zz = &self.z.adjoint() * &self.z;
        RegularOp::from_parts(zz.map_blocks(linalg::psd_sqrt), self.defect.clone())
    }

    /// Invertible as a regular operator: `z` is bijective.
    pub fn is_invertible(&self, _tol: f64) -> bool {
        self.z.is_square() && self.z.blocks().iter().all(|b| linalg::rank(b) == b.nrows())
    }

    /// `T^{-1}` as a regular operator.
    pub fn invert(&self) -> Result<RegularOp> {
        if !self.is_invertible(DEFAULT_TOL) {
            return Err(OpError::NotInvertible);
        }
        let t = self.to_bounded()?;
        let blocks: Option<Vec<CMat>> =
            t.blocks().iter().map(|b| b.clone().try_inverse()).collect();
        let blocks = blocks.ok_or(OpError::NotInvertible)?;
        let inv = AdjointableOp::from_blocks(t.codomain(), t.domain(), blocks)?;
        Ok(z_from_bounded(&inv))
    }

    /// Invertible with a bounded adjointable inverse. At finite rank every
    /// regular operator is bounded, so this coincides with [`Self::is_invertible`].
    pub fn is_adjointable_invertible(&self, tol: f64) -> bool {
        self.is_invertible(tol) && self.invert().is_ok_and(|inv| inv.is_bounded())
    }

    /// `‖z_self − z_other‖`.
    pub fn z_distance(&self, other: &RegularOp) -> f64 {
        self.z.distance(&other.z)
    }
}

fn defect_squared(z: &AdjointableOp) -> AdjointableOp {
    let zz = &z.adjoint() * z;
    &AdjointableOp::identity(z.domain()) - &zz
}

/// Smallest eigenvalue of `1 − z*z`, read off the stored defect.
fn min_defect_eigenvalue(defect: &AdjointableOp) -> f64 {
    defect
        .blocks()
        .iter()
        .filter_map(|b| linalg::hermitian_eigen(b).0.first().copied())
        .map(|d| d.max(0.0).powi(2))
        .fold(f64::INFINITY, f64::min)
}

/// `(z, defect)` eigenvalues of `T*T` from the defect eigenvalue `δ` of `T`.
fn square_z_map(delta: f64) -> (f64, f64) {
    let d2 = delta * delta;
    let c = 1.0 - d2;
    let r = (d2 * d2 + c * c).sqrt();
    (c / r, d2 / r)
}

/// `(1 + t*t)^{-1/2}`.
fn inverse_root_of_gram(t: &CMat) -> CMat {
    linalg::hermitian_map(&(t.adjoint() * t), |x| 1.0 / (1.0 + x.max(0.0)).sqrt())
}

/// `(1 + T*T)^{-1/2}` on the domain of `T`.
fn gram_defect(t: &AdjointableOp) -> AdjointableOp {
    let blocks = t.blocks().iter().map(inverse_root_of_gram).collect();
    AdjointableOp::from_blocks(t.domain(), t.domain(), blocks)
        .expect("Gram blocks are square on the domain")
}

/// `z = T (1 + T*T)^{-1/2}`.
pub fn z_from_bounded(t: &AdjointableOp) -> RegularOp {
    let defect = gram_defect(t);
    let z = t.compose(&defect).expect("defect acts on the domain of T");
    RegularOp::from_parts(z, defect)
}

/// `T = z (1 − z*z)^{-1/2}`; fails when `‖z‖ = 1` within [`DEFECT_FLOOR`].
pub fn bounded_from_z(r: &RegularOp) -> Result<AdjointableOp> {
    if min_defect_eigenvalue(&r.defect) < DEFECT_FLOOR {
        return Err(OpError::UnboundedOperator);
    }
    let inv = r
        .defect
        .map_blocks(|d| linalg::hermitian_map(d, |x| 1.0 / x));
    r.z.compose(&inv)
}

/// Matrix-level `T (1 + T*T)^{-1/2}`.
pub fn z_transform_matrix(t: &CMat) -> CMat {
    t * inverse_root_of_gram(t)
}

/// Matrix-level `z (1 − z*z)^{-1/2}`.
pub fn bounded_from_z_matrix(z: &CMat) -> Result<CMat> {
    let gram = z.adjoint() * z;
    let (vals, vecs) = linalg::hermitian_eigen(&gram);
    let mut scaled = vecs.clone();
    for (j, s) in vals.iter().enumerate() {
        let defect = 1.0 - s;
        if defect < DEFECT_FLOOR {
            return Err(OpError::UnboundedOperator);
        }
        scaled.column_mut(j).scale_mut(1.0 / defect.sqrt());
    }
    Ok(z * scaled * vecs.adjoint())
}

/// `(z_T)_ω`, the z-transform of the localised operator `T_ω` on `E_ω`.
pub fn localize_regular(r: &RegularOp, space: &LocalizedSpace) -> Result<CMat> {
    localize_op(r.z(), space)
}

/// `T • x`: the closure of `T x`. At finite rank this needs a bounded `T`.
pub fn right_multiply(r: &RegularOp, x: &AdjointableOp) -> Result<AdjointableOp> {
    let t = r
        .to_bounded()
        .map_err(|_| OpError::DomainViolation("x E is not contained in the domain of T".into()))?;
    t.compose(x)
}

/// `x • T`: the closure of `x T`, defined when `x*` is a right multiplier of `T*`.
pub fn left_multiply(x: &AdjointableOp, r: &RegularOp) -> Result<AdjointableOp> {
    let t = r
        .to_bounded()
        .map_err(|_| OpError::DomainViolation("x* is not a right multiplier of T*".into()))?;
    x.compose(&t)
}

/// `S • x • T`: the adjointable extension of `S x T`.
pub fn middle_multiply(s: &RegularOp, x: &AdjointableOp, t: &RegularOp) -> Result<AdjointableOp> {
    let sb = s
        .to_bounded()
        .map_err(|_| OpError::DomainViolation("x maps Ran T outside the domain of S".into()))?;
    let tb = t
        .to_bounded()
        .map_err(|_| OpError::DomainViolation("T is not everywhere defined".into()))?;
    sb.compose(&x.compose(&tb)?)
}
