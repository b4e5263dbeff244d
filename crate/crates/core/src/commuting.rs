//! Strongly commuting normal operators: joint calculus, closed products and
//! sums, and the Fuglede–Putnam intertwining check.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::calculus::{self, CompatibleSet};
use crate::error::{OpError, Result};
use crate::functions::{self, ScalarFn};
use crate::linalg::{self, CLUSTER_TOL};
use crate::module_space::AdjointableOp;
use crate::regular::RegularOp;

type JointEval = Arc<dyn Fn(Complex64, Complex64) -> Option<Complex64> + Send + Sync>;

/// A scalar function of two complex variables, `None` where undefined.
#[derive(Clone)]
pub struct JointFn {
    name: String,
    eval: JointEval,
}

impl fmt::Debug for JointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JointFn").field("name", &self.name).finish()
    }
}

impl JointFn {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Complex64, Complex64) -> Option<Complex64> + Send + Sync + 'static,
    ) -> Self {
        JointFn {
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn try_eval(&self, s: Complex64, t: Complex64) -> Option<Complex64> {
        (self.eval)(s, t).filter(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// `h(s, t) = s t`.
    pub fn product() -> Self {
        Self::new("mul", |s, t| Some(s * t))
    }

    /// `h(s, t) = s + t`.
    pub fn sum() -> Self {
        Self::new("add", |s, t| Some(s + t))
    }

    /// `h(s, t) = s`.
    pub fn first() -> Self {
        Self::new("fst", |s, _| Some(s))
    }

    /// `h(s, t) = t`.
    pub fn second() -> Self {
        Self::new("snd", |_, t| Some(t))
    }

    /// `(f ⊗ g)(s, t) = f(s) g(t)`.
    pub fn tensor(f: &ScalarFn, g: &ScalarFn) -> Self {
        let (f, g) = (f.clone(), g.clone());
        Self::new(format!("{}⊗{}", f.name(), g.name()), move |s, t| {
            Some(f.try_eval(s)? * g.try_eval(t)?)
        })
    }

    /// Looks up `add mul fst snd`.
    pub fn from_registry(name: &str) -> Option<Self> {
        match name {
            "add" => Some(Self::sum()),
            "mul" => Some(Self::product()),
            "fst" => Some(Self::first()),
            "snd" => Some(Self::second()),
            _ => None,
        }
    }
}

/// Two normal regular operators on the same module.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    s: RegularOp,
    t: RegularOp,
    certified: bool,
}

impl CommutingPair {
    /// An uncertified pair; [`CommutingPair::certify`] must pass before use.
    pub fn new(s: RegularOp, t: RegularOp) -> Result<Self> {
        if s.domain() != t.domain() || !s.is_square() || !t.is_square() {
            return Err(OpError::DescriptorMismatch(
                "a commuting pair acts on a single module".into(),
            ));
        }
        Ok(CommutingPair {
            s,
            t,
            certified: false,
        })
    }

    /// Builds the pair and certifies it in one step.
    pub fn certified(s: RegularOp, t: RegularOp, tol: f64) -> Result<Self> {
        Self::new(s, t)?.certify(tol)
    }

    /// Marks the pair certified when the z-transforms commute within `tol`.
    pub fn certify(mut self, tol: f64) -> Result<Self> {
        let residual = commutator_norm(&self.s, &self.t);
        if !commutes(&self.s, &self.t, tol)? {
            return Err(OpError::NotCommuting { residual });
        }
        self.certified = true;
        Ok(self)
    }

    pub fn s(&self) -> &RegularOp {
        &self.s
    }

    pub fn t(&self) -> &RegularOp {
        &self.t
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    fn require_certified(&self) -> Result<()> {
        if self.certified {
            Ok(())
        } else {
            Err(OpError::NotCommuting {
                residual: commutator_norm(&self.s, &self.t),
            })
        }
    }
}

fn commutator_norm(s: &RegularOp, t: &RegularOp) -> f64 {
    let (zs, zt) = (s.z(), t.z());
    match (zs.compose(zt), zt.compose(zs)) {
        (Ok(a), Ok(b)) => a.distance(&b),
        _ => f64::INFINITY,
    }
}

/// `‖z_S z_T − z_T z_S‖ ≤ tol` for normal `S`, `T`.
pub fn commutes(s: &RegularOp, t: &RegularOp, tol: f64) -> Result<bool> {
    for r in [s, t] {
        let residual = r.z().to_element()?.normality_residual();
        if residual > tol {
            return Err(OpError::NotNormal { residual, tol });
        }
    }
    if s.domain() != t.domain() {
        return Err(OpError::DescriptorMismatch(
            "operators act on different modules".into(),
        ));
    }
    Ok(commutator_norm(s, t) <= tol)
}

/// A joint spectral point `(λ, μ)` of a commuting pair with its projection.
#[derive(Debug, Clone)]
pub struct JointPoint {
    pub s: Complex64,
    pub t: Complex64,
    pub projection: AlgebraElement,
}

/// Simultaneous diagonalisation of `S` and `T`.
///
/// The bounded representatives are diagonalised, not the z-transforms: the
/// z-map squeezes large eigenvalues together and would blur their
/// eigenvectors. Commutation itself was certified on the z-transforms.
pub fn joint_spectrum(pair: &CommutingPair) -> Result<Vec<JointPoint>> {
    pair.require_certified()?;
    let s = pair.s.to_bounded()?.to_element()?;
    let t = pair.t.to_bounded()?.to_element()?;
    let desc = s.descriptor().clone();
    let mut points: Vec<JointPoint> = Vec::new();
    for (k, (bs, bt)) in s.blocks().iter().zip(t.blocks()).enumerate() {
        let family = [
            linalg::hermitian_part(bs),
            linalg::skew_part(bs),
            linalg::hermitian_part(bt),
            linalg::skew_part(bt),
        ];
        for space in linalg::joint_eigenspaces(&family, bs.nrows(), CLUSTER_TOL) {
            let q = &space.basis;
            let m = q.ncols() as f64;
            let lambda = (q.adjoint() * bs * q).trace() / m;
            let mu = (q.adjoint() * bt * q).trace() / m;
            let proj = q * q.adjoint();
            let existing = points
                .iter_mut()
                .find(|p| (p.s - lambda).norm() <= CLUSTER_TOL && (p.t - mu).norm() <= CLUSTER_TOL);
            match existing {
                Some(p) => {
                    let mut blocks = p.projection.blocks().to_vec();
                    blocks[k] += proj;
                    p.projection = AlgebraElement::from_blocks(desc.clone(), blocks)?;
                }
                None => {
                    let mut blocks: Vec<_> = desc
                        .block_dims()
                        .iter()
                        .map(|&d| linalg::zeros(d, d))
                        .collect();
                    blocks[k] = proj;
                    points.push(JointPoint {
                        s: lambda,
                        t: mu,
                        projection: AlgebraElement::from_blocks(desc.clone(), blocks)?,
                    });
                }
            }
        }
    }
    Ok(points)
}

/// `h(S, T)` for a certified pair, with `F` compatible with `S` and `G` with `T`.
pub fn joint_calculus(
    h: &JointFn,
    pair: &CommutingPair,
    f_set: &CompatibleSet,
    g_set: &CompatibleSet,
    tol: f64,
) -> Result<RegularOp> {
    pair.require_certified()?;
    if !calculus::check_compatible(f_set, &pair.s, tol)? {
        return Err(OpError::NotCompatible(format!(
            "set `{}` for S",
            f_set.name()
        )));
    }
    if !calculus::check_compatible(g_set, &pair.t, tol)? {
        return Err(OpError::NotCompatible(format!(
            "set `{}` for T",
            g_set.name()
        )));
    }
    let points = joint_spectrum(pair)?;
    let desc = pair.s.z().to_element()?.descriptor().clone();
    let mut z = AlgebraElement::zero(&desc);
    let mut defect = AlgebraElement::zero(&desc);
    for p in &points {
        let value = h
            .try_eval(p.s, p.t)
            .ok_or_else(|| OpError::FunctionUndefinedAtSpectrum {
                function: h.name().to_string(),
                point: p.s,
            })?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(OpError::FunctionUndefinedAtSpectrum {
                function: h.name().to_string(),
                point: p.s,
            });
        }
        z = &z + &p.projection.scale(functions::zmap(value));
        defect = &defect
            + &p.projection
                .scale(Complex64::new(1.0 / (1.0 + value.norm_sqr()).sqrt(), 0.0));
    }
    Ok(RegularOp::from_parts(
        AdjointableOp::from_element(pair.s.domain(), &z)?,
        AdjointableOp::from_element(pair.s.domain(), &defect)?,
    ))
}

/// `S • T`, the closure of `S T`.
pub fn dot_product(pair: &CommutingPair, tol: f64) -> Result<RegularOp> {
    let plane = CompatibleSet::plane();
    joint_calculus(&JointFn::product(), pair, &plane, &plane, tol)
}

/// `S ∔ T`, the closure of `S + T`.
pub fn dot_sum(pair: &CommutingPair, tol: f64) -> Result<RegularOp> {
    let plane = CompatibleSet::plane();
    joint_calculus(&JointFn::sum(), pair, &plane, &plane, tol)
}

/// Residuals of one Fuglede–Putnam check.
#[derive(Debug, Clone)]
pub struct IntertwiningReport {
    /// `‖U S − T U‖`, the certified hypothesis.
    pub hypothesis: f64,
    /// `‖U S* − T* U‖`.
    pub adjoint_residual: f64,
    /// `‖U f(S) − f(T) U‖` for each function, by name.
    pub function_residuals: Vec<(String, f64)>,
}

impl IntertwiningReport {
    pub fn max_residual(&self) -> f64 {
        self.function_residuals
            .iter()
            .map(|(_, r)| *r)
            .fold(self.adjoint_residual, f64::max)
    }

    /// Every residual within `bound`.
    pub fn passed(&self, bound: f64) -> bool {
        self.max_residual() <= bound
    }
}

/// Given `‖U S − T U‖ ≤ tol` for bounded normal `S` on `E` and `T` on `F` and
/// `U: E → F`, measures how well `U` intertwines `S*, T*` and `f(S), f(T)`.
pub fn fuglede_putnam_check(
    u: &AdjointableOp,
    s: &RegularOp,
    t: &RegularOp,
    fs: &[ScalarFn],
    tol: f64,
) -> Result<IntertwiningReport> {
    if u.domain() != s.domain() || u.codomain() != t.domain() {
        return Err(OpError::DescriptorMismatch(
            "U must map the module of S to the module of T".into(),
        ));
    }
    let (sb, tb) = (s.to_bounded()?, t.to_bounded()?);
    let hypothesis = (u * &sb).distance(&(&tb * u));
    if hypothesis > tol {
        return Err(OpError::IntertwiningViolated {
            residual: hypothesis,
            tol,
        });
    }
    let adjoint_residual = (u * &sb.adjoint()).distance(&(&tb.adjoint() * u));
    let plane = CompatibleSet::plane();
    let mut function_residuals = Vec::with_capacity(fs.len());
    for f in fs {
        let fsb =
            calculus::apply_function(f, s, &plane, tol.max(crate::DEFAULT_TOL))?.to_bounded()?;
        let ftb =
            calculus::apply_function(f, t, &plane, tol.max(crate::DEFAULT_TOL))?.to_bounded()?;
        function_residuals.push((f.name().to_string(), (u * &fsb).distance(&(&ftb * u))));
    }
    Ok(IntertwiningReport {
        hypothesis,
        adjoint_residual,
        function_residuals,
    })
}
