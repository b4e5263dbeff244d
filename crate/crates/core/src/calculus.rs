//! Spectra and the functional calculus of normal regular operators.
//!
//! `f(T)` is the regular operator whose z-transform is `zmap(f(λ))` on the
//! eigenprojection of each spectral point `λ`, with defect
//! `(1 + |f(λ)|²)^{-1/2}` there. This stays meaningful when `f` is unbounded
//! on the spectrum.
//!
//! Normality is decided on `z_T`; eigenprojections are taken from the bounded
//! representative and eigenvalues within `1e-8` of each other are merged.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{AlgebraElement, NormalEigensystem};
use crate::error::{OpError, Result};
use crate::functions::{self, ScalarFn};
use crate::linalg::CLUSTER_TOL;
use crate::module_space::AdjointableOp;
use crate::regular::{z_from_bounded, RegularOp, DEFECT_FLOOR};

/// Finite spectrum with multiplicities, sorted by `(re, im)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    points: Vec<(Complex64, usize)>,
}

impl SpectrumSet {
    /// Builds a spectrum, merging points closer than the cluster tolerance.
    pub fn from_points(points: impl IntoIterator<Item = (Complex64, usize)>) -> Self {
        let mut raw: Vec<(Complex64, usize)> = points.into_iter().collect();
        raw.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        let mut merged: Vec<(Complex64, usize)> = Vec::with_capacity(raw.len());
        for (p, m) in raw {
            match merged
                .iter_mut()
                .find(|(q, _)| (*q - p).norm() <= CLUSTER_TOL)
            {
                Some(entry) => entry.1 += m,
                None => merged.push((p, m)),
            }
        }
        SpectrumSet { points: merged }
    }

    pub fn points(&self) -> &[(Complex64, usize)] {
        &self.points
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.points.iter().map(|(p, _)| *p).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, c: Complex64, tol: f64) -> bool {
        self.points.iter().any(|(p, _)| (*p - c).norm() <= tol)
    }

    /// Hausdorff distance between the underlying point sets.
    pub fn hausdorff(&self, other: &SpectrumSet) -> f64 {
        fn one_sided(a: &SpectrumSet, b: &SpectrumSet) -> f64 {
            a.points
                .iter()
                .map(|(p, _)| {
                    b.points
                        .iter()
                        .map(|(q, _)| (*p - *q).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        }
        if self.is_empty() && other.is_empty() {
            return 0.0;
        }
        one_sided(self, other).max(one_sided(other, self))
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.points
            .iter()
            .map(|(p, _)| p.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn min_real(&self) -> f64 {
        self.points
            .iter()
            .map(|(p, _)| p.re)
            .fold(f64::INFINITY, f64::min)
    }
}

type Membership = Arc<dyn Fn(Complex64) -> Option<bool> + Send + Sync>;

/// Tolerance for the built-in membership predicates (reality, sign).
const SET_TOL: f64 = 1e-9;

/// An almost closed set `G` with its finite exceptional set `K`.
///
/// Closedness of `G ∪ K` is declared through `closure_witness`, not verified.
/// A membership predicate may answer `None` where it is undefined.
#[derive(Clone)]
pub struct CompatibleSet {
    name: String,
    membership: Membership,
    excluded: Vec<Complex64>,
    closure_witness: String,
}

impl fmt::Debug for CompatibleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompatibleSet")
            .field("name", &self.name)
            .field("excluded", &self.excluded)
            .field("closure_witness", &self.closure_witness)
            .finish()
    }
}

impl CompatibleSet {
    pub fn new(
        name: impl Into<String>,
        membership: impl Fn(Complex64) -> Option<bool> + Send + Sync + 'static,
        excluded: Vec<Complex64>,
        closure_witness: impl Into<String>,
    ) -> Result<Self> {
        for (i, a) in excluded.iter().enumerate() {
            if excluded[i + 1..]
                .iter()
                .any(|b| (*a - *b).norm() <= CLUSTER_TOL)
            {
                return Err(OpError::InvalidArgument(
                    "excluded points must be pairwise distinct".into(),
                ));
            }
        }
        Ok(CompatibleSet {
            name: name.into(),
            membership: Arc::new(membership),
            excluded,
            closure_witness: closure_witness.into(),
        })
    }

    /// `C`, compatible with every normal operator.
    pub fn plane() -> Self {
        Self::new("plane", |_| Some(true), vec![], "C is closed").expect("no excluded points")
    }

    /// `R`.
    pub fn real_line() -> Self {
        Self::new(
            "reals",
            |c: Complex64| Some(c.im.abs() <= SET_TOL * (1.0 + c.re.abs())),
            vec![],
            "R is closed",
        )
        .expect("no excluded points")
    }

    /// `[0, inf)`.
    pub fn nonnegative_reals() -> Self {
        Self::new(
            "nonneg",
            |c: Complex64| Some(c.im.abs() <= SET_TOL * (1.0 + c.re.abs()) && c.re >= -SET_TOL),
            vec![],
            "[0, inf) is closed",
        )
        .expect("no excluded points")
    }

    /// `(0, inf)` with `K = {0}`.
    pub fn positive_reals() -> Self {
        Self::new(
            "posreals",
            |c: Complex64| Some(c.im.abs() <= SET_TOL * (1.0 + c.re.abs()) && c.re > 0.0),
            vec![Complex64::new(0.0, 0.0)],
            "(0, inf) ∪ {0} = [0, inf) is closed",
        )
        .expect("single excluded point")
    }

    /// `C \ K` for a finite `K`.
    pub fn punctured(points: Vec<Complex64>) -> Result<Self> {
        let k = points.clone();
        Self::new(
            "punctured",
            move |c: Complex64| Some(k.iter().all(|p| (*p - c).norm() > CLUSTER_TOL)),
            points,
            "(C \\ K) ∪ K = C is closed",
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn excluded(&self) -> &[Complex64] {
        &self.excluded
    }

    pub fn closure_witness(&self) -> &str {
        &self.closure_witness
    }

    pub fn membership(&self, c: Complex64) -> Option<bool> {
        (self.membership)(c)
    }

    pub fn is_excluded(&self, c: Complex64) -> bool {
        self.excluded.iter().any(|k| (*k - c).norm() <= CLUSTER_TOL)
    }
}

/// Spectral points of a normal `T` (`None` for a point at infinity) with
/// their eigenprojections.
struct SpectralData {
    points: Vec<Option<Complex64>>,
    es: NormalEigensystem,
}

/// Normality is decided on `z_T`. The eigenprojections come from the bounded
/// representative when there is one: the z-map squeezes large eigenvalues
/// together, so diagonalising `z_T` would resolve their eigenvectors poorly.
fn spectral_data(r: &RegularOp, tol: f64) -> Result<SpectralData> {
    let z = r.z().to_element()?;
    let residual = z.normality_residual();
    if residual > tol {
        return Err(OpError::NotNormal { residual, tol });
    }
    match r.to_bounded() {
        Ok(t) => {
            let es = t.to_element()?.diagonalize_normal();
            let points = es.eigenvalues.iter().map(|&p| Some(p)).collect();
            Ok(SpectralData { points, es })
        }
        Err(OpError::UnboundedOperator) => {
            let es = z.diagonalize_normal();
            let points = finite_points(r, &es)?;
            Ok(SpectralData { points, es })
        }
        Err(e) => Err(e),
    }
}

/// Spectral points of `T`, failing on a point at infinity.
fn spectral_points(data: &SpectralData) -> Result<Vec<Complex64>> {
    data.points
        .iter()
        .map(|p| p.ok_or(OpError::UnboundedOperator))
        .collect()
}

/// Spectral points read off a z-eigensystem.
///
/// On the range of `P` the z-transform acts as `c` and the defect as
/// `δ = (1 − |c|²)^{1/2}`, so `λ = tr(P z) / tr(P d)`.
fn finite_points(r: &RegularOp, es: &NormalEigensystem) -> Result<Vec<Option<Complex64>>> {
    let z = r.z().to_element()?;
    let d = r.defect().to_element()?;
    Ok(es
        .projections
        .iter()
        .map(|p| {
            let c = (p * &z).trace();
            let delta = (p * &d).trace().re;
            let rank = p.trace().re;
            (delta > 0.0 && (delta / rank).powi(2) >= DEFECT_FLOOR).then(|| c / delta)
        })
        .collect())
}

/// `σ(T) = { c / (1 − |c|²)^{1/2} : c ∈ σ(z_T), |c| < 1 }`.
pub fn spectrum(r: &RegularOp, tol: f64) -> Result<SpectrumSet> {
    let data = spectral_data(r, tol)?;
    let mult = data.es.multiplicities();
    let points = data
        .points
        .into_iter()
        .zip(mult)
        .filter_map(|(p, m)| p.map(|p| (p, m)));
    Ok(SpectrumSet::from_points(points))
}

/// Eigenvalues of a bounded normal operator, computed from the operator itself.
pub fn spectrum_of_bounded(t: &AdjointableOp, tol: f64) -> Result<SpectrumSet> {
    let es = t.to_element()?.normal_eigensystem(tol)?;
    let mult = es.multiplicities();
    Ok(SpectrumSet::from_points(
        es.eigenvalues.iter().copied().zip(mult),
    ))
}

fn compatible_with_points(g: &CompatibleSet, points: &[Complex64]) -> bool {
    let k_ok = g
        .excluded
        .iter()
        .all(|k| points.iter().all(|p| (*p - *k).norm() > CLUSTER_TOL));
    let g_ok = points
        .iter()
        .filter(|p| !g.is_excluded(**p))
        .all(|p| g.membership(*p) == Some(true));
    k_ok && g_ok
}

/// `T − λ` invertible for every `λ ∈ K` and `σ(T) \ K ⊆ G`.
pub fn check_compatible(g: &CompatibleSet, r: &RegularOp, tol: f64) -> Result<bool> {
    let points = spectral_points(&spectral_data(r, tol)?)?;
    Ok(compatible_with_points(g, &points))
}

/// `f(T)` for a normal regular `T` and a set `G` compatible with it.
pub fn apply_function(
    f: &ScalarFn,
    r: &RegularOp,
    g: &CompatibleSet,
    tol: f64,
) -> Result<RegularOp> {
    let data = spectral_data(r, tol)?;
    let points = spectral_points(&data)?;
    let es = &data.es;
    if !compatible_with_points(g, &points) {
        return Err(OpError::NotCompatible(format!(
            "set `{}` for the spectrum {:?}",
            g.name, points
        )));
    }
    let z_desc = r.z().to_element()?.descriptor().clone();
    let mut z = AlgebraElement::zero(&z_desc);
    let mut defect = AlgebraElement::zero(&z_desc);
    for (lambda, p) in points.iter().zip(&es.projections) {
        let value = f
            .try_eval(*lambda)
            .ok_or_else(|| OpError::FunctionUndefinedAtSpectrum {
                function: f.name().to_string(),
                point: *lambda,
            })?;
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(OpError::FunctionUndefinedAtSpectrum {
                function: f.name().to_string(),
                point: *lambda,
            });
        }
        z = &z + &p.scale(functions::zmap(value));
        defect = &defect + &p.scale(Complex64::new(1.0 / (1.0 + value.norm_sqr()).sqrt(), 0.0));
    }
    Ok(RegularOp::from_parts(
        AdjointableOp::from_element(r.domain(), &z)?,
        AdjointableOp::from_element(r.domain(), &defect)?,
    ))
}

/// `(σ(f(T)), f(σ(T)))` for comparison.
pub fn spectral_mapping_check(
    f: &ScalarFn,
    r: &RegularOp,
    g: &CompatibleSet,
    tol: f64,
) -> Result<(SpectrumSet, SpectrumSet)> {
    let image_op = apply_function(f, r, g, tol)?;
    let lhs = spectrum(&image_op, tol)?;
    let sigma = spectrum(r, tol)?;
    let rhs = SpectrumSet::from_points(sigma.points().iter().map(|(p, m)| (f.eval(*p), *m)));
    Ok((lhs, rhs))
}

/// `(g(f(T)), (g∘f)(T))` for comparison; `H` must be compatible with `f(T)`.
pub fn compose_check(
    g: &ScalarFn,
    f: &ScalarFn,
    r: &RegularOp,
    g_set: &CompatibleSet,
    h_set: &CompatibleSet,
    tol: f64,
) -> Result<(RegularOp, RegularOp)> {
    let inner = apply_function(f, r, g_set, tol)?;
    if !check_compatible(h_set, &inner, tol)? {
        return Err(OpError::NotCompatible(format!(
            "set `{}` for f(T)",
            h_set.name
        )));
    }
    let nested = apply_function(g, &inner, h_set, tol)?;
    let composed = apply_function(&g.after(f), r, g_set, tol)?;
    Ok((nested, composed))
}

fn classify_at(r: &RegularOp, tol: f64) -> crate::regular::Flags {
    r.classify(tol)
}

/// `T^s` for positive `T` and real `s ≥ 0`.
pub fn power_real(r: &RegularOp, s: f64, tol: f64) -> Result<RegularOp> {
    if !(s >= 0.0) {
        return Err(OpError::InvalidArgument(format!(
            "real power must be non-negative, got {s}"
        )));
    }
    if !classify_at(r, tol).positive {
        return Err(OpError::NotPositive);
    }
    apply_function(
        &ScalarFn::powk(s),
        r,
        &CompatibleSet::nonnegative_reals(),
        tol,
    )
}

/// `T^z = e^{z ln T}` for strictly positive `T`.
pub fn power_complex(r: &RegularOp, exponent: Complex64, tol: f64) -> Result<RegularOp> {
    if !classify_at(r, tol).strictly_positive {
        return Err(OpError::NotStrictlyPositive);
    }
    apply_function(
        &ScalarFn::cpow(exponent),
        r,
        &CompatibleSet::positive_reals(),
        tol,
    )
}

/// `e^T` for normal `T`.
pub fn exp_op(r: &RegularOp, tol: f64) -> Result<RegularOp> {
    apply_function(&ScalarFn::exp(), r, &CompatibleSet::plane(), tol)
}

/// `ln T` for strictly positive `T` (principal branch).
pub fn ln_op(r: &RegularOp, tol: f64) -> Result<RegularOp> {
    if !classify_at(r, tol).strictly_positive {
        return Err(OpError::NotStrictlyPositive);
    }
    apply_function(&ScalarFn::log(), r, &CompatibleSet::positive_reals(), tol)
}

/// `(T − c)^{-1}` for normal `T` and `c` off the spectrum.
pub fn resolvent(r: &RegularOp, c: Complex64, tol: f64) -> Result<AdjointableOp> {
    let sigma = spectrum(r, tol)?;
    if sigma.contains(c, tol.max(CLUSTER_TOL)) {
        return Err(OpError::SpectrumHit { point: c });
    }
    let g = CompatibleSet::punctured(vec![c])?;
    apply_function(&ScalarFn::shifted_recip(c), r, &g, tol)?.to_bounded()
}

/// `T • f(T*T)`, computed as the product `T · f(T*T)`; equals `f(T T*) • T`.
pub fn balanced_product(
    r: &RegularOp,
    f: &ScalarFn,
    g: &CompatibleSet,
    tol: f64,
) -> Result<RegularOp> {
    let tt = r.t_star_t();
    let tt_adj = r.t_t_star();
    if !check_compatible(g, &tt, tol)? || !check_compatible(g, &tt_adj, tol)? {
        return Err(OpError::NotCompatible(format!(
            "set `{}` for T*T and TT*",
            g.name
        )));
    }
    let t = r.to_bounded()?;
    let ft = apply_function(f, &tt, g, tol)?.to_bounded()?;
    Ok(z_from_bounded(&t.compose(&ft)?))
}
