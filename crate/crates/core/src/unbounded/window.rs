//! Finite windows `n ∈ [0, N)` of rational symbols: truncated multiplication
//! operators fed through the z-transform calculus, decay measurements, and
//! truncating nets.

use num_complex::Complex64;

use super::symbol::{compatible_symbol, RationalSymbol};
use crate::calculus::{apply_function, CompatibleSet};
use crate::error::{OpError, Result};
use crate::functions::ScalarFn;
use crate::linalg::CMat;
use crate::module_space::AdjointableOp;
use crate::regular::z_from_bounded;

/// How the part of a sequence beyond the window is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailStrategy {
    /// Past the dominance bound the leading terms fix the growth, so the
    /// tail is classified by growth degree rather than sampled.
    #[default]
    LeadingTerm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    size: usize,
    tail: TailStrategy,
}

impl WindowConfig {
    pub const MIN_SIZE: usize = 8;

    pub fn new(size: usize) -> Result<Self> {
        if size < Self::MIN_SIZE {
            return Err(OpError::InvalidArgument(format!(
                "window size must be at least {}",
                Self::MIN_SIZE
            )));
        }
        Ok(WindowConfig {
            size,
            tail: TailStrategy::LeadingTerm,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tail(&self) -> TailStrategy {
        self.tail
    }
}

/// Behaviour of a sequence at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GrowthClass {
    /// Tends to zero.
    Vanishing,
    /// Bounded without tending to zero.
    Bounded,
    Unbounded,
}

impl GrowthClass {
    pub fn of_symbol(f: &RationalSymbol) -> Self {
        match f.growth_degree() {
            None => GrowthClass::Vanishing,
            Some(d) if d < 0 => GrowthClass::Vanishing,
            Some(0) => GrowthClass::Bounded,
            Some(_) => GrowthClass::Unbounded,
        }
    }

    /// From a measured log-log slope: below `−1/2` vanishing, below `1/2` bounded.
    pub fn of_slope(slope: f64) -> Self {
        if slope < -0.5 {
            GrowthClass::Vanishing
        } else if slope < 0.5 {
            GrowthClass::Bounded
        } else {
            GrowthClass::Unbounded
        }
    }
}

/// `(f(0), …, f(N−1))`.
pub fn window_values(f: &RationalSymbol, cfg: &WindowConfig) -> Vec<Complex64> {
    (0..cfg.size).map(|n| f.eval(n as f64)).collect()
}

/// `log₂` of the ratio of sup-norms over `[N/2, N)` and `[N/4, N/2)`; about
/// the growth degree for a rational sequence. `−∞` when the far window is zero.
pub fn decay_slope(values: &[Complex64]) -> f64 {
    let n = values.len();
    let sup = |r: std::ops::Range<usize>| values[r].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let near = sup(n / 4..n / 2);
    let far = sup(n / 2..n);
    if far == 0.0 {
        return f64::NEG_INFINITY;
    }
    if near == 0.0 {
        return f64::INFINITY;
    }
    (far / near).log2()
}

/// Growth class estimated from the window alone.
pub fn measured_growth(f: &RationalSymbol, cfg: &WindowConfig) -> GrowthClass {
    GrowthClass::of_slope(decay_slope(&window_values(f, cfg)))
}

/// Sup over the window together with the classified tail; the window max is
/// the true sup only when the tail is vanishing or bounded and dominated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSup {
    pub window_max: f64,
    pub tail: GrowthClass,
}

pub fn window_sup(f: &RationalSymbol, cfg: &WindowConfig) -> WindowSup {
    let window_max = window_values(f, cfg)
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max);
    WindowSup {
        window_max,
        tail: GrowthClass::of_symbol(f),
    }
}

/// Some `f(n)`, `n < N`, is exactly zero.
pub fn window_has_zero(f: &RationalSymbol, cfg: &WindowConfig) -> bool {
    (0..cfg.size).any(|n| f.numerator().eval(n as f64) == Complex64::new(0.0, 0.0))
}

/// Indicator of `[0, k)`: the `k`-th element of the truncating net.
pub fn truncation_net(k: usize, cfg: &WindowConfig) -> Vec<f64> {
    (0..cfg.size)
        .map(|n| if n < k { 1.0 } else { 0.0 })
        .collect()
}

/// `sup_n |f v (1 − e_k)|(n)` over the window for `k = 1, 2, 4, …, N`.
pub fn truncation_errors(
    f: &RationalSymbol,
    v: &RationalSymbol,
    cfg: &WindowConfig,
) -> Vec<(usize, f64)> {
    let fv = window_values(&f.mul(v), cfg);
    let mut out = Vec::new();
    let mut k = 1;
    loop {
        let k_eff = k.min(cfg.size);
        let e = truncation_net(k_eff, cfg);
        let err = fv
            .iter()
            .zip(&e)
            .map(|(x, w)| (x * (1.0 - w)).norm())
            .fold(0.0, f64::max);
        out.push((k_eff, err));
        if k_eff == cfg.size {
            return out;
        }
        k *= 2;
    }
}

/// Fixed growth rules for scalar functions composed with a symbol of growth `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TableFn {
    /// `t ↦ t^s`: growth `s·d`.
    Power(f64),
    /// `t ↦ e^{−t}`: vanishing on a real symbol tending to `+∞`.
    ExpNeg,
    /// `t ↦ t / (1 + |t|²)^{1/2}`: growth `min(d, 0)`.
    Zmap,
}

impl TableFn {
    /// Predicted class of `h ∘ f`, `None` where the table has no rule.
    pub fn composed_growth(&self, f: &RationalSymbol) -> Option<GrowthClass> {
        let d = f.growth_degree();
        match self {
            TableFn::Power(s) => Some(match d {
                None => GrowthClass::Vanishing,
                Some(d) => {
                    let g = s * d as f64;
                    if g < 0.0 {
                        GrowthClass::Vanishing
                    } else if g == 0.0 {
                        GrowthClass::Bounded
                    } else {
                        GrowthClass::Unbounded
                    }
                }
            }),
            TableFn::ExpNeg => {
                let lead =
                    f.numerator().leading()?.to_complex() / f.denominator().leading()?.to_complex();
                (d? > 0 && lead.im == 0.0 && lead.re > 0.0).then_some(GrowthClass::Vanishing)
            }
            TableFn::Zmap => Some(match d {
                None => GrowthClass::Vanishing,
                Some(d) if d < 0 => GrowthClass::Vanishing,
                Some(_) => GrowthClass::Bounded,
            }),
        }
    }

    pub fn scalar_fn(&self) -> ScalarFn {
        match *self {
            TableFn::Power(s) => ScalarFn::total(format!("pow({s})"), move |t| t.powf(s)),
            TableFn::ExpNeg => ScalarFn::total("expneg", |t| (-t).exp()),
            TableFn::Zmap => ScalarFn::zmap(),
        }
    }
}

/// A domain prediction next to its window measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainProbe {
    /// `k` in the probe `g(n) = (n + 1)^{−k}`.
    pub decay: i64,
    pub predicted: bool,
    pub measured: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub window: usize,
    /// `max_n |h(T)_{nn} − h(f(n))|` together with the largest off-diagonal entry.
    pub residual: f64,
    pub probes: Vec<DomainProbe>,
}

impl OracleReport {
    pub fn probes_agree(&self) -> bool {
        self.probes.iter().all(|p| p.predicted == p.measured)
    }
}

/// Pushes the window `diag(f(0), …, f(N−1))` through the z-transform calculus,
/// compares `h(T)` with `diag(h(f(n)))`, and checks `g ∈ D(f)` against window
/// decay for `g(n) = (n+1)^{−k}` on both sides of the critical `k`.
pub fn oracle_compare(
    f: &RationalSymbol,
    h: &ScalarFn,
    g: &CompatibleSet,
    cfg: &WindowConfig,
) -> Result<OracleReport> {
    if !compatible_symbol(g, f)? {
        return Err(OpError::NotCompatible(format!(
            "set `{}` for the symbol {f}",
            g.name()
        )));
    }
    let values = window_values(f, cfg);
    let t = AdjointableOp::from_matrix(CMat::from_diagonal(&nalgebra::DVector::from_vec(
        values.clone(),
    )))?;
    let ht = apply_function(h, &z_from_bounded(&t), g, crate::DEFAULT_TOL)?.to_bounded()?;
    let ht = &ht.blocks()[0];
    let mut residual = 0.0f64;
    for i in 0..cfg.size {
        for j in 0..cfg.size {
            let expected = if i == j {
                h.try_eval(values[i])
                    .ok_or_else(|| OpError::FunctionUndefinedAtSpectrum {
                        function: h.name().to_string(),
                        point: values[i],
                    })?
            } else {
                Complex64::new(0.0, 0.0)
            };
            residual = residual.max((ht[(i, j)] - expected).norm());
        }
    }

    let d = f.growth_degree().unwrap_or(0).max(0);
    let mut probes = Vec::new();
    for k in [d, d + 1] {
        if k <= 0 {
            continue;
        }
        let probe = inverse_power(k);
        let predicted = f.in_domain(&probe)?;
        let measured = measured_growth(&f.mul(&probe), cfg) == GrowthClass::Vanishing;
        probes.push(DomainProbe {
            decay: k,
            predicted,
            measured,
        });
    }
    Ok(OracleReport {
        window: cfg.size,
        residual,
        probes,
    })
}

/// `(n + 1)^{−k}` for `k ≥ 1`.
pub fn inverse_power(k: i64) -> RationalSymbol {
    let base = RationalSymbol::from_real(&[1.0], &[1.0, 1.0]).expect("n + 1 has no natural root");
    (1..k).fold(base.clone(), |acc, _| acc.mul(&base))
}
