//! Scalar functions handed to the functional calculus.
//!
//! A [`ScalarFn`] is a total evaluator paired with an explicit domain
//! predicate. The calculus only ever evaluates at spectral points, so
//! definedness is checked pointwise on finite sets.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

type Eval = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type Domain = Arc<dyn Fn(Complex64) -> bool + Send + Sync>;

/// Tolerance used by domain predicates that exclude a point or demand positivity.
const DOMAIN_EPS: f64 = 1e-12;

#[derive(Clone)]
pub struct ScalarFn {
    name: String,
    eval: Eval,
    domain: Domain,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("name", &self.name)
            .finish()
    }
}

impl ScalarFn {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
        domain: impl Fn(Complex64) -> bool + Send + Sync + 'static,
    ) -> Self {
        ScalarFn {
            name: name.into(),
            eval: Arc::new(eval),
            domain: Arc::new(domain),
        }
    }

    /// A function defined on the whole plane.
    pub fn total(
        name: impl Into<String>,
        eval: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, eval, |_| true)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_defined_at(&self, c: Complex64) -> bool {
        (self.domain)(c)
    }

    /// Evaluates `f(c)`, returning `None` outside the domain or on a non-finite value.
    pub fn try_eval(&self, c: Complex64) -> Option<Complex64> {
        if !(self.domain)(c) {
            return None;
        }
        let v = (self.eval)(c);
        (v.re.is_finite() && v.im.is_finite()).then_some(v)
    }

    /// Raw evaluation, ignoring the domain predicate.
    pub fn eval(&self, c: Complex64) -> Complex64 {
        (self.eval)(c)
    }

    pub fn identity() -> Self {
        Self::total("id", |c| c)
    }

    pub fn conj() -> Self {
        Self::total("conj", |c| c.conj())
    }

    pub fn square() -> Self {
        Self::total("sq", |c| c * c)
    }

    /// Principal square root.
    pub fn sqrt() -> Self {
        Self::total("sqrt", |c| c.sqrt())
    }

    pub fn exp() -> Self {
        Self::total("exp", |c| c.exp())
    }

    /// Natural logarithm restricted to the open positive half-line.
    pub fn log() -> Self {
        Self::new("log", |c| Complex64::new(c.re.ln(), 0.0), is_positive_real)
    }

    pub fn recip() -> Self {
        Self::new("recip", |c| c.inv(), |c| c.norm() > DOMAIN_EPS)
    }

    /// `c / (1 + |c|^2)^{1/2}`, the map sending an operator to its z-transform.
    pub fn zmap() -> Self {
        Self::total("zmap", zmap)
    }

    /// `t^s` on `[0, inf)` for real `s >= 0`, with `0^0 = 1`, and on `(0, inf)` for `s < 0`.
    pub fn powk(s: f64) -> Self {
        Self::new(
            format!("powk({})", s),
            move |c| {
                if s == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(c.re.max(0.0).powf(s), 0.0)
                }
            },
            // Negative powers blow up at 0.
            move |c| {
                if s >= 0.0 {
                    is_nonnegative_real(c)
                } else {
                    is_positive_real(c)
                }
            },
        )
    }

    /// `t^z = e^{z ln t}` on `(0, inf)`.
    pub fn cpow(z: Complex64) -> Self {
        Self::new(
            format!("cpow({}{:+}i)", z.re, z.im),
            move |c| (z * c.re.ln()).exp(),
            is_positive_real,
        )
    }

    pub fn constant(v: Complex64) -> Self {
        Self::total(format!("const({}{:+}i)", v.re, v.im), move |_| v)
    }

    /// `1 / (t - c)`, defined off `c`.
    pub fn shifted_recip(c: Complex64) -> Self {
        Self::new(
            format!("resolvent({}{:+}i)", c.re, c.im),
            move |t| (t - c).inv(),
            move |t| (t - c).norm() > DOMAIN_EPS,
        )
    }

    /// Pointwise product `f g`.
    pub fn mul(&self, other: &ScalarFn) -> ScalarFn {
        let (f, g) = (self.clone(), other.clone());
        let (fd, gd) = (self.clone(), other.clone());
        ScalarFn::new(
            format!("({}*{})", self.name, other.name),
            move |c| f.eval(c) * g.eval(c),
            move |c| fd.is_defined_at(c) && gd.is_defined_at(c),
        )
    }

    /// Pointwise sum `f + g`.
    pub fn add(&self, other: &ScalarFn) -> ScalarFn {
        let (f, g) = (self.clone(), other.clone());
        let (fd, gd) = (self.clone(), other.clone());
        ScalarFn::new(
            format!("({}+{})", self.name, other.name),
            move |c| f.eval(c) + g.eval(c),
            move |c| fd.is_defined_at(c) && gd.is_defined_at(c),
        )
    }

    /// Pointwise conjugate `c -> conj(f(c))`.
    pub fn conjugate(&self) -> ScalarFn {
        let (f, fd) = (self.clone(), self.clone());
        ScalarFn::new(
            format!("conj({})", self.name),
            move |c| f.eval(c).conj(),
            move |c| fd.is_defined_at(c),
        )
    }

    /// Composition `self ∘ inner`.
    pub fn after(&self, inner: &ScalarFn) -> ScalarFn {
        let (g, f) = (self.clone(), inner.clone());
        let (gd, fd) = (self.clone(), inner.clone());
        ScalarFn::new(
            format!("{}∘{}", self.name, inner.name),
            move |c| g.eval(f.eval(c)),
            move |c| fd.try_eval(c).is_some_and(|v| gd.is_defined_at(v)),
        )
    }

    /// Looks up a registry name: `id conj sq sqrt exp log recip zmap` or `powk(s)`.
    pub fn from_registry(name: &str) -> Option<ScalarFn> {
        match name {
            "id" => Some(Self::identity()),
            "conj" => Some(Self::conj()),
            "sq" => Some(Self::square()),
            "sqrt" => Some(Self::sqrt()),
            "exp" => Some(Self::exp()),
            "log" => Some(Self::log()),
            "recip" => Some(Self::recip()),
            "zmap" => Some(Self::zmap()),
            _ => {
                let arg = name.strip_prefix("powk(")?.strip_suffix(')')?;
                arg.trim().parse::<f64>().ok().map(Self::powk)
            }
        }
    }
}

/// `c / (1 + |c|^2)^{1/2}`: maps the plane onto the open unit disc.
pub fn zmap(c: Complex64) -> Complex64 {
    c / (1.0 + c.norm_sqr()).sqrt()
}

/// Inverse of [`zmap`] on the open unit disc: `c / (1 - |c|^2)^{1/2}`.
pub fn zmap_inverse(c: Complex64) -> Complex64 {
    c / (1.0 - c.norm_sqr()).sqrt()
}

pub(crate) fn is_positive_real(c: Complex64) -> bool {
    c.im.abs() <= DOMAIN_EPS * (1.0 + c.re.abs()) && c.re > DOMAIN_EPS
}

pub(crate) fn is_nonnegative_real(c: Complex64) -> bool {
    c.im.abs() <= DOMAIN_EPS * (1.0 + c.re.abs()) && c.re >= -DOMAIN_EPS
}
