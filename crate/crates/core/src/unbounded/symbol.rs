//! Rational sequences `f(n) = p(n) / q(n)` on `ℕ = {0, 1, 2, …}` acting by
//! multiplication on `c₀(ℕ)`.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly::{ComplexRational, Poly};
use crate::calculus::CompatibleSet;
use crate::error::{OpError, Result};

/// A rational symbol whose denominator is certified zero-free on `ℕ`.
#[derive(Clone)]
pub struct RationalSymbol {
    num: Poly,
    den: Poly,
    numerator_root: OnceLock<Option<BigInt>>,
}

impl fmt::Debug for RationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalSymbol(({}) / ({}))", self.num, self.den)
    }
}

impl fmt::Display for RationalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl PartialEq for RationalSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl RationalSymbol {
    /// Fails with `InvalidSymbol` if the denominator vanishes somewhere on `ℕ`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(OpError::InvalidSymbol(
                "denominator is the zero polynomial".into(),
            ));
        }
        if let Some(n) = den.first_natural_root() {
            return Err(OpError::InvalidSymbol(format!(
                "denominator vanishes at n = {n}"
            )));
        }
        Ok(Self::certified(num, den))
    }

    /// Coefficients in ascending powers of `n`.
    pub fn from_coeffs(num: &[Complex64], den: &[Complex64]) -> Result<Self> {
        let num = Poly::from_complex(num)
            .ok_or_else(|| OpError::InvalidSymbol("non-finite coefficient".into()))?;
        let den = Poly::from_complex(den)
            .ok_or_else(|| OpError::InvalidSymbol("non-finite coefficient".into()))?;
        Self::new(num, den)
    }

    /// Real coefficients in ascending powers of `n`.
    pub fn from_real(num: &[f64], den: &[f64]) -> Result<Self> {
        let c = |v: &[f64]| {
            v.iter()
                .map(|x| Complex64::new(*x, 0.0))
                .collect::<Vec<_>>()
        };
        Self::from_coeffs(&c(num), &c(den))
    }

    fn certified(num: Poly, den: Poly) -> Self {
        RationalSymbol {
            num,
            den,
            numerator_root: OnceLock::new(),
        }
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        Self::from_coeffs(&[c], &[Complex64::new(1.0, 0.0)])
    }

    /// `f(n) = n`.
    pub fn identity() -> Self {
        Self::certified(Poly::variable(), Poly::one())
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator(&self) -> &Poly {
        &self.den
    }

    /// `deg p − deg q`; `None` for the zero symbol.
    pub fn growth_degree(&self) -> Option<i64> {
        let p = self.num.degree()? as i64;
        Some(p - self.den.degree().expect("denominator is nonzero") as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Vanishes at infinity.
    pub fn is_c0(&self) -> bool {
        self.growth_degree().is_none_or(|d| d < 0)
    }

    pub fn is_bounded(&self) -> bool {
        self.growth_degree().is_none_or(|d| d <= 0)
    }

    pub fn eval(&self, n: f64) -> Complex64 {
        self.num.eval(n) / self.den.eval(n)
    }

    pub fn eval_exact(&self, n: u64) -> (ComplexRational, ComplexRational) {
        let n = BigInt::from(n);
        (self.num.eval_exact(&n), self.den.eval_exact(&n))
    }

    /// `lim f(n)` for bounded `f`.
    pub fn limit(&self) -> Option<Complex64> {
        match self.growth_degree() {
            None => Some(Complex64::new(0.0, 0.0)),
            Some(d) if d < 0 => Some(Complex64::new(0.0, 0.0)),
            Some(0) => {
                let (a, b) = (self.num.leading()?, self.den.leading()?);
                Some(a.to_complex() / b.to_complex())
            }
            Some(_) => None,
        }
    }

    pub fn add(&self, g: &Self) -> Self {
        if self.den == g.den {
            return Self::certified(self.num.add(&g.num), self.den.clone());
        }
        Self::certified(
            self.num.mul(&g.den).add(&g.num.mul(&self.den)),
            self.den.mul(&g.den),
        )
    }

    pub fn mul(&self, g: &Self) -> Self {
        Self::certified(self.num.mul(&g.num), self.den.mul(&g.den))
    }

    pub fn neg(&self) -> Self {
        Self::certified(self.num.neg(), self.den.clone())
    }

    pub fn sub(&self, g: &Self) -> Self {
        self.add(&g.neg())
    }

    pub fn conj(&self) -> Self {
        Self::certified(self.num.conj(), self.den.conj())
    }

    /// `f − λ`.
    pub fn shift(&self, lambda: &ComplexRational) -> Self {
        Self::certified(self.num.sub(&self.den.scale(lambda)), self.den.clone())
    }

    /// Smallest `n` with `f(n) = 0`, decided exactly.
    pub fn first_zero(&self) -> Option<BigInt> {
        self.numerator_root
            .get_or_init(|| self.num.first_natural_root())
            .clone()
    }

    /// `f(n) ≠ 0` for every `n ∈ ℕ`.
    pub fn is_invertible(&self) -> bool {
        self.first_zero().is_none()
    }

    /// `1 / f`, swapping numerator and denominator.
    pub fn inverse(&self) -> Option<Self> {
        self.is_invertible()
            .then(|| Self::certified(self.den.clone(), self.num.clone()))
    }

    /// Invertible with a bounded inverse: no zeros and growth degree `≥ 0`.
    pub fn is_adjointable_invertible(&self) -> bool {
        self.is_invertible() && self.growth_degree().is_some_and(|d| d >= 0)
    }

    /// `g ∈ D(f)`, i.e. `f g ∈ c₀`; `g` must itself lie in `c₀`.
    pub fn in_domain(&self, g: &Self) -> Result<bool> {
        if !g.is_c0() {
            return Err(OpError::NotInC0);
        }
        Ok(self.mul(g).is_c0())
    }

    /// Index beyond which both numerator and denominator are dominated by
    /// their leading terms.
    pub fn tail_start(&self) -> u64 {
        use num_traits::ToPrimitive;
        let b = self.num.dominance_bound().max(self.den.dominance_bound());
        b.to_u64().unwrap_or(u64::MAX)
    }
}

/// Binary and unary operations closed on rational symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolOp {
    Add,
    Mul,
    /// Conjugates the first operand; the second is ignored.
    Conj,
}

pub fn symbol_arith(f: &RationalSymbol, g: &RationalSymbol, op: SymbolOp) -> RationalSymbol {
    match op {
        SymbolOp::Add => f.add(g),
        SymbolOp::Mul => f.mul(g),
        SymbolOp::Conj => f.conj(),
    }
}

/// Exact tail samples past `tail_start`: the leading term dominates from
/// there on, so membership is read off the sampled values and the limit.
const TAIL_DOUBLINGS: u32 = 40;
/// Values `f(0), …, f(HEAD)` are always inspected.
const HEAD: u64 = 64;

/// `f(ℕ) ⊆ G ∪ K`, each `λ ∈ K` hit by no `f(n)`, and the limit of a bounded
/// `f` in `G ∪ K`.
///
/// Hits of `K` are decided exactly. Membership in `G` is evaluated on every
/// `n` up to the dominance bound, on geometric samples beyond it, and at
/// the limit.
pub fn compatible_symbol(g: &CompatibleSet, f: &RationalSymbol) -> Result<bool> {
    for lambda in g.excluded() {
        let exact = ComplexRational::from_complex(*lambda)
            .ok_or_else(|| OpError::InvalidArgument("non-finite excluded point".into()))?;
        if !f.shift(&exact).is_invertible() {
            return Ok(false);
        }
    }
    let head = f.tail_start().max(HEAD);
    if head > 1 << 24 {
        return Err(OpError::InvalidSymbol(format!(
            "dominance bound {head} is too large to screen"
        )));
    }
    let tail = (1..=TAIL_DOUBLINGS).map(|j| head.saturating_mul(1 << j));
    for n in (0..=head).chain(tail) {
        let v = f.eval(n as f64);
        // Near a point of K the exact screening above already decided.
        if !(v.re.is_finite() && v.im.is_finite()) || g.is_excluded(v) {
            continue;
        }
        if !membership(g, v)? {
            return Ok(false);
        }
    }
    if let Some(limit) = f.limit() {
        if !g.is_excluded(limit) && !membership(g, limit)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn membership(g: &CompatibleSet, v: Complex64) -> Result<bool> {
    g.membership(v)
        .ok_or(OpError::UndecidableMembership { point: v })
}

#[derive(Serialize, Deserialize)]
struct SymbolJson {
    num: Vec<[f64; 2]>,
    den: Vec<[f64; 2]>,
}

fn to_pairs(p: &Poly) -> Vec<[f64; 2]> {
    p.coeffs()
        .iter()
        .map(|c| {
            let z = c.to_complex();
            [z.re, z.im]
        })
        .collect()
}

impl Serialize for RationalSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolJson {
            num: to_pairs(&self.num),
            den: to_pairs(&self.den),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RationalSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SymbolJson::deserialize(d)?;
        let c = |v: &[[f64; 2]]| {
            v.iter()
                .map(|[a, b]| Complex64::new(*a, *b))
                .collect::<Vec<_>>()
        };
        RationalSymbol::from_coeffs(&c(&raw.num), &c(&raw.den)).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(num: &[f64], den: &[f64]) -> RationalSymbol {
        RationalSymbol::from_real(num, den).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn arithmetic_examples() {
        let n = RationalSymbol::identity();
        assert_eq!(
            symbol_arith(&n, &n, SymbolOp::Mul),
            sym(&[0.0, 0.0, 1.0], &[1.0])
        );
        let zero = sym(&[0.0], &[1.0]);
        let f = sym(&[1.0, 2.0], &[3.0, 1.0]);
        assert_eq!(
            symbol_arith(&f, &zero, SymbolOp::Add).eval(4.0),
            f.eval(4.0)
        );
        let g =
            RationalSymbol::from_coeffs(&[c(0.0, 0.0), c(0.0, 1.0)], &[c(1.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        let expected =
            RationalSymbol::from_coeffs(&[c(0.0, 0.0), c(0.0, -1.0)], &[c(1.0, 0.0), c(1.0, 0.0)])
                .unwrap();
        assert_eq!(symbol_arith(&g, &g, SymbolOp::Conj), expected);
    }

    #[test]
    fn growth_degree_is_additive() {
        let f = sym(&[1.0, 0.0, 1.0], &[1.0]);
        let g = sym(&[1.0], &[1.0, 1.0, 0.0, 1.0]);
        let fg = f.mul(&g);
        assert_eq!(
            fg.growth_degree(),
            Some(f.growth_degree().unwrap() + g.growth_degree().unwrap())
        );
    }

    #[test]
    fn classification_examples() {
        let inv = sym(&[1.0], &[1.0, 1.0]);
        assert!(inv.is_c0() && inv.is_bounded());
        let n = RationalSymbol::identity();
        assert!(!n.is_c0() && !n.is_bounded());
        let ratio = sym(&[1.0, 1.0], &[2.0, 1.0]);
        assert!(!ratio.is_c0() && ratio.is_bounded());
    }

    #[test]
    fn domain_examples() {
        let n = RationalSymbol::identity();
        let g = sym(&[1.0], &[1.0, 2.0, 1.0]);
        assert!(n.in_domain(&g).unwrap());
        let n2 = sym(&[0.0, 0.0, 1.0], &[1.0]);
        assert!(!n2.in_domain(&sym(&[1.0], &[1.0, 1.0])).unwrap());
        let bounded = sym(&[3.0, 1.0], &[1.0, 1.0]);
        assert!(bounded.in_domain(&g).unwrap());
        assert_eq!(bounded.in_domain(&n).unwrap_err(), OpError::NotInC0);
    }

    #[test]
    fn invertibility_examples() {
        let inv = sym(&[1.0], &[1.0, 1.0]);
        assert!(inv.is_invertible());
        assert!(!inv.is_adjointable_invertible());
        let back = inv.inverse().unwrap();
        assert!(!back.is_bounded());
        assert!(!RationalSymbol::identity().is_invertible());
        let shifted = sym(&[1.0, 1.0], &[1.0]);
        assert!(shifted.is_invertible() && shifted.is_adjointable_invertible());
        assert!(sym(&[1.0], &[1.0]).is_adjointable_invertible());
    }

    #[test]
    fn denominator_with_natural_root_is_rejected() {
        let err = RationalSymbol::from_real(&[1.0], &[-3.0, 1.0]).unwrap_err();
        assert_eq!(err.kind(), "InvalidSymbol");
        assert!(RationalSymbol::from_real(&[1.0], &[0.0]).is_err());
        assert!(RationalSymbol::from_real(&[1.0], &[-2.5, 1.0]).is_ok());
    }

    #[test]
    fn compatibility_examples() {
        let inv = sym(&[1.0], &[1.0, 1.0]);
        assert!(compatible_symbol(&CompatibleSet::positive_reals(), &inv).unwrap());
        let n = RationalSymbol::identity();
        assert!(compatible_symbol(&CompatibleSet::plane(), &n).unwrap());
        let punctured = CompatibleSet::punctured(vec![c(5.0, 0.0)]).unwrap();
        assert!(!compatible_symbol(&punctured, &n).unwrap());
        let negative = sym(&[-1.0], &[1.0, 1.0]);
        assert!(!compatible_symbol(&CompatibleSet::nonnegative_reals(), &negative).unwrap());
    }

    #[test]
    fn undecidable_membership_is_reported() {
        let g = CompatibleSet::new(
            "upper",
            |c: Complex64| (c.re < 10.0).then_some(true),
            vec![],
            "test",
        )
        .unwrap();
        let err = compatible_symbol(&g, &RationalSymbol::identity()).unwrap_err();
        assert_eq!(err.kind(), "UndecidableMembership");
    }

    #[test]
    fn json_shape() {
        let f = RationalSymbol::from_coeffs(&[c(0.0, 1.0)], &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"num":[[0.0,1.0]],"den":[[1.0,0.0],[1.0,0.0]]}"#);
        let back: RationalSymbol = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(
            serde_json::from_str::<RationalSymbol>(r#"{"num":[[1,0]],"den":[[0,0],[1,0]]}"#)
                .is_err()
        );
    }
}
