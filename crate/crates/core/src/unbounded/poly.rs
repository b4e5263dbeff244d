//! Exact polynomials in one integer variable with complex rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `re + i·im` with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ComplexRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl ComplexRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        ComplexRational { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(n: i64) -> Self {
        ComplexRational {
            re: BigRational::from_integer(n.into()),
            im: BigRational::zero(),
        }
    }

    /// Exact conversion of both parts; `None` for non-finite input.
    pub fn from_complex(c: Complex64) -> Option<Self> {
        Some(ComplexRational {
            re: BigRational::from_float(c.re)?,
            im: BigRational::from_float(c.im)?,
        })
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn neg(&self) -> Self {
        ComplexRational {
            re: -&self.re,
            im: -&self.im,
        }
    }

    pub fn conj(&self) -> Self {
        ComplexRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// `|re| + |im|`, an upper bound for the modulus.
    fn modulus_upper(&self) -> BigRational {
        self.re.abs() + self.im.abs()
    }

    /// `max(|re|, |im|)`, a lower bound for the modulus.
    fn modulus_lower(&self) -> BigRational {
        let (a, b) = (self.re.abs(), self.im.abs());
        if a > b {
            a
        } else {
            b
        }
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(
                f,
                "({}{}{}i)",
                self.re,
                if self.im.is_negative() { "-" } else { "+" },
                self.im.abs()
            )
        }
    }
}

/// Polynomial `Σ c_i n^i`, coefficients in ascending order without trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<ComplexRational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<ComplexRational>) -> Self {
        while coeffs.last().is_some_and(ComplexRational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: ComplexRational) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(ComplexRational::one())
    }

    /// The variable `n`.
    pub fn variable() -> Self {
        Self::new(vec![ComplexRational::zero(), ComplexRational::one()])
    }

    /// Exact conversion of floating-point coefficients; `None` if any is non-finite.
    pub fn from_complex(coeffs: &[Complex64]) -> Option<Self> {
        let exact: Option<Vec<_>> = coeffs
            .iter()
            .map(|c| ComplexRational::from_complex(*c))
            .collect();
        exact.map(Self::new)
    }

    pub fn coeffs(&self) -> &[ComplexRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&ComplexRational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = ComplexRational::zero();
        Self::new(
            (0..n)
                .map(|i| {
                    self.coeffs
                        .get(i)
                        .unwrap_or(&zero)
                        .add(o.coeffs.get(i).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(ComplexRational::neg).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ComplexRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    /// Coefficientwise conjugate; equals the pointwise conjugate on real `n`.
    pub fn conj(&self) -> Self {
        Poly {
            coeffs: self.coeffs.iter().map(ComplexRational::conj).collect(),
        }
    }

    /// Exact value at an integer.
    pub fn eval_exact(&self, n: &BigInt) -> ComplexRational {
        let x = ComplexRational {
            re: BigRational::from_integer(n.clone()),
            im: BigRational::zero(),
        };
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexRational::zero(), |acc, c| acc.mul(&x).add(c))
    }

    /// Floating-point value by Horner's rule.
    pub fn eval(&self, n: f64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * n + c.to_complex())
    }

    /// `n₀ = 1 + Σ_{i<d} |c_i| / |c_d|`, using `|re| + |im|` above and
    /// `max(|re|, |im|)` below so the bound stays exact. For `n ≥ n₀` the
    /// leading monomial strictly dominates the rest.
    pub fn dominance_bound(&self) -> BigInt {
        let Some(lead) = self.leading() else {
            return BigInt::zero();
        };
        let rest: BigRational = self.coeffs[..self.coeffs.len() - 1]
            .iter()
            .map(ComplexRational::modulus_upper)
            .fold(BigRational::zero(), |a, b| a + b);
        (BigRational::one() + rest / lead.modulus_lower())
            .ceil()
            .to_integer()
    }

    /// Smallest `n ∈ {0, 1, 2, …}` with `p(n) = 0`, decided exactly.
    ///
    /// A natural root of `p` is an integer root of the real (or imaginary)
    /// part, cleared of denominators; it divides the lowest nonzero integer
    /// coefficient and lies below that part's dominance bound.
    pub fn first_natural_root(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.coeffs[0].is_zero() {
            return Some(BigInt::zero());
        }
        let re: Vec<BigRational> = self.coeffs.iter().map(|c| c.re.clone()).collect();
        let im: Vec<BigRational> = self.coeffs.iter().map(|c| c.im.clone()).collect();
        let part = if re.iter().any(|c| !c.is_zero()) {
            re
        } else {
            im
        };
        let ints = clear_denominators(&part);
        let d = ints.iter().rposition(|a| !a.is_zero())?;
        let k = ints.iter().position(|a| !a.is_zero())?;
        if k == d {
            // A monomial vanishes only at 0, which was excluded above.
            return None;
        }
        let trailing = ints[k].abs();
        let rest: BigInt = ints[..d].iter().map(|a| a.abs()).sum();
        let bound = BigInt::one() + rest.div_ceil(&ints[d].abs());
        let limit = bound.min(trailing.clone());
        let mut n = BigInt::one();
        while n <= limit {
            if (&trailing % &n).is_zero() && self.eval_exact(&n).is_zero() {
                return Some(n);
            }
            n += 1;
        }
        None
    }
}

fn clear_denominators(coeffs: &[BigRational]) -> Vec<BigInt> {
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    coeffs
        .iter()
        .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
        .collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}·n"),
                _ => format!("{c}·n^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}
