//! Dense complex polynomials in ascending-degree order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Complex;

/// A polynomial `c[0] + c[1] z + ... + c[n] z^n`.
///
/// The highest stored coefficient is never an exact zero; the zero polynomial
/// is the empty coefficient list.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex>) -> Self {
        while matches!(coeffs.last(), Some(c) if *c == Complex::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Complex::new(1.0, 0.0))
    }

    pub fn constant(c: Complex) -> Self {
        Self::new(vec![c])
    }

    /// `c z^k`.
    pub fn monomial(c: Complex, k: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(Complex::new(1.0, 0.0), 1)
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&r| Complex::new(r, 0.0)).collect())
    }

    /// Expands `(z - r_1) ... (z - r_k)`.
    pub fn from_roots(roots: &[Complex]) -> Self {
        let mut out = Self::one();
        for &r in roots {
            out = &out * &Self::new(vec![-r, Complex::new(1.0, 0.0)]);
        }
        out
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial counted as degree 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Complex {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn coeff(&self, k: usize) -> Complex {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex) -> Complex {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut val = Complex::new(0.0, 0.0);
        let mut der = Complex::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            der = der * z + val;
            val = val * z + c;
        }
        (val, der)
    }

    /// `sum |c_k| |z|^k`, the natural scale for rounding errors of `eval(z)`.
    pub fn eval_scale(&self, z: Complex) -> f64 {
        let r = z.norm();
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + c.norm())
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Divides by the leading coefficient. The zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.leading().inv())
    }

    /// `p(a z + b)`.
    pub fn compose_affine(&self, a: Complex, b: Complex) -> Self {
        let lin = Self::new(vec![b, a]);
        let mut out = Self::zero();
        for &c in self.coeffs.iter().rev() {
            out = &(&out * &lin) + &Self::constant(c);
        }
        out
    }

    /// Synthetic division by `(z - r)`: returns quotient and remainder.
    pub fn div_linear(&self, r: Complex) -> (Self, Complex) {
        if self.coeffs.is_empty() {
            return (Self::zero(), Complex::new(0.0, 0.0));
        }
        let n = self.coeffs.len();
        let mut q = vec![Complex::new(0.0, 0.0); n - 1];
        let mut acc = Complex::new(0.0, 0.0);
        for k in (0..n).rev() {
            acc = acc * r + self.coeffs[k];
            if k > 0 {
                q[k - 1] = acc;
            }
        }
        (Self::new(q), acc)
    }

    /// Drops leading coefficients below `tol` times the largest coefficient
    /// modulus. Used after operations whose top terms cancel in exact arithmetic.
    pub fn trim_relative(&self, tol: f64) -> Self {
        let scale = self.max_coeff_norm();
        let mut coeffs = self.coeffs.clone();
        while matches!(coeffs.last(), Some(c) if c.norm() <= tol * scale) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Coefficients reversed and padded to length `len`: `z^(len-1) p(1/z)`.
    pub fn reversed(&self, len: usize) -> Self {
        let mut coeffs = vec![Complex::new(0.0, 0.0); len.max(self.coeffs.len())];
        for (k, &c) in self.coeffs.iter().enumerate() {
            coeffs[len.max(self.coeffs.len()) - 1 - k] = c;
        }
        Self::new(coeffs)
    }

    /// Index of the lowest coefficient exceeding `tol` times the largest one.
    pub fn lowest_significant(&self, tol: f64) -> Option<usize> {
        let scale = self.max_coeff_norm();
        self.coeffs.iter().position(|c| c.norm() > tol * scale)
    }

    /// Largest coefficient-wise distance, relative to the larger of the two
    /// coefficient norms.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let n = self.coeffs.len().max(other.coeffs.len());
        let scale = self
            .max_coeff_norm()
            .max(other.max_coeff_norm())
            .max(f64::MIN_POSITIVE);
        (0..n)
            .map(|k| (self.coeff(k) - other.coeff(k)).norm())
            .fold(0.0, f64::max)
            / scale
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial(")?;
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}{:+}i)z^{}", c.re, c.im, k)?;
        }
        write!(f, ")")
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Complex::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

/// Serialized as a JSON/TOML array of `[re, im]` pairs, ascending degree.
impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coeffs.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        if pairs.iter().flatten().any(|x| !x.is_finite()) {
            return Err(serde::de::Error::custom(
                "polynomial coefficients must be finite",
            ));
        }
        Ok(Polynomial::new(
            pairs
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        ))
    }
}
