//! Rational maps `num / den` on the Riemann sphere.

use serde::{Deserialize, Serialize};

use super::roots::{poly_roots, Root, TAU_CLUSTER};
use super::sphere::ExtComplex;
use super::{AlgebraError, Complex, Polynomial};

/// Default root-matching tolerance.
pub const TAU_ROOT: f64 = 1e-10;
/// Default pole tolerance (relative to the rounding scale of `den(z)`).
pub const TAU_POLE: f64 = 1e-10;

/// Relative threshold for coefficients that cancel in exact arithmetic.
const CANCEL_TOL: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalMap {
    pub num: Polynomial,
    pub den: Polynomial,
    /// `num` and `den` share no root within the reduction tolerance.
    pub reduced: bool,
}

/// Cancels common roots of `num` and `den`.
///
/// Roots are matched cluster against cluster; a `k`-fold cluster is matched
/// at the radius it can actually be resolved to.
pub fn rational_reduce(
    num: &Polynomial,
    den: &Polynomial,
    tol: f64,
) -> Result<RationalMap, AlgebraError> {
    if den.is_zero() {
        return Err(AlgebraError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(RationalMap {
            num: Polynomial::zero(),
            den: Polynomial::one(),
            reduced: true,
        });
    }
    if num.deg() == 0 || den.deg() == 0 {
        return Ok(RationalMap {
            num: num.clone(),
            den: den.clone(),
            reduced: true,
        });
    }
    let num_roots = poly_roots(num, TAU_CLUSTER)?;
    let den_roots = poly_roots(den, TAU_CLUSTER)?;
    let scale = num_roots
        .iter()
        .chain(den_roots.iter())
        .map(|r| r.value.norm())
        .fold(1.0, f64::max);

    let mut used_num: Vec<usize> = num_roots.iter().map(|_| 0).collect();
    let mut common: Vec<Complex> = Vec::new();
    for dr in &den_roots {
        let candidate = num_roots
            .iter()
            .enumerate()
            .filter(|(i, nr)| used_num[*i] < nr.multiplicity)
            .map(|(i, nr)| (i, nr, (nr.value - dr.value).norm()))
            .min_by(|a, b| a.2.total_cmp(&b.2));
        if let Some((i, nr, dist)) = candidate {
            if dist <= match_radius(dr, nr, tol) * scale {
                let k = (nr.multiplicity - used_num[i]).min(dr.multiplicity);
                used_num[i] += k;
                let r = (nr.value + dr.value) / 2.0;
                common.extend(std::iter::repeat_n(r, k));
            }
        }
    }

    let mut n = num.clone();
    let mut d = den.clone();
    for r in common {
        n = n.div_linear(r).0;
        d = d.div_linear(r).0;
    }
    Ok(RationalMap {
        num: n,
        den: d,
        reduced: true,
    })
}

fn match_radius(a: &Root, b: &Root, tol: f64) -> f64 {
    let k = a.multiplicity.max(b.multiplicity);
    if k <= 1 {
        tol
    } else {
        tol.max(4.0 * (1e-15_f64).powf(1.0 / k as f64))
    }
}

impl RationalMap {
    /// Wraps without reducing.
    pub fn unreduced(num: Polynomial, den: Polynomial) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(Self {
            num,
            den,
            reduced: false,
        })
    }

    /// A polynomial viewed as a rational map.
    pub fn polynomial(p: Polynomial) -> Self {
        Self {
            num: p,
            den: Polynomial::one(),
            reduced: true,
        }
    }

    pub fn degree(&self) -> usize {
        self.num.deg().max(self.den.deg())
    }

    /// Raw quotient with no pole handling. Poles yield non-finite values.
    #[inline]
    pub fn apply(&self, z: Complex) -> Complex {
        if z.norm() > 1e20 {
            return self.apply_far(z);
        }
        self.num.eval(z) / self.den.eval(z)
    }

    fn apply_far(&self, z: Complex) -> Complex {
        let a = self.num.deg();
        let b = self.den.deg();
        let u = z.inv();
        let top = self.num.reversed(a + 1).eval(u);
        let bottom = self.den.reversed(b + 1).eval(u);
        let ratio = top / bottom;
        if a >= b {
            ratio * z.powu((a - b) as u32)
        } else {
            ratio * u.powu((b - a) as u32)
        }
    }

    pub fn eval(&self, z: ExtComplex) -> Result<ExtComplex, AlgebraError> {
        self.eval_with(z, TAU_POLE)
    }

    /// Evaluates on the sphere. Returns infinity exactly when `den(z)` vanishes
    /// within `tau_pole` of its rounding scale.
    pub fn eval_with(&self, z: ExtComplex, tau_pole: f64) -> Result<ExtComplex, AlgebraError> {
        let z = match z {
            ExtComplex::Infinity(_) => return Ok(self.value_at_infinity()),
            ExtComplex::Finite(z) => z,
        };
        if z.norm() > 1e20 {
            return Ok(ExtComplex::from_complex(self.apply_far(z)));
        }
        let d = self.den.eval(z);
        let n = self.num.eval(z);
        let den_small = d.norm() <= tau_pole * self.den.eval_scale(z);
        if den_small {
            if n.norm() <= tau_pole * self.num.eval_scale(z) {
                return Err(AlgebraError::Indeterminate);
            }
            return Ok(ExtComplex::INFINITY);
        }
        Ok(ExtComplex::from_complex(n / d))
    }

    pub fn value_at_infinity(&self) -> ExtComplex {
        let a = self.num.degree();
        let b = self.den.deg();
        match a {
            None => ExtComplex::Finite(Complex::new(0.0, 0.0)),
            Some(a) if a > b => ExtComplex::INFINITY,
            Some(a) if a < b => ExtComplex::Finite(Complex::new(0.0, 0.0)),
            Some(_) => ExtComplex::Finite(self.num.leading() / self.den.leading()),
        }
    }

    /// Numerator of the derivative: `num' den - num den'`.
    pub fn wronskian(&self) -> Polynomial {
        let w = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        w.trim_relative(CANCEL_TOL)
    }

    /// Derivative at a finite point.
    pub fn derivative(&self, z: Complex) -> Complex {
        let (n, dn) = self.num.eval_with_derivative(z);
        let (d, dd) = self.den.eval_with_derivative(z);
        (dn * d - n * dd) / (d * d)
    }

    /// The map in the chart `w = 1/z` on both sides: `w ↦ 1/f(1/w)`.
    pub fn chart_swap(&self) -> RationalMap {
        let len = self.degree() + 1;
        RationalMap {
            num: self.den.reversed(len),
            den: self.num.reversed(len),
            reduced: self.reduced,
        }
    }

    /// Local degree at infinity.
    pub fn local_degree_at_infinity(&self) -> usize {
        let a = self.num.deg();
        let b = self.den.deg();
        if a != b {
            return a.abs_diff(b);
        }
        let len = a + 1;
        let limit = self.num.leading() / self.den.leading();
        let diff = &self.num.reversed(len) - &self.den.reversed(len).scale(limit);
        diff.lowest_significant(1e-12).unwrap_or(1).max(1)
    }

    /// Coefficients scaled so that the leading denominator coefficient is 1.
    pub fn normalized(&self) -> (Polynomial, Polynomial) {
        let s = self.den.leading().inv();
        (self.num.scale(s), self.den.scale(s))
    }

    /// Relative coefficient distance between two maps after normalization.
    /// Infinite if the degrees differ.
    pub fn coefficient_distance(&self, other: &RationalMap) -> f64 {
        let (n1, d1) = self.normalized();
        let (n2, d2) = other.normalized();
        if n1.deg() != n2.deg() || d1.deg() != d2.deg() {
            return f64::INFINITY;
        }
        let scale = n1
            .max_coeff_norm()
            .max(d1.max_coeff_norm())
            .max(n2.max_coeff_norm())
            .max(d2.max_coeff_norm());
        let dn = (0..=n1.deg())
            .map(|k| (n1.coeff(k) - n2.coeff(k)).norm())
            .fold(0.0, f64::max);
        let dd = (0..=d1.deg())
            .map(|k| (d1.coeff(k) - d2.coeff(k)).norm())
            .fold(0.0, f64::max);
        dn.max(dd) / scale
    }
}
