//! Points of the Riemann sphere and the chordal metric.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Complex;

/// A point of the extended plane: finite or the point at infinity.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtComplex {
    Finite(#[serde(with = "super::complex_pair")] Complex),
    Infinity(InfinityTag),
}

/// Serializes as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinityTag {
    #[serde(rename = "inf")]
    Inf,
}

impl ExtComplex {
    pub const INFINITY: ExtComplex = ExtComplex::Infinity(InfinityTag::Inf);

    /// Wraps a value, mapping non-finite components to the point at infinity.
    pub fn from_complex(z: Complex) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ExtComplex::Finite(z)
        } else {
            Self::INFINITY
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtComplex::Infinity(_))
    }

    pub fn finite(&self) -> Option<Complex> {
        match *self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity(_) => None,
        }
    }

    /// `1/z` on the sphere.
    pub fn recip(&self) -> Self {
        match *self {
            ExtComplex::Infinity(_) => ExtComplex::Finite(Complex::new(0.0, 0.0)),
            ExtComplex::Finite(z) if z.norm() == 0.0 => Self::INFINITY,
            ExtComplex::Finite(z) => ExtComplex::Finite(z.inv()),
        }
    }
}

impl From<Complex> for ExtComplex {
    fn from(z: Complex) -> Self {
        ExtComplex::from_complex(z)
    }
}

impl fmt::Debug for ExtComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtComplex::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            ExtComplex::Infinity(_) => write!(f, "∞"),
        }
    }
}

/// Chordal distance on the Riemann sphere (diameter 2).
///
/// Evaluated in the `1/z` chart when both points lie outside the unit disk.
pub fn chordal(a: ExtComplex, b: ExtComplex) -> f64 {
    match (a, b) {
        (ExtComplex::Infinity(_), ExtComplex::Infinity(_)) => 0.0,
        (ExtComplex::Finite(z), ExtComplex::Infinity(_))
        | (ExtComplex::Infinity(_), ExtComplex::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (ExtComplex::Finite(z), ExtComplex::Finite(w)) => chordal_finite(z, w),
    }
}

pub fn chordal_finite(z: Complex, w: Complex) -> f64 {
    if z.norm() > 1.0 && w.norm() > 1.0 {
        let (zi, wi) = (z.inv(), w.inv());
        2.0 * (zi - wi).norm() / ((1.0 + zi.norm_sqr()) * (1.0 + wi.norm_sqr())).sqrt()
    } else {
        2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
    }
}
