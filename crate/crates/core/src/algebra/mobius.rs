//! Affine and Möbius maps, and numerical conjugacy certificates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rational::RationalMap;
use super::sphere::{chordal, ExtComplex};
use super::{AlgebraError, Complex};

/// `z ↦ scale·z + offset`, `scale ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "super::complex_pair")]
    pub scale: Complex,
    #[serde(with = "super::complex_pair")]
    pub offset: Complex,
}

impl AffineMap {
    pub fn new(scale: Complex, offset: Complex) -> Result<Self, AlgebraError> {
        if scale.norm() == 0.0 || !scale.is_finite() || !offset.is_finite() {
            return Err(AlgebraError::Degenerate);
        }
        Ok(Self { scale, offset })
    }

    pub fn identity() -> Self {
        Self {
            scale: Complex::new(1.0, 0.0),
            offset: Complex::new(0.0, 0.0),
        }
    }

    pub fn apply(&self, z: Complex) -> Complex {
        self.scale * z + self.offset
    }

    pub fn inverse(&self) -> Self {
        let s = self.scale.inv();
        Self {
            scale: s,
            offset: -self.offset * s,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Self {
        Self {
            scale: self.scale * inner.scale,
            offset: self.scale * inner.offset + self.offset,
        }
    }

    /// Distance from another affine map in coefficient space.
    pub fn distance(&self, other: &AffineMap) -> f64 {
        (self.scale - other.scale)
            .norm()
            .max((self.offset - other.offset).norm())
    }

    pub fn to_mobius(&self) -> MobiusMap {
        MobiusMap {
            a: self.scale,
            b: self.offset,
            c: Complex::new(0.0, 0.0),
            d: Complex::new(1.0, 0.0),
        }
    }
}

/// `z ↦ (a z + b)/(c z + d)` with `ad − bc ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    #[serde(with = "super::complex_pair")]
    pub a: Complex,
    #[serde(with = "super::complex_pair")]
    pub b: Complex,
    #[serde(with = "super::complex_pair")]
    pub c: Complex,
    #[serde(with = "super::complex_pair")]
    pub d: Complex,
}

impl MobiusMap {
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, AlgebraError> {
        let m = Self { a, b, c, d };
        if m.determinant().norm() == 0.0 {
            return Err(AlgebraError::Degenerate);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    pub fn determinant(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, z: ExtComplex) -> ExtComplex {
        match z {
            ExtComplex::Infinity(_) => {
                if self.c.norm() == 0.0 {
                    ExtComplex::INFINITY
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() == 0.0 {
                    ExtComplex::INFINITY
                } else {
                    ExtComplex::from_complex((self.a * z + self.b) / den)
                }
            }
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MobiusMap) -> Self {
        Self {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }
}

/// Outcome of [`mobius_conjugate_check`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MobiusCheck {
    /// Largest chordal distance between `M(f(z))` and `g(M(z))` over the samples.
    pub residual: f64,
    pub samples: usize,
    pub certified: bool,
}

/// Radius of the sampling disk used by [`mobius_conjugate_check`].
pub const SAMPLE_RADIUS: f64 = 2.0;

/// Seeded sample points, uniform on the disk of radius [`SAMPLE_RADIUS`].
pub fn disk_samples(samples: usize, seed: u64) -> Vec<Complex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let r = SAMPLE_RADIUS * rng.gen::<f64>().sqrt();
            let t = rng.gen::<f64>() * std::f64::consts::TAU;
            Complex::from_polar(r, t)
        })
        .collect()
}

/// Numerically certifies `M ∘ f = g ∘ M` on seeded samples using the chordal
/// metric, so poles on either side are handled uniformly.
pub fn mobius_conjugate_check(
    m: &MobiusMap,
    f: &RationalMap,
    g: &RationalMap,
    samples: usize,
    tol: f64,
    seed: u64,
) -> MobiusCheck {
    let points: Vec<ExtComplex> = disk_samples(samples, seed)
        .into_iter()
        .map(ExtComplex::Finite)
        .collect();
    conjugacy_residual_on(m, f, g, &points, tol)
}

/// Same check on explicit sample points.
pub fn conjugacy_residual_on(
    m: &MobiusMap,
    f: &RationalMap,
    g: &RationalMap,
    points: &[ExtComplex],
    tol: f64,
) -> MobiusCheck {
    let eval = |h: &RationalMap, z: ExtComplex| -> ExtComplex {
        // a point where the unreduced form is 0/0 is skipped by returning z
        h.eval(z).unwrap_or(z)
    };
    let residual = points
        .iter()
        .map(|&z| {
            let lhs = m.apply(eval(f, z));
            let rhs = eval(g, m.apply(z));
            chordal(lhs, rhs)
        })
        .fold(0.0, f64::max);
    MobiusCheck {
        residual,
        samples: points.len(),
        certified: residual <= tol,
    }
}
