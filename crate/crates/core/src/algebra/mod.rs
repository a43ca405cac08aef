//! Complex polynomial and rational-map arithmetic.

pub mod mobius;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod sphere;

pub use mobius::{mobius_conjugate_check, AffineMap, MobiusCheck, MobiusMap};
pub use poly::Polynomial;
pub use rational::{rational_reduce, RationalMap, TAU_POLE, TAU_ROOT};
pub use roots::{poly_roots, Root, TAU_CLUSTER};
pub use sphere::{chordal, chordal_finite, ExtComplex};

pub type Complex = num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("root finder did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize },
    #[error("polynomial has degree < 1")]
    DegreeTooLow,
    #[error("denominator is identically zero")]
    ZeroDenominator,
    #[error("numerator and denominator both vanish (unreduced map)")]
    Indeterminate,
    #[error("degenerate map (zero scale or determinant)")]
    Degenerate,
}

/// Serde adapter: a complex number as `[re, im]`.
pub mod complex_pair {
    use super::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex::new(re, im))
    }
}

/// Serde adapter for `Vec<Complex>`.
pub mod complex_vec {
    use super::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|z| [z.re, z.im])
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex>, D::Error> {
        let v = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(v.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
    }
}

/// Five-point central difference of a holomorphic function.
pub fn numeric_derivative(f: impl Fn(Complex) -> Complex, z: Complex, h: f64) -> Complex {
    let h = Complex::new(h, 0.0);
    (f(z - h * 2.0) - f(z - h) * 8.0 + f(z + h) * 8.0 - f(z + h * 2.0)) / (h * 12.0)
}
