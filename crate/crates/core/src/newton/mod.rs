//! Newton maps `N(z) = z − p/(p′ + p q′)` of entire functions `p·exp(q)`.

mod blaschke;
mod structure;

pub use blaschke::{blaschke_model, BlaschkeCheck, BlaschkeModel};
pub use structure::{
    chart_multiplier_at_infinity, classify_infinity, critical_points,
    fixed_multiplicity_at_infinity, fixed_points, free_critical_points, petal_directions,
    CriticalPoint, FixedKind, FixedPointReport, PARABOLIC_TOL,
};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{
    poly_roots, rational_reduce, AlgebraError, Complex, Polynomial, RationalMap, Root, TAU_CLUSTER,
    TAU_ROOT,
};

/// Smallest degree for which dynamical analyses are performed.
pub const MIN_DYNAMICAL_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NewtonError {
    #[error("p must have degree at least 1")]
    InvalidPolynomial,
    #[error("constant Newton map (deg p = 1 and q constant)")]
    ConstantMap,
    #[error("Newton map has degree {d} < 3")]
    DegreeTooLow { d: usize },
    #[error("infinity is not parabolic (q is constant)")]
    NotParabolic,
    #[error("Blaschke model needs k >= 2, got {k}")]
    InvalidBlaschke { k: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A Newton map together with the data it was built from.
#[derive(Clone, Debug)]
pub struct NewtonSpec {
    pub p: Polynomial,
    pub q: Polynomial,
    /// The reduced rational map.
    pub map: RationalMap,
    /// `z (p′ + p q′) − p` before reduction.
    pub raw_num: Polynomial,
    /// `p′ + p q′` before reduction.
    pub raw_den: Polynomial,
    /// `deg p`.
    pub m: usize,
    /// `deg q` (0 for constant `q`).
    pub n: usize,
    /// Degree of the reduced map.
    pub d: usize,
    /// Roots of `p` in lexicographic order. These are the finite fixed points.
    pub roots: Vec<Root>,
    /// Reduction cancelled more than the generic amount.
    pub degenerate: bool,
    pub warnings: Vec<String>,
}

/// Builds the Newton map and requires degree at least 3.
pub fn build_newton(p: &Polynomial, q: &Polynomial) -> Result<NewtonSpec, NewtonError> {
    let spec = build_newton_unchecked(p, q)?;
    if spec.d < MIN_DYNAMICAL_DEGREE {
        return Err(NewtonError::DegreeTooLow { d: spec.d });
    }
    Ok(spec)
}

/// Builds the Newton map without the degree floor (degree 2 maps allowed).
pub fn build_newton_unchecked(p: &Polynomial, q: &Polynomial) -> Result<NewtonSpec, NewtonError> {
    let m = match p.degree() {
        Some(m) if m >= 1 => m,
        _ => return Err(NewtonError::InvalidPolynomial),
    };
    let q = if q.deg() == 0 {
        Polynomial::zero()
    } else {
        q.clone()
    };
    let n = q.deg();
    let dq = q.derivative();
    let raw_den = &p.derivative() + &(p * &dq);
    let raw_num = &(&Polynomial::z() * &raw_den) - p;
    let map = rational_reduce(&raw_num, &raw_den, TAU_ROOT)?;
    let d = map.degree();
    if d == 0 {
        return Err(NewtonError::ConstantMap);
    }
    let roots = poly_roots(p, TAU_CLUSTER)?;
    let simple = roots.iter().all(|r| r.multiplicity == 1);
    let generic = if n == 0 { m } else { m + n };
    let degenerate = d != generic;

    let mut warnings = Vec::new();
    if !simple {
        warnings.push(
            "p has multiple roots; normal forms assume simple roots (attracting, not superattracting, fixed points)"
                .to_string(),
        );
    }
    if degenerate {
        warnings.push(format!(
            "degenerate cancellation: degree {d}, generic degree {generic}"
        ));
    }
    Ok(NewtonSpec {
        p: p.clone(),
        q,
        map,
        raw_num,
        raw_den,
        m,
        n,
        d,
        roots,
        degenerate,
        warnings,
    })
}

impl NewtonSpec {
    /// Distinct roots of `p`.
    pub fn root_values(&self) -> Vec<Complex> {
        self.roots.iter().map(|r| r.value).collect()
    }

    /// `N(z)` without pole handling.
    #[inline]
    pub fn apply(&self, z: Complex) -> Complex {
        self.map.apply(z)
    }

    pub fn derivative(&self, z: Complex) -> Complex {
        self.map.derivative(z)
    }

    pub fn is_parabolic(&self) -> bool {
        self.n >= 1
    }

    /// Modulus scale of the finite structure (roots and poles), at least 1.
    pub fn root_scale(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| r.value.norm())
            .fold(1.0, f64::max)
    }

    pub fn to_doc(&self) -> SpecDoc {
        SpecDoc {
            p: self.p.clone(),
            q: self.q.clone(),
        }
    }
}

/// The `{p, q}` document form of a Newton map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecDoc {
    pub p: Polynomial,
    #[serde(default)]
    pub q: Polynomial,
}

impl Serialize for NewtonSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for NewtonSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = SpecDoc::deserialize(d)?;
        build_newton_unchecked(&doc.p, &doc.q).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_member_formula() {
        let c = 2.0;
        let spec = build_newton(&Polynomial::from_real(&[c, 0.0, 1.0]), &Polynomial::z()).unwrap();
        assert_eq!(spec.d, 3);
        assert_eq!((spec.m, spec.n), (2, 1));
        // z − (z²+c)/(z²+2z+c)
        for z in [Complex::new(0.3, 0.7), Complex::new(-1.5, 0.2)] {
            let want = z - (z * z + c) / (z * z + z * 2.0 + c);
            assert!((spec.apply(z) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn cubic_polynomial_newton() {
        let spec = build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap();
        assert_eq!(spec.d, 3);
        let (num, den) = spec.map.normalized();
        // 2z³/(3z²−1) normalized by den leading coefficient 3
        let want_num = Polynomial::from_real(&[0.0, 0.0, 0.0, 2.0 / 3.0]);
        let want_den = Polynomial::from_real(&[-1.0 / 3.0, 0.0, 1.0]);
        assert!(num.relative_distance(&want_num) < 1e-14);
        assert!(den.relative_distance(&want_den) < 1e-14);
    }

    #[test]
    fn linear_p_constant_q_is_constant_map() {
        let err = build_newton(&Polynomial::z(), &Polynomial::zero()).unwrap_err();
        assert_eq!(err, NewtonError::ConstantMap);
    }

    #[test]
    fn degree_two_rejected_by_checked_builder() {
        let err = build_newton(
            &Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap_err();
        assert_eq!(err, NewtonError::DegreeTooLow { d: 2 });
        assert!(build_newton_unchecked(
            &Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            &Polynomial::zero()
        )
        .is_ok());
    }

    #[test]
    fn double_root_is_flagged_degenerate() {
        let p = Polynomial::from_roots(&[
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(-2.0, 0.0),
            Complex::new(0.5, 1.0),
        ]);
        let spec = build_newton_unchecked(&p, &Polynomial::zero()).unwrap();
        assert!(spec.degenerate);
        assert_eq!(spec.d, 3);
        assert_eq!(spec.warnings.len(), 2);
    }

    #[test]
    fn doc_roundtrip_json_and_toml() {
        let spec =
            build_newton(&Polynomial::from_real(&[-0.25, 0.0, 1.0]), &Polynomial::z()).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let back: NewtonSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back.p, spec.p);
        let toml_text =
            "p = [[-0.25, 0.0], [0.0, 0.0], [1.0, 0.0]]\nq = [[0.0, 0.0], [1.0, 0.0]]\n";
        let doc: SpecDoc = toml::from_str(toml_text).unwrap();
        assert_eq!(doc.q, Polynomial::z());
    }
}
