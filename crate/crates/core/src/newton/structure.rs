//! Fixed points, critical points and the parabolic structure at infinity.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{NewtonError, NewtonSpec};
use crate::algebra::{numeric_derivative, poly_roots, Complex, ExtComplex, Polynomial};

/// `|λ − 1|` threshold for calling a fixed point parabolic.
pub const PARABOLIC_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedKind {
    Superattracting,
    Attracting,
    Repelling,
    Parabolic,
    /// `|λ| = 1` without being parabolic.
    Indifferent,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub location: ExtComplex,
    #[serde(with = "crate::algebra::complex_pair")]
    pub multiplier: Complex,
    pub kind: FixedKind,
    /// Multiplicity as a root of the fixed-point equation.
    pub multiplicity: usize,
    /// Number of attracting petals (parabolic points only).
    pub petal_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: ExtComplex,
    pub local_degree: usize,
}

impl CriticalPoint {
    pub fn finite(&self) -> Option<Complex> {
        self.location.finite()
    }
}

fn kind_of(multiplier: Complex, multiplicity: usize, tol: f64) -> FixedKind {
    let r = multiplier.norm();
    if r <= tol {
        FixedKind::Superattracting
    } else if (multiplier - 1.0).norm() <= PARABOLIC_TOL && multiplicity >= 2 {
        FixedKind::Parabolic
    } else if (r - 1.0).abs() <= PARABOLIC_TOL {
        FixedKind::Indifferent
    } else if r < 1.0 {
        FixedKind::Attracting
    } else {
        FixedKind::Repelling
    }
}

/// All fixed points, finite ones in lexicographic order followed by infinity.
///
/// Finite fixed points are the zeros of the numerator of `N(z) − z` for the
/// reduced map, so degenerate cancellations show up here rather than being
/// read off from `p`.
pub fn fixed_points(spec: &NewtonSpec, tol: f64) -> Result<Vec<FixedPointReport>, NewtonError> {
    let eq = &spec.map.num - &(&Polynomial::z() * &spec.map.den);
    let eq = eq.trim_relative(1e-13);
    let mut out = Vec::new();
    if eq.deg() >= 1 {
        for root in poly_roots(&eq, crate::algebra::TAU_CLUSTER)? {
            let multiplier = spec.derivative(root.value);
            out.push(FixedPointReport {
                location: ExtComplex::Finite(root.value),
                multiplier,
                kind: kind_of(multiplier, root.multiplicity, tol),
                multiplicity: root.multiplicity,
                petal_count: 0,
            });
        }
    }
    out.push(classify_infinity(spec));
    Ok(out)
}

/// The fixed point at infinity.
///
/// For constant `q` it is repelling with multiplier `m/(m−1)`; otherwise it
/// is parabolic with multiplier 1, multiplicity `n+1` and `n` petals.
pub fn classify_infinity(spec: &NewtonSpec) -> FixedPointReport {
    if spec.n == 0 {
        let m = spec.m as f64;
        FixedPointReport {
            location: ExtComplex::INFINITY,
            multiplier: Complex::new(m / (m - 1.0), 0.0),
            kind: FixedKind::Repelling,
            multiplicity: 1,
            petal_count: 0,
        }
    } else {
        FixedPointReport {
            location: ExtComplex::INFINITY,
            multiplier: Complex::new(1.0, 0.0),
            kind: FixedKind::Parabolic,
            multiplicity: spec.n + 1,
            petal_count: spec.n,
        }
    }
}

/// Multiplier at infinity by differentiating `w ↦ 1/N(1/w)` at 0 numerically.
pub fn chart_multiplier_at_infinity(spec: &NewtonSpec) -> Complex {
    let scale = spec.root_scale().max(
        spec.map
            .den
            .coeffs()
            .iter()
            .map(|c| (c / spec.map.den.leading()).norm())
            .fold(1.0, f64::max),
    );
    let h = 1e-3 / scale;
    let g = |w: Complex| spec.apply(w.inv()).inv();
    numeric_derivative(g, Complex::new(0.0, 0.0), h)
}

/// Multiplicity of infinity as a solution of the fixed-point equation,
/// read off in the `w = 1/z` chart.
pub fn fixed_multiplicity_at_infinity(spec: &NewtonSpec) -> usize {
    let swapped = spec.map.chart_swap();
    let eq = &swapped.num - &(&Polynomial::z() * &swapped.den);
    eq.lowest_significant(1e-12).unwrap_or(0)
}

/// Critical points with local degrees, finite ones first in lexicographic
/// order. Infinity is included when it is critical.
pub fn critical_points(spec: &NewtonSpec, tol: f64) -> Result<Vec<CriticalPoint>, NewtonError> {
    let w = spec.map.wronskian();
    let mut out = Vec::new();
    if w.deg() >= 1 {
        for root in poly_roots(&w, tol)? {
            out.push(CriticalPoint {
                location: ExtComplex::Finite(root.value),
                local_degree: root.multiplicity + 1,
            });
        }
    }
    let at_inf = spec.map.local_degree_at_infinity();
    if at_inf >= 2 {
        out.push(CriticalPoint {
            location: ExtComplex::INFINITY,
            local_degree: at_inf,
        });
    }
    Ok(out)
}

/// Finite critical points that are not roots of `p`.
pub fn free_critical_points(spec: &NewtonSpec, crit: &[CriticalPoint]) -> Vec<CriticalPoint> {
    let scale = spec.root_scale();
    crit.iter()
        .filter(|c| match c.location {
            ExtComplex::Finite(z) => spec
                .roots
                .iter()
                .all(|r| (r.value - z).norm() > 1e-7 * scale),
            ExtComplex::Infinity(_) => false,
        })
        .copied()
        .collect()
}

/// Attracting directions at infinity.
///
/// With `q′` monic the local form is `N(z) ≈ z − z^(1−n)` and the directions
/// are `(2k+1)π/n`. A general leading coefficient `b` of `q′` rotates them to
/// `(π − arg b + 2πk)/n`.
pub fn petal_directions(spec: &NewtonSpec) -> Result<Vec<f64>, NewtonError> {
    if spec.n == 0 {
        return Err(NewtonError::NotParabolic);
    }
    let n = spec.n as f64;
    let b = spec.q.derivative().leading();
    Ok((0..spec.n)
        .map(|k| ((PI - b.arg() + 2.0 * PI * k as f64) / n).rem_euclid(2.0 * PI))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::{build_newton, build_newton_unchecked};

    fn cubic() -> NewtonSpec {
        build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap()
    }

    fn family(c: f64) -> NewtonSpec {
        build_newton(&Polynomial::from_real(&[c, 0.0, 1.0]), &Polynomial::z()).unwrap()
    }

    #[test]
    fn cubic_fixed_points() {
        let fps = fixed_points(&cubic(), 1e-8).unwrap();
        assert_eq!(fps.len(), 4);
        for (fp, want) in fps.iter().zip([-1.0, 0.0, 1.0]) {
            let z = fp.location.finite().unwrap();
            assert!((z - Complex::new(want, 0.0)).norm() < 1e-12);
            assert_eq!(fp.kind, FixedKind::Superattracting);
            assert!(fp.multiplier.norm() < 1e-12);
        }
        assert_eq!(fps[3].kind, FixedKind::Repelling);
    }

    #[test]
    fn family_quarter_fixed_points() {
        let spec = family(-0.25);
        let fps = fixed_points(&spec, 1e-8).unwrap();
        let finite: Vec<_> = fps.iter().filter_map(|f| f.location.finite()).collect();
        assert_eq!(finite.len(), 2);
        assert!((finite[0] - Complex::new(-0.5, 0.0)).norm() < 1e-12);
        assert!((finite[1] - Complex::new(0.5, 0.0)).norm() < 1e-12);
        for f in fps.iter().take(2) {
            assert_eq!(f.kind, FixedKind::Superattracting);
            assert!(
                (spec.apply(f.location.finite().unwrap()) - f.location.finite().unwrap()).norm()
                    < 1e-12
            );
        }
    }

    #[test]
    fn infinity_examples() {
        let r = classify_infinity(&cubic());
        assert_eq!(r.kind, FixedKind::Repelling);
        assert!((r.multiplier - 1.5).norm() < 1e-15);
        assert!((chart_multiplier_at_infinity(&cubic()) - 1.5).norm() < 1e-8);

        let r = classify_infinity(&family(-0.25));
        assert_eq!(
            (r.kind, r.multiplicity, r.petal_count),
            (FixedKind::Parabolic, 2, 1)
        );
        assert_eq!(fixed_multiplicity_at_infinity(&family(-0.25)), 2);

        let p = Polynomial::from_real(&[0.3, -0.2, 0.1, 0.7, 1.0]);
        let q = Polynomial::from_real(&[0.0, 0.5, -0.1, 0.2, 0.25]);
        let spec = build_newton(&p, &q).unwrap();
        let r = classify_infinity(&spec);
        assert_eq!((r.multiplicity, r.petal_count), (5, 4));
        assert_eq!(fixed_multiplicity_at_infinity(&spec), 5);
        assert!((chart_multiplier_at_infinity(&spec) - 1.0).norm() < 1e-8);
    }

    #[test]
    fn cubic_critical_points() {
        let crit = critical_points(&cubic(), crate::algebra::TAU_CLUSTER).unwrap();
        let got: Vec<(f64, usize)> = crit
            .iter()
            .map(|c| (c.finite().unwrap().re, c.local_degree))
            .collect();
        assert_eq!(got.len(), 3);
        assert!((got[0].0 + 1.0).abs() < 1e-12 && got[0].1 == 2);
        assert!(got[1].0.abs() < 1e-8 && got[1].1 == 3);
        assert!((got[2].0 - 1.0).abs() < 1e-12 && got[2].1 == 2);
    }

    #[test]
    fn family_two_has_one_free_critical_point_of_degree_three() {
        let spec = family(2.0);
        let crit = critical_points(&spec, crate::algebra::TAU_CLUSTER).unwrap();
        let free = free_critical_points(&spec, &crit);
        assert_eq!(free.len(), 1);
        assert_eq!(free[0].local_degree, 3);
        assert!((free[0].finite().unwrap() + 2.0).norm() < 1e-9);
    }

    #[test]
    fn family_quarter_root_has_local_degree_three() {
        let spec = family(-0.25);
        let crit = critical_points(&spec, crate::algebra::TAU_CLUSTER).unwrap();
        let at_half = crit
            .iter()
            .find(|c| (c.finite().unwrap() + 0.5).norm() < 1e-6)
            .unwrap();
        assert_eq!(at_half.local_degree, 3);
        let free = free_critical_points(&spec, &crit);
        assert_eq!(free.len(), 1);
        assert!((free[0].finite().unwrap() + 3.5).norm() < 1e-10);
    }

    #[test]
    fn petal_direction_examples() {
        let d1 = petal_directions(&family(-0.25)).unwrap();
        assert!((d1[0] - PI).abs() < 1e-15);
        let q2 = Polynomial::from_real(&[0.0, 0.0, 0.5]);
        let spec = build_newton(&Polynomial::from_real(&[1.0, 0.0, 1.0]), &q2).unwrap();
        let d2 = petal_directions(&spec).unwrap();
        assert!((d2[0] - PI / 2.0).abs() < 1e-12 && (d2[1] - 3.0 * PI / 2.0).abs() < 1e-12);
        let q4 = Polynomial::from_real(&[0.0, 0.0, 0.0, 0.0, 0.25]);
        let spec = build_newton(&Polynomial::from_real(&[1.0, 0.0, 0.0, 0.0, 1.0]), &q4).unwrap();
        let d4 = petal_directions(&spec).unwrap();
        assert_eq!(d4.len(), 4);
        for w in d4.windows(2) {
            assert!((w[1] - w[0] - PI / 2.0).abs() < 1e-12);
        }
        assert!(matches!(
            petal_directions(&cubic()),
            Err(NewtonError::NotParabolic)
        ));
    }

    #[test]
    fn riemann_hurwitz_on_examples() {
        for spec in [cubic(), family(2.0), family(-0.25), family(0.7)] {
            let crit = critical_points(&spec, crate::algebra::TAU_CLUSTER).unwrap();
            let total: usize = crit.iter().map(|c| c.local_degree - 1).sum();
            assert_eq!(total, 2 * spec.d - 2);
        }
        let deg2 = build_newton_unchecked(
            &Polynomial::from_real(&[-1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap();
        let crit = critical_points(&deg2, crate::algebra::TAU_CLUSTER).unwrap();
        assert_eq!(crit.iter().map(|c| c.local_degree - 1).sum::<usize>(), 2);
    }
}
