use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::algebra::{
    poly_roots, roots::lex_cmp, AffineMap, Complex, Polynomial, RationalMap, TAU_CLUSTER,
};
use crate::newton::NewtonSpec;

/// Relative coefficient tolerance of the conjugacy test.
pub const TAU_CONJ: f64 = 1e-8;

/// A normalized pair with the affine map `T` that produced it:
/// `p̃ = p∘T / lead` and `q̃ = q∘T` without its constant term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalized {
    pub p: Polynomial,
    pub q: Polynomial,
    pub witness: AffineMap,
}

/// Translation centering `f` (zero coefficient below the leading one).
fn centering_shift(f: &Polynomial) -> Complex {
    let d = f.deg();
    if d == 0 {
        return Complex::new(0.0, 0.0);
    }
    -f.coeff(d - 1) / (d as f64 * f.leading())
}

fn apply(p: &Polynomial, q: &Polynomial, t: &AffineMap) -> (Polynomial, Polynomial) {
    let pt = p.compose_affine(t.scale, t.offset);
    let pt = pt.scale(pt.leading().inv());
    let qt = q.compose_affine(t.scale, t.offset);
    let mut qc = qt.coeffs().to_vec();
    if let Some(c0) = qc.first_mut() {
        *c0 = Complex::new(0.0, 0.0);
    }
    (pt, Polynomial::new(qc))
}

/// Canonical form of `(p, q)` up to affine change of variable.
///
/// With `q` constant: `p` monic, centered, and scaled to have a root at 1 (the
/// nonzero root nearest 1). Otherwise `q′` is made monic with the principal
/// root `a = b^(−1/n)` of its leading coefficient `b`, and then `q` is
/// centered when `deg q ≥ 2`, else `p` when `deg p ≥ 2`.
pub fn normalize(p: &Polynomial, q: &Polynomial) -> Normalized {
    let n = if q.deg() == 0 { 0 } else { q.deg() };
    let witness = if n == 0 {
        let s = centering_shift(p);
        let centered = p.compose_affine(Complex::new(1.0, 0.0), s);
        let r = if centered.deg() >= 1 {
            let roots = poly_roots(&centered, TAU_CLUSTER).unwrap_or_default();
            let nonzero: Vec<Complex> = roots
                .iter()
                .map(|r| r.value)
                .filter(|z| z.norm() > 1e-12 * (1.0 + s.norm()))
                .collect();
            let best = nonzero
                .iter()
                .map(|z| (z - 1.0).norm())
                .fold(f64::INFINITY, f64::min);
            nonzero
                .into_iter()
                .filter(|z| (z - 1.0).norm() <= best + 1e-9)
                .min_by(|a, b| lex_cmp(*a, *b))
                .unwrap_or(Complex::new(1.0, 0.0))
        } else {
            Complex::new(1.0, 0.0)
        };
        AffineMap {
            scale: r,
            offset: s,
        }
    } else {
        let b = q.derivative().leading();
        let a = Complex::from_polar(b.norm().powf(-1.0 / n as f64), -b.arg() / n as f64);
        let scaled_p = p.compose_affine(a, Complex::new(0.0, 0.0));
        let scaled_q = q.compose_affine(a, Complex::new(0.0, 0.0));
        let t = if n >= 2 {
            centering_shift(&scaled_q)
        } else if p.deg() >= 2 {
            centering_shift(&scaled_p)
        } else {
            Complex::new(0.0, 0.0)
        };
        AffineMap {
            scale: a,
            offset: a * t,
        }
    };
    let (pn, qn) = apply(p, q, &witness);
    Normalized {
        p: pn,
        q: qn,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyResult {
    pub conjugate: bool,
    /// `M` with `g = M∘f∘M⁻¹`.
    pub witness: Option<AffineMap>,
    /// Smallest coefficient residual over the candidates.
    pub residual: f64,
    pub candidates_tried: usize,
}

/// `M∘f∘M⁻¹` for `M(z) = s z`.
fn conjugate_by_scale(f: &RationalMap, s: Complex) -> RationalMap {
    let inv = s.inv();
    let zero = Complex::new(0.0, 0.0);
    RationalMap {
        num: f.num.compose_affine(inv, zero).scale(s),
        den: f.den.compose_affine(inv, zero),
        reduced: f.reduced,
    }
}

/// Tests whether normalized maps `f` and `g` are affinely conjugate by
/// enumerating the finite candidate set: rotations by `n`-th roots of unity
/// when `n ≥ 1`, and `z ↦ z/a` for the roots `a` of `f` when `n = 0`.
pub fn affine_conjugacy_test(f: &NewtonSpec, g: &NewtonSpec, tol: f64) -> ConjugacyResult {
    let mut result = ConjugacyResult {
        conjugate: false,
        witness: None,
        residual: f64::INFINITY,
        candidates_tried: 0,
    };
    if (f.m, f.n, f.d) != (g.m, g.n, g.d) {
        return result;
    }
    let candidates: Vec<Complex> = if f.n >= 1 {
        (0..f.n)
            .map(|k| Complex::from_polar(1.0, 2.0 * PI * k as f64 / f.n as f64))
            .collect()
    } else {
        f.roots
            .iter()
            .map(|r| r.value)
            .filter(|a| a.norm() > 0.0)
            .map(|a| a.inv())
            .collect()
    };
    for s in candidates {
        result.candidates_tried += 1;
        let residual = conjugate_by_scale(&f.map, s).coefficient_distance(&g.map);
        result.residual = result.residual.min(residual);
        if residual <= tol {
            result.conjugate = true;
            result.witness = Some(AffineMap {
                scale: s,
                offset: Complex::new(0.0, 0.0),
            });
            break;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::newton::build_newton;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn polynomial_case_gets_root_at_one() {
        let n = normalize(
            &Polynomial::from_real(&[2.0, 0.0, 2.0]),
            &Polynomial::zero(),
        );
        assert!(n.p.relative_distance(&Polynomial::from_real(&[-1.0, 0.0, 1.0])) < 1e-14);
        assert!(n.p.eval(c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn linear_q_is_scaled_to_monic_derivative() {
        let p = Polynomial::from_real(&[1.0, 2.0, 3.0]);
        let n = normalize(&p, &Polynomial::from_real(&[5.0, 3.0]));
        assert!((n.witness.scale - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(n.q.relative_distance(&Polynomial::z()) < 1e-15);
        assert!(n.p.coeff(1).norm() < 1e-14);
    }

    #[test]
    fn normalization_is_idempotent() {
        let p = Polynomial::new(vec![c(0.3, -1.0), c(2.0, 0.5), c(-1.0, 1.0), c(0.5, 0.0)]);
        let q = Polynomial::new(vec![c(1.0, 0.0), c(0.2, 0.1), c(0.0, 2.0)]);
        let once = normalize(&p, &q);
        let twice = normalize(&once.p, &once.q);
        assert!(twice.witness.distance(&AffineMap::identity()) < 1e-12);
        assert!(twice.p.relative_distance(&once.p) < 1e-12);
    }

    #[test]
    fn scaling_identity_is_detected() {
        let p = Polynomial::new(vec![c(0.5, 0.2), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let q = Polynomial::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let a = c(-1.0, 0.0);
        let (pa, qa) = (
            p.compose_affine(a, c(0.0, 0.0)),
            q.compose_affine(a, c(0.0, 0.0)),
        );
        let nf = normalize(&p, &q);
        let ng = normalize(&pa, &qa);
        let f = build_newton(&nf.p, &nf.q).unwrap();
        let g = build_newton(&ng.p, &ng.q).unwrap();
        let res = affine_conjugacy_test(&f, &g, TAU_CONJ);
        assert!(res.conjugate, "{res:?}");
        let back = affine_conjugacy_test(&g, &f, TAU_CONJ);
        let w = res.witness.unwrap().compose(&back.witness.unwrap());
        assert!(w.distance(&AffineMap::identity()) < 1e-12);
    }

    #[test]
    fn family_members_are_not_conjugate() {
        let f = build_newton(&Polynomial::from_real(&[-0.25, 0.0, 1.0]), &Polynomial::z()).unwrap();
        let g = build_newton(&Polynomial::from_real(&[2.0, 0.0, 1.0]), &Polynomial::z()).unwrap();
        let res = affine_conjugacy_test(&f, &g, TAU_CONJ);
        assert!(!res.conjugate);
        assert_eq!(res.candidates_tried, 1);
        let same = affine_conjugacy_test(&f, &f, TAU_CONJ);
        assert_eq!(same.witness, Some(AffineMap::identity()));
    }
}
