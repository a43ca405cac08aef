use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{CaptureParams, Fate};
use crate::algebra::{poly_roots, Complex, TAU_CLUSTER};
use crate::newton::{critical_points, petal_directions, CriticalPoint, NewtonSpec};

/// Per-point dynamical fate of one orbit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    #[serde(with = "crate::algebra::complex_pair")]
    pub start: Complex,
    pub fate: Fate,
    /// Iterations until the fate was decided (or the budget).
    pub steps: usize,
    /// Distance to the captured root, or 0 for other fates.
    pub landing_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    #[serde(default, with = "opt_trace")]
    pub trace: Option<Vec<Complex>>,
}

mod opt_trace {
    use crate::algebra::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Complex>>, D::Error> {
        let v = Option::<Vec<[f64; 2]>>::deserialize(d)?;
        Ok(v.map(|v| v.into_iter().map(|[a, b]| Complex::new(a, b)).collect()))
    }
}

/// Precomputed data for iterating one Newton map.
#[derive(Clone, Debug)]
pub struct OrbitEngine<'a> {
    pub spec: &'a NewtonSpec,
    pub caps: CaptureParams,
    pub roots: Vec<Complex>,
    capture: Vec<f64>,
    pub petals: Vec<f64>,
    /// Radius beyond which the petal detector is armed.
    pub r_petal: f64,
    pub critical: Vec<CriticalPoint>,
    /// Modulus scale of roots, poles and critical points (at least 1).
    pub scale: f64,
}

impl<'a> OrbitEngine<'a> {
    pub fn new(spec: &'a NewtonSpec, caps: CaptureParams) -> Self {
        let roots = spec.root_values();
        let critical = critical_points(spec, TAU_CLUSTER).unwrap_or_default();
        let poles = if spec.map.den.deg() >= 1 {
            poly_roots(&spec.map.den, TAU_CLUSTER).unwrap_or_default()
        } else {
            Vec::new()
        };
        let scale = roots
            .iter()
            .copied()
            .chain(poles.iter().map(|r| r.value))
            .chain(critical.iter().filter_map(|c| c.finite()))
            .map(|z| z.norm())
            .fold(1.0, f64::max);
        let root_scale = spec.root_scale();
        let capture = roots
            .iter()
            .map(|_| caps.tau_capture * root_scale)
            .collect();
        let petals = petal_directions(spec).unwrap_or_default();
        Self {
            spec,
            caps,
            roots,
            capture,
            petals,
            r_petal: 4.0 * scale + 4.0,
            critical,
            scale,
        }
    }

    /// Index of the petal direction within the angular tolerance of `arg z`.
    #[inline]
    pub fn petal_of(&self, z: Complex) -> Option<usize> {
        let a = z.arg();
        self.petals.iter().position(|&t| {
            let diff = (a - t).rem_euclid(2.0 * PI);
            diff.min(2.0 * PI - diff) <= self.caps.angle_tol
        })
    }

    #[inline]
    fn captured(&self, z: Complex) -> Option<usize> {
        self.roots
            .iter()
            .zip(&self.capture)
            .position(|(r, &eps)| (z - r).norm() < eps)
    }

    fn confirm(&self, z: Complex, root: usize) -> bool {
        let r = self.roots[root];
        let mut w = z;
        let mut prev = (self.spec.apply(w) - w).norm();
        for _ in 0..self.caps.confirm {
            w = self.spec.apply(w);
            if !w.is_finite() || (w - r).norm() >= self.capture[root] {
                return false;
            }
            let disp = (self.spec.apply(w) - w).norm();
            if disp > prev && disp > 1e-300 {
                return false;
            }
            prev = disp;
        }
        true
    }

    /// Fate and decision step, without a trace.
    #[inline]
    pub fn fate(&self, z0: Complex, budget: usize) -> (Fate, usize) {
        let rec = self.run(z0, budget, 0);
        (rec.fate, rec.steps)
    }

    /// Iterates until a fate triggers or the budget runs out. Keeps at most
    /// `trace_len` iterates.
    pub fn run(&self, z0: Complex, budget: usize, trace_len: usize) -> OrbitRecord {
        let mut trace = (trace_len > 0).then(Vec::new);
        let mut z = z0;
        let mut streak = 0usize;
        let mut streak_petal = usize::MAX;
        let mut prev_abs = z.norm();
        let parabolic = !self.petals.is_empty();
        let record = |fate, steps, err, trace| OrbitRecord {
            start: z0,
            fate,
            steps,
            landing_error: err,
            trace,
        };
        for step in 0..=budget {
            if let Some(t) = trace.as_mut() {
                if t.len() < trace_len {
                    t.push(z);
                }
            }
            if let Some(i) = self.captured(z) {
                if self.confirm(z, i) {
                    let err = (z - self.roots[i]).norm();
                    return record(Fate::Root(i), step, err, trace);
                }
            }
            if parabolic {
                let a = z.norm();
                if a > self.r_petal {
                    match self.petal_of(z) {
                        Some(j) if a > prev_abs => {
                            if j == streak_petal {
                                streak += 1;
                            } else {
                                streak_petal = j;
                                streak = 1;
                            }
                            if streak >= self.caps.window || a > self.caps.r_esc {
                                return record(Fate::Petal(j), step, 0.0, trace);
                            }
                        }
                        _ => streak = 0,
                    }
                } else {
                    streak = 0;
                }
                prev_abs = a;
            }
            if step == budget {
                break;
            }
            z = self.spec.apply(z);
            if !z.is_finite() {
                // landed on a pole: the orbit sits at the fixed point at infinity
                return record(Fate::Undecided, step + 1, 0.0, trace);
            }
        }
        record(Fate::Undecided, budget, 0.0, trace)
    }
}

/// Iterates one orbit and assigns its fate.
pub fn iterate_orbit(
    spec: &NewtonSpec,
    z0: Complex,
    budget: usize,
    caps: CaptureParams,
) -> OrbitRecord {
    OrbitEngine::new(spec, caps).run(z0, budget, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::newton::build_newton;

    fn cubic() -> NewtonSpec {
        build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap()
    }

    #[test]
    fn cubic_from_two_goes_to_one() {
        let spec = cubic();
        let rec = iterate_orbit(
            &spec,
            Complex::new(2.0, 0.0),
            5000,
            CaptureParams::default(),
        );
        let idx = spec
            .roots
            .iter()
            .position(|r| (r.value - 1.0).norm() < 1e-9)
            .unwrap();
        assert_eq!(rec.fate, Fate::Root(idx));
        assert!(rec.landing_error < 1e-6);
    }

    #[test]
    fn family_far_left_escapes_through_petal() {
        let spec =
            build_newton(&Polynomial::from_real(&[-0.25, 0.0, 1.0]), &Polynomial::z()).unwrap();
        let rec = iterate_orbit(
            &spec,
            Complex::new(-10.0, 0.0),
            50_000,
            CaptureParams::default(),
        );
        assert_eq!(rec.fate, Fate::Petal(0));
    }

    #[test]
    fn root_is_captured_at_step_zero() {
        let spec = cubic();
        let rec = iterate_orbit(&spec, Complex::new(-1.0, 0.0), 10, CaptureParams::default());
        assert_eq!(rec.fate, Fate::Root(0));
        assert_eq!(rec.steps, 0);
    }

    #[test]
    fn trace_is_bounded() {
        let spec = cubic();
        let rec =
            OrbitEngine::new(&spec, CaptureParams::default()).run(Complex::new(3.0, 0.1), 5000, 4);
        assert_eq!(rec.trace.unwrap().len(), 4);
    }
}
