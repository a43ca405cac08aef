use serde::{Deserialize, Serialize};

use super::component::{component_preperiod, MAX_PREPERIOD};
use super::{Fate, OrbitEngine};
use crate::algebra::Complex;

/// Absolute landing tolerance relative to `1 + |target|`.
pub const TAU_EXACT: f64 = 1e-10;
/// An orbit point this far from the target before landing counts as a
/// genuine jump onto it rather than asymptotic convergence.
pub const RHO_APPROACH: f64 = 1e-3;
/// Tolerance for landing on a petal center, relative to the orbit scale.
pub const TAU_LAND: f64 = 1e-8;
/// Iterations spent settling onto a cycle before period detection.
const CYCLE_TRANSIENT: usize = 2000;
const MAX_PERIOD: usize = 64;

/// How a critical orbit ends up finite, if it does.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Landing {
    /// `N^step(c)` equals root `index`.
    Root {
        index: usize,
        step: usize,
        residual: f64,
    },
    /// `N^step(c)` equals the center of the immediate basin of `petal`.
    Center {
        petal: usize,
        step: usize,
        residual: f64,
    },
    /// `N^step(c)` is a critical point on a superattracting cycle.
    Cycle {
        period: usize,
        step: usize,
        residual: f64,
    },
    /// `N^step(c)` is a pole, so the orbit lands on the fixed point at infinity.
    Pole { step: usize },
    /// No landing found; `closest` is the smallest distance to a candidate target.
    Unresolved { closest: f64 },
}

impl Landing {
    pub fn is_resolved(&self) -> bool {
        !matches!(self, Landing::Unresolved { .. })
    }
}

/// Evidence for one free critical point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalOrbit {
    #[serde(with = "crate::algebra::complex_pair")]
    pub point: Complex,
    pub local_degree: usize,
    pub fate: Fate,
    /// Steps until the fate was decided.
    pub steps: usize,
    /// Component preperiod for petal fates, capture step for root fates.
    pub preperiod: Option<usize>,
    /// Lies in an immediate basin of infinity.
    pub immediate: bool,
    pub landing: Landing,
    /// The orbit converges to an attracting cycle that holds no critical point.
    pub attracted_by_cycle: bool,
}

/// Free critical points in the immediate basin of one petal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusEntry {
    pub petal: usize,
    pub count: usize,
    pub local_degrees: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalAnalysis {
    pub orbits: Vec<CriticalOrbit>,
    pub census: Vec<CensusEntry>,
    /// Center of each petal's immediate basin when the census is exactly one.
    #[serde(with = "opt_centers")]
    pub centers: Vec<Option<Complex>>,
    pub budget: usize,
}

mod opt_centers {
    use crate::algebra::Complex;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Option<Complex>], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|c| c.map(|z| [z.re, z.im]))
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<Complex>>, D::Error> {
        let v = Vec::<Option<[f64; 2]>>::deserialize(d)?;
        Ok(v.into_iter()
            .map(|c| c.map(|[a, b]| Complex::new(a, b)))
            .collect())
    }
}

impl CriticalAnalysis {
    /// Every petal holds exactly one critical point in its immediate basin.
    pub fn census_ok(&self) -> bool {
        self.census.iter().all(|e| e.count == 1)
    }

    /// Pointwise postcritical minimality: the census is one per petal and
    /// every free critical orbit lands.
    pub fn minimal(&self) -> bool {
        self.census_ok() && self.orbits.iter().all(|o| o.landing.is_resolved())
    }

    /// Concrete failures, one line each.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for e in &self.census {
            if e.count != 1 {
                out.push(format!(
                    "immediate basin of petal {} holds {} critical points",
                    e.petal, e.count
                ));
            }
        }
        for o in &self.orbits {
            let decided = o.fate.is_decided() || o.attracted_by_cycle;
            if decided && !o.landing.is_resolved() {
                out.push(format!(
                    "critical point {:.6}{:+.6}i ({}) has an infinite orbit",
                    o.point.re, o.point.im, o.fate
                ));
            }
        }
        out
    }

    /// Some critical orbit neither landed nor reached a decidable fate.
    pub fn undecided(&self) -> bool {
        self.orbits
            .iter()
            .any(|o| !o.fate.is_decided() && !o.attracted_by_cycle && !o.landing.is_resolved())
    }
}

/// First `m` with `|N^m(z) − target| < TAU_EXACT·(1+|target|)`, provided the
/// orbit jumps onto the target rather than converging to it.
fn exact_landing(
    engine: &OrbitEngine,
    z: Complex,
    target: Complex,
    max_steps: usize,
) -> Result<(usize, f64), f64> {
    let tau = TAU_EXACT * (1.0 + target.norm());
    let rho = RHO_APPROACH * (1.0 + target.norm());
    let mut w = z;
    let mut prev = f64::INFINITY;
    let mut closest = f64::INFINITY;
    for m in 0..=max_steps {
        let d = (w - target).norm();
        if d < tau {
            return if m == 0 || prev > rho {
                Ok((m, d))
            } else {
                Err(closest)
            };
        }
        if d >= rho {
            closest = closest.min(d);
        }
        prev = d;
        w = engine.spec.apply(w);
        if !w.is_finite() {
            break;
        }
    }
    Err(closest)
}

fn hits_pole(engine: &OrbitEngine, z: Complex, max_steps: usize) -> Option<usize> {
    let mut w = z;
    for m in 1..=max_steps {
        w = engine.spec.apply(w);
        if !w.is_finite() || w.norm() > 1e150 {
            return Some(m);
        }
    }
    None
}

/// An attracting cycle reached from `z`, as its points.
fn attracting_cycle(engine: &OrbitEngine, z: Complex, budget: usize) -> Option<Vec<Complex>> {
    let mut w = z;
    for _ in 0..budget.min(CYCLE_TRANSIENT) {
        w = engine.spec.apply(w);
        if !w.is_finite() {
            return None;
        }
    }
    let tol = 1e-9 * (1.0 + w.norm());
    let mut cycle = vec![w];
    let mut u = w;
    for _ in 1..=MAX_PERIOD {
        u = engine.spec.apply(u);
        if (u - w).norm() < tol {
            return Some(cycle);
        }
        cycle.push(u);
    }
    None
}

/// Fates, preperiods and landings of all free critical orbits.
pub fn analyze_critical_orbits(engine: &OrbitEngine, budget: usize) -> CriticalAnalysis {
    let scale = engine.spec.root_scale();
    let free: Vec<(Complex, usize)> = engine
        .critical
        .iter()
        .filter_map(|c| c.finite().map(|z| (z, c.local_degree)))
        .filter(|(z, _)| engine.roots.iter().all(|r| (z - r).norm() > 1e-7 * scale))
        .collect();

    let mut orbits: Vec<CriticalOrbit> = free
        .iter()
        .map(|&(point, local_degree)| {
            let (fate, steps) = engine.fate(point, budget);
            let preperiod = match fate {
                Fate::Petal(_) => component_preperiod(engine, point, budget, MAX_PREPERIOD),
                Fate::Root(_) => Some(steps),
                Fate::Undecided => None,
            };
            let immediate = matches!(fate, Fate::Petal(_)) && preperiod == Some(0);
            CriticalOrbit {
                point,
                local_degree,
                fate,
                steps,
                preperiod,
                immediate,
                landing: Landing::Unresolved {
                    closest: f64::INFINITY,
                },
                attracted_by_cycle: false,
            }
        })
        .collect();

    let census: Vec<CensusEntry> = (0..engine.petals.len())
        .map(|j| {
            let members: Vec<usize> = orbits
                .iter()
                .filter(|o| o.immediate && o.fate == Fate::Petal(j))
                .map(|o| o.local_degree)
                .collect();
            CensusEntry {
                petal: j,
                count: members.len(),
                local_degrees: members,
            }
        })
        .collect();
    let centers: Vec<Option<Complex>> = (0..engine.petals.len())
        .map(|j| {
            let mut it = orbits
                .iter()
                .filter(|o| o.immediate && o.fate == Fate::Petal(j));
            match (it.next(), it.next()) {
                (Some(o), None) => Some(o.point),
                _ => None,
            }
        })
        .collect();

    let free_points: Vec<Complex> = free.iter().map(|f| f.0).collect();
    for o in &mut orbits {
        o.landing = match o.fate {
            Fate::Root(i) => {
                let r = engine.roots[i];
                match exact_landing(engine, o.point, r, o.steps + 1) {
                    Ok((step, residual)) => Landing::Root {
                        index: i,
                        step,
                        residual,
                    },
                    Err(closest) => match hits_pole(engine, o.point, o.steps) {
                        Some(step) => Landing::Pole { step },
                        None => Landing::Unresolved { closest },
                    },
                }
            }
            Fate::Petal(j) => petal_landing(engine, o, j, centers[j], scale),
            Fate::Undecided => match hits_pole(engine, o.point, budget.min(CYCLE_TRANSIENT)) {
                Some(step) => Landing::Pole { step },
                None => match attracting_cycle(engine, o.point, budget) {
                    Some(cycle) => {
                        o.attracted_by_cycle = true;
                        cycle_landing(engine, o.point, &cycle, &free_points, budget)
                    }
                    None => Landing::Unresolved {
                        closest: f64::INFINITY,
                    },
                },
            },
        };
        if matches!(o.landing, Landing::Cycle { .. }) {
            o.attracted_by_cycle = false;
        }
    }

    CriticalAnalysis {
        orbits,
        census,
        centers,
        budget,
    }
}

fn petal_landing(
    engine: &OrbitEngine,
    o: &CriticalOrbit,
    petal: usize,
    center: Option<Complex>,
    scale: f64,
) -> Landing {
    let Some(center) = center else {
        return Landing::Unresolved {
            closest: f64::INFINITY,
        };
    };
    if o.immediate {
        return if center == o.point {
            Landing::Center {
                petal,
                step: 0,
                residual: 0.0,
            }
        } else {
            Landing::Unresolved {
                closest: (center - o.point).norm(),
            }
        };
    }
    let Some(m) = o.preperiod else {
        return Landing::Unresolved {
            closest: f64::INFINITY,
        };
    };
    let tol = TAU_LAND * scale.max(center.norm());
    let mut w = o.point;
    let mut closest = f64::INFINITY;
    for step in 1..=m + 1 {
        w = engine.spec.apply(w);
        if !w.is_finite() {
            return Landing::Pole { step };
        }
        let d = (w - center).norm();
        if d <= tol {
            return Landing::Center {
                petal,
                step,
                residual: d,
            };
        }
        closest = closest.min(d);
    }
    Landing::Unresolved { closest }
}

fn cycle_landing(
    engine: &OrbitEngine,
    start: Complex,
    cycle: &[Complex],
    critical: &[Complex],
    budget: usize,
) -> Landing {
    let period = cycle.len();
    let on_cycle: Vec<Complex> = critical
        .iter()
        .copied()
        .filter(|c| {
            cycle
                .iter()
                .any(|p| (p - c).norm() < 1e-6 * (1.0 + c.norm()))
        })
        .collect();
    let mut closest = f64::INFINITY;
    for target in on_cycle {
        match exact_landing(engine, start, target, budget.min(CYCLE_TRANSIENT)) {
            Ok((step, residual)) => {
                return Landing::Cycle {
                    period,
                    step,
                    residual,
                }
            }
            Err(c) => closest = closest.min(c),
        }
    }
    Landing::Unresolved { closest }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::dynamics::CaptureParams;
    use crate::newton::build_newton;

    fn analyze(p: &[f64], q: &Polynomial, budget: usize) -> CriticalAnalysis {
        let spec = build_newton(&Polynomial::from_real(p), q).unwrap();
        let engine = OrbitEngine::new(&spec, CaptureParams::default());
        analyze_critical_orbits(&engine, budget)
    }

    #[test]
    fn quarter_member_is_minimal() {
        let a = analyze(&[-0.25, 0.0, 1.0], &Polynomial::z(), 50_000);
        assert_eq!(a.orbits.len(), 1);
        assert_eq!(a.census[0].count, 1);
        assert_eq!(a.census[0].local_degrees, vec![2]);
        assert!(a.minimal(), "{:?}", a);
    }

    #[test]
    fn two_member_has_double_center() {
        let a = analyze(&[2.0, 0.0, 1.0], &Polynomial::z(), 50_000);
        assert_eq!(a.census[0].count, 1);
        assert_eq!(a.census[0].local_degrees, vec![3]);
        assert!(a.minimal());
    }

    #[test]
    fn generic_member_is_not_minimal() {
        let spec = build_newton(
            &Polynomial::new(vec![
                Complex::new(1.0, 1.0),
                Complex::new(0.0, 0.0),
                Complex::new(1.0, 0.0),
            ]),
            &Polynomial::z(),
        )
        .unwrap();
        let engine = OrbitEngine::new(&spec, CaptureParams::default());
        let a = analyze_critical_orbits(&engine, 50_000);
        assert!(!a.minimal());
    }

    #[test]
    fn superattracting_two_cycle_lands() {
        // z³ − 2z + 2: the critical point 0 lies on the cycle {0, 1}
        let a = analyze(&[2.0, -2.0, 0.0, 1.0], &Polynomial::zero(), 5_000);
        let zero = a.orbits.iter().find(|o| o.point.norm() < 1e-9).unwrap();
        assert!(matches!(
            zero.landing,
            Landing::Cycle {
                period: 2,
                step: 0,
                ..
            }
        ));
        assert!(a.minimal());
    }

    #[test]
    fn perturbed_cycle_is_a_violation() {
        let a = analyze(&[2.1, -2.0, 0.0, 1.0], &Polynomial::zero(), 5_000);
        assert!(!a.minimal());
        assert!(!a.failures().is_empty());
    }
}
