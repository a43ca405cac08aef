use std::collections::VecDeque;

use super::{CaptureParams, DynamicsError, Fate, OrbitEngine};
use crate::algebra::Complex;
use crate::newton::NewtonSpec;

/// Interior samples on the straight segment tested before flood filling.
const SEGMENT_SAMPLES: usize = 64;
/// Side length in pixels of the local flood-fill grid.
const FLOOD_RES: usize = 48;
/// Iteration cap for the probe points of segment and flood-fill tests.
const PROBE_BUDGET: usize = 2_000;
/// Largest preperiod searched for.
pub(crate) const MAX_PREPERIOD: usize = 24;

/// Cheap sufficient test for membership in an immediate basin: inside the
/// capture disk of a root, or far out along a petal direction.
fn obviously_immediate(engine: &OrbitEngine, z: Complex, fate: Fate) -> bool {
    match fate {
        Fate::Root(i) => {
            (z - engine.roots[i]).norm() < engine.caps.tau_capture * engine.spec.root_scale()
        }
        Fate::Petal(j) => z.norm() > engine.r_petal && engine.petal_of(z) == Some(j),
        Fate::Undecided => false,
    }
}

/// Whether `a` and `b` lie in one Fatou component of the same fate.
///
/// Tries the straight segment first, then a lazily evaluated flood fill on a
/// local square grid around both points. A `false` answer is heuristic when
/// the connecting path leaves that square.
pub fn same_component(engine: &OrbitEngine, a: Complex, b: Complex, budget: usize) -> bool {
    let fa = engine.fate(a, budget).0;
    if fa == Fate::Undecided || engine.fate(b, budget).0 != fa {
        return false;
    }
    let probe = budget.min(PROBE_BUDGET);
    let on_segment = (1..=SEGMENT_SAMPLES).all(|i| {
        let t = i as f64 / (SEGMENT_SAMPLES + 1) as f64;
        engine.fate(a + (b - a) * t, probe).0 == fa
    });
    on_segment || flood_connects(engine, a, b, fa, probe)
}

fn flood_connects(engine: &OrbitEngine, a: Complex, b: Complex, fate: Fate, budget: usize) -> bool {
    let mid = (a + b) / 2.0;
    let side = 2.0 * (a - b).norm().max(1e-9 * engine.scale);
    let n = FLOOD_RES;
    let origin = mid - Complex::new(side / 2.0, side / 2.0);
    let cell = side / n as f64;
    let to_pixel = |z: Complex| {
        let c = (((z.re - origin.re) / cell) as usize).min(n - 1);
        let r = (((z.im - origin.im) / cell) as usize).min(n - 1);
        r * n + c
    };
    let center = |idx: usize| {
        origin
            + Complex::new(
                ((idx % n) as f64 + 0.5) * cell,
                ((idx / n) as f64 + 0.5) * cell,
            )
    };
    let start = to_pixel(a);
    let target = to_pixel(b);
    let mut seen = vec![false; n * n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(idx) = queue.pop_front() {
        if idx == target {
            return true;
        }
        let (c, r) = (idx % n, idx / n);
        let mut nbrs = [usize::MAX; 4];
        if c > 0 {
            nbrs[0] = idx - 1;
        }
        if c + 1 < n {
            nbrs[1] = idx + 1;
        }
        if r > 0 {
            nbrs[2] = idx - n;
        }
        if r + 1 < n {
            nbrs[3] = idx + n;
        }
        for nb in nbrs.into_iter().filter(|&nb| nb != usize::MAX) {
            if seen[nb] {
                continue;
            }
            seen[nb] = true;
            if nb == target || engine.fate(center(nb), budget).0 == fate {
                queue.push_back(nb);
            }
        }
    }
    false
}

/// Whether `z` lies in an immediate basin (a forward-invariant component).
pub fn is_immediate(engine: &OrbitEngine, z: Complex, budget: usize) -> bool {
    let fate = engine.fate(z, budget).0;
    if fate == Fate::Undecided {
        return false;
    }
    if obviously_immediate(engine, z, fate) {
        return true;
    }
    let w = engine.spec.apply(z);
    w.is_finite() && same_component(engine, z, w, budget)
}

/// Smallest `m` with `N^m(z)` in an immediate basin, up to `max`.
pub fn component_preperiod(
    engine: &OrbitEngine,
    z: Complex,
    budget: usize,
    max: usize,
) -> Option<usize> {
    let mut w = z;
    for m in 0..=max {
        if is_immediate(engine, w, budget) {
            return Some(m);
        }
        w = engine.spec.apply(w);
        if !w.is_finite() {
            return None;
        }
    }
    None
}

/// Solves `N^m(z) = target` by Newton's method from `start`.
fn pull_back(engine: &OrbitEngine, start: Complex, m: usize, target: Complex) -> Option<Complex> {
    let mut z = start;
    for _ in 0..60 {
        let mut w = z;
        let mut dw = Complex::new(1.0, 0.0);
        for _ in 0..m {
            dw *= engine.spec.derivative(w);
            w = engine.spec.apply(w);
        }
        let step = (w - target) / dw;
        if !step.is_finite() {
            return None;
        }
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// Center of the Fatou component containing `seed`.
///
/// Immediate root basins have the root as center. An immediate basin of
/// infinity has the critical point of that basin as center. A strictly
/// preperiodic component has the preimage of its immediate center under
/// `N^m`.
pub fn find_center(
    spec: &NewtonSpec,
    seed: Complex,
    budget: usize,
) -> Result<Complex, DynamicsError> {
    let engine = OrbitEngine::new(spec, CaptureParams::default());
    let fate = engine.fate(seed, budget).0;
    let immediate_center = match fate {
        Fate::Root(i) => engine.roots[i],
        Fate::Petal(j) => petal_center(&engine, j, budget).ok_or(DynamicsError::NoCenter)?,
        Fate::Undecided => return Err(DynamicsError::NoCenter),
    };
    let m = component_preperiod(&engine, seed, budget, super::component::MAX_PREPERIOD)
        .ok_or(DynamicsError::NoCenter)?;
    if m == 0 {
        return Ok(immediate_center);
    }
    let z = pull_back(&engine, seed, m, immediate_center).ok_or(DynamicsError::NoCenter)?;
    if same_component(&engine, seed, z, budget) {
        Ok(z)
    } else {
        Err(DynamicsError::NoCenter)
    }
}

/// The first free critical point (lexicographically) lying in the immediate
/// basin of petal `j`.
pub(crate) fn petal_center(engine: &OrbitEngine, j: usize, budget: usize) -> Option<Complex> {
    let scale = engine.spec.root_scale();
    engine
        .critical
        .iter()
        .filter_map(|c| c.finite())
        .filter(|c| engine.roots.iter().all(|r| (c - r).norm() > 1e-7 * scale))
        .find(|&c| engine.fate(c, budget).0 == Fate::Petal(j) && is_immediate(engine, c, budget))
}
