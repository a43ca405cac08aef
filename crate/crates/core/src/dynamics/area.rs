use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{default_budget, CaptureParams, Fate, OrbitEngine};
use crate::algebra::Complex;
use crate::newton::NewtonSpec;

/// Relative change between the last two areas below which the estimate is
/// called saturated.
pub const SATURATION_TOL: f64 = 0.01;

/// Pixels that a frontier pixel may bridge to, per axis.
const BRIDGE_REACH: isize = 2;
/// Segment samples per pixel of bridge length.
const BRIDGE_SAMPLES: usize = 8;

/// Pixel-count areas of one immediate basin clipped to growing disks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub radius_schedule: Vec<f64>,
    pub areas: Vec<f64>,
    pub saturated: bool,
    /// Pixels per side of the sampling grid over the largest disk.
    pub resolution: usize,
}

/// Area of the immediate basin of root `root_index` inside `|z| ≤ R` for each
/// `R` in `radii`.
///
/// One grid covers the largest disk; the component containing the root is
/// flood filled with fates evaluated on demand, and each radius counts the
/// component pixels whose centers lie in its disk. Frontier pixels also join
/// same-fate pixels up to two cells away when the segment between their
/// centers stays in the basin, so channels thinner than a pixel stay
/// connected.
pub fn estimate_basin_area(
    spec: &NewtonSpec,
    root_index: usize,
    radii: &[f64],
    resolution: usize,
) -> AreaEstimate {
    let mut schedule: Vec<f64> = radii.iter().copied().filter(|r| *r > 0.0).collect();
    schedule.sort_by(f64::total_cmp);
    let n = resolution.max(1);
    let Some(&r_max) = schedule.last() else {
        return AreaEstimate {
            radius_schedule: schedule,
            areas: Vec::new(),
            saturated: false,
            resolution: n,
        };
    };
    let engine = OrbitEngine::new(spec, CaptureParams::default());
    let budget = default_budget(spec);
    let target = Fate::Root(root_index);
    let cell = 2.0 * r_max / n as f64;
    let center = |idx: usize| {
        Complex::new(
            -r_max + ((idx % n) as f64 + 0.5) * cell,
            -r_max + ((idx / n) as f64 + 0.5) * cell,
        )
    };
    let mut fates: Vec<Option<bool>> = vec![None; n * n];
    let mut is_target = |idx: usize| {
        *fates[idx].get_or_insert_with(|| engine.fate(center(idx), budget).0 == target)
    };
    let mut in_component = vec![false; n * n];
    let mut queue = VecDeque::new();
    let mut frontier = Vec::new();
    if let Some(&root) = engine.roots.get(root_index) {
        if root.re.abs() < r_max && root.im.abs() < r_max {
            let c = (((root.re + r_max) / cell) as usize).min(n - 1);
            let r = (((root.im + r_max) / cell) as usize).min(n - 1);
            let start = r * n + c;
            if is_target(start) {
                in_component[start] = true;
                queue.push_back(start);
            }
        }
    }
    loop {
        while let Some(idx) = queue.pop_front() {
            let (c, r) = (idx % n, idx / n);
            let nbrs = [
                (c > 0).then(|| idx - 1),
                (c + 1 < n).then(|| idx + 1),
                (r > 0).then(|| idx - n),
                (r + 1 < n).then(|| idx + n),
            ];
            let mut on_edge = false;
            for nb in nbrs.into_iter().flatten() {
                if in_component[nb] {
                    continue;
                }
                if is_target(nb) {
                    in_component[nb] = true;
                    queue.push_back(nb);
                } else {
                    on_edge = true;
                }
            }
            if on_edge {
                frontier.push(idx);
            }
        }
        // bridge thin channels that pass between pixel centers
        for idx in frontier.drain(..) {
            let (c, r) = ((idx % n) as isize, (idx / n) as isize);
            for dr in -BRIDGE_REACH..=BRIDGE_REACH {
                for dc in -BRIDGE_REACH..=BRIDGE_REACH {
                    let (cc, rr) = (c + dc, r + dr);
                    if dc.abs() + dr.abs() <= 1
                        || cc < 0
                        || rr < 0
                        || cc >= n as isize
                        || rr >= n as isize
                    {
                        continue;
                    }
                    let nb = rr as usize * n + cc as usize;
                    if in_component[nb] || !is_target(nb) {
                        continue;
                    }
                    let (a, b) = (center(idx), center(nb));
                    let steps = BRIDGE_SAMPLES * (dc.abs() + dr.abs()) as usize;
                    let joined = (1..steps).all(|i| {
                        let t = i as f64 / steps as f64;
                        engine.fate(a + (b - a) * t, budget).0 == target
                    });
                    if joined {
                        in_component[nb] = true;
                        queue.push_back(nb);
                    }
                }
            }
        }
        if queue.is_empty() {
            break;
        }
    }

    let pixel_area = cell * cell;
    let mut counts = vec![0usize; schedule.len()];
    for idx in (0..n * n).filter(|&i| in_component[i]) {
        let d = center(idx).norm();
        for (k, &rad) in schedule.iter().enumerate() {
            if d <= rad {
                counts[k] += 1;
            }
        }
    }
    let areas: Vec<f64> = counts.iter().map(|&c| c as f64 * pixel_area).collect();
    let saturated = match areas.as_slice() {
        [.., a, b] if *b > 0.0 => (b - a).abs() / b < SATURATION_TOL,
        _ => false,
    };
    AreaEstimate {
        radius_schedule: schedule,
        areas,
        saturated,
        resolution: n,
    }
}
