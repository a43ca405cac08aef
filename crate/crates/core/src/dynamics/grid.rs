use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{CaptureParams, Fate, OrbitEngine};
use crate::algebra::Complex;
use crate::newton::NewtonSpec;

/// Axis-aligned rectangle in the plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    #[serde(with = "crate::algebra::complex_pair")]
    pub center: Complex,
    pub width: f64,
    pub height: f64,
}

impl Viewport {
    pub fn new(center: Complex, width: f64, height: f64) -> Self {
        Self {
            center,
            width: width.abs(),
            height: height.abs(),
        }
    }

    /// Columns and rows actually sampled: a zero extent collapses to one.
    pub fn effective_resolution(&self, resolution: (usize, usize)) -> (usize, usize) {
        let w = if self.width == 0.0 { 1 } else { resolution.0 };
        let h = if self.height == 0.0 { 1 } else { resolution.1 };
        (w, h)
    }

    /// Center of pixel `(col, row)`; row 0 is the top edge.
    pub fn pixel_center(&self, resolution: (usize, usize), col: usize, row: usize) -> Complex {
        let (w, h) = resolution;
        let x = self.center.re - self.width / 2.0 + (col as f64 + 0.5) * self.width / w as f64;
        let y = self.center.im + self.height / 2.0 - (row as f64 + 0.5) * self.height / h as f64;
        Complex::new(x, y)
    }

    /// Pixel containing `z`, if inside the viewport.
    pub fn pixel_of(&self, resolution: (usize, usize), z: Complex) -> Option<(usize, usize)> {
        let (w, h) = resolution;
        let fx = if self.width == 0.0 {
            0.5
        } else {
            (z.re - (self.center.re - self.width / 2.0)) / self.width
        };
        let fy = if self.height == 0.0 {
            0.5
        } else {
            ((self.center.im + self.height / 2.0) - z.im) / self.height
        };
        if !(0.0..=1.0).contains(&fx) || !(0.0..=1.0).contains(&fy) {
            return None;
        }
        let col = ((fx * w as f64) as usize).min(w - 1);
        let row = ((fy * h as f64) as usize).min(h - 1);
        Some((col, row))
    }
}

/// Per-pixel fates over a viewport, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinGrid {
    pub viewport: Viewport,
    pub resolution: (usize, usize),
    pub labels: Vec<Fate>,
    pub iterations: Vec<u32>,
    pub budget: usize,
    pub caps: CaptureParams,
    #[serde(with = "crate::algebra::complex_vec")]
    pub roots: Vec<Complex>,
    pub petals: Vec<f64>,
}

impl BasinGrid {
    #[inline]
    pub fn label(&self, col: usize, row: usize) -> Fate {
        self.labels[row * self.resolution.0 + col]
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Complex {
        self.viewport.pixel_center(self.resolution, col, row)
    }

    /// Distinct labels in ascending order.
    pub fn present_labels(&self) -> Vec<Fate> {
        let mut v = self.labels.clone();
        v.sort();
        v.dedup();
        v
    }

    /// Fraction of pixels carrying each present label.
    pub fn label_fractions(&self) -> Vec<(Fate, f64)> {
        let total = self.labels.len().max(1) as f64;
        self.present_labels()
            .into_iter()
            .map(|l| {
                let count = self.labels.iter().filter(|&&x| x == l).count();
                (l, count as f64 / total)
            })
            .collect()
    }
}

fn classify_rows(
    engine: &OrbitEngine,
    viewport: &Viewport,
    res: (usize, usize),
    budget: usize,
) -> Vec<(Fate, u32)> {
    let row = |j: usize| -> Vec<(Fate, u32)> {
        (0..res.0)
            .map(|i| {
                let (fate, steps) = engine.fate(viewport.pixel_center(res, i, j), budget);
                (fate, steps.min(u32::MAX as usize) as u32)
            })
            .collect()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..res.1).into_par_iter().flat_map_iter(row).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..res.1).flat_map(row).collect()
    }
}

/// Classifies every pixel center of the viewport.
pub fn basin_grid(
    spec: &NewtonSpec,
    viewport: Viewport,
    resolution: (usize, usize),
    budget: usize,
) -> BasinGrid {
    basin_grid_with(spec, viewport, resolution, budget, CaptureParams::default())
}

pub fn basin_grid_with(
    spec: &NewtonSpec,
    viewport: Viewport,
    resolution: (usize, usize),
    budget: usize,
    caps: CaptureParams,
) -> BasinGrid {
    let res = viewport.effective_resolution(resolution);
    let engine = OrbitEngine::new(spec, caps);
    let cells = if res.0 == 0 || res.1 == 0 {
        Vec::new()
    } else {
        classify_rows(&engine, &viewport, res, budget)
    };
    let (labels, iterations) = cells.into_iter().unzip();
    BasinGrid {
        viewport,
        resolution: res,
        labels,
        iterations,
        budget,
        caps,
        roots: engine.roots.clone(),
        petals: engine.petals.clone(),
    }
}

/// Component structure of one label on a grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    /// Number of 4-connected components of the label.
    pub components: usize,
    /// Whether the immediate component reaches the viewport edge.
    pub touches_boundary: bool,
}

/// Labels each 4-connected component of `label`; returns the component id
/// per pixel (`usize::MAX` for other labels) and the component count.
fn components_of(grid: &BasinGrid, label: Fate) -> (Vec<usize>, usize) {
    let (w, h) = grid.resolution;
    let mut comp = vec![usize::MAX; w * h];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..w * h {
        if grid.labels[start] != label || comp[start] != usize::MAX {
            continue;
        }
        comp[start] = count;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (c, r) = (idx % w, idx / w);
            let mut visit = |n: usize| {
                if grid.labels[n] == label && comp[n] == usize::MAX {
                    comp[n] = count;
                    queue.push_back(n);
                }
            };
            if c > 0 {
                visit(idx - 1);
            }
            if c + 1 < w {
                visit(idx + 1);
            }
            if r > 0 {
                visit(idx - w);
            }
            if r + 1 < h {
                visit(idx + w);
            }
        }
        count += 1;
    }
    (comp, count)
}

/// Pixel anchoring the immediate component of `label`: the pixel nearest the
/// root for root labels, the label pixel farthest along the petal direction
/// for petal labels.
fn anchor_pixel(grid: &BasinGrid, label: Fate) -> Option<usize> {
    let (w, _) = grid.resolution;
    let candidates = grid
        .labels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == label)
        .map(|(idx, _)| (idx, grid.pixel_center(idx % w, idx / w)));
    match label {
        Fate::Root(i) => {
            let r = *grid.roots.get(i)?;
            candidates
                .min_by(|a, b| (a.1 - r).norm().total_cmp(&(b.1 - r).norm()))
                .map(|(idx, _)| idx)
        }
        Fate::Petal(j) => {
            let dir = Complex::from_polar(1.0, *grid.petals.get(j)?);
            candidates
                .max_by(|a, b| {
                    let pa = (a.1 * dir.conj()).re;
                    let pb = (b.1 * dir.conj()).re;
                    pa.total_cmp(&pb).then(b.0.cmp(&a.0))
                })
                .map(|(idx, _)| idx)
        }
        Fate::Undecided => candidates.map(|(idx, _)| idx).next(),
    }
}

/// Heuristic connectivity witness for one label restricted to the viewport.
pub fn connectivity_probe(grid: &BasinGrid, label: Fate) -> ConnectivityReport {
    let (w, h) = grid.resolution;
    let (comp, components) = components_of(grid, label);
    let touches_boundary = anchor_pixel(grid, label)
        .map(|a| {
            let id = comp[a];
            (0..w * h).any(|idx| {
                let (c, r) = (idx % w, idx / w);
                comp[idx] == id && (c == 0 || r == 0 || c + 1 == w || r + 1 == h)
            })
        })
        .unwrap_or(false);
    ConnectivityReport {
        components,
        touches_boundary,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::newton::build_newton;

    fn synthetic(w: usize, h: usize, f: impl Fn(usize, usize) -> Fate) -> BasinGrid {
        let labels = (0..w * h).map(|idx| f(idx % w, idx / w)).collect();
        BasinGrid {
            viewport: Viewport::new(Complex::new(0.0, 0.0), 2.0, 2.0),
            resolution: (w, h),
            labels,
            iterations: vec![0; w * h],
            budget: 0,
            caps: CaptureParams::default(),
            roots: vec![Complex::new(0.0, 0.0)],
            petals: vec![],
        }
    }

    #[test]
    fn checkerboard_components() {
        let g = synthetic(8, 8, |c, r| {
            if (c + r) % 2 == 0 {
                Fate::Root(0)
            } else {
                Fate::Undecided
            }
        });
        assert_eq!(connectivity_probe(&g, Fate::Root(0)).components, 32);
    }

    #[test]
    fn uniform_grid_single_component() {
        let g = synthetic(5, 7, |_, _| Fate::Root(0));
        let rep = connectivity_probe(&g, Fate::Root(0));
        assert_eq!(rep.components, 1);
        assert!(rep.touches_boundary);
    }

    #[test]
    fn pixel_geometry() {
        let v = Viewport::new(Complex::new(0.0, 0.0), 4.0, 2.0);
        let z = v.pixel_center((4, 2), 0, 0);
        assert_eq!(z, Complex::new(-1.5, 0.5));
        assert_eq!(v.pixel_of((4, 2), z), Some((0, 0)));
        assert_eq!(v.pixel_of((4, 2), Complex::new(5.0, 0.0)), None);
    }

    #[test]
    fn zero_width_is_single_column() {
        let spec = build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap();
        let g = basin_grid(
            &spec,
            Viewport::new(Complex::new(0.5, 0.0), 0.0, 2.0),
            (10, 6),
            200,
        );
        assert_eq!(g.resolution, (1, 6));
        assert_eq!(g.labels.len(), 6);
    }

    #[test]
    fn cubic_grid_has_three_root_basins() {
        let spec = build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap();
        let g = basin_grid(
            &spec,
            Viewport::new(Complex::new(0.0, 0.0), 4.0, 4.0),
            (60, 60),
            5000,
        );
        let labels = g.present_labels();
        for i in 0..3 {
            assert!(labels.contains(&Fate::Root(i)));
        }
        let idx_one = 2;
        assert!(connectivity_probe(&g, Fate::Root(idx_one)).touches_boundary);
    }
}
