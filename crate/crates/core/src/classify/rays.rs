use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ClassifyError;
use crate::algebra::{chordal_finite, poly_roots, roots::raw_roots, Complex, TAU_CLUSTER};
use crate::newton::{critical_points, NewtonSpec};

/// Hausdorff tolerance for ray invariance, in the chordal metric.
pub const TAU_RAY: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayOptions {
    pub tau_ray: f64,
    /// Largest number of fundamental arcs before giving up.
    pub max_arcs: usize,
    /// Points on the seed arc next to the fixed point.
    pub seed_points: usize,
    /// Largest chordal length of a polyline segment.
    pub max_segment: f64,
    /// Modulus at which the ray is truncated; defaults to ten times the
    /// scale of the finite structure.
    pub escape_radius: Option<f64>,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self {
            tau_ray: TAU_RAY,
            max_arcs: 200,
            seed_points: 24,
            max_segment: 0.01,
            escape_radius: None,
        }
    }
}

/// A fixed internal ray of a superattracting basin, as a polyline from near
/// the fixed point out to the escape radius.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ray {
    /// Index of the basin (lexicographic root order).
    pub basin: usize,
    #[serde(with = "crate::algebra::complex_pair")]
    pub fixed_point: Complex,
    pub local_degree: usize,
    pub index: usize,
    /// Böttcher angle `index/(k−1)` in turns.
    pub angle: f64,
    #[serde(with = "crate::algebra::complex_vec")]
    pub points: Vec<Complex>,
    /// Argument of the outermost point.
    pub asymptotic_angle: f64,
    /// Chordal Hausdorff distance between the ray and its image on the
    /// overlapping part.
    pub invariance_residual: f64,
    pub arcs: usize,
}

impl Ray {
    pub fn invariant(&self, tau: f64) -> bool {
        self.invariance_residual <= tau
    }
}

struct BasinData {
    index: usize,
    fixed_point: Complex,
    k: usize,
    /// Leading coefficient of `N(ξ+h) − ξ ≈ a h^k`.
    a: Complex,
    /// Distance from the fixed point to the nearest other special point.
    r_local: f64,
    scale: f64,
}

/// Finite critical points with their local degrees.
type Critical = Vec<(Complex, usize)>;

fn special_points(spec: &NewtonSpec) -> Result<(Vec<Complex>, Critical), ClassifyError> {
    let crit: Critical = critical_points(spec, TAU_CLUSTER)?
        .iter()
        .filter_map(|c| c.finite().map(|z| (z, c.local_degree)))
        .collect();
    let poles = if spec.map.den.deg() >= 1 {
        poly_roots(&spec.map.den, TAU_CLUSTER)
            .map_err(crate::newton::NewtonError::from)?
            .iter()
            .map(|r| r.value)
            .collect()
    } else {
        Vec::new()
    };
    Ok((poles, crit))
}

fn basin_data(spec: &NewtonSpec, fixed_point: Complex) -> Result<BasinData, ClassifyError> {
    if spec.n != 0 {
        return Err(ClassifyError::NotPolynomialNewton);
    }
    let root_scale = spec.root_scale();
    let index = spec
        .roots
        .iter()
        .position(|r| (r.value - fixed_point).norm() <= 1e-6 * root_scale)
        .ok_or(ClassifyError::UnknownBasin { point: fixed_point })?;
    let xi = spec.roots[index].value;
    let (poles, crit) = special_points(spec)?;
    let k = crit
        .iter()
        .find(|(z, _)| (z - xi).norm() <= 1e-6 * root_scale)
        .map(|&(_, k)| k)
        .ok_or(ClassifyError::NotSuperattracting { point: xi })?;
    let scale = crit
        .iter()
        .map(|c| c.0)
        .chain(poles.iter().copied())
        .chain(spec.roots.iter().map(|r| r.value))
        .map(|z| z.norm())
        .fold(1.0, f64::max);
    let r_local = crit
        .iter()
        .map(|c| c.0)
        .chain(poles.iter().copied())
        .chain(spec.roots.iter().map(|r| r.value))
        .map(|z| (z - xi).norm())
        .filter(|&d| d > 1e-6 * root_scale)
        .fold(1.0, f64::min);
    let h = 1e-3 * r_local;
    let a = (0..8)
        .map(|j| {
            let hz = Complex::from_polar(h, PI * j as f64 / 4.0);
            (spec.apply(xi + hz) - xi) / hz.powu(k as u32)
        })
        .sum::<Complex>()
        / 8.0;
    Ok(BasinData {
        index,
        fixed_point: xi,
        k,
        a,
        r_local,
        scale,
    })
}

/// Preimage of `w` nearest to `pred`, rejected when the runner-up is within
/// the relative `margin`.
fn preimage(
    spec: &NewtonSpec,
    w: Complex,
    pred: Complex,
    margin: f64,
) -> Result<Complex, ClassifyError> {
    let eq = &spec.map.num - &spec.map.den.scale(w);
    let roots = raw_roots(&eq).map_err(crate::newton::NewtonError::from)?;
    let mut by_dist: Vec<(f64, Complex)> = roots.iter().map(|&z| ((z - pred).norm(), z)).collect();
    by_dist.sort_by(|a, b| a.0.total_cmp(&b.0));
    match by_dist.as_slice() {
        [] => Err(ClassifyError::BranchAmbiguity { near: pred }),
        [(_, z)] => Ok(*z),
        [(d1, z), (d2, _), ..] => {
            if d2 - d1 < margin * d2 {
                Err(ClassifyError::BranchAmbiguity { near: pred })
            } else {
                Ok(*z)
            }
        }
    }
}

struct Tracer<'a> {
    spec: &'a NewtonSpec,
    margin: f64,
    max_segment: f64,
}

impl Tracer<'_> {
    fn refine(
        &self,
        (wa, wb): (Complex, Complex),
        (za, zb): (Complex, Complex),
        depth: usize,
        out: &mut Vec<Complex>,
    ) -> Result<(), ClassifyError> {
        if depth == 0 || chordal_finite(za, zb) <= self.max_segment {
            return Ok(());
        }
        let wm = (wa + wb) / 2.0;
        let zm = preimage(self.spec, wm, (za + zb) / 2.0, self.margin)?;
        self.refine((wa, wm), (za, zm), depth - 1, out)?;
        out.push(zm);
        self.refine((wm, wb), (zm, zb), depth - 1, out)
    }

    /// Pulls an arc back along the branch continuing from `start`.
    fn pull_arc(&self, arc: &[Complex], start: Complex) -> Result<Vec<Complex>, ClassifyError> {
        let mut out: Vec<Complex> = Vec::with_capacity(arc.len());
        let mut pred = start;
        for (i, &w) in arc.iter().enumerate() {
            let z = preimage(self.spec, w, pred, self.margin)?;
            if let Some(&prev) = out.last() {
                self.refine((arc[i - 1], w), (prev, z), 8, &mut out)?;
            }
            let n = out.len();
            pred = if n >= 1 { z + (z - out[n - 1]) } else { z };
            out.push(z);
        }
        Ok(out)
    }
}

/// Chordal distance from `z` to the segment `[a, b]`, using the Euclidean
/// foot point.
fn distance_to_segment(z: Complex, a: Complex, b: Complex) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((z - a) * ab.conj()).re / len2).clamp(0.0, 1.0)
    };
    chordal_finite(z, a + ab * t)
}

fn distance_to_polyline(z: Complex, poly: &[Complex]) -> f64 {
    if poly.len() == 1 {
        return chordal_finite(z, poly[0]);
    }
    poly.windows(2)
        .map(|s| distance_to_segment(z, s[0], s[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Chordal Hausdorff distance between `N(ray beyond the seed arc)` and the
/// part of the ray covered by that image, which ends before the
/// second-to-last arc.
fn invariance_residual(
    spec: &NewtonSpec,
    points: &[Complex],
    seed_len: usize,
    inner_end: usize,
) -> f64 {
    let outer = &points[seed_len.min(points.len())..];
    let inner = &points[..inner_end.clamp(1, points.len())];
    let mut samples: Vec<Complex> = outer.to_vec();
    samples.extend(outer.windows(2).map(|s| (s[0] + s[1]) / 2.0));
    let image: Vec<Complex> = outer.iter().map(|&z| spec.apply(z)).collect();
    let forward = samples
        .iter()
        .map(|&z| distance_to_polyline(spec.apply(z), points))
        .fold(0.0, f64::max);
    let backward = if image.is_empty() {
        0.0
    } else {
        inner
            .iter()
            .map(|&z| distance_to_polyline(z, &image))
            .fold(0.0, f64::max)
    };
    forward.max(backward)
}

fn trace(
    spec: &NewtonSpec,
    basin: &BasinData,
    index: usize,
    opts: &RayOptions,
) -> Result<Ray, ClassifyError> {
    let k = basin.k;
    if index + 1 >= k {
        return Err(ClassifyError::RayIndexOutOfRange { index, k });
    }
    let xi = basin.fixed_point;
    let theta = (2.0 * PI * index as f64 - basin.a.arg()) / (k - 1) as f64;
    let dir = Complex::from_polar(1.0, theta);
    let rho0 = 1e-4 * basin.r_local;
    let rho1 = (rho0 / basin.a.norm()).powf(1.0 / k as f64);
    let escape = opts.escape_radius.unwrap_or(10.0 * basin.scale);
    let m = opts.seed_points.max(2);
    let seed: Vec<Complex> = (0..m)
        .map(|i| xi + dir * rho0 * (rho1 / rho0).powf(i as f64 / (m - 1) as f64))
        .collect();
    let tracer = Tracer {
        spec,
        margin: 10.0 * opts.tau_ray,
        max_segment: opts.max_segment,
    };
    let mut points = seed[..m - 1].to_vec();
    let seed_len = points.len();
    let mut arc = seed;
    let mut arcs = 0;
    let mut arc_starts = vec![0];
    loop {
        if arcs >= opts.max_arcs {
            return Err(ClassifyError::BudgetExhausted { arcs });
        }
        let start = *arc.last().unwrap();
        let next = tracer.pull_arc(&arc, start)?;
        arcs += 1;
        arc_starts.push(points.len());
        if let Some(cut) = next.iter().position(|z| z.norm() > escape) {
            points.extend_from_slice(&next[..=cut]);
            break;
        }
        points.extend_from_slice(&next);
        arc = next;
    }
    let asymptotic_angle = points.last().map_or(0.0, |z| z.arg());
    let inner_end = arc_starts[arc_starts.len().saturating_sub(2)].max(seed_len);
    let invariance = invariance_residual(spec, &points, seed_len, inner_end);
    Ok(Ray {
        basin: basin.index,
        fixed_point: xi,
        local_degree: k,
        index,
        angle: index as f64 / (k - 1) as f64,
        points,
        asymptotic_angle,
        invariance_residual: invariance,
        arcs,
    })
}

/// Traces fixed internal ray `ray_index` of the basin of `basin_fixed_point`
/// by inverse iteration with nearest-branch selection.
pub fn boettcher_ray(
    spec: &NewtonSpec,
    basin_fixed_point: Complex,
    ray_index: usize,
    max_arcs: usize,
) -> Result<Ray, ClassifyError> {
    let basin = basin_data(spec, basin_fixed_point)?;
    let opts = RayOptions {
        max_arcs,
        ..RayOptions::default()
    };
    trace(spec, &basin, ray_index, &opts)
}

/// Rays of one basin of a channel diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinRays {
    #[serde(with = "crate::algebra::complex_pair")]
    pub fixed_point: Complex,
    pub local_degree: usize,
    pub rays: Vec<Ray>,
    /// Errors of rays that could not be traced.
    pub errors: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayRef {
    pub basin: usize,
    pub ray: usize,
}

/// All fixed internal rays of a polynomial Newton map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelDiagram {
    pub basins: Vec<BasinRays>,
    /// Rays in counterclockwise order of their asymptotic angles; neighbours
    /// are adjacent at infinity.
    pub cyclic_order: Vec<RayRef>,
    /// Every ray was traced to the escape radius.
    pub complete: bool,
    pub tau_ray: f64,
}

impl ChannelDiagram {
    pub fn ray_count(&self) -> usize {
        self.basins.iter().map(|b| b.rays.len()).sum()
    }

    pub fn ray(&self, r: RayRef) -> Option<&Ray> {
        self.basins
            .get(r.basin)?
            .rays
            .iter()
            .find(|x| x.index == r.ray)
    }

    /// Consecutive pairs in the cyclic order at infinity.
    pub fn adjacency(&self) -> Vec<(RayRef, RayRef)> {
        let n = self.cyclic_order.len();
        if n < 2 {
            return Vec::new();
        }
        (0..n)
            .map(|i| (self.cyclic_order[i], self.cyclic_order[(i + 1) % n]))
            .collect()
    }

    pub fn all_invariant(&self) -> bool {
        self.basins
            .iter()
            .flat_map(|b| &b.rays)
            .all(|r| r.invariant(self.tau_ray))
    }
}

/// Traces all `Σ(kᵢ−1)` fixed rays.
pub fn channel_diagram(spec: &NewtonSpec) -> Result<ChannelDiagram, ClassifyError> {
    channel_diagram_with(spec, &RayOptions::default())
}

pub fn channel_diagram_with(
    spec: &NewtonSpec,
    opts: &RayOptions,
) -> Result<ChannelDiagram, ClassifyError> {
    if spec.n != 0 {
        return Err(ClassifyError::NotPolynomialNewton);
    }
    let mut basins = Vec::new();
    let mut complete = true;
    for root in &spec.roots {
        let data = basin_data(spec, root.value)?;
        let mut rays = Vec::new();
        let mut errors = Vec::new();
        for j in 0..data.k - 1 {
            match trace(spec, &data, j, opts) {
                Ok(r) => rays.push(r),
                Err(e) => {
                    complete = false;
                    errors.push(format!("ray {j}: {e}"));
                }
            }
        }
        basins.push(BasinRays {
            fixed_point: data.fixed_point,
            local_degree: data.k,
            rays,
            errors,
        });
    }
    let mut order: Vec<(f64, RayRef)> = basins
        .iter()
        .enumerate()
        .flat_map(|(b, br)| {
            br.rays.iter().map(move |r| {
                (
                    r.asymptotic_angle.rem_euclid(2.0 * PI),
                    RayRef {
                        basin: b,
                        ray: r.index,
                    },
                )
            })
        })
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ChannelDiagram {
        basins,
        cyclic_order: order.into_iter().map(|o| o.1).collect(),
        complete,
        tau_ray: opts.tau_ray,
    })
}

/// One marked ray.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkedRay {
    pub basin: usize,
    pub ray: usize,
    #[serde(with = "crate::algebra::complex_pair")]
    pub fixed_point: Complex,
    pub local_degree: usize,
    pub asymptotic_angle: f64,
}

/// At most one marked ray per basin.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Marking {
    /// Per basin, the marked ray index.
    pub marked: Vec<Option<usize>>,
    pub rays: Vec<MarkedRay>,
}

impl Marking {
    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }
}

pub fn make_marking(
    diagram: &ChannelDiagram,
    choices: &[(usize, usize)],
) -> Result<Marking, ClassifyError> {
    let mut marked = vec![None; diagram.basins.len()];
    let mut rays = Vec::new();
    for &(basin, ray) in choices {
        let b = diagram
            .basins
            .get(basin)
            .ok_or(ClassifyError::UnknownRay { basin, ray })?;
        let r = b
            .rays
            .iter()
            .find(|r| r.index == ray)
            .ok_or(ClassifyError::UnknownRay { basin, ray })?;
        if marked[basin].is_some() {
            return Err(ClassifyError::DuplicateBasin { basin });
        }
        marked[basin] = Some(ray);
        rays.push(MarkedRay {
            basin,
            ray,
            fixed_point: b.fixed_point,
            local_degree: b.local_degree,
            asymptotic_angle: r.asymptotic_angle,
        });
    }
    Ok(Marking { marked, rays })
}
