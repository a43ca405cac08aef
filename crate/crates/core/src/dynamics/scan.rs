use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::critical::{analyze_critical_orbits, CriticalAnalysis};
use super::{CaptureParams, Fate, OrbitEngine};
use crate::algebra::{Complex, Polynomial};
use crate::newton::{build_newton, free_critical_points, CriticalPoint, NewtonError, NewtonSpec};

/// Fixed CSV header of a scan atlas.
pub const CSV_HEADER: &str = "c_re,c_im,fates,preperiods,pcm_flag,pcm_c_re,pcm_c_im";

/// Newton iterations spent refining a candidate parameter.
const REFINE_ITERS: usize = 40;

/// A one-parameter family `c ↦ (p_c, q_c)` with coefficients affine in `c`:
/// `p_c = p0 + c·p1` and `q_c = q0 + c·q1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Family {
    pub p0: Polynomial,
    pub p1: Polynomial,
    pub q0: Polynomial,
    pub q1: Polynomial,
}

impl Family {
    pub fn new(p0: Polynomial, p1: Polynomial, q0: Polynomial, q1: Polynomial) -> Self {
        Self { p0, p1, q0, q1 }
    }

    pub fn at(&self, c: Complex) -> (Polynomial, Polynomial) {
        (&self.p0 + &self.p1.scale(c), &self.q0 + &self.q1.scale(c))
    }

    pub fn spec_at(&self, c: Complex) -> Result<NewtonSpec, NewtonError> {
        let (p, q) = self.at(c);
        build_newton(&p, &q)
    }
}

/// Rectangle of parameters sampled at cell centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRegion {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl ScanRegion {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Self {
            re_min: re.0.min(re.1),
            re_max: re.0.max(re.1),
            im_min: im.0.min(im.1),
            im_max: im.0.max(im.1),
        }
    }

    /// Closed bounds of cell `(i, j)`; `j` counts upward from `im_min`.
    pub fn cell(&self, resolution: (usize, usize), i: usize, j: usize) -> ScanRegion {
        let dx = (self.re_max - self.re_min) / resolution.0 as f64;
        let dy = (self.im_max - self.im_min) / resolution.1 as f64;
        ScanRegion {
            re_min: self.re_min + i as f64 * dx,
            re_max: self.re_min + (i + 1) as f64 * dx,
            im_min: self.im_min + j as f64 * dy,
            im_max: self.im_min + (j + 1) as f64 * dy,
        }
    }

    pub fn center(&self) -> Complex {
        Complex::new(
            (self.re_min + self.re_max) / 2.0,
            (self.im_min + self.im_max) / 2.0,
        )
    }

    pub fn diameter(&self) -> f64 {
        Complex::new(self.re_max - self.re_min, self.im_max - self.im_min).norm()
    }

    pub fn contains(&self, c: Complex, slack: f64) -> bool {
        c.re >= self.re_min - slack
            && c.re <= self.re_max + slack
            && c.im >= self.im_min - slack
            && c.im <= self.im_max + slack
    }
}

/// Classification of one parameter cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    #[serde(with = "crate::algebra::complex_pair")]
    pub c: Complex,
    pub cell: ScanRegion,
    /// Fate of each free critical orbit at the cell center.
    pub fates: Vec<Fate>,
    pub preperiods: Vec<Option<usize>>,
    pub pcm_flag: bool,
    /// The refined parameter in the cell at which the map is minimal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pcm_parameter: Option<[f64; 2]>,
    /// The cell-center map could not be built (degree drop).
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub region: ScanRegion,
    pub resolution: (usize, usize),
    pub budget: usize,
    /// Row-major from `im_min` upward.
    pub samples: Vec<ScanSample>,
}

impl ScanResult {
    pub fn flagged(&self) -> impl Iterator<Item = &ScanSample> {
        self.samples.iter().filter(|s| s.pcm_flag)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let fates: Vec<String> = s.fates.iter().map(|f| f.to_string()).collect();
            let pre: Vec<String> = s
                .preperiods
                .iter()
                .map(|p| p.map_or("-".to_string(), |m| m.to_string()))
                .collect();
            let (pr, pi) = match s.pcm_parameter {
                Some([a, b]) => (format!("{a:.12}"), format!("{b:.12}")),
                None => (String::new(), String::new()),
            };
            let _ = writeln!(
                out,
                "{:.9},{:.9},{},{},{},{},{}",
                s.c.re,
                s.c.im,
                fates.join(";"),
                pre.join(";"),
                u8::from(s.pcm_flag),
                pr,
                pi
            );
        }
        out
    }
}

/// An analytic equation in the parameter whose zero makes a critical
/// relation exact.
#[derive(Clone, Copy, Debug)]
enum Relation {
    /// `p_c(N^m(cp)) = 0`.
    RootLanding { cp: Complex, m: usize },
    /// `N^m(cp) = center`.
    CenterLanding {
        cp: Complex,
        center: Complex,
        m: usize,
    },
    /// `(cp_a − cp_b)² = 0`.
    Collision { a: Complex, b: Complex },
}

fn nearest_free(free: &[CriticalPoint], z: Complex) -> Option<(Complex, usize)> {
    free.iter()
        .filter_map(|c| c.finite().map(|w| (w, c.local_degree)))
        .min_by(|a, b| (a.0 - z).norm().total_cmp(&(b.0 - z).norm()))
}

/// Tracks the relation to parameter `c`; returns the residual and the
/// relation with updated critical-point positions.
fn residual(family: &Family, c: Complex, rel: Relation) -> Option<(Complex, Relation)> {
    let spec = family.spec_at(c).ok()?;
    let crit = crate::newton::critical_points(&spec, crate::algebra::TAU_CLUSTER).ok()?;
    let free = free_critical_points(&spec, &crit);
    let scale = spec.root_scale();
    let merged_into_root = |z: Complex| {
        crit.iter().any(|k| {
            k.local_degree >= 3
                && k.finite().is_some_and(|w| {
                    (w - z).norm() < 1e-2 * scale
                        && spec
                            .roots
                            .iter()
                            .any(|r| (r.value - w).norm() < 1e-7 * scale)
                })
        })
    };
    match rel {
        Relation::RootLanding { cp, m } => {
            let Some((w, _)) =
                nearest_free(&free, cp).filter(|(w, _)| (w - cp).norm() < 1e-2 * scale)
            else {
                return merged_into_root(cp).then_some((Complex::new(0.0, 0.0), rel));
            };
            let mut z = w;
            for _ in 0..m {
                z = spec.apply(z);
            }
            let val = spec.p.eval(z);
            val.is_finite()
                .then_some((val, Relation::RootLanding { cp: w, m }))
        }
        Relation::CenterLanding { cp, center, m } => {
            let (w, _) = nearest_free(&free, cp)?;
            let (cen, _) = nearest_free(&free, center)?;
            let mut z = w;
            for _ in 0..m {
                z = spec.apply(z);
            }
            let val = z - cen;
            val.is_finite().then_some((
                val,
                Relation::CenterLanding {
                    cp: w,
                    center: cen,
                    m,
                },
            ))
        }
        Relation::Collision { a, b } => {
            let (wa, ka) = nearest_free(&free, a)?;
            let (wb, _) = nearest_free(&free, b)?;
            if (wa - wb).norm() == 0.0 && ka >= 3 {
                return Some((Complex::new(0.0, 0.0), Relation::Collision { a: wa, b: wb }));
            }
            let d = wa - wb;
            Some((d * d, Relation::Collision { a: wa, b: wb }))
        }
    }
}

/// Newton's method on one relation, confined to a neighbourhood of the cell.
fn refine(family: &Family, cell: &ScanRegion, rel: Relation) -> Option<Complex> {
    let size = cell.diameter();
    let start = cell.center();
    let h = 1e-7 * size.max(1e-12);
    let mut c = start;
    let mut rel = rel;
    for _ in 0..REFINE_ITERS {
        let (f, next) = residual(family, c, rel)?;
        rel = next;
        if f.norm() == 0.0 {
            return Some(c);
        }
        let (fp, _) = residual(family, c + h, rel)?;
        let (fm, _) = residual(family, c - h, rel)?;
        let df = (fp - fm) / (2.0 * h);
        let step = f / df;
        if !step.is_finite() {
            return None;
        }
        c -= step;
        if (c - start).norm() > 2.0 * size {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + c.norm()) {
            return Some(c);
        }
    }
    None
}

fn relations(analysis: &CriticalAnalysis, engine: &OrbitEngine) -> Vec<Relation> {
    let mut out = Vec::new();
    let scale = engine.spec.root_scale();
    for o in &analysis.orbits {
        match (o.fate, o.landing) {
            (_, l) if l.is_resolved() => {}
            (Fate::Root(i), _) => {
                let r = engine.roots[i];
                let rho = 1e-2 * scale;
                let mut z = o.point;
                let mut enter = 0;
                while (z - r).norm() >= rho && enter < o.steps {
                    z = engine.spec.apply(z);
                    enter += 1;
                }
                let mut ms: Vec<usize> = vec![0];
                ms.extend(enter.saturating_sub(2)..=enter);
                ms.dedup();
                for m in ms {
                    out.push(Relation::RootLanding { cp: o.point, m });
                }
            }
            (Fate::Petal(j), _) if !o.immediate => {
                if let (Some(center), Some(m)) = (analysis.centers[j], o.preperiod) {
                    for m in m.max(1)..=m + 1 {
                        out.push(Relation::CenterLanding {
                            cp: o.point,
                            center,
                            m,
                        });
                    }
                }
            }
            _ => {}
        }
    }
    for e in analysis.census.iter().filter(|e| e.count >= 2) {
        let members: Vec<Complex> = analysis
            .orbits
            .iter()
            .filter(|o| o.immediate && o.fate == Fate::Petal(e.petal))
            .map(|o| o.point)
            .collect();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                out.push(Relation::Collision {
                    a: members[a],
                    b: members[b],
                });
            }
        }
    }
    out
}

fn minimal_at(family: &Family, c: Complex, budget: usize) -> bool {
    let Ok(spec) = family.spec_at(c) else {
        return false;
    };
    let engine = OrbitEngine::new(&spec, CaptureParams::default());
    analyze_critical_orbits(&engine, budget).minimal()
}

fn scan_cell(
    family: &Family,
    region: &ScanRegion,
    res: (usize, usize),
    i: usize,
    j: usize,
    budget: usize,
) -> ScanSample {
    let cell = region.cell(res, i, j);
    let c = cell.center();
    let Ok(spec) = family.spec_at(c) else {
        return ScanSample {
            c,
            cell,
            fates: Vec::new(),
            preperiods: Vec::new(),
            pcm_flag: false,
            pcm_parameter: None,
            degenerate: true,
        };
    };
    let engine = OrbitEngine::new(&spec, CaptureParams::default());
    let analysis = analyze_critical_orbits(&engine, budget);
    let mut pcm_parameter = None;
    if analysis.minimal() {
        pcm_parameter = Some(c);
    } else {
        let slack = 1e-9 * cell.diameter();
        for rel in relations(&analysis, &engine) {
            if let Some(star) = refine(family, &cell, rel) {
                if cell.contains(star, slack) && minimal_at(family, star, budget) {
                    pcm_parameter = Some(star);
                    break;
                }
            }
        }
    }
    ScanSample {
        c,
        cell,
        fates: analysis.orbits.iter().map(|o| o.fate).collect(),
        preperiods: analysis.orbits.iter().map(|o| o.preperiod).collect(),
        pcm_flag: pcm_parameter.is_some(),
        pcm_parameter: pcm_parameter.map(|z| [z.re, z.im]),
        degenerate: false,
    }
}

/// Classifies the free critical orbits over a grid of parameter cells and
/// flags cells containing a postcritically minimal parameter.
///
/// A cell is flagged when its center is minimal, or when Newton refinement
/// of a critical relation suggested by the center's orbits converges inside
/// the closed cell to a parameter that is minimal.
pub fn param_scan(
    family: &Family,
    region: ScanRegion,
    resolution: (usize, usize),
    budget: usize,
) -> ScanResult {
    let (w, h) = resolution;
    let cell = |idx: usize| scan_cell(family, &region, resolution, idx % w, idx / w, budget);
    #[cfg(feature = "parallel")]
    let samples = {
        use rayon::prelude::*;
        (0..w * h).into_par_iter().map(cell).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let samples = (0..w * h).map(cell).collect();
    ScanResult {
        region,
        resolution,
        budget,
        samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic_exp() -> Family {
        Family::new(
            Polynomial::from_real(&[0.0, 0.0, 1.0]),
            Polynomial::one(),
            Polynomial::z(),
            Polynomial::zero(),
        )
    }

    #[test]
    fn family_evaluation() {
        let (p, q) = quadratic_exp().at(Complex::new(2.0, 0.0));
        assert_eq!(p, Polynomial::from_real(&[2.0, 0.0, 1.0]));
        assert_eq!(q, Polynomial::z());
    }

    #[test]
    fn single_cell_scan() {
        let r = param_scan(
            &quadratic_exp(),
            ScanRegion::new((0.9, 1.1), (0.9, 1.1)),
            (1, 1),
            50_000,
        );
        assert_eq!(r.samples.len(), 1);
        assert_eq!(r.samples[0].fates.len(), 2);
        assert!(!r.samples[0].pcm_flag);
    }

    #[test]
    fn cell_around_quarter_is_flagged() {
        let r = param_scan(
            &quadratic_exp(),
            ScanRegion::new((-0.27, -0.23), (-0.01, 0.03)),
            (1, 1),
            50_000,
        );
        let s = &r.samples[0];
        assert!(s.pcm_flag, "{s:?}");
        let [a, b] = s.pcm_parameter.unwrap();
        assert!((a + 0.25).abs() < 1e-8 && b.abs() < 1e-8);
    }

    #[test]
    fn cell_around_two_is_flagged() {
        let r = param_scan(
            &quadratic_exp(),
            ScanRegion::new((1.99, 2.03), (-0.005, 0.02)),
            (1, 1),
            50_000,
        );
        assert!(r.samples[0].pcm_flag, "{:?}", r.samples[0]);
    }

    #[test]
    fn empty_region_csv_is_header_only() {
        let r = param_scan(
            &quadratic_exp(),
            ScanRegion::new((0.0, 1.0), (0.0, 1.0)),
            (0, 0),
            100,
        );
        assert_eq!(r.to_csv(), format!("{CSV_HEADER}\n"));
    }
}
