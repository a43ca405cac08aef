//! Browser bindings for newton-atlas.
//!
//! A map is built once from two coefficient lists and then rendered,
//! classified or probed point by point from JavaScript.

use newton_atlas::algebra::{Complex, Polynomial, Root, TAU_CLUSTER};
use newton_atlas::classify::{channel_diagram, check_pcf, check_pcm, PcmReport};
use newton_atlas::dynamics::{
    basin_grid, default_budget, CaptureParams, OrbitEngine, OrbitRecord, Viewport,
};
use newton_atlas::newton::{
    build_newton, classify_infinity, critical_points, fixed_points, petal_directions,
    CriticalPoint, FixedPointReport, NewtonError, NewtonSpec,
};
use newton_atlas::render::{draw_overlay, render_grid, Overlay, Polyline};
use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

/// Largest accepted canvas side.
pub const MAX_SIDE: usize = 4096;

/// Longest orbit trace returned by [`Atlas::orbit`].
pub const MAX_TRACE: usize = 500;

#[derive(Debug, thiserror::Error)]
pub enum DemoError {
    #[error("{name}: {message}")]
    Coefficients { name: &'static str, message: String },
    #[error("canvas sides must be between 1 and {MAX_SIDE}, got {0}x{1}")]
    Canvas(usize, usize),
    #[error(transparent)]
    Newton(#[from] NewtonError),
    #[error("{0}")]
    Classify(String),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coef {
    Real(f64),
    Pair([f64; 2]),
}

/// Parses ascending coefficients written as a JSON array of reals or
/// `[re, im]` pairs. An empty string is the zero polynomial.
pub fn parse_coefficients(text: &str, name: &'static str) -> Result<Polynomial, DemoError> {
    if text.trim().is_empty() {
        return Ok(Polynomial::default());
    }
    let coeffs: Vec<Coef> = serde_json::from_str(text).map_err(|e| DemoError::Coefficients {
        name,
        message: e.to_string(),
    })?;
    Ok(Polynomial::new(
        coeffs
            .into_iter()
            .map(|c| match c {
                Coef::Real(x) => Complex::new(x, 0.0),
                Coef::Pair([re, im]) => Complex::new(re, im),
            })
            .collect(),
    ))
}

#[derive(Serialize)]
pub struct Summary {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub warnings: Vec<String>,
    pub roots: Vec<Root>,
    pub infinity: FixedPointReport,
    pub fixed_points: Vec<FixedPointReport>,
    pub critical_points: Vec<CriticalPoint>,
    pub petal_directions: Vec<f64>,
    pub postcritical: PcmReport,
}

/// A Newton map of `p·exp(q)`.
#[wasm_bindgen]
pub struct Atlas {
    spec: NewtonSpec,
}

impl Atlas {
    pub fn build(p: &str, q: &str) -> Result<Atlas, DemoError> {
        let p = parse_coefficients(p, "p")?;
        let q = parse_coefficients(q, "q")?;
        Ok(Atlas {
            spec: build_newton(&p, &q)?,
        })
    }

    pub fn spec(&self) -> &NewtonSpec {
        &self.spec
    }

    fn budget(&self, budget: usize) -> usize {
        if budget == 0 {
            default_budget(&self.spec)
        } else {
            budget
        }
    }

    /// RGBA pixels of the basin picture, row-major from the top-left corner.
    #[allow(clippy::too_many_arguments)]
    pub fn render_rgba(
        &self,
        viewport: Viewport,
        width: usize,
        height: usize,
        budget: usize,
        rays: bool,
        critical: bool,
    ) -> Result<Vec<u8>, DemoError> {
        if width == 0 || height == 0 || width > MAX_SIDE || height > MAX_SIDE {
            return Err(DemoError::Canvas(width, height));
        }
        let grid = basin_grid(&self.spec, viewport, (width, height), self.budget(budget));
        let mut img = render_grid(&grid);
        let mut overlay = Overlay::default();
        if rays && self.spec.n == 0 {
            let diagram =
                channel_diagram(&self.spec).map_err(|e| DemoError::Classify(e.to_string()))?;
            for basin in &diagram.basins {
                overlay
                    .rays
                    .extend(basin.rays.iter().map(|r| Polyline(r.points.clone())));
            }
        }
        if critical {
            overlay.critical = critical_points(&self.spec, TAU_CLUSTER)?
                .iter()
                .filter_map(|c| c.finite())
                .collect();
            overlay.fixed = self.spec.root_values();
        }
        draw_overlay(&mut img, &grid.viewport, &overlay);
        let mut rgba = Vec::with_capacity(img.pixels.len() / 3 * 4);
        for px in img.pixels.chunks_exact(3) {
            rgba.extend_from_slice(px);
            rgba.push(255);
        }
        Ok(rgba)
    }

    pub fn summary(&self, budget: usize) -> Result<Summary, DemoError> {
        let spec = &self.spec;
        let budget = self.budget(budget);
        let postcritical = if spec.n == 0 {
            check_pcf(spec, budget, CaptureParams::default())
        } else {
            check_pcm(spec, budget, CaptureParams::default())
        }
        .map_err(|e| DemoError::Classify(e.to_string()))?;
        Ok(Summary {
            m: spec.m,
            n: spec.n,
            d: spec.d,
            warnings: spec.warnings.clone(),
            roots: spec.roots.clone(),
            infinity: classify_infinity(spec),
            fixed_points: fixed_points(spec, TAU_CLUSTER)?,
            critical_points: critical_points(spec, TAU_CLUSTER)?,
            petal_directions: if spec.n == 0 {
                Vec::new()
            } else {
                petal_directions(spec)?
            },
            postcritical,
        })
    }

    pub fn orbit_record(&self, z: Complex, budget: usize) -> OrbitRecord {
        OrbitEngine::new(&self.spec, CaptureParams::default()).run(
            z,
            self.budget(budget),
            MAX_TRACE,
        )
    }
}

fn js(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
impl Atlas {
    /// Builds the Newton map from JSON coefficient lists in ascending degree.
    #[wasm_bindgen(constructor)]
    pub fn new(p: &str, q: &str) -> Result<Atlas, JsError> {
        Atlas::build(p, q).map_err(js)
    }

    /// Basin picture of the rectangle centered at `(cx, cy)` as RGBA bytes.
    /// A zero budget selects the default.
    #[allow(clippy::too_many_arguments)]
    pub fn render(
        &self,
        cx: f64,
        cy: f64,
        w: f64,
        h: f64,
        width: usize,
        height: usize,
        budget: usize,
        rays: bool,
        critical: bool,
    ) -> Result<Vec<u8>, JsError> {
        let viewport = Viewport::new(Complex::new(cx, cy), w, h);
        self.render_rgba(viewport, width, height, budget, rays, critical)
            .map_err(js)
    }

    /// Degrees, fixed and critical points, petals and postcritical evidence as JSON.
    pub fn classify(&self, budget: usize) -> Result<String, JsError> {
        let summary = self.summary(budget).map_err(js)?;
        serde_json::to_string(&summary).map_err(js)
    }

    /// Fate and the first iterates of the orbit of `re + i·im`, as JSON.
    pub fn orbit(&self, re: f64, im: f64, budget: usize) -> Result<String, JsError> {
        serde_json::to_string(&self.orbit_record(Complex::new(re, im), budget)).map_err(js)
    }

    pub fn degree(&self) -> usize {
        self.spec.d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use newton_atlas::dynamics::Fate;
    use newton_atlas::render::ROOT_PALETTE;

    #[test]
    fn coefficients_accept_reals_and_pairs() {
        let p = parse_coefficients("[[-0.25, 0], 0, 1]", "p").unwrap();
        assert_eq!(p, Polynomial::from_real(&[-0.25, 0.0, 1.0]));
        assert_eq!(
            parse_coefficients("  ", "q").unwrap(),
            Polynomial::default()
        );
        assert!(matches!(
            parse_coefficients("[1, \"x\"]", "p"),
            Err(DemoError::Coefficients { name: "p", .. })
        ));
    }

    #[test]
    fn constant_map_is_rejected() {
        assert!(matches!(
            Atlas::build("[0, 1]", ""),
            Err(DemoError::Newton(_))
        ));
    }

    #[test]
    fn render_is_rgba_and_colors_the_roots() {
        let atlas = Atlas::build("[-1, 0, 0, 1]", "").unwrap();
        let vp = Viewport::new(Complex::new(1.0, 0.0), 0.02, 0.02);
        let rgba = atlas.render_rgba(vp, 4, 3, 0, false, false).unwrap();
        assert_eq!(rgba.len(), 4 * 3 * 4);
        assert!(rgba.chunks_exact(4).all(|px| px[3] == 255));
        let root = atlas
            .spec()
            .root_values()
            .iter()
            .position(|r| (r - Complex::new(1.0, 0.0)).norm() < 1e-9);
        let [r, g, b] = ROOT_PALETTE[root.unwrap()];
        // every pixel lies next to the root, so shading stays light
        for px in rgba.chunks_exact(4) {
            assert!(px[0] <= r && px[1] <= g && px[2] <= b);
            assert!(px[0] as f64 >= 0.45 * r as f64 - 1.0);
        }
        assert!(matches!(
            atlas.render_rgba(vp, 0, 3, 0, false, false),
            Err(DemoError::Canvas(0, 3))
        ));
    }

    #[test]
    fn rays_overlay_draws_white_pixels() {
        let atlas = Atlas::build("[-1, 0, 0, 1]", "").unwrap();
        let vp = Viewport::new(Complex::new(0.0, 0.0), 4.0, 4.0);
        let rgba = atlas.render_rgba(vp, 64, 64, 0, true, false).unwrap();
        assert!(rgba.chunks_exact(4).any(|px| px[..3] == [255, 255, 255]));
    }

    #[test]
    fn classify_reports_parabolic_infinity() {
        let atlas = Atlas::build("[-0.25, 0, 1]", "[0, 1]").unwrap();
        let summary = atlas.summary(0).unwrap();
        assert_eq!((summary.m, summary.n, summary.d), (2, 1, 3));
        assert_eq!(summary.petal_directions.len(), 1);
        let json = serde_json::to_value(&summary).unwrap();
        assert!(json["postcritical"].is_object());
    }

    #[test]
    fn orbit_near_a_root_is_captured() {
        let atlas = Atlas::build("[-1, 0, 0, 1]", "").unwrap();
        let rec = atlas.orbit_record(Complex::new(0.9, 0.1), 0);
        let root = atlas
            .spec()
            .root_values()
            .iter()
            .position(|r| (r - Complex::new(1.0, 0.0)).norm() < 1e-9);
        assert_eq!(rec.fate, Fate::Root(root.unwrap()));
        let trace = rec.trace.unwrap();
        assert!(!trace.is_empty() && trace.len() <= MAX_TRACE);
    }
}
