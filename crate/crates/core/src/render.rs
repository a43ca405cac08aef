//! Basin images: fixed palette, P6 PPM encoding, overlays and the JSON sidecar.

use serde::{Deserialize, Serialize};

use crate::algebra::Complex;
use crate::dynamics::{BasinGrid, CaptureParams, Fate, Viewport};

pub type Rgb = [u8; 3];

/// Root colors, cycled by root index.
pub const ROOT_PALETTE: [Rgb; 12] = [
    [31, 119, 180],
    [214, 39, 40],
    [44, 160, 44],
    [148, 103, 189],
    [23, 190, 207],
    [227, 119, 194],
    [140, 86, 75],
    [127, 127, 127],
    [188, 189, 34],
    [255, 127, 14],
    [0, 80, 120],
    [120, 0, 60],
];
pub const UNDECIDED: Rgb = [0, 0, 0];
pub const RAY_COLOR: Rgb = [255, 255, 255];
pub const CRITICAL_COLOR: Rgb = [255, 0, 255];
pub const FIXED_COLOR: Rgb = [0, 255, 255];

/// Yellow ramp for petal `j` of `n`.
pub fn petal_color(j: usize, n: usize) -> Rgb {
    let t = if n <= 1 {
        0.0
    } else {
        j as f64 / (n - 1) as f64
    };
    [
        (255.0 - 55.0 * t).round() as u8,
        (225.0 - 105.0 * t).round() as u8,
        (40.0 - 40.0 * t).round() as u8,
    ]
}

pub fn fate_color(fate: Fate, petals: usize) -> Rgb {
    match fate {
        Fate::Root(i) => ROOT_PALETTE[i % ROOT_PALETTE.len()],
        Fate::Petal(j) => petal_color(j, petals),
        Fate::Undecided => UNDECIDED,
    }
}

/// Darkens slowly converging pixels.
fn shade(color: Rgb, iterations: u32) -> Rgb {
    let f = 1.0 - 0.55 * (iterations as f64 / (iterations as f64 + 25.0));
    color.map(|c| (c as f64 * f).round() as u8)
}

/// An RGB raster, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; 3 * width * height],
        }
    }

    pub fn get(&self, col: usize, row: usize) -> Rgb {
        let i = 3 * (row * self.width + col);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, col: usize, row: usize, c: Rgb) {
        let i = 3 * (row * self.width + col);
        self.pixels[i..i + 3].copy_from_slice(&c);
    }

    fn plot(&mut self, x: i64, y: i64, c: Rgb) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            self.set(x as usize, y as usize, c);
        }
    }

    /// Binary P6 encoding with maxval 255.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    /// Parses the output of [`Image::to_ppm`].
    pub fn from_ppm(bytes: &[u8]) -> Option<Self> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return None;
            }
            fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?.to_string());
        }
        if fields[0] != "P6" || fields[3] != "255" {
            return None;
        }
        let width: usize = fields[1].parse().ok()?;
        let height: usize = fields[2].parse().ok()?;
        let data = bytes.get(pos + 1..)?;
        (data.len() == 3 * width * height).then(|| Self {
            width,
            height,
            pixels: data.to_vec(),
        })
    }
}

/// Colors a basin grid.
pub fn render_grid(grid: &BasinGrid) -> Image {
    let (w, h) = grid.resolution;
    let mut img = Image::new(w, h);
    for (i, (&fate, &it)) in grid.labels.iter().zip(&grid.iterations).enumerate() {
        let c = fate_color(fate, grid.petals.len());
        let c = if fate.is_decided() { shade(c, it) } else { c };
        img.set(i % w, i / w, c);
    }
    img
}

/// Geometry drawn on top of a basin image.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Overlay {
    #[serde(default)]
    pub rays: Vec<Polyline>,
    #[serde(default, with = "crate::algebra::complex_vec")]
    pub critical: Vec<Complex>,
    #[serde(default, with = "crate::algebra::complex_vec")]
    pub fixed: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polyline(#[serde(with = "crate::algebra::complex_vec")] pub Vec<Complex>);

impl Overlay {
    pub fn is_empty(&self) -> bool {
        self.rays.is_empty() && self.critical.is_empty() && self.fixed.is_empty()
    }
}

/// Fractional pixel coordinates of `z`, unclipped.
fn to_pixel(viewport: &Viewport, (w, h): (usize, usize), z: Complex) -> (f64, f64) {
    let fx = if viewport.width == 0.0 {
        0.5
    } else {
        (z.re - (viewport.center.re - viewport.width / 2.0)) / viewport.width
    };
    let fy = if viewport.height == 0.0 {
        0.5
    } else {
        ((viewport.center.im + viewport.height / 2.0) - z.im) / viewport.height
    };
    (fx * w as f64, fy * h as f64)
}

fn draw_segment(img: &mut Image, a: (f64, f64), b: (f64, f64), c: Rgb) {
    let limit = 4.0 * (img.width + img.height) as f64;
    if [a.0, a.1, b.0, b.1]
        .iter()
        .any(|v| !v.is_finite() || v.abs() > limit)
    {
        return;
    }
    let steps = (2.0 * (b.0 - a.0).abs().max((b.1 - a.1).abs()))
        .ceil()
        .max(1.0) as usize;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let x = a.0 + (b.0 - a.0) * t;
        let y = a.1 + (b.1 - a.1) * t;
        img.plot(x.floor() as i64, y.floor() as i64, c);
    }
}

fn draw_cross(img: &mut Image, (x, y): (f64, f64), c: Rgb) {
    let (x, y) = (x.floor() as i64, y.floor() as i64);
    for d in -3..=3 {
        img.plot(x + d, y, c);
        img.plot(x, y + d, c);
    }
}

fn draw_square(img: &mut Image, (x, y): (f64, f64), c: Rgb) {
    let (x, y) = (x.floor() as i64, y.floor() as i64);
    for d in -3..=3 {
        img.plot(x + d, y - 3, c);
        img.plot(x + d, y + 3, c);
        img.plot(x - 3, y + d, c);
        img.plot(x + 3, y + d, c);
    }
}

/// Draws rays, then fixed points, then critical points.
pub fn draw_overlay(img: &mut Image, viewport: &Viewport, overlay: &Overlay) {
    let res = (img.width, img.height);
    for ray in &overlay.rays {
        for s in ray.0.windows(2) {
            draw_segment(
                img,
                to_pixel(viewport, res, s[0]),
                to_pixel(viewport, res, s[1]),
                RAY_COLOR,
            );
        }
    }
    for &z in &overlay.fixed {
        draw_square(img, to_pixel(viewport, res, z), FIXED_COLOR);
    }
    for &z in &overlay.critical {
        draw_cross(img, to_pixel(viewport, res, z), CRITICAL_COLOR);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendEntry {
    pub label: String,
    pub color: Rgb,
    pub fraction: f64,
    /// Root position, or petal direction as `[cos, sin]`.
    pub anchor: [f64; 2],
}

/// Metadata written next to an image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub viewport: Viewport,
    pub resolution: (usize, usize),
    pub budget: usize,
    pub caps: CaptureParams,
    pub legend: Vec<LegendEntry>,
    pub undecided_fraction: f64,
    pub overlays: Vec<String>,
}

pub fn sidecar(grid: &BasinGrid, overlays: &[String]) -> Sidecar {
    let fractions = grid.label_fractions();
    let fraction_of = |f: Fate| {
        fractions
            .iter()
            .find(|(g, _)| *g == f)
            .map_or(0.0, |(_, x)| *x)
    };
    let mut legend: Vec<LegendEntry> = grid
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| LegendEntry {
            label: Fate::Root(i).to_string(),
            color: fate_color(Fate::Root(i), grid.petals.len()),
            fraction: fraction_of(Fate::Root(i)),
            anchor: [r.re, r.im],
        })
        .collect();
    legend.extend(grid.petals.iter().enumerate().map(|(j, th)| LegendEntry {
        label: Fate::Petal(j).to_string(),
        color: fate_color(Fate::Petal(j), grid.petals.len()),
        fraction: fraction_of(Fate::Petal(j)),
        anchor: [th.cos(), th.sin()],
    }));
    Sidecar {
        viewport: grid.viewport,
        resolution: grid.resolution,
        budget: grid.budget,
        caps: grid.caps,
        legend,
        undecided_fraction: fraction_of(Fate::Undecided),
        overlays: overlays.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Polynomial;
    use crate::dynamics::basin_grid;
    use crate::newton::build_newton;

    fn cubic_grid(res: usize) -> BasinGrid {
        let spec = build_newton(
            &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
            &Polynomial::zero(),
        )
        .unwrap();
        basin_grid(
            &spec,
            Viewport::new(Complex::new(0.0, 0.0), 4.0, 4.0),
            (res, res),
            500,
        )
    }

    #[test]
    fn ppm_roundtrip_and_header() {
        let img = render_grid(&cubic_grid(16));
        let bytes = img.to_ppm();
        assert!(bytes.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(bytes.len(), 13 + 3 * 256);
        assert_eq!(Image::from_ppm(&bytes), Some(img));
    }

    #[test]
    fn single_pixel_image() {
        let img = render_grid(&cubic_grid(1));
        assert_eq!(img.to_ppm().len(), 11 + 3);
        assert!(Image::from_ppm(&img.to_ppm()).is_some());
    }

    #[test]
    fn palette_is_fixed() {
        assert_eq!(fate_color(Fate::Root(13), 0), ROOT_PALETTE[1]);
        assert_eq!(fate_color(Fate::Undecided, 2), [0, 0, 0]);
        assert_eq!(petal_color(0, 1), [255, 225, 40]);
        let (a, b) = (petal_color(0, 3), petal_color(2, 3));
        assert!(a[1] > b[1]);
    }

    #[test]
    fn overlay_marks_pixels() {
        let grid = cubic_grid(32);
        let mut img = render_grid(&grid);
        let overlay = Overlay {
            rays: vec![Polyline(vec![
                Complex::new(1.0, 0.0),
                Complex::new(2.0, 0.0),
            ])],
            critical: vec![Complex::new(0.5, 0.5)],
            fixed: vec![],
        };
        draw_overlay(&mut img, &grid.viewport, &overlay);
        let (col, row) = grid
            .viewport
            .pixel_of((32, 32), Complex::new(1.5, 0.0))
            .unwrap();
        assert_eq!(img.get(col, row), RAY_COLOR);
        let (col, row) = grid
            .viewport
            .pixel_of((32, 32), Complex::new(0.5, 0.5))
            .unwrap();
        assert_eq!(img.get(col, row), CRITICAL_COLOR);
    }

    #[test]
    fn sidecar_legend_covers_roots() {
        let grid = cubic_grid(24);
        let side = sidecar(&grid, &[]);
        assert_eq!(side.legend.len(), 3);
        let total: f64 =
            side.legend.iter().map(|e| e.fraction).sum::<f64>() + side.undecided_fraction;
        assert!((total - 1.0).abs() < 1e-12);
        let json = serde_json::to_value(&side).unwrap();
        assert_eq!(json["legend"][0]["label"], "root0");
    }
}
