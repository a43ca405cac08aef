use std::io::Write as _;
use std::path::{Path, PathBuf};

use newton_atlas::algebra::{Root, TAU_CLUSTER};
use newton_atlas::classify::{
    affine_conjugacy_test, channel_diagram, check_pcf, check_pcm, correspondence_audit,
    make_marking, normalize, ChannelDiagram, ConjugacyResult, Normalized, PcmReport, TAU_CONJ,
};
use newton_atlas::dynamics::{
    basin_grid, default_budget, estimate_basin_area, param_scan, CaptureParams, Fate, ScanResult,
    Viewport,
};
use newton_atlas::newton::{
    build_newton, classify_infinity, critical_points, fixed_points, petal_directions,
    CriticalPoint, FixedPointReport, NewtonSpec, SpecDoc,
};
use newton_atlas::render::{
    draw_overlay, fate_color, render_grid, sidecar, Image, Overlay, Polyline, Sidecar,
};
use newton_atlas::verify;
use serde::Serialize;

use crate::config::{self, viewport_region};
use crate::error::CliError;

/// Largest accepted image or scan side.
pub const MAX_SIDE: usize = 16_384;

pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s.into_bytes()
}

fn check_resolution((w, h): (usize, usize)) -> Result<(), CliError> {
    if w > MAX_SIDE || h > MAX_SIDE {
        return Err(CliError::Usage(format!(
            "--res: sides are limited to {MAX_SIDE}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
pub struct Degrees {
    pub m: usize,
    pub n: usize,
    pub d: usize,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub map: SpecDoc,
    pub degrees: Degrees,
    pub degenerate: bool,
    pub warnings: Vec<String>,
    pub roots: Vec<Root>,
    pub infinity: FixedPointReport,
    pub fixed_points: Vec<FixedPointReport>,
    pub critical_points: Vec<CriticalPoint>,
    pub petal_directions: Vec<f64>,
    pub normal_form: Normalized,
    pub postcritical: PcmReport,
}

pub fn classify(spec: &NewtonSpec, budget: Option<usize>) -> Result<ClassifyReport, CliError> {
    let budget = budget.unwrap_or_else(|| default_budget(spec));
    let postcritical = if spec.n == 0 {
        check_pcf(spec, budget, CaptureParams::default())?
    } else {
        check_pcm(spec, budget, CaptureParams::default())?
    };
    Ok(ClassifyReport {
        map: spec.to_doc(),
        degrees: Degrees {
            m: spec.m,
            n: spec.n,
            d: spec.d,
        },
        degenerate: spec.degenerate,
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
        normal_form: normalize(&spec.p, &spec.q),
        postcritical,
    })
}

pub fn cmd_classify(map: &Path, budget: Option<usize>, out: Option<&Path>) -> Result<(), CliError> {
    let spec = config::load_spec(map)?;
    write_output(out, &json(&classify(&spec, budget)?))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overlays {
    pub rays: bool,
    pub critical: bool,
    pub fixed: bool,
}

impl Overlays {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let mut o = Overlays::default();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item {
                "rays" => o.rays = true,
                "critical" => o.critical = true,
                "fixed" => o.fixed = true,
                other => {
                    return Err(CliError::Usage(format!(
                        "--overlay: unknown layer {other:?} (expected rays, critical, fixed)"
                    )))
                }
            }
        }
        Ok(o)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Ppm,
    Png,
}

pub struct RenderJob {
    pub spec: NewtonSpec,
    pub viewport: Viewport,
    pub resolution: (usize, usize),
    pub budget: Option<usize>,
    pub overlays: Overlays,
    pub format: ImageFormat,
    pub out: PathBuf,
}

#[derive(Serialize)]
struct RenderSidecar {
    map: SpecDoc,
    #[serde(flatten)]
    sidecar: Sidecar,
    notes: Vec<String>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        let mut s = out.as_os_str().to_owned();
        s.push(".sidecar.json");
        PathBuf::from(s)
    } else {
        out.with_extension("json")
    }
}

fn overlay_for(
    spec: &NewtonSpec,
    layers: Overlays,
    notes: &mut Vec<String>,
) -> Result<(Overlay, Vec<String>), CliError> {
    let mut overlay = Overlay::default();
    let mut drawn = Vec::new();
    if layers.rays {
        if spec.n == 0 {
            let diagram = channel_diagram(spec)?;
            for b in &diagram.basins {
                notes.extend(b.errors.iter().cloned());
                overlay
                    .rays
                    .extend(b.rays.iter().map(|r| Polyline(r.points.clone())));
            }
            drawn.push("rays".to_string());
        } else {
            notes.push("rays overlay skipped: fixed internal rays are traced for polynomial Newton maps only".into());
        }
    }
    if layers.fixed {
        overlay.fixed = spec.root_values();
        drawn.push("fixed".to_string());
    }
    if layers.critical {
        overlay.critical = critical_points(spec, TAU_CLUSTER)?
            .iter()
            .filter_map(|c| c.finite())
            .collect();
        drawn.push("critical".to_string());
    }
    Ok((overlay, drawn))
}

pub fn render(job: &RenderJob) -> Result<(Image, Vec<u8>), CliError> {
    check_resolution(job.resolution)?;
    let budget = job.budget.unwrap_or_else(|| default_budget(&job.spec));
    let grid = basin_grid(&job.spec, job.viewport, job.resolution, budget);
    let mut img = render_grid(&grid);
    let mut notes = Vec::new();
    let (overlay, drawn) = overlay_for(&job.spec, job.overlays, &mut notes)?;
    draw_overlay(&mut img, &grid.viewport, &overlay);
    let side = RenderSidecar {
        map: job.spec.to_doc(),
        sidecar: sidecar(&grid, &drawn),
        notes,
    };
    Ok((img, json(&side)))
}

fn encode(img: &Image, format: ImageFormat) -> Result<Vec<u8>, CliError> {
    match format {
        ImageFormat::Ppm => Ok(img.to_ppm()),
        ImageFormat::Png => encode_png(img),
    }
}

#[cfg(feature = "png")]
fn encode_png(img: &Image) -> Result<Vec<u8>, CliError> {
    let buf = image::RgbImage::from_raw(img.width as u32, img.height as u32, img.pixels.clone())
        .ok_or_else(|| CliError::Failed("image buffer size mismatch".into()))?;
    let mut out = std::io::Cursor::new(Vec::new());
    buf.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(out.into_inner())
}

#[cfg(not(feature = "png"))]
fn encode_png(_: &Image) -> Result<Vec<u8>, CliError> {
    Err(CliError::Usage(
        "PNG output needs the `png` feature; use --format ppm".into(),
    ))
}

pub fn cmd_render(job: &RenderJob) -> Result<(), CliError> {
    if job.format == ImageFormat::Png && !cfg!(feature = "png") {
        // fail before the grid is computed
        encode_png(&Image::new(0, 0))?;
    }
    let (img, side) = render(job)?;
    write_output(Some(&job.out), &encode(&img, job.format)?)?;
    write_output(Some(&sidecar_path(&job.out)), &side)
}

/// Flag map of a scan: white for flagged cells, otherwise the color of the
/// first free critical orbit's fate; gray where the map degenerates.
pub fn flag_map(result: &ScanResult) -> Image {
    let (w, h) = result.resolution;
    let petals = result
        .samples
        .iter()
        .flat_map(|s| &s.fates)
        .filter_map(|f| match f {
            Fate::Petal(j) => Some(j + 1),
            _ => None,
        })
        .max()
        .unwrap_or(0);
    let mut img = Image::new(w, h);
    for (idx, s) in result.samples.iter().enumerate() {
        let color = if s.pcm_flag {
            [255, 255, 255]
        } else if s.degenerate {
            [96, 96, 96]
        } else {
            fate_color(s.fates.first().copied().unwrap_or(Fate::Undecided), petals)
        };
        // cells count upward in the imaginary direction; images count down
        img.set(idx % w, h - 1 - idx / w, color);
    }
    img
}

pub enum ScanFormat {
    Csv,
    Json,
}

pub fn cmd_scan(
    family_path: &Path,
    viewport: Viewport,
    resolution: (usize, usize),
    budget: Option<usize>,
    format: ScanFormat,
    out: Option<&Path>,
    flag_map_out: Option<&Path>,
) -> Result<(), CliError> {
    check_resolution(resolution)?;
    let family = config::load(family_path)?.family(family_path)?;
    let resolution = if viewport.width == 0.0 || viewport.height == 0.0 {
        (0, 0)
    } else {
        resolution
    };
    let budget = budget.unwrap_or(if family.q0.deg() == 0 && family.q1.deg() == 0 {
        newton_atlas::dynamics::BUDGET_REPELLING
    } else {
        newton_atlas::dynamics::BUDGET_PARABOLIC
    });
    let result = param_scan(&family, viewport_region(&viewport), resolution, budget);
    let bytes = match format {
        ScanFormat::Csv => result.to_csv().into_bytes(),
        ScanFormat::Json => json(&result),
    };
    write_output(out, &bytes)?;
    if let Some(path) = flag_map_out {
        write_output(Some(path), &flag_map(&result).to_ppm())?;
    }
    Ok(())
}

pub fn cmd_audit(
    pcf: &Path,
    marking: &str,
    pcm: &Path,
    budget: Option<usize>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let choices = config::parse_marking(marking)?;
    let pcf_spec = config::load_spec(pcf)?;
    let pcm_spec = config::load_spec(pcm)?;
    let diagram = channel_diagram(&pcf_spec)?;
    let marking = make_marking(&diagram, &choices)?;
    let budget = budget.unwrap_or_else(|| default_budget(&pcm_spec));
    let report = correspondence_audit(&pcf_spec, &marking, &pcm_spec, budget)?;
    write_output(out, &json(&report))?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Failed("audit failed".into()))
    }
}

pub fn cmd_channels(map: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let spec = config::load_spec(map)?;
    let diagram: ChannelDiagram = channel_diagram(&spec)?;
    write_output(out, &json(&diagram))
}

pub fn cmd_area(
    map: &Path,
    root: usize,
    radii: &[f64],
    resolution: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    check_resolution((resolution, resolution))?;
    let spec = config::load_spec(map)?;
    if root >= spec.roots.len() {
        return Err(CliError::Usage(format!(
            "--root {root}: the map has {} roots",
            spec.roots.len()
        )));
    }
    write_output(
        out,
        &json(&estimate_basin_area(&spec, root, radii, resolution)),
    )
}

#[derive(Serialize)]
struct ConjugacyReport {
    first: Normalized,
    second: Normalized,
    #[serde(flatten)]
    result: ConjugacyResult,
}

pub fn cmd_conjugacy(a: &Path, b: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let (sa, sb) = (config::load_spec(a)?, config::load_spec(b)?);
    let (na, nb) = (normalize(&sa.p, &sa.q), normalize(&sb.p, &sb.q));
    let fa = build_newton(&na.p, &na.q)?;
    let fb = build_newton(&nb.p, &nb.q)?;
    let result = affine_conjugacy_test(&fa, &fb, TAU_CONJ);
    write_output(
        out,
        &json(&ConjugacyReport {
            first: na,
            second: nb,
            result,
        }),
    )
}

pub fn cmd_verify(suite: &str, seed: u64, out: Option<&Path>) -> Result<(), CliError> {
    let reports = verify::run(suite, seed).map_err(|e| {
        CliError::Usage(format!(
            "{e}; available: all, {}",
            verify::SUITES.join(", ")
        ))
    })?;
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!(
            "{} {} ({:.2}s)\n",
            if r.pass { "PASS" } else { "FAIL" },
            r.suite,
            r.seconds
        ));
        for c in &r.checks {
            text.push_str(&format!(
                "  {} {}: {}\n",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
    }
    write_output(out, text.as_bytes())?;
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "verification suite {suite} failed"
        )))
    }
}
