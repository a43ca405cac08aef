//! Built-in verification suites with pass/fail summaries.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    mobius_conjugate_check, AffineMap, Complex, MobiusMap, Polynomial, RationalMap, TAU_CLUSTER,
};
use crate::classify::{
    access_count_parabolic, affine_conjugacy_test, channel_diagram, check_pcm,
    correspondence_audit, make_marking, normalize, Verdict, TAU_CONJ, TAU_RAY,
};
use crate::dynamics::{
    basin_grid, estimate_basin_area, param_scan, BasinGrid, CaptureParams, Family, ScanRegion,
    Viewport, BUDGET_PARABOLIC, BUDGET_REPELLING,
};
use crate::newton::{
    blaschke_model, build_newton, build_newton_unchecked, chart_multiplier_at_infinity,
    classify_infinity, critical_points, NewtonSpec,
};
use crate::render::render_grid;

/// Suites in the order `all` runs them.
pub const SUITES: [&str; 12] = [
    "mobius",
    "multiplier",
    "superattraction",
    "degree",
    "riemann-hurwitz",
    "channel",
    "examples",
    "scan",
    "blaschke",
    "area",
    "determinism",
    "conjugacy",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport, VerifyError> {
    let start = Instant::now();
    let checks = match name {
        "mobius" => mobius_pairs(seed),
        "multiplier" => multiplier(seed),
        "superattraction" => superattraction(seed),
        "degree" => degree(seed),
        "riemann-hurwitz" => riemann_hurwitz(seed),
        "channel" => channel(),
        "examples" => worked_examples(),
        "scan" => scan(200),
        "blaschke" => blaschke(),
        "area" => area_suite(),
        "determinism" => determinism(),
        "conjugacy" => conjugacy(seed),
        other => return Err(VerifyError::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport {
        suite: name.to_string(),
        pass: checks.iter().all(|c| c.pass),
        seconds: start.elapsed().as_secs_f64(),
        checks,
    })
}

/// Runs every suite, or the single named one (`"all"` selects every suite).
pub fn run(name: &str, seed: u64) -> Result<Vec<SuiteReport>, VerifyError> {
    if name == "all" {
        SUITES.iter().map(|s| run_suite(s, seed)).collect()
    } else {
        Ok(vec![run_suite(name, seed)?])
    }
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// The family `p = z² + c`, `q = z`.
pub fn quadratic_family() -> Family {
    Family::new(
        Polynomial::from_real(&[0.0, 0.0, 1.0]),
        Polynomial::from_real(&[1.0]),
        Polynomial::z(),
        Polynomial::zero(),
    )
}

pub fn family_member(c: f64) -> NewtonSpec {
    build_newton(&Polynomial::from_real(&[c, 0.0, 1.0]), &Polynomial::z()).expect("family member")
}

pub fn cubic() -> NewtonSpec {
    build_newton(
        &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
        &Polynomial::zero(),
    )
    .expect("cubic")
}

fn random_coeff(rng: &mut ChaCha8Rng) -> Complex {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Polynomial {
    let mut coeffs: Vec<Complex> = (0..deg).map(|_| random_coeff(rng)).collect();
    let lead = Complex::from_polar(
        rng.gen_range(0.5..1.5),
        rng.gen_range(0.0..std::f64::consts::TAU),
    );
    coeffs.push(lead);
    Polynomial::new(coeffs)
}

/// Seeded random specs: `count` with `q = 0` and `2 ≤ m ≤ 8`, and `count` with
/// `1 ≤ n ≤ 4`, `1 ≤ m ≤ 6`, `m + n ≥ 3`.
pub fn random_specs(seed: u64, count: usize) -> Vec<NewtonSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * count);
    while out.len() < count {
        let m = rng.gen_range(2..=8);
        if let Ok(spec) = build_newton_unchecked(&random_poly(&mut rng, m), &Polynomial::zero()) {
            out.push(spec);
        }
    }
    while out.len() < 2 * count {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=6);
        if m + n < 3 {
            continue;
        }
        let mut q = random_poly(&mut rng, n);
        q = Polynomial::new([&[c(0.0, 0.0)], &q.coeffs()[1..]].concat());
        if let Ok(spec) = build_newton(&random_poly(&mut rng, m), &q) {
            out.push(spec);
        }
    }
    out
}

/// Both maps `M` satisfy `M∘P = N∘M` with `P` the polynomial model.
fn mobius_pairs(seed: u64) -> Vec<Check> {
    let cubic_map = cubic().map;
    let target = RationalMap {
        num: Polynomial::from_real(&[0.0, 1.5, 0.0, 1.0]),
        den: Polynomial::one(),
        reduced: true,
    };
    let m1 = MobiusMap::new(c(0.0, 0.0), c(0.0, FRAC_1_SQRT_2), c(1.0, 0.0), c(0.0, 0.0))
        .expect("invertible");
    let r1 = mobius_conjugate_check(&m1, &target, &cubic_map, 1000, 1e-10, seed);

    let parabolic = family_member(-0.25).map;
    let target2 = RationalMap {
        num: Polynomial::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)]),
        den: Polynomial::one(),
        reduced: true,
    };
    let m2 =
        MobiusMap::new(c(-0.5, 0.0), c(0.0, 1.0), c(1.0, 0.0), c(0.0, 0.0)).expect("invertible");
    let r2 = mobius_conjugate_check(&m2, &target2, &parabolic, 1000, 1e-10, seed);
    vec![
        check(
            "z -> i/(sqrt2 z) carries w^3 + 1.5 w to the cubic Newton map",
            r1.certified,
            format!("residual {:.2e}", r1.residual),
        ),
        check(
            "z -> i/z - 1/2 carries w^3 - i w^2 + w to the c = -1/4 map",
            r2.certified,
            format!("residual {:.2e}", r2.residual),
        ),
    ]
}

fn multiplier(seed: u64) -> Vec<Check> {
    let specs = random_specs(seed, 50);
    let mut worst_rep: f64 = 0.0;
    let mut worst_par: f64 = 0.0;
    for spec in &specs {
        let numeric = chart_multiplier_at_infinity(spec);
        let analytic = classify_infinity(spec).multiplier;
        let err = (numeric - analytic).norm();
        if spec.n == 0 {
            worst_rep = worst_rep.max(err);
        } else {
            worst_par = worst_par.max((numeric - 1.0).norm());
        }
    }
    vec![
        check(
            "repelling m/(m-1)",
            worst_rep < 1e-6,
            format!("max error {worst_rep:.2e} over 50 specs"),
        ),
        check(
            "parabolic multiplier 1",
            worst_par < 1e-6,
            format!("max error {worst_par:.2e} over 50 specs"),
        ),
    ]
}

fn superattraction(seed: u64) -> Vec<Check> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for spec in random_specs(seed, 50) {
        for r in spec.roots.iter().filter(|r| r.multiplicity == 1) {
            worst = worst.max(spec.derivative(r.value).norm());
            count += 1;
        }
    }
    vec![check(
        "|N'| at simple roots",
        worst < 1e-8,
        format!("max {worst:.2e} over {count} roots"),
    )]
}

fn degree(seed: u64) -> Vec<Check> {
    let specs = random_specs(seed, 50);
    let bad = specs
        .iter()
        .filter(|s| s.d != if s.n == 0 { s.m } else { s.m + s.n } || s.degenerate)
        .count();
    let flagged = build_newton_unchecked(
        &Polynomial::from_real(&[0.0, 0.0, 1.0]),
        &Polynomial::from_real(&[0.0, 1.0]),
    )
    .map(|s| s.degenerate || s.d == 3)
    .unwrap_or(false);
    vec![
        check(
            "d = m + n or m",
            bad == 0,
            format!("{bad} of {} specs off", specs.len()),
        ),
        check("cancellations are flagged", flagged, "p = z^2, q = z"),
    ]
}

fn riemann_hurwitz(seed: u64) -> Vec<Check> {
    let mut specs = random_specs(seed, 50);
    specs.push(cubic());
    specs.push(family_member(-0.25));
    specs.push(family_member(2.0));
    let mut bad = 0;
    for spec in &specs {
        let total: usize = critical_points(spec, TAU_CLUSTER)
            .map(|cp| cp.iter().map(|c| c.local_degree - 1).sum())
            .unwrap_or(usize::MAX);
        if total != 2 * spec.d - 2 {
            bad += 1;
        }
    }
    vec![check(
        "sum of (k-1) = 2d - 2",
        bad == 0,
        format!("{bad} of {} specs off", specs.len()),
    )]
}

fn channel() -> Vec<Check> {
    match channel_diagram(&cubic()) {
        Ok(diagram) => {
            let census: Vec<usize> = diagram.basins.iter().map(|b| b.rays.len()).collect();
            let worst = diagram
                .basins
                .iter()
                .flat_map(|b| &b.rays)
                .map(|r| r.invariance_residual)
                .fold(0.0, f64::max);
            vec![
                check(
                    "4 rays",
                    diagram.ray_count() == 4,
                    format!("{} rays", diagram.ray_count()),
                ),
                check(
                    "census over -1, 0, 1",
                    census == [1, 2, 1],
                    format!("{census:?}"),
                ),
                check(
                    "forward invariance",
                    diagram.all_invariant(),
                    format!("max residual {worst:.2e} (tau {TAU_RAY})"),
                ),
            ]
        }
        Err(e) => vec![check("channel diagram", false, e.to_string())],
    }
}

fn worked_examples() -> Vec<Check> {
    let mut out = Vec::new();
    for (cv, accesses) in [(-0.25, 1), (2.0, 2)] {
        let spec = family_member(cv);
        let verdict =
            check_pcm(&spec, BUDGET_PARABOLIC, CaptureParams::default()).map(|r| r.verdict);
        out.push(check(
            format!("c = {cv} consistent with PCM"),
            verdict == Ok(Verdict::ConsistentWithPcm),
            format!("{verdict:?}"),
        ));
        let got = access_count_parabolic(&spec, 0, BUDGET_PARABOLIC);
        out.push(check(
            format!("c = {cv} has {accesses} accesses"),
            got == Ok(accesses),
            format!("{got:?}"),
        ));
    }
    let pcf = cubic();
    let diagram = match channel_diagram(&pcf) {
        Ok(d) => d,
        Err(e) => {
            out.push(check("channel diagram", false, e.to_string()));
            return out;
        }
    };
    // basins in lexicographic order: -1, 0, 1
    for (basin, cv, expect) in [(1, 2.0, true), (2, -0.25, true), (2, 2.0, false)] {
        let result = make_marking(&diagram, &[(basin, 0)])
            .and_then(|m| correspondence_audit(&pcf, &m, &family_member(cv), BUDGET_PARABOLIC));
        let pass = result.as_ref().map(|r| r.pass);
        out.push(check(
            format!("audit basin {basin} with c = {cv}"),
            pass == Ok(expect),
            format!("expected pass = {expect}, got {pass:?}"),
        ));
    }
    out
}

/// Scan of `[−1, 3]×[−1, 1]` at `res × res`.
pub fn scan(res: usize) -> Vec<Check> {
    let result = param_scan(
        &quadratic_family(),
        ScanRegion::new((-1.0, 3.0), (-1.0, 1.0)),
        (res, res),
        BUDGET_PARABOLIC,
    );
    let flagged_near = |target: Complex| {
        result
            .samples
            .iter()
            .any(|s| s.pcm_flag && s.cell.contains(target, 1e-12))
    };
    let flags = result.flagged().count();
    vec![
        check(
            "cell containing -1/4 flagged",
            flagged_near(c(-0.25, 0.0)),
            format!("{flags} flags"),
        ),
        check(
            "cell containing 2 flagged",
            flagged_near(c(2.0, 0.0)),
            format!("{flags} flags"),
        ),
    ]
}

fn blaschke() -> Vec<Check> {
    (2..=6)
        .map(|k| match blaschke_model(k) {
            Ok(model) => {
                let r = model.check(100);
                check(
                    format!("P_{k}"),
                    r.passes(1e-12, 1e-8, 1e-12),
                    format!(
                        "|P(1)-1| {:.1e}, |P'(1)-1| {:.1e}, circle {:.1e}, degree at 0 {}",
                        r.fixed_at_one, r.multiplier_at_one, r.circle, r.local_degree_at_zero
                    ),
                )
            }
            Err(e) => check(format!("P_{k}"), false, e.to_string()),
        })
        .collect()
}

pub const AREA_RADII: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
pub const AREA_RESOLUTION: usize = 800;

fn area_suite() -> Vec<Check> {
    let finite = build_newton(
        &Polynomial::from_real(&[-1.0, 1.0]),
        &Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]),
    )
    .expect("p = z - 1, q = z^3");
    let a = estimate_basin_area(&finite, 0, &AREA_RADII, AREA_RESOLUTION);
    let spec = cubic();
    let b = estimate_basin_area(&spec, 2, &AREA_RADII, AREA_RESOLUTION);
    vec![
        check(
            "deg q = 3 area saturates",
            a.saturated,
            format!("{:?}", a.areas),
        ),
        check(
            "cubic basin area grows",
            !b.saturated,
            format!("{:?}", b.areas),
        ),
    ]
}

/// The framings of the cubic and the `c = −1/4` figures.
pub fn figure_jobs() -> [(NewtonSpec, Viewport); 2] {
    [
        (cubic(), Viewport::new(c(0.0, 0.0), 4.0, 4.0)),
        (family_member(-0.25), Viewport::new(c(-0.5, 0.0), 5.0, 4.0)),
    ]
}

fn grid_with_threads(
    spec: &NewtonSpec,
    vp: Viewport,
    res: (usize, usize),
    budget: usize,
    threads: usize,
) -> BasinGrid {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map(|pool| pool.install(|| basin_grid(spec, vp, res, budget)))
            .unwrap_or_else(|_| basin_grid(spec, vp, res, budget))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        basin_grid(spec, vp, res, budget)
    }
}

fn determinism() -> Vec<Check> {
    let mut out = Vec::new();
    for (i, (spec, vp)) in figure_jobs().into_iter().enumerate() {
        let budget = if spec.n == 0 {
            BUDGET_REPELLING
        } else {
            BUDGET_PARABOLIC
        };
        let a = render_grid(&grid_with_threads(&spec, vp, (200, 160), budget, 1)).to_ppm();
        let b = render_grid(&grid_with_threads(&spec, vp, (200, 160), budget, 4)).to_ppm();
        out.push(check(
            format!("figure {i}: 1 and 4 workers byte-identical"),
            a == b,
            format!("{} bytes", a.len()),
        ));
        let coarse = basin_grid(&spec, vp, (200, 160), budget).label_fractions();
        let fine = basin_grid(&spec, vp, (400, 320), budget).label_fractions();
        let drift = coarse
            .iter()
            .map(|(l, f)| {
                let g = fine.iter().find(|(m, _)| m == l).map_or(0.0, |x| x.1);
                (f - g).abs()
            })
            .fold(0.0, f64::max);
        out.push(check(
            format!("figure {i}: label fractions under doubling"),
            drift < 0.02,
            format!("max drift {drift:.4}"),
        ));
    }
    out
}

fn conjugacy(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut detected = 0;
    let mut witnesses_ok = 0;
    let pairs = 20;
    for _ in 0..pairs {
        let n = rng.gen_range(1..=3);
        let m = rng.gen_range(1..=4).max(3 - n.min(2));
        let p = random_poly(&mut rng, m);
        let q = random_poly(&mut rng, n);
        let a = Complex::from_polar(
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        let zero = c(0.0, 0.0);
        let (pa, qa) = (p.compose_affine(a, zero), q.compose_affine(a, zero));
        let (nf, ng) = (normalize(&p, &q), normalize(&pa, &qa));
        let (Ok(f), Ok(g)) = (build_newton(&nf.p, &nf.q), build_newton(&ng.p, &ng.q)) else {
            continue;
        };
        let res = affine_conjugacy_test(&f, &g, TAU_CONJ);
        if res.conjugate {
            detected += 1;
            // g = M f M⁻¹ with M = T_g⁻¹ ∘ φ ∘ T_f, φ(z) = z / a
            let expected = ng
                .witness
                .inverse()
                .compose(&AffineMap {
                    scale: a.inv(),
                    offset: zero,
                })
                .compose(&nf.witness);
            if res.witness.is_some_and(|w| w.distance(&expected) < 1e-6) {
                witnesses_ok += 1;
            }
        }
    }
    let refuted =
        !affine_conjugacy_test(&family_member(-0.25), &family_member(2.0), TAU_CONJ).conjugate;
    let mut idempotent = 0;
    let specs = random_specs(seed ^ 0x5eed, 50);
    for spec in &specs {
        let once = normalize(&spec.p, &spec.q);
        let twice = normalize(&once.p, &once.q);
        if twice.witness.distance(&AffineMap::identity()) < 1e-9
            && twice.p.relative_distance(&once.p) < 1e-9
        {
            idempotent += 1;
        }
    }
    vec![
        check(
            "scaling pairs detected",
            detected == pairs,
            format!("{detected} of {pairs}"),
        ),
        check(
            "witnesses correct",
            witnesses_ok == pairs,
            format!("{witnesses_ok} of {pairs}"),
        ),
        check("c = -1/4 and c = 2 refuted", refuted, ""),
        check(
            "normalize idempotent",
            idempotent == specs.len(),
            format!("{idempotent} of {}", specs.len()),
        ),
    ]
}
