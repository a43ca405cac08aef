//! Property tests of the module invariants.

mod common;

use common::{c, chordal, derivative5, horner, newton_direct, sample, separated_roots};
use newton_atlas::algebra::{
    mobius_conjugate_check, poly_roots, AffineMap, Complex, ExtComplex, MobiusMap, Polynomial,
    RationalMap, TAU_CLUSTER,
};
use newton_atlas::classify::{
    access_count_parabolic, affine_conjugacy_test, channel_diagram, correspondence_audit,
    make_marking, normalize, TAU_CONJ,
};
use newton_atlas::dynamics::{
    basin_grid, estimate_basin_area, CaptureParams, Fate, OrbitEngine, Viewport, BUDGET_PARABOLIC,
};
use newton_atlas::newton::{
    build_newton, build_newton_unchecked, chart_multiplier_at_infinity, classify_infinity,
    critical_points, fixed_points, petal_directions, NewtonSpec,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(r: f64) -> impl Strategy<Value = Complex> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(complex(2.0), 1..=max_deg + 1).prop_map(Polynomial::new)
}

fn spec_from(seed: u64, m: usize, n: usize) -> (common::Sample, NewtonSpec) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = sample(&mut rng, m, n);
    let spec = build_newton_unchecked(&s.p, &s.q).expect("sample map");
    (s, spec)
}

fn member(cv: f64) -> NewtonSpec {
    build_newton(&Polynomial::from_real(&[cv, 0.0, 1.0]), &Polynomial::z()).unwrap()
}

fn cubic() -> NewtonSpec {
    build_newton(
        &Polynomial::from_real(&[0.0, -1.0, 0.0, 1.0]),
        &Polynomial::zero(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_matches_finite_differences(p in poly(8), z in complex(1.5)) {
        let exact = p.derivative().eval(z);
        let numeric = derivative5(|w| p.eval(w), z, 1e-3);
        let scale = 1.0 + p.eval_scale(z);
        prop_assert!((exact - numeric).norm() <= 1e-6 * scale.max(exact.norm()), "{exact} vs {numeric}");
    }

    #[test]
    fn roots_round_trip(seed in any::<u64>(), m in 1usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roots = separated_roots(&mut rng, m, 0.3);
        let found = poly_roots(&Polynomial::from_roots(&roots), TAU_CLUSTER).unwrap();
        prop_assert_eq!(found.len(), m);
        for r in &roots {
            let best = found.iter().map(|f| (f.value - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8, "root {} missed by {:.2e}", r, best);
        }
    }

    #[test]
    fn reduced_and_raw_forms_agree(r in complex(1.0), s in complex(1.0), z in complex(2.0)) {
        prop_assume!((r - s).norm() > 0.3 && (z - r).norm() > 0.05 && (z - s).norm() > 0.05);
        let p = Polynomial::from_roots(&[r, r, s]);
        let spec = build_newton_unchecked(&p, &Polynomial::zero()).unwrap();
        let raw = RationalMap { num: spec.raw_num.clone(), den: spec.raw_den.clone(), reduced: false };
        let a = spec.map.eval(ExtComplex::Finite(z)).unwrap();
        let b = raw.eval(ExtComplex::Finite(z)).unwrap();
        let (ExtComplex::Finite(a), ExtComplex::Finite(b)) = (a, b) else {
            return Err(TestCaseError::fail("unexpected pole"));
        };
        prop_assert!(chordal(a, b) < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn mobius_check_is_symmetric(seed in any::<u64>(), eps in prop_oneof![Just(0.0), 1e-3..1e-1]) {
        let i = c(0.0, 1.0);
        let m = MobiusMap::new(c(-0.5, 0.0), i * (1.0 + eps), c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let model = RationalMap {
            num: Polynomial::new(vec![c(0.0, 0.0), c(1.0, 0.0), -i, c(1.0, 0.0)]),
            den: Polynomial::one(),
            reduced: true,
        };
        let newton = member(-0.25).map;
        let forward = mobius_conjugate_check(&m, &model, &newton, 200, 1e-10, seed);
        let backward = mobius_conjugate_check(&m.inverse(), &newton, &model, 200, 1e-10, seed);
        prop_assert_eq!(forward.certified, backward.certified);
        prop_assert_eq!(forward.certified, eps == 0.0);
    }

    #[test]
    fn newton_map_matches_formula(seed in any::<u64>(), m in 1usize..=6, n in 0usize..=4, z in complex(2.0)) {
        prop_assume!(m + n >= 2);
        let (s, spec) = spec_from(seed, m, n);
        let direct = newton_direct(s.p.coeffs(), s.q.coeffs(), z);
        prop_assert!(chordal(spec.apply(z), direct) < 1e-9);
    }

    #[test]
    fn degree_law(seed in any::<u64>(), m in 1usize..=6, n in 0usize..=4) {
        prop_assume!(m + n >= 2);
        let (s, spec) = spec_from(seed, m, n);
        prop_assert_eq!(spec.d, s.expected_degree());
        prop_assert!(!spec.degenerate);
    }

    #[test]
    fn fixed_points_are_the_roots(seed in any::<u64>(), m in 2usize..=6, n in 0usize..=3) {
        let (s, spec) = spec_from(seed, m, n);
        let finite: Vec<Complex> = fixed_points(&spec, TAU_CLUSTER)
            .unwrap()
            .iter()
            .filter_map(|f| match f.location {
                ExtComplex::Finite(z) => Some(z),
                ExtComplex::Infinity(_) => None,
            })
            .collect();
        prop_assert_eq!(finite.len(), s.roots.len());
        for r in &s.roots {
            let best = finite.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8);
            prop_assert!(spec.derivative(*r).norm() < 1e-8);
        }
    }

    #[test]
    fn chart_multiplier_matches_analytic(seed in any::<u64>(), m in 2usize..=8) {
        let (s, spec) = spec_from(seed, m, 0);
        let g = |w: Complex| newton_direct(s.p.coeffs(), s.q.coeffs(), w.inv()).inv();
        let numeric = derivative5(g, c(0.0, 0.0), 1e-3);
        let analytic = classify_infinity(&spec).multiplier;
        prop_assert!((analytic - c(m as f64 / (m as f64 - 1.0), 0.0)).norm() < 1e-12);
        prop_assert!((numeric - analytic).norm() < 1e-6);
        prop_assert!((chart_multiplier_at_infinity(&spec) - analytic).norm() < 1e-6);
    }

    #[test]
    fn riemann_hurwitz(seed in any::<u64>(), m in 1usize..=6, n in 0usize..=4) {
        prop_assume!(m + n >= 2);
        let (_, spec) = spec_from(seed, m, n);
        let total: usize = critical_points(&spec, TAU_CLUSTER).unwrap().iter().map(|cp| cp.local_degree - 1).sum();
        prop_assert_eq!(total, 2 * spec.d - 2);
    }

    #[test]
    fn scaling_identity(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=3, a in complex(2.0), z in complex(2.0)) {
        prop_assume!(a.norm() > 0.3);
        let (s, _) = spec_from(seed, m, n);
        let zero = c(0.0, 0.0);
        let (pa, qa) = (s.p.compose_affine(a, zero), s.q.compose_affine(a, zero));
        let lhs = newton_direct(pa.coeffs(), qa.coeffs(), z);
        let rhs = newton_direct(s.p.coeffs(), s.q.coeffs(), a * z) / a;
        prop_assert!(chordal(lhs, rhs) < 1e-9);
    }

    #[test]
    fn normalization_is_idempotent(seed in any::<u64>(), m in 1usize..=6, n in 0usize..=4) {
        prop_assume!(m + n >= 2);
        let (s, _) = spec_from(seed, m, n);
        let once = normalize(&s.p, &s.q);
        let twice = normalize(&once.p, &once.q);
        prop_assert!(twice.witness.distance(&AffineMap::identity()) < 1e-9);
        prop_assert!(twice.p.relative_distance(&once.p) < 1e-9);
        prop_assert!(twice.q.relative_distance(&once.q) < 1e-9);
    }

    #[test]
    fn conjugacy_is_symmetric(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=3, a in complex(2.0), related in any::<bool>()) {
        prop_assume!(a.norm() > 0.3 && m + n >= 3);
        let (s, _) = spec_from(seed, m, n);
        let (p2, q2) = if related {
            (s.p.compose_affine(a, c(0.0, 0.0)), s.q.compose_affine(a, c(0.0, 0.0)))
        } else {
            let (t, _) = spec_from(seed.wrapping_add(1), m, n);
            (t.p, t.q)
        };
        let (nf, ng) = (normalize(&s.p, &s.q), normalize(&p2, &q2));
        let f = build_newton(&nf.p, &nf.q).unwrap();
        let g = build_newton(&ng.p, &ng.q).unwrap();
        let fg = affine_conjugacy_test(&f, &g, TAU_CONJ);
        let gf = affine_conjugacy_test(&g, &f, TAU_CONJ);
        prop_assert_eq!(fg.conjugate, gf.conjugate);
        prop_assert_eq!(fg.conjugate, related);
        if let (Some(u), Some(v)) = (fg.witness, gf.witness) {
            prop_assert!(fg.residual <= TAU_CONJ && gf.residual <= TAU_CONJ);
            prop_assert!(u.compose(&v).distance(&AffineMap::identity()) < 1e-9);
        }
    }

    #[test]
    fn markings_hold_one_ray_per_basin(choices in prop::collection::vec((0usize..4, 0usize..3), 0..5)) {
        let diagram = channel_diagram(&cubic()).unwrap();
        if let Ok(marking) = make_marking(&diagram, &choices) {
            prop_assert_eq!(marking.len(), choices.len());
            let mut basins: Vec<usize> = marking.rays.iter().map(|r| r.basin).collect();
            basins.sort();
            basins.dedup();
            prop_assert_eq!(basins.len(), marking.len());
        } else {
            let mut basins: Vec<usize> = choices.iter().map(|x| x.0).collect();
            basins.sort();
            let duplicate = basins.windows(2).any(|w| w[0] == w[1]);
            let out_of_range = choices.iter().any(|&(b, r)| {
                diagram.basins.get(b).is_none_or(|basin| r >= basin.rays.len())
            });
            prop_assert!(duplicate || out_of_range);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fate_is_stable_under_budget_doubling(z in complex(3.0), which in 0usize..3) {
        let spec = [cubic(), member(-0.25), member(2.0)][which].clone();
        let engine = OrbitEngine::new(&spec, CaptureParams::default());
        let budget = if spec.n == 0 { 500 } else { 5000 };
        let (short, _) = engine.fate(z, budget);
        let (long, _) = engine.fate(z, 2 * budget);
        if short != Fate::Undecided {
            prop_assert_eq!(short, long);
        }
    }

    #[test]
    fn captured_orbits_contract(z in complex(3.0)) {
        let spec = cubic();
        let engine = OrbitEngine::new(&spec, CaptureParams::default());
        let rec = engine.run(z, 5000, 5001);
        if let Fate::Root(i) = rec.fate {
            let root = spec.root_values()[i];
            let last = *rec.trace.unwrap().last().unwrap();
            prop_assert!((last - root).norm() <= 1e-6 * (1.0 + spec.root_scale()));
            let mut w = last;
            let mut disp = (spec.apply(w) - w).norm();
            for _ in 0..5 {
                w = spec.apply(w);
                let next = (spec.apply(w) - w).norm();
                prop_assert!(next <= disp || next < 1e-300);
                disp = next;
            }
        }
    }

    #[test]
    fn petal_orbits_follow_their_direction(r in 3.0f64..30.0, t in 0.0f64..std::f64::consts::TAU, cv in prop_oneof![Just(-0.25), Just(2.0)]) {
        let spec = member(cv);
        let engine = OrbitEngine::new(&spec, CaptureParams::default());
        let start = Complex::from_polar(r, t);
        let rec = engine.run(start, BUDGET_PARABOLIC, BUDGET_PARABOLIC + 1);
        if let Fate::Petal(j) = rec.fate {
            let theta = petal_directions(&spec).unwrap()[j];
            let last = *rec.trace.unwrap().last().unwrap();
            let diff = (last.arg() - theta + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
            prop_assert!(diff.abs() <= 10f64.to_radians() + 1e-12, "arg {} vs petal {}", last.arg(), theta);
        }
    }

    #[test]
    fn basin_grids_ignore_worker_count(cx in -1.0f64..1.0, cy in -1.0f64..1.0, w in 0.5f64..4.0, which in 0usize..2) {
        let spec = [cubic(), member(2.0)][which].clone();
        let vp = Viewport::new(c(cx, cy), w, w * 0.75);
        let budget = if spec.n == 0 { 5000 } else { 20_000 };
        let pool = |k: usize| rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
        let a = pool(1).install(|| basin_grid(&spec, vp, (24, 18), budget));
        let b = pool(3).install(|| basin_grid(&spec, vp, (24, 18), budget));
        prop_assert_eq!(a.labels.len(), 24 * 18);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn areas_grow_with_radius(mut radii in prop::collection::vec(0.5f64..8.0, 1..5)) {
        radii.sort_by(f64::total_cmp);
        let spec = cubic();
        let root = spec.root_values().iter().position(|r| (r - c(1.0, 0.0)).norm() < 1e-9).unwrap();
        let est = estimate_basin_area(&spec, root, &radii, 80);
        prop_assert_eq!(est.areas.len(), radii.len());
        prop_assert!(est.areas.windows(2).all(|w| w[0] <= w[1]));
    }
}

fn cubic_q_spec() -> NewtonSpec {
    build_newton(
        &Polynomial::from_real(&[-1.0, 1.0]),
        &Polynomial::from_real(&[0.0, 0.0, 0.0, 1.0]),
    )
    .unwrap()
}

#[test]
fn saturated_area_is_stable_under_resolution_doubling() {
    // pixels of 0.05 and 0.025 resolve the basin body; coarser grids lose
    // the channels to infinity and undercount
    let spec = cubic_q_spec();
    let radii = [5.0, 10.0, 20.0, 40.0];
    let coarse = estimate_basin_area(&spec, 0, &radii, 1600);
    let fine = estimate_basin_area(&spec, 0, &radii, 3200);
    assert!(coarse.saturated && fine.saturated);
    let (a, b) = (coarse.areas[3], fine.areas[3]);
    assert!((a - b).abs() < 0.02 * b, "{a} vs {b}");
}

#[test]
fn basin_channel_narrows_like_inverse_square() {
    // the immediate basin of 1 reaches infinity along the positive real axis;
    // a width of order r^-2 makes the area outside |z| = R of order 1/R
    let spec = cubic_q_spec();
    let engine = OrbitEngine::new(&spec, CaptureParams::default());
    let inside = |r: f64, t: f64| {
        engine.fate(Complex::from_polar(r, t), BUDGET_PARABOLIC).0 == Fate::Root(0)
    };
    for r in [5.0, 10.0, 20.0] {
        let half_width = |dir: f64| {
            let (mut lo, mut hi) = (0.0, 1e-9);
            while inside(r, dir * hi) && hi < 1.0 {
                lo = hi;
                hi *= 2.0;
            }
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if inside(r, dir * mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        assert!(inside(r, 0.0));
        let width = r * (half_width(1.0) + half_width(-1.0));
        assert!(
            (1.0..2.5).contains(&(width * r * r)),
            "r = {r}: width {width:e}"
        );
    }
}

#[test]
fn ray_census_matches_local_degrees() {
    for coeffs in [
        &[0.0, -1.0, 0.0, 1.0][..],
        &[-1.0, 0.0, 0.0, 1.0],
        &[-1.0, 0.0, 0.0, 0.0, 1.0],
    ] {
        let spec = build_newton(&Polynomial::from_real(coeffs), &Polynomial::zero()).unwrap();
        let crit = critical_points(&spec, TAU_CLUSTER).unwrap();
        let diagram = channel_diagram(&spec).unwrap();
        let mut total = 0;
        for basin in &diagram.basins {
            let k = crit
                .iter()
                .find(|cp| {
                    cp.finite()
                        .is_some_and(|z| (z - basin.fixed_point).norm() < 1e-8)
                })
                .map_or(1, |cp| cp.local_degree);
            assert_eq!(
                basin.rays.len(),
                k - 1,
                "{coeffs:?} at {}",
                basin.fixed_point
            );
            total += k - 1;
        }
        assert_eq!(diagram.ray_count(), total);
        assert!(diagram.all_invariant());
    }
}

#[test]
fn passing_audits_count_accesses() {
    let pcf = cubic();
    let diagram = channel_diagram(&pcf).unwrap();
    for basin in 0..diagram.basins.len() {
        for cv in [-0.25, 2.0] {
            let pcm = member(cv);
            let marking = make_marking(&diagram, &[(basin, 0)]).unwrap();
            let report = correspondence_audit(&pcf, &marking, &pcm, BUDGET_PARABOLIC).unwrap();
            if report.pass {
                let accesses: usize = (0..pcm.n)
                    .map(|j| access_count_parabolic(&pcm, j, BUDGET_PARABOLIC).unwrap())
                    .sum();
                let expected: usize = marking.rays.iter().map(|r| r.local_degree - 1).sum();
                assert_eq!(accesses, expected, "basin {basin}, c = {cv}");
            }
        }
    }
}

#[test]
fn horner_oracle_agrees_with_polynomial_eval() {
    let p = Polynomial::from_real(&[1.0, -2.0, 0.5, 3.0]);
    let z = c(0.3, -0.7);
    let (v, dv) = horner(p.coeffs(), z);
    assert!((v - p.eval(z)).norm() < 1e-14);
    assert!((dv - p.derivative().eval(z)).norm() < 1e-14);
}
