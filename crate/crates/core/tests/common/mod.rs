//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use newton_atlas::algebra::{Complex, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Horner evaluation of ascending coefficients with the first derivative.
pub fn horner(coeffs: &[Complex], z: Complex) -> (Complex, Complex) {
    let mut v = c(0.0, 0.0);
    let mut dv = c(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

/// Second derivative as well, for `N′`.
pub fn horner2(coeffs: &[Complex], z: Complex) -> (Complex, Complex, Complex) {
    let mut v = c(0.0, 0.0);
    let mut dv = c(0.0, 0.0);
    let mut ddv = c(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        ddv = ddv * z + dv * 2.0;
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv, ddv)
}

/// `z − p/(p′ + p q′)` straight from the coefficients.
pub fn newton_direct(p: &[Complex], q: &[Complex], z: Complex) -> Complex {
    let (pv, dp) = horner(p, z);
    let (_, dq) = horner(q, z);
    z - pv / (dp + pv * dq)
}

/// `N′ = p (q′ D + D′) / D²` with `D = p′ + p q′`.
pub fn newton_derivative_direct(p: &[Complex], q: &[Complex], z: Complex) -> Complex {
    let (pv, dp, ddp) = horner2(p, z);
    let (_, dq, ddq) = horner2(q, z);
    let d = dp + pv * dq;
    let dd = ddp + dp * dq + pv * ddq;
    pv * (dq * d + dd) / (d * d)
}

/// Chordal distance on the Riemann sphere; non-finite values stand for ∞.
pub fn chordal(a: Complex, b: Complex) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (false, false) => 0.0,
        (false, true) => 2.0 / (1.0 + b.norm_sqr()).sqrt(),
        (true, false) => 2.0 / (1.0 + a.norm_sqr()).sqrt(),
        (true, true) if a.norm() > 1.0 && b.norm() > 1.0 => {
            let (x, y) = (a.inv(), b.inv());
            2.0 * (x - y).norm() / ((1.0 + x.norm_sqr()) * (1.0 + y.norm_sqr())).sqrt()
        }
        (true, true) => 2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt(),
    }
}

/// Five-point central difference.
pub fn derivative5(f: impl Fn(Complex) -> Complex, z: Complex, h: f64) -> Complex {
    let h = c(h, 0.0);
    ((f(z - h * 2.0) - f(z + h * 2.0)) + (f(z + h) - f(z - h)) * 8.0) / (h * 12.0)
}

/// A map built from chosen roots, so its roots and degrees are known exactly.
#[derive(Clone, Debug)]
pub struct Sample {
    pub p: Polynomial,
    pub q: Polynomial,
    pub roots: Vec<Complex>,
    pub m: usize,
    pub n: usize,
}

impl Sample {
    pub fn expected_degree(&self) -> usize {
        if self.n == 0 {
            self.m
        } else {
            self.m + self.n
        }
    }
}

pub fn random_unit(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex {
    Complex::from_polar(
        rng.gen_range(lo..hi),
        rng.gen_range(0.0..std::f64::consts::TAU),
    )
}

/// Roots in the disk of radius 1.5 at pairwise distance at least `sep`.
pub fn separated_roots(rng: &mut ChaCha8Rng, m: usize, sep: f64) -> Vec<Complex> {
    let mut roots: Vec<Complex> = Vec::with_capacity(m);
    while roots.len() < m {
        let z = Complex::from_polar(
            1.5 * rng.gen::<f64>().sqrt(),
            rng.gen_range(0.0..std::f64::consts::TAU),
        );
        if roots.iter().all(|r| (r - z).norm() >= sep) {
            roots.push(z);
        }
    }
    roots
}

pub fn sample(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Sample {
    let roots = separated_roots(rng, m, 0.3);
    let lead = random_unit(rng, 0.5, 2.0);
    let p = Polynomial::from_roots(&roots).scale(lead);
    let q = if n == 0 {
        Polynomial::zero()
    } else {
        let mut coeffs = vec![c(0.0, 0.0)];
        coeffs.extend((1..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        coeffs.push(random_unit(rng, 0.5, 1.5));
        Polynomial::new(coeffs)
    };
    Sample { p, q, roots, m, n }
}

/// `count` samples with `q = 0`, `2 ≤ m ≤ 8`, then `count` with
/// `1 ≤ n ≤ 4`, `1 ≤ m ≤ 6`, `m + n ≥ 3`.
pub fn samples(seed: u64, count: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Sample> = (0..count)
        .map(|_| {
            let m = rng.gen_range(2..=8);
            sample(&mut rng, m, 0)
        })
        .collect();
    while out.len() < 2 * count {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(1..=6);
        if m + n >= 3 {
            out.push(sample(&mut rng, m, n));
        }
    }
    out
}

/// Euclidean projection of `z` onto a polyline, measured chordally.
pub fn chordal_to_polyline(z: Complex, line: &[Complex]) -> f64 {
    if line.len() == 1 {
        return chordal(z, line[0]);
    }
    line.windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let ab = b - a;
            let t = if ab.norm_sqr() == 0.0 {
                0.0
            } else {
                (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0)
            };
            chordal(z, a + ab * t)
        })
        .fold(f64::INFINITY, f64::min)
}
