//! Simultaneous root finding (Aberth–Ehrlich) with multiplicity clustering.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, Complex, Polynomial};

/// Sweep budget for the simultaneous iteration.
pub const MAX_SWEEPS: usize = 200;

/// Base cluster radius, relative to the root scale.
pub const TAU_CLUSTER: f64 = 1e-6;

/// A root with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    #[serde(with = "super::complex_pair")]
    pub value: Complex,
    pub multiplicity: usize,
}

/// Fujiwara's bound on the moduli of the roots.
pub fn fujiwara_bound(p: &Polynomial) -> f64 {
    let n = p.deg();
    let lead = p.leading();
    let mut bound: f64 = 0.0;
    for i in 1..=n {
        let mut ratio = (p.coeff(n - i) / lead).norm();
        if i == n {
            ratio /= 2.0;
        }
        bound = bound.max(ratio.powf(1.0 / i as f64));
    }
    2.0 * bound
}

/// All `deg(p)` roots as unclustered approximations.
///
/// Exact zero roots (vanishing low-order coefficients) are split off first so
/// that `z^k` factors come back exactly.
pub fn raw_roots(p: &Polynomial) -> Result<Vec<Complex>, AlgebraError> {
    let n = match p.degree() {
        Some(n) if n >= 1 => n,
        _ => return Err(AlgebraError::DegreeTooLow),
    };
    let zeros = p.coeffs().iter().take_while(|c| c.norm() == 0.0).count();
    let mut out = vec![Complex::new(0.0, 0.0); zeros];
    if zeros == n {
        return Ok(out);
    }
    let reduced = Polynomial::new(p.coeffs()[zeros..].to_vec()).monic();
    out.extend(aberth(&reduced)?);
    Ok(out)
}

fn aberth(p: &Polynomial) -> Result<Vec<Complex>, AlgebraError> {
    let n = p.deg();
    if n == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    let dp = p.derivative();
    let radius = fujiwara_bound(p).max(f64::MIN_POSITIVE);
    // centre the starting circle on the root centroid
    let centroid = -p.coeff(n - 1) / (n as f64);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let theta = 2.0 * PI * k as f64 / n as f64 + 0.4;
            centroid + Complex::from_polar(radius, theta)
        })
        .collect();
    let mut done = vec![false; n];
    let eps = f64::EPSILON;

    for _ in 0..MAX_SWEEPS {
        let mut all_done = true;
        for k in 0..n {
            if done[k] {
                continue;
            }
            let zk = z[k];
            let (val, _) = p.eval_with_derivative(zk);
            let scale = p.eval_scale(zk);
            if val.norm() <= 4.0 * n as f64 * eps * scale {
                done[k] = true;
                continue;
            }
            all_done = false;
            let der = dp.eval(zk);
            let ratio = val / der;
            let mut sum = Complex::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    let diff = zk - zj;
                    if diff.norm() > 0.0 {
                        sum += diff.inv();
                    }
                }
            }
            let denom = Complex::new(1.0, 0.0) - ratio * sum;
            let step = if denom.norm() > 0.0 && denom.is_finite() {
                ratio / denom
            } else {
                ratio
            };
            if !step.is_finite() {
                // derivative vanished away from a root: nudge off the saddle
                z[k] += Complex::new(radius * 1e-3, radius * 1e-3);
                continue;
            }
            z[k] = zk - step;
            if step.norm() <= eps * z[k].norm() {
                done[k] = true;
            }
        }
        if all_done {
            return Ok(z);
        }
    }
    Err(AlgebraError::NonConvergence { sweeps: MAX_SWEEPS })
}

/// Cluster radius for a prospective cluster of `k` roots at root scale `s`.
///
/// A `k`-fold root is only resolved to about `eps^(1/k)`, so the radius grows
/// with the cluster size.
fn cluster_radius(k: usize, s: f64, tol: f64) -> f64 {
    let attainable = 4.0 * (1e-15_f64).powf(1.0 / k as f64);
    s * tol
        .max(TAU_CLUSTER)
        .max(if k >= 3 { attainable } else { 0.0 })
}

/// Groups approximations into roots with multiplicity.
///
/// A seed absorbs its `j` nearest neighbours when all lie within the radius
/// for a `j+1`-cluster. The centroid is then polished by Newton's method on
/// `p^(k-1)`, where a `k`-fold root is simple.
pub fn cluster_roots(p: &Polynomial, raw: &[Complex], tol: f64) -> Vec<Root> {
    let scale = raw.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut used = vec![false; raw.len()];
    let mut out = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut near: Vec<(usize, f64)> = (0..raw.len())
            .filter(|&j| !used[j])
            .map(|j| (j, (raw[j] - raw[i]).norm()))
            .collect();
        near.sort_by(|a, b| a.1.total_cmp(&b.1));
        let take = (1..=near.len())
            .rev()
            .find(|&j| near[j - 1].1 <= cluster_radius(j + 1, scale, tol))
            .unwrap_or(0);
        let mut members = vec![raw[i]];
        for &(j, _) in &near[..take] {
            used[j] = true;
            members.push(raw[j]);
        }
        let k = members.len();
        let centroid = members.iter().sum::<Complex>() / k as f64;
        let value = if k > 1 {
            polish_multiple(p, centroid, k, cluster_radius(k, scale, tol))
        } else {
            centroid
        };
        out.push(Root {
            value,
            multiplicity: k,
        });
    }
    sort_lexicographic(&mut out);
    out
}

fn polish_multiple(p: &Polynomial, start: Complex, k: usize, radius: f64) -> Complex {
    let mut g = p.clone();
    for _ in 0..k - 1 {
        g = g.derivative();
    }
    let dg = g.derivative();
    let mut z = start;
    for _ in 0..8 {
        let step = g.eval(z) / dg.eval(z);
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    if (z - start).norm() <= radius {
        z
    } else {
        start
    }
}

/// Sorts by real part, then imaginary part, with a small tolerance so that
/// symmetric configurations order reproducibly.
pub fn sort_lexicographic(roots: &mut [Root]) {
    roots.sort_by(|a, b| lex_cmp(a.value, b.value));
}

pub fn lex_cmp(a: Complex, b: Complex) -> std::cmp::Ordering {
    let tol = 1e-9 * (1.0 + a.norm().max(b.norm()));
    if (a.re - b.re).abs() > tol {
        a.re.total_cmp(&b.re)
    } else if (a.im - b.im).abs() > tol {
        a.im.total_cmp(&b.im)
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Roots of `p` with multiplicities summing to `deg(p)`.
///
/// `tol` is the relative clustering radius (the default roots tolerance is
/// [`TAU_CLUSTER`]).
pub fn poly_roots(p: &Polynomial, tol: f64) -> Result<Vec<Root>, AlgebraError> {
    let raw = raw_roots(p)?;
    Ok(cluster_roots(p, &raw, tol))
}
