//! Parabolic Blaschke products `P_k(z) = (z^k + a)/(1 + a z^k)`, `a = (k−1)/(k+1)`.

use serde::{Deserialize, Serialize};

use super::NewtonError;
use crate::algebra::{numeric_derivative, poly_roots, Complex, Polynomial, RationalMap};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeModel {
    pub k: usize,
    pub a: f64,
    pub map: RationalMap,
}

/// Residuals of the model's defining properties.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeCheck {
    pub k: usize,
    /// `|P(1) − 1|`.
    pub fixed_at_one: f64,
    /// `|P′(1) − 1|` by five-point differences.
    pub multiplier_at_one: f64,
    /// `max | |P(e^{iθ})| − 1 |` over the samples.
    pub circle: f64,
    /// Local degree of `P` at 0.
    pub local_degree_at_zero: usize,
}

impl BlaschkeCheck {
    pub fn passes(&self, tol_fixed: f64, tol_multiplier: f64, tol_circle: f64) -> bool {
        self.fixed_at_one <= tol_fixed
            && self.multiplier_at_one <= tol_multiplier
            && self.circle <= tol_circle
            && self.local_degree_at_zero == self.k
    }
}

pub fn blaschke_model(k: usize) -> Result<BlaschkeModel, NewtonError> {
    if k < 2 {
        return Err(NewtonError::InvalidBlaschke { k });
    }
    let a = (k as f64 - 1.0) / (k as f64 + 1.0);
    let one = Complex::new(1.0, 0.0);
    let zk = Polynomial::monomial(one, k);
    let num = &zk + &Polynomial::constant(Complex::new(a, 0.0));
    let den = &zk.scale(Complex::new(a, 0.0)) + &Polynomial::one();
    let map = RationalMap {
        num,
        den,
        reduced: true,
    };
    let model = BlaschkeModel { k, a, map };
    debug_assert!(model.check(16).passes(1e-10, 1e-8, 1e-10));
    Ok(model)
}

impl BlaschkeModel {
    pub fn eval(&self, z: Complex) -> Complex {
        self.map.apply(z)
    }

    pub fn check(&self, circle_samples: usize) -> BlaschkeCheck {
        let one = Complex::new(1.0, 0.0);
        let fixed_at_one = (self.eval(one) - one).norm();
        let multiplier_at_one = (numeric_derivative(|z| self.eval(z), one, 1e-3) - one).norm();
        let circle = (0..circle_samples)
            .map(|i| {
                let theta = std::f64::consts::TAU * (i as f64 + 0.5) / circle_samples as f64;
                (self.eval(Complex::from_polar(1.0, theta)).norm() - 1.0).abs()
            })
            .fold(0.0, f64::max);
        let w = self.map.wronskian();
        let local_degree_at_zero = poly_roots(&w, crate::algebra::TAU_CLUSTER)
            .ok()
            .and_then(|roots| {
                roots
                    .iter()
                    .find(|r| r.value.norm() < 1e-8)
                    .map(|r| r.multiplicity + 1)
            })
            .unwrap_or(1);
        BlaschkeCheck {
            k: self.k,
            fixed_at_one,
            multiplier_at_one,
            circle,
            local_degree_at_zero,
        }
    }
}
