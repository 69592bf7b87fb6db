//! Property checks shared by the proptest suite and the acceptance gate.
//! Each check returns `Err(message)` on violation.

#![allow(dead_code)]

use std::sync::OnceLock;

use isopar::clifford::CliffordSystem;
use isopar::polyfam::IsoPolynomial;
use isopar::symmat::{elementary_symmetric, newton_rho_from_sigma, newton_sigma_from_rho, power_sum, SymmetricMatrix};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

pub const NEWTON_TOL: f64 = 1e-10;
pub const MINOR_TOL: f64 = 1e-8;
pub const FD_GRAD_TOL: f64 = 1e-6;
pub const FD_HESS_TOL: f64 = 1e-5;
pub const HOMOGENEITY_TOL: f64 = 1e-9;

pub type Check = Result<(), String>;

/// Cartan m = 1, 2; FKM (1, 3), (2, 4), (3, 8); quaternionic r = 1.
pub fn families() -> &'static [IsoPolynomial] {
    static FAMILIES: OnceLock<Vec<IsoPolynomial>> = OnceLock::new();
    FAMILIES.get_or_init(|| {
        vec![
            IsoPolynomial::cartan(1).unwrap(),
            IsoPolynomial::cartan(2).unwrap(),
            IsoPolynomial::fkm(CliffordSystem::standard(1, 3).unwrap()).unwrap(),
            IsoPolynomial::fkm(CliffordSystem::standard(2, 4).unwrap()).unwrap(),
            IsoPolynomial::fkm(CliffordSystem::standard(3, 8).unwrap()).unwrap(),
            IsoPolynomial::fkm(CliffordSystem::ozeki_takeuchi(1).unwrap()).unwrap(),
        ]
    })
}

pub fn values_strategy(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.5f64..1.5, 1..=max_n)
}

pub fn symmetric_strategy(max_n: usize) -> impl Strategy<Value = SymmetricMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(-2.0f64..2.0, n * n)
            .prop_map(move |v| SymmetricMatrix::symmetrized(DMatrix::from_vec(n, n, v)))
    })
}

/// A family index and a point with norm in `[0.5, 2]`.
pub fn family_point_strategy() -> impl Strategy<Value = (usize, DVector<f64>)> {
    (0..families().len()).prop_flat_map(|i| {
        let dim = families()[i].ambient_dim();
        (
            Just(i),
            prop::collection::vec(-1.0f64..1.0, dim),
            0.5f64..2.0,
        )
            .prop_filter_map("direction too short", |(i, v, r)| {
                let v = DVector::from_vec(v);
                let norm = v.norm();
                (norm > 0.1).then(|| (i, v * (r / norm)))
            })
    })
}

fn scale(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()))
}

/// Power sums to elementary symmetric functions and back.
pub fn newton_round_trip(values: &[f64]) -> Check {
    let n = values.len();
    let rho: Vec<f64> = (1..=n).map(|k| power_sum(values, k)).collect();
    let sigma = newton_sigma_from_rho(&rho, n).map_err(|e| e.to_string())?;
    let expected = &elementary_symmetric(values)[1..];
    let s = scale(expected).max(scale(&rho));
    for (k, (a, b)) in sigma.iter().zip(expected).enumerate() {
        if (a - b).abs() > NEWTON_TOL * s {
            return Err(format!("sigma_{} = {a}, expected {b}", k + 1));
        }
    }
    let back = newton_rho_from_sigma(&sigma, n).map_err(|e| e.to_string())?;
    for (k, (a, b)) in back.iter().zip(&rho).enumerate() {
        if (a - b).abs() > NEWTON_TOL * s {
            return Err(format!("rho_{} = {a} after the round trip, expected {b}", k + 1));
        }
    }
    Ok(())
}

/// Spectral `sigma_k` against the principal-minor expansion.
pub fn sigma_minor_agreement(m: &SymmetricMatrix) -> Check {
    for k in 0..=m.order() {
        let a = m.sigma_k(k).map_err(|e| e.to_string())?;
        let b = m.sigma_k_principal_minors(k).map_err(|e| e.to_string())?;
        if (a - b).abs() > MINOR_TOL * b.abs().max(1.0) {
            return Err(format!("sigma_{k}: spectral {a}, minors {b}"));
        }
    }
    Ok(())
}

/// Closed-form gradient against central differences of `F`.
pub fn gradient_matches_fd(p: &IsoPolynomial, x: &DVector<f64>) -> Check {
    let h = 1e-5;
    let grad = p.eval_grad(x).map_err(|e| e.to_string())?;
    let mut fd = DVector::zeros(x.len());
    for i in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        fd[i] = (p.eval(&xp).unwrap() - p.eval(&xm).unwrap()) / (2.0 * h);
    }
    let err = (&fd - &grad).norm() / grad.norm().max(1.0);
    if err > FD_GRAD_TOL {
        return Err(format!("gradient relative error {err:e}"));
    }
    Ok(())
}

/// Closed-form Hessian against central differences of the gradient.
pub fn hessian_matches_fd(p: &IsoPolynomial, x: &DVector<f64>) -> Check {
    let h = 1e-5;
    let hess = p.eval_hessian(x).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for j in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let col = (p.eval_grad(&xp).unwrap() - p.eval_grad(&xm).unwrap()) / (2.0 * h);
        for i in 0..x.len() {
            worst = worst.max((col[i] - hess.get(i, j)).abs());
        }
    }
    if worst > FD_HESS_TOL {
        return Err(format!("Hessian absolute error {worst:e}"));
    }
    Ok(())
}

/// `F(lambda x) = lambda^g F(x)` and `DF(lambda x) = lambda^(g-1) DF(x)`.
pub fn homogeneity(p: &IsoPolynomial, x: &DVector<f64>, lambda: f64) -> Check {
    let g = p.g() as i32;
    let y = x * lambda;
    let (fx, fy) = (p.eval(x).unwrap(), p.eval(&y).unwrap());
    let expected = lambda.powi(g) * fx;
    if (fy - expected).abs() > HOMOGENEITY_TOL * expected.abs().max(lambda.powi(g) * x.norm().powi(g)) {
        return Err(format!("F(lambda x) = {fy}, lambda^g F(x) = {expected}"));
    }
    let gy = p.eval_grad(&y).unwrap();
    let gexp = p.eval_grad(x).unwrap() * lambda.powi(g - 1);
    if (&gy - &gexp).norm() > HOMOGENEITY_TOL * gexp.norm().max(lambda.powi(g - 1) * x.norm().powi(g - 1)) {
        return Err("gradient does not scale with degree g - 1".into());
    }
    Ok(())
}
