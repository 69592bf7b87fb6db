//! Riccati evolution of principal curvatures along curvature-adapted
//! parallel families.
//!
//! Each principal curvature obeys `mu' = mu^2 + kappa` with `kappa` the
//! matching eigenvalue of the normal Jacobi operator, constant along the
//! normal geodesics. The module solves these equations in closed form and
//! numerically, and checks the recurrences that tie the power sums
//! `Q_i = tr S^i` to the mixed moments `Gamma_ij = tr(S^i R^j)`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::symmat::{spectrum_from_moments, Spectrum};

/// Times closer than this to a pole are rejected.
pub const BLOW_UP_BAND: f64 = 1e-3;
/// Values beyond this abort numerical integration.
const OVERFLOW: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum JacobiStructure {
    /// All `kappa_i = c`.
    SpaceForm { c: f64 },
    /// `kappa_1` on the first `n - m` directions, `kappa_2` on the last `m`.
    RankOne { kappa1: f64, kappa2: f64, m: usize },
    General,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JacobiSpectrum {
    pub kappas: Vec<f64>,
    pub structure: JacobiStructure,
}

impl JacobiSpectrum {
    pub fn space_form(c: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::range("n", "must be positive"));
        }
        Ok(Self {
            kappas: vec![c; n],
            structure: JacobiStructure::SpaceForm { c },
        })
    }

    /// `diag(kappa1 I_(n-m), kappa2 I_m)` with `m` in `{1, 3, 7}`.
    pub fn rank_one(kappa1: f64, kappa2: f64, n: usize, m: usize) -> Result<Self> {
        if !matches!(m, 1 | 3 | 7) {
            return Err(Error::range("m", format!("rank-one Jacobi operators have m in {{1, 3, 7}}, got {m}")));
        }
        if n <= m {
            return Err(Error::range("n", format!("need n > m = {m}, got {n}")));
        }
        if kappa1 == kappa2 {
            return Err(Error::range("kappa", "rank-one structure needs two distinct values"));
        }
        let mut kappas = vec![kappa1; n - m];
        kappas.extend(std::iter::repeat_n(kappa2, m));
        Ok(Self {
            kappas,
            structure: JacobiStructure::RankOne { kappa1, kappa2, m },
        })
    }

    pub fn general(kappas: Vec<f64>) -> Result<Self> {
        if kappas.is_empty() {
            return Err(Error::range("n", "must be positive"));
        }
        Ok(Self {
            kappas,
            structure: JacobiStructure::General,
        })
    }

    pub fn len(&self) -> usize {
        self.kappas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappas.is_empty()
    }
}

/// Closed-form solution of one scalar equation `mu' = mu^2 + kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "branch")]
pub enum Branch {
    /// `s cot(s (c0 - t))`, `s = sqrt(kappa)`.
    Cot { s: f64, c0: f64 },
    /// `mu0 / (1 - mu0 t)`.
    Rational { mu0: f64 },
    /// `-a tanh(a t - b)`, `a = sqrt(-kappa)`.
    Tanh { a: f64, b: f64 },
    /// `-a coth(a t - b)`.
    Coth { a: f64, b: f64 },
    Constant { value: f64 },
}

impl Branch {
    pub fn new(kappa: f64, mu0: f64) -> Self {
        if kappa > 0.0 {
            let s = kappa.sqrt();
            Branch::Cot {
                s,
                c0: 1f64.atan2(mu0 / s) / s,
            }
        } else if kappa == 0.0 {
            if mu0 == 0.0 {
                Branch::Constant { value: 0.0 }
            } else {
                Branch::Rational { mu0 }
            }
        } else {
            let a = (-kappa).sqrt();
            let ratio = mu0 / a;
            if ratio.abs() < 1.0 {
                Branch::Tanh { a, b: ratio.atanh() }
            } else if ratio.abs() > 1.0 {
                Branch::Coth { a, b: (1.0 / ratio).atanh() }
            } else {
                Branch::Constant { value: mu0 }
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Branch::Cot { s, c0 } => s / (s * (c0 - t)).tan(),
            Branch::Rational { mu0 } => mu0 / (1.0 - mu0 * t),
            Branch::Tanh { a, b } => -a * (a * t - b).tanh(),
            Branch::Coth { a, b } => -a / (a * t - b).tanh(),
            Branch::Constant { value } => value,
        }
    }

    /// Derivative of the closed form itself, not of the equation.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Branch::Cot { s, c0 } => (s / (s * (c0 - t)).sin()).powi(2),
            Branch::Rational { mu0 } => (mu0 / (1.0 - mu0 * t)).powi(2),
            Branch::Tanh { a, b } => -(a / (a * t - b).cosh()).powi(2),
            Branch::Coth { a, b } => (a / (a * t - b).sinh()).powi(2),
            Branch::Constant { .. } => 0.0,
        }
    }

    /// Largest open interval around `t = 0` free of poles.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            Branch::Cot { s, c0 } => (c0 - std::f64::consts::PI / s, c0),
            Branch::Rational { mu0 } => {
                if mu0 > 0.0 {
                    (f64::NEG_INFINITY, 1.0 / mu0)
                } else {
                    (1.0 / mu0, f64::INFINITY)
                }
            }
            Branch::Coth { a, b } => {
                let pole = b / a;
                if pole > 0.0 {
                    (f64::NEG_INFINITY, pole)
                } else {
                    (pole, f64::INFINITY)
                }
            }
            Branch::Tanh { .. } | Branch::Constant { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RiccatiFamily {
    pub jacobi: JacobiSpectrum,
    pub mu0: Vec<f64>,
    pub branches: Vec<Branch>,
    /// Pole-free interval around 0, before removing the blow-up band.
    pub domain: (f64, f64),
}

impl RiccatiFamily {
    pub fn new(jacobi: JacobiSpectrum, mu0: Vec<f64>) -> Result<Self> {
        if mu0.len() != jacobi.len() {
            return Err(Error::Dimension {
                expected: jacobi.len(),
                got: mu0.len(),
            });
        }
        if mu0.iter().chain(&jacobi.kappas).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial data"));
        }
        let branches: Vec<Branch> = jacobi
            .kappas
            .iter()
            .zip(&mu0)
            .map(|(&k, &m)| Branch::new(k, m))
            .collect();
        let domain = branches.iter().fold((f64::NEG_INFINITY, f64::INFINITY), |acc, b| {
            let (lo, hi) = b.domain();
            (acc.0.max(lo), acc.1.min(hi))
        });
        Ok(Self {
            jacobi,
            mu0,
            branches,
            domain,
        })
    }

    pub fn n(&self) -> usize {
        self.mu0.len()
    }

    pub fn kappas(&self) -> &[f64] {
        &self.jacobi.kappas
    }

    pub fn check_time(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain;
        if t >= hi - BLOW_UP_BAND {
            return Err(Error::BlowUp { t, pole: hi });
        }
        if t <= lo + BLOW_UP_BAND {
            return Err(Error::BlowUp { t, pole: lo });
        }
        Ok(())
    }

    pub fn evolve_closed(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        Ok(self.branches.iter().map(|b| b.value(t)).collect())
    }

    /// `mu_i'(t)` from the closed forms.
    pub fn derivative_closed(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        Ok(self.branches.iter().map(|b| b.derivative(t)).collect())
    }

    /// Classical fourth-order Runge–Kutta from 0 to `t` in `steps` steps.
    pub fn evolve_numeric(&self, t: f64, steps: usize) -> Result<Vec<f64>> {
        self.check_time(t)?;
        if steps == 0 {
            if t == 0.0 {
                return Ok(self.mu0.clone());
            }
            return Err(Error::range("steps", "must be positive for t != 0"));
        }
        let h = t / steps as f64;
        let mut mu = self.mu0.clone();
        for _ in 0..steps {
            for (m, &k) in mu.iter_mut().zip(&self.jacobi.kappas) {
                let f = |y: f64| y * y + k;
                let k1 = f(*m);
                let k2 = f(*m + 0.5 * h * k1);
                let k3 = f(*m + 0.5 * h * k2);
                let k4 = f(*m + h * k3);
                *m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if !m.is_finite() || m.abs() > OVERFLOW {
                    return Err(Error::Integration(format!("solution left [-{OVERFLOW:e}, {OVERFLOW:e}]")));
                }
            }
        }
        Ok(mu)
    }

    /// `Gamma_ij(t) = sum_k mu_k^i kappa_k^j`.
    pub fn gamma_ij(&self, t: f64, i: usize, j: usize) -> Result<f64> {
        let mu = self.evolve_closed(t)?;
        Ok(gamma_of(&mu, self.kappas(), i, j))
    }

    /// `Q_i(t) = tr S(t)^i`.
    pub fn q(&self, t: f64, i: usize) -> Result<f64> {
        self.gamma_ij(t, i, 0)
    }

    /// Power sums over the `kappa_1` and `kappa_2` blocks of a rank-one family.
    pub fn phi_psi(&self, t: f64, i: usize) -> Result<(f64, f64)> {
        let JacobiStructure::RankOne { m, .. } = self.jacobi.structure else {
            return Err(Error::Unsupported("Phi/Psi split needs a rank-one structure".into()));
        };
        let mu = self.evolve_closed(t)?;
        let split = self.n() - m;
        let p = |v: &[f64]| v.iter().map(|x| x.powi(i as i32)).sum::<f64>();
        Ok((p(&mu[..split]), p(&mu[split..])))
    }

    /// `d^order/dt^order sum_k kappa_k^j mu_k^i`, exact: along the flow
    /// `d/dt mu^p = p mu^(p+1) + p kappa mu^(p-1)`.
    pub fn moment_derivative(&self, t: f64, i: usize, j: usize, order: usize) -> Result<f64> {
        let mu = self.evolve_closed(t)?;
        Ok(mu
            .iter()
            .zip(self.kappas())
            .map(|(&m, &k)| k.powi(j as i32) * monomial_derivative(m, k, i, order))
            .sum())
    }
}

fn gamma_of(mu: &[f64], kappas: &[f64], i: usize, j: usize) -> f64 {
    mu.iter()
        .zip(kappas)
        .map(|(m, k)| m.powi(i as i32) * k.powi(j as i32))
        .sum()
}

/// `d^order/dt^order mu^p` along `mu' = mu^2 + kappa`, evaluated at `mu`.
fn monomial_derivative(mu: f64, kappa: f64, p: usize, order: usize) -> f64 {
    // coefficients[e] multiplies mu^e.
    let mut coef = vec![0.0; p + order + 1];
    coef[p] = 1.0;
    for _ in 0..order {
        let mut next = vec![0.0; coef.len()];
        for (e, &c) in coef.iter().enumerate() {
            if c == 0.0 || e == 0 {
                continue;
            }
            let ef = e as f64;
            if e + 1 < next.len() {
                next[e + 1] += c * ef;
            }
            next[e - 1] += c * ef * kappa;
        }
        coef = next;
    }
    coef.iter().rev().fold(0.0, |acc, c| acc * mu + c)
}

fn scaled(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(1.0)
}

/// Residual of `Q_(i+1) = Q_i'/i - Gamma_(i-1,1)` for `1 <= i <= i_max`,
/// with `Q_i'` from the closed-form derivatives. Residuals are scaled by
/// `max(1, |Q_(i+1)|)`.
pub fn check_power_sum_recurrence(fam: &RiccatiFamily, t_samples: &[f64], i_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in t_samples {
        let mu = fam.evolve_closed(t)?;
        let dmu = fam.derivative_closed(t)?;
        for i in 1..=i_max {
            let dq: f64 = mu
                .iter()
                .zip(&dmu)
                .map(|(m, d)| i as f64 * m.powi(i as i32 - 1) * d)
                .sum();
            let lhs = gamma_of(&mu, fam.kappas(), i + 1, 0);
            let rhs = dq / i as f64 - gamma_of(&mu, fam.kappas(), i - 1, 1);
            worst = worst.max(scaled(lhs, rhs));
        }
    }
    Ok(worst)
}

/// Residual of `Gamma_(i+1,1) = (Gamma_i1' - sum_j tr(S^j R S^(i-1-j) R)) / i`
/// for a locally symmetric ambient (`R' = 0`), `1 <= i <= i_max`.
pub fn check_mixed_moment_recurrence(fam: &RiccatiFamily, t_samples: &[f64], i_max: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    let kappas = fam.kappas();
    for &t in t_samples {
        let mu = fam.evolve_closed(t)?;
        let dmu = fam.derivative_closed(t)?;
        for i in 1..=i_max {
            let dgamma: f64 = mu
                .iter()
                .zip(&dmu)
                .zip(kappas)
                .map(|((m, d), k)| k * i as f64 * m.powi(i as i32 - 1) * d)
                .sum();
            let mut mixed = 0.0;
            for j in 0..i {
                // tr(S^j R S^(i-1-j) R) in the common eigenframe.
                mixed += mu
                    .iter()
                    .zip(kappas)
                    .map(|(m, k)| m.powi(j as i32) * k * m.powi((i - 1 - j) as i32) * k)
                    .sum::<f64>();
            }
            let lhs = gamma_of(&mu, kappas, i + 1, 1);
            let rhs = (dgamma - mixed) / i as f64;
            worst = worst.max(scaled(lhs, rhs));
        }
    }
    Ok(worst)
}

/// Residual of `Phi_i' = i(Phi_(i+1) + kappa_1 Phi_(i-1))` and the `Psi`
/// counterpart, plus `Q_i = Phi_i + Psi_i` and
/// `Gamma_i1 = kappa_1 Phi_i + kappa_2 Psi_i`.
pub fn check_phi_psi(fam: &RiccatiFamily, t_samples: &[f64], i_max: usize) -> Result<f64> {
    let JacobiStructure::RankOne { kappa1, kappa2, m } = fam.jacobi.structure else {
        return Err(Error::Unsupported("Phi/Psi split needs a rank-one structure".into()));
    };
    let split = fam.n() - m;
    let mut worst = 0.0f64;
    for &t in t_samples {
        let mu = fam.evolve_closed(t)?;
        let dmu = fam.derivative_closed(t)?;
        let block = |range: std::ops::Range<usize>, i: i32| -> f64 { mu[range].iter().map(|x| x.powi(i)).sum() };
        let dblock = |range: std::ops::Range<usize>, i: i32| -> f64 {
            range.map(|p| i as f64 * mu[p].powi(i - 1) * dmu[p]).sum()
        };
        for i in 1..=i_max as i32 {
            for (range, k) in [(0..split, kappa1), (split..fam.n(), kappa2)] {
                let lhs = dblock(range.clone(), i);
                let rhs = i as f64 * (block(range.clone(), i + 1) + k * block(range, i - 1));
                worst = worst.max(scaled(lhs, rhs));
            }
            let (phi, psi) = (block(0..split, i), block(split..fam.n(), i));
            let q = gamma_of(&mu, fam.kappas(), i as usize, 0);
            let g1 = gamma_of(&mu, fam.kappas(), i as usize, 1);
            worst = worst.max(scaled(q, phi + psi));
            worst = worst.max(scaled(g1, kappa1 * phi + kappa2 * psi));
        }
    }
    Ok(worst)
}

/// Residual of `H' = |S|^2 + sum kappa_i` with `H = tr S`.
pub fn check_mean_curvature_riccati(fam: &RiccatiFamily, t_samples: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in t_samples {
        let mu = fam.evolve_closed(t)?;
        let dh: f64 = fam.derivative_closed(t)?.iter().sum();
        let rhs = mu.iter().map(|m| m * m).sum::<f64>() + fam.kappas().iter().sum::<f64>();
        worst = worst.max(scaled(dh, rhs));
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct PropagationReport {
    pub t: f64,
    pub gamma11_chain: f64,
    pub gamma11_direct: f64,
    pub q4_chain: f64,
    pub q4_direct: f64,
    /// `None` when `Gamma_12` cannot be recovered from `Q_1`, `Gamma_11`.
    pub q5_chain: Option<f64>,
    pub q5_direct: f64,
    /// Largest scaled discrepancy over the available pairs.
    pub max_discrepancy: f64,
}

/// Derives `Gamma_11`, `Q_4` and `Q_5` from `Q_1, Q_2, Q_3` and their
/// derivatives through the inductive formulas, and compares them with
/// direct power sums.
///
/// `Gamma_12` enters `Q_5`; it is recovered from `Q_1` and `Gamma_11` when
/// the Jacobi operator has at most two distinct eigenvalues.
pub fn propagate_power_sums(fam: &RiccatiFamily, t: f64) -> Result<PropagationReport> {
    let d = |i: usize, order: usize| fam.moment_derivative(t, i, 0, order);
    let gamma02: f64 = fam.kappas().iter().map(|k| k * k).sum();

    let gamma11 = 0.5 * d(2, 1)? - d(3, 0)?;
    let dgamma11 = 0.5 * d(2, 2)? - d(3, 1)?;
    let gamma21 = dgamma11 - gamma02;
    let q4 = d(3, 1)? / 3.0 - gamma21;
    let dq4 = d(3, 2)? / 3.0 - (0.5 * d(2, 3)? - d(3, 2)?);
    let dgamma21 = 0.5 * d(2, 3)? - d(3, 2)?;

    let q1 = d(1, 0)?;
    let gamma12 = match fam.jacobi.structure {
        JacobiStructure::SpaceForm { c } => Some(c * c * q1),
        JacobiStructure::RankOne { kappa1, kappa2, .. } => {
            // Block traces from Q_1 = a + c, Gamma_11 = kappa1 a + kappa2 c.
            let a = (gamma11 - kappa2 * q1) / (kappa1 - kappa2);
            let c = (kappa1 * q1 - gamma11) / (kappa1 - kappa2);
            Some(kappa1 * kappa1 * a + kappa2 * kappa2 * c)
        }
        JacobiStructure::General => None,
    };
    let q5 = gamma12.map(|g12| {
        let gamma31 = 0.5 * dgamma21 - g12;
        0.25 * dq4 - gamma31
    });

    let gamma11_direct = fam.gamma_ij(t, 1, 1)?;
    let q4_direct = fam.q(t, 4)?;
    let q5_direct = fam.q(t, 5)?;
    let mut max_discrepancy = scaled(gamma11_direct, gamma11).max(scaled(q4_direct, q4));
    if let Some(q5) = q5 {
        max_discrepancy = max_discrepancy.max(scaled(q5_direct, q5));
    }
    Ok(PropagationReport {
        t,
        gamma11_chain: gamma11,
        gamma11_direct,
        q4_chain: q4,
        q4_direct,
        q5_chain: q5,
        q5_direct,
        max_discrepancy,
    })
}

/// Recovers the principal curvatures at `t` from `Q_1(t)..Q_n(t)`.
pub fn moment_to_spectrum_evolution(fam: &RiccatiFamily, t: f64) -> Result<Spectrum> {
    let n = fam.n();
    let rho = (1..=n).map(|i| fam.q(t, i)).collect::<Result<Vec<_>>>()?;
    spectrum_from_moments(&rho, n)
}

/// `steps + 1` equally spaced times in `[t0, t1]`.
pub fn time_grid(t0: f64, t1: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    (0..=steps).map(|s| t0 + (t1 - t0) * s as f64 / steps as f64).collect()
}

/// CSV rows `t, mu_1..mu_n, Q_1..Q_k, H` at the given times. Rows stop at
/// the first time outside the domain, whose error is returned alongside.
pub fn trajectory_csv(fam: &RiccatiFamily, ts: &[f64], k_max: usize) -> (String, Option<Error>) {
    let n = fam.n();
    let mut out = String::from("t");
    for i in 1..=n {
        let _ = write!(out, ",mu{i}");
    }
    for k in 1..=k_max {
        let _ = write!(out, ",Q{k}");
    }
    out.push_str(",H\n");
    for &t in ts {
        let mu = match fam.evolve_closed(t) {
            Ok(mu) => mu,
            Err(e) => return (out, Some(e)),
        };
        let _ = write!(out, "{t:.16e}");
        for m in &mu {
            let _ = write!(out, ",{m:.16e}");
        }
        for k in 1..=k_max {
            let _ = write!(out, ",{:.16e}", gamma_of(&mu, fam.kappas(), k, 0));
        }
        let _ = writeln!(out, ",{:.16e}", mu.iter().sum::<f64>());
    }
    (out, None)
}
