//! Level hypersurfaces of an isoparametric polynomial restricted to the unit
//! sphere: adapted frames, shape operators, the cotangent spectrum, the power
//! sum recurrences in the level parameter `t`, and projection along normal
//! great circles.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyfam::IsoPolynomial;
use crate::sampling;
use crate::symmat::{Spectrum, SymmetricMatrix, CLUSTER_TOL};

/// Regular levels satisfy `|f| <= 1 - EPS_FOCAL`.
pub const EPS_FOCAL: f64 = 1e-3;
/// Step for central differences in `t`.
pub const FD_STEP: f64 = 1e-4;
/// Samples in the `t` checks must lie in `(-T_LIMIT, T_LIMIT)`.
pub const T_LIMIT: f64 = 0.9;
pub const K_MAX: usize = 8;

#[derive(Clone, Debug)]
pub struct SpherePointFrame {
    pub x: DVector<f64>,
    /// `f = F(x)`.
    pub f: f64,
    /// Spherical gradient `DF - g f x`.
    pub grad: DVector<f64>,
    pub grad_norm: f64,
    /// `grad / |grad|`.
    pub nu: DVector<f64>,
    /// Orthonormal columns spanning the complement of `{x, nu}`.
    pub tangent: DMatrix<f64>,
    /// Euclidean Hessian `D^2F(x)`.
    pub hessian: SymmetricMatrix,
    /// Spherical Hessian in the frame `(e_1..e_n, nu)`.
    pub hf: SymmetricMatrix,
    /// Shape operator `-(tangent block of hf) / |grad|`.
    pub shape: SymmetricMatrix,
    pub g: usize,
}

/// Orthonormal completion of `{x, nu}`.
pub fn tangent_basis(x: &DVector<f64>, nu: &DVector<f64>) -> DMatrix<f64> {
    orthonormal_complement(&[x.clone(), nu.clone()])
}

/// Orthonormal basis of the complement of an orthonormal set, by pivoted
/// Gram–Schmidt over the standard basis: each step takes the candidate with
/// the largest residual.
pub fn orthonormal_complement(fixed: &[DVector<f64>]) -> DMatrix<f64> {
    let dim = fixed[0].len();
    let mut q: Vec<DVector<f64>> = fixed.to_vec();
    let mut residuals: Vec<Option<DVector<f64>>> = (0..dim)
        .map(|i| {
            let mut e = DVector::zeros(dim);
            e[i] = 1.0;
            for v in &q {
                let c = v.dot(&e);
                e -= v * c;
            }
            Some(e)
        })
        .collect();
    let wanted = dim - fixed.len();
    let mut cols = Vec::with_capacity(wanted);
    while cols.len() < wanted {
        let (best, _) = residuals
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().map(|r| (i, r.norm())))
            .fold((usize::MAX, -1.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        let mut v = residuals[best].take().expect("candidate present");
        // Second pass keeps orthogonality at machine precision.
        for u in &q {
            let c = u.dot(&v);
            v -= u * c;
        }
        let v = v.normalize();
        for r in residuals.iter_mut().flatten() {
            let c = v.dot(r);
            *r -= &v * c;
        }
        q.push(v.clone());
        cols.push(v);
    }
    DMatrix::from_columns(&cols)
}

/// Builds the adapted frame at a unit vector `x` on a regular level.
pub fn frame_at(p: &IsoPolynomial, x: &DVector<f64>) -> Result<SpherePointFrame> {
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::range("x", format!("point must lie on the unit sphere, |x| = {norm}")));
    }
    let x = x / norm;
    let f = p.eval(&x)?;
    if f.abs() > 1.0 - EPS_FOCAL {
        return Err(Error::FocalPoint { f });
    }
    let g = p.g();
    let gf = g as f64 * f;
    let grad = p.eval_grad(&x)? - &x * gf;
    let grad_norm = grad.norm();
    let nu = &grad / grad_norm;
    let tangent = tangent_basis(&x, &nu);
    let hessian = p.eval_hessian(&x)?;
    let n = tangent.ncols();
    let mut frame = DMatrix::zeros(n + 2, n + 1);
    frame.view_mut((0, 0), (n + 2, n)).copy_from(&tangent);
    frame.set_column(n, &nu);
    let hf_mat = hessian.congruence(&frame).into_matrix() - DMatrix::identity(n + 1, n + 1) * gf;
    let hf = SymmetricMatrix::symmetrized(hf_mat);
    let shape = SymmetricMatrix::symmetrized(hf.as_matrix().view((0, 0), (n, n)) * (-1.0 / grad_norm));
    Ok(SpherePointFrame {
        x,
        f,
        grad,
        grad_norm,
        nu,
        tangent,
        hessian,
        hf,
        shape,
        g,
    })
}

impl SpherePointFrame {
    pub fn n(&self) -> usize {
        self.tangent.ncols()
    }

    /// Largest deviation from the frame invariants: unit point, tangency of
    /// the gradient, `|grad|^2 = b(f)`, `hf(e_i, nu) = 0`, `hf(nu, nu) = b'(f)/2`.
    pub fn invariant_residuals(&self, p: &IsoPolynomial) -> FrameResiduals {
        let prof = p.profile();
        let n = self.n();
        let hf = self.hf.as_matrix();
        FrameResiduals {
            unit: (self.x.norm() - 1.0).abs(),
            tangency: self.grad.dot(&self.x).abs(),
            transnormal: (self.grad_norm.powi(2) - prof.b(self.f)).abs(),
            mixed: (0..n).map(|i| hf[(i, n)].abs()).fold(0.0, f64::max),
            normal: (hf[(n, n)] - prof.b_prime(self.f) / 2.0).abs(),
        }
    }

    /// `sigma_j(S)` for `j = 0..=n`.
    pub fn mean_curvatures(&self) -> Result<Vec<f64>> {
        let spec = self.shape.eigensolve()?;
        Ok(crate::symmat::elementary_symmetric(&spec.values))
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FrameResiduals {
    pub unit: f64,
    pub tangency: f64,
    pub transnormal: f64,
    pub mixed: f64,
    pub normal: f64,
}

pub fn shape_spectrum(frame: &SpherePointFrame) -> Result<Spectrum> {
    frame.shape.eigensolve()
}

/// `(|grad f|^2 - b(f), Delta f - a(f))` at a regular unit vector.
pub fn transnormal_residuals(p: &IsoPolynomial, x: &DVector<f64>) -> Result<(f64, f64)> {
    let frame = frame_at(p, x)?;
    let prof = p.profile();
    Ok((
        frame.grad_norm.powi(2) - prof.b(frame.f),
        frame.hf.trace() - prof.a(frame.f),
    ))
}

/// Principal curvatures `cot(tau + (i-1) pi / g)` of the level `t = cos(g tau)`,
/// multiplicities alternating `m1, m2`.
#[derive(Clone, Debug, Serialize)]
pub struct MunznerSpectrum {
    pub g: usize,
    pub m1: usize,
    pub m2: usize,
    pub t: f64,
    pub tau: f64,
    pub curvatures: Vec<f64>,
    pub multiplicities: Vec<usize>,
}

impl MunznerSpectrum {
    pub fn new(g: usize, m1: usize, m2: usize, t: f64) -> Result<Self> {
        if !(t > -1.0 && t < 1.0) {
            return Err(Error::range("t", format!("level must lie in (-1, 1), got {t}")));
        }
        if g == 0 {
            return Err(Error::range("g", "must be positive"));
        }
        if g % 2 == 1 && m1 != m2 {
            return Err(Error::range(
                "multiplicities",
                format!("odd g forces m1 = m2, got ({m1}, {m2})"),
            ));
        }
        let tau = t.acos() / g as f64;
        Ok(Self::from_tau(g, m1, m2, tau))
    }

    pub fn from_tau(g: usize, m1: usize, m2: usize, tau: f64) -> Self {
        let gf = g as f64;
        let curvatures = (0..g).map(|i| 1.0 / (tau + i as f64 * PI / gf).tan()).collect();
        let multiplicities = (0..g).map(|i| if i % 2 == 0 { m1 } else { m2 }).collect();
        Self {
            g,
            m1,
            m2,
            t: (gf * tau).cos(),
            tau,
            curvatures,
            multiplicities,
        }
    }

    /// Expanded multiset.
    pub fn values(&self) -> Vec<f64> {
        self.curvatures
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&c, &m)| std::iter::repeat_n(c, m))
            .collect()
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.values())
    }

    /// `Q_k = sum_i m_i lambda_i^k`.
    pub fn power_sum(&self, k: usize) -> f64 {
        self.curvatures
            .iter()
            .zip(&self.multiplicities)
            .map(|(&c, &m)| m as f64 * c.powi(k as i32))
            .sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MunznerReport {
    pub matched: bool,
    /// The shape spectrum matches the negated prediction instead.
    pub orientation_flipped: bool,
    /// Largest scaled difference to the prediction, `None` on a size mismatch.
    pub max_diff: Option<f64>,
    pub expected: Spectrum,
    pub found: Spectrum,
    pub tau: f64,
}

fn scaled_diff(a: &Spectrum, b: &Spectrum) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    Some(
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
            .fold(0.0, f64::max),
    )
}

/// Compares the shape spectrum with the cotangent prediction at
/// `tau = arccos(f) / g`.
pub fn munzner_check(frame: &SpherePointFrame, g: usize, m1: usize, m2: usize) -> Result<MunznerReport> {
    let expected = match MunznerSpectrum::new(g, m1, m2, frame.f) {
        Ok(s) => s,
        Err(_) => MunznerSpectrum::from_tau(g, m1, m2, frame.f.clamp(-1.0, 1.0).acos() / g.max(1) as f64),
    };
    let tau = expected.tau;
    let expected = expected.spectrum();
    let found = shape_spectrum(frame)?;
    let max_diff = scaled_diff(&expected, &found);
    let matched = max_diff.is_some_and(|d| d < CLUSTER_TOL);
    let orientation_flipped =
        !matched && scaled_diff(&expected.negated(), &found).is_some_and(|d| d < CLUSTER_TOL);
    Ok(MunznerReport {
        matched,
        orientation_flipped,
        max_diff,
        expected,
        found,
        tau,
    })
}

/// `Q_k(t)` from the cotangent spectrum.
pub fn q_k(g: usize, m1: usize, m2: usize, t: f64, k: usize) -> f64 {
    MunznerSpectrum::from_tau(g, m1, m2, t.acos() / g as f64).power_sum(k)
}

/// The closed form of `Q_1`.
pub fn q1_closed(g: usize, m1: usize, m2: usize, t: f64) -> f64 {
    let g = g as f64;
    m1 as f64 * g / 2.0 * ((1.0 + t) / (1.0 - t)).sqrt()
        - m2 as f64 * g / 2.0 * ((1.0 - t) / (1.0 + t)).sqrt()
}

/// Level hypersurface dimension `m1 ceil(g/2) + m2 floor(g/2)`.
pub fn level_dimension(g: usize, m1: usize, m2: usize) -> usize {
    m1 * g.div_ceil(2) + m2 * (g / 2)
}

/// `rho_k(D^2 F)` on the level `t` of the unit sphere, from the eigenvalues
/// `-g sqrt(1-t^2) lambda_i + g t` and `+-g(g-1)`.
pub fn rhobar_k(g: usize, m1: usize, m2: usize, t: f64, k: usize) -> f64 {
    let gf = g as f64;
    let spec = MunznerSpectrum::from_tau(g, m1, m2, t.acos() / gf);
    let s = (1.0 - t * t).sqrt();
    let bulk: f64 = spec
        .curvatures
        .iter()
        .zip(&spec.multiplicities)
        .map(|(&c, &m)| m as f64 * (-gf * s * c + gf * t).powi(k as i32))
        .sum();
    let tail = if k.is_multiple_of(2) { 2.0 * (gf * (gf - 1.0)).powi(k as i32) } else { 0.0 };
    bulk + tail
}

fn central(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (f(t + h) - f(t - h)) / (2.0 * h)
}

fn richardson(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (4.0 * central(&f, t, h / 2.0) - central(&f, t, h)) / 3.0
}

/// Right-hand side of the `Q` recurrence: predicted `Q_(k+1)` from `Q_k`, `Q_(k-1)`.
fn q_rhs(g: usize, m1: usize, m2: usize, t: f64, k: usize, deriv: f64) -> f64 {
    g as f64 / k as f64 * (1.0 - t * t).sqrt() * deriv - q_k(g, m1, m2, t, k - 1)
}

/// Right-hand side of the parity-split `rho-bar` recurrence.
pub fn rhobar_rhs(g: usize, m1: usize, m2: usize, t: f64, k: usize, deriv: f64) -> f64 {
    let gf = g as f64;
    let kf = k as f64;
    let base = -gf * gf / kf * (1.0 - t * t) * deriv - gf * (gf - 2.0) * t * rhobar_k(g, m1, m2, t, k)
        + gf * gf * (gf - 1.0) * rhobar_k(g, m1, m2, t, k - 1);
    let tail = 2.0 * gf.powi(k as i32 + 1) * (gf - 1.0).powi(k as i32) * (gf - 2.0);
    if k % 2 == 1 {
        base + tail
    } else {
        base + tail * t
    }
}

fn check_samples(t_samples: &[f64], k_max: usize) -> Result<()> {
    if !(2..=K_MAX).contains(&k_max) {
        return Err(Error::range("k_max", format!("must lie in 2..={K_MAX}, got {k_max}")));
    }
    if let Some(t) = t_samples.iter().find(|t| t.is_nan() || t.abs() >= T_LIMIT) {
        return Err(Error::range("t", format!("samples must lie in (-{T_LIMIT}, {T_LIMIT}), got {t}")));
    }
    Ok(())
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RecurrenceResiduals {
    /// `max |LHS - RHS|`.
    pub max_abs: f64,
    /// `max |LHS - RHS| / max(1, |LHS|)`.
    pub max_rel: f64,
    /// Same with the Richardson-extrapolated derivative.
    pub max_rel_richardson: f64,
}

impl RecurrenceResiduals {
    fn record(&mut self, lhs: f64, rhs: f64, rhs_rich: f64) {
        let scale = lhs.abs().max(1.0);
        self.max_abs = self.max_abs.max((lhs - rhs).abs());
        self.max_rel = self.max_rel.max((lhs - rhs).abs() / scale);
        self.max_rel_richardson = self.max_rel_richardson.max((lhs - rhs_rich).abs() / scale);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QkReport {
    pub recurrence: RecurrenceResiduals,
    /// `max |Q_1 - closed form|` over the samples.
    pub q1_closed: f64,
    /// `|Q_0 - n|` with `n = m1 ceil(g/2) + m2 floor(g/2)`.
    pub q0: f64,
}

/// Checks `Q_(k+1) = (g/k) sqrt(1-t^2) dQ_k/dt - Q_(k-1)` for `1 <= k < k_max`.
pub fn qk_recurrence_check(g: usize, m1: usize, m2: usize, t_samples: &[f64], k_max: usize) -> Result<QkReport> {
    check_samples(t_samples, k_max)?;
    MunznerSpectrum::new(g, m1, m2, 0.0)?;
    let n = level_dimension(g, m1, m2) as f64;
    let mut rec = RecurrenceResiduals::default();
    let mut q1 = 0.0f64;
    let mut q0 = 0.0f64;
    for &t in t_samples {
        q1 = q1.max((q_k(g, m1, m2, t, 1) - q1_closed(g, m1, m2, t)).abs());
        q0 = q0.max((q_k(g, m1, m2, t, 0) - n).abs());
        for k in 1..k_max {
            let f = |s: f64| q_k(g, m1, m2, s, k);
            let lhs = q_k(g, m1, m2, t, k + 1);
            let rhs = q_rhs(g, m1, m2, t, k, central(f, t, FD_STEP));
            let rhs_rich = q_rhs(g, m1, m2, t, k, richardson(f, t, FD_STEP));
            rec.record(lhs, rhs, rhs_rich);
        }
    }
    Ok(QkReport {
        recurrence: rec,
        q1_closed: q1,
        q0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RhobarReport {
    /// Residuals of the closed-form branch for odd `k`.
    pub odd: RecurrenceResiduals,
    /// Residuals of the closed-form branch for even `k`.
    pub even: RecurrenceResiduals,
    /// `max |rhobar - rho_k(D^2F(y))| / max(1, |rhobar|)` over projected points `y`.
    pub path_agreement: f64,
    /// `|rhobar_0 - (n+2)|` and `|rhobar_1 - (g^2/2)(m2-m1)|`, maximized over samples.
    pub initial_values: (f64, f64),
}

/// Checks the parity-split recurrence for `rho_k(D^2F)` on the levels
/// `t_samples`, comparing the eigenvalue formula with direct evaluation at
/// points projected onto each level.
pub fn rhobar_recurrence_check(p: &IsoPolynomial, t_samples: &[f64], k_max: usize) -> Result<RhobarReport> {
    check_samples(t_samples, k_max)?;
    let (g, (m1, m2)) = (p.g(), p.multiplicities());
    let gf = g as f64;
    let n = p.n() as f64;
    let base = regular_point(p, sampling::INTERNAL_SEED, 0.5)?;
    let mut odd = RecurrenceResiduals::default();
    let mut even = RecurrenceResiduals::default();
    let mut path = 0.0f64;
    let mut init = (0.0f64, 0.0f64);
    for &t in t_samples {
        init.0 = init.0.max((rhobar_k(g, m1, m2, t, 0) - (n + 2.0)).abs());
        init.1 = init.1.max((rhobar_k(g, m1, m2, t, 1) - gf * gf / 2.0 * (m2 as f64 - m1 as f64)).abs());
        for k in 1..k_max {
            let f = |s: f64| rhobar_k(g, m1, m2, s, k);
            let lhs = rhobar_k(g, m1, m2, t, k + 1);
            let rhs = rhobar_rhs(g, m1, m2, t, k, central(f, t, FD_STEP));
            let rhs_rich = rhobar_rhs(g, m1, m2, t, k, richardson(f, t, FD_STEP));
            if k % 2 == 1 { &mut odd } else { &mut even }.record(lhs, rhs, rhs_rich);
        }
        let y = level_project(p, &base, t)?.point;
        let h = p.eval_hessian(&y)?;
        for k in 0..=k_max {
            let a = rhobar_k(g, m1, m2, t, k);
            let b = h.rho_k(k)?;
            path = path.max((a - b).abs() / a.abs().max(1.0));
        }
    }
    Ok(RhobarReport {
        odd,
        even,
        path_agreement: path,
        initial_values: init,
    })
}

/// First point of the stream `(seed, 0), (seed, 1), ...` with `|F| <= bound`.
pub fn regular_point(p: &IsoPolynomial, seed: u64, bound: f64) -> Result<DVector<f64>> {
    for i in 0..10_000 {
        let x = sampling::sphere_point(&mut sampling::stream(seed, i), p.ambient_dim());
        if p.eval(&x)?.abs() <= bound {
            return Ok(x);
        }
    }
    Err(Error::Projection(format!("no sphere point with |F| <= {bound} found")))
}

#[derive(Clone, Debug)]
pub struct LevelProjection {
    pub point: DVector<f64>,
    /// Arc length travelled along the normal great circle.
    pub s: f64,
    /// `|F(point) - t|`.
    pub level_residual: f64,
    /// `max |F(gamma(s)) - cos(g (tau_0 - s))|` at 20 intermediate arcs.
    pub path_residual: f64,
    pub tau0: f64,
}

/// Moves `x` along `gamma(s) = cos(s) x + sin(s) nu` until `F = t_target`.
pub fn level_project(p: &IsoPolynomial, x: &DVector<f64>, t_target: f64) -> Result<LevelProjection> {
    if t_target.abs() > 1.0 - EPS_FOCAL {
        return Err(Error::FocalPoint { f: t_target });
    }
    let frame = frame_at(p, x)?;
    let x = &frame.x;
    let nu = &frame.nu;
    let gf = p.g() as f64;
    let tau0 = frame.f.acos() / gf;
    let gamma = |s: f64| x * s.cos() + nu * s.sin();
    let level = |s: f64| p.eval(&gamma(s)).map(|v| v - t_target);

    let mut lo = 0.0;
    let mut f_lo = level(0.0)?;
    if f_lo == 0.0 {
        return Ok(LevelProjection {
            point: x.clone(),
            s: 0.0,
            level_residual: 0.0,
            path_residual: 0.0,
            tau0,
        });
    }
    // F increases along +nu, so search forward when below the target.
    let dir = if f_lo < 0.0 { 1.0 } else { -1.0 };
    let limit = PI / gf;
    let steps = 256;
    let mut hi = None;
    for i in 1..=steps {
        let s = dir * limit * i as f64 / steps as f64;
        if s.abs() >= limit {
            break;
        }
        let v = level(s)?;
        if v.signum() != f_lo.signum() {
            hi = Some(s);
            break;
        }
        lo = s;
        f_lo = v;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::Projection(format!("no sign change of F - {t_target} within |s| < pi/g"))
    })?;
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        s = 0.5 * (lo + hi);
        let v = level(s)?;
        if v == 0.0 || (hi - lo).abs() < 1e-15 {
            break;
        }
        if v.signum() == f_lo.signum() {
            lo = s;
            f_lo = v;
        } else {
            hi = s;
        }
    }
    let point = gamma(s);
    let level_residual = (p.eval(&point)? - t_target).abs();
    let mut path_residual = 0.0f64;
    for i in 1..=20 {
        let si = s * i as f64 / 21.0;
        let expected = (gf * (tau0 - si)).cos();
        path_residual = path_residual.max((p.eval(&gamma(si))? - expected).abs());
    }
    Ok(LevelProjection {
        point,
        s,
        level_residual,
        path_residual,
        tau0,
    })
}

fn push_float(out: &mut String, v: f64) {
    let _ = write!(out, ",{v:.16e}");
}

/// CSV rows `t, Q_1..Q_k, rhobar_0..rhobar_k`.
pub fn recurrence_table_csv(g: usize, m1: usize, m2: usize, t_samples: &[f64], k_max: usize) -> String {
    let mut out = String::from("t");
    for k in 1..=k_max {
        let _ = write!(out, ",Q{k}");
    }
    for k in 0..=k_max {
        let _ = write!(out, ",rhobar{k}");
    }
    out.push('\n');
    for &t in t_samples {
        let _ = write!(out, "{t:.16e}");
        for k in 1..=k_max {
            push_float(&mut out, q_k(g, m1, m2, t, k));
        }
        for k in 0..=k_max {
            push_float(&mut out, rhobar_k(g, m1, m2, t, k));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordSystem;

    fn cartan1() -> IsoPolynomial {
        IsoPolynomial::cartan(1).unwrap()
    }

    fn fkm24() -> IsoPolynomial {
        IsoPolynomial::fkm(CliffordSystem::standard(2, 4).unwrap()).unwrap()
    }

    fn regular_points(p: &IsoPolynomial, seed: u64, count: u64) -> Vec<DVector<f64>> {
        (0..count)
            .map(|i| regular_point(p, seed.wrapping_mul(1000).wrapping_add(i), 0.95).unwrap())
            .collect()
    }

    #[test]
    fn tangent_basis_survives_adversarial_points() {
        let x = DVector::from_vec(vec![0.5, 0.5, 0.5, 0.5]);
        let nu = DVector::from_vec(vec![0.5, 0.5, -0.5, -0.5]);
        let b = tangent_basis(&x, &nu);
        let gram = b.transpose() * &b;
        assert!((gram - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
        assert!((b.transpose() * &x).amax() < 1e-14);
        assert!((b.transpose() * &nu).amax() < 1e-14);
    }

    #[test]
    fn frame_invariants() {
        for p in [cartan1(), fkm24()] {
            for x in regular_points(&p, 1, 100) {
                let frame = frame_at(&p, &x).unwrap();
                let r = frame.invariant_residuals(&p);
                assert!(r.unit < 1e-12 && r.tangency < 1e-10, "{r:?}");
                assert!(r.transnormal < 1e-8 && r.mixed < 1e-8 && r.normal < 1e-8, "{r:?}");
                let n = frame.n();
                let gram = frame.tangent.transpose() * &frame.tangent;
                assert!((gram - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn hf_is_diagonal_in_principal_frame() {
        let p = cartan1();
        for x in regular_points(&p, 2, 20) {
            let frame = frame_at(&p, &x).unwrap();
            let eig = frame.shape.eigen_decompose().unwrap();
            let n = frame.n();
            let mut rot = DMatrix::<f64>::identity(n + 1, n + 1);
            rot.view_mut((0, 0), (n, n)).copy_from(&eig.vectors);
            let d = frame.hf.congruence(&rot);
            let prof = p.profile();
            for i in 0..=n {
                for j in 0..=n {
                    let v = d.get(i, j);
                    if i != j {
                        assert!(v.abs() < 1e-7);
                    } else if i < n {
                        assert!((v + prof.b(frame.f).sqrt() * eig.values[i]).abs() < 1e-7);
                    } else {
                        assert!((v - prof.b_prime(frame.f) / 2.0).abs() < 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn focal_points_are_rejected() {
        let p = cartan1();
        let e = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(frame_at(&p, &e), Err(Error::FocalPoint { f }) if (f - 1.0).abs() < 1e-15));
    }

    #[test]
    fn fkm_witness_frame() {
        let p = fkm24();
        let mut z = DVector::zeros(8);
        z[0] = 0.5f64.sqrt();
        z[4] = 0.5;
        z[5] = 0.5;
        let frame = frame_at(&p, &z).unwrap();
        assert!(frame.f.abs() < 1e-15);
        assert!((frame.grad_norm.powi(2) - 16.0).abs() < 1e-10);
        let report = munzner_check(&frame, 4, 2, 1).unwrap();
        assert!(report.matched);
        let groups: Vec<usize> = report.found.groups.iter().map(|g| g.1).collect();
        assert_eq!(groups, vec![2, 1, 2, 1]);
        let c = |a: f64| 1.0 / a.tan();
        let expected = [c(PI / 8.0), c(3.0 * PI / 8.0), c(5.0 * PI / 8.0), c(7.0 * PI / 8.0)];
        for (g, e) in report.found.groups.iter().zip(expected) {
            assert!((g.0 - e).abs() < 1e-9);
        }
    }

    #[test]
    fn cartan_zero_level_spectrum() {
        let p = cartan1();
        let base = regular_point(&p, 5, 0.5).unwrap();
        let y = level_project(&p, &base, 0.0).unwrap().point;
        let spec = shape_spectrum(&frame_at(&p, &y).unwrap()).unwrap();
        let s3 = 3f64.sqrt();
        for (v, e) in spec.values.iter().zip([s3, 0.0, -s3]) {
            assert!((v - e).abs() < 1e-9);
        }
    }

    #[test]
    fn shape_trace_matches_first_delta() {
        let p = fkm24();
        let prof = p.profile();
        for x in regular_points(&p, 3, 20) {
            let frame = frame_at(&p, &x).unwrap();
            let d1 = frame.hf.trace();
            let expected = (d1 - prof.b_prime(frame.f) / 2.0) / -prof.b(frame.f).sqrt();
            assert!((frame.shape.trace() - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn munzner_structure() {
        for (p, m) in [(cartan1(), (1, 1)), (fkm24(), (2, 1))] {
            for x in regular_points(&p, 4, 50) {
                let frame = frame_at(&p, &x).unwrap();
                let report = munzner_check(&frame, p.g(), m.0, m.1).unwrap();
                assert!(report.matched, "{:?}", report.max_diff);
                assert!(!munzner_check(&frame, p.g() + 1, m.0, m.1).unwrap().matched);
            }
        }
    }

    #[test]
    fn orientation_flip_is_diagnosed() {
        let p = fkm24();
        let x = regular_point(&p, 6, 0.5).unwrap();
        let mut frame = frame_at(&p, &x).unwrap();
        frame.shape = SymmetricMatrix::symmetrized(-frame.shape.as_matrix());
        // The flipped frame sits on level -f with reversed normal.
        frame.f = -frame.f;
        let report = munzner_check(&frame, 4, 1, 2).unwrap();
        assert!(report.matched);
        let report = munzner_check(&frame, 4, 2, 1).unwrap();
        assert!(!report.matched);
        let mut plain = frame_at(&p, &x).unwrap();
        plain.shape = SymmetricMatrix::symmetrized(-plain.shape.as_matrix());
        let report = munzner_check(&plain, 4, 2, 1).unwrap();
        assert!(!report.matched);
        let expected = MunznerSpectrum::new(4, 2, 1, plain.f).unwrap().spectrum();
        let flipped = scaled_diff(&expected.negated(), &report.found).unwrap();
        assert_eq!(report.orientation_flipped, flipped < CLUSTER_TOL);
    }

    #[test]
    fn sign_flip_diagnostic_on_symmetric_spectrum() {
        // At f = 0 with m1 = m2 the cotangent set is symmetric under negation,
        // so use a synthetic frame whose spectrum is an exact negation.
        let p = cartan1();
        let x = regular_point(&p, 7, 0.5).unwrap();
        let mut frame = frame_at(&p, &x).unwrap();
        let expected = MunznerSpectrum::new(3, 1, 1, frame.f).unwrap();
        let neg: Vec<f64> = expected.values().iter().map(|v| -v).collect();
        frame.shape = SymmetricMatrix::from_diagonal(&neg);
        let report = munzner_check(&frame, 3, 1, 1).unwrap();
        if frame.f.abs() > 1e-3 {
            assert!(!report.matched);
            assert!(report.orientation_flipped);
        }
    }

    #[test]
    fn spectrum_of_euclidean_hessian() {
        for p in [cartan1(), fkm24()] {
            let g = p.g() as f64;
            for x in regular_points(&p, 8, 20) {
                let frame = frame_at(&p, &x).unwrap();
                let mu = shape_spectrum(&frame).unwrap();
                let s = (1.0 - frame.f * frame.f).sqrt();
                let mut expected: Vec<f64> = mu.values.iter().map(|m| -g * s * m + g * frame.f).collect();
                expected.push(g * (g - 1.0));
                expected.push(-g * (g - 1.0));
                let expected = Spectrum::new(expected);
                let found = frame.hessian.eigensolve().unwrap();
                assert!(expected.max_abs_diff(&found).unwrap() < 1e-6);
            }
        }
    }

    #[test]
    fn mean_curvatures_are_constant_on_levels() {
        for p in [cartan1(), fkm24()] {
            let t = 0.3;
            let hs: Vec<Vec<f64>> = regular_points(&p, 9, 20)
                .iter()
                .map(|x| {
                    let y = level_project(&p, x, t).unwrap().point;
                    frame_at(&p, &y).unwrap().mean_curvatures().unwrap()
                })
                .collect();
            for j in 1..=4.min(p.n()) {
                let vals: Vec<f64> = hs.iter().map(|h| h[j]).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
                assert!(var.sqrt() < 1e-7, "j={j} std={}", var.sqrt());
            }
        }
    }

    #[test]
    fn delta_h_consistency_on_levels() {
        use crate::polyfam::{delta_h_convert, ConvertDirection};
        let p = cartan1();
        for x in regular_points(&p, 10, 10) {
            let frame = frame_at(&p, &x).unwrap();
            let n = frame.n();
            let h = frame.mean_curvatures().unwrap();
            let via = delta_h_convert(&h[1..=n], &p.profile(), frame.f, ConvertDirection::ToDelta).unwrap();
            for j in 1..=n {
                let direct = frame.hf.sigma_k(j).unwrap();
                assert!((via[j - 1] - direct).abs() < 1e-8 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn transnormal_profile_holds() {
        for p in [cartan1(), fkm24()] {
            for x in regular_points(&p, 11, 100) {
                let (a, b) = transnormal_residuals(&p, &x).unwrap();
                assert!(a.abs() < 1e-8 && b.abs() < 1e-8, "{a} {b}");
            }
        }
        let prof = fkm24().profile();
        assert_eq!(prof.a(0.5), -8.0 - 4.0 * 10.0 * 0.5);
    }

    #[test]
    fn qk_recurrence() {
        let ts: Vec<f64> = (0..20).map(|i| -0.85 + 1.7 * i as f64 / 19.0).collect();
        let rep = qk_recurrence_check(3, 1, 1, &ts, 6).unwrap();
        assert!(rep.recurrence.max_rel < 1e-4, "{rep:?}");
        assert!(rep.recurrence.max_rel_richardson < rep.recurrence.max_rel);
        assert!(rep.q1_closed < 1e-12 && rep.q0 < 1e-12);
        let rep = qk_recurrence_check(4, 2, 1, &ts, 8).unwrap();
        assert!(rep.recurrence.max_rel < 1e-4, "{rep:?}");
        assert!((q_k(4, 2, 1, 0.0, 1) - 4.0 * (2.0 - 1.0) / 2.0).abs() < 1e-12);
        assert_eq!(level_dimension(4, 2, 1), 6);
        assert_eq!(level_dimension(3, 1, 1), 3);
        assert!(qk_recurrence_check(3, 1, 1, &[0.95], 4).is_err());
        assert!(qk_recurrence_check(3, 1, 1, &[0.0], 9).is_err());
        assert!(qk_recurrence_check(3, 1, 2, &[0.0], 4).is_err());
    }

    #[test]
    fn rhobar_recurrence_and_paths() {
        let ts = [-0.6, -0.2, 0.1, 0.45, 0.8];
        for p in [cartan1(), fkm24()] {
            let rep = rhobar_recurrence_check(&p, &ts, 6).unwrap();
            assert!(rep.odd.max_rel < 1e-4 && rep.even.max_rel < 1e-4, "{rep:?}");
            assert!(rep.path_agreement < 1e-7, "{rep:?}");
            assert!(rep.initial_values.0 < 1e-12 && rep.initial_values.1 < 1e-12);
        }
        // The k = 1 branch reproduces rhobar_2 = 126 for the cubic in R^5.
        let d = central(|s| rhobar_k(3, 1, 1, s, 1), 0.2, FD_STEP);
        assert!((rhobar_rhs(3, 1, 1, 0.2, 1, d) - 126.0).abs() < 1e-4);
    }

    #[test]
    fn projection() {
        let p = cartan1();
        let x = regular_point(&p, 12, 0.8).unwrap();
        let f0 = p.eval(&x).unwrap();
        let same = level_project(&p, &x, f0).unwrap();
        assert!(same.s.abs() < 1e-12 && (same.point - &x).amax() < 1e-12);
        for i in 0..20 {
            let x = regular_point(&p, 100 + i, 0.9).unwrap();
            for t in [0.5, -0.7, 0.0] {
                let proj = level_project(&p, &x, t).unwrap();
                assert!(proj.level_residual < 1e-10);
                assert!(proj.path_residual < 1e-8);
                assert!((proj.point.norm() - 1.0).abs() < 1e-12);
                // Parallel consistency: the level spectrum shifts with tau.
                let frame = frame_at(&p, &proj.point).unwrap();
                let shifted = MunznerSpectrum::from_tau(3, 1, 1, proj.tau0 - proj.s).spectrum();
                assert!(scaled_diff(&shifted, &shape_spectrum(&frame).unwrap()).unwrap() < 1e-6);
            }
        }
        assert!(level_project(&p, &x, 0.9995).is_err());
    }

    #[test]
    fn csv_table_shape() {
        let csv = recurrence_table_csv(3, 1, 1, &[0.0, 0.5], 3);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,Q1,Q2,Q3,rhobar0,rhobar1,rhobar2,rhobar3");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 8);
    }
}
