//! S^1-invariant isoparametric polynomials and their Hopf data.
//!
//! For a polynomial invariant under `z -> cos(theta) z + sin(theta) J z`, the
//! level hypersurfaces carry the vertical field `Jx`. The shape operator in
//! the frame `(e_1.., J nu, J x)` has a fixed block shape; its `(J nu, J nu)`
//! entry is the invariant `alpha`, which is also a rational expression in `F`
//! and `Omega_F = DF^T J D^2F J DF`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::clifford::{ComplexStructure, ComplexTag, Construction};
use crate::error::{Error, Result};
use crate::polyfam::{Family, IsoPolynomial};
use crate::sampling;
use crate::spherelevel::{self, orthonormal_complement, EPS_FOCAL};
use crate::symmat::{vandermonde_solve, SymmetricMatrix};

/// Relative tolerance of the construction-time invariance check.
pub const INVARIANCE_TOL: f64 = 1e-9;
const INVARIANCE_SAMPLES: usize = 50;
/// `|<Jx, nu>|` above this means the level is not invariant at the point.
pub const FRAME_TOL: f64 = 1e-8;
/// `phi_i^2` above this counts as a non-horizontal eigenspace.
pub const PHI_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct HopfContext {
    poly: IsoPolynomial,
    j: ComplexStructure,
}

impl HopfContext {
    pub fn new(poly: IsoPolynomial, j: ComplexStructure) -> Result<Self> {
        if poly.ambient_dim() != j.dim() {
            return Err(Error::Dimension {
                expected: poly.ambient_dim(),
                got: j.dim(),
            });
        }
        let ctx = Self { poly, j };
        let residual = ctx.s1_invariance_residual(INVARIANCE_SAMPLES, sampling::INTERNAL_SEED)?;
        if residual > INVARIANCE_TOL {
            return Err(Error::Invariance { residual });
        }
        Ok(ctx)
    }

    /// Skips the invariance check, for negative controls.
    pub fn new_unchecked(poly: IsoPolynomial, j: ComplexStructure) -> Self {
        Self { poly, j }
    }

    pub fn poly(&self) -> &IsoPolynomial {
        &self.poly
    }

    pub fn complex_structure(&self) -> &ComplexStructure {
        &self.j
    }

    pub fn g(&self) -> usize {
        self.poly.g()
    }

    fn jm(&self) -> &DMatrix<f64> {
        self.j.matrix()
    }

    /// `max |F(cos t z + sin t Jz) - F(z)| / max(1, |F(z)|)` over sampled
    /// unit `z` and `t` in `[0, 2 pi)`.
    pub fn s1_invariance_residual(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..samples {
            let mut rng = sampling::stream(seed, i as u64);
            let z = sampling::sphere_point(&mut rng, self.poly.ambient_dim());
            let theta = sampling::uniform(&mut rng, 0.0, 2.0 * std::f64::consts::PI);
            let rotated = &z * theta.cos() + self.jm() * &z * theta.sin();
            let f = self.poly.eval(&z)?;
            let fr = self.poly.eval(&rotated)?;
            worst = worst.max((fr - f).abs() / f.abs().max(1.0));
        }
        Ok(worst)
    }

    /// `cos(theta) z + sin(theta) J z`.
    pub fn rotate(&self, z: &DVector<f64>, theta: f64) -> DVector<f64> {
        z * theta.cos() + self.jm() * z * theta.sin()
    }
}

fn check_unit(x: &DVector<f64>) -> Result<()> {
    let n = x.norm();
    if (n - 1.0).abs() > 1e-8 {
        return Err(Error::range("x", format!("point must lie on the unit sphere, |x| = {n}")));
    }
    Ok(())
}

/// `DF^T J D^2F J DF` at a unit vector.
pub fn omega_direct(ctx: &HopfContext, x: &DVector<f64>) -> Result<f64> {
    check_unit(x)?;
    let df = ctx.poly.eval_grad(x)?;
    let h = ctx.poly.eval_hessian(x)?;
    let jdf = ctx.jm() * &df;
    // DF^T J = -(J DF)^T since J is skew.
    Ok(-jdf.dot(&(h.as_matrix() * &jdf)))
}

/// Closed forms of `Omega_F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaFormula {
    /// Standard block system under the block complex structure, any `m`.
    StandardGeneral,
    /// `64(-2F^2 - F + 2)`.
    StandardM1,
    /// `64(-2F^2 - F + 2 - 8(1+F)<A_2 z, z>^2)`.
    StandardM2,
    /// Quaternionic system under right multiplication by `i`.
    QuaternionicRightI,
    /// Quaternionic system under left multiplication by `i`.
    QuaternionicLeftI,
}

/// Closed forms valid for the context, most specific first.
pub fn applicable_formulas(ctx: &HopfContext) -> Vec<OmegaFormula> {
    let Family::Fkm(sys) = ctx.poly.family() else {
        return Vec::new();
    };
    match (sys.construction(), ctx.j.tag()) {
        (Construction::StandardBlock, ComplexTag::BlockStandard) => match sys.m() {
            1 => vec![OmegaFormula::StandardM1, OmegaFormula::StandardGeneral],
            2 => vec![OmegaFormula::StandardM2, OmegaFormula::StandardGeneral],
            _ => vec![OmegaFormula::StandardGeneral],
        },
        (Construction::OzekiTakeuchi, ComplexTag::RightMultI) => vec![OmegaFormula::QuaternionicRightI],
        (Construction::OzekiTakeuchi, ComplexTag::LeftMultI) => vec![OmegaFormula::QuaternionicLeftI],
        _ => Vec::new(),
    }
}

/// Evaluates one closed form of `Omega_F` at a unit vector.
pub fn omega_formula(ctx: &HopfContext, formula: OmegaFormula, x: &DVector<f64>) -> Result<f64> {
    check_unit(x)?;
    if !applicable_formulas(ctx).contains(&formula) {
        return Err(Error::Unsupported(format!(
            "closed form {formula:?} does not apply to this system and complex structure"
        )));
    }
    let sys = ctx.poly.clifford().expect("FKM family");
    let f = ctx.poly.eval(x)?;
    let az: Vec<DVector<f64>> = sys.generators().iter().map(|a| a.mul_vec(x)).collect();
    let s: Vec<f64> = az.iter().map(|v| v.dot(x)).collect();
    let j = ctx.jm();
    let base = 2.0 * f * f - f - 2.0;
    let scaled = match formula {
        OmegaFormula::StandardM1 => -2.0 * f * f - f + 2.0,
        OmegaFormula::StandardM2 => -2.0 * f * f - f + 2.0 - 8.0 * (1.0 + f) * s[2] * s[2],
        OmegaFormula::StandardGeneral => {
            let mut total = base + 8.0 * (1.0 + f) * (s[0] * s[0] + s[1] * s[1]);
            for q in 2..az.len() {
                let inner: f64 = (2..az.len()).map(|p| s[p] * az[q].dot(&(j * &az[p]))).sum();
                total += 16.0 * inner * inner;
            }
            total
        }
        OmegaFormula::QuaternionicRightI => {
            let mut total = base;
            for q in 0..4 {
                let jaq = j * &az[q];
                let inner: f64 = (0..4).map(|p| s[p] * jaq.dot(&az[p])).sum();
                total += 16.0 * inner * inner;
            }
            total
        }
        OmegaFormula::QuaternionicLeftI => {
            let a0 = sys.generator(0);
            let cross = x.dot(&(a0 * j * &az[1]));
            base + 8.0 * (1.0 + f) * (s[2] * s[2] + s[3] * s[3])
                + 16.0 * (s[0] * s[0] + s[1] * s[1]) * cross * cross
        }
    };
    Ok(64.0 * scaled)
}

/// The most specific closed form available for the context.
pub fn omega_closed_form(ctx: &HopfContext, x: &DVector<f64>) -> Result<(OmegaFormula, f64)> {
    let formula = *applicable_formulas(ctx).first().ok_or_else(|| {
        Error::Unsupported("no closed form of Omega_F for this system and complex structure".into())
    })?;
    Ok((formula, omega_formula(ctx, formula, x)?))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct AlphaValue {
    /// From `F` and `Omega_F`.
    pub closed: f64,
    /// The `(J nu, J nu)` entry of the shape operator.
    pub geometric: f64,
    pub omega: f64,
    pub f: f64,
}

impl AlphaValue {
    pub fn discrepancy(&self) -> f64 {
        (self.closed - self.geometric).abs()
    }
}

/// `alpha = (g^3 F (3 - 2F^2) + Omega_F) / (g^3 (1 - F^2)^(3/2))`.
pub fn alpha_from_omega(g: usize, f: f64, omega: f64) -> f64 {
    let g3 = (g as f64).powi(3);
    (g3 * f * (3.0 - 2.0 * f * f) + omega) / (g3 * (1.0 - f * f).powf(1.5))
}

pub fn alpha_at(ctx: &HopfContext, x: &DVector<f64>) -> Result<AlphaValue> {
    check_unit(x)?;
    let f = ctx.poly.eval(x)?;
    if f.abs() > 1.0 - EPS_FOCAL {
        return Err(Error::FocalPoint { f });
    }
    let omega = omega_direct(ctx, x)?;
    let closed = alpha_from_omega(ctx.g(), f, omega);
    let frame = spherelevel::frame_at(&ctx.poly, x)?;
    let jnu = ctx.jm() * &frame.nu;
    let hf = jnu.dot(&frame.hessian.mul_vec(&jnu)) - ctx.g() as f64 * f * jnu.norm_squared();
    Ok(AlphaValue {
        closed,
        geometric: -hf / frame.grad_norm,
        omega,
        f,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfBlockResiduals {
    /// `max |S(Jx) + J nu|` in frame coordinates.
    pub vertical: f64,
    /// `|S(Jx, Jx)|`.
    pub vertical_diagonal: f64,
    /// `|S(J nu, Jx) + 1|`.
    pub link: f64,
    /// `max |S(e_i, Jx)|`.
    pub off_block: f64,
    /// Residuals of `sigma_1`, `sigma_2`, `sigma_3` of `S` against `S~`.
    pub sigma: [f64; 3],
    /// `|S(J nu, J nu) - alpha|` with alpha from the closed form.
    pub alpha_entry: f64,
}

#[derive(Clone, Debug)]
pub struct HopfBlocks {
    /// Shape operator in the frame `(e_1..e_(n-2), J nu, J x)`.
    pub shape: SymmetricMatrix,
    /// Leading block on `(e_1..e_(n-2), J nu)`.
    pub reduced: SymmetricMatrix,
    pub alpha: f64,
    pub residuals: HopfBlockResiduals,
}

/// Shape operator in the adapted frame `(e_1.., J nu, J x)`.
pub fn hopf_blocks(ctx: &HopfContext, x: &DVector<f64>) -> Result<HopfBlocks> {
    let frame = spherelevel::frame_at(&ctx.poly, x)?;
    let j = ctx.jm();
    let jx = j * &frame.x;
    let inner = jx.dot(&frame.nu);
    if inner.abs() > FRAME_TOL {
        return Err(Error::FrameDegeneracy { inner });
    }
    let jnu = j * &frame.nu;
    let rest = orthonormal_complement(&[frame.x.clone(), frame.nu.clone(), jnu.clone(), jx.clone()]);
    let n = frame.n();
    let mut basis = DMatrix::zeros(n + 2, n);
    basis.view_mut((0, 0), (n + 2, n - 2)).copy_from(&rest);
    basis.set_column(n - 2, &jnu);
    basis.set_column(n - 1, &jx);
    let gf = ctx.g() as f64 * frame.f;
    let tangent_hess = frame.hessian.congruence(&basis).into_matrix() - DMatrix::identity(n, n) * gf;
    let shape = SymmetricMatrix::symmetrized(tangent_hess * (-1.0 / frame.grad_norm));
    let s = shape.as_matrix();
    let reduced = SymmetricMatrix::symmetrized(s.view((0, 0), (n - 1, n - 1)).into_owned());

    let col = s.column(n - 1);
    let mut expected = DVector::zeros(n);
    expected[n - 2] = -1.0;
    let vertical = (col - &expected).amax();
    let off_block = (0..n - 2).map(|i| s[(i, n - 1)].abs()).fold(0.0, f64::max);
    let alpha = alpha_at(ctx, &frame.x)?.closed;

    let full = shape.eigensolve()?;
    let red = reduced.eigensolve()?;
    let es = crate::symmat::elementary_symmetric(&full.values);
    let er = crate::symmat::elementary_symmetric(&red.values);
    let sigma = [
        (es[1] - er[1]).abs(),
        (es[2] - (er[2] - 1.0)).abs(),
        (es[3] - (er[3] - (er[1] - alpha))).abs(),
    ];
    Ok(HopfBlocks {
        residuals: HopfBlockResiduals {
            vertical,
            vertical_diagonal: s[(n - 1, n - 1)].abs(),
            link: (s[(n - 2, n - 1)] + 1.0).abs(),
            off_block,
            sigma,
            alpha_entry: (s[(n - 2, n - 2)] - alpha).abs(),
        },
        shape,
        reduced,
        alpha,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfDecomposition {
    /// Distinct principal curvatures, descending.
    pub lambdas: Vec<f64>,
    /// Squared projections of `Jx` onto the principal eigenspaces.
    pub phi_sq: Vec<f64>,
    /// Same weights from the moment system `(1, 0, 1, alpha)`.
    pub phi_sq_moments: Vec<f64>,
    /// `max |phi_sq - phi_sq_moments|`.
    pub path_difference: f64,
    /// Number of `phi_i^2 > PHI_THRESHOLD`.
    pub l: usize,
    pub alpha: f64,
}

impl HopfDecomposition {
    /// Residuals of `sum lambda^k phi^2 = (1, 0, 1, alpha)_k` for `k = 0..=3`.
    pub fn moment_residuals(&self) -> [f64; 4] {
        let target = [1.0, 0.0, 1.0, self.alpha];
        let mut out = [0.0; 4];
        for (k, t) in target.iter().enumerate() {
            let m: f64 = self
                .lambdas
                .iter()
                .zip(&self.phi_sq)
                .map(|(l, p)| l.powi(k as i32) * p)
                .sum();
            out[k] = (m - t).abs();
        }
        out
    }
}

/// Weights on `g` principal curvatures matching the first `g` entries of
/// `(1, 0, 1, alpha)`. Closed form for `g = 2`, Vandermonde solve otherwise.
pub fn phi_from_moments(lambdas: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let g = lambdas.len();
    if g == 2 {
        let (l1, l2) = (lambdas[0], lambdas[1]);
        let p1 = -l2 / (l1 - l2);
        return Ok(vec![p1, 1.0 - p1]);
    }
    if !(1..=4).contains(&g) {
        return Err(Error::range("g", format!("moment system has 4 entries, got g = {g}")));
    }
    let moments = [1.0, 0.0, 1.0, alpha];
    vandermonde_solve(lambdas, &moments[..g])
}

pub fn phi_decomposition(ctx: &HopfContext, x: &DVector<f64>) -> Result<HopfDecomposition> {
    let blocks = hopf_blocks(ctx, x)?;
    let eig = blocks.shape.eigen_decompose()?;
    let spectrum = eig.spectrum();
    if spectrum.distinct() != ctx.g() {
        return Err(Error::SpectralGap {
            expected: ctx.g(),
            found: spectrum.distinct(),
        });
    }
    let n = blocks.shape.order();
    let mut lambdas = Vec::with_capacity(ctx.g());
    let mut phi_sq = Vec::with_capacity(ctx.g());
    let mut start = 0;
    for &(value, count) in &spectrum.groups {
        // Jx is the last frame vector; its coordinate in each eigenvector.
        let w: f64 = (start..start + count).map(|c| eig.vectors[(n - 1, c)].powi(2)).sum();
        lambdas.push(value);
        phi_sq.push(w);
        start += count;
    }
    let phi_sq_moments = phi_from_moments(&lambdas, blocks.alpha)?;
    let path_difference = phi_sq
        .iter()
        .zip(&phi_sq_moments)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let l = phi_sq.iter().filter(|p| **p > PHI_THRESHOLD).count();
    Ok(HopfDecomposition {
        lambdas,
        phi_sq,
        phi_sq_moments,
        path_difference,
        l,
        alpha: blocks.alpha,
    })
}

/// Two points on `F = 0` where `Omega_F` takes opposite extreme values, for
/// the `m = 2` standard family (`r = 2k + 2`) and the quaternionic family.
pub fn witness_points(p: &IsoPolynomial) -> Option<[DVector<f64>; 2]> {
    let sys = p.clifford()?;
    let dim = p.ambient_dim();
    let mut z = DVector::zeros(dim);
    let mut zc = DVector::zeros(dim);
    match sys.construction() {
        Construction::StandardBlock if sys.m() == 2 && sys.r() >= 4 && sys.r() % 2 == 0 => {
            let r = sys.r();
            let k = (r - 2) / 2;
            let h = 0.5f64.sqrt();
            z[0] = h;
            z[r] = 0.5;
            z[r + 1] = 0.5;
            zc[0] = h;
            zc[r + k + 1] = 0.5;
            zc[r + k + 2] = 0.5;
        }
        Construction::OzekiTakeuchi => {
            let h = dim / 2;
            let s2 = 2f64.sqrt();
            let big = 0.5 * (2.0 + s2).sqrt();
            let small = 0.5 * (2.0 - s2).sqrt();
            z[0] = big;
            z[h] = small;
            zc[0] = big / s2;
            zc[h] = big / s2;
            zc[h + 4] = small;
        }
        _ => return None,
    }
    Some([z, zc])
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaSample {
    pub index: usize,
    /// `None` for random samples, the witness label otherwise.
    pub witness: Option<&'static str>,
    pub t: f64,
    pub alpha: f64,
    pub alpha_geometric: f64,
    pub omega: f64,
    pub l: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlphaStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

impl AlphaStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std: var.sqrt(),
        })
    }
}

/// Samples `alpha` on the level `t`: random sphere points are projected onto
/// the level along normal great circles. On `t = 0` the witness points are
/// appended when the family has them.
pub fn alpha_scan(ctx: &HopfContext, t: f64, samples: usize, seed: u64) -> Result<Vec<AlphaSample>> {
    let p = &ctx.poly;
    let mut out: Vec<AlphaSample> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sampling::stream(seed, i as u64);
            let mut x = sampling::sphere_point(&mut rng, p.ambient_dim());
            while p.eval(&x)?.abs() > 0.9 {
                x = sampling::sphere_point(&mut rng, p.ambient_dim());
            }
            let y = spherelevel::level_project(p, &x, t)?.point;
            sample_at(ctx, &y, i, None)
        })
        .collect::<Result<Vec<_>>>()?;
    if t == 0.0 {
        if let Some([z, zc]) = witness_points(p) {
            out.push(sample_at(ctx, &z, samples, Some("z"))?);
            out.push(sample_at(ctx, &zc, samples + 1, Some("z-check"))?);
        }
    }
    Ok(out)
}

fn sample_at(ctx: &HopfContext, y: &DVector<f64>, index: usize, witness: Option<&'static str>) -> Result<AlphaSample> {
    let a = alpha_at(ctx, y)?;
    let l = match phi_decomposition(ctx, y) {
        Ok(d) => Some(d.l),
        Err(Error::SpectralGap { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(AlphaSample {
        index,
        witness,
        t: a.f,
        alpha: a.closed,
        alpha_geometric: a.geometric,
        omega: a.omega,
        l,
    })
}

/// CSV rows `index, t, alpha, omega, l`.
pub fn alpha_scan_csv(samples: &[AlphaSample]) -> String {
    let mut out = String::from("index,t,alpha,omega,l\n");
    for s in samples {
        let l = s.l.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{:.16e},{:.16e},{:.16e},{}\n", s.index, s.t, s.alpha, s.omega, l));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordSystem;
    use crate::spherelevel::regular_point;

    fn standard(m: usize, r: usize) -> HopfContext {
        let p = IsoPolynomial::fkm(CliffordSystem::standard(m, r).unwrap()).unwrap();
        let j = ComplexStructure::build(ComplexTag::BlockStandard, 2 * r).unwrap();
        HopfContext::new(p, j).unwrap()
    }

    fn quaternionic(tag: ComplexTag) -> HopfContext {
        let p = IsoPolynomial::fkm(CliffordSystem::ozeki_takeuchi(1).unwrap()).unwrap();
        let j = ComplexStructure::build(tag, 16).unwrap();
        HopfContext::new(p, j).unwrap()
    }

    fn contexts() -> Vec<HopfContext> {
        vec![
            standard(1, 3),
            standard(2, 4),
            standard(3, 8),
            quaternionic(ComplexTag::RightMultI),
            quaternionic(ComplexTag::LeftMultI),
        ]
    }

    fn points(ctx: &HopfContext, seed: u64, count: u64) -> Vec<DVector<f64>> {
        (0..count)
            .map(|i| regular_point(ctx.poly(), seed * 1000 + i, 0.95).unwrap())
            .collect()
    }

    #[test]
    fn invariance() {
        for ctx in contexts() {
            assert!(ctx.s1_invariance_residual(50, 1).unwrap() < 1e-10);
        }
    }

    #[test]
    fn wrong_complex_structure_is_rejected() {
        let p = IsoPolynomial::fkm(CliffordSystem::standard(2, 4).unwrap()).unwrap();
        // Block form whose off-diagonal blocks are a cyclic shift instead
        // of the identity.
        let mut m = DMatrix::zeros(8, 8);
        for i in 0..4 {
            let k = (i + 1) % 4;
            m[(4 + k, i)] = 1.0;
            m[(i, 4 + k)] = -1.0;
        }
        let j = ComplexStructure::from_matrix(m).unwrap();
        let ctx = HopfContext::new_unchecked(p.clone(), j.clone());
        let residual = ctx.s1_invariance_residual(50, 2).unwrap();
        assert!(residual > 1e-2, "{residual}");
        assert!(matches!(HopfContext::new(p, j), Err(Error::Invariance { .. })));
    }

    #[test]
    fn witness_values() {
        for ctx in [standard(2, 4), standard(2, 6), quaternionic(ComplexTag::RightMultI), quaternionic(ComplexTag::LeftMultI)] {
            let [z, zc] = witness_points(ctx.poly()).unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-15 && (zc.norm() - 1.0).abs() < 1e-15);
            assert!(ctx.poly().eval(&z).unwrap().abs() < 1e-14);
            assert!(ctx.poly().eval(&zc).unwrap().abs() < 1e-14);
            assert!((omega_direct(&ctx, &z).unwrap() - 128.0).abs() < 1e-10);
            assert!((omega_direct(&ctx, &zc).unwrap() + 128.0).abs() < 1e-10);
            let a = alpha_at(&ctx, &z).unwrap();
            assert!((a.closed - 2.0).abs() < 1e-12 && (a.geometric - 2.0).abs() < 1e-9);
            let a = alpha_at(&ctx, &zc).unwrap();
            assert!((a.closed + 2.0).abs() < 1e-12 && (a.geometric + 2.0).abs() < 1e-9);
        }
        assert!(witness_points(standard(1, 3).poly()).is_none());
    }

    #[test]
    fn closed_forms_match_direct() {
        for ctx in contexts() {
            let formulas = applicable_formulas(&ctx);
            assert!(!formulas.is_empty());
            for x in points(&ctx, 3, 100) {
                let direct = omega_direct(&ctx, &x).unwrap();
                for &formula in &formulas {
                    let closed = omega_formula(&ctx, formula, &x).unwrap();
                    assert!((closed - direct).abs() < 1e-9 * direct.abs().max(1.0), "{formula:?}: {closed} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn unsupported_pairs() {
        let p = IsoPolynomial::fkm(CliffordSystem::standard(3, 8).unwrap()).unwrap();
        let j = ComplexStructure::build(ComplexTag::LeftMultI, 16).unwrap();
        let ctx = HopfContext::new_unchecked(p, j);
        let x = regular_point(ctx.poly(), 4, 0.9).unwrap();
        assert!(matches!(omega_closed_form(&ctx, &x), Err(Error::Unsupported(_))));
        let q = quaternionic(ComplexTag::RightMultI);
        assert!(matches!(
            omega_formula(&q, OmegaFormula::StandardGeneral, &x.clone().resize_vertically(16, 0.0).normalize()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn alpha_paths_agree() {
        for ctx in contexts() {
            for x in points(&ctx, 5, 50) {
                let a = alpha_at(&ctx, &x).unwrap();
                assert!(a.discrepancy() < 1e-7, "{a:?}");
            }
        }
    }

    #[test]
    fn alpha_is_orbit_invariant() {
        let ctx = standard(2, 4);
        for x in points(&ctx, 6, 10) {
            let a = alpha_at(&ctx, &x).unwrap().closed;
            for theta in [0.3, 1.9, 4.4] {
                let b = alpha_at(&ctx, &ctx.rotate(&x, theta)).unwrap().closed;
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn alpha_constant_on_levels_for_m1() {
        let ctx = standard(1, 3);
        let scan = alpha_scan(&ctx, 0.4, 50, 7).unwrap();
        let values: Vec<f64> = scan.iter().map(|s| s.alpha).collect();
        assert!(AlphaStats::from_values(&values).unwrap().std < 1e-7);
    }

    #[test]
    fn alpha_varies_for_m2() {
        let ctx = standard(2, 4);
        let scan = alpha_scan(&ctx, 0.0, 200, 8).unwrap();
        assert_eq!(scan.len(), 202);
        let values: Vec<f64> = scan.iter().map(|s| s.alpha).collect();
        let stats = AlphaStats::from_values(&values).unwrap();
        assert!(stats.max - stats.min >= 3.0, "{stats:?}");
        let ls: std::collections::BTreeSet<_> = scan.iter().filter_map(|s| s.l).collect();
        assert!(ls.len() > 1, "{ls:?}");
    }

    #[test]
    fn block_structure() {
        for ctx in [standard(2, 4), standard(3, 8), quaternionic(ComplexTag::RightMultI), quaternionic(ComplexTag::LeftMultI)] {
            for x in points(&ctx, 9, 50) {
                let b = hopf_blocks(&ctx, &x).unwrap();
                let r = &b.residuals;
                assert!(r.vertical < 1e-8 && r.vertical_diagonal < 1e-8 && r.link < 1e-8 && r.off_block < 1e-8, "{r:?}");
                assert!(r.sigma.iter().all(|s| *s < 1e-7), "{r:?}");
                assert!(r.alpha_entry < 1e-8, "{r:?}");
            }
        }
    }

    #[test]
    fn phi_decomposition_paths() {
        let ctx = standard(2, 4);
        for x in points(&ctx, 10, 50) {
            let d = phi_decomposition(&ctx, &x).unwrap();
            assert_eq!(d.lambdas.len(), 4);
            assert!(d.path_difference < 1e-7, "{d:?}");
            assert!(d.moment_residuals().iter().all(|r| *r < 1e-8), "{d:?}");
            assert!(d.phi_sq.iter().all(|p| *p >= -1e-10));
            assert!((d.phi_sq.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn two_node_weights() {
        for (l1, l2) in [(1.0, -1.0), (2.0, -0.5), (0.3, -3.0)] {
            let closed = phi_from_moments(&[l1, l2], 0.0).unwrap();
            let vander = vandermonde_solve(&[l1, l2], &[1.0, 0.0]).unwrap();
            assert!((closed[0] - vander[0]).abs() < 1e-12 && (closed[1] - vander[1]).abs() < 1e-12);
            assert!((closed[0] + l2 / (l1 - l2)).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_layout() {
        let ctx = standard(2, 4);
        let scan = alpha_scan(&ctx, 0.0, 3, 1).unwrap();
        let csv = alpha_scan_csv(&scan);
        assert_eq!(csv.lines().next().unwrap(), "index,t,alpha,omega,l");
        assert_eq!(csv.lines().count(), 6);
    }
}
