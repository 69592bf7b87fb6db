//! Isoparametric polynomials: the OT-FKM quartics and Cartan's cubics.
//!
//! Each polynomial carries two representations. The closed form follows the
//! defining expressions directly; the monomial form is a sparse expansion
//! whose exact derivatives serve as an independent oracle. The two are
//! compared at construction.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::clifford::{CliffordSystem, Construction};
use crate::error::{Error, Result};
use crate::poly::SparsePoly;
use crate::sampling;
use crate::symmat::SymmetricMatrix;

/// Relative agreement demanded between closed and monomial forms.
pub const DUAL_FORM_TOL: f64 = 1e-10;
const SELF_CHECK_POINTS: u64 = 100;

#[derive(Clone, Debug)]
pub enum Family {
    Fkm(CliffordSystem),
    /// Cartan cubic over the normed division algebra of dimension `m`.
    Cartan { m: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Fkm,
    Cartan,
}

/// Enough to rebuild a polynomial with bit-identical generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescriptor {
    pub family: FamilyKind,
    /// Clifford order for FKM, algebra dimension for Cartan.
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
}

#[derive(Clone, Debug)]
pub struct IsoPolynomial {
    family: Family,
    g: usize,
    m1: usize,
    m2: usize,
    dim: usize,
    monomials: SparsePoly,
}

/// Cayley–Dickson product `(a1,a2)(b1,b2) = (a1 b1 - conj(b2) a2, b2 a1 + a2 conj(b1))`
/// on `R^m`, `m` a power of two, basis `(1, i, j, k, ...)`.
pub fn cd_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    if n == 1 {
        return vec![a[0] * b[0]];
    }
    let h = n / 2;
    let (a1, a2) = a.split_at(h);
    let (b1, b2) = b.split_at(h);
    let cb1 = cd_conj(b1);
    let cb2 = cd_conj(b2);
    let p = cd_mul(a1, b1);
    let q = cd_mul(&cb2, a2);
    let r = cd_mul(b2, a1);
    let s = cd_mul(a2, &cb1);
    p.iter()
        .zip(&q)
        .map(|(x, y)| x - y)
        .chain(r.iter().zip(&s).map(|(x, y)| x + y))
        .collect()
}

pub fn cd_conj(a: &[f64]) -> Vec<f64> {
    a.iter()
        .enumerate()
        .map(|(i, &v)| if i == 0 { v } else { -v })
        .collect()
}

/// `Re((X Y) Z)`.
fn triple_real(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    cd_mul(&cd_mul(x, y), z)[0]
}

impl IsoPolynomial {
    /// OT-FKM quartic of a Clifford system on `R^(2r)`; multiplicities
    /// `(m, r - m - 1)`.
    pub fn fkm(system: CliffordSystem) -> Result<Self> {
        let dim = system.dim();
        let r = dim / 2;
        let m = system.m();
        if r <= m + 1 {
            return Err(Error::Construction(format!(
                "FKM multiplicity r - m - 1 must be positive, got m = {m}, r = {r}"
            )));
        }
        let monomials = fkm_monomials(&system);
        let poly = Self {
            family: Family::Fkm(system),
            g: 4,
            m1: m,
            m2: r - m - 1,
            dim,
            monomials,
        };
        poly.self_check()?;
        Ok(poly)
    }

    /// Cartan's cubic on `R^(3m+2)` for `m` in `{1, 2, 4, 8}`.
    pub fn cartan(m: usize) -> Result<Self> {
        if !matches!(m, 1 | 2 | 4 | 8) {
            return Err(Error::Construction(format!(
                "Cartan cubics exist for m in {{1, 2, 4, 8}}, got m = {m}"
            )));
        }
        let poly = Self {
            family: Family::Cartan { m },
            g: 3,
            m1: m,
            m2: m,
            dim: 3 * m + 2,
            monomials: cartan_monomials(m),
        };
        poly.self_check()?;
        Ok(poly)
    }

    pub fn from_descriptor(d: &FamilyDescriptor) -> Result<Self> {
        match d.family {
            FamilyKind::Cartan => Self::cartan(d.m),
            FamilyKind::Fkm => {
                let r = d
                    .r
                    .ok_or_else(|| Error::Construction("FKM descriptor needs r".into()))?;
                let system = match d.construction.unwrap_or(Construction::StandardBlock) {
                    Construction::StandardBlock => {
                        // Report the multiplicity bound before block-size constraints.
                        if r <= d.m + 1 {
                            return Err(Error::Construction(format!(
                                "FKM multiplicity r - m - 1 must be positive, got m = {}, r = {r}",
                                d.m
                            )));
                        }
                        CliffordSystem::standard(d.m, r)?
                    }
                    Construction::OzekiTakeuchi => {
                        if d.m != 3 {
                            return Err(Error::Construction(
                                "the quaternionic construction has m = 3".into(),
                            ));
                        }
                        CliffordSystem::ozeki_takeuchi(r)?
                    }
                };
                Self::fkm(system)
            }
        }
    }

    pub fn descriptor(&self) -> FamilyDescriptor {
        match &self.family {
            Family::Cartan { m } => FamilyDescriptor {
                family: FamilyKind::Cartan,
                m: *m,
                r: None,
                construction: None,
            },
            Family::Fkm(sys) => FamilyDescriptor {
                family: FamilyKind::Fkm,
                m: sys.m(),
                r: Some(sys.r()),
                construction: Some(sys.construction()),
            },
        }
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn clifford(&self) -> Option<&CliffordSystem> {
        match &self.family {
            Family::Fkm(sys) => Some(sys),
            Family::Cartan { .. } => None,
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn multiplicities(&self) -> (usize, usize) {
        (self.m1, self.m2)
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the level hypersurfaces in the unit sphere.
    pub fn n(&self) -> usize {
        self.dim - 2
    }

    pub fn monomial_form(&self) -> &SparsePoly {
        &self.monomials
    }

    pub fn profile(&self) -> TransnormalProfile {
        TransnormalProfile {
            g: self.g,
            n: self.n(),
            m1: self.m1,
            m2: self.m2,
        }
    }

    fn check_len(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        Ok(match &self.family {
            Family::Fkm(sys) => {
                let r2 = x.norm_squared();
                let s: f64 = sys
                    .generators()
                    .iter()
                    .map(|a| x.dot(&a.mul_vec(x)).powi(2))
                    .sum();
                r2 * r2 - 2.0 * s
            }
            Family::Cartan { m } => cartan_closed(*m, x.as_slice()),
        })
    }

    pub fn eval_grad(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x)?;
        Ok(match &self.family {
            Family::Fkm(sys) => {
                let mut out = x * x.norm_squared();
                for a in sys.generators() {
                    let az = a.mul_vec(x);
                    let s = x.dot(&az);
                    out -= az * (2.0 * s);
                }
                out * 4.0
            }
            Family::Cartan { .. } => DVector::from_vec(self.monomials.gradient(x.as_slice())),
        })
    }

    pub fn eval_hessian(&self, x: &DVector<f64>) -> Result<SymmetricMatrix> {
        self.check_len(x)?;
        Ok(match &self.family {
            Family::Fkm(sys) => {
                let n = self.dim;
                let mut h = DMatrix::<f64>::identity(n, n) * x.norm_squared();
                h += x * x.transpose() * 2.0;
                for a in sys.generators() {
                    let az = a.mul_vec(x);
                    let s = x.dot(&az);
                    h -= a.as_matrix() * (2.0 * s);
                    h -= &az * az.transpose() * 4.0;
                }
                SymmetricMatrix::symmetrized(h * 4.0)
            }
            Family::Cartan { .. } => {
                SymmetricMatrix::symmetrized(self.monomials.hessian(x.as_slice()))
            }
        })
    }

    pub fn eval_monomial(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.monomials.eval(x.as_slice()))
    }

    pub fn grad_monomial(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(x)?;
        Ok(DVector::from_vec(self.monomials.gradient(x.as_slice())))
    }

    pub fn hessian_monomial(&self, x: &DVector<f64>) -> Result<SymmetricMatrix> {
        self.check_len(x)?;
        Ok(SymmetricMatrix::symmetrized(self.monomials.hessian(x.as_slice())))
    }

    fn self_check(&self) -> Result<()> {
        if self.monomials.homogeneous_degree() != Some(self.g as u32) {
            return Err(Error::Construction(format!(
                "monomial form is not homogeneous of degree {}",
                self.g
            )));
        }
        for i in 0..SELF_CHECK_POINTS {
            let mut rng = sampling::stream(sampling::INTERNAL_SEED, i);
            let x = sampling::ball_point(&mut rng, self.dim, 2.0);
            let closed = self.eval(&x)?;
            let mono = self.monomials.eval(x.as_slice());
            if (closed - mono).abs() > DUAL_FORM_TOL * closed.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "closed and monomial forms disagree: {closed} vs {mono}"
                )));
            }
            let lambda = sampling::uniform(&mut rng, 0.5, 2.0);
            let scaled = self.eval(&(&x * lambda))?;
            let expected = lambda.powi(self.g as i32) * closed;
            if (scaled - expected).abs() > DUAL_FORM_TOL * expected.abs().max(1.0) {
                return Err(Error::Construction(format!(
                    "closed form is not homogeneous of degree {}",
                    self.g
                )));
            }
        }
        Ok(())
    }

    /// `(|DF|^2 - g^2 |x|^(2g-2), tr D^2F - (g^2/2)(m2 - m1) |x|^(g-2))`.
    pub fn cm_residuals(&self, x: &DVector<f64>) -> Result<(f64, f64)> {
        let g = self.g as f64;
        let r2 = x.norm_squared();
        let grad = self.eval_grad(x)?;
        let lap = self.eval_hessian(x)?.trace();
        let first = grad.norm_squared() - g * g * r2.powi(self.g as i32 - 1);
        let second = lap - g * g / 2.0 * (self.m2 as f64 - self.m1 as f64) * x.norm().powi(self.g as i32 - 2);
        Ok((first, second))
    }

    /// `Delta_k F = sigma_k(D^2 F)`.
    pub fn delta_k(&self, x: &DVector<f64>, k: usize) -> Result<f64> {
        if k == 0 || k > self.dim {
            return Err(Error::range(
                "k",
                format!("Delta_k needs 1 <= k <= {}, got {k}", self.dim),
            ));
        }
        self.eval_hessian(x)?.sigma_k(k)
    }

    /// Closed form for `rho_k(D^2 F)`, `k` in `{2, 3, 4}`, in terms of
    /// `F(x)` and `|x|`.
    pub fn hidden_rho_closed_form(&self, k: usize, f: f64, norm: f64) -> Result<f64> {
        let g = self.g as f64;
        let gi = self.g as i32;
        let n = self.n() as f64;
        let d = self.m2 as f64 - self.m1 as f64;
        let r = norm;
        Ok(match k {
            2 => {
                -g.powi(3) / 2.0 * (g - 2.0) * d * f * r.powi(gi - 4)
                    + g * g * (g - 1.0) * (n + 2.0 * g - 2.0) * r.powi(2 * gi - 4)
            }
            3 => {
                g.powi(4) / 4.0 * (g - 2.0) * (g - 4.0) * d * f * f * r.powi(gi - 6)
                    - n * g.powi(3) * (g - 1.0) * (g - 2.0) * f * r.powi(2 * gi - 6)
                    + g.powi(4) / 4.0 * (g * g - 2.0) * d * r.powi(3 * gi - 6)
            }
            4 => {
                -g.powi(5) / 12.0 * (g - 2.0) * (g - 4.0) * (g - 6.0) * d * f.powi(3) * r.powi(gi - 8)
                    + 2.0 * n / 3.0 * g.powi(4) * (g - 1.0) * (g - 2.0) * (g - 3.0) * f * f * r.powi(2 * gi - 8)
                    - g.powi(5) / 12.0 * (g - 2.0) * (5.0 * g * g - 2.0 * g - 12.0) * d * f * r.powi(3 * gi - 8)
                    + (n / 3.0 * g.powi(4) * (g - 1.0) * (g * g + g - 3.0) + 2.0 * g.powi(4) * (g - 1.0).powi(4))
                        * r.powi(4 * gi - 8)
            }
            _ => {
                return Err(Error::range(
                    "k",
                    format!("hidden power-sum identities are known for k in {{2, 3, 4}}, got {k}"),
                ))
            }
        })
    }

    /// `rho_k(D^2 F(x))` minus its closed form.
    pub fn hidden_rho_residual(&self, x: &DVector<f64>, k: usize) -> Result<f64> {
        let closed = self.hidden_rho_closed_form(k, self.eval(x)?, x.norm())?;
        Ok(self.eval_hessian(x)?.rho_k(k)? - closed)
    }
}

fn fkm_monomials(sys: &CliffordSystem) -> SparsePoly {
    let n = sys.dim();
    let r2 = SparsePoly::quadratic_form(&DMatrix::identity(n, n));
    let mut f = r2.mul(&r2);
    for a in sys.generators() {
        let s = SparsePoly::quadratic_form(a.as_matrix());
        f = f.add(&s.mul(&s).scale(-2.0));
    }
    f
}

fn cartan_closed(m: usize, x: &[f64]) -> f64 {
    let (u, v) = (x[0], x[1]);
    let xs = &x[2..2 + m];
    let ys = &x[2 + m..2 + 2 * m];
    let zs = &x[2 + 2 * m..2 + 3 * m];
    let sq = |a: &[f64]| a.iter().map(|t| t * t).sum::<f64>();
    let s3 = 3f64.sqrt();
    u.powi(3) - 3.0 * u * v * v
        + 1.5 * u * (sq(xs) + sq(ys) - 2.0 * sq(zs))
        + 1.5 * s3 * v * (sq(xs) - sq(ys))
        + 3.0 * s3 * triple_real(xs, ys, zs)
}

fn cartan_monomials(m: usize) -> SparsePoly {
    let n = 3 * m + 2;
    let var = |i| SparsePoly::variable(n, i);
    let diag = |range: std::ops::Range<usize>, c: f64| {
        let mut d = DMatrix::zeros(n, n);
        for i in range {
            d[(i, i)] = c;
        }
        SparsePoly::quadratic_form(&d)
    };
    let (u, v) = (var(0), var(1));
    let s3 = 3f64.sqrt();
    let xx = diag(2..2 + m, 1.0);
    let yy = diag(2 + m..2 + 2 * m, 1.0);
    let zz = diag(2 + 2 * m..2 + 3 * m, 1.0);
    let mut f = u
        .mul(&u)
        .mul(&u)
        .add(&u.mul(&v).mul(&v).scale(-3.0))
        .add(&u.mul(&xx.add(&yy).add(&zz.scale(-2.0))).scale(1.5))
        .add(&v.mul(&xx.add(&yy.scale(-1.0))).scale(1.5 * s3));
    // Re((XY)Z) is trilinear; expand it through basis structure constants.
    let basis = |i: usize| {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        e
    };
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                let coef = triple_real(&basis(a), &basis(b), &basis(c));
                if coef != 0.0 {
                    let term = var(2 + a).mul(&var(2 + m + b)).mul(&var(2 + 2 * m + c));
                    f = f.add(&term.scale(3.0 * s3 * coef));
                }
            }
        }
    }
    f
}

/// The transnormal data `b(f) = g^2 (1 - f^2)` and
/// `a(f) = (g^2/2)(m2 - m1) - g(n + g) f` of a level function on the sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransnormalProfile {
    pub g: usize,
    pub n: usize,
    pub m1: usize,
    pub m2: usize,
}

impl TransnormalProfile {
    pub fn b(&self, f: f64) -> f64 {
        let g = self.g as f64;
        g * g * (1.0 - f * f)
    }

    pub fn b_prime(&self, f: f64) -> f64 {
        let g = self.g as f64;
        -2.0 * g * g * f
    }

    pub fn a(&self, f: f64) -> f64 {
        let g = self.g as f64;
        g * g / 2.0 * (self.m2 as f64 - self.m1 as f64) - g * (self.n as f64 + g) * f
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvertDirection {
    ToH,
    ToDelta,
}

/// Converts `(Delta_1 f, ..., Delta_j f)` to the mean curvatures
/// `(H_1, ..., H_j)`, `H_i = sigma_i(S)`, or back.
pub fn delta_h_convert(
    values: &[f64],
    profile: &TransnormalProfile,
    f: f64,
    direction: ConvertDirection,
) -> Result<Vec<f64>> {
    let b = profile.b(f);
    if b <= 0.0 || !b.is_finite() {
        return Err(Error::FocalPoint { f });
    }
    let bp = profile.b_prime(f);
    let root = b.sqrt();
    Ok(match direction {
        ConvertDirection::ToDelta => {
            let s = -root;
            (1..=values.len())
                .map(|j| {
                    let prev = if j == 1 { 1.0 } else { values[j - 2] };
                    s.powi(j as i32) * values[j - 1] + s.powi(j as i32 - 1) * bp / 2.0 * prev
                })
                .collect()
        }
        ConvertDirection::ToH => (1..=values.len())
            .map(|j| {
                let sum: f64 = (1..=j)
                    .map(|i| {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        sign * 2f64.powi(i as i32) * bp.powi((j - i) as i32) * values[i - 1]
                    })
                    .sum();
                (sum + bp.powi(j as i32)) / (2.0 * root).powi(j as i32)
            })
            .collect(),
    })
}
