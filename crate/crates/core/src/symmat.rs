//! Dense symmetric matrices and symmetric-function identities.
//!
//! Everything downstream (Hessians, shape operators, Clifford generators)
//! is carried as a [`SymmetricMatrix`]. Eigenvalues come from a cyclic
//! Jacobi sweep, which is accurate and simple at the sizes used here
//! (order at most a few dozen).
//!
//! The symmetric-function side covers the elementary symmetric polynomials
//! `sigma_k`, the power sums `rho_k`, the Newton identities linking them,
//! and the inverse problem of recovering a spectrum from its power sums.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Eigenvalues closer than this are reported as one multiplicity group.
pub const CLUSTER_TOL: f64 = 1e-6;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the input norm.
pub const JACOBI_REL_TOL: f64 = 1e-12;

/// Sweep budget for the Jacobi eigensolver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Imaginary parts above this make a moment vector unrealizable.
pub const MOMENT_IMAG_TOL: f64 = 1e-6;

/// Minimum separation of Vandermonde nodes.
pub const VANDERMONDE_MIN_GAP: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Wraps a square matrix, rejecting it when the asymmetry exceeds
    /// `1e-12 * max(1, max|a_ij|)`; accepted input is symmetrized exactly.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::range("matrix order", "order must be at least 1"));
        }
        let scale = m.amax().max(1.0);
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Asymmetric { asymmetry: asym });
        }
        Ok(Self::symmetrized(m))
    }

    /// Averages `m` with its transpose. Used where the input is symmetric
    /// up to rounding by construction (Hessians, frame projections).
    pub fn symmetrized(m: DMatrix<f64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrix required");
        let inner = (&m + m.transpose()) * 0.5;
        Self { inner }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut inner = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                inner[(i, j)] = v;
                inner[(j, i)] = v;
            }
        }
        Self { inner }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self {
            inner: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn order(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn mul_vec(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.inner * v
    }

    /// `B^T M B` for a matrix `B` whose columns span the target frame.
    pub fn congruence(&self, basis: &DMatrix<f64>) -> SymmetricMatrix {
        Self::symmetrized(basis.transpose() * &self.inner * basis)
    }

    /// Eigenvalues, sorted descending and grouped at [`CLUSTER_TOL`].
    pub fn eigensolve(&self) -> Result<Spectrum> {
        Ok(Spectrum::new(jacobi(&self.inner, false)?.0))
    }

    /// Eigenvalues (descending) together with orthonormal eigenvectors.
    pub fn eigen_decompose(&self) -> Result<EigenDecomposition> {
        let (values, vectors) = jacobi(&self.inner, true)?;
        Ok(EigenDecomposition {
            values,
            vectors: vectors.expect("vectors requested"),
        })
    }

    /// Elementary symmetric polynomial of the eigenvalues; `sigma_0 = 1`.
    pub fn sigma_k(&self, k: usize) -> Result<f64> {
        let n = self.order();
        if k > n {
            return Err(Error::range("k", format!("sigma_k needs 0 <= k <= {n}, got {k}")));
        }
        let spectrum = self.eigensolve()?;
        Ok(elementary_symmetric(&spectrum.values)[k])
    }

    /// Same quantity as [`Self::sigma_k`] summed over principal `k`-minors.
    /// Exponential in the order; intended as a cross-check for `n <= 8`.
    pub fn sigma_k_principal_minors(&self, k: usize) -> Result<f64> {
        let n = self.order();
        if k > n {
            return Err(Error::range("k", format!("sigma_k needs 0 <= k <= {n}, got {k}")));
        }
        if k == 0 {
            return Ok(1.0);
        }
        let mut total = 0.0;
        for mask in 0u64..(1u64 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let minor = DMatrix::from_fn(k, k, |a, b| self.inner[(idx[a], idx[b])]);
            total += minor.determinant();
        }
        Ok(total)
    }

    /// Power sum `tr(M^k)` by repeated multiplication; `rho_0 = n`.
    pub fn rho_k(&self, k: usize) -> Result<f64> {
        let n = self.order();
        if k == 0 {
            return Ok(n as f64);
        }
        let mut power = self.inner.clone();
        for _ in 1..k {
            power = &power * &self.inner;
        }
        let tr = power.trace();
        if !tr.is_finite() {
            return Err(Error::NonFinite("rho_k"));
        }
        Ok(tr)
    }

    /// `rho_k` summed over eigenvalues.
    pub fn rho_k_spectral(&self, k: usize) -> Result<f64> {
        let spectrum = self.eigensolve()?;
        let value = power_sum(&spectrum.values, k);
        if !value.is_finite() {
            return Err(Error::NonFinite("rho_k"));
        }
        Ok(value)
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.values.clone())
    }
}

/// Sorted eigenvalue list with multiplicity grouping.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    /// Descending.
    pub values: Vec<f64>,
    /// `(value, count)` per cluster, descending; counts sum to `values.len()`.
    pub groups: Vec<(f64, usize)>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Self {
        Self::with_tolerance(values, CLUSTER_TOL)
    }

    pub fn with_tolerance(mut values: Vec<f64>, tol: f64) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let groups = cluster_sorted(&values, tol);
        Self { values, groups }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn distinct(&self) -> usize {
        self.groups.len()
    }

    /// Largest elementwise difference against another spectrum of equal
    /// length, both sorted descending.
    pub fn max_abs_diff(&self, other: &Spectrum) -> Option<f64> {
        if self.len() != other.len() {
            return None;
        }
        Some(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn negated(&self) -> Spectrum {
        Spectrum::new(self.values.iter().map(|v| -v).collect())
    }
}

/// Groups a descending list into runs whose consecutive gaps are within `tol`.
fn cluster_sorted(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut groups: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > tol {
            if i > start {
                let run = &values[start..i];
                let mean = run.iter().sum::<f64>() / run.len() as f64;
                groups.push((mean, run.len()));
            }
            start = i;
        }
    }
    groups
}

/// Cyclic Jacobi rotations. Returns eigenvalues sorted descending and, if
/// requested, the matching eigenvector columns.
fn jacobi(m: &DMatrix<f64>, want_vectors: bool) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let n = m.nrows();
    if n == 0 {
        return Err(Error::range("matrix order", "order must be at least 1"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigensolve input"));
    }
    // Row-major scratch copy.
    let mut a: Vec<f64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let mut v: Vec<f64> = if want_vectors {
        (0..n * n).map(|k| if k / n == k % n { 1.0 } else { 0.0 }).collect()
    } else {
        Vec::new()
    };
    let norm = m.norm();
    let threshold = JACOBI_REL_TOL * norm;

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let off_norm = off(&a);
        if off_norm <= threshold || norm == 0.0 {
            break;
        }
        if sweeps >= JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence {
                sweeps,
                off_diagonal: off_norm,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- A J
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                // A <- J^T A
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = want_vectors.then(|| DMatrix::from_fn(n, n, |r, c| v[r * n + order[c]]));
    Ok((values, vectors))
}

/// `(sigma_0, ..., sigma_n)` of a list of numbers.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (count, &x) in values.iter().enumerate() {
        for k in (1..=count + 1).rev() {
            e[k] += x * e[k - 1];
        }
    }
    e
}

pub fn power_sum(values: &[f64], k: usize) -> f64 {
    values.iter().map(|v| v.powi(k as i32)).sum()
}

fn check_newton_input(len: usize, n: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::range("moment list", "empty input"));
    }
    if len > n {
        return Err(Error::range(
            "moment list",
            format!("{len} entries exceed the dimension {n}"),
        ));
    }
    Ok(())
}

/// `(rho_1..rho_k) -> (sigma_1..sigma_k)` through
/// `k sigma_k = sum_i (-1)^(i-1) sigma_(k-i) rho_i`.
pub fn newton_sigma_from_rho(rho: &[f64], n: usize) -> Result<Vec<f64>> {
    check_newton_input(rho.len(), n)?;
    let mut sigma = vec![1.0];
    for k in 1..=rho.len() {
        let mut acc = 0.0;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += sign * sigma[k - i] * rho[i - 1];
        }
        sigma.push(acc / k as f64);
    }
    sigma.remove(0);
    Ok(sigma)
}

/// Inverse of [`newton_sigma_from_rho`].
pub fn newton_rho_from_sigma(sigma: &[f64], n: usize) -> Result<Vec<f64>> {
    check_newton_input(sigma.len(), n)?;
    let s = |j: usize| if j == 0 { 1.0 } else { sigma[j - 1] };
    let mut rho: Vec<f64> = Vec::with_capacity(sigma.len());
    for k in 1..=sigma.len() {
        let mut acc = k as f64 * s(k);
        for i in 1..k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc -= sign * s(k - i) * rho[i - 1];
        }
        let sign_k = if k % 2 == 1 { 1.0 } else { -1.0 };
        rho.push(sign_k * acc);
    }
    Ok(rho)
}

/// Recovers the multiset whose power sums are `rho = (rho_1..rho_n)`.
///
/// The monic polynomial `sum_k (-1)^k sigma_k x^(n-k)` is solved through its
/// companion matrix. Roots of a multiple eigenvalue split by roughly
/// `eps^(1/mult)`; such clusters are averaged and polished with Newton steps
/// on the matching derivative before the imaginary residue is judged.
pub fn spectrum_from_moments(rho: &[f64], n: usize) -> Result<Spectrum> {
    if rho.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: rho.len(),
        });
    }
    let sigma = newton_sigma_from_rho(rho, n)?;
    // coeffs[k] multiplies x^(n-k); coeffs[0] = 1.
    let mut coeffs = vec![1.0];
    for (k, s) in sigma.iter().enumerate() {
        let sign = if (k + 1) % 2 == 1 { -1.0 } else { 1.0 };
        coeffs.push(sign * s);
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite("characteristic polynomial"));
    }
    let roots = polynomial_roots(&coeffs);

    let scale = roots.iter().map(|r| r.0.hypot(r.1)).fold(1.0, f64::max);
    let clusters = cluster_complex(&roots, 1e-3 * scale);

    let mut values = Vec::with_capacity(n);
    let mut worst_imag: f64 = 0.0;
    for members in clusters {
        let count = members.len();
        let re = members.iter().map(|&i| roots[i].0).sum::<f64>() / count as f64;
        let im = members.iter().map(|&i| roots[i].1).sum::<f64>() / count as f64;
        worst_imag = worst_imag.max(im.abs() / re.abs().max(1.0));
        let polished = polish_root(&coeffs, re, count - 1, 1e-3 * scale);
        values.extend(std::iter::repeat_n(polished, count));
    }
    if worst_imag > MOMENT_IMAG_TOL {
        return Err(Error::IllPosedMoments {
            imaginary: worst_imag,
        });
    }
    Ok(Spectrum::new(values))
}

/// Roots `(re, im)` of the monic polynomial with `coeffs[k]` on `x^(n-k)`.
fn polynomial_roots(coeffs: &[f64]) -> Vec<(f64, f64)> {
    let n = coeffs.len() - 1;
    if n == 1 {
        return vec![(-coeffs[1], 0.0)];
    }
    let mut companion = DMatrix::zeros(n, n);
    for j in 0..n {
        companion[(0, j)] = -coeffs[j + 1];
    }
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect()
}

/// Single-linkage clustering of complex points.
fn cluster_complex(points: &[(f64, f64)], tol: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1);
            if d <= tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[b.max(a)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut index_of = std::collections::BTreeMap::new();
    for i in 0..n {
        let root = find(&mut label, i);
        let slot = *index_of.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(i);
    }
    groups
}

/// Value and slope of the `d`-th derivative of the polynomial at `x`.
fn derivative_pair(coeffs: &[f64], d: usize, x: f64) -> (f64, f64) {
    let n = coeffs.len() - 1;
    let falling = |power: usize, order: usize| -> f64 {
        (0..order).map(|i| (power - i) as f64).product()
    };
    let mut value = 0.0;
    let mut slope = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let power = n - k;
        if power >= d {
            value += c * falling(power, d) * x.powi((power - d) as i32);
        }
        if power > d {
            slope += c * falling(power, d + 1) * x.powi((power - d - 1) as i32);
        }
    }
    (value, slope)
}

/// Newton iterations on the `d`-th derivative, which has a simple root at a
/// root of multiplicity `d + 1`. Falls back to `x0` if the iteration wanders
/// further than `radius`.
fn polish_root(coeffs: &[f64], x0: f64, d: usize, radius: f64) -> f64 {
    let mut x = x0;
    for _ in 0..8 {
        let (v, s) = derivative_pair(coeffs, d, x);
        if s == 0.0 || !s.is_finite() {
            break;
        }
        let step = v / s;
        x -= step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    if x.is_finite() && (x - x0).abs() <= radius {
        x
    } else {
        x0
    }
}

/// Solves `V w = moments` with `V[i][j] = nodes[j]^i` (Björck–Pereyra).
pub fn vandermonde_solve(nodes: &[f64], moments: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    if moments.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: moments.len(),
        });
    }
    if n == 0 {
        return Err(Error::range("nodes", "at least one node required"));
    }
    let mut min_gap = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            min_gap = min_gap.min((nodes[i] - nodes[j]).abs());
        }
    }
    if min_gap <= VANDERMONDE_MIN_GAP {
        return Err(Error::Conditioning { gap: min_gap });
    }
    let x = nodes;
    let mut b = moments.to_vec();
    for (k, &xk) in x.iter().enumerate().take(n.saturating_sub(1)) {
        for i in (k + 1..n).rev() {
            b[i] -= xk * b[i - 1];
        }
    }
    for k in (0..n.saturating_sub(1)).rev() {
        for i in (k + 1)..n {
            b[i] /= x[i] - x[i - k - 1];
        }
        for i in k..(n - 1) {
            b[i] -= b[i + 1];
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(n, |_, _| rng.random_range(-2.0..2.0))
    }

    #[test]
    fn sigma_identity_is_binomial() {
        assert!((SymmetricMatrix::identity(4).sigma_k(2).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_of_diagonal() {
        let m = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        assert!((m.sigma_k(2).unwrap() - 11.0).abs() < 1e-12);
        assert_eq!(m.sigma_k(0).unwrap(), 1.0);
        assert!(matches!(m.sigma_k(4), Err(Error::Range { .. })));
    }

    #[test]
    fn sigma_matches_principal_minor_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_symmetric(5, &mut rng);
        // Brute-force: enumerate 3-subsets explicitly.
        let mut oracle = 0.0;
        for a in 0..5 {
            for b in (a + 1)..5 {
                for c in (b + 1)..5 {
                    let idx = [a, b, c];
                    let minor = DMatrix::from_fn(3, 3, |i, j| m.get(idx[i], idx[j]));
                    oracle += minor.determinant();
                }
            }
        }
        let via_eigen = m.sigma_k(3).unwrap();
        assert!((via_eigen - oracle).abs() <= 1e-10 * oracle.abs().max(1.0));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(SymmetricMatrix::identity(3).rho_k(5).unwrap(), 3.0);
        let d = SymmetricMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        assert_eq!(d.rho_k(2).unwrap(), 14.0);
        assert_eq!(d.rho_k(0).unwrap(), 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let m = random_symmetric(6, &mut rng);
        let direct = m.rho_k(4).unwrap();
        let spectral = m.rho_k_spectral(4).unwrap();
        assert!((direct - spectral).abs() <= 1e-9 * direct.abs());
    }

    #[test]
    fn rho_overflow_is_reported() {
        let m = SymmetricMatrix::from_diagonal(&[1e200, 1.0]);
        assert_eq!(m.rho_k(3), Err(Error::NonFinite("rho_k")));
    }

    #[test]
    fn eigensolve_examples() {
        let s = SymmetricMatrix::from_diagonal(&[3.0, 1.0, 2.0]).eigensolve().unwrap();
        assert_eq!(s.values, vec![3.0, 2.0, 1.0]);
        let swap = SymmetricMatrix::from_matrix(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))
            .unwrap()
            .eigensolve()
            .unwrap();
        assert!((swap.values[0] - 1.0).abs() < 1e-14);
        assert!((swap.values[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenpairs_have_small_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 12, 30] {
            let m = random_symmetric(n, &mut rng);
            let dec = m.eigen_decompose().unwrap();
            let norm = m.frobenius_norm();
            for (i, &lambda) in dec.values.iter().enumerate() {
                let v = dec.vectors.column(i).into_owned();
                let r = (m.as_matrix() * &v - &v * lambda).norm();
                assert!(r <= 1e-10 * norm, "n={n} residual {r:e}");
            }
            let gram = dec.vectors.transpose() * &dec.vectors;
            assert!((gram - DMatrix::identity(n, n)).amax() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_input_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(matches!(SymmetricMatrix::from_matrix(m), Err(Error::Asymmetric { .. })));
        let tiny = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-15, 1.0]);
        let s = SymmetricMatrix::from_matrix(tiny).unwrap();
        assert_eq!(s.get(0, 1), s.get(1, 0));
    }

    #[test]
    fn clustering_groups_multiplicities() {
        let s = Spectrum::new(vec![1.0, 2.0, 1.0 + 1e-9, -3.0, 2.0]);
        assert_eq!(s.values.len(), 5);
        assert_eq!(s.groups.len(), 3);
        assert_eq!(s.groups.iter().map(|g| g.1).collect::<Vec<_>>(), vec![2, 2, 1]);
    }

    #[test]
    fn newton_examples() {
        let sigma = newton_sigma_from_rho(&[6.0, 14.0, 36.0], 3).unwrap();
        for (a, b) in sigma.iter().zip([6.0, 11.0, 6.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(newton_sigma_from_rho(&[0.0; 4], 4).unwrap(), vec![0.0; 4]);
        let rho = newton_rho_from_sigma(&[3.0, 3.0, 1.0], 3).unwrap();
        for r in rho {
            assert!((r - 3.0).abs() < 1e-12);
        }
        assert!(matches!(newton_sigma_from_rho(&[], 3), Err(Error::Range { .. })));
        assert!(matches!(newton_rho_from_sigma(&[1.0, 2.0], 1), Err(Error::Range { .. })));
    }

    #[test]
    fn newton_rho_matches_direct_power_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let values: Vec<f64> = (0..7).map(|_| rng.random_range(-2.0..2.0)).collect();
        let sigma = elementary_symmetric(&values)[1..].to_vec();
        let rho = newton_rho_from_sigma(&sigma, 7).unwrap();
        for (k, r) in rho.iter().enumerate() {
            let direct = power_sum(&values, k + 1);
            assert!((r - direct).abs() <= 1e-10 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn moments_recover_spectra() {
        let s = spectrum_from_moments(&[3.0, 3.0, 3.0], 3).unwrap();
        for v in &s.values {
            assert!((v - 1.0).abs() < 1e-6, "{v}");
        }
        let s = spectrum_from_moments(&[6.0, 14.0, 36.0], 3).unwrap();
        assert_eq!(s.groups.len(), 3);
        for (v, e) in s.values.iter().zip([3.0, 2.0, 1.0]) {
            assert!((v - e).abs() < 1e-9);
        }
    }

    #[test]
    fn moments_recover_munzner_g4_spectrum() {
        use std::f64::consts::PI;
        let mut values = Vec::new();
        for (i, mult) in [2usize, 1, 2, 1].iter().enumerate() {
            let c = 1.0 / (PI / 8.0 + i as f64 * PI / 4.0).tan();
            values.extend(std::iter::repeat_n(c, *mult));
        }
        let rho: Vec<f64> = (1..=6).map(|k| power_sum(&values, k)).collect();
        let s = spectrum_from_moments(&rho, 6).unwrap();
        let expected = Spectrum::new(values);
        assert!(s.max_abs_diff(&expected).unwrap() < 1e-6);
        assert_eq!(s.groups.iter().map(|g| g.1).collect::<Vec<_>>(), vec![2, 1, 2, 1]);
    }

    #[test]
    fn complex_roots_are_ill_posed() {
        // x^2 + 1
        let err = spectrum_from_moments(&[0.0, -2.0], 2).unwrap_err();
        assert!(matches!(err, Error::IllPosedMoments { .. }));
        assert!(matches!(spectrum_from_moments(&[1.0], 2), Err(Error::Dimension { .. })));
    }

    #[test]
    fn vandermonde_two_nodes() {
        let (l1, l2) = (1.7, -0.4);
        let w = vandermonde_solve(&[l1, l2], &[1.0, 0.0]).unwrap();
        assert!((w[0] - (-l2 / (l1 - l2))).abs() < 1e-14);
        assert!((w[1] - (l1 / (l1 - l2))).abs() < 1e-14);
        let w = vandermonde_solve(&[1.0, -1.0], &[1.0, 0.0]).unwrap();
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn vandermonde_rejects_close_nodes() {
        let err = vandermonde_solve(&[1.0, 1.0 + 1e-9, 2.0], &[1.0, 0.0, 0.0]).unwrap_err();
        assert!(matches!(err, Error::Conditioning { gap } if gap < 1e-8));
    }
}
