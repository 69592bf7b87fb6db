//! Sparse multivariate polynomials with exact first and second derivatives.
//!
//! Only what the isoparametric families need: building quadratic forms,
//! products and sums, then evaluating value, gradient and Hessian
//! monomial by monomial.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

/// One monomial `coef * prod x_var^pow`, with `factors` sorted by variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coef: f64,
    pub factors: Vec<(usize, u32)>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|f| f.1).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SparsePoly {
    nvars: usize,
    // Dense exponent vectors keep arithmetic simple; `terms` is the
    // compressed view used for evaluation.
    map: BTreeMap<Vec<u32>, f64>,
    terms: Vec<Monomial>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        Self::from_map(nvars, BTreeMap::new())
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut map = BTreeMap::new();
        map.insert(vec![0; nvars], c);
        Self::from_map(nvars, map)
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut map = BTreeMap::new();
        map.insert(e, 1.0);
        Self::from_map(nvars, map)
    }

    /// `x^T A x` for a square coefficient matrix.
    pub fn quadratic_form(a: &DMatrix<f64>) -> Self {
        let n = a.nrows();
        let mut map = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let c = a[(i, j)];
                if c == 0.0 {
                    continue;
                }
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                *map.entry(e).or_insert(0.0) += c;
            }
        }
        Self::from_map(n, map)
    }

    fn from_map(nvars: usize, mut map: BTreeMap<Vec<u32>, f64>) -> Self {
        map.retain(|_, c| *c != 0.0);
        let terms = map
            .iter()
            .map(|(e, &coef)| Monomial {
                coef,
                factors: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(v, &p)| (v, p))
                    .collect(),
            })
            .collect();
        Self { nvars, map, terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(d)` when every monomial has total degree `d`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.iter().map(Monomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut map = self.map.clone();
        for (e, c) in &other.map {
            *map.entry(e.clone()).or_insert(0.0) += c;
        }
        Self::from_map(self.nvars, map)
    }

    pub fn scale(&self, s: f64) -> Self {
        let map = self.map.iter().map(|(e, c)| (e.clone(), c * s)).collect();
        Self::from_map(self.nvars, map)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut map: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (ea, ca) in &self.map {
            for (eb, cb) in &other.map {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *map.entry(e).or_insert(0.0) += ca * cb;
            }
        }
        Self::from_map(self.nvars, map)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|t| t.coef * t.factors.iter().map(|&(v, p)| x[v].powi(p as i32)).product::<f64>())
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.nvars];
        for t in &self.terms {
            for (i, &(v, p)) in t.factors.iter().enumerate() {
                let mut d = t.coef * p as f64 * x[v].powi(p as i32 - 1);
                for (j, &(w, q)) in t.factors.iter().enumerate() {
                    if j != i {
                        d *= x[w].powi(q as i32);
                    }
                }
                g[v] += d;
            }
        }
        g
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.nvars;
        let mut h = DMatrix::zeros(n, n);
        for t in &self.terms {
            let f = &t.factors;
            for a in 0..f.len() {
                let (v, p) = f[a];
                // Diagonal second derivative.
                if p >= 2 {
                    let mut d = t.coef * (p * (p - 1)) as f64 * x[v].powi(p as i32 - 2);
                    for (j, &(w, q)) in f.iter().enumerate() {
                        if j != a {
                            d *= x[w].powi(q as i32);
                        }
                    }
                    h[(v, v)] += d;
                }
                for b in (a + 1)..f.len() {
                    let (w, q) = f[b];
                    let mut d = t.coef
                        * p as f64
                        * q as f64
                        * x[v].powi(p as i32 - 1)
                        * x[w].powi(q as i32 - 1);
                    for (j, &(u, r)) in f.iter().enumerate() {
                        if j != a && j != b {
                            d *= x[u].powi(r as i32);
                        }
                    }
                    h[(v, w)] += d;
                    h[(w, v)] += d;
                }
            }
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> SparsePoly {
        // x0^2 x1 - 3 x1 x2 + 2 x2^3
        let x0 = SparsePoly::variable(3, 0);
        let x1 = SparsePoly::variable(3, 1);
        let x2 = SparsePoly::variable(3, 2);
        x0.mul(&x0)
            .mul(&x1)
            .add(&x1.mul(&x2).scale(-3.0))
            .add(&x2.mul(&x2).mul(&x2).scale(2.0))
    }

    #[test]
    fn derivatives_of_a_known_cubic() {
        let p = cubic();
        let x = [1.5, -0.5, 2.0];
        assert!((p.eval(&x) - (-1.125 + 3.0 + 16.0)).abs() < 1e-12);
        let g = p.gradient(&x);
        let expected = [2.0 * 1.5 * -0.5, 1.5 * 1.5 - 3.0 * 2.0, -3.0 * -0.5 + 6.0 * 4.0];
        for (a, b) in g.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let h = p.hessian(&x);
        assert!((h[(0, 0)] - 2.0 * -0.5).abs() < 1e-12);
        assert!((h[(0, 1)] - 2.0 * 1.5).abs() < 1e-12);
        assert!((h[(1, 2)] + 3.0).abs() < 1e-12);
        assert!((h[(2, 2)] - 12.0 * 2.0).abs() < 1e-12);
        assert_eq!(h[(0, 2)], 0.0);
        assert_eq!(p.homogeneous_degree(), None);
    }

    #[test]
    fn quadratic_form_collects_symmetric_entries() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -1.0]);
        let q = SparsePoly::quadratic_form(&a);
        assert_eq!(q.len(), 3);
        assert_eq!(q.homogeneous_degree(), Some(2));
        let x = [0.3, -1.2];
        assert!((q.eval(&x) - (0.09 + 4.0 * 0.3 * -1.2 - 1.44)).abs() < 1e-14);
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = SparsePoly::variable(2, 0);
        assert!(x.add(&x.scale(-1.0)).is_empty());
        assert_eq!(SparsePoly::constant(2, 0.0).len(), 0);
    }
}
