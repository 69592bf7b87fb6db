//! Symmetric Clifford systems and the complex structures used with them.
//!
//! A symmetric Clifford system on `R^(2r)` is a tuple `(A_0, ..., A_m)` of
//! symmetric matrices with `A_i A_j + A_j A_i = 2 delta_ij I`. Two concrete
//! families are built here: the standard block form
//!
//! ```text
//! A_0 = [I 0; 0 -I],  A_1 = [0 I; I 0],  A_j = [0 -E_j; E_j 0]  (j >= 2)
//! ```
//!
//! driven by a skew-symmetric system `E_2..E_m` on `R^r`, and the
//! quaternionic system of order `8r + 8` underlying the Ozeki–Takeuchi
//! `(3, 4r)` example. Generators are stored dense.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmat::SymmetricMatrix;

/// Construction-time tolerance; generators are exact `0/±1` matrices.
pub const CLIFFORD_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    StandardBlock,
    #[serde(rename = "ozeki-takeuchi-34r")]
    OzekiTakeuchi,
}

#[derive(Clone, Debug)]
pub struct CliffordSystem {
    m: usize,
    /// Block parameter: `r` in `R^(2r)` for the standard form, `r` in
    /// `R^(8r+8)` for the quaternionic construction.
    r: usize,
    construction: Construction,
    generators: Vec<SymmetricMatrix>,
}

/// Left multiplication by `i`, `j`, `k` on `H = R^4` in the basis
/// `(1, i, j, k)`; index 0 is right multiplication by `i`.
pub fn quaternion_block(p: usize) -> DMatrix<f64> {
    let rows: [[f64; 4]; 4] = match p {
        0 => [[0., -1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., 1.], [0., 0., -1., 0.]],
        1 => [[0., -1., 0., 0.], [1., 0., 0., 0.], [0., 0., 0., -1.], [0., 0., 1., 0.]],
        2 => [[0., 0., -1., 0.], [0., 0., 0., 1.], [1., 0., 0., 0.], [0., -1., 0., 0.]],
        3 => [[0., 0., 0., -1.], [0., 0., -1., 0.], [0., 1., 0., 0.], [1., 0., 0., 0.]],
        _ => panic!("quaternion block index must be 0..=3"),
    };
    DMatrix::from_fn(4, 4, |i, j| rows[i][j])
}

fn block_diagonal(block: &DMatrix<f64>, copies: usize) -> DMatrix<f64> {
    let b = block.nrows();
    let mut out = DMatrix::zeros(b * copies, b * copies);
    for c in 0..copies {
        out.view_mut((c * b, c * b), (b, b)).copy_from(block);
    }
    out
}

fn standard_j(half: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * half, 2 * half);
    for i in 0..half {
        j[(i, half + i)] = -1.0;
        j[(half + i, i)] = 1.0;
    }
    j
}

impl CliffordSystem {
    /// Standard block system `(A_0, A_1, A_2..A_m)` on `R^(2r)`.
    ///
    /// `m = 1` needs no skew blocks; `m = 2` takes `E_2 = [0 -I; I 0]` and
    /// needs `r` even; `m = 3` takes quaternion left multiplications by
    /// `i` and `j` and needs `r` divisible by 4.
    pub fn standard(m: usize, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Construction("r must be positive".into()));
        }
        let skew: Vec<DMatrix<f64>> = match m {
            1 => Vec::new(),
            2 => {
                if !r.is_multiple_of(2) {
                    return Err(Error::Construction(format!(
                        "m = 2 needs r divisible by 2 (complex structure blocks), got r = {r}"
                    )));
                }
                vec![standard_j(r / 2)]
            }
            3 => {
                if !r.is_multiple_of(4) {
                    return Err(Error::Construction(format!(
                        "m = 3 needs r divisible by 4 (quaternion blocks), got r = {r}"
                    )));
                }
                vec![
                    block_diagonal(&quaternion_block(1), r / 4),
                    block_diagonal(&quaternion_block(2), r / 4),
                ]
            }
            0 => return Err(Error::Construction("m must be at least 1".into())),
            _ => {
                return Err(Error::Unsupported(format!(
                    "standard Clifford systems are built for m <= 3, got m = {m}"
                )))
            }
        };
        let n = 2 * r;
        let mut a0 = DMatrix::zeros(n, n);
        let mut a1 = DMatrix::zeros(n, n);
        for i in 0..r {
            a0[(i, i)] = 1.0;
            a0[(r + i, r + i)] = -1.0;
            a1[(i, r + i)] = 1.0;
            a1[(r + i, i)] = 1.0;
        }
        let mut generators = vec![a0, a1];
        for e in skew {
            let mut a = DMatrix::zeros(n, n);
            a.view_mut((0, r), (r, r)).copy_from(&(-&e));
            a.view_mut((r, 0), (r, r)).copy_from(&e);
            generators.push(a);
        }
        Self::from_matrices(m, r, Construction::StandardBlock, generators)
    }

    /// Quaternionic system `(A_0..A_3)` on `R^(8r+8)`, coordinates
    /// `z = (x_1..x_(4r+4), y_1..y_(4r+4))`.
    pub fn ozeki_takeuchi(r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::Construction("r must be at least 1".into()));
        }
        let half = 4 * r + 4;
        let n = 2 * half;
        let mut a0 = DMatrix::zeros(n, n);
        for i in 0..4 {
            a0[(i, half + i)] = 1.0;
            a0[(half + i, i)] = 1.0;
        }
        for i in 4..half {
            a0[(i, i)] = 1.0;
            a0[(half + i, half + i)] = -1.0;
        }
        let mut generators = vec![a0];
        for p in 1..=3 {
            let d = block_diagonal(&quaternion_block(p), r + 1);
            let mut a = DMatrix::zeros(n, n);
            a.view_mut((0, half), (half, half)).copy_from(&d);
            a.view_mut((half, 0), (half, half)).copy_from(&(-&d));
            generators.push(a);
        }
        Self::from_matrices(3, r, Construction::OzekiTakeuchi, generators)
    }

    fn from_matrices(
        m: usize,
        r: usize,
        construction: Construction,
        mats: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        let generators = mats
            .into_iter()
            .map(SymmetricMatrix::from_matrix)
            .collect::<Result<Vec<_>>>()?;
        let system = Self {
            m,
            r,
            construction,
            generators,
        };
        let report = system.verify();
        if report.max_residual() > CLIFFORD_TOL {
            return Err(Error::Construction(format!(
                "Clifford relations violated (residual {:e})",
                report.max_residual()
            )));
        }
        Ok(system)
    }

    /// Wraps generators without checking the Clifford relations. Meant for
    /// diagnostics such as feeding a perturbed system to [`Self::verify`].
    pub fn new_unverified(
        m: usize,
        r: usize,
        construction: Construction,
        generators: Vec<SymmetricMatrix>,
    ) -> Self {
        Self {
            m,
            r,
            construction,
            generators,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    /// Order of the generators.
    pub fn dim(&self) -> usize {
        self.generators[0].order()
    }

    pub fn generators(&self) -> &[SymmetricMatrix] {
        &self.generators
    }

    pub fn generator(&self, p: usize) -> &DMatrix<f64> {
        self.generators[p].as_matrix()
    }

    /// Maximum residuals of the defining relations.
    pub fn verify(&self) -> CliffordReport {
        let n = self.dim();
        let id = DMatrix::<f64>::identity(n, n);
        let mut anticommutation: f64 = 0.0;
        let mut orthogonality: f64 = 0.0;
        let mut symmetry: f64 = 0.0;
        for (i, ai) in self.generators.iter().enumerate() {
            let a = ai.as_matrix();
            symmetry = symmetry.max((a - a.transpose()).amax());
            orthogonality = orthogonality.max((a * a - &id).amax());
            for aj in &self.generators[i + 1..] {
                let b = aj.as_matrix();
                anticommutation = anticommutation.max((a * b + b * a).amax());
            }
        }
        CliffordReport {
            anticommutation,
            orthogonality,
            symmetry,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CliffordReport {
    /// `max |A_i A_j + A_j A_i|` over `i != j`.
    pub anticommutation: f64,
    /// `max |A_i^2 - I|`.
    pub orthogonality: f64,
    pub symmetry: f64,
}

impl CliffordReport {
    pub fn max_residual(&self) -> f64 {
        self.anticommutation.max(self.orthogonality).max(self.symmetry)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexTag {
    /// `[0 -I; I 0]`.
    BlockStandard,
    /// Right multiplication by `i` on `H^k`, blocks `D_0`.
    RightMultI,
    /// Left multiplication by `i` on `H^k`, blocks `D_1`.
    LeftMultI,
    /// Any other orthogonal skew matrix.
    Custom,
}

#[derive(Clone, Debug)]
pub struct ComplexStructure {
    tag: ComplexTag,
    matrix: DMatrix<f64>,
}

impl ComplexStructure {
    pub fn build(tag: ComplexTag, dim: usize) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::Construction(format!(
                "complex structure needs a positive even dimension, got {dim}"
            )));
        }
        let matrix = match tag {
            ComplexTag::BlockStandard => standard_j(dim / 2),
            ComplexTag::RightMultI | ComplexTag::LeftMultI => {
                if !dim.is_multiple_of(4) {
                    return Err(Error::Construction(format!(
                        "quaternionic complex structure needs dimension divisible by 4, got {dim}"
                    )));
                }
                let p = if tag == ComplexTag::RightMultI { 0 } else { 1 };
                block_diagonal(&quaternion_block(p), dim / 4)
            }
            ComplexTag::Custom => {
                return Err(Error::Construction(
                    "custom complex structures are built with from_matrix".into(),
                ))
            }
        };
        Ok(Self { tag, matrix })
    }

    /// Accepts an arbitrary matrix with `J^T = -J` and `J^2 = -I`.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() || !n.is_multiple_of(2) || n == 0 {
            return Err(Error::Construction("complex structure must be square of even order".into()));
        }
        let skew = (&matrix + matrix.transpose()).amax();
        let square = (&matrix * &matrix + DMatrix::<f64>::identity(n, n)).amax();
        if skew > CLIFFORD_TOL || square > CLIFFORD_TOL {
            return Err(Error::Construction(format!(
                "not a complex structure (skew residual {skew:e}, J^2 + I residual {square:e})"
            )));
        }
        Ok(Self {
            tag: ComplexTag::Custom,
            matrix,
        })
    }

    pub fn tag(&self) -> ComplexTag {
        self.tag
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Commute,
    Anticommute,
    Neither,
}

/// `sign * A_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignedGenerator {
    pub sign: i8,
    pub index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommutationEntry {
    pub p: usize,
    pub relation: Relation,
    /// `max |A_p J - J A_p|`.
    pub commutator: f64,
    /// `max |A_p J + J A_p|`.
    pub anticommutator: f64,
    /// `A_p J` as a signed generator, when it is one.
    pub right_product: Option<SignedGenerator>,
    /// `J A_p` as a signed generator, when it is one.
    pub left_product: Option<SignedGenerator>,
}

fn match_generator(product: &DMatrix<f64>, sys: &CliffordSystem) -> Option<SignedGenerator> {
    for (q, a) in sys.generators.iter().enumerate() {
        let a = a.as_matrix();
        if (product - a).amax() <= CLIFFORD_TOL {
            return Some(SignedGenerator { sign: 1, index: q });
        }
        if (product + a).amax() <= CLIFFORD_TOL {
            return Some(SignedGenerator { sign: -1, index: q });
        }
    }
    None
}

/// Classifies each generator against `J` and identifies products `A_p J`,
/// `J A_p` that are themselves signed generators.
pub fn check_commutation_table(
    sys: &CliffordSystem,
    j: &ComplexStructure,
) -> Result<Vec<CommutationEntry>> {
    if sys.dim() != j.dim() {
        return Err(Error::Dimension {
            expected: sys.dim(),
            got: j.dim(),
        });
    }
    let jm = j.matrix();
    Ok(sys
        .generators
        .iter()
        .enumerate()
        .map(|(p, a)| {
            let a = a.as_matrix();
            let aj = a * jm;
            let ja = jm * a;
            let commutator = (&aj - &ja).amax();
            let anticommutator = (&aj + &ja).amax();
            let relation = if commutator <= CLIFFORD_TOL {
                Relation::Commute
            } else if anticommutator <= CLIFFORD_TOL {
                Relation::Anticommute
            } else {
                Relation::Neither
            };
            CommutationEntry {
                p,
                relation,
                commutator,
                anticommutator,
                right_product: match_generator(&aj, sys),
                left_product: match_generator(&ja, sys),
            }
        })
        .collect())
}
