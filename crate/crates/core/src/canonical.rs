//! Canonical blocks for *congruence and the matrices built from them.
//!
//! Every complex square matrix is *congruent to a direct sum of blocks
//! `H_m(λ)` with `|λ| > 1`, `μΔ_n` with `|μ| = 1`, and nilpotent Jordan blocks
//! `J_k(0)`. This module builds those blocks, assembles block-diagonal
//! canonical matrices, and provides the `Δ_n` cocycle and the Hermitian
//! split `A = H + iK`.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{rejected, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Absolute tolerance for deciding `λ = λ'`, `μ = ±μ'`, `μ ∈ ℝ`, `μ ∈ iℝ`.
pub const SCALAR_EQ_TOL: f64 = 1e-12;
/// Allowed deviation of `|μ|` from 1 before renormalization.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

pub(crate) fn close(a: C64, b: C64) -> bool {
    (a - b).norm() <= SCALAR_EQ_TOL
}

fn finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// One direct summand of a canonical matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CanonicalBlock {
    /// `H_m(λ) = [[0, I_m], [J_m(λ), 0]]`, a `2m × 2m` block.
    H {
        size: usize,
        #[serde(with = "scalar_json")]
        lambda: C64,
    },
    /// `μ Δ_n`.
    Delta {
        size: usize,
        #[serde(with = "scalar_json")]
        mu: C64,
    },
    /// `J_k(0)`.
    Jordan { size: usize },
}

impl CanonicalBlock {
    pub fn h(size: usize, lambda: C64) -> Result<Self> {
        CanonicalBlock::H { size, lambda }.validated()
    }

    pub fn delta(size: usize, mu: C64) -> Result<Self> {
        CanonicalBlock::Delta { size, mu }.validated()
    }

    pub fn jordan(size: usize) -> Result<Self> {
        CanonicalBlock::Jordan { size }.validated()
    }

    /// Checks the block invariants and renormalizes `μ` onto the unit circle.
    pub fn validated(self) -> Result<Self> {
        match self {
            CanonicalBlock::H { size, lambda } => {
                if size == 0 {
                    return Err(rejected("H block size must be at least 1"));
                }
                if !finite(lambda) {
                    return Err(rejected("H block lambda must be finite"));
                }
                if lambda.norm() <= 1.0 {
                    return Err(rejected(format!(
                        "H block requires |lambda| > 1, got |lambda| = {}",
                        lambda.norm()
                    )));
                }
                Ok(self)
            }
            CanonicalBlock::Delta { size, mu } => {
                if size == 0 {
                    return Err(rejected("Delta block size must be at least 1"));
                }
                if !finite(mu) {
                    return Err(rejected("Delta block mu must be finite"));
                }
                let modulus = mu.norm();
                if (modulus - 1.0).abs() > UNIT_MODULUS_TOL {
                    return Err(rejected(format!(
                        "Delta block requires |mu| = 1, got |mu| = {modulus}"
                    )));
                }
                Ok(CanonicalBlock::Delta {
                    size,
                    mu: mu / modulus,
                })
            }
            CanonicalBlock::Jordan { size } => {
                if size == 0 {
                    return Err(rejected("Jordan block size must be at least 1"));
                }
                Ok(self)
            }
        }
    }

    /// Side length of the square block.
    pub fn dim(&self) -> usize {
        match *self {
            CanonicalBlock::H { size, .. } => 2 * size,
            CanonicalBlock::Delta { size, .. } | CanonicalBlock::Jordan { size } => size,
        }
    }

    pub(crate) fn kind_rank(&self) -> u8 {
        match self {
            CanonicalBlock::H { .. } => 0,
            CanonicalBlock::Delta { .. } => 1,
            CanonicalBlock::Jordan { .. } => 2,
        }
    }
}

/// Ordered list of canonical blocks.
///
/// Construction normalizes the order to H blocks, then Δ blocks, then Jordan
/// blocks by decreasing size. The relative order of H blocks and of Δ blocks
/// is preserved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalSpec {
    blocks: Vec<CanonicalBlock>,
}

impl CanonicalSpec {
    pub fn new(blocks: Vec<CanonicalBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(rejected("canonical spec needs at least one block"));
        }
        let mut blocks = blocks
            .into_iter()
            .map(CanonicalBlock::validated)
            .collect::<Result<Vec<_>>>()?;
        blocks.sort_by(|a, b| {
            a.kind_rank().cmp(&b.kind_rank()).then_with(|| match (a, b) {
                (CanonicalBlock::Jordan { size: x }, CanonicalBlock::Jordan { size: y }) => {
                    y.cmp(x)
                }
                _ => std::cmp::Ordering::Equal,
            })
        });
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[CanonicalBlock] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(CanonicalBlock::dim).sum()
    }

    /// Block sizes in order; the partition of the assembled matrix.
    pub fn partition(&self) -> Vec<usize> {
        self.blocks.iter().map(CanonicalBlock::dim).collect()
    }

    /// Starting row/column of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.dim();
                Some(start)
            })
            .collect()
    }
}

impl<'de> Deserialize<'de> for CanonicalSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            blocks: Vec<CanonicalBlock>,
        }
        let raw = Raw::deserialize(d)?;
        CanonicalSpec::new(raw.blocks).map_err(serde::de::Error::custom)
    }
}

/// `J_n(λ)`: `λ` on the diagonal, ones on the superdiagonal.
pub fn jordan_block(n: usize, lambda: C64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `Δ_n`: ones on the anti-diagonal, `i` directly below it.
pub fn delta_matrix(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |r, c| {
        if r + c == n - 1 {
            C64::new(1.0, 0.0)
        } else if r + c == n {
            C64::new(0.0, 1.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn build_block(block: &CanonicalBlock) -> Result<ComplexMatrix> {
    let block = block.validated()?;
    Ok(match block {
        CanonicalBlock::Jordan { size } => jordan_block(size, C64::new(0.0, 0.0)),
        CanonicalBlock::Delta { size, mu } => delta_matrix(size) * mu,
        CanonicalBlock::H { size, lambda } => {
            let mut out = ComplexMatrix::zeros(2 * size, 2 * size);
            for i in 0..size {
                out[(i, size + i)] = C64::new(1.0, 0.0);
            }
            out.view_mut((size, 0), (size, size))
                .copy_from(&jordan_block(size, lambda));
            out
        }
    })
}

/// Block-diagonal direct sum of the spec's blocks, in spec order.
pub fn assemble_canonical(spec: &CanonicalSpec) -> Result<ComplexMatrix> {
    let n = spec.dim();
    let mut out = ComplexMatrix::zeros(n, n);
    for (block, start) in spec.blocks().iter().zip(spec.offsets()) {
        let b = build_block(block)?;
        out.view_mut((start, start), (b.nrows(), b.ncols()))
            .copy_from(&b);
    }
    Ok(out)
}

/// The unique pair of Hermitian matrices with `h + i k = a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HermitianPair {
    #[serde(with = "crate::io::matrix_json")]
    pub h: ComplexMatrix,
    #[serde(with = "crate::io::matrix_json")]
    pub k: ComplexMatrix,
}

pub fn hermitian_split(a: &ComplexMatrix) -> Result<HermitianPair> {
    if !a.is_square() {
        return Err(rejected(format!(
            "hermitian split needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let adj = a.adjoint();
    let h = (a + &adj).scale(0.5);
    // (a - a*) / (2i) = -i (a - a*) / 2
    let k = (a - &adj) * C64::new(0.0, -0.5);
    Ok(HermitianPair { h, k })
}

/// `Δ_n^{-*} Δ_n`, obtained by solving `Δ_n^* X = Δ_n`.
///
/// The product `Δ_n Δ_n^{-*}` is its transpose, since `Δ_n` is symmetric.
pub fn delta_cocycle(n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(rejected("delta cocycle needs n >= 1"));
    }
    let delta = delta_matrix(n);
    delta
        .adjoint()
        .lu()
        .solve(&delta)
        .ok_or_else(|| crate::error::degenerate("Delta_n^* is singular"))
}

pub(crate) mod scalar_json {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Scalar {
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        Scalar { re: z.re, im: z.im }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let Scalar { re, im } = Scalar::deserialize(d)?;
        if !re.is_finite() || !im.is_finite() {
            return Err(serde::de::Error::custom("complex scalar must be finite"));
        }
        Ok(C64::new(re, im))
    }
}
