//! The *congruence tangent map as a real-linear operator.
//!
//! `T(A) = {C*A + AC}` is only a real subspace of `ℂ^{n×n}`, so every map
//! here is realified: a complex `r × c` matrix becomes the real vector
//! `[Re vec(C); Im vec(C)]` of length `2rc`, with `vec` stacking columns.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::canonical::{ComplexMatrix, C64};
use crate::error::{rejected, Result};
use crate::par::{map_indexed, Execution};
use crate::pattern::{codim, Pattern};

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

pub fn realify(m: &ComplexMatrix) -> DVector<f64> {
    let len = m.len();
    let mut v = DVector::zeros(2 * len);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[len + k] = z.im;
    }
    v
}

pub fn complexify(v: &[f64], rows: usize, cols: usize) -> ComplexMatrix {
    let len = rows * cols;
    assert_eq!(v.len(), 2 * len, "realified length mismatch");
    ComplexMatrix::from_iterator(rows, cols, (0..len).map(|k| C64::new(v[k], v[len + k])))
}

/// Column index of `E_ij` (real unit) in the realification of an `r × c` matrix.
pub(crate) fn real_index(rows: usize, i: usize, j: usize) -> usize {
    i + j * rows
}

/// Column index of `iE_ij`.
pub(crate) fn imag_index(rows: usize, cols: usize, i: usize, j: usize) -> usize {
    rows * cols + real_index(rows, i, j)
}

/// A real matrix acting on realified complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLinearOperator {
    pub matrix: DMatrix<f64>,
}

impl RealLinearOperator {
    pub fn dim_in(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn dim_out(&self) -> usize {
        self.matrix.nrows()
    }

    /// Tabulates a real-linear map on a direct sum of complex matrix spaces.
    ///
    /// Column `k` is the image of the `k`-th real basis vector of the input
    /// space, taken in the layout produced by concatenating the realified
    /// summands.
    fn tabulate<F>(inputs: &[(usize, usize)], outputs: &[(usize, usize)], f: F) -> Self
    where
        F: Fn(&[ComplexMatrix]) -> Vec<ComplexMatrix> + Sync + Send,
    {
        let dim_in: usize = inputs.iter().map(|(r, c)| 2 * r * c).sum();
        let dim_out: usize = outputs.iter().map(|(r, c)| 2 * r * c).sum();
        let columns = map_indexed(Execution::default(), dim_in, |k| {
            let mut args: Vec<ComplexMatrix> = inputs
                .iter()
                .map(|&(r, c)| ComplexMatrix::zeros(r, c))
                .collect();
            let mut offset = k;
            for (arg, &(r, c)) in args.iter_mut().zip(inputs) {
                let len = r * c;
                if offset < 2 * len {
                    let unit = if offset < len {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(0.0, 1.0)
                    };
                    let pos = offset % len;
                    arg[(pos % r, pos / r)] = unit;
                    break;
                }
                offset -= 2 * len;
            }
            let out = f(&args);
            let mut col = Vec::with_capacity(dim_out);
            for m in &out {
                col.extend(realify(m).iter());
            }
            col
        });
        let mut matrix = DMatrix::zeros(dim_out, dim_in);
        for (k, col) in columns.into_iter().enumerate() {
            matrix.column_mut(k).copy_from_slice(&col);
        }
        Self { matrix }
    }
}

fn require_square(a: &ComplexMatrix, what: &str) -> Result<usize> {
    if !a.is_square() {
        return Err(rejected(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

/// `Φ_A : C ↦ C*A + AC`.
pub fn phi_map(a: &ComplexMatrix) -> Result<RealLinearOperator> {
    let n = require_square(a, "matrix")?;
    Ok(RealLinearOperator::tabulate(&[(n, n)], &[(n, n)], |args| {
        let c = &args[0];
        vec![c.adjoint() * a + a * c]
    }))
}

/// `(S, R) ↦ (S*M + NR, R*N + MS)` for `S ∈ ℂ^{m×n}`, `R ∈ ℂ^{n×m}`.
///
/// The input is `[realify(S); realify(R)]`, the output
/// `[realify(S*M + NR); realify(R*N + MS)]`.
pub fn pair_phi_map(m_mat: &ComplexMatrix, n_mat: &ComplexMatrix) -> Result<RealLinearOperator> {
    let m = require_square(m_mat, "first block")?;
    let n = require_square(n_mat, "second block")?;
    Ok(RealLinearOperator::tabulate(
        &[(m, n), (n, m)],
        &[(n, m), (m, n)],
        |args| {
            let (s, r) = (&args[0], &args[1]);
            vec![
                s.adjoint() * m_mat + n_mat * r,
                r.adjoint() * n_mat + m_mat * s,
            ]
        },
    ))
}

/// `X ↦ XA + AX*`, whose kernel is the real Lie algebra of the *congruence stabilizer.
pub fn stabilizer_map(a: &ComplexMatrix) -> Result<RealLinearOperator> {
    let n = require_square(a, "matrix")?;
    Ok(RealLinearOperator::tabulate(&[(n, n)], &[(n, n)], |args| {
        let x = &args[0];
        vec![x * a + a * x.adjoint()]
    }))
}

/// Singular-value rank decision with orthonormal image and kernel bases.
#[derive(Debug, Clone)]
pub struct RankDecomposition {
    pub rank: usize,
    /// Columns span the numerical image.
    pub image_basis: DMatrix<f64>,
    /// Columns span the numerical kernel.
    pub kernel_basis: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    /// Absolute cutoff actually applied.
    pub threshold: f64,
}

impl RankDecomposition {
    pub fn sigma_min_kept(&self) -> Option<f64> {
        self.rank.checked_sub(1).map(|k| self.singular_values[k])
    }

    pub fn sigma_max_dropped(&self) -> Option<f64> {
        self.singular_values.get(self.rank).copied()
    }
}

/// Rank by thresholding singular values at `tol · σ_max`.
pub fn numerical_rank(op: &RealLinearOperator, tol: f64) -> Result<RankDecomposition> {
    if !(tol > 0.0) {
        return Err(rejected("rank tolerance must be positive"));
    }
    rank_of(&op.matrix, tol)
}

pub(crate) fn rank_of(matrix: &DMatrix<f64>, tol: f64) -> Result<RankDecomposition> {
    let (rows, cols) = matrix.shape();
    // Thin SVD only yields a full right basis when rows >= cols.
    let padded = if rows < cols {
        let mut m = DMatrix::zeros(cols, cols);
        m.view_mut((0, 0), (rows, cols)).copy_from(matrix);
        m
    } else {
        matrix.clone()
    };
    let svd = padded.svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max;
    let rank = if sigma_max > 0.0 {
        sv.iter().take_while(|&&s| s > threshold).count().min(rows.min(cols))
    } else {
        0
    };
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let image_basis = u.view((0, 0), (rows, rank)).into_owned();
    let kernel_basis = v_t
        .view((rank, 0), (cols - rank, cols))
        .transpose();
    Ok(RankDecomposition {
        rank,
        image_basis,
        kernel_basis,
        singular_values: sv,
        threshold,
    })
}

/// Rank of a complex matrix by thresholding at `tol · σ_max`.
pub fn rank_of_matrix(m: &ComplexMatrix, tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let sigma_max = sv.max();
    if sigma_max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * sigma_max).count()
}

/// Real generators of `D(ℂ)`, one column per free real parameter.
///
/// Positions are scanned row-major; a star yields `E_ij` then `iE_ij`.
pub fn pattern_generators(p: &Pattern) -> DMatrix<f64> {
    let (r, c) = (p.rows(), p.cols());
    let support: Vec<_> = p.support().collect();
    let total = codim(p);
    let mut g = DMatrix::zeros(2 * r * c, total);
    let mut k = 0;
    for ((i, j), e) in support {
        if e.has_real() {
            g[(real_index(r, i, j), k)] = 1.0;
            k += 1;
        }
        if e.has_imag() {
            g[(imag_index(r, c, i, j), k)] = 1.0;
            k += 1;
        }
    }
    g
}

/// Outcome of the direct-sum test `ℂ^{n×n} = T(A) ⊕_ℝ D(ℂ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub tangent_rank: usize,
    pub pattern_params: usize,
    pub combined_rank: usize,
    pub passed: bool,
    pub tolerance: f64,
    pub sigma_min_kept: Option<f64>,
    pub sigma_max_dropped: Option<f64>,
}

pub fn verify_direct_sum(a: &ComplexMatrix, p: &Pattern, tol: f64) -> Result<DecompositionReport> {
    let n = require_square(a, "matrix")?;
    if (p.rows(), p.cols()) != (n, n) {
        return Err(rejected(format!(
            "pattern is {}x{}, matrix is {n}x{n}",
            p.rows(),
            p.cols()
        )));
    }
    let tangent = numerical_rank(&phi_map(a)?, tol)?;
    let generators = pattern_generators(p);
    let params = generators.ncols();
    let mut combined = DMatrix::zeros(2 * n * n, tangent.rank + params);
    combined
        .view_mut((0, 0), (2 * n * n, tangent.rank))
        .copy_from(&tangent.image_basis);
    combined
        .view_mut((0, tangent.rank), (2 * n * n, params))
        .copy_from(&generators);
    let combined_rank = rank_of(&combined, tol)?.rank;
    let full = 2 * n * n;
    Ok(DecompositionReport {
        n,
        tangent_rank: tangent.rank,
        pattern_params: params,
        combined_rank,
        passed: tangent.rank + params == full && combined_rank == full,
        tolerance: tol,
        sigma_min_kept: tangent.sigma_min_kept(),
        sigma_max_dropped: tangent.sigma_max_dropped(),
    })
}

/// Real dimension of `{X : XA + AX* = 0}`, the codimension of the orbit.
pub fn codim_via_kernel(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let op = stabilizer_map(a)?;
    Ok(numerical_rank(&op, tol)?.kernel_basis.ncols())
}

/// `2n² − rank Φ_A`.
pub fn codim_via_tangent(a: &ComplexMatrix, tol: f64) -> Result<usize> {
    let n = require_square(a, "matrix")?;
    Ok(2 * n * n - numerical_rank(&phi_map(a)?, tol)?.rank)
}
