//! Generic constructions of miniversal deformations.
//!
//! [`greedy_miniversal`] extends a basis of `T(A)` by elementary matrices and
//! works for any square matrix. [`Projector`] splits a matrix along
//! `T(A) ⊕ D(ℂ)`, which is the linear step of the reduction to normal form.

use nalgebra::{DMatrix, DVector, LU};
use serde::Serialize;

use crate::canonical::{ComplexMatrix, C64};
use crate::error::{degenerate, rejected, Result};
use crate::pattern::{Entry, Pattern};
use crate::tangent::{
    complexify, imag_index, numerical_rank, pattern_generators, phi_map, real_index, realify,
    verify_direct_sum,
};

#[derive(Debug, Clone, Serialize)]
pub struct GreedyResult {
    #[serde(flatten)]
    pub pattern: Pattern,
    #[serde(skip)]
    pub kept_real: Vec<(usize, usize)>,
    #[serde(skip)]
    pub kept_imag: Vec<(usize, usize)>,
    pub tangent_rank: usize,
}

impl GreedyResult {
    pub fn params(&self) -> usize {
        self.kept_real.len() + self.kept_imag.len()
    }
}

/// Orthonormal basis that grows one vector at a time.
struct GrowingBasis {
    columns: Vec<DVector<f64>>,
}

impl GrowingBasis {
    fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self {
            columns: m.column_iter().map(|c| c.into_owned()).collect(),
        }
    }

    fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        let mut r = v.clone();
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &self.columns {
                let coeff = q.dot(&r);
                r.axpy(-coeff, q, 1.0);
            }
        }
        r
    }

    /// Appends `v` if it is independent of the span; returns whether it was kept.
    fn try_push(&mut self, v: &DVector<f64>, tol: f64) -> bool {
        let scale = v.norm().max(1.0);
        let r = self.residual(v);
        let norm = r.norm();
        if norm > tol * scale {
            self.columns.push(r / norm);
            true
        } else {
            false
        }
    }
}

/// Scans `E_11, E_12, …, E_nn, iE_11, …, iE_nn` (row-major) and keeps every
/// element independent of `T(A)` and the elements kept before it.
pub fn greedy_miniversal(a: &ComplexMatrix, tol: f64) -> Result<GreedyResult> {
    let tangent = numerical_rank(&phi_map(a)?, tol)?;
    let n = a.nrows();
    let dim = 2 * n * n;
    let mut basis = GrowingBasis::from_matrix(&tangent.image_basis);
    let mut kept_real = Vec::new();
    let mut kept_imag = Vec::new();
    let positions: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    for imaginary in [false, true] {
        for &(i, j) in &positions {
            if basis.columns.len() == dim {
                break;
            }
            let idx = if imaginary {
                imag_index(n, n, i, j)
            } else {
                real_index(n, i, j)
            };
            let unit = DVector::from_fn(dim, |k, _| if k == idx { 1.0 } else { 0.0 });
            if basis.try_push(&unit, tol) {
                if imaginary {
                    kept_imag.push((i, j));
                } else {
                    kept_real.push((i, j));
                }
            }
        }
    }
    let mut pattern = Pattern::zeros(n, n);
    for &(i, j) in &kept_real {
        pattern.set(i, j, Entry::Circle);
    }
    for &(i, j) in &kept_imag {
        let e = if pattern.get(i, j) == Entry::Circle {
            Entry::Star
        } else {
            Entry::Bullet
        };
        pattern.set(i, j, e);
    }
    Ok(GreedyResult {
        pattern,
        kept_real,
        kept_imag,
        tangent_rank: tangent.rank,
    })
}

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    /// Generator `C` with `C*A + AC` the tangent component (minimal norm).
    pub c: ComplexMatrix,
    /// Pattern-space component.
    pub d: ComplexMatrix,
    /// `‖C*A + AC + D − target‖_F`.
    pub residual: f64,
}

/// Factored square system `[image(Φ_A) | generators(D)]` for repeated splits.
pub struct Projector {
    a: ComplexMatrix,
    n: usize,
    rank: usize,
    /// Maps image coordinates back to a minimal-norm generator: `V_r Σ_r^{-1}`.
    pullback: DMatrix<f64>,
    generators: DMatrix<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Projector {
    pub fn new(a: &ComplexMatrix, p: &Pattern, tol: f64) -> Result<Self> {
        let report = verify_direct_sum(a, p, tol)?;
        if !report.passed {
            return Err(rejected(format!(
                "pattern is not a complement of the tangent space: tangent rank {} + {} parameters, combined rank {} of {}",
                report.tangent_rank,
                report.pattern_params,
                report.combined_rank,
                2 * report.n * report.n
            )));
        }
        let n = a.nrows();
        let dim = 2 * n * n;
        let phi = phi_map(a)?.matrix;
        let svd = phi.clone().svd(false, true);
        let rank = report.tangent_rank;
        let v_t = svd.v_t.expect("requested V^T");
        let mut pullback = v_t.view((0, 0), (rank, dim)).transpose();
        for (k, mut col) in pullback.column_iter_mut().enumerate() {
            col /= svd.singular_values[k];
        }
        // Φ V_r Σ_r^{-1} rather than U_r: the SVD's U is less accurate for
        // clustered singular values, and this keeps the image block exactly
        // consistent with the pullback.
        let image = &phi * &pullback;
        let generators = pattern_generators(p);
        let mut system = DMatrix::zeros(dim, dim);
        system.view_mut((0, 0), (dim, rank)).copy_from(&image);
        system.view_mut((0, rank), (dim, dim - rank)).copy_from(&generators);
        let sv = system.clone().singular_values();
        let smallest = sv.min();
        if smallest <= tol * sv.max() {
            return Err(degenerate(format!(
                "tangent space and pattern space are nearly dependent (smallest singular value {smallest:e})"
            )));
        }
        Ok(Self {
            a: a.clone(),
            n,
            rank,
            pullback,
            generators,
            lu: system.lu(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Unique `(C, D)` with `C*A + AC + D = target`, `D ∈ D(ℂ)`.
    pub fn split(&self, target: &ComplexMatrix) -> Result<ProjectionResult> {
        if target.shape() != (self.n, self.n) {
            return Err(rejected(format!(
                "target is {}x{}, expected {n}x{n}",
                target.nrows(),
                target.ncols(),
                n = self.n
            )));
        }
        let z = self
            .lu
            .solve(&realify(target))
            .ok_or_else(|| degenerate("projection system is singular"))?;
        let y = z.rows(0, self.rank);
        let coeffs = z.rows(self.rank, z.len() - self.rank);
        let c = complexify((&self.pullback * y).as_slice(), self.n, self.n);
        let d = complexify((&self.generators * coeffs).as_slice(), self.n, self.n);
        let residual = (c.adjoint() * &self.a + &self.a * &c + &d - target).norm();
        Ok(ProjectionResult { c, d, residual })
    }
}

/// Splits `m_target` along `ℂ^{n×n} = T(A) ⊕_ℝ D(ℂ)`.
pub fn project_decompose(
    a: &ComplexMatrix,
    p: &Pattern,
    m_target: &ComplexMatrix,
    tol: f64,
) -> Result<ProjectionResult> {
    Projector::new(a, p, tol)?.split(m_target)
}

/// Solves `λ x_j + conj(x_{r−j+1}) = c_j`, `j = 1..r`.
///
/// Pairing equation `j` with equation `r−j+1` gives the closed form
/// `x_j = (λ̄ c_j − conj(c_{r−j+1})) / (|λ|² − 1)` for every index.
pub fn solve_star_system(lambda: C64, c: &[C64]) -> Result<Vec<C64>> {
    let denom = lambda.norm_sqr() - 1.0;
    if (lambda.norm() - 1.0).abs() <= 1e-12 {
        return Err(rejected(format!(
            "star system needs |lambda| != 1, got |lambda| = {}",
            lambda.norm()
        )));
    }
    if denom.abs() < 1e-10 {
        return Err(degenerate(format!(
            "|lambda|^2 - 1 = {denom:e} is too close to zero"
        )));
    }
    let r = c.len();
    Ok((0..r)
        .map(|j| (lambda.conj() * c[j] - c[r - 1 - j].conj()) / denom)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{assemble_canonical, CanonicalBlock, CanonicalSpec};
    use crate::pattern::{assemble_pattern, codim};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn scalar(z: C64) -> ComplexMatrix {
        ComplexMatrix::from_element(1, 1, z)
    }

    #[test]
    fn greedy_zero_scalar() {
        let g = greedy_miniversal(&scalar(c(0., 0.)), 1e-9).unwrap();
        assert_eq!(g.pattern.to_ascii(), "*");
        assert_eq!(g.tangent_rank, 0);
    }

    #[test]
    fn greedy_one_scalar() {
        let g = greedy_miniversal(&scalar(c(1., 0.)), 1e-9).unwrap();
        assert_eq!(g.pattern.to_ascii(), "!");
        assert_eq!(g.tangent_rank, 1);
    }

    #[test]
    fn greedy_jordan_two() {
        let a = crate::canonical::jordan_block(2, c(0., 0.));
        let g = greedy_miniversal(&a, 1e-9).unwrap();
        assert_eq!(g.tangent_rank, 6);
        assert_eq!(g.params(), 2);
        assert_eq!(codim(&g.pattern), 2);
        assert!(verify_direct_sum(&a, &g.pattern, 1e-9).unwrap().passed);
    }

    #[test]
    fn greedy_json_has_pattern_fields() {
        let g = greedy_miniversal(&scalar(c(1., 0.)), 1e-9).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"rows":1,"cols":1,"entries":[["bullet"]],"tangent_rank":1}"#);
    }

    #[test]
    fn projection_scalar_split() {
        let r = project_decompose(
            &scalar(c(1., 0.)),
            &Pattern::filled(1, 1, Entry::Bullet),
            &scalar(c(3., 4.)),
            1e-9,
        )
        .unwrap();
        assert!((r.d[(0, 0)] - c(0., 4.)).norm() < 1e-14);
        assert!((r.c[(0, 0)] - c(1.5, 0.)).norm() < 1e-14);
        assert!(r.residual < 1e-14);
    }

    #[test]
    fn projection_of_zero_is_zero() {
        let a = crate::canonical::jordan_block(2, c(0., 0.));
        let spec = CanonicalSpec::new(vec![CanonicalBlock::jordan(2).unwrap()]).unwrap();
        let p = assemble_pattern(&spec).unwrap();
        let r = project_decompose(&a, &p, &ComplexMatrix::zeros(2, 2), 1e-9).unwrap();
        assert_eq!(r.c.norm(), 0.0);
        assert_eq!(r.d.norm(), 0.0);
    }

    #[test]
    fn projection_jordan_two_random_target() {
        let spec = CanonicalSpec::new(vec![CanonicalBlock::jordan(2).unwrap()]).unwrap();
        let a = assemble_canonical(&spec).unwrap();
        let p = assemble_pattern(&spec).unwrap();
        let target = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.3, -1.2), c(2.0, 0.7), c(-0.4, 0.9), c(1.1, 0.05)],
        );
        let r = project_decompose(&a, &p, &target, 1e-9).unwrap();
        assert!(r.residual <= 1e-12 * target.norm());
        for (k, z) in r.d.iter().enumerate() {
            if k != 1 {
                assert_eq!(*z, c(0., 0.), "D must be supported at (2,1)");
            }
        }
    }

    #[test]
    fn projection_requires_direct_sum() {
        let a = crate::canonical::jordan_block(2, c(0., 0.));
        let err = project_decompose(&a, &Pattern::zeros(2, 2), &a, 1e-9).unwrap_err();
        assert!(matches!(err, crate::Error::Rejected(_)));
    }

    #[test]
    fn star_system_scalars() {
        assert!((solve_star_system(c(2., 0.), &[c(3., 0.)]).unwrap()[0] - c(1., 0.)).norm() < 1e-15);
        assert!((solve_star_system(c(2., 0.), &[c(0., 1.)]).unwrap()[0] - c(0., 1.)).norm() < 1e-15);
    }

    #[test]
    fn star_system_lambda_zero() {
        let rhs = [c(1., 2.), c(-3., 0.5), c(0., 4.)];
        let x = solve_star_system(c(0., 0.), &rhs).unwrap();
        for j in 0..3 {
            assert_eq!(x[2 - j].conj(), rhs[j]);
        }
    }

    #[test]
    fn star_system_rejects_unit_circle() {
        assert!(matches!(
            solve_star_system(c(0., 1.), &[c(1., 0.)]),
            Err(crate::Error::Rejected(_))
        ));
        assert!(matches!(
            solve_star_system(c(1.0 + 2e-11, 0.), &[c(1., 0.)]),
            Err(crate::Error::Degenerate(_))
        ));
    }

    #[test]
    fn star_system_seven_equations() {
        let lambda = c(1.5, -0.5);
        let rhs: Vec<C64> = (0..7).map(|k| c((k as f64).sin(), (k as f64 * 0.7).cos())).collect();
        let x = solve_star_system(lambda, &rhs).unwrap();
        for j in 0..7 {
            let lhs = lambda * x[j] + x[6 - j].conj();
            assert!((lhs - rhs[j]).norm() <= 1e-13);
        }
    }
}
