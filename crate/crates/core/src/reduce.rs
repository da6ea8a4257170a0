//! Reduction of `A_can + E` to the normal form `A_can + D` by *congruence.

use serde::Serialize;

use crate::canonical::{assemble_canonical, CanonicalSpec, ComplexMatrix, C64};
use crate::construct::Projector;
use crate::error::{degenerate, rejected, Result};
use crate::pattern::{assemble_pattern, Entry, Pattern};
use crate::tangent::DEFAULT_RANK_TOL;

pub const DEFAULT_REDUCE_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 25;
/// Condition number of `S` above which the transformation counts as singular.
pub const MAX_TRANSFORM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Serialize)]
pub struct ReductionResult {
    /// Accumulated transformation, starting from the identity.
    #[serde(with = "crate::io::matrix_json")]
    pub s: ComplexMatrix,
    /// `S*(A_can + E)S − A_can` restricted to the pattern positions.
    #[serde(with = "crate::io::matrix_json")]
    pub d: ComplexMatrix,
    pub iterations: usize,
    pub off_pattern_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct ReduceOptions {
    /// Stop once the component outside `D(ℂ)` has Frobenius norm at most this.
    pub tol: f64,
    pub max_iter: usize,
    pub rank_tol: f64,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_REDUCE_TOL,
            max_iter: DEFAULT_MAX_ITER,
            rank_tol: DEFAULT_RANK_TOL,
        }
    }
}

/// Frobenius norm of the part of `r` that does not lie in `D(ℂ)`: entries at
/// zero positions, imaginary parts at circles, real parts at bullets.
pub fn off_pattern_norm(r: &ComplexMatrix, p: &Pattern) -> f64 {
    let mut acc = 0.0;
    for i in 0..r.nrows() {
        for j in 0..r.ncols() {
            let z = r[(i, j)];
            acc += match p.get(i, j) {
                Entry::Zero => z.norm_sqr(),
                Entry::Star => 0.0,
                Entry::Circle => z.im * z.im,
                Entry::Bullet => z.re * z.re,
            };
        }
    }
    acc.sqrt()
}

fn restrict_to_pattern(r: &ComplexMatrix, p: &Pattern) -> ComplexMatrix {
    ComplexMatrix::from_fn(r.nrows(), r.ncols(), |i, j| {
        if p.get(i, j) == Entry::Zero {
            C64::new(0.0, 0.0)
        } else {
            r[(i, j)]
        }
    })
}

fn condition_number(s: &ComplexMatrix) -> f64 {
    let sv = s.clone().singular_values();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        sv.max() / min
    }
}

pub fn reduce_perturbation(
    spec: &CanonicalSpec,
    e: &ComplexMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<ReductionResult> {
    reduce_with(
        spec,
        e,
        &ReduceOptions {
            tol,
            max_iter,
            ..ReduceOptions::default()
        },
    )
}

/// Newton-type iteration with the linearization frozen at `A_can`.
///
/// Each step splits the current deviation `R = S*(A_can+E)S − A_can` as
/// `C*A_can + A_can C + D` and updates `S ← S(I − C)`, which removes the
/// tangent component to first order.
pub fn reduce_with(
    spec: &CanonicalSpec,
    e: &ComplexMatrix,
    opts: &ReduceOptions,
) -> Result<ReductionResult> {
    let a = assemble_canonical(spec)?;
    let n = a.nrows();
    if e.shape() != (n, n) {
        return Err(rejected(format!(
            "perturbation is {}x{}, canonical matrix is {n}x{n}",
            e.nrows(),
            e.ncols()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(rejected("reduction tolerance must be positive"));
    }
    let p = assemble_pattern(spec)?;
    let projector = Projector::new(&a, &p, opts.rank_tol)?;
    let perturbed = &a + e;
    let identity = ComplexMatrix::identity(n, n);
    let mut s = identity.clone();
    let mut iterations = 0;
    loop {
        let r = s.adjoint() * &perturbed * &s - &a;
        let residual = off_pattern_norm(&r, &p);
        let converged = residual <= opts.tol;
        if converged || iterations >= opts.max_iter || !residual.is_finite() {
            return Ok(ReductionResult {
                d: restrict_to_pattern(&r, &p),
                s,
                iterations,
                off_pattern_residual: residual,
                converged,
            });
        }
        let step = projector.split(&r)?;
        s *= &identity - &step.c;
        iterations += 1;
        let cond = condition_number(&s);
        if !(cond <= MAX_TRANSFORM_CONDITION) {
            return Err(degenerate(format!(
                "transformation became singular (condition number {cond:e}) after {iterations} iterations"
            )));
        }
    }
}
