//! Certification campaigns over enumerated and randomly drawn canonical specs.
//!
//! Every check is independent, so the batches run through [`crate::par`].
//! Random trials derive their seeds from the campaign seed and the trial
//! index, which makes parallel and sequential runs produce identical output.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_4, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::canonical::{assemble_canonical, CanonicalBlock, CanonicalSpec, ComplexMatrix, C64};
use crate::construct::greedy_miniversal;
use crate::error::Result;
use crate::io::spec_to_json;
use crate::par::{map_indexed, map_slice, Execution};
use crate::pattern::{assemble_pattern, codim};
use crate::reduce::{reduce_with, ReduceOptions};
use crate::tangent::{codim_via_kernel, codim_via_tangent, verify_direct_sum};

/// Eigenvalue parameters of the H blocks in the enumerated grid.
pub fn grid_lambdas() -> Vec<C64> {
    vec![
        C64::new(2.0, 0.0),
        C64::new(-2.0, 0.0),
        C64::new(3.0, 0.0),
        C64::new(1.5, 1.5),
    ]
}

/// Unit scalars of the Δ blocks in the enumerated grid.
pub fn grid_mus() -> Vec<C64> {
    vec![
        C64::new(1.0, 0.0),
        C64::new(0.0, 1.0),
        C64::new(-1.0, 0.0),
        C64::from_polar(1.0, FRAC_PI_4),
        C64::new(0.6, 0.8),
    ]
}

/// Every spec with at most `max_blocks` blocks of size 1–4 and total
/// dimension at most `max_n`, over the grid scalars, in every block order
/// that survives normalization.
pub fn enumerate_specs(max_n: usize, max_blocks: usize) -> Vec<CanonicalSpec> {
    let mut kinds = Vec::new();
    for size in 1..=4 {
        for &lambda in &grid_lambdas() {
            kinds.push(CanonicalBlock::H { size, lambda });
        }
        for &mu in &grid_mus() {
            kinds.push(CanonicalBlock::Delta { size, mu });
        }
        kinds.push(CanonicalBlock::Jordan { size });
    }
    kinds.retain(|b| b.dim() <= max_n);

    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..kinds.len()).map(|k| vec![k]).collect();
    while let Some(seq) = stack.pop() {
        let blocks: Vec<CanonicalBlock> = seq.iter().map(|&k| kinds[k]).collect();
        let dim: usize = blocks.iter().map(CanonicalBlock::dim).sum();
        if dim > max_n {
            continue;
        }
        let spec = CanonicalSpec::new(blocks).expect("grid blocks are valid");
        if seen.insert(spec_to_json(&spec)) {
            out.push(spec);
        }
        if seq.len() < max_blocks {
            for k in 0..kinds.len() {
                let mut next = seq.clone();
                next.push(k);
                stack.push(next);
            }
        }
    }
    out.sort_by_key(|s| (s.dim(), s.blocks().len(), spec_to_json(s)));
    out
}

/// Result of certifying one canonical spec.
#[derive(Debug, Clone, Serialize)]
pub struct SpecCheck {
    pub spec: String,
    pub n: usize,
    pub pattern_codim: usize,
    pub tangent_codim: usize,
    pub kernel_codim: usize,
    pub greedy_params: usize,
    pub combined_rank: usize,
    pub direct_sum: bool,
    pub passed: bool,
}

pub fn check_spec(spec: &CanonicalSpec, tol: f64) -> Result<SpecCheck> {
    let a = assemble_canonical(spec)?;
    let p = assemble_pattern(spec)?;
    let report = verify_direct_sum(&a, &p, tol)?;
    let pattern_codim = codim(&p);
    let tangent_codim = codim_via_tangent(&a, tol)?;
    let kernel_codim = codim_via_kernel(&a, tol)?;
    let greedy_params = greedy_miniversal(&a, tol)?.params();
    let passed = report.passed
        && pattern_codim == tangent_codim
        && tangent_codim == kernel_codim
        && greedy_params == pattern_codim;
    Ok(SpecCheck {
        spec: spec_to_json(spec),
        n: a.nrows(),
        pattern_codim,
        tangent_codim,
        kernel_codim,
        greedy_params,
        combined_rank: report.combined_rank,
        direct_sum: report.passed,
        passed,
    })
}

pub fn check_specs(specs: &[CanonicalSpec], tol: f64, exec: Execution) -> Result<Vec<SpecCheck>> {
    map_slice(exec, specs, |s| check_spec(s, tol))
        .into_iter()
        .collect()
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `index` in a campaign seeded with `seed`.
pub fn trial_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// A random canonical spec together with a perturbation of the matching size.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCase {
    pub spec: CanonicalSpec,
    pub e: ComplexMatrix,
}

fn random_unit(rng: &mut ChaCha8Rng) -> C64 {
    if rng.random_bool(0.5) {
        C64::from_polar(1.0, rng.random_range(0.0..TAU))
    } else {
        let quarter = rng.random_range(0..4u32) as f64;
        C64::from_polar(1.0, quarter * TAU / 4.0)
    }
}

/// Draws a spec of dimension at most `max_n` (one to three blocks) and a
/// Gaussian perturbation with Frobenius norm `norm`.
///
/// `|λ|` is drawn from `[1.2, 4]`. H and Δ blocks reuse an earlier `λ` or
/// `±μ` with probability 1/3 so that coinciding-eigenvalue patterns are
/// exercised.
pub fn random_case(seed: u64, max_n: usize, norm: f64) -> Result<RandomCase> {
    if max_n == 0 {
        return Err(crate::error::rejected("max_n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target_blocks = rng.random_range(1..=3usize);
    let mut remaining = max_n;
    let mut blocks: Vec<CanonicalBlock> = Vec::new();
    while blocks.len() < target_blocks && remaining > 0 {
        let kind = if remaining >= 2 {
            rng.random_range(0..3u32)
        } else {
            rng.random_range(1..3u32)
        };
        let block = match kind {
            0 => {
                let size = rng.random_range(1..=remaining / 2);
                let previous: Vec<C64> = blocks
                    .iter()
                    .filter_map(|b| match b {
                        CanonicalBlock::H { lambda, .. } => Some(*lambda),
                        _ => None,
                    })
                    .collect();
                let lambda = if !previous.is_empty() && rng.random_bool(1.0 / 3.0) {
                    previous[rng.random_range(0..previous.len())]
                } else {
                    C64::from_polar(rng.random_range(1.2..=4.0), rng.random_range(0.0..TAU))
                };
                CanonicalBlock::h(size, lambda)?
            }
            1 => {
                let size = rng.random_range(1..=remaining);
                let previous: Vec<C64> = blocks
                    .iter()
                    .filter_map(|b| match b {
                        CanonicalBlock::Delta { mu, .. } => Some(*mu),
                        _ => None,
                    })
                    .collect();
                let mu = if !previous.is_empty() && rng.random_bool(1.0 / 3.0) {
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    previous[rng.random_range(0..previous.len())] * sign
                } else {
                    random_unit(&mut rng)
                };
                CanonicalBlock::delta(size, mu)?
            }
            _ => CanonicalBlock::jordan(rng.random_range(1..=remaining))?,
        };
        remaining -= block.dim();
        blocks.push(block);
    }
    let spec = CanonicalSpec::new(blocks)?;
    let n = spec.dim();
    let mut e = ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let current = e.norm();
    if current > 0.0 {
        e *= C64::new(norm / current, 0.0);
    }
    Ok(RandomCase { spec, e })
}

/// Outcome of one random reduction trial.
#[derive(Debug, Clone, Serialize)]
pub struct TrialCheck {
    pub trial: u64,
    pub seed: u64,
    pub spec: String,
    pub n: usize,
    pub iterations: usize,
    pub off_pattern_residual: f64,
    pub converged: bool,
    pub passed: bool,
}

/// Random reduction trials with `‖E‖_F = relative_norm · ‖A_can‖_F`
/// (or `relative_norm` itself when `A_can = 0`).
pub fn reduction_trials(
    seed: u64,
    trials: u64,
    max_n: usize,
    relative_norm: f64,
    opts: &ReduceOptions,
    exec: Execution,
) -> Result<Vec<TrialCheck>> {
    reduction_trials_range(seed, 0..trials, max_n, relative_norm, opts, exec)
}

/// Trials with indices in `range`; trial `k` is the same whatever range contains it.
pub fn reduction_trials_range(
    seed: u64,
    range: std::ops::Range<u64>,
    max_n: usize,
    relative_norm: f64,
    opts: &ReduceOptions,
    exec: Execution,
) -> Result<Vec<TrialCheck>> {
    let start = range.start;
    let len = range.end.saturating_sub(start) as usize;
    map_indexed(exec, len, |k| {
        let trial = start + k as u64;
        let tseed = trial_seed(seed, trial);
        let case = random_case(tseed, max_n, 1.0)?;
        let a_norm = assemble_canonical(&case.spec)?.norm();
        let scale = if a_norm > 0.0 { relative_norm * a_norm } else { relative_norm };
        let e = &case.e * C64::new(scale, 0.0);
        let r = reduce_with(&case.spec, &e, opts)?;
        Ok(TrialCheck {
            trial,
            seed: tseed,
            spec: spec_to_json(&case.spec),
            n: case.spec.dim(),
            iterations: r.iterations,
            off_pattern_residual: r.off_pattern_residual,
            converged: r.converged,
            passed: r.converged && r.off_pattern_residual <= opts.tol,
        })
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_case_is_deterministic() {
        let a = random_case(0, 6, 1e-3).unwrap();
        let b = random_case(0, 6, 1e-3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.e.as_slice(), b.e.as_slice());
    }

    #[test]
    fn random_cases_are_valid() {
        for seed in 0..200 {
            let case = random_case(seed, 6, 0.5).unwrap();
            assert!(case.spec.dim() <= 6);
            assert_eq!(case.e.shape(), (case.spec.dim(), case.spec.dim()));
            assert!((case.e.norm() - 0.5).abs() < 1e-12);
            for b in case.spec.blocks() {
                assert_eq!(b.validated().unwrap(), *b);
                if let CanonicalBlock::H { lambda, .. } = b {
                    assert!(lambda.norm() >= 1.2 - 1e-12 && lambda.norm() <= 4.0 + 1e-12);
                }
            }
        }
        assert!(random_case(1, 0, 1.0).is_err());
    }

    #[test]
    fn trial_seeds_differ() {
        let seeds: BTreeSet<u64> = (0..1000).map(|k| trial_seed(42, k)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn small_grid_enumeration() {
        let specs = enumerate_specs(2, 3);
        // dim 1: 5 Δ_1 + J_1; dim 2: 4 H_1 + 5 Δ_2 + J_2, plus pairs of dim-1 blocks
        let singles = 6 + 10;
        let pairs_same_kind = 5 * 5 + 1; // ordered Δ_1 pairs, J_1 ⊕ J_1
        let mixed = 5; // Δ_1 ⊕ J_1
        assert_eq!(specs.len(), singles + pairs_same_kind + mixed);
        assert!(specs.iter().all(|s| s.dim() <= 2));
    }

    #[test]
    fn small_grid_passes() {
        let specs = enumerate_specs(3, 3);
        for check in check_specs(&specs, 1e-8, Execution::default()).unwrap() {
            assert!(check.passed, "{check:?}");
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let opts = ReduceOptions::default();
        let seq = reduction_trials(7, 12, 4, 1e-3, &opts, Execution::Sequential).unwrap();
        let par = reduction_trials(7, 12, 4, 1e-3, &opts, Execution::Parallel).unwrap();
        assert_eq!(
            serde_json::to_string(&seq).unwrap(),
            serde_json::to_string(&par).unwrap()
        );
    }
}
