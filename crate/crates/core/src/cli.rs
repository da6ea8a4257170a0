//! Command-line front end.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::canonical::{assemble_canonical, hermitian_split, CanonicalSpec, ComplexMatrix, C64};
use crate::construct::greedy_miniversal;
use crate::error::{Error, Result};
use crate::io::{parse_matrix, parse_spec};
use crate::par::Execution;
use crate::pattern::{assemble_pattern, codim};
use crate::reduce::{reduce_with, ReduceOptions, DEFAULT_MAX_ITER, DEFAULT_REDUCE_TOL};
use crate::suite::{check_specs, enumerate_specs, reduction_trials_range};
use crate::tangent::{codim_via_kernel, codim_via_tangent, verify_direct_sum, DEFAULT_RANK_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Ascii,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Print the miniversal deformation pattern of a canonical spec.
    Pattern,
    /// Compare the pattern codimension with the stabilizer kernel dimension.
    Codim,
    /// Certify the direct sum of tangent space and pattern space.
    Verify,
    /// Greedy miniversal pattern of a spec's canonical matrix or an arbitrary matrix.
    Greedy,
    /// Reduce A_can + E to normal form.
    Reduce,
    /// Split a matrix into Hermitian parts H + iK.
    Split,
    /// Certify every grid spec up to --max-n and run random reduction trials.
    Suite,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "starcong", version, about = "Miniversal deformations of matrices under *congruence")]
pub struct CommandConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Block-spec JSON file.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Matrix JSON file.
    #[arg(long, global = true)]
    pub matrix: Option<PathBuf>,
    /// Rank tolerance (relative to the largest singular value).
    #[arg(long, global = true, default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 20)]
    pub trials: u64,
    #[arg(long = "max-n", global = true, default_value_t = 4)]
    pub max_n: usize,
    /// Frobenius norm of a generated perturbation (reduce), or its size
    /// relative to the canonical matrix (suite).
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub norm: f64,
    #[arg(long = "max-iter", global = true, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Ascii)]
    pub format: Format,
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) => EXIT_PARSE,
        Error::Rejected(_) => EXIT_PRECONDITION,
        Error::Degenerate(_) => EXIT_DEGENERATE,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(cfg: &CommandConfig) -> Result<CanonicalSpec> {
    let path = cfg
        .spec
        .as_deref()
        .ok_or_else(|| Error::Parse("--spec is required".into()))?;
    parse_spec(&read(path)?).map_err(|e| annotate(e, path))
}

fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    parse_matrix(&read(path)?).map_err(|e| annotate(e, path))
}

fn annotate(err: Error, path: &Path) -> Error {
    match err {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report serialization is infallible")
}

fn matrix_ascii(m: &ComplexMatrix) -> String {
    m.row_iter()
        .map(|row| {
            row.iter()
                .map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Gaussian perturbation of Frobenius norm `norm`, determined by `seed`.
pub fn seeded_perturbation(seed: u64, n: usize, norm: f64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
    });
    let current = e.norm();
    if current > 0.0 {
        e.scale(norm / current)
    } else {
        e
    }
}

/// Runs one command, writing the report to `out`; returns the exit status.
pub fn run(cfg: &CommandConfig, out: &mut dyn Write) -> i32 {
    if !(cfg.tol > 0.0) {
        let _ = writeln!(out, "error: --tol must be positive");
        return EXIT_PRECONDITION;
    }
    match dispatch(cfg, out) {
        Ok(code) => code,
        Err(err) => {
            let _ = writeln!(out, "error: {err}");
            exit_code(&err)
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|e| Error::Parse(format!("write failed: {e}")))
}

fn dispatch(cfg: &CommandConfig, out: &mut dyn Write) -> Result<i32> {
    let json = cfg.format == Format::Json;
    match cfg.command {
        Command::Pattern => {
            let p = assemble_pattern(&load_spec(cfg)?)?;
            emit(out, &if json { to_json(&p) } else { p.to_ascii() })?;
            Ok(EXIT_OK)
        }
        Command::Codim => {
            let spec = load_spec(cfg)?;
            let a = assemble_canonical(&spec)?;
            let pattern_codim = codim(&assemble_pattern(&spec)?);
            let tangent_codim = codim_via_tangent(&a, cfg.tol)?;
            let kernel_codim = codim_via_kernel(&a, cfg.tol)?;
            let agree = pattern_codim == kernel_codim && kernel_codim == tangent_codim;
            let text = if json {
                to_json(&serde_json::json!({
                    "pattern_codim": pattern_codim,
                    "tangent_codim": tangent_codim,
                    "kernel_codim": kernel_codim,
                    "agree": agree,
                }))
            } else {
                format!(
                    "pattern codim: {pattern_codim}\ntangent codim: {tangent_codim}\nkernel codim: {kernel_codim}\nagree: {agree}"
                )
            };
            emit(out, &text)?;
            Ok(if agree { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Verify => {
            let spec = load_spec(cfg)?;
            let report = verify_direct_sum(&assemble_canonical(&spec)?, &assemble_pattern(&spec)?, cfg.tol)?;
            let text = if json {
                to_json(&report)
            } else {
                let mut s = String::new();
                let _ = writeln!(s, "n: {}", report.n);
                let _ = writeln!(s, "tangent rank: {}", report.tangent_rank);
                let _ = writeln!(s, "pattern params: {}", report.pattern_params);
                let _ = writeln!(s, "combined rank: {} of {}", report.combined_rank, 2 * report.n * report.n);
                let _ = writeln!(s, "sigma min kept: {:?}", report.sigma_min_kept);
                let _ = writeln!(s, "sigma max dropped: {:?}", report.sigma_max_dropped);
                let _ = write!(s, "passed: {}", report.passed);
                s
            };
            emit(out, &text)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Greedy => {
            let a = match (&cfg.matrix, &cfg.spec) {
                (Some(path), _) => load_matrix(path)?,
                (None, Some(_)) => assemble_canonical(&load_spec(cfg)?)?,
                (None, None) => return Err(Error::Parse("greedy needs --matrix or --spec".into())),
            };
            if !a.is_square() {
                return Err(Error::Rejected("greedy needs a square matrix".into()));
            }
            let g = greedy_miniversal(&a, cfg.tol)?;
            let text = if json {
                to_json(&g)
            } else {
                format!("{}\ntangent rank: {}\nparameters: {}", g.pattern, g.tangent_rank, g.params())
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Reduce => {
            let spec = load_spec(cfg)?;
            let n = spec.dim();
            let e = match &cfg.matrix {
                Some(path) => load_matrix(path)?,
                None => seeded_perturbation(cfg.seed, n, cfg.norm),
            };
            let opts = ReduceOptions {
                tol: DEFAULT_REDUCE_TOL,
                max_iter: cfg.max_iter,
                rank_tol: cfg.tol,
            };
            let r = reduce_with(&spec, &e, &opts)?;
            let text = if json {
                to_json(&r)
            } else {
                format!(
                    "converged: {}\niterations: {}\noff-pattern residual: {:e}\nS:\n{}\nD:\n{}",
                    r.converged,
                    r.iterations,
                    r.off_pattern_residual,
                    matrix_ascii(&r.s),
                    matrix_ascii(&r.d)
                )
            };
            emit(out, &text)?;
            Ok(if r.converged { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::Split => {
            let path = cfg
                .matrix
                .as_deref()
                .ok_or_else(|| Error::Parse("--matrix is required".into()))?;
            let pair = hermitian_split(&load_matrix(path)?)?;
            let text = if json {
                to_json(&pair)
            } else {
                format!("H:\n{}\nK:\n{}", matrix_ascii(&pair.h), matrix_ascii(&pair.k))
            };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Suite => run_suite(cfg, out),
    }
}

const SUITE_CHUNK: usize = 64;

fn run_suite(cfg: &CommandConfig, out: &mut dyn Write) -> Result<i32> {
    if cfg.max_n == 0 {
        return Err(Error::Rejected("--max-n must be at least 1".into()));
    }
    let json = cfg.format == Format::Json;
    let exec = Execution::default();
    let specs = enumerate_specs(cfg.max_n, 3);
    let mut failures = 0usize;
    if !json {
        emit(out, "kind  status  n  codim(pattern/tangent/kernel/greedy)  spec")?;
    }
    for chunk in specs.chunks(SUITE_CHUNK) {
        for check in check_specs(chunk, cfg.tol, exec)? {
            failures += usize::from(!check.passed);
            let line = if json {
                to_json(&serde_json::json!({ "kind": "spec", "check": check }))
            } else {
                format!(
                    "spec  {}  {}  {}/{}/{}/{}  {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.n,
                    check.pattern_codim,
                    check.tangent_codim,
                    check.kernel_codim,
                    check.greedy_params,
                    check.spec
                )
            };
            emit(out, &line)?;
        }
    }
    let opts = ReduceOptions {
        tol: DEFAULT_REDUCE_TOL,
        max_iter: cfg.max_iter,
        rank_tol: cfg.tol,
    };
    let mut done = 0u64;
    while done < cfg.trials {
        let batch = (cfg.trials - done).min(SUITE_CHUNK as u64);
        // trial indices are global, so batching does not change seeds
        let trials = reduction_trials_range(cfg.seed, done..done + batch, cfg.max_n, cfg.norm, &opts, exec)?;
        for t in trials {
            failures += usize::from(!t.passed);
            let line = if json {
                to_json(&serde_json::json!({ "kind": "reduce", "trial": t }))
            } else {
                format!(
                    "reduce  {}  {}  iterations={} residual={:.2e}  {}",
                    if t.passed { "PASS" } else { "FAIL" },
                    t.n,
                    t.iterations,
                    t.off_pattern_residual,
                    t.spec
                )
            };
            emit(out, &line)?;
        }
        done += batch;
    }
    let summary = if json {
        to_json(&serde_json::json!({
            "kind": "summary",
            "specs": specs.len(),
            "trials": cfg.trials,
            "failures": failures,
        }))
    } else {
        format!(
            "{} specs, {} reduction trials, {failures} failures",
            specs.len(),
            cfg.trials
        )
    };
    emit(out, &summary)?;
    Ok(if failures == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}
