use rayon::prelude::*;

use crate::error::{Error, Result};

use super::{evaluate_checked, replicate_rng, MartingaleFamily, PathSampler};

/// Statistics of `sup_theta |X_n^theta - X_ref^theta|` at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// Replicate mean of the sup deviation.
    pub mean_sup: f64,
    /// Replicate max of the sup deviation.
    pub max_sup: f64,
    /// `sup_theta` of the replicate mean of `|X_n^theta - X_ref^theta|`.
    pub l1_sup: f64,
}

/// Output of [`uniform_convergence_diag`]. `X_ref` is the value at `n_ref`,
/// a proxy for the almost-sure limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub n_ref: usize,
    pub replicates: usize,
    pub rows: Vec<ConvergenceRow>,
}

/// Monte Carlo estimate of uniform convergence over a finite parameter grid.
///
/// Replicate `r` draws one path of length `n_ref = max(n_list)` from a stream
/// seeded by `(seed, r)`, so results do not depend on scheduling.
pub fn uniform_convergence_diag<F, S>(
    family: &F,
    theta_grid: &[Vec<f64>],
    sampler: &S,
    n_list: &[usize],
    replicates: usize,
    seed: u64,
    require_bound: bool,
) -> Result<ConvergenceTable>
where
    F: MartingaleFamily + ?Sized,
    S: PathSampler + ?Sized,
{
    if theta_grid.is_empty() {
        return Err(Error::InvalidArgument("theta grid is empty".into()));
    }
    for theta in theta_grid {
        family.domain().check(theta)?;
    }
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n list is empty".into()));
    }
    if replicates == 0 {
        return Err(Error::OutOfRange {
            what: "replicates",
            value: 0,
            range: ">= 1",
        });
    }
    if require_bound && family.bound().is_none() {
        return Err(Error::Unbounded);
    }
    let n_ref = *n_list.iter().max().expect("nonempty");

    // deviations[r][k][j] = |X_{n_k}^{theta_j} - X_ref^{theta_j}| in replicate r
    let deviations: Vec<Vec<Vec<f64>>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r as u64);
            let path = sampler.sample(&mut rng, n_ref)?;
            let reference = theta_grid
                .iter()
                .map(|theta| evaluate_checked(family, theta, n_ref, &path))
                .collect::<Result<Vec<f64>>>()?;
            n_list
                .iter()
                .map(|&n| {
                    theta_grid
                        .iter()
                        .zip(&reference)
                        .map(|(theta, x_ref)| {
                            Ok((evaluate_checked(family, theta, n, &path)? - x_ref).abs())
                        })
                        .collect::<Result<Vec<f64>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let reps = replicates as f64;
    let rows = n_list
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let sups: Vec<f64> = deviations
                .iter()
                .map(|rep| rep[k].iter().copied().fold(0.0, f64::max))
                .collect();
            let l1_sup = (0..theta_grid.len())
                .map(|j| deviations.iter().map(|rep| rep[k][j]).sum::<f64>() / reps)
                .fold(0.0, f64::max);
            ConvergenceRow {
                n,
                mean_sup: sups.iter().sum::<f64>() / reps,
                max_sup: sups.iter().copied().fold(0.0, f64::max),
                l1_sup,
            }
        })
        .collect();
    Ok(ConvergenceTable {
        n_ref,
        replicates,
        rows,
    })
}
