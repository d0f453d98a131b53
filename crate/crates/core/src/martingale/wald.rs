use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};

use super::draw_symbol;
use super::gaussian::{Factor, GaussianFieldModel};
use super::likelihood::ParametricModel;
use super::replicate_rng;

/// Distance below which a grid point is identified with `theta0`.
pub const GRID_MATCH_TOL: f64 = 1e-12;

/// Model observed in the Wald experiment. Discrete models emit one symbol
/// per step; Gaussian models emit one independent copy of the whole field.
#[derive(Debug, Clone, Copy)]
pub enum WaldModel<'a> {
    Discrete(&'a ParametricModel),
    Gaussian(&'a GaussianFieldModel),
}

impl WaldModel<'_> {
    pub fn theta0(&self) -> &[f64] {
        match self {
            WaldModel::Discrete(m) => m.theta0(),
            WaldModel::Gaussian(m) => m.theta0(),
        }
    }

    fn domain(&self) -> &super::ParamBox {
        match self {
            WaldModel::Discrete(m) => m.domain(),
            WaldModel::Gaussian(m) => m.domain(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaldConfig {
    pub grid: Vec<Vec<f64>>,
    pub eps_ball: f64,
    pub n_max: usize,
    /// Levels at which estimates are recorded; `n_max` is always added.
    /// Empty selects `1, 2, 5, 10, 20, 50, ..` up to `n_max`.
    pub record: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Estimate and outside-ball statistic of one replicate at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaldRow {
    pub replicate: usize,
    pub n: usize,
    pub theta_hat: Vec<f64>,
    /// `ln sup { L_n^theta : theta in grid, |theta - theta0| >= eps }`;
    /// `None` when no grid point lies outside the ball.
    pub log_sup_ratio: Option<f64>,
    /// `max_k |theta_hat_k - theta0_k|`.
    pub sup_dev: f64,
}

/// Replicate averages at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct WaldAggregate {
    pub n: usize,
    pub mean_sup_dev: f64,
    pub mean_log_sup_ratio: Option<f64>,
    pub mean_sup_ratio: Option<f64>,
    pub fraction_within_tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub theta0: Vec<f64>,
    pub rows: Vec<WaldRow>,
    pub aggregates: Vec<WaldAggregate>,
    /// Fraction of replicates with `|theta_hat_{n_max} - theta0| < tol`.
    pub success_fraction: f64,
    /// Smallest distance between distinct grid points; the estimator cannot
    /// resolve anything finer.
    pub grid_spacing: Option<f64>,
    pub eps_ball: f64,
    pub tol: f64,
    pub n_max: usize,
    pub replicates: usize,
}

/// Grid maximum-likelihood estimation over seeded replicates.
pub fn wald_mle_experiment(model: WaldModel<'_>, config: &WaldConfig) -> Result<ConsistencyReport> {
    let prepared = Prepared::new(model, config)?;
    let per_replicate: Vec<Vec<WaldRow>> = (0..config.replicates)
        .into_par_iter()
        .map(|r| prepared.replicate(r, config.seed))
        .collect();
    let rows: Vec<WaldRow> = per_replicate.into_iter().flatten().collect();

    let reps = config.replicates as f64;
    let aggregates: Vec<WaldAggregate> = prepared
        .record
        .iter()
        .enumerate()
        .map(|(k, &n)| {
            let at: Vec<&WaldRow> = rows.iter().skip(k).step_by(prepared.record.len()).collect();
            let logs: Option<Vec<f64>> = at.iter().map(|r| r.log_sup_ratio).collect();
            WaldAggregate {
                n,
                mean_sup_dev: at.iter().map(|r| r.sup_dev).sum::<f64>() / reps,
                mean_log_sup_ratio: logs.as_ref().map(|l| l.iter().sum::<f64>() / reps),
                mean_sup_ratio: logs.as_ref().map(|l| l.iter().map(|v| v.exp()).sum::<f64>() / reps),
                fraction_within_tol: at.iter().filter(|r| r.sup_dev < config.tol).count() as f64
                    / reps,
            }
        })
        .collect();
    let success_fraction = aggregates.last().expect("n_max recorded").fraction_within_tol;

    Ok(ConsistencyReport {
        theta0: model.theta0().to_vec(),
        rows,
        aggregates,
        success_fraction,
        grid_spacing: prepared.spacing,
        eps_ball: config.eps_ball,
        tol: config.tol,
        n_max: config.n_max,
        replicates: config.replicates,
    })
}

/// Validated inputs plus per-grid-point precomputation.
struct Prepared<'a> {
    model: WaldModel<'a>,
    grid: &'a [Vec<f64>],
    record: Vec<usize>,
    outside: Vec<usize>,
    base: usize,
    spacing: Option<f64>,
    kind: Kind,
}

enum Kind {
    Discrete {
        log_pmf: Vec<Vec<f64>>,
        probs0: Vec<f64>,
    },
    Gaussian {
        factors: Vec<Factor>,
        precisions: Vec<DMatrix<f64>>,
    },
}

impl<'a> Prepared<'a> {
    fn new(model: WaldModel<'a>, config: &'a WaldConfig) -> Result<Self> {
        let grid = &config.grid[..];
        if grid.is_empty() {
            return Err(Error::InvalidArgument("theta grid is empty".into()));
        }
        if config.replicates == 0 {
            return Err(Error::OutOfRange {
                what: "replicates",
                value: 0,
                range: ">= 1",
            });
        }
        if config.n_max == 0 {
            return Err(Error::OutOfRange {
                what: "n_max",
                value: 0,
                range: ">= 1",
            });
        }
        if config.tol.is_nan() || config.tol <= 0.0 {
            return Err(Error::InvalidArgument("tol must be positive".into()));
        }
        if !(config.eps_ball > 0.0 && config.eps_ball.is_finite()) {
            return Err(Error::InvalidArgument("eps_ball must be positive".into()));
        }
        let theta0 = model.theta0();
        for theta in grid {
            model.domain().check(theta)?;
        }
        let base = grid
            .iter()
            .position(|t| distance(t, theta0) <= GRID_MATCH_TOL)
            .ok_or_else(|| Error::InvalidArgument(format!("grid does not contain theta0 {theta0:?}")))?;
        let spacing = grid_spacing(grid);
        if let Some(h) = spacing {
            if config.eps_ball <= h {
                return Err(Error::InvalidArgument(format!(
                    "eps_ball {} must exceed the grid spacing {h}",
                    config.eps_ball
                )));
            }
        }
        let record = record_levels(&config.record, config.n_max)?;
        let outside = (0..grid.len())
            .filter(|&j| distance(&grid[j], theta0) >= config.eps_ball)
            .collect();

        let kind = match model {
            WaldModel::Discrete(m) => {
                m.validate_grid(grid).map_err(|e| match e {
                    Error::AbsoluteContinuity { .. } => Error::DegenerateModel(format!(
                        "observations with zero probability under theta0: {e}"
                    )),
                    other => other,
                })?;
                Kind::Discrete {
                    log_pmf: grid
                        .iter()
                        .map(|t| m.probs(t).iter().map(|p| p.ln()).collect())
                        .collect(),
                    probs0: m.probs(theta0),
                }
            }
            WaldModel::Gaussian(m) => {
                let sites = m.num_sites();
                let mut factors = Vec::with_capacity(grid.len());
                for (j, theta) in grid.iter().enumerate() {
                    match m.factor(theta, sites) {
                        Ok(f) => factors.push(f),
                        Err(e) if j == base => {
                            return Err(Error::DegenerateModel(format!(
                                "covariance at theta0 is not positive definite: {e}"
                            )))
                        }
                        Err(e) => return Err(e),
                    }
                }
                let precisions = factors.iter().map(|f| f.chol.inverse()).collect();
                Kind::Gaussian {
                    factors,
                    precisions,
                }
            }
        };
        Ok(Prepared {
            model,
            grid,
            record,
            outside,
            base,
            spacing,
            kind,
        })
    }

    fn replicate(&self, replicate: usize, seed: u64) -> Vec<WaldRow> {
        let mut rng = replicate_rng(seed, replicate as u64);
        let n_max = *self.record.last().expect("nonempty");
        let mut rows = Vec::with_capacity(self.record.len());
        let mut next = self.record.iter().peekable();
        match &self.kind {
            Kind::Discrete { log_pmf, probs0 } => {
                let mut counts = vec![0usize; probs0.len()];
                for n in 1..=n_max {
                    counts[draw_symbol(&mut rng, probs0)] += 1;
                    if next.next_if_eq(&&n).is_some() {
                        let ll: Vec<f64> = log_pmf
                            .iter()
                            .map(|row| {
                                counts
                                    .iter()
                                    .zip(row)
                                    .filter(|(&c, _)| c > 0)
                                    .map(|(&c, &l)| c as f64 * l)
                                    .sum()
                            })
                            .collect();
                        rows.push(self.row(replicate, n, &ll));
                    }
                }
            }
            Kind::Gaussian {
                factors,
                precisions,
            } => {
                let m = self.sites();
                let mut s1 = DVector::zeros(m);
                let mut s2 = DMatrix::zeros(m, m);
                let truth = &factors[self.base];
                for n in 1..=n_max {
                    let y = GaussianFieldModel::sample_with(truth, &mut rng);
                    s2 += &y * y.transpose();
                    s1 += y;
                    if next.next_if_eq(&&n).is_some() {
                        let nf = n as f64;
                        let ll: Vec<f64> = factors
                            .iter()
                            .zip(precisions)
                            .map(|(f, prec)| {
                                let mu = &f.mean;
                                let scatter = &s2 - mu * s1.transpose() - &s1 * mu.transpose()
                                    + nf * mu * mu.transpose();
                                let quad = prec.component_mul(&scatter).sum();
                                -0.5 * nf * m as f64 * (2.0 * PI).ln()
                                    - 0.5 * nf * f.log_det
                                    - 0.5 * quad
                            })
                            .collect();
                        rows.push(self.row(replicate, n, &ll));
                    }
                }
            }
        }
        rows
    }

    fn sites(&self) -> usize {
        match self.model {
            WaldModel::Gaussian(m) => m.num_sites(),
            WaldModel::Discrete(_) => 0,
        }
    }

    /// Builds one row from the grid log-likelihoods.
    fn row(&self, replicate: usize, n: usize, ll: &[f64]) -> WaldRow {
        let mut best = 0;
        for (j, &v) in ll.iter().enumerate() {
            if v > ll[best] {
                best = j;
            }
        }
        let theta0 = self.model.theta0();
        let theta_hat = self.grid[best].clone();
        let sup_dev = theta_hat
            .iter()
            .zip(theta0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let log_sup_ratio = self
            .outside
            .iter()
            .map(|&j| ll[j] - ll[self.base])
            .reduce(f64::max);
        WaldRow {
            replicate,
            n,
            theta_hat,
            log_sup_ratio,
            sup_dev,
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Smallest positive distance between grid points.
fn grid_spacing(grid: &[Vec<f64>]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in grid.iter().enumerate() {
        for b in &grid[i + 1..] {
            let d = distance(a, b);
            if d > GRID_MATCH_TOL {
                best = Some(best.map_or(d, |h| h.min(d)));
            }
        }
    }
    best
}

fn record_levels(requested: &[usize], n_max: usize) -> Result<Vec<usize>> {
    let mut levels: Vec<usize> = if requested.is_empty() {
        let mut out = Vec::new();
        let mut decade = 1usize;
        while decade <= n_max {
            for k in [1, 2, 5] {
                let n = k * decade;
                if n <= n_max {
                    out.push(n);
                }
            }
            decade = decade.saturating_mul(10);
        }
        out
    } else {
        if let Some(&n) = requested.iter().find(|&&n| n == 0 || n > n_max) {
            return Err(Error::OutOfRange {
                what: "recorded level",
                value: n,
                range: "1..=n_max",
            });
        }
        requested.to_vec()
    };
    levels.push(n_max);
    levels.sort_unstable();
    levels.dedup();
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::martingale::{linspace, ParamBox};

    fn bernoulli_config(replicates: usize, n_max: usize) -> WaldConfig {
        WaldConfig {
            grid: (1..=9).map(|k| vec![k as f64 / 10.0]).collect(),
            eps_ball: 0.15,
            n_max,
            record: vec![10, 50],
            replicates,
            seed: 17,
            tol: 0.05,
        }
    }

    #[test]
    fn record_defaults() {
        assert_eq!(record_levels(&[], 120).unwrap(), vec![1, 2, 5, 10, 20, 50, 100, 120]);
        assert_eq!(record_levels(&[5, 3, 5], 7).unwrap(), vec![3, 5, 7]);
        assert!(record_levels(&[0], 7).is_err());
    }

    #[test]
    fn deterministic_rows() {
        let model = ParametricModel::bernoulli(0.6).unwrap();
        let mut cfg = bernoulli_config(1, 200);
        cfg.grid[5] = vec![0.6];
        let a = wald_mle_experiment(WaldModel::Discrete(&model), &cfg).unwrap();
        let b = wald_mle_experiment(WaldModel::Discrete(&model), &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 3);
    }

    #[test]
    fn single_point_grid() {
        let model = ParametricModel::bernoulli(0.6).unwrap();
        let cfg = WaldConfig {
            grid: vec![vec![0.6]],
            eps_ball: 0.1,
            n_max: 30,
            record: vec![],
            replicates: 4,
            seed: 1,
            tol: 0.05,
        };
        let r = wald_mle_experiment(WaldModel::Discrete(&model), &cfg).unwrap();
        assert!(r.rows.iter().all(|row| row.theta_hat == vec![0.6] && row.log_sup_ratio.is_none()));
        assert_eq!(r.success_fraction, 1.0);
        assert_eq!(r.grid_spacing, None);
    }

    #[test]
    fn validation_errors() {
        let model = ParametricModel::bernoulli(0.65).unwrap();
        let cfg = bernoulli_config(2, 10);
        assert!(wald_mle_experiment(WaldModel::Discrete(&model), &cfg).is_err());
        let model = ParametricModel::bernoulli(0.6).unwrap();
        let mut cfg = bernoulli_config(2, 10);
        cfg.eps_ball = 0.05;
        assert!(wald_mle_experiment(WaldModel::Discrete(&model), &cfg).is_err());
        cfg.eps_ball = 0.2;
        cfg.replicates = 0;
        assert!(wald_mle_experiment(WaldModel::Discrete(&model), &cfg).is_err());
    }

    #[test]
    fn degenerate_discrete_model() {
        let model = ParametricModel::bernoulli(1.0).unwrap();
        let cfg = WaldConfig {
            grid: vec![vec![0.5], vec![1.0]],
            eps_ball: 0.6,
            n_max: 5,
            record: vec![],
            replicates: 1,
            seed: 0,
            tol: 0.05,
        };
        assert!(matches!(
            wald_mle_experiment(WaldModel::Discrete(&model), &cfg),
            Err(Error::DegenerateModel(_))
        ));
    }

    #[test]
    fn gaussian_sufficient_statistics_match_direct_density() {
        let model = GaussianFieldModel::exponential_variance(
            GaussianFieldModel::line_sites(3),
            0.4,
            1.0,
            ParamBox::interval(0.2, 2.0).unwrap(),
        )
        .unwrap();
        let grid: Vec<Vec<f64>> = linspace(0.5, 1.5, 5).into_iter().map(|v| vec![v]).collect();
        let cfg = WaldConfig {
            grid: grid.clone(),
            eps_ball: 0.3,
            n_max: 4,
            record: vec![],
            replicates: 1,
            seed: 5,
            tol: 0.05,
        };
        let prepared = Prepared::new(WaldModel::Gaussian(&model), &cfg).unwrap();
        // Regenerate the same draws and sum per-copy log densities.
        let Kind::Gaussian { factors, .. } = &prepared.kind else {
            unreachable!()
        };
        let mut rng = replicate_rng(5, 0);
        let draws: Vec<Vec<f64>> = (0..4)
            .map(|_| {
                GaussianFieldModel::sample_with(&factors[2], &mut rng)
                    .iter()
                    .copied()
                    .collect()
            })
            .collect();
        let direct: Vec<f64> = grid
            .iter()
            .map(|t| draws.iter().map(|y| model.log_density(t, y, 3).unwrap()).sum())
            .collect();
        let rows = prepared.replicate(0, 5);
        let last = rows.last().unwrap();
        let best = (0..5)
            .reduce(|b, j| if direct[j] > direct[b] { j } else { b })
            .unwrap();
        assert_eq!(last.theta_hat, grid[best]);
        let expect = (direct[0] - direct[2]).max(direct[4] - direct[2]);
        assert!((last.log_sup_ratio.unwrap() - expect).abs() < 1e-9);
    }
}
