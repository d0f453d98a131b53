//! Families of martingales indexed by a parameter.
//!
//! A family maps `(theta, n, path)` to `X_n^theta(path)`, where `path` is a
//! sequence of symbols from a finite alphabet and only `path[..n]` may be
//! read. Exact verification of the martingale property works by enumerating
//! every prefix with positive probability under a [`PathLaw`].

use crate::error::{Error, Result};

mod check;
mod convergence;
mod dirac;
mod doob;
mod gaussian;
mod likelihood;
mod paths;
mod posterior;
mod wald;

pub use check::{check_martingale, expected_value, MartingaleCheck};
pub use convergence::{uniform_convergence_diag, ConvergenceRow, ConvergenceTable};
pub use dirac::{dirac_entropy_demo, dirac_family, DiracDemo, DiracRow, DIRAC_THETAS, MAX_DIRAC_DEPTH};
pub use doob::DoobMartingale;
pub use gaussian::GaussianFieldModel;
pub use likelihood::{LikelihoodRatioFamily, ParametricModel};
pub use paths::{coordinate_filtration, PathSpace, MAX_PATHS};
pub use posterior::{GridPosteriorFamily, Predictive};
pub use wald::{
    wald_mle_experiment, ConsistencyReport, WaldAggregate, WaldConfig, WaldModel, WaldRow, GRID_MATCH_TOL,
};

/// Slack allowed on a declared bound.
pub const BOUND_SLACK: f64 = 1e-9;

/// A box `Θ = Π [lo_j, hi_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamBox {
    bounds: Vec<(f64, f64)>,
}

impl ParamBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &bounds {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidArgument(format!(
                    "invalid parameter interval [{lo}, {hi}]"
                )));
            }
        }
        Ok(ParamBox { bounds })
    }

    /// `[lo, hi]` in one dimension.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi)])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(&self.bounds)
                .all(|(&t, &(lo, hi))| t >= lo && t <= hi)
    }

    pub fn check(&self, theta: &[f64]) -> Result<()> {
        if self.contains(theta) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "theta {theta:?} outside the parameter box {:?}",
                self.bounds
            )))
        }
    }

    /// `count` evenly spaced points per coordinate (product grid).
    pub fn grid(&self, count: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .bounds
            .iter()
            .map(|&(lo, hi)| linspace(lo, hi, count))
            .collect();
        let mut out = vec![Vec::new()];
        for axis in axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// `X_n^theta(path)` for a parameter-indexed family.
pub trait MartingaleFamily: Send + Sync {
    /// Value at level `n`; reads only `path[..n]`.
    fn evaluate(&self, theta: &[f64], n: usize, path: &[usize]) -> Result<f64>;

    fn domain(&self) -> &ParamBox;

    /// `M` with `sup |X_n^theta| <= M`, when declared.
    fn bound(&self) -> Option<f64> {
        None
    }
}

/// Evaluates and enforces the declared bound.
pub fn evaluate_checked<F: MartingaleFamily + ?Sized>(
    family: &F,
    theta: &[f64],
    n: usize,
    path: &[usize],
) -> Result<f64> {
    let value = family.evaluate(theta, n, path)?;
    if let Some(bound) = family.bound() {
        if value.abs() > bound + BOUND_SLACK {
            return Err(Error::BoundViolated { value, bound });
        }
    }
    Ok(value)
}

/// Law of a random path over a finite alphabet, given through the conditional
/// distribution of the next symbol.
pub trait PathLaw {
    fn alphabet_size(&self) -> usize;

    /// `P(next = s | prefix)` for every symbol `s`.
    fn next_probs(&self, prefix: &[usize]) -> Vec<f64>;

    /// Longest path the law describes, if finite.
    fn max_len(&self) -> Option<usize> {
        None
    }
}

/// Draws paths of a requested length.
pub trait PathSampler: Send + Sync {
    fn sample(&self, rng: &mut dyn rand::RngCore, len: usize) -> Result<Vec<usize>>;
}

/// Inverse-CDF draw from a discrete distribution.
pub(crate) fn draw_symbol(rng: &mut dyn rand::RngCore, probs: &[f64]) -> usize {
    use rand::Rng;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (s, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = s;
            acc += p;
            if u < acc {
                return s;
            }
        }
    }
    last_positive
}

/// Per-replicate random stream derived only from `(seed, replicate)`.
pub fn replicate_rng(seed: u64, replicate: u64) -> rand_chacha::ChaCha20Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}
