use crate::error::{Error, Result};

use super::likelihood::ParametricModel;
use super::{MartingaleFamily, ParamBox, PathLaw};

/// Posterior distribution function under a discrete prior on a parameter grid.
///
/// For scalar `theta`, `X_n^theta = P(ϑ <= theta | x_1, .., x_n)` where `ϑ`
/// is drawn from the prior and the path is i.i.d. `p_ϑ` given `ϑ`. This is the
/// Doob martingale of the indicator terminal `1{ϑ <= theta}` under the
/// mixture law returned by [`GridPosteriorFamily::predictive`], bounded by 1.
#[derive(Debug, Clone)]
pub struct GridPosteriorFamily {
    model: ParametricModel,
    support: Vec<f64>,
    log_prior: Vec<f64>,
    /// `ln p_{support[j]}(s)`, row per support point.
    log_pmf: Vec<Vec<f64>>,
}

impl GridPosteriorFamily {
    /// Uniform prior over `support`.
    pub fn new(model: ParametricModel, support: Vec<f64>) -> Result<Self> {
        let weights = vec![1.0; support.len()];
        Self::with_prior(model, support, &weights)
    }

    pub fn with_prior(model: ParametricModel, support: Vec<f64>, prior: &[f64]) -> Result<Self> {
        if model.domain().dim() != 1 {
            return Err(Error::InvalidArgument(
                "posterior family needs a scalar parameter".into(),
            ));
        }
        if support.is_empty() {
            return Err(Error::InvalidArgument("prior support is empty".into()));
        }
        if prior.len() != support.len() {
            return Err(Error::SizeMismatch {
                expected: support.len(),
                found: prior.len(),
            });
        }
        if prior.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("prior weights must be positive".into()));
        }
        let total: f64 = prior.iter().sum();
        let mut log_pmf = Vec::with_capacity(support.len());
        for &t in &support {
            model.check_pmf(&[t])?;
            log_pmf.push(model.probs(&[t]).iter().map(|p| p.ln()).collect());
        }
        Ok(GridPosteriorFamily {
            log_prior: prior.iter().map(|w| (w / total).ln()).collect(),
            model,
            support,
            log_pmf,
        })
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    /// Posterior weights on the support after `path`.
    pub fn posterior(&self, path: &[usize]) -> Result<Vec<f64>> {
        let alphabet = self.model.alphabet();
        let mut counts = vec![0usize; alphabet];
        for &s in path {
            if s >= alphabet {
                return Err(Error::IndexOutOfRange {
                    index: s,
                    size: alphabet,
                });
            }
            counts[s] += 1;
        }
        let logs: Vec<f64> = self
            .log_pmf
            .iter()
            .zip(&self.log_prior)
            .map(|(row, &lp)| {
                counts
                    .iter()
                    .zip(row)
                    .filter(|(&c, _)| c > 0)
                    .fold(lp, |acc, (&c, &l)| acc + c as f64 * l)
            })
            .collect();
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Err(Error::InvalidArgument(
                "path has zero probability under every support point".into(),
            ));
        }
        let raw: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = raw.iter().sum();
        Ok(raw.into_iter().map(|r| r / total).collect())
    }

    /// The mixture law of the path under the prior.
    pub fn predictive(&self) -> Predictive<'_> {
        Predictive { family: self }
    }
}

impl MartingaleFamily for GridPosteriorFamily {
    fn evaluate(&self, theta: &[f64], n: usize, path: &[usize]) -> Result<f64> {
        self.model.domain().check(theta)?;
        if path.len() < n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: path.len(),
            });
        }
        let post = self.posterior(&path[..n])?;
        let value: f64 = self
            .support
            .iter()
            .zip(&post)
            .filter(|(&t, _)| t <= theta[0])
            .map(|(_, &w)| w)
            .sum();
        Ok(value.min(1.0))
    }

    fn domain(&self) -> &ParamBox {
        self.model.domain()
    }

    fn bound(&self) -> Option<f64> {
        Some(1.0)
    }
}

/// Prior-predictive law of a [`GridPosteriorFamily`].
#[derive(Debug, Clone, Copy)]
pub struct Predictive<'a> {
    family: &'a GridPosteriorFamily,
}

impl PathLaw for Predictive<'_> {
    fn alphabet_size(&self) -> usize {
        self.family.model.alphabet()
    }

    fn next_probs(&self, prefix: &[usize]) -> Vec<f64> {
        let post = match self.family.posterior(prefix) {
            Ok(post) => post,
            Err(_) => return vec![0.0; self.alphabet_size()],
        };
        (0..self.alphabet_size())
            .map(|s| {
                post.iter()
                    .zip(&self.family.log_pmf)
                    .map(|(w, row)| w * row[s].exp())
                    .sum()
            })
            .collect()
    }
}
