use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

use super::ParamBox;

/// Jitter factors tried in order, relative to the mean diagonal.
pub const JITTER: [f64; 2] = [1e-10, 1e-8];

type Kernel = Arc<dyn Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync>;
type Mean = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A Gaussian field observed at finitely many sites.
///
/// The first `n` sites form the observation `Y_n`, whose law under `theta`
/// is `N(mean(theta, s_i), kernel(theta, s_i, s_j))`.
#[derive(Clone)]
pub struct GaussianFieldModel {
    sites: Vec<Vec<f64>>,
    kernel: Kernel,
    mean: Mean,
    theta0: Vec<f64>,
    domain: ParamBox,
}

impl fmt::Debug for GaussianFieldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GaussianFieldModel")
            .field("sites", &self.sites)
            .field("theta0", &self.theta0)
            .field("domain", &self.domain)
            .finish()
    }
}

/// Cholesky factor of one covariance matrix together with the mean vector.
#[derive(Debug, Clone)]
pub(crate) struct Factor {
    pub(crate) chol: Cholesky<f64, Dyn>,
    pub(crate) mean: DVector<f64>,
    pub(crate) log_det: f64,
}

impl GaussianFieldModel {
    pub fn new<K, M>(
        sites: Vec<Vec<f64>>,
        kernel: K,
        mean: M,
        theta0: Vec<f64>,
        domain: ParamBox,
    ) -> Result<Self>
    where
        K: Fn(&[f64], &[f64], &[f64]) -> f64 + Send + Sync + 'static,
        M: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        if sites.is_empty() {
            return Err(Error::InvalidArgument("no sites".into()));
        }
        let dim = sites[0].len();
        for site in &sites {
            if site.len() != dim {
                return Err(Error::SizeMismatch {
                    expected: dim,
                    found: site.len(),
                });
            }
            if site.iter().any(|c| !(0.0..=1.0).contains(c)) {
                return Err(Error::InvalidArgument(format!(
                    "site {site:?} lies outside the unit cube"
                )));
            }
        }
        domain.check(&theta0)?;
        Ok(GaussianFieldModel {
            sites,
            kernel: Arc::new(kernel),
            mean: Arc::new(mean),
            theta0,
            domain,
        })
    }

    /// Zero mean, covariance `theta * exp(-|s - t| / lengthscale)`.
    pub fn exponential_variance(
        sites: Vec<Vec<f64>>,
        lengthscale: f64,
        theta0: f64,
        domain: ParamBox,
    ) -> Result<Self> {
        check_lengthscale(lengthscale)?;
        Self::new(
            sites,
            move |t, s, u| t[0] * (-distance(s, u) / lengthscale).exp(),
            |_, _| 0.0,
            vec![theta0],
            domain,
        )
    }

    /// Zero mean, covariance `theta * exp(-|s - t|^2 / (2 lengthscale^2))`.
    pub fn squared_exponential_variance(
        sites: Vec<Vec<f64>>,
        lengthscale: f64,
        theta0: f64,
        domain: ParamBox,
    ) -> Result<Self> {
        check_lengthscale(lengthscale)?;
        Self::new(
            sites,
            move |t, s, u| {
                let d = distance(s, u);
                t[0] * (-d * d / (2.0 * lengthscale * lengthscale)).exp()
            },
            |_, _| 0.0,
            vec![theta0],
            domain,
        )
    }

    /// Independent sites with variance `theta`.
    pub fn white_noise(sites: Vec<Vec<f64>>, theta0: f64, domain: ParamBox) -> Result<Self> {
        Self::new(
            sites,
            |t, s, u| if s == u { t[0] } else { 0.0 },
            |_, _| 0.0,
            vec![theta0],
            domain,
        )
    }

    /// `m` evenly spaced sites on `[0, 1]`.
    pub fn line_sites(m: usize) -> Vec<Vec<f64>> {
        super::linspace(0.0, 1.0, m)
            .into_iter()
            .map(|x| vec![x])
            .collect()
    }

    pub fn sites(&self) -> &[Vec<f64>] {
        &self.sites
    }

    pub fn num_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn theta0(&self) -> &[f64] {
        &self.theta0
    }

    pub fn domain(&self) -> &ParamBox {
        &self.domain
    }

    /// Covariance of the first `n` sites.
    pub fn covariance(&self, theta: &[f64], n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            (self.kernel)(theta, &self.sites[i], &self.sites[j])
        })
    }

    pub fn mean_vector(&self, theta: &[f64], n: usize) -> DVector<f64> {
        DVector::from_fn(n, |i, _| (self.mean)(theta, &self.sites[i]))
    }

    pub(crate) fn factor(&self, theta: &[f64], n: usize) -> Result<Factor> {
        self.domain.check(theta)?;
        if n == 0 || n > self.num_sites() {
            return Err(Error::OutOfRange {
                what: "observed sites",
                value: n,
                range: "1..=number of sites",
            });
        }
        let cov = self.covariance(theta, n);
        let scale = cov.diagonal().mean();
        let fail = || Error::Factorization {
            theta: theta.to_vec(),
            n,
        };
        if !(scale.is_finite() && scale > 0.0) || cov.iter().any(|v| !v.is_finite()) {
            return Err(fail());
        }
        for factor in JITTER {
            let mut jittered = cov.clone();
            for i in 0..n {
                jittered[(i, i)] += factor * scale;
            }
            if let Some(chol) = Cholesky::new(jittered) {
                let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                return Ok(Factor {
                    chol,
                    mean: self.mean_vector(theta, n),
                    log_det,
                });
            }
        }
        Err(fail())
    }

    /// `ln f_n^theta(y)` for the first `n` coordinates of `y`.
    pub fn log_density(&self, theta: &[f64], y: &[f64], n: usize) -> Result<f64> {
        if y.len() < n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: y.len(),
            });
        }
        let f = self.factor(theta, n)?;
        let resid = DVector::from_column_slice(&y[..n]) - &f.mean;
        let z = f
            .chol
            .l_dirty()
            .solve_lower_triangular(&resid)
            .ok_or_else(|| Error::Factorization {
                theta: theta.to_vec(),
                n,
            })?;
        Ok(-0.5 * n as f64 * (2.0 * PI).ln() - 0.5 * f.log_det - 0.5 * z.norm_squared())
    }

    /// `ln L_n^theta(y) = ln f_n^theta(y) - ln f_n^theta0(y)`.
    pub fn log_likelihood_ratio(&self, theta: &[f64], y: &[f64], n: usize) -> Result<f64> {
        Ok(self.log_density(theta, y, n)? - self.log_density(&self.theta0, y, n)?)
    }

    /// One draw of the whole field under `theta0`.
    pub(crate) fn sample_with(factor: &Factor, rng: &mut dyn rand::RngCore) -> DVector<f64> {
        let m = factor.mean.len();
        let z = DVector::from_fn(m, |_, _| StandardNormal.sample(rng));
        &factor.mean + factor.chol.l_dirty().lower_triangle() * z
    }
}

fn distance(s: &[f64], t: &[f64]) -> f64 {
    s.iter().zip(t).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn check_lengthscale(lengthscale: f64) -> Result<()> {
    if lengthscale.is_finite() && lengthscale > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "lengthscale must be positive, got {lengthscale}"
        )))
    }
}
