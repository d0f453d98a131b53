use std::fmt;
use std::sync::Arc;

use statrs::function::factorial::binomial;

use crate::error::{Error, Result};

use super::{draw_symbol, MartingaleFamily, ParamBox, PathLaw, PathSampler};

/// Tolerance on the total mass of a pmf.
pub const PMF_SUM_TOL: f64 = 1e-12;

type Pmf = Arc<dyn Fn(&[f64], usize) -> f64 + Send + Sync>;

/// A finite-alphabet parametric model `p_theta(s)` with a true parameter
/// `theta0`. Paths are i.i.d. under each `theta`.
#[derive(Clone)]
pub struct ParametricModel {
    name: String,
    alphabet: usize,
    pmf: Pmf,
    theta0: Vec<f64>,
    domain: ParamBox,
}

impl fmt::Debug for ParametricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricModel")
            .field("name", &self.name)
            .field("alphabet", &self.alphabet)
            .field("theta0", &self.theta0)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ParametricModel {
    pub fn new<P>(
        name: impl Into<String>,
        alphabet: usize,
        pmf: P,
        theta0: Vec<f64>,
        domain: ParamBox,
    ) -> Result<Self>
    where
        P: Fn(&[f64], usize) -> f64 + Send + Sync + 'static,
    {
        if alphabet == 0 {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        domain.check(&theta0)?;
        let model = ParametricModel {
            name: name.into(),
            alphabet,
            pmf: Arc::new(pmf),
            theta0,
            domain,
        };
        model.check_pmf(&model.theta0)?;
        Ok(model)
    }

    /// Bernoulli on `{0, 1}` with success probability `theta`.
    pub fn bernoulli(theta0: f64) -> Result<Self> {
        Self::new(
            "bernoulli",
            2,
            |t, s| if s == 1 { t[0] } else { 1.0 - t[0] },
            vec![theta0],
            ParamBox::interval(0.0, 1.0)?,
        )
    }

    /// Binomial counts on `{0, .., trials}`.
    pub fn binomial(trials: u64, theta0: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidArgument("binomial needs at least one trial".into()));
        }
        Self::new(
            "binomial",
            trials as usize + 1,
            move |t, s| {
                let k = s as u64;
                binomial(trials, k) * t[0].powi(k as i32) * (1.0 - t[0]).powi((trials - k) as i32)
            },
            vec![theta0],
            ParamBox::interval(0.0, 1.0)?,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn theta0(&self) -> &[f64] {
        &self.theta0
    }

    pub fn domain(&self) -> &ParamBox {
        &self.domain
    }

    pub fn pmf(&self, theta: &[f64], symbol: usize) -> f64 {
        (self.pmf)(theta, symbol)
    }

    /// The full pmf vector at `theta`.
    pub fn probs(&self, theta: &[f64]) -> Vec<f64> {
        (0..self.alphabet).map(|s| self.pmf(theta, s)).collect()
    }

    /// Checks that the pmf at `theta` is a probability vector.
    pub fn check_pmf(&self, theta: &[f64]) -> Result<()> {
        self.domain.check(theta)?;
        let probs = self.probs(theta);
        if let Some(s) = probs.iter().position(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "pmf at theta {theta:?} is invalid for symbol {s}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PMF_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "pmf at theta {theta:?} sums to {sum}"
            )));
        }
        Ok(())
    }

    /// Checks the pmf at every grid point and absolute continuity with
    /// respect to `theta0`.
    pub fn validate_grid(&self, grid: &[Vec<f64>]) -> Result<()> {
        let base = self.probs(&self.theta0);
        for theta in grid {
            self.check_pmf(theta)?;
            for (symbol, &p0) in base.iter().enumerate() {
                if p0 <= 0.0 && self.pmf(theta, symbol) > 0.0 {
                    return Err(Error::AbsoluteContinuity {
                        symbol,
                        theta: theta.clone(),
                        p_theta: self.pmf(theta, symbol),
                    });
                }
            }
        }
        Ok(())
    }

    /// `ln p_theta(s) - ln p_theta0(s)`; `None` when both vanish.
    pub(crate) fn log_ratio(&self, theta: &[f64], symbol: usize) -> Result<Option<f64>> {
        let p = self.pmf(theta, symbol);
        let p0 = self.pmf(&self.theta0, symbol);
        match (p > 0.0, p0 > 0.0) {
            (_, true) => Ok(Some(p.ln() - p0.ln())),
            (false, false) => Ok(None),
            (true, false) => Err(Error::AbsoluteContinuity {
                symbol,
                theta: theta.to_vec(),
                p_theta: p,
            }),
        }
    }
}

impl PathLaw for ParametricModel {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn next_probs(&self, _prefix: &[usize]) -> Vec<f64> {
        self.probs(&self.theta0)
    }
}

impl PathSampler for ParametricModel {
    fn sample(&self, rng: &mut dyn rand::RngCore, len: usize) -> Result<Vec<usize>> {
        let probs = self.probs(&self.theta0);
        Ok((0..len).map(|_| draw_symbol(rng, &probs)).collect())
    }
}

/// `L_n^theta = Π_{i<=n} p_theta(x_i) / p_theta0(x_i)`, a martingale under
/// the `theta0` law.
#[derive(Debug, Clone)]
pub struct LikelihoodRatioFamily {
    model: ParametricModel,
}

impl LikelihoodRatioFamily {
    pub fn new(model: ParametricModel) -> Self {
        LikelihoodRatioFamily { model }
    }

    pub fn model(&self) -> &ParametricModel {
        &self.model
    }

    /// `ln L_n^theta`, or `-inf` when some factor is zero.
    pub fn log_value(&self, theta: &[f64], n: usize, path: &[usize]) -> Result<f64> {
        self.model.domain.check(theta)?;
        if path.len() < n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: path.len(),
            });
        }
        let mut total = 0.0;
        for &symbol in &path[..n] {
            if symbol >= self.model.alphabet {
                return Err(Error::IndexOutOfRange {
                    index: symbol,
                    size: self.model.alphabet,
                });
            }
            if let Some(r) = self.model.log_ratio(theta, symbol)? {
                total += r;
            }
        }
        Ok(total)
    }
}

impl MartingaleFamily for LikelihoodRatioFamily {
    fn evaluate(&self, theta: &[f64], n: usize, path: &[usize]) -> Result<f64> {
        Ok(self.log_value(theta, n, path)?.exp())
    }

    fn domain(&self) -> &ParamBox {
        &self.model.domain
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_ratio_example() {
        let lr = LikelihoodRatioFamily::new(ParametricModel::bernoulli(0.5).unwrap());
        let v = lr.evaluate(&[0.6], 2, &[1, 0]).unwrap();
        assert!((v - 0.96).abs() < 1e-15);
        assert_eq!(lr.evaluate(&[0.6], 0, &[]).unwrap(), 1.0);
        for path in [[0, 0, 1], [1, 1, 1]] {
            assert_eq!(lr.evaluate(&[0.5], 3, &path).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_factor_gives_zero() {
        let lr = LikelihoodRatioFamily::new(ParametricModel::bernoulli(0.5).unwrap());
        assert_eq!(lr.evaluate(&[1.0], 2, &[1, 0]).unwrap(), 0.0);
        assert_eq!(lr.evaluate(&[1.0], 2, &[1, 1]).unwrap(), 4.0);
    }

    #[test]
    fn absolute_continuity_violation() {
        let lr = LikelihoodRatioFamily::new(ParametricModel::bernoulli(1.0).unwrap());
        assert!(matches!(
            lr.evaluate(&[0.5], 1, &[0]),
            Err(Error::AbsoluteContinuity { symbol: 0, .. })
        ));
        // Reading only coordinates where both laws agree is fine.
        assert_eq!(lr.evaluate(&[0.5], 1, &[1]).unwrap(), 0.5);
    }

    #[test]
    fn binomial_pmf_sums_to_one() {
        let m = ParametricModel::binomial(3, 0.25).unwrap();
        assert_eq!(m.alphabet(), 4);
        for t in [0.0, 0.1, 0.5, 0.9, 1.0] {
            m.check_pmf(&[t]).unwrap();
        }
        assert!((m.pmf(&[0.5], 1) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn grid_validation() {
        let m = ParametricModel::bernoulli(0.0).unwrap();
        assert!(matches!(
            m.validate_grid(&[vec![0.0], vec![0.3]]),
            Err(Error::AbsoluteContinuity { .. })
        ));
        assert!(m.validate_grid(&[vec![1.5]]).is_err());
    }
}
