use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::partition::{refines_exact, Filtration};

use super::paths::PathSpace;
use super::{MartingaleFamily, ParamBox, BOUND_SLACK};

type Terminal = Arc<dyn Fn(&[f64], &[usize]) -> f64 + Send + Sync>;

/// `X_n^theta = E[T_theta | a_n]` on a finite path space.
///
/// Level `n = 0` is the trivial σ-field; levels past the end of the
/// filtration repeat the last one.
#[derive(Clone)]
pub struct DoobMartingale {
    paths: PathSpace,
    filtration: Filtration,
    terminal: Terminal,
    domain: ParamBox,
    bound: Option<f64>,
}

impl fmt::Debug for DoobMartingale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DoobMartingale")
            .field("alphabet", &self.paths.alphabet())
            .field("depth", &self.paths.depth())
            .field("levels", &self.filtration.len())
            .field("bound", &self.bound)
            .finish()
    }
}

impl DoobMartingale {
    /// Level `n` of `filtration` must be determined by the first `n` path
    /// coordinates.
    pub fn new<T>(
        paths: PathSpace,
        filtration: Filtration,
        terminal: T,
        domain: ParamBox,
        bound: Option<f64>,
    ) -> Result<Self>
    where
        T: Fn(&[f64], &[usize]) -> f64 + Send + Sync + 'static,
    {
        if filtration.size() != paths.len() {
            return Err(Error::SizeMismatch {
                expected: paths.len(),
                found: filtration.size(),
            });
        }
        let coords = paths.coordinate_levels();
        for (k, level) in filtration.levels().iter().enumerate() {
            let n = (k + 1).min(paths.depth());
            if !refines_exact(level, &coords[n]) {
                return Err(Error::InvalidFiltration(format!(
                    "level {} is not determined by the first {n} coordinates",
                    k + 1
                )));
            }
        }
        if let Some(m) = bound {
            if !(m.is_finite() && m >= 0.0) {
                return Err(Error::InvalidArgument(format!("invalid bound {m}")));
            }
        }
        Ok(DoobMartingale {
            paths,
            filtration,
            terminal: Arc::new(terminal),
            domain,
            bound,
        })
    }

    /// Doob martingale for the coordinate filtration.
    pub fn coordinate<T>(
        paths: PathSpace,
        terminal: T,
        domain: ParamBox,
        bound: Option<f64>,
    ) -> Result<Self>
    where
        T: Fn(&[f64], &[usize]) -> f64 + Send + Sync + 'static,
    {
        let filtration = super::coordinate_filtration(paths.alphabet(), paths.depth())?;
        Self::new(paths, filtration, terminal, domain, bound)
    }

    pub fn paths(&self) -> &PathSpace {
        &self.paths
    }

    pub fn filtration(&self) -> &Filtration {
        &self.filtration
    }

    fn average(&self, theta: &[f64], members: &mut dyn Iterator<Item = usize>) -> Result<f64> {
        let weights = self.paths.space().weights();
        let (mut mass, mut acc) = (0.0, 0.0);
        for i in members {
            let w = weights[i];
            if w <= 0.0 {
                continue;
            }
            let t = (self.terminal)(theta, &self.paths.path_of(i));
            if !t.is_finite() {
                return Err(Error::Unbounded);
            }
            mass += w;
            acc += w * t;
        }
        Ok(if mass > 0.0 { acc / mass } else { 0.0 })
    }
}

impl MartingaleFamily for DoobMartingale {
    fn evaluate(&self, theta: &[f64], n: usize, path: &[usize]) -> Result<f64> {
        self.domain.check(theta)?;
        let value = if n == 0 {
            self.average(theta, &mut (0..self.paths.len()))?
        } else {
            let read = n.min(self.paths.depth());
            if path.len() < read {
                return Err(Error::SizeMismatch {
                    expected: read,
                    found: path.len(),
                });
            }
            let outcome = self.paths.index_of_padded(&path[..read])?;
            let level = self
                .filtration
                .level(n.min(self.filtration.len()))
                .expect("filtration has at least one level");
            let block = &level.blocks()[level.block_of(outcome)];
            self.average(theta, &mut block.iter().copied())?
        };
        if let Some(bound) = self.bound {
            if value.abs() > bound + BOUND_SLACK {
                return Err(Error::BoundViolated { value, bound });
            }
        }
        Ok(value)
    }

    fn domain(&self) -> &ParamBox {
        &self.domain
    }

    fn bound(&self) -> Option<f64> {
        self.bound
    }
}
