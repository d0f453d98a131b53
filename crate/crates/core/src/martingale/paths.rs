use crate::error::{Error, Result};
use crate::partition::{Filtration, Partition};
use crate::space::FiniteSpace;

use super::{draw_symbol, PathLaw, PathSampler};

/// Largest number of paths a [`PathSpace`] may hold.
pub const MAX_PATHS: usize = 1 << 20;

/// A finite space whose outcomes are the words of length `depth` over
/// `{0, .., alphabet-1}`.
///
/// Outcome indices encode paths in base `alphabet` with the first coordinate
/// most significant, so every prefix owns a contiguous index range.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpace {
    alphabet: usize,
    depth: usize,
    space: FiniteSpace,
}

impl PathSpace {
    pub fn new(alphabet: usize, depth: usize, weights: &[f64]) -> Result<Self> {
        let count = path_count(alphabet, depth)?;
        if weights.len() != count {
            return Err(Error::SizeMismatch {
                expected: count,
                found: weights.len(),
            });
        }
        Ok(PathSpace {
            alphabet,
            depth,
            space: FiniteSpace::new(weights, None)?,
        })
    }

    /// Uniform weights on all paths.
    pub fn uniform(alphabet: usize, depth: usize) -> Result<Self> {
        let count = path_count(alphabet, depth)?;
        Self::new(alphabet, depth, &vec![1.0 / count as f64; count])
    }

    /// Product law with the same one-step distribution at every coordinate.
    pub fn product(step: &[f64], depth: usize) -> Result<Self> {
        let alphabet = step.len();
        let count = path_count(alphabet, depth)?;
        let weights: Vec<f64> = (0..count)
            .map(|index| {
                let mut w = 1.0;
                let mut rest = index;
                for _ in 0..depth {
                    w *= step[rest % alphabet];
                    rest /= alphabet;
                }
                w
            })
            .collect();
        Self::new(alphabet, depth, &weights)
    }

    /// Point mass at one path.
    pub fn dirac(alphabet: usize, depth: usize, path: &[usize]) -> Result<Self> {
        let count = path_count(alphabet, depth)?;
        if path.len() != depth {
            return Err(Error::SizeMismatch {
                expected: depth,
                found: path.len(),
            });
        }
        if let Some(&s) = path.iter().find(|&&s| s >= alphabet) {
            return Err(Error::IndexOutOfRange {
                index: s,
                size: alphabet,
            });
        }
        let mut weights = vec![0.0; count];
        weights[encode(alphabet, path)] = 1.0;
        Self::new(alphabet, depth, &weights)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Outcome index of a full-length path.
    pub fn index_of(&self, path: &[usize]) -> Result<usize> {
        if path.len() != self.depth {
            return Err(Error::SizeMismatch {
                expected: self.depth,
                found: path.len(),
            });
        }
        if let Some(&s) = path.iter().find(|&&s| s >= self.alphabet) {
            return Err(Error::IndexOutOfRange {
                index: s,
                size: self.alphabet,
            });
        }
        Ok(encode(self.alphabet, path))
    }

    /// Outcome index of `prefix` padded with zeros up to the depth.
    /// Longer inputs are cut at the depth.
    pub fn index_of_padded(&self, prefix: &[usize]) -> Result<usize> {
        let mut full = vec![0; self.depth];
        let keep = prefix.len().min(self.depth);
        full[..keep].copy_from_slice(&prefix[..keep]);
        self.index_of(&full)
    }

    pub fn path_of(&self, index: usize) -> Vec<usize> {
        let mut path = vec![0; self.depth];
        let mut rest = index;
        for slot in path.iter_mut().rev() {
            *slot = rest % self.alphabet;
            rest /= self.alphabet;
        }
        path
    }

    /// Index range of the paths extending `prefix`.
    fn prefix_range(&self, prefix: &[usize]) -> std::ops::Range<usize> {
        let span = self.alphabet.pow((self.depth - prefix.len()) as u32);
        let start = encode(self.alphabet, prefix) * span;
        start..start + span
    }

    /// Probability of the cylinder set of `prefix`.
    pub fn prefix_prob(&self, prefix: &[usize]) -> f64 {
        self.space.weights()[self.prefix_range(prefix)].iter().sum()
    }

    /// Coordinate partitions at levels `0..=depth`.
    pub fn coordinate_levels(&self) -> Vec<Partition> {
        coordinate_levels(self.alphabet, self.depth)
    }
}

impl PathLaw for PathSpace {
    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn next_probs(&self, prefix: &[usize]) -> Vec<f64> {
        let total = self.prefix_prob(prefix);
        let mut child = prefix.to_vec();
        child.push(0);
        (0..self.alphabet)
            .map(|s| {
                if total <= 0.0 {
                    return 0.0;
                }
                *child.last_mut().unwrap() = s;
                self.prefix_prob(&child) / total
            })
            .collect()
    }

    fn max_len(&self) -> Option<usize> {
        Some(self.depth)
    }
}

impl PathSampler for PathSpace {
    fn sample(&self, rng: &mut dyn rand::RngCore, len: usize) -> Result<Vec<usize>> {
        if len > self.depth {
            return Err(Error::OutOfRange {
                what: "path length",
                value: len,
                range: "at most the path-space depth",
            });
        }
        let index = draw_symbol(rng, self.space.weights());
        let mut path = self.path_of(index);
        path.truncate(len);
        Ok(path)
    }
}

/// The filtration generated by the first `n` coordinates, `n = 1..=depth`.
pub fn coordinate_filtration(alphabet: usize, depth: usize) -> Result<Filtration> {
    path_count(alphabet, depth)?;
    if depth == 0 {
        return Err(Error::InvalidFiltration("depth must be at least 1".into()));
    }
    let levels = coordinate_levels(alphabet, depth).split_off(1);
    Filtration::new(levels, None)
}

fn coordinate_levels(alphabet: usize, depth: usize) -> Vec<Partition> {
    let count = alphabet.pow(depth as u32);
    (0..=depth)
        .map(|n| {
            let span = alphabet.pow((depth - n) as u32);
            let labels: Vec<usize> = (0..count).map(|i| i / span).collect();
            Partition::from_labels(&labels)
        })
        .collect()
}

fn encode(alphabet: usize, path: &[usize]) -> usize {
    path.iter().fold(0, |acc, &s| acc * alphabet + s)
}

fn path_count(alphabet: usize, depth: usize) -> Result<usize> {
    if alphabet == 0 {
        return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
    }
    let mut count: usize = 1;
    for _ in 0..depth {
        count = count.saturating_mul(alphabet);
        if count > MAX_PATHS {
            return Err(Error::OutOfRange {
                what: "number of paths",
                value: count,
                range: "at most 2^20",
            });
        }
    }
    Ok(count)
}
