//! Finite probability spaces and events.
//!
//! A [`FiniteSpace`] is the computable stand-in for a probability space
//! `(X, B, P)`: `X` is a finite list of outcomes, `P` a weight vector and `B`
//! the power set. Events are sets of outcome indices.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::Partition;

/// Tolerance on the weight sum accepted by [`FiniteSpace::new`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A finite outcome set with probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl FiniteSpace {
    /// Builds a validated space. Weights are renormalized once so that they
    /// sum to one; labels default to the outcome indices.
    pub fn new(weights: &[f64], labels: Option<Vec<String>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteWeight { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let labels = match labels {
            Some(labels) => {
                if labels.len() != weights.len() {
                    return Err(Error::LabelCount {
                        labels: labels.len(),
                        weights: weights.len(),
                    });
                }
                let mut seen = HashSet::with_capacity(labels.len());
                for label in &labels {
                    if !seen.insert(label.as_str()) {
                        return Err(Error::DuplicateLabel(label.clone()));
                    }
                }
                labels
            }
            None => (0..weights.len()).map(|i| i.to_string()).collect(),
        };
        let weights = weights.iter().map(|w| w / sum).collect();
        Ok(FiniteSpace { labels, weights })
    }

    /// Uniform space on `n` outcomes.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(&vec![1.0 / n as f64; n], None)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, outcome: usize) -> f64 {
        self.weights[outcome]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The full outcome set as an event.
    pub fn full_event(&self) -> Event {
        Event::from_sorted_unchecked((0..self.len()).collect())
    }

    /// Probability of an event.
    pub fn prob(&self, event: &Event) -> Result<f64> {
        event.check(self.len())?;
        Ok(self.mass(event.members()))
    }

    /// Sum of weights over a list of indices, without validation.
    pub(crate) fn mass(&self, members: &[usize]) -> f64 {
        let total: f64 = members.iter().map(|&i| self.weights[i]).sum();
        total.min(1.0)
    }

    /// Conditional probability of `event` given the σ-field of `eta`,
    /// returned as one value per outcome. Outcomes in zero-mass blocks get 0.
    pub fn cond_prob(&self, event: &Event, eta: &Partition) -> Result<Vec<f64>> {
        event.check(self.len())?;
        eta.check_size(self.len())?;
        let mut inside = vec![false; self.len()];
        for &i in event.members() {
            inside[i] = true;
        }
        let mut values = vec![0.0; self.len()];
        for block in eta.blocks() {
            let total = self.mass(block);
            if total <= 0.0 {
                continue;
            }
            let hit: f64 = block
                .iter()
                .filter(|&&i| inside[i])
                .map(|&i| self.weights[i])
                .sum();
            let ratio = (hit / total).min(1.0);
            for &i in block {
                values[i] = ratio;
            }
        }
        Ok(values)
    }
}

/// A set of outcome indices, kept sorted and free of duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct Event {
    members: Vec<usize>,
}

impl Event {
    pub fn new<I: IntoIterator<Item = usize>>(members: I) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Event { members }
    }

    pub fn empty() -> Self {
        Event::default()
    }

    pub(crate) fn from_sorted_unchecked(members: Vec<usize>) -> Self {
        Event { members }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, outcome: usize) -> bool {
        self.members.binary_search(&outcome).is_ok()
    }

    /// Checks that every member indexes into a space of `size` outcomes.
    pub fn check(&self, size: usize) -> Result<()> {
        match self.members.last() {
            Some(&index) if index >= size => Err(Error::IndexOutOfRange { index, size }),
            _ => Ok(()),
        }
    }

    /// `(A \ B) ∪ (B \ A)`.
    pub fn sym_diff(&self, other: &Event) -> Event {
        let (a, b) = (&self.members, &other.members);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Event { members: out }
    }

    pub fn union(&self, other: &Event) -> Event {
        Event::new(self.members.iter().chain(&other.members).copied())
    }

    pub fn intersection(&self, other: &Event) -> Event {
        Event::from_sorted_unchecked(
            self.members
                .iter()
                .copied()
                .filter(|&i| other.contains(i))
                .collect(),
        )
    }

    /// Complement within a space of `size` outcomes.
    pub fn complement(&self, size: usize) -> Event {
        Event::from_sorted_unchecked((0..size).filter(|&i| !self.contains(i)).collect())
    }
}

impl From<Vec<usize>> for Event {
    fn from(members: Vec<usize>) -> Self {
        Event::new(members)
    }
}

impl From<Event> for Vec<usize> {
    fn from(event: Event) -> Self {
        event.members
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.members.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_space_examples() {
        let s = FiniteSpace::new(&[0.5, 0.5], None).unwrap();
        assert_eq!(s.weights(), &[0.5, 0.5]);
        let s = FiniteSpace::new(&[1.0], None).unwrap();
        assert_eq!(s.len(), 1);
        let s = FiniteSpace::new(&[0.2, 0.3, 0.5], None).unwrap();
        assert_eq!(s.prob(&Event::new([2])).unwrap(), 0.5);
    }

    #[test]
    fn make_space_errors() {
        assert_eq!(FiniteSpace::new(&[], None), Err(Error::EmptySpace));
        assert!(matches!(
            FiniteSpace::new(&[1.2, -0.2], None),
            Err(Error::NegativeWeight { index: 1, .. })
        ));
        assert!(matches!(
            FiniteSpace::new(&[0.5, 0.6], None),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            FiniteSpace::new(&[0.5, 0.5], Some(vec!["a".into(), "a".into()])),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let s = FiniteSpace::new(&[0.5 + 4e-10, 0.5], None).unwrap();
        let sum: f64 = s.weights().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn prob_examples() {
        let u4 = FiniteSpace::uniform(4).unwrap();
        assert_eq!(u4.prob(&Event::new([0, 1])).unwrap(), 0.5);
        assert_eq!(u4.prob(&Event::empty()).unwrap(), 0.0);
        let s = FiniteSpace::new(&[0.2, 0.3, 0.5], None).unwrap();
        assert!((s.prob(&Event::new([0, 2])).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(
            s.prob(&Event::new([3])),
            Err(Error::IndexOutOfRange { index: 3, size: 3 })
        );
    }

    #[test]
    fn sym_diff_examples() {
        let a = Event::new([0, 1]);
        let b = Event::new([1, 2]);
        assert_eq!(a.sym_diff(&b), Event::new([0, 2]));
        assert_eq!(a.sym_diff(&a), Event::empty());
        assert_eq!(Event::new([0]).sym_diff(&Event::empty()), Event::new([0]));
    }

    #[test]
    fn cond_prob_examples() {
        let u4 = FiniteSpace::uniform(4).unwrap();
        let eta = Partition::from_blocks(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(
            u4.cond_prob(&Event::new([0]), &eta).unwrap(),
            vec![0.5, 0.5, 0.0, 0.0]
        );
        assert_eq!(
            u4.cond_prob(&u4.full_event(), &eta).unwrap(),
            vec![1.0; 4]
        );
        assert_eq!(
            u4.cond_prob(&Event::empty(), &eta).unwrap(),
            vec![0.0; 4]
        );
    }

    #[test]
    fn cond_prob_zero_mass_block() {
        let s = FiniteSpace::new(&[0.5, 0.5, 0.0], None).unwrap();
        let eta = Partition::from_blocks(3, vec![vec![0, 1], vec![2]]).unwrap();
        let v = s.cond_prob(&Event::new([2]), &eta).unwrap();
        assert_eq!(v, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn exhaustive_sym_diff_identity() {
        for n in 1..=10usize {
            let weights: Vec<f64> = (1..=n).map(|k| k as f64).collect();
            let total: f64 = weights.iter().sum();
            let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let space = FiniteSpace::new(&weights, None).unwrap();
            let events: Vec<Event> = (0u32..1 << n)
                .map(|m| Event::new((0..n).filter(|&i| m >> i & 1 == 1)))
                .collect();
            for a in &events {
                for b in &events {
                    let lhs = space.prob(&a.sym_diff(b)).unwrap();
                    let rhs = space.prob(&a.union(b)).unwrap()
                        - space.prob(&a.intersection(b)).unwrap();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }
}
