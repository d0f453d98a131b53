//! Conditional entropy of partitions on finite probability spaces, with the
//! tooling around it: partition lattices, set approximation along a
//! filtration, and martingale-family diagnostics including likelihood-ratio
//! martingales and grid maximum-likelihood consistency experiments.
//!
//! Sub-σ-fields are always passed around as their atom partitions; on a
//! finite space the two are in one-to-one correspondence.

pub mod approximation;
pub mod cli;
pub mod entropy;
pub mod error;
pub mod martingale;
pub mod partition;
pub mod space;

pub use error::{Error, Result};
pub use partition::{Filtration, GeneratorFamily, Partition};
pub use space::{Event, FiniteSpace};
