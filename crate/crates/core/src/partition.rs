//! Set partitions of a finite outcome set.
//!
//! A [`Partition`] stands in for a measurable partition and, through its atoms,
//! for the sub-σ-field it generates. Partitions are stored in canonical form:
//! elements inside a block are sorted and blocks are sorted by their smallest
//! element, so structural equality is partition equality.
//!
//! The order used throughout is refinement: `xi <= eta` when every block of
//! `xi` is a union of blocks of `eta`. [`join`] is the common refinement and
//! [`meet`] the finest common coarsening.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::space::{Event, FiniteSpace};

/// Largest set size accepted by [`enumerate_partitions`] (Bell(10) = 115975).
pub const MAX_ENUMERATION: usize = 10;

/// Largest `N` accepted by [`count_partitions`]; Bell(20) still fits in a `u64`.
pub const MAX_COUNT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
}

impl Partition {
    /// Builds a partition of `{0, .., n-1}` from arbitrary blocks, validating
    /// disjointness and coverage and putting the result in canonical form.
    pub fn from_blocks(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::IndexOutOfRange { index: i, size: n });
                }
                if owner[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "outcome {i} appears in more than one block"
                    )));
                }
                owner[i] = b;
            }
        }
        if let Some(i) = owner.iter().position(|&o| o == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "outcome {i} is not covered"
            )));
        }
        Ok(Self::from_labels(&owner))
    }

    /// Groups outcomes by equal label. Outcome `i` carries `labels[i]`.
    pub fn from_labels<L: Eq + Hash + Clone>(labels: &[L]) -> Self {
        let mut ids: HashMap<L, usize> = HashMap::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut block_of = Vec::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            let id = *ids.entry(label.clone()).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[id].push(i);
            block_of.push(id);
        }
        Partition { blocks, block_of }
    }

    /// The point partition: one singleton per outcome.
    pub fn points(n: usize) -> Self {
        Partition {
            blocks: (0..n).map(|i| vec![i]).collect(),
            block_of: (0..n).collect(),
        }
    }

    /// The trivial partition with a single block.
    pub fn trivial(n: usize) -> Self {
        if n == 0 {
            return Partition {
                blocks: Vec::new(),
                block_of: Vec::new(),
            };
        }
        Partition {
            blocks: vec![(0..n).collect()],
            block_of: vec![0; n],
        }
    }

    /// Number of outcomes partitioned.
    pub fn size(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Index of the block containing `outcome`.
    pub fn block_of(&self, outcome: usize) -> usize {
        self.block_of[outcome]
    }

    pub fn block_labels(&self) -> &[usize] {
        &self.block_of
    }

    pub fn check_size(&self, n: usize) -> Result<()> {
        if self.size() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                found: self.size(),
            });
        }
        Ok(())
    }

    /// Union of the listed blocks as an event.
    pub fn union_of_blocks(&self, block_ids: &[usize]) -> Event {
        Event::new(block_ids.iter().flat_map(|&b| self.blocks[b].iter().copied()))
    }

    /// Whether `event` is a union of blocks.
    pub fn is_measurable(&self, event: &Event) -> bool {
        let mut hits = vec![0usize; self.num_blocks()];
        for &i in event.members() {
            hits[self.block_of[i]] += 1;
        }
        hits.iter()
            .zip(&self.blocks)
            .all(|(&h, b)| h == 0 || h == b.len())
    }

    /// Parses the text format: one block per line, comma-separated outcome
    /// indices. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut blocks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let block = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<usize>().map_err(|e| {
                        Error::Parse(format!("line {}: {:?}: {e}", lineno + 1, tok.trim()))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        Self::from_blocks(n, blocks)
    }
}

impl fmt::Display for Partition {
    /// Writes the text format accepted by [`Partition::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            let line: Vec<String> = block.iter().map(|i| i.to_string()).collect();
            writeln!(f, "{}", line.join(","))?;
        }
        Ok(())
    }
}

pub fn point_partition(space: &FiniteSpace) -> Partition {
    Partition::points(space.len())
}

/// Tests `xi <= eta` up to null sets: zero-weight outcomes are ignored.
pub fn refines(space: &FiniteSpace, xi: &Partition, eta: &Partition) -> Result<bool> {
    xi.check_size(space.len())?;
    eta.check_size(space.len())?;
    Ok(refines_with(xi, eta, |i| space.weight(i) > 0.0))
}

/// Tests `xi <= eta` over every outcome, null or not.
pub fn refines_exact(xi: &Partition, eta: &Partition) -> bool {
    xi.size() == eta.size() && refines_with(xi, eta, |_| true)
}

fn refines_with(xi: &Partition, eta: &Partition, counts: impl Fn(usize) -> bool) -> bool {
    eta.blocks().iter().all(|block| {
        let mut owner = None;
        block.iter().filter(|&&i| counts(i)).all(|&i| {
            let b = xi.block_of(i);
            *owner.get_or_insert(b) == b
        })
    })
}

/// Common refinement: nonempty intersections of a `xi`-block with an `eta`-block.
pub fn join(xi: &Partition, eta: &Partition) -> Result<Partition> {
    eta.check_size(xi.size())?;
    let labels: Vec<(usize, usize)> = (0..xi.size())
        .map(|i| (xi.block_of(i), eta.block_of(i)))
        .collect();
    Ok(Partition::from_labels(&labels))
}

/// Finest common coarsening: connected components of the graph linking
/// outcomes that share a block of either partition.
pub fn meet(xi: &Partition, eta: &Partition) -> Result<Partition> {
    eta.check_size(xi.size())?;
    let mut uf = UnionFind::new(xi.size());
    for block in xi.blocks().iter().chain(eta.blocks()) {
        for pair in block.windows(2) {
            uf.union(pair[0], pair[1]);
        }
    }
    let labels: Vec<usize> = (0..xi.size()).map(|i| uf.find(i)).collect();
    Ok(Partition::from_labels(&labels))
}

/// Join of a nonempty list of partitions.
pub fn join_all<'a, I: IntoIterator<Item = &'a Partition>>(parts: I) -> Result<Partition> {
    let mut iter = parts.into_iter();
    let first = iter
        .next()
        .ok_or_else(|| Error::InvalidArgument("join of an empty list".into()))?
        .clone();
    iter.try_fold(first, |acc, p| join(&acc, p))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// An ordered family of generating sets `G_1, .., G_J`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeneratorFamily {
    sets: Vec<Event>,
}

impl GeneratorFamily {
    pub fn new(sets: Vec<Event>) -> Self {
        GeneratorFamily { sets }
    }

    pub fn sets(&self) -> &[Event] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    fn check(&self, size: usize) -> Result<()> {
        self.sets.iter().try_for_each(|e| e.check(size))
    }

    /// Membership pattern of every outcome across the first `count` sets,
    /// packed into 64-bit words.
    fn patterns(&self, size: usize, count: usize) -> Vec<Vec<u64>> {
        let words = count.div_ceil(64);
        let mut patterns = vec![vec![0u64; words]; size];
        for (j, set) in self.sets[..count].iter().enumerate() {
            for &i in set.members() {
                patterns[i][j / 64] |= 1 << (j % 64);
            }
        }
        patterns
    }
}

/// Atom partition of the σ-field generated by `gamma`: outcomes are grouped
/// by their membership pattern across the generators.
pub fn atoms_from_generators(space: &FiniteSpace, gamma: &GeneratorFamily) -> Result<Partition> {
    gamma.check(space.len())?;
    Ok(Partition::from_labels(&gamma.patterns(space.len(), gamma.len())))
}

/// Whether distinct outcomes of `event` always have distinct membership
/// patterns across `gamma`.
pub fn separates_points(space: &FiniteSpace, gamma: &GeneratorFamily, event: &Event) -> Result<bool> {
    gamma.check(space.len())?;
    event.check(space.len())?;
    let patterns = gamma.patterns(space.len(), gamma.len());
    let mut seen = std::collections::HashSet::with_capacity(event.len());
    Ok(event.members().iter().all(|&i| seen.insert(&patterns[i])))
}

/// Assembles a partition of the whole space from a partition of `event`
/// (given as blocks over the original indices) plus the complement block,
/// which is omitted when empty.
pub fn extend_with_complement(
    space: &FiniteSpace,
    event: &Event,
    blocks_of_event: &[Vec<usize>],
) -> Result<Partition> {
    event.check(space.len())?;
    let mut covered: Vec<usize> = blocks_of_event.iter().flatten().copied().collect();
    covered.sort_unstable();
    let before = covered.len();
    covered.dedup();
    if covered.len() != before || covered.as_slice() != event.members() {
        return Err(Error::InvalidPartition(
            "blocks do not partition the event exactly".into(),
        ));
    }
    let mut blocks = blocks_of_event.to_vec();
    let rest = event.complement(space.len());
    if !rest.is_empty() {
        blocks.push(rest.members().to_vec());
    }
    Partition::from_blocks(space.len(), blocks)
}

/// `chain[n]` is the atom partition generated by the first `n` sets of `gamma`,
/// for `n = 0, .., J`.
pub fn refining_chain(space: &FiniteSpace, gamma: &GeneratorFamily) -> Result<Vec<Partition>> {
    gamma.check(space.len())?;
    Ok((0..=gamma.len())
        .map(|n| Partition::from_labels(&gamma.patterns(space.len(), n)))
        .collect())
}

/// An increasing sequence of partitions with a designated limit.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    levels: Vec<Partition>,
    limit: Partition,
}

impl Filtration {
    /// Validates that every level refines the previous one and that the limit
    /// refines the last level. With `limit = None` the join of all levels is used.
    pub fn new(levels: Vec<Partition>, limit: Option<Partition>) -> Result<Self> {
        let last = levels
            .last()
            .ok_or_else(|| Error::InvalidFiltration("no levels".into()))?;
        let n = last.size();
        for (k, level) in levels.iter().enumerate() {
            if level.size() != n {
                return Err(Error::InvalidFiltration(format!(
                    "level {} has {} outcomes, expected {n}",
                    k + 1,
                    level.size()
                )));
            }
        }
        for (k, pair) in levels.windows(2).enumerate() {
            if !refines_exact(&pair[0], &pair[1]) {
                return Err(Error::InvalidFiltration(format!(
                    "level {} does not refine level {}",
                    k + 2,
                    k + 1
                )));
            }
        }
        let limit = match limit {
            Some(limit) => {
                if !refines_exact(last, &limit) {
                    return Err(Error::InvalidFiltration(
                        "limit does not refine the last level".into(),
                    ));
                }
                limit
            }
            None => join_all(&levels)?,
        };
        Ok(Filtration { levels, limit })
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    /// Level `n`, 1-indexed.
    pub fn level(&self, n: usize) -> Option<&Partition> {
        n.checked_sub(1).and_then(|k| self.levels.get(k))
    }

    pub fn limit(&self) -> &Partition {
        &self.limit
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn size(&self) -> usize {
        self.limit.size()
    }
}

/// Bell number and Stirling numbers of the second kind `S(N, k)`, `k = 0..=N`,
/// from the triangle recurrence `S(n, k) = k S(n-1, k) + S(n-1, k-1)`.
pub fn count_partitions(n: usize) -> Result<(u64, Vec<u64>)> {
    if n == 0 || n > MAX_COUNT {
        return Err(Error::OutOfRange {
            what: "N",
            value: n,
            range: "1..=20",
        });
    }
    let mut row = vec![1u64];
    for m in 1..=n {
        let mut next = vec![0u64; m + 1];
        for k in 1..=m {
            let carry = if k < m { k as u64 * row[k] } else { 0 };
            next[k] = carry + row[k - 1];
        }
        row = next;
    }
    Ok((row.iter().sum(), row))
}

/// Every partition of `{0, .., n-1}`, in restricted-growth-string order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_ENUMERATION {
        return Err(Error::OutOfRange {
            what: "N",
            value: n,
            range: "1..=10",
        });
    }
    let mut out = Vec::new();
    // a[i] is the block label of outcome i; a[i] <= 1 + max(a[..i])
    let mut a = vec![0usize; n];
    let mut max = vec![0usize; n];
    loop {
        out.push(Partition::from_labels(&a));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            if a[i] <= max[i - 1] {
                a[i] += 1;
                max[i] = max[i - 1].max(a[i]);
                for j in i + 1..n {
                    a[j] = 0;
                    max[j] = max[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Every partition whose blocks are unions of blocks of `a`, i.e. every
/// coarsening of `a` including `a` itself.
pub fn coarsenings(a: &Partition) -> Result<Vec<Partition>> {
    let groups = enumerate_partitions(a.num_blocks())?;
    Ok(groups
        .iter()
        .map(|g| {
            let labels: Vec<usize> = (0..a.size()).map(|i| g.block_of(a.block_of(i))).collect();
            Partition::from_labels(&labels)
        })
        .collect())
}
