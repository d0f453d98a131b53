//! Brute-force reference implementations, independent of the library code
//! paths they check.

use condent::{Event, FiniteSpace, Partition};

pub fn same_block(p: &Partition, x: usize, y: usize) -> bool {
    p.block_of(x) == p.block_of(y)
}

/// Join by pairwise comparison.
pub fn join(xi: &Partition, eta: &Partition) -> Partition {
    let n = xi.size();
    let labels: Vec<usize> = (0..n)
        .map(|x| (0..=x).find(|&y| same_block(xi, x, y) && same_block(eta, x, y)).unwrap())
        .collect();
    Partition::from_labels(&labels)
}

/// Meet as the transitive closure of "shares a block of either".
pub fn meet(xi: &Partition, eta: &Partition) -> Partition {
    let n = xi.size();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|x| (0..n).map(|y| same_block(xi, x, y) || same_block(eta, x, y)).collect())
        .collect();
    for k in 0..n {
        for x in 0..n {
            for y in 0..n {
                reach[x][y] = reach[x][y] || (reach[x][k] && reach[k][y]);
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|x| (0..=x).find(|&y| reach[x][y]).unwrap()).collect();
    Partition::from_labels(&labels)
}

/// `-Σ_x w(x) ln P(ξ(x) | η)(x)`, through conditional probabilities.
pub fn entropy(space: &FiniteSpace, xi: &Partition, eta: &Partition) -> f64 {
    let mut h = 0.0;
    for block in xi.blocks() {
        let cp = space.cond_prob(&Event::new(block.iter().copied()), eta).unwrap();
        for &x in block {
            let w = space.weight(x);
            if w > 0.0 {
                h -= w * cp[x].ln();
            }
        }
    }
    h
}

/// Bell numbers `B_1..=B_count` from the Bell triangle.
pub fn bell_numbers(count: usize) -> Vec<u64> {
    let mut row = vec![1u64];
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(*row.last().unwrap());
        let mut next = vec![*row.last().unwrap()];
        for &v in &row {
            next.push(next.last().unwrap() + v);
        }
        row = next;
    }
    out
}

/// Smallest `P(A △ U)` over every union `U` of blocks of `a_n`, summing
/// per-block contributions over all `2^k` subsets.
pub fn best_error(space: &FiniteSpace, event: &Event, a_n: &Partition) -> f64 {
    // inside[b] = P(C_b \ A) is paid when C_b is taken, outside[b] = P(A ∩ C_b) when not
    let k = a_n.num_blocks();
    let mut inside = vec![0.0; k];
    let mut outside = vec![0.0; k];
    for x in 0..space.len() {
        let b = a_n.block_of(x);
        if event.contains(x) {
            outside[b] += space.weight(x);
        } else {
            inside[b] += space.weight(x);
        }
    }
    (0..1u64 << k)
        .map(|mask| {
            (0..k)
                .map(|b| if mask >> b & 1 == 1 { inside[b] } else { outside[b] })
                .sum::<f64>()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Every union of `a`-blocks.
pub fn a_sets(a: &Partition) -> Vec<Event> {
    let k = a.num_blocks();
    (0..1u64 << k)
        .map(|mask| a.union_of_blocks(&(0..k).filter(|&b| mask >> b & 1 == 1).collect::<Vec<_>>()))
        .collect()
}
