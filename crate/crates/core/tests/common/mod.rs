//! Shared test corpus of finite spaces with filtrations.
#![allow(dead_code)]

use condent::partition::{refining_chain, GeneratorFamily};
use condent::{Event, Filtration, FiniteSpace, Partition};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod oracles;

pub struct Case {
    pub name: String,
    pub space: FiniteSpace,
    pub filtration: Filtration,
    /// The limit of the filtration.
    pub a: Partition,
    /// An arbitrary conditioning partition.
    pub eta: Partition,
}

fn normalized(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Splits one block with at least two elements into two nonempty parts.
fn split_once(p: &Partition, rng: &mut ChaCha8Rng) -> Option<Partition> {
    let splittable: Vec<usize> = (0..p.num_blocks())
        .filter(|&b| p.blocks()[b].len() >= 2)
        .collect();
    let &b = splittable.choose(rng)?;
    let block = &p.blocks()[b];
    let mut left: Vec<usize> = Vec::new();
    let mut right: Vec<usize> = Vec::new();
    for &i in block {
        if rng.random_bool(0.5) {
            left.push(i);
        } else {
            right.push(i);
        }
    }
    if left.is_empty() {
        left.push(right.pop().unwrap());
    } else if right.is_empty() {
        right.push(left.pop().unwrap());
    }
    let mut blocks: Vec<Vec<usize>> = p.blocks().to_vec();
    blocks[b] = left;
    blocks.push(right);
    Some(Partition::from_blocks(p.size(), blocks).unwrap())
}

/// A random refining chain from the trivial partition, `levels` long.
pub fn random_chain(n: usize, levels: usize, rng: &mut ChaCha8Rng) -> Vec<Partition> {
    let mut out = vec![Partition::trivial(n)];
    while out.len() < levels {
        match split_once(out.last().unwrap(), rng) {
            Some(next) => out.push(next),
            None => break,
        }
    }
    out
}

pub fn random_partition(n: usize, rng: &mut ChaCha8Rng) -> Partition {
    let k = rng.random_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_labels(&labels)
}

pub fn random_weights(n: usize, zeros: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    for i in 0..zeros.min(n - 1) {
        raw[(i * 3) % n] = 0.0;
    }
    normalized(&raw)
}

fn case(name: String, weights: Vec<f64>, levels: Vec<Partition>, eta: Partition) -> Case {
    let space = FiniteSpace::new(&weights, None).unwrap();
    let filtration = Filtration::new(levels, None).unwrap();
    let a = filtration.limit().clone();
    Case {
        name,
        space,
        filtration,
        a,
        eta,
    }
}

/// Every finite test case used by the acceptance suite, up to `max_n` outcomes.
pub fn corpus(max_n: usize) -> Vec<Case> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
    let mut out = Vec::new();

    let u4_levels = vec![
        Partition::trivial(4),
        Partition::from_blocks(4, vec![vec![0, 1], vec![2, 3]]).unwrap(),
        Partition::points(4),
    ];
    out.push(case(
        "uniform-4 halves".into(),
        vec![0.25; 4],
        u4_levels,
        Partition::from_blocks(4, vec![vec![0, 2], vec![1, 3]]).unwrap(),
    ));

    for n in 1..=max_n {
        let levels = random_chain(n, n, &mut rng);
        let eta = random_partition(n, &mut rng);
        out.push(case(format!("uniform-{n}"), vec![1.0 / n as f64; n], levels, eta));

        let skew: Vec<f64> = normalized(&(1..=n).map(|k| (k * k) as f64).collect::<Vec<_>>());
        let levels = random_chain(n, n.div_ceil(2) + 1, &mut rng);
        let eta = random_partition(n, &mut rng);
        out.push(case(format!("skewed-{n}"), skew, levels, eta));

        let w = random_weights(n, 0, &mut rng);
        let levels = random_chain(n, 1 + rng.random_range(0..n), &mut rng);
        let eta = random_partition(n, &mut rng);
        out.push(case(format!("random-{n}"), w, levels, eta));

        if n >= 3 {
            let w = random_weights(n, n / 3, &mut rng);
            let levels = random_chain(n, n, &mut rng);
            let eta = random_partition(n, &mut rng);
            out.push(case(format!("null-outcomes-{n}"), w, levels, eta));
        }
    }

    // Point mass at the all-ones path of {0,1}^3 with the filtration
    // generated by E_n = {x : x_k = 1 for k >= n}.
    if max_n >= 8 {
        let depth = 3;
        let mut w = vec![0.0; 8];
        w[7] = 1.0;
        let space = FiniteSpace::new(&w, None).unwrap();
        let sets: Vec<Event> = (1..=depth)
            .map(|n| {
                Event::new((0..8usize).filter(|&i| {
                    (n - 1..depth).all(|k| i >> (depth - 1 - k) & 1 == 1)
                }))
            })
            .collect();
        let chain = refining_chain(&space, &GeneratorFamily::new(sets)).unwrap();
        let levels = chain[1..].to_vec();
        out.push(case("dirac-3".into(), w, levels, Partition::trivial(8)));
    }
    out
}
