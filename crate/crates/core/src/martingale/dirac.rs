use crate::entropy::{cond_entropy, max_cond_entropy};
use crate::error::{Error, Result};
use crate::partition::{coarsenings, refining_chain, Filtration, GeneratorFamily, MAX_ENUMERATION};
use crate::space::Event;

use super::doob::DoobMartingale;
use super::paths::PathSpace;
use super::{MartingaleFamily, ParamBox};

/// Largest depth accepted by [`dirac_entropy_demo`].
pub const MAX_DIRAC_DEPTH: usize = 16;

/// Parameters of the terminal family used in the martingale table.
pub const DIRAC_THETAS: [f64; 3] = [0.0, 0.5, 1.0];

/// One value of a Doob martingale along the all-ones path.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracRow {
    pub theta: f64,
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracDemo {
    pub depth: usize,
    /// `sup_ξ H(ξ | a_1)` over partitions with atoms from `a`.
    pub entropy_value: f64,
    /// The same supremum computed by enumerating every coarsening of `a`,
    /// when `a` is small enough.
    pub exhaustive_value: Option<f64>,
    /// `sup_ξ H(ξ | a_n)` for `n = 1..=depth`.
    pub level_values: Vec<f64>,
    pub atoms: usize,
    pub table: Vec<DiracRow>,
    /// Every row with `n >= 1` equals the row at `n = 1` for its theta.
    pub constant_after_first: bool,
}

/// Doob family of the terminals `theta * (share of ones) + (1 - theta) * x_1`
/// over the coordinate filtration of `paths`, bounded by 1.
pub fn dirac_family(paths: PathSpace) -> Result<DoobMartingale> {
    let depth = paths.depth() as f64;
    DoobMartingale::coordinate(
        paths,
        move |t, p| {
            let frac = p.iter().filter(|&&s| s == 1).count() as f64 / depth;
            t[0] * frac + (1.0 - t[0]) * p[0] as f64
        },
        ParamBox::interval(0.0, 1.0)?,
        Some(1.0),
    )
}

/// Point mass at the all-ones path of `{0,1}^depth`.
///
/// The filtration is generated by `E_n = {x : x_k = 1 for all k >= n}`, whose
/// limit `a` separates the sets `E_1, E_2 \ E_1, ..`. Every conditional
/// entropy vanishes because the law charges a single outcome. The martingale
/// table runs a Doob family over the coordinate filtration along the charged
/// path.
pub fn dirac_entropy_demo(depth: usize) -> Result<DiracDemo> {
    if depth == 0 || depth > MAX_DIRAC_DEPTH {
        return Err(Error::OutOfRange {
            what: "dirac depth",
            value: depth,
            range: "1..=16",
        });
    }
    let ones = vec![1usize; depth];
    let paths = PathSpace::dirac(2, depth, &ones)?;
    let space = paths.space();

    let sets: Vec<Event> = (1..=depth)
        .map(|n| {
            Event::new((0..paths.len()).filter(|&i| {
                let p = paths.path_of(i);
                p[n - 1..].iter().all(|&s| s == 1)
            }))
        })
        .collect();
    let chain = refining_chain(space, &GeneratorFamily::new(sets))?;
    let filtration = Filtration::new(chain[1..].to_vec(), None)?;
    let a = filtration.limit();
    let first = filtration.level(1).expect("depth >= 1");

    let entropy_value = max_cond_entropy(space, a, first)?.value;
    let exhaustive_value = if a.num_blocks() <= MAX_ENUMERATION {
        let mut best = 0.0f64;
        for xi in coarsenings(a)? {
            best = best.max(cond_entropy(space, &xi, first)?.value);
        }
        Some(best)
    } else {
        None
    };
    let level_values = filtration
        .levels()
        .iter()
        .map(|level| Ok(max_cond_entropy(space, a, level)?.value))
        .collect::<Result<Vec<f64>>>()?;

    let doob = dirac_family(paths.clone())?;
    let mut table = Vec::new();
    for &theta in &DIRAC_THETAS {
        for n in 0..=depth {
            table.push(DiracRow {
                theta,
                n,
                value: doob.evaluate(&[theta], n, &ones)?,
            });
        }
    }
    let constant_after_first = table.chunks(depth + 1).all(|rows| {
        let first = rows[1].value;
        rows[1..].iter().all(|r| r.value == first)
    });

    Ok(DiracDemo {
        depth,
        entropy_value,
        exhaustive_value,
        level_values,
        atoms: a.num_blocks(),
        table,
        constant_after_first,
    })
}
