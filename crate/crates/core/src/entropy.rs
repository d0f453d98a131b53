//! Conditional entropy of partitions and maximal conditional entropy.
//!
//! For partitions `xi`, `eta` of a finite space
//!
//! ```text
//! H(xi | eta) = sum_C P(C) sum_A -(P(A ∩ C) / P(C)) ln(P(A ∩ C) / P(C))
//! ```
//!
//! with `A` ranging over `xi`, `C` over `eta`, `0 ln 0 = 0`, and zero-mass
//! `eta` blocks contributing nothing. Values are in nats.
//!
//! On a finite space, every partition with atoms from `a` is a coarsening of
//! `a`, and conditional entropy is monotone under refinement of its first
//! argument, so the supremum over those partitions is attained at `a`.
//! [`max_cond_entropy`] uses that directly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::partition::{Filtration, Partition};
use crate::space::FiniteSpace;

/// Slack used when checking monotone sequences of entropies.
pub const MONOTONE_SLACK: f64 = 1e-12;

/// Increment below which a depth table is declared convergent.
pub const CONVERGENCE_INCREMENT: f64 = 1e-4;

/// Default ceiling (nats) above which a still-increasing table is declared diverging.
pub const DEFAULT_CEILING: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct EntropyReport {
    /// `H(xi | eta)` in nats.
    pub value: f64,
    /// Contribution of each `eta` block, in `eta`'s canonical block order.
    pub by_block: Vec<f64>,
    /// `(|xi|, |eta|)`.
    pub partition_sizes: (usize, usize),
}

impl EntropyReport {
    pub fn value_in(&self, units: Units) -> f64 {
        units.convert(self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

/// Conditional entropy `H(xi | eta)`.
pub fn cond_entropy(space: &FiniteSpace, xi: &Partition, eta: &Partition) -> Result<EntropyReport> {
    xi.check_size(space.len())?;
    eta.check_size(space.len())?;
    let mut mass = vec![0.0f64; xi.num_blocks()];
    // seen[a] is the last eta-block that touched xi-block a, plus one
    let mut seen = vec![0usize; xi.num_blocks()];
    let mut touched: Vec<usize> = Vec::new();
    let mut by_block = Vec::with_capacity(eta.num_blocks());
    for (c, block) in eta.blocks().iter().enumerate() {
        for &i in block {
            let a = xi.block_of(i);
            if seen[a] != c + 1 {
                seen[a] = c + 1;
                touched.push(a);
            }
            mass[a] += space.weight(i);
        }
        let total: f64 = touched.iter().map(|&a| mass[a]).sum();
        let mut h = 0.0;
        if total > 0.0 {
            for &a in &touched {
                let m = mass[a];
                if m > 0.0 {
                    let ratio = (m / total).min(1.0);
                    h -= m * ratio.ln();
                }
            }
        }
        for &a in &touched {
            mass[a] = 0.0;
        }
        touched.clear();
        by_block.push(h.max(0.0));
    }
    let value = by_block.iter().sum();
    Ok(EntropyReport {
        value,
        by_block,
        partition_sizes: (xi.num_blocks(), eta.num_blocks()),
    })
}

/// Supremum of `H(xi | eta)` over finite partitions `xi` with atoms from `a`.
pub fn max_cond_entropy(space: &FiniteSpace, a: &Partition, eta: &Partition) -> Result<EntropyReport> {
    cond_entropy(space, a, eta)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MartinVerdict {
    /// Some level has finite maximal conditional entropy; `level` (1-indexed)
    /// is the first level attaining the smallest value.
    Bounded { level: usize, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MartinReport {
    /// One report per filtration level, level 1 first.
    pub levels: Vec<EntropyReport>,
    pub verdict: MartinVerdict,
    /// Whether the per-level values are nonincreasing (up to [`MONOTONE_SLACK`]).
    pub nonincreasing: bool,
}

/// Maximal conditional entropy of `a` given each level of the filtration.
pub fn martin_condition_report(
    space: &FiniteSpace,
    filtration: &Filtration,
    a: &Partition,
) -> Result<MartinReport> {
    filtration.limit().check_size(space.len())?;
    a.check_size(space.len())?;
    let levels = filtration
        .levels()
        .iter()
        .map(|level| max_cond_entropy(space, a, level))
        .collect::<Result<Vec<_>>>()?;
    let (mut best, mut best_value) = (0, f64::INFINITY);
    for (k, r) in levels.iter().enumerate() {
        if r.value < best_value {
            best = k;
            best_value = r.value;
        }
    }
    let nonincreasing = levels
        .windows(2)
        .all(|w| w[1].value <= w[0].value + MONOTONE_SLACK);
    Ok(MartinReport {
        levels,
        verdict: MartinVerdict::Bounded {
            level: best + 1,
            value: best_value,
        },
        nonincreasing,
    })
}

/// Weight sequence on the positive integers.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule {
    /// `weight(k) = p (1 - p)^(k - 1)`.
    Geometric { p: f64 },
    /// `weight(k) ∝ 1 / (k ln²(k + 1))`; infinite entropy.
    HeavyTail(HeavyTail),
    /// All mass on `k = 1`.
    PointMass,
}

impl TailRule {
    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "geometric parameter {p} not in (0, 1]"
            )));
        }
        Ok(TailRule::Geometric { p })
    }

    pub fn heavy_tail() -> Self {
        TailRule::HeavyTail(HeavyTail::new())
    }

    /// Weight of outcome `k >= 1`.
    pub fn weight(&self, k: u64) -> f64 {
        match self {
            TailRule::Geometric { p } => p * (1.0 - p).powf((k - 1) as f64),
            TailRule::HeavyTail(h) => h.term(k as f64) / h.normalizer,
            TailRule::PointMass => {
                if k == 1 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Mass of `{k : k > depth}`.
    pub fn tail_mass(&self, depth: u64) -> f64 {
        match self {
            TailRule::Geometric { p } => (1.0 - p).powf(depth as f64),
            TailRule::HeavyTail(h) => h.tail_sum(depth) / h.normalizer,
            TailRule::PointMass => {
                if depth == 0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// The sequence `1 / (k ln²(k + 1))`, normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavyTail {
    normalizer: f64,
}

impl Default for HeavyTail {
    fn default() -> Self {
        Self::new()
    }
}

impl HeavyTail {
    /// Below this index tail sums are accumulated term by term.
    const SWITCH: u64 = 10_000;

    pub fn new() -> Self {
        let mut h = HeavyTail { normalizer: 1.0 };
        h.normalizer = h.tail_sum(0);
        h
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    fn term(&self, x: f64) -> f64 {
        let l = (x + 1.0).ln();
        1.0 / (x * l * l)
    }

    fn term_derivative(&self, x: f64) -> f64 {
        let l = (x + 1.0).ln();
        -1.0 / (x * x * l * l) - 2.0 / (x * (x + 1.0) * l * l * l)
    }

    /// Unnormalized `sum_{k > depth} term(k)`.
    fn tail_sum(&self, depth: u64) -> f64 {
        let start = depth + 1;
        if start >= Self::SWITCH {
            return self.euler_maclaurin_tail(start);
        }
        // smallest terms first
        let mut s = self.euler_maclaurin_tail(Self::SWITCH);
        for k in (start..Self::SWITCH).rev() {
            s += self.term(k as f64);
        }
        s
    }

    /// `sum_{k >= m} term(k) ≈ ∫_m^∞ term + term(m)/2 - term'(m)/12`.
    fn euler_maclaurin_tail(&self, m: u64) -> f64 {
        let x = m as f64;
        self.integral_from(x) + self.term(x) / 2.0 - self.term_derivative(x) / 12.0
    }

    /// `∫_x^∞ dt / (t ln²(t + 1))`. With `u = ln(t + 1)` this is
    /// `1/a + ∫_a^∞ e^{-u} / ((1 - e^{-u}) u²) du`, `a = ln(x + 1)`; the
    /// remainder decays like `e^{-u}` and is integrated by Simpson's rule.
    fn integral_from(&self, x: f64) -> f64 {
        let a = (x + 1.0).ln();
        let g = |v: f64| {
            let u = a + v;
            let e = (-u).exp();
            e / ((1.0 - e) * u * u)
        };
        let (upper, panels) = (40.0, 8000usize);
        let h = upper / panels as f64;
        let mut s = g(0.0) + g(upper);
        for i in 1..panels {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(i as f64 * h);
        }
        1.0 / a + s * h / 3.0
    }
}

/// Conditioning partition of the positive integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaRule {
    Trivial,
    Points,
    /// Consecutive blocks `{(j-1)b + 1, .., jb}`.
    Blocks { size: u64 },
}

impl EtaRule {
    fn check(self) -> Result<()> {
        if let EtaRule::Blocks { size: 0 } = self {
            return Err(Error::InvalidArgument("block size must be positive".into()));
        }
        Ok(())
    }
}

/// A countable space truncated at a depth `D`: outcomes `1..=D` plus one
/// lumped atom carrying the residual mass.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedCountableModel {
    pub rule: TailRule,
}

impl TruncatedCountableModel {
    pub fn new(rule: TailRule) -> Self {
        TruncatedCountableModel { rule }
    }

    /// Depth-`D` space; outcome index `k - 1` is the integer `k`, index `D`
    /// is the lumped tail.
    pub fn space(&self, depth: u64) -> Result<FiniteSpace> {
        let mut weights: Vec<f64> = (1..=depth).map(|k| self.rule.weight(k)).collect();
        weights.push(self.rule.tail_mass(depth).max(0.0));
        FiniteSpace::new(&weights, None)
    }

    /// The depth-`from` point partition seen inside the depth-`into` space:
    /// integers above `from` share a block with the tail.
    pub fn lumped_point_partition(&self, from: u64, into: u64) -> Result<Partition> {
        if from > into {
            return Err(Error::InvalidArgument(format!(
                "cannot view depth {from} inside depth {into}"
            )));
        }
        let labels: Vec<u64> = (1..=into + 1).map(|k| k.min(from + 1)).collect();
        Ok(Partition::from_labels(&labels))
    }

    /// `H(eps_D | eta)` with `eta` fixed on the positive integers and `eps_D`
    /// the depth-`D` lumped point partition.
    pub fn entropy_at(&self, depth: u64, eta: EtaRule) -> Result<f64> {
        eta.check()?;
        let w = |k: u64| self.rule.weight(k);
        let xlogx = |m: f64, total: f64| {
            if m > 0.0 && total > 0.0 {
                -m * (m / total).min(1.0).ln()
            } else {
                0.0
            }
        };
        let h = match eta {
            EtaRule::Points => 0.0,
            EtaRule::Trivial => {
                let tail = self.rule.tail_mass(depth);
                // smallest terms first
                let mut s = xlogx(tail, 1.0);
                for k in (1..=depth).rev() {
                    s += xlogx(w(k), 1.0);
                }
                s
            }
            EtaRule::Blocks { size } => {
                let mut s = 0.0;
                let mut start = 1;
                while start <= depth {
                    let end = start + size - 1;
                    let inside: Vec<f64> = (start..=end.min(depth)).map(w).collect();
                    let rest: f64 = (depth + 1..=end).map(w).sum();
                    let total: f64 = inside.iter().sum::<f64>() + rest;
                    s += xlogx(rest, total);
                    s += inside.iter().map(|&m| xlogx(m, total)).sum::<f64>();
                    start = end + 1;
                }
                s
            }
        };
        Ok(h.max(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitVerdict {
    Convergent,
    Diverging,
    /// Neither criterion met.
    Undetermined,
}

impl LimitVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            LimitVerdict::Convergent => "convergent",
            LimitVerdict::Diverging => "diverging",
            LimitVerdict::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub depth: u64,
    pub entropy: f64,
    /// Change from the previous row; `None` on the first row.
    pub increment: Option<f64>,
    /// Verdict for the table ending at this row.
    pub verdict: LimitVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitDiagnostic {
    pub rows: Vec<LimitRow>,
    pub nondecreasing: bool,
    pub verdict: LimitVerdict,
}

fn classify(increment: Option<f64>, value: f64, ceiling: f64) -> LimitVerdict {
    match increment {
        Some(inc) if inc < CONVERGENCE_INCREMENT => LimitVerdict::Convergent,
        Some(inc) if inc > 0.0 && value > ceiling => LimitVerdict::Diverging,
        _ => LimitVerdict::Undetermined,
    }
}

/// Tabulates `H(eps_D | eta)` across increasing depths. Depths are evaluated
/// in parallel; each depth is independent so the table does not depend on
/// scheduling.
pub fn entropy_limit_diagnostic(
    model: &TruncatedCountableModel,
    eta: EtaRule,
    depths: &[u64],
    ceiling: f64,
) -> Result<LimitDiagnostic> {
    eta.check()?;
    if depths.is_empty() {
        return Err(Error::InvalidArgument("no depths given".into()));
    }
    if depths[0] == 0 || depths.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "depths must be positive and strictly increasing".into(),
        ));
    }
    let values = depths
        .par_iter()
        .map(|&d| model.entropy_at(d, eta))
        .collect::<Result<Vec<f64>>>()?;
    let mut rows = Vec::with_capacity(depths.len());
    for (k, (&depth, &entropy)) in depths.iter().zip(&values).enumerate() {
        let increment = k.checked_sub(1).map(|j| entropy - values[j]);
        rows.push(LimitRow {
            depth,
            entropy,
            increment,
            verdict: classify(increment, entropy, ceiling),
        });
    }
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK);
    let verdict = rows.last().map(|r| r.verdict).unwrap_or(LimitVerdict::Undetermined);
    Ok(LimitDiagnostic {
        rows,
        nondecreasing,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::refines;
    use std::f64::consts::LN_2;

    fn p(n: usize, blocks: &[&[usize]]) -> Partition {
        Partition::from_blocks(n, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    #[test]
    fn null_outcome_before_its_block_is_not_counted_twice() {
        let space = FiniteSpace::new(&[0.0, 1.0], None).unwrap();
        let t = Partition::trivial(2);
        assert_eq!(cond_entropy(&space, &t, &t).unwrap().value, 0.0);
        let space = FiniteSpace::new(&[0.0, 0.5, 0.5], None).unwrap();
        let xi = p(3, &[&[0, 1], &[2]]);
        let h = cond_entropy(&space, &xi, &Partition::trivial(3)).unwrap().value;
        assert!((h - LN_2).abs() < 1e-15);
    }

    #[test]
    fn cond_entropy_examples() {
        let u2 = FiniteSpace::uniform(2).unwrap();
        let r = cond_entropy(&u2, &Partition::points(2), &Partition::trivial(2)).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);

        let s = FiniteSpace::new(&[0.1, 0.2, 0.7], None).unwrap();
        let r = cond_entropy(&s, &Partition::trivial(3), &Partition::points(3)).unwrap();
        assert_eq!(r.value, 0.0);

        let u4 = FiniteSpace::uniform(4).unwrap();
        let eta = p(4, &[&[0, 1], &[2, 3]]);
        let r = cond_entropy(&u4, &Partition::points(4), &eta).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(r.by_block.len(), 2);
        assert!((r.by_block[0] - LN_2 / 2.0).abs() < 1e-15);
        assert_eq!(r.partition_sizes, (4, 2));
    }

    #[test]
    fn cond_entropy_rejects_mismatched_sizes() {
        let u4 = FiniteSpace::uniform(4).unwrap();
        assert!(cond_entropy(&u4, &Partition::points(3), &Partition::trivial(4)).is_err());
    }

    #[test]
    fn bits_conversion() {
        let u2 = FiniteSpace::uniform(2).unwrap();
        let r = cond_entropy(&u2, &Partition::points(2), &Partition::trivial(2)).unwrap();
        assert!((r.value_in(Units::Bits) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn max_cond_entropy_examples() {
        let u4 = FiniteSpace::uniform(4).unwrap();
        let r = max_cond_entropy(&u4, &Partition::points(4), &Partition::trivial(4)).unwrap();
        assert!((r.value - 4f64.ln()).abs() < 1e-15);
        assert!((r.value - 1.386294).abs() < 1e-6);
        let r = max_cond_entropy(&u4, &Partition::trivial(4), &p(4, &[&[0, 1], &[2, 3]])).unwrap();
        assert_eq!(r.value, 0.0);
        let r = max_cond_entropy(&u4, &p(4, &[&[0, 1], &[2, 3]]), &Partition::points(4)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn martin_report_examples() {
        let u4 = FiniteSpace::uniform(4).unwrap();
        let levels = vec![
            Partition::trivial(4),
            p(4, &[&[0, 1], &[2, 3]]),
            Partition::points(4),
        ];
        let f = Filtration::new(levels, None).unwrap();
        let r = martin_condition_report(&u4, &f, &Partition::points(4)).unwrap();
        let values: Vec<f64> = r.levels.iter().map(|l| l.value).collect();
        assert!((values[0] - 4f64.ln()).abs() < 1e-15);
        assert!((values[1] - LN_2).abs() < 1e-15);
        assert_eq!(values[2], 0.0);
        assert!(r.nonincreasing);
        assert_eq!(r.verdict, MartinVerdict::Bounded { level: 3, value: 0.0 });

        let a = p(4, &[&[0, 1], &[2, 3]]);
        let f = Filtration::new(vec![a.clone(), a.clone()], None).unwrap();
        let r = martin_condition_report(&u4, &f, &a).unwrap();
        assert!(r.levels.iter().all(|l| l.value == 0.0));
        assert_eq!(r.verdict, MartinVerdict::Bounded { level: 1, value: 0.0 });
    }

    #[test]
    fn zero_entropy_iff_refines_on_fixed_cases() {
        let s = FiniteSpace::new(&[0.5, 0.5, 0.0], None).unwrap();
        let xi = p(3, &[&[0], &[1, 2]]);
        let eta = p(3, &[&[0, 2], &[1]]);
        assert!(refines(&s, &xi, &eta).unwrap());
        assert_eq!(cond_entropy(&s, &xi, &eta).unwrap().value, 0.0);
    }

    /// Entropy of the geometric law by its closed form.
    fn geometric_entropy(p: f64) -> f64 {
        let q = 1.0 - p;
        (-p * p.ln() - q * q.ln()) / p
    }

    #[test]
    fn geometric_limit_matches_closed_form() {
        let model = TruncatedCountableModel::new(TailRule::geometric(0.5).unwrap());
        let depths: Vec<u64> = (1..=60).collect();
        let d = entropy_limit_diagnostic(&model, EtaRule::Trivial, &depths, DEFAULT_CEILING).unwrap();
        assert!(d.nondecreasing);
        let last = d.rows.last().unwrap().entropy;
        assert!((geometric_entropy(0.5) - 2.0 * LN_2).abs() < 1e-15);
        assert!((last - 2.0 * LN_2).abs() < 1e-6);
        assert_eq!(d.verdict, LimitVerdict::Convergent);

        // partial-sum oracle at each depth: -sum w ln w - r ln r
        for row in &d.rows {
            let mut h = 0.0;
            for k in 1..=row.depth {
                let w = 0.5f64.powi(k as i32);
                h -= w * w.ln();
            }
            let r = 0.5f64.powi(row.depth as i32);
            h -= r * r.ln();
            assert!((row.entropy - h).abs() < 1e-13, "depth {}", row.depth);
        }
    }

    #[test]
    fn geometric_other_parameter() {
        let model = TruncatedCountableModel::new(TailRule::geometric(0.3).unwrap());
        let h = model.entropy_at(200, EtaRule::Trivial).unwrap();
        assert!((h - geometric_entropy(0.3)).abs() < 1e-12);
    }

    #[test]
    fn point_mass_model_is_zero() {
        let model = TruncatedCountableModel::new(TailRule::PointMass);
        let d = entropy_limit_diagnostic(&model, EtaRule::Trivial, &[1, 2, 5, 10], DEFAULT_CEILING).unwrap();
        assert!(d.rows.iter().all(|r| r.entropy == 0.0));
    }

    #[test]
    fn diagnostic_agrees_with_cond_entropy_on_lumped_space() {
        for rule in [TailRule::geometric(0.4).unwrap(), TailRule::heavy_tail()] {
            let model = TruncatedCountableModel::new(rule);
            for depth in [1u64, 3, 7, 20] {
                let space = model.space(depth).unwrap();
                let n = space.len();
                let direct = cond_entropy(&space, &Partition::points(n), &Partition::trivial(n))
                    .unwrap()
                    .value;
                let via_model = model.entropy_at(depth, EtaRule::Trivial).unwrap();
                assert!((direct - via_model).abs() < 1e-13);
                assert_eq!(model.entropy_at(depth, EtaRule::Points).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn block_rule_matches_finite_computation() {
        // With eta made of blocks of size 3 and depth 7, refine the lumped
        // space so that eta is a partition of it, then compare.
        let model = TruncatedCountableModel::new(TailRule::geometric(0.5).unwrap());
        let w = |k: u64| model.rule.weight(k);
        // outcomes 1..=7, then {8, 9} (rest of block 3), then {10, ..}
        let mut weights: Vec<f64> = (1..=7).map(w).collect();
        weights.push(w(8) + w(9));
        weights.push(model.rule.tail_mass(9));
        let space = FiniteSpace::new(&weights, None).unwrap();
        let eps = Partition::from_blocks(
            9,
            (0..7).map(|i| vec![i]).chain([vec![7, 8]]).collect(),
        )
        .unwrap();
        let eta = p(9, &[&[0, 1, 2], &[3, 4, 5], &[6, 7], &[8]]);
        let direct = cond_entropy(&space, &eps, &eta).unwrap().value;
        let via_model = model.entropy_at(7, EtaRule::Blocks { size: 3 }).unwrap();
        assert!((direct - via_model).abs() < 1e-14);
    }

    #[test]
    fn block_rule_is_monotone() {
        let model = TruncatedCountableModel::new(TailRule::heavy_tail());
        let depths: Vec<u64> = (1..=40).collect();
        let d = entropy_limit_diagnostic(&model, EtaRule::Blocks { size: 4 }, &depths, DEFAULT_CEILING)
            .unwrap();
        assert!(d.nondecreasing);
    }

    #[test]
    fn lumped_spaces_refine() {
        let model = TruncatedCountableModel::new(TailRule::geometric(0.5).unwrap());
        for d in 1..6u64 {
            let coarse = model.lumped_point_partition(d, d + 1).unwrap();
            let fine = model.space(d + 1).unwrap();
            let pts = Partition::points(fine.len());
            assert!(crate::partition::refines_exact(&coarse, &pts));
            assert_ne!(coarse, pts);
            // the lumped space's weights aggregate correctly
            let coarse_space = model.space(d).unwrap();
            let tail = fine.weight(d as usize) + fine.weight(d as usize + 1);
            assert!((coarse_space.weight(d as usize) - tail).abs() < 1e-15);
        }
    }

    #[test]
    fn heavy_tail_normalization() {
        let h = HeavyTail::new();
        // independent estimate: 30-digit partial sum to 999 plus an
        // Euler-Maclaurin tail with adaptive quadrature (mpmath)
        assert!((h.normalizer() - 3.387735531952002).abs() < 1e-11);
        let rule = TailRule::heavy_tail();
        for depth in [0u64, 1, 10, 9_999, 10_000, 123_456] {
            let s: f64 = (1..=depth).map(|k| rule.weight(k)).sum::<f64>() + rule.tail_mass(depth);
            assert!((s - 1.0).abs() < 1e-12, "depth {depth}: {s}");
        }
    }

    #[test]
    fn heavy_tail_trend_matches_oracle() {
        // frozen from the same mpmath computation as the normalizer
        let oracle = [
            (10u64, 1.3389912289447807),
            (1_000, 1.8392895200298287),
            (100_000, 2.044156320589498),
            (1_000_000, 2.1130666111469756),
        ];
        let model = TruncatedCountableModel::new(TailRule::heavy_tail());
        let depths: Vec<u64> = oracle.iter().map(|o| o.0).collect();
        let d = entropy_limit_diagnostic(&model, EtaRule::Trivial, &depths, DEFAULT_CEILING).unwrap();
        for (row, (_, expected)) in d.rows.iter().zip(oracle) {
            assert!((row.entropy - expected).abs() < 1e-9, "{row:?}");
        }
        assert!(d.nondecreasing);
        assert!(d.rows.last().unwrap().increment.unwrap() > 0.0);
        assert_eq!(d.verdict, LimitVerdict::Undetermined);
    }

    #[test]
    fn diagnostic_rejects_bad_depths() {
        let model = TruncatedCountableModel::new(TailRule::PointMass);
        assert!(entropy_limit_diagnostic(&model, EtaRule::Trivial, &[], 1.0).is_err());
        assert!(entropy_limit_diagnostic(&model, EtaRule::Trivial, &[3, 2], 1.0).is_err());
        assert!(entropy_limit_diagnostic(&model, EtaRule::Trivial, &[0, 2], 1.0).is_err());
        assert!(entropy_limit_diagnostic(&model, EtaRule::Blocks { size: 0 }, &[1], 1.0).is_err());
    }

    #[test]
    fn verdict_rules() {
        assert_eq!(classify(None, 1.0, 2.0), LimitVerdict::Undetermined);
        assert_eq!(classify(Some(1e-5), 1.0, 2.0), LimitVerdict::Convergent);
        assert_eq!(classify(Some(0.1), 3.0, 2.0), LimitVerdict::Diverging);
        assert_eq!(classify(Some(0.1), 1.0, 2.0), LimitVerdict::Undetermined);
    }
}
