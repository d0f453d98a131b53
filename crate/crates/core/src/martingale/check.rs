use crate::error::{Error, Result};

use super::{evaluate_checked, MartingaleFamily, PathLaw};

/// Outcome of an exact martingale check.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleCheck {
    /// Largest `|Σ_s P(s | prefix) X_{n+1}(prefix s) - X_n(prefix)|`.
    pub max_violation: f64,
    /// Largest violation divided by `max(1, |X_n|)`. Near `|X_n| = 2^k` the
    /// absolute violation cannot drop below the float spacing `2^(k-52)`.
    pub max_relative_violation: f64,
    /// Prefix where the largest violation occurred.
    pub worst_prefix: Option<Vec<usize>>,
    /// Number of prefixes examined.
    pub nodes: usize,
    pub tol: f64,
    pub passed: bool,
}

/// Verifies the one-step martingale identity at every prefix of length
/// `< n_max` that has positive probability under `law`.
pub fn check_martingale<F, L>(
    family: &F,
    law: &L,
    theta: &[f64],
    n_max: usize,
    tol: f64,
) -> Result<MartingaleCheck>
where
    F: MartingaleFamily + ?Sized,
    L: PathLaw + ?Sized,
{
    check_depth(law, n_max)?;
    family.domain().check(theta)?;
    let mut report = MartingaleCheck {
        max_violation: 0.0,
        max_relative_violation: 0.0,
        worst_prefix: None,
        nodes: 0,
        tol,
        passed: true,
    };
    let mut prefix = Vec::with_capacity(n_max + 1);
    visit(family, law, theta, n_max, &mut prefix, &mut report)?;
    report.passed = report.max_violation <= tol;
    Ok(report)
}

fn visit<F, L>(
    family: &F,
    law: &L,
    theta: &[f64],
    n_max: usize,
    prefix: &mut Vec<usize>,
    report: &mut MartingaleCheck,
) -> Result<()>
where
    F: MartingaleFamily + ?Sized,
    L: PathLaw + ?Sized,
{
    let n = prefix.len();
    if n >= n_max {
        return Ok(());
    }
    report.nodes += 1;
    let current = evaluate_checked(family, theta, n, prefix)?;
    let probs = law.next_probs(prefix);
    let mut expected = 0.0;
    for (s, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        prefix.push(s);
        expected += p * evaluate_checked(family, theta, n + 1, prefix)?;
        prefix.pop();
    }
    let violation = (expected - current).abs();
    let relative = violation / current.abs().max(1.0);
    if relative > report.max_relative_violation || relative.is_nan() {
        report.max_relative_violation = relative;
    }
    if violation > report.max_violation || violation.is_nan() {
        report.max_violation = violation;
        report.worst_prefix = Some(prefix.clone());
    }
    for (s, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            prefix.push(s);
            visit(family, law, theta, n_max, prefix, report)?;
            prefix.pop();
        }
    }
    Ok(())
}

/// `E[X_n^theta]` under `law`, by exact enumeration of length-`n` prefixes.
pub fn expected_value<F, L>(family: &F, law: &L, theta: &[f64], n: usize) -> Result<f64>
where
    F: MartingaleFamily + ?Sized,
    L: PathLaw + ?Sized,
{
    check_depth(law, n)?;
    fn go<F, L>(
        family: &F,
        law: &L,
        theta: &[f64],
        n: usize,
        prefix: &mut Vec<usize>,
        mass: f64,
    ) -> Result<f64>
    where
        F: MartingaleFamily + ?Sized,
        L: PathLaw + ?Sized,
    {
        if prefix.len() == n {
            return Ok(mass * evaluate_checked(family, theta, n, prefix)?);
        }
        let mut total = 0.0;
        for (s, p) in law.next_probs(prefix).into_iter().enumerate() {
            if p > 0.0 {
                prefix.push(s);
                total += go(family, law, theta, n, prefix, mass * p)?;
                prefix.pop();
            }
        }
        Ok(total)
    }
    go(family, law, theta, n, &mut Vec::with_capacity(n), 1.0)
}

fn check_depth<L: PathLaw + ?Sized>(law: &L, n: usize) -> Result<()> {
    match law.max_len() {
        Some(max) if n > max => Err(Error::OutOfRange {
            what: "check depth",
            value: n,
            range: "at most the path-law length",
        }),
        _ => Ok(()),
    }
}
