//! Executes a validated plan and renders its outputs.

use std::fmt::Write as _;

use crate::approximation::{approximation_table, uniform_level};
use crate::entropy::{cond_entropy, entropy_limit_diagnostic, martin_condition_report, EtaRule, MartinVerdict, TailRule, Units};
use crate::error::Result;
use crate::martingale::{
    check_martingale, dirac_entropy_demo, expected_value, linspace, uniform_convergence_diag,
    wald_mle_experiment, ConvergenceTable, dirac_family, GridPosteriorFamily, LikelihoodRatioFamily,
    MartingaleFamily, PathLaw, PathSpace, WaldModel,
};

use super::output::{fmt_num, fmt_set, Table};
use super::plan::{BuiltModel, ConvergenceSource, Plan};

/// One rendered output file.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

fn out(name: &str, contents: String) -> Output {
    Output {
        name: name.to_string(),
        contents,
    }
}

/// Runs the plan; the last output is always `summary.txt`.
pub fn execute(plan: &Plan, units: Units) -> Result<Vec<Output>> {
    let unit = units.suffix();
    let mut summary = String::new();
    let mut files = Vec::new();
    match plan {
        Plan::EntropyTable { space, xi, etas } => {
            let mut t = Table::new(&[
                "eta_index".to_string(),
                "xi_blocks".to_string(),
                "eta_blocks".to_string(),
                format!("entropy_{unit}"),
            ]);
            writeln!(summary, "experiment: entropy_table").unwrap();
            writeln!(summary, "outcomes: {}", space.len()).unwrap();
            for (k, eta) in etas.iter().enumerate() {
                let r = cond_entropy(space, xi, eta)?;
                let v = r.value_in(units);
                t.row(&[
                    k.to_string(),
                    xi.num_blocks().to_string(),
                    eta.num_blocks().to_string(),
                    fmt_num(v),
                ]);
                writeln!(summary, "H(xi | eta[{k}]) = {} {unit}", fmt_num(v)).unwrap();
            }
            files.push(out("entropy_table.csv", t.finish()));
        }
        Plan::MartinReport {
            space,
            a,
            filtration,
        } => {
            let report = martin_condition_report(space, filtration, a)?;
            let mut t = Table::new(&["level".to_string(), format!("sup_entropy_{unit}")]);
            for (k, r) in report.levels.iter().enumerate() {
                t.row(&[(k + 1).to_string(), fmt_num(r.value_in(units))]);
            }
            files.push(out("martin_report.csv", t.finish()));
            let MartinVerdict::Bounded { level, value } = report.verdict;
            writeln!(summary, "experiment: martin_report").unwrap();
            writeln!(summary, "levels: {}", filtration.len()).unwrap();
            writeln!(
                summary,
                "verdict: bounded (smallest supremum {} {unit} first reached at level {level})",
                fmt_num(units.convert(value))
            )
            .unwrap();
            writeln!(summary, "nonincreasing: {}", report.nonincreasing).unwrap();
        }
        Plan::ApproximationTable {
            space,
            a,
            filtration,
            eps,
        } => {
            let table = approximation_table(space, filtration, a)?;
            let mut t = Table::new(&["level", "worst_case_error", "achieved_by"]);
            for row in &table {
                t.row(&[
                    row.level.to_string(),
                    fmt_num(row.worst.error),
                    fmt_set(&row.worst.blocks),
                ]);
            }
            files.push(out("approximation_table.csv", t.finish()));
            writeln!(summary, "experiment: approximation_table").unwrap();
            writeln!(summary, "a_blocks: {}", a.num_blocks()).unwrap();
            for &e in eps {
                let level = uniform_level(space, filtration, a, e)?;
                let shown = level.map_or("none".to_string(), |n| n.to_string());
                writeln!(summary, "uniform_level(eps = {}): {shown}", fmt_num(e)).unwrap();
            }
        }
        Plan::LimitDiagnostic {
            model,
            eta,
            depths,
            ceiling,
        } => {
            let diag = entropy_limit_diagnostic(model, *eta, depths, *ceiling)?;
            let mut t = Table::new(&[
                "depth".to_string(),
                format!("entropy_{unit}"),
                "increment".to_string(),
                "verdict".to_string(),
            ]);
            for row in &diag.rows {
                t.row(&[
                    row.depth.to_string(),
                    fmt_num(units.convert(row.entropy)),
                    row.increment
                        .map_or(String::new(), |i| fmt_num(units.convert(i))),
                    row.verdict.as_str().to_string(),
                ]);
            }
            files.push(out("limit_diagnostic.csv", t.finish()));
            writeln!(summary, "experiment: limit_diagnostic").unwrap();
            writeln!(summary, "model: {}", tail_name(&model.rule)).unwrap();
            writeln!(summary, "eta: {}", eta_name(*eta)).unwrap();
            writeln!(summary, "nondecreasing: {}", diag.nondecreasing).unwrap();
            writeln!(summary, "verdict: {}", diag.verdict.as_str()).unwrap();
            writeln!(
                summary,
                "note: divergence is reported as a trend; no infinite value is ever computed"
            )
            .unwrap();
        }
        Plan::MartingaleCheck {
            model,
            posterior_support,
            thetas,
            n_max,
            tol,
        } => {
            let mut t = Table::new(&[
                "theta",
                "n_max",
                "max_violation",
                "max_relative_violation",
                "worst_prefix",
                "nodes",
                "passed",
                "expectation",
            ]);
            let mut all = true;
            let mut worst = 0.0f64;
            let rows = match posterior_support {
                None => {
                    let fam = LikelihoodRatioFamily::new(model.clone());
                    check_rows(&fam, model, thetas, *n_max, *tol)?
                }
                Some(k) => {
                    let fam = GridPosteriorFamily::new(model.clone(), linspace(0.0, 1.0, *k))?;
                    check_rows(&fam, &fam.predictive(), thetas, *n_max, *tol)?
                }
            };
            for (theta, report, expectation) in rows {
                all &= report.passed;
                worst = worst.max(report.max_violation);
                t.row(&[
                    fmt_num(theta),
                    n_max.to_string(),
                    fmt_num(report.max_violation),
                    fmt_num(report.max_relative_violation),
                    report
                        .worst_prefix
                        .as_deref()
                        .map_or(String::new(), path_string),
                    report.nodes.to_string(),
                    report.passed.to_string(),
                    fmt_num(expectation),
                ]);
            }
            files.push(out("martingale_check.csv", t.finish()));
            writeln!(summary, "experiment: martingale_check").unwrap();
            writeln!(
                summary,
                "family: {}",
                if posterior_support.is_some() {
                    "posterior_grid"
                } else {
                    "likelihood_ratio"
                }
            )
            .unwrap();
            writeln!(summary, "model: {}", model.name()).unwrap();
            writeln!(summary, "max_violation: {}", fmt_num(worst)).unwrap();
            writeln!(summary, "tol: {}", fmt_num(*tol)).unwrap();
            writeln!(summary, "all_passed: {all}").unwrap();
        }
        Plan::UniformConvergence {
            source,
            thetas,
            n_list,
            replicates,
            seed,
        } => {
            let grid: Vec<Vec<f64>> = thetas.iter().map(|&t| vec![t]).collect();
            let seed = *seed;
            let table = match source {
                ConvergenceSource::Posterior { model, support } => {
                    let fam = GridPosteriorFamily::new(model.clone(), linspace(0.0, 1.0, *support))?;
                    uniform_convergence_diag(&fam, &grid, model, n_list, *replicates, seed, true)?
                }
                ConvergenceSource::Dirac { depth } => {
                    let paths = PathSpace::dirac(2, *depth, &vec![1; *depth])?;
                    let doob = dirac_family(paths.clone())?;
                    uniform_convergence_diag(&doob, &grid, &paths, n_list, *replicates, seed, true)?
                }
            };
            files.push(out("uniform_convergence.csv", convergence_csv(&table)));
            writeln!(summary, "experiment: uniform_convergence").unwrap();
            writeln!(summary, "replicates: {replicates}").unwrap();
            writeln!(summary, "theta_grid_points: {}", thetas.len()).unwrap();
            writeln!(summary, "n_ref: {}", table.n_ref).unwrap();
            writeln!(
                summary,
                "note: X_ref is the value at n_ref, a proxy for the almost-sure limit"
            )
            .unwrap();
            if let (Some(first), Some(last)) = (table.rows.first(), table.rows.last()) {
                writeln!(summary, "mean_sup_first: {}", fmt_num(first.mean_sup)).unwrap();
                writeln!(summary, "mean_sup_last: {}", fmt_num(last.mean_sup)).unwrap();
            }
        }
        Plan::Wald { model, config } => {
            let wm = match model {
                BuiltModel::Discrete(m) => WaldModel::Discrete(m),
                BuiltModel::Gaussian(m) => WaldModel::Gaussian(m),
            };
            let report = wald_mle_experiment(wm, config)?;
            let dim = report.theta0.len();
            let mut header = vec!["replicate".to_string(), "n".to_string()];
            if dim == 1 {
                header.push("theta_hat".into());
            } else {
                header.extend((1..=dim).map(|k| format!("theta_hat_{k}")));
            }
            header.push("log_sup_ratio".into());
            header.push("sup_dev".into());
            let mut t = Table::new(&header);
            for row in &report.rows {
                let mut fields = vec![row.replicate.to_string(), row.n.to_string()];
                fields.extend(row.theta_hat.iter().map(|&v| fmt_num(v)));
                fields.push(row.log_sup_ratio.map_or(String::new(), fmt_num));
                fields.push(fmt_num(row.sup_dev));
                t.row(&fields);
            }
            files.push(out("wald_consistency.csv", t.finish()));
            let mut agg = Table::new(&[
                "n",
                "mean_sup_dev",
                "mean_log_sup_ratio",
                "mean_sup_ratio",
                "fraction_within_tol",
            ]);
            for a in &report.aggregates {
                agg.row(&[
                    a.n.to_string(),
                    fmt_num(a.mean_sup_dev),
                    a.mean_log_sup_ratio.map_or(String::new(), fmt_num),
                    a.mean_sup_ratio.map_or(String::new(), fmt_num),
                    fmt_num(a.fraction_within_tol),
                ]);
            }
            files.push(out("wald_aggregates.csv", agg.finish()));
            writeln!(summary, "experiment: wald_consistency").unwrap();
            writeln!(
                summary,
                "model: {}",
                match model {
                    BuiltModel::Discrete(m) => m.name().to_string(),
                    BuiltModel::Gaussian(m) => format!("gaussian field, {} sites", m.num_sites()),
                }
            )
            .unwrap();
            writeln!(summary, "theta0: {}", fmt_vec(&report.theta0)).unwrap();
            writeln!(summary, "replicates: {}", report.replicates).unwrap();
            writeln!(summary, "n_max: {}", report.n_max).unwrap();
            writeln!(summary, "eps_ball: {}", fmt_num(report.eps_ball)).unwrap();
            writeln!(summary, "tol: {}", fmt_num(report.tol)).unwrap();
            writeln!(summary, "success_fraction: {}", fmt_num(report.success_fraction)).unwrap();
            match report.grid_spacing {
                Some(h) => writeln!(
                    summary,
                    "caveat: estimates are grid maximizers; grid spacing {} limits resolution",
                    fmt_num(h)
                )
                .unwrap(),
                None => writeln!(summary, "caveat: single-point grid, estimate is forced").unwrap(),
            }
            for a in &report.aggregates {
                writeln!(
                    summary,
                    "n = {}: mean_sup_dev {}, mean_log_sup_ratio {}, fraction_within_tol {}",
                    a.n,
                    fmt_num(a.mean_sup_dev),
                    a.mean_log_sup_ratio.map_or("none".to_string(), fmt_num),
                    fmt_num(a.fraction_within_tol)
                )
                .unwrap();
            }
        }
        Plan::Dirac { depth } => {
            let demo = dirac_entropy_demo(*depth)?;
            let mut t = Table::new(&["theta", "n", "value"]);
            for row in &demo.table {
                t.row(&[fmt_num(row.theta), row.n.to_string(), fmt_num(row.value)]);
            }
            files.push(out("dirac_table.csv", t.finish()));
            writeln!(summary, "experiment: dirac_demo").unwrap();
            writeln!(summary, "depth: {depth}").unwrap();
            writeln!(summary, "atoms_of_a: {}", demo.atoms).unwrap();
            writeln!(
                summary,
                "entropy_value: {} {unit}",
                fmt_num(units.convert(demo.entropy_value))
            )
            .unwrap();
            if let Some(v) = demo.exhaustive_value {
                writeln!(summary, "exhaustive_value: {} {unit}", fmt_num(units.convert(v))).unwrap();
            }
            writeln!(summary, "martingales_constant_after_n1: {}", demo.constant_after_first).unwrap();
        }
    }
    files.push(out("summary.txt", summary));
    Ok(files)
}

type CheckRow = (f64, crate::martingale::MartingaleCheck, f64);

fn check_rows<F, L>(family: &F, law: &L, thetas: &[f64], n_max: usize, tol: f64) -> Result<Vec<CheckRow>>
where
    F: MartingaleFamily,
    L: PathLaw + ?Sized,
{
    thetas
        .iter()
        .map(|&t| {
            let report = check_martingale(family, law, &[t], n_max, tol)?;
            let e = expected_value(family, law, &[t], n_max)?;
            Ok((t, report, e))
        })
        .collect()
}

fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut t = Table::new(&["n", "mean_sup", "max_sup", "l1_sup"]);
    for r in &table.rows {
        t.row(&[
            r.n.to_string(),
            fmt_num(r.mean_sup),
            fmt_num(r.max_sup),
            fmt_num(r.l1_sup),
        ]);
    }
    t.finish()
}

fn path_string(path: &[usize]) -> String {
    let parts: Vec<String> = path.iter().map(usize::to_string).collect();
    format!("({})", parts.join(" "))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn tail_name(rule: &TailRule) -> String {
    match rule {
        TailRule::Geometric { p } => format!("geometric(p = {})", fmt_num(*p)),
        TailRule::HeavyTail(_) => "heavy_tail".into(),
        TailRule::PointMass => "point_mass".into(),
    }
}

fn eta_name(eta: EtaRule) -> String {
    match eta {
        EtaRule::Trivial => "trivial".into(),
        EtaRule::Points => "points".into(),
        EtaRule::Blocks { size } => format!("blocks of size {size}"),
    }
}
