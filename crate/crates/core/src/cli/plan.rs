//! Validation: turns a config into fully built inputs, collecting every
//! violated constraint instead of stopping at the first one.

use std::path::Path;

use crate::entropy::{EtaRule, TailRule, TruncatedCountableModel, DEFAULT_CEILING};
use crate::martingale::{GaussianFieldModel, ParamBox, ParametricModel, WaldConfig};
use crate::partition::{Filtration, Partition};
use crate::space::FiniteSpace;

use super::config::{
    ExperimentConfig, ExperimentKind, GridSpec, LoadedConfig, ModelSpec, PartitionSpec, SpaceSpec,
};

/// Most prefixes `martingale_check` will enumerate.
pub const MAX_CHECK_NODES: u128 = 1 << 22;

pub enum BuiltModel {
    Discrete(ParametricModel),
    Gaussian(GaussianFieldModel),
}

pub enum Plan {
    EntropyTable {
        space: FiniteSpace,
        xi: Partition,
        etas: Vec<Partition>,
    },
    MartinReport {
        space: FiniteSpace,
        a: Partition,
        filtration: Filtration,
    },
    ApproximationTable {
        space: FiniteSpace,
        a: Partition,
        filtration: Filtration,
        eps: Vec<f64>,
    },
    LimitDiagnostic {
        model: TruncatedCountableModel,
        eta: EtaRule,
        depths: Vec<u64>,
        ceiling: f64,
    },
    MartingaleCheck {
        model: ParametricModel,
        posterior_support: Option<usize>,
        thetas: Vec<f64>,
        n_max: usize,
        tol: f64,
    },
    UniformConvergence {
        source: ConvergenceSource,
        thetas: Vec<f64>,
        n_list: Vec<usize>,
        replicates: usize,
        seed: u64,
    },
    Wald {
        model: BuiltModel,
        config: WaldConfig,
    },
    Dirac {
        depth: usize,
    },
}

pub enum ConvergenceSource {
    Posterior { model: ParametricModel, support: usize },
    Dirac { depth: usize },
}

#[derive(Default)]
struct Issues(Vec<String>);

impl Issues {
    fn push(&mut self, field: &str, message: impl std::fmt::Display) {
        self.0.push(format!("{field}: {message}"));
    }

    fn check(&mut self, ok: bool, field: &str, message: &str) -> bool {
        if !ok {
            self.push(field, message);
        }
        ok
    }
}

/// Builds the plan for `loaded`, or lists every violation.
pub fn build(loaded: &LoadedConfig, seed: u64) -> Result<Plan, Vec<String>> {
    let mut issues = Issues::default();
    let plan = build_inner(loaded, seed, &mut issues);
    match plan {
        Some(plan) if issues.0.is_empty() => Ok(plan),
        _ => {
            if issues.0.is_empty() {
                issues.push("config", "invalid configuration");
            }
            Err(issues.0)
        }
    }
}

fn section<'a, T>(value: &'a Option<T>, kind: ExperimentKind, issues: &mut Issues) -> Option<&'a T> {
    if value.is_none() {
        issues.push(kind.name(), format!("missing [{}] table", kind.name()));
    }
    value.as_ref()
}

fn build_inner(loaded: &LoadedConfig, seed: u64, issues: &mut Issues) -> Option<Plan> {
    let cfg: &ExperimentConfig = &loaded.config;
    let kind = cfg.experiment;
    let needs_space = matches!(
        kind,
        ExperimentKind::EntropyTable | ExperimentKind::MartinReport | ExperimentKind::ApproximationTable
    );
    let space = if needs_space {
        match &cfg.space {
            Some(spec) => build_space(loaded, spec, issues),
            None => {
                issues.push("space", "missing [space] table");
                None
            }
        }
    } else {
        None
    };
    let n = space.as_ref().map(FiniteSpace::len);

    match kind {
        ExperimentKind::EntropyTable => {
            let p = section(&cfg.entropy_table, kind, issues)?;
            let n = n?;
            let xi = build_partition(loaded, &p.xi, n, "entropy_table.xi", issues);
            let etas: Vec<Option<Partition>> = p
                .eta
                .to_vec()
                .iter()
                .enumerate()
                .map(|(k, spec)| build_partition(loaded, spec, n, &format!("entropy_table.eta[{k}]"), issues))
                .collect();
            if etas.is_empty() {
                issues.push("entropy_table.eta", "at least one conditioning partition");
            }
            Some(Plan::EntropyTable {
                space: space?,
                xi: xi?,
                etas: etas.into_iter().collect::<Option<_>>()?,
            })
        }
        ExperimentKind::MartinReport => {
            let p = section(&cfg.martin_report, kind, issues)?;
            let n = n?;
            let a = build_partition(loaded, &p.a, n, "martin_report.a", issues);
            let filtration = build_filtration(loaded, &p.levels, n, "martin_report.levels", issues);
            Some(Plan::MartinReport {
                space: space?,
                a: a?,
                filtration: filtration?,
            })
        }
        ExperimentKind::ApproximationTable => {
            let p = section(&cfg.approximation_table, kind, issues)?;
            let n = n?;
            let a = build_partition(loaded, &p.a, n, "approximation_table.a", issues);
            let filtration = build_filtration(loaded, &p.levels, n, "approximation_table.levels", issues);
            let eps = p.eps.clone().unwrap_or_else(|| vec![0.5, 0.1, 0.01]);
            for (k, &e) in eps.iter().enumerate() {
                issues.check(
                    e > 0.0 && e <= 1.0,
                    &format!("approximation_table.eps[{k}]"),
                    "eps in (0, 1]",
                );
            }
            if let Some(a) = &a {
                issues.check(
                    a.num_blocks() <= crate::approximation::MAX_SEARCH_BLOCKS,
                    "approximation_table.a",
                    "at most 20 blocks for exhaustive search",
                );
            }
            Some(Plan::ApproximationTable {
                space: space?,
                a: a?,
                filtration: filtration?,
                eps,
            })
        }
        ExperimentKind::LimitDiagnostic => {
            let p = section(&cfg.limit_diagnostic, kind, issues)?;
            let rule = match p.model.as_str() {
                "geometric" => match p.p {
                    Some(prob) => match TailRule::geometric(prob) {
                        Ok(rule) => Some(rule),
                        Err(e) => {
                            issues.push("limit_diagnostic.p", e);
                            None
                        }
                    },
                    None => {
                        issues.push("limit_diagnostic.p", "required for the geometric model");
                        None
                    }
                },
                "heavy_tail" => Some(TailRule::heavy_tail()),
                "point_mass" => Some(TailRule::PointMass),
                other => {
                    issues.push(
                        "limit_diagnostic.model",
                        format!("unknown model `{other}` (geometric, heavy_tail, point_mass)"),
                    );
                    None
                }
            };
            let eta = match p.eta.as_deref().unwrap_or("trivial") {
                "trivial" => Some(EtaRule::Trivial),
                "points" => Some(EtaRule::Points),
                "blocks" => match p.block_size {
                    Some(size) if size > 0 => Some(EtaRule::Blocks { size }),
                    _ => {
                        issues.push("limit_diagnostic.block_size", "block_size ≥ 1 required for eta = blocks");
                        None
                    }
                },
                other => {
                    issues.push(
                        "limit_diagnostic.eta",
                        format!("unknown eta rule `{other}` (trivial, points, blocks)"),
                    );
                    None
                }
            };
            issues.check(!p.depths.is_empty(), "limit_diagnostic.depths", "at least one depth");
            issues.check(
                p.depths.first().is_none_or(|&d| d >= 1)
                    && p.depths.windows(2).all(|w| w[1] > w[0]),
                "limit_diagnostic.depths",
                "depths ≥ 1 and strictly increasing",
            );
            issues.check(
                p.depths.iter().all(|&d| d <= 100_000_000),
                "limit_diagnostic.depths",
                "depths ≤ 10^8",
            );
            let ceiling = p.ceiling.unwrap_or(DEFAULT_CEILING);
            issues.check(ceiling.is_finite() && ceiling > 0.0, "limit_diagnostic.ceiling", "ceiling > 0");
            Some(Plan::LimitDiagnostic {
                model: TruncatedCountableModel::new(rule?),
                eta: eta?,
                depths: p.depths.clone(),
                ceiling,
            })
        }
        ExperimentKind::MartingaleCheck => {
            let p = section(&cfg.martingale_check, kind, issues)?;
            let model = build_model(&p.model, "martingale_check.model", issues);
            let model = match model {
                Some(BuiltModel::Discrete(m)) => Some(m),
                Some(BuiltModel::Gaussian(_)) => {
                    issues.push("martingale_check.model.kind", "exact checks need a discrete model");
                    None
                }
                None => None,
            };
            let posterior_support = match p.family.as_str() {
                "likelihood_ratio" => None,
                "posterior_grid" => {
                    let k = p.support.unwrap_or(11);
                    issues.check(k >= 1, "martingale_check.support", "support ≥ 1");
                    Some(k)
                }
                other => {
                    issues.push(
                        "martingale_check.family",
                        format!("unknown family `{other}` (likelihood_ratio, posterior_grid)"),
                    );
                    None
                }
            };
            let thetas = grid_values(&p.thetas, "martingale_check.thetas", issues);
            issues.check(p.n_max >= 1, "martingale_check.n_max", "n_max ≥ 1");
            let tol = p.tol.unwrap_or(1e-12);
            issues.check(tol >= 0.0, "martingale_check.tol", "tol ≥ 0");
            if let Some(m) = &model {
                let nodes = (m.alphabet() as u128).checked_pow(p.n_max as u32);
                issues.check(
                    nodes.is_some_and(|c| c <= MAX_CHECK_NODES),
                    "martingale_check.n_max",
                    "alphabet^n_max ≤ 2^22 prefixes",
                );
                for (k, t) in thetas.iter().enumerate() {
                    if let Err(e) = m.validate_grid(&[vec![*t]]) {
                        issues.push(&format!("martingale_check.thetas[{k}]"), e);
                    }
                }
            }
            Some(Plan::MartingaleCheck {
                model: model?,
                posterior_support,
                thetas,
                n_max: p.n_max,
                tol,
            })
        }
        ExperimentKind::UniformConvergence => {
            let p = section(&cfg.uniform_convergence, kind, issues)?;
            issues.check(p.replicates >= 1, "uniform_convergence.replicates", "replicates ≥ 1");
            issues.check(!p.n_list.is_empty(), "uniform_convergence.n_list", "at least one n");
            let thetas = grid_values(&p.theta_grid, "uniform_convergence.theta_grid", issues);
            let source = match p.family.as_str() {
                "posterior_grid" => {
                    let support = p.support.unwrap_or(11);
                    issues.check(support >= 1, "uniform_convergence.support", "support ≥ 1");
                    let model = match &p.model {
                        Some(spec) => match build_model(spec, "uniform_convergence.model", issues) {
                            Some(BuiltModel::Discrete(m)) => Some(m),
                            Some(BuiltModel::Gaussian(_)) => {
                                issues.push("uniform_convergence.model.kind", "posterior_grid needs a discrete model");
                                None
                            }
                            None => None,
                        },
                        None => {
                            issues.push("uniform_convergence.model", "required for posterior_grid");
                            None
                        }
                    };
                    if let Some(m) = &model {
                        for (k, t) in thetas.iter().enumerate() {
                            if !m.domain().contains(&[*t]) {
                                issues.push(&format!("uniform_convergence.theta_grid[{k}]"), "outside the parameter domain");
                            }
                        }
                    }
                    model.map(|model| ConvergenceSource::Posterior { model, support })
                }
                "dirac" => {
                    let depth = p.depth.unwrap_or(8);
                    issues.check(
                        (1..=crate::martingale::MAX_DIRAC_DEPTH).contains(&depth),
                        "uniform_convergence.depth",
                        "depth in 1..=16",
                    );
                    issues.check(
                        p.n_list.iter().all(|&n| n <= depth),
                        "uniform_convergence.n_list",
                        "every n ≤ depth",
                    );
                    issues.check(
                        thetas.iter().all(|t| (0.0..=1.0).contains(t)),
                        "uniform_convergence.theta_grid",
                        "thetas in [0, 1]",
                    );
                    Some(ConvergenceSource::Dirac { depth })
                }
                other => {
                    issues.push(
                        "uniform_convergence.family",
                        format!("unknown family `{other}` (posterior_grid, dirac)"),
                    );
                    None
                }
            };
            Some(Plan::UniformConvergence {
                source: source?,
                thetas,
                n_list: p.n_list.clone(),
                replicates: p.replicates,
                seed,
            })
        }
        ExperimentKind::WaldConsistency => {
            let p = section(&cfg.wald_consistency, kind, issues)?;
            let model = build_model(&p.model, "wald_consistency.model", issues);
            issues.check(p.replicates >= 1, "wald_consistency.replicates", "replicates ≥ 1");
            issues.check(p.n_max >= 1, "wald_consistency.n_max", "n_max ≥ 1");
            issues.check(p.tol > 0.0, "wald_consistency.tol", "tol > 0");
            issues.check(p.eps_ball > 0.0, "wald_consistency.eps_ball", "eps_ball > 0");
            let grid = grid_values(&p.grid, "wald_consistency.grid", issues);
            let record = p.record.clone().unwrap_or_default();
            issues.check(
                record.iter().all(|&n| n >= 1 && n <= p.n_max),
                "wald_consistency.record",
                "recorded levels in 1..=n_max",
            );
            let config = WaldConfig {
                grid: grid.iter().map(|&t| vec![t]).collect(),
                eps_ball: p.eps_ball,
                n_max: p.n_max,
                record,
                replicates: p.replicates,
                seed,
                tol: p.tol,
            };
            let theta0 = p.model.theta0;
            issues.check(
                grid.iter().any(|t| (t - theta0).abs() <= crate::martingale::GRID_MATCH_TOL),
                "wald_consistency.grid",
                "grid must contain theta0",
            );
            let mut sorted = grid.clone();
            sorted.sort_by(f64::total_cmp);
            let spacing = sorted
                .windows(2)
                .map(|w| w[1] - w[0])
                .filter(|&d| d > crate::martingale::GRID_MATCH_TOL)
                .reduce(f64::min);
            if let Some(h) = spacing {
                issues.check(
                    p.eps_ball > h,
                    "wald_consistency.eps_ball",
                    "eps_ball must exceed the grid spacing",
                );
            }
            Some(Plan::Wald {
                model: model?,
                config,
            })
        }
        ExperimentKind::DiracDemo => {
            let depth = cfg
                .dirac_demo
                .clone()
                .unwrap_or_default()
                .depth
                .unwrap_or(5);
            issues.check(
                (1..=crate::martingale::MAX_DIRAC_DEPTH).contains(&depth),
                "dirac_demo.depth",
                "depth in 1..=16",
            );
            Some(Plan::Dirac { depth })
        }
    }
}

fn build_space(loaded: &LoadedConfig, spec: &SpaceSpec, issues: &mut Issues) -> Option<FiniteSpace> {
    let given = [spec.weights.is_some(), spec.uniform.is_some(), spec.file.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if given != 1 {
        issues.push("space", "exactly one of weights, uniform, file");
        return None;
    }
    let (weights, labels) = if let Some(w) = &spec.weights {
        (w.clone(), spec.labels.clone())
    } else if let Some(n) = spec.uniform {
        if n == 0 {
            issues.push("space.uniform", "uniform ≥ 1");
            return None;
        }
        (vec![1.0 / n as f64; n], spec.labels.clone())
    } else {
        let path = loaded.resolve(spec.file.as_ref().expect("checked"));
        let text = read_file(&path, "space.file", issues)?;
        match parse_space_file(&text) {
            Ok(parsed) => parsed,
            Err(e) => {
                issues.push("space.file", format!("{}: {e}", path.display()));
                return None;
            }
        }
    };
    match FiniteSpace::new(&weights, labels) {
        Ok(space) => Some(space),
        Err(e) => {
            issues.push("space", e);
            None
        }
    }
}

/// Parses `weight` or `label weight` lines.
pub fn parse_space_file(text: &str) -> Result<(Vec<f64>, Option<Vec<String>>), String> {
    let mut weights = Vec::new();
    let mut labels = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let (label, weight) = match fields.as_slice() {
            [w] => (None, *w),
            [l, w] => (Some(l.to_string()), *w),
            _ => return Err(format!("line {}: expected `weight` or `label weight`", k + 1)),
        };
        let weight: f64 = weight
            .parse()
            .map_err(|_| format!("line {}: `{weight}` is not a number", k + 1))?;
        weights.push(weight);
        labels.push(label);
    }
    let labels = if labels.iter().all(Option::is_some) && !labels.is_empty() {
        Some(labels.into_iter().map(Option::unwrap).collect())
    } else if labels.iter().all(Option::is_none) {
        None
    } else {
        return Err("either every line or no line carries a label".into());
    };
    Ok((weights, labels))
}

fn read_file(path: &Path, field: &str, issues: &mut Issues) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(text) => Some(text),
        Err(e) => {
            issues.push(field, format!("cannot read {}: {e}", path.display()));
            None
        }
    }
}

fn build_partition(
    loaded: &LoadedConfig,
    spec: &PartitionSpec,
    n: usize,
    field: &str,
    issues: &mut Issues,
) -> Option<Partition> {
    let result = match spec {
        PartitionSpec::Blocks(blocks) => Partition::from_blocks(n, blocks.clone()),
        PartitionSpec::Named(name) if name == "points" => Ok(Partition::points(n)),
        PartitionSpec::Named(name) if name == "trivial" => Ok(Partition::trivial(n)),
        PartitionSpec::Named(file) => {
            let path = loaded.resolve(Path::new(file));
            let text = read_file(&path, field, issues)?;
            Partition::parse(&text, n)
        }
    };
    match result {
        Ok(p) => Some(p),
        Err(e) => {
            issues.push(field, e);
            None
        }
    }
}

fn build_filtration(
    loaded: &LoadedConfig,
    levels: &[PartitionSpec],
    n: usize,
    field: &str,
    issues: &mut Issues,
) -> Option<Filtration> {
    if levels.is_empty() {
        issues.push(field, "at least one level");
        return None;
    }
    let built: Vec<Option<Partition>> = levels
        .iter()
        .enumerate()
        .map(|(k, spec)| build_partition(loaded, spec, n, &format!("{field}[{k}]"), issues))
        .collect();
    let built: Vec<Partition> = built.into_iter().collect::<Option<_>>()?;
    match Filtration::new(built, None) {
        Ok(f) => Some(f),
        Err(e) => {
            issues.push(field, e);
            None
        }
    }
}

fn grid_values(spec: &GridSpec, field: &str, issues: &mut Issues) -> Vec<f64> {
    if let GridSpec::Range { lo, hi, count } = spec {
        issues.check(*count >= 1, field, "count ≥ 1");
        issues.check(lo <= hi, field, "lo ≤ hi");
    }
    let values = spec.values();
    issues.check(!values.is_empty(), field, "at least one value");
    issues.check(values.iter().all(|v| v.is_finite()), field, "finite values");
    values
}

fn build_model(spec: &ModelSpec, field: &str, issues: &mut Issues) -> Option<BuiltModel> {
    let built = match spec.kind.as_str() {
        "bernoulli" => ParametricModel::bernoulli(spec.theta0).map(BuiltModel::Discrete),
        "binomial" => match spec.trials {
            Some(trials) if trials >= 1 => {
                ParametricModel::binomial(trials, spec.theta0).map(BuiltModel::Discrete)
            }
            _ => {
                issues.push(&format!("{field}.trials"), "trials ≥ 1 required for binomial");
                return None;
            }
        },
        "gaussian" => {
            let sites = spec.sites.unwrap_or(5);
            if sites == 0 {
                issues.push(&format!("{field}.sites"), "sites ≥ 1");
                return None;
            }
            let [lo, hi] = spec.domain.unwrap_or([0.01, 100.0]);
            let domain = match ParamBox::interval(lo, hi) {
                Ok(d) => d,
                Err(e) => {
                    issues.push(&format!("{field}.domain"), e);
                    return None;
                }
            };
            let lengthscale = spec.lengthscale.unwrap_or(0.3);
            let points = GaussianFieldModel::line_sites(sites);
            match spec.kernel.as_deref().unwrap_or("exponential") {
                "exponential" => {
                    GaussianFieldModel::exponential_variance(points, lengthscale, spec.theta0, domain)
                }
                "squared_exponential" => GaussianFieldModel::squared_exponential_variance(
                    points,
                    lengthscale,
                    spec.theta0,
                    domain,
                ),
                "white_noise" => GaussianFieldModel::white_noise(points, spec.theta0, domain),
                other => {
                    issues.push(
                        &format!("{field}.kernel"),
                        format!("unknown kernel `{other}` (exponential, squared_exponential, white_noise)"),
                    );
                    return None;
                }
            }
            .map(BuiltModel::Gaussian)
        }
        other => {
            issues.push(
                &format!("{field}.kind"),
                format!("unknown model `{other}` (bernoulli, binomial, gaussian)"),
            );
            return None;
        }
    };
    match built {
        Ok(m) => Some(m),
        Err(e) => {
            issues.push(field, e);
            None
        }
    }
}
