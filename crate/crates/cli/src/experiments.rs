//! Experiment runners. Each returns a [`Report`]; nothing here touches the filesystem.

use std::time::Instant;

use lowrank::quadrature::{build_grid_capped, sample_capped};
use lowrank::schedule::{schedule, Regime, SchedulerParams};
use lowrank::svd::{fit_decay_exponent, truncated_svd};
use lowrank::tensor::unfold;
use lowrank::testbed::default_gamma;
use lowrank::tt::{tt_error, tt_svd, tt_svd_bidirectional, tt_svd_with_tolerance};
use lowrank::tucker::{hosvd, hosvd_with_tolerance, tucker_error};
use lowrank::{
    Cost, DenseTensor, DomainSpec, Error, FunctionSpec, GridSpec, Shape, SingularSpectrum, Smoothness,
    TruncationRule, UnfoldingSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{self, ExperimentConfig, ExperimentKind, FunctionConfig, Format, SchedulerConfig};
use crate::error::CliError;
use crate::report::{list, num, Report, Table};

/// Absolute slack, relative to `‖t‖`, on every a-priori error bound.
pub const BOUND_SLACK: f64 = 1e-10;

/// Allowed excess of a fitted λ-exponent over the predicted rate.
pub const DECAY_SLACK: f64 = 0.3;

/// Constant in the dimension-robustness spot check `error ≤ C·√m·ε`.
pub const SPOT_CHECK_CONSTANT: f64 = 3.0;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub seed: u64,
    pub cap: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 0,
            cap: lowrank::DEFAULT_ELEMENT_CAP,
        }
    }
}

pub fn run(cfg: &ExperimentConfig, kind: ExperimentKind, opts: &Options) -> Result<Report, CliError> {
    let mut report = Report::new(kind.as_str());
    let start = Instant::now();
    match kind {
        ExperimentKind::Decompose => decompose(cfg, opts, &mut report)?,
        ExperimentKind::Spectrum => spectrum(cfg, opts, &mut report)?,
        ExperimentKind::Schedule => schedule_only(cfg, &mut report)?,
        ExperimentKind::DecayRate => decay_rate(cfg, opts, &mut report)?,
        ExperimentKind::RankVsEps => rank_vs_eps(cfg, opts, &mut report)?,
        ExperimentKind::DimRobustness => dim_robustness(cfg, opts, &mut report)?,
        ExperimentKind::CompareFormats => compare_formats(cfg, opts, &mut report)?,
    }
    report.timings.push(("total".into(), start.elapsed().as_secs_f64()));
    Ok(report)
}

struct Sampled {
    tensor: DenseTensor<f64>,
    spec: Option<FunctionSpec>,
}

fn sample_function(f: &FunctionConfig, grid: &GridSpec, opts: &Options) -> Result<Sampled, CliError> {
    let spec = config::function_spec(f)?;
    let domain = DomainSpec::new(f.dims.clone()).map_err(|e| CliError::config("function.dims", e.to_string()))?;
    let cap_error = |e: Error| match e {
        Error::CapExceeded { .. } => CliError::config("grid.points_per_axis", e.to_string()),
        other => other.into(),
    };
    let tensor = match &spec {
        Some(spec) => sample_capped::<f64>(spec, &domain, grid, opts.cap).map_err(cap_error)?.tensor,
        None => {
            let grids = build_grid_capped(&domain, grid, opts.cap).map_err(cap_error)?;
            let shape = Shape::with_cap(grids.iter().map(|g| g.points.len()).collect(), opts.cap).map_err(cap_error)?;
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let values = (0..shape.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
            DenseTensor::new(shape, values)?.with_weights(grids.into_iter().map(|g| g.weights).collect())?
        }
    };
    Ok(Sampled { tensor, spec })
}

fn function_and_grid(cfg: &ExperimentConfig, opts: &Options) -> Result<(Sampled, GridSpec), CliError> {
    let grid = cfg.require_grid()?;
    let f = cfg.require_function()?;
    Ok((sample_function(f, &grid, opts)?, grid))
}

#[derive(Debug, Clone, Copy)]
enum RankChoice<'a> {
    Fixed(&'a [usize]),
    Tolerance(f64),
}

struct StepRow {
    position: usize,
    direction: &'static str,
    stacked_dim: usize,
    rank: usize,
    tail: f64,
}

struct Outcome {
    format: Format,
    ranks: Vec<usize>,
    error: f64,
    bound: f64,
    norm: f64,
    cost: Cost,
    storage: u64,
    steps: Vec<StepRow>,
    seconds: f64,
}

fn clamp_tucker(extents: &[usize], ranks: &[usize]) -> Vec<usize> {
    let total: usize = extents.iter().product();
    ranks
        .iter()
        .zip(extents)
        .map(|(&r, &n)| r.max(1).min(n.min(total / n)))
        .collect()
}

/// Rank 0 (a truncated mode) becomes 1; every rank is capped at its feasible maximum.
fn clamp_tt(extents: &[usize], ranks: &[usize]) -> Vec<usize> {
    let mut prev = 1usize;
    ranks
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let rest: usize = extents[j + 1..].iter().product();
            let r = r.max(1).min((prev * extents[j]).min(rest));
            prev = r;
            r
        })
        .collect()
}

fn decompose_with(t: &DenseTensor<f64>, format: Format, choice: RankChoice<'_>) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let norm = t.frobenius_norm();
    let mut outcome = match format {
        Format::Tucker => {
            let d = match choice {
                RankChoice::Fixed(r) => hosvd(t, r)?,
                RankChoice::Tolerance(tol) => hosvd_with_tolerance(t, tol)?,
            };
            let ranks = d.ranks();
            let steps = ranks
                .iter()
                .enumerate()
                .map(|(j, &rank)| StepRow {
                    position: j + 1,
                    direction: "mode",
                    stacked_dim: t.extents()[j],
                    rank,
                    tail: d.mode_tails[j],
                })
                .collect();
            let cost = d.core_cost();
            Outcome {
                format,
                error: tucker_error(t, &d)?,
                bound: d.error_bound(),
                norm,
                storage: cost.value.saturating_add(d.factor_storage()),
                cost,
                ranks,
                steps,
                seconds: 0.0,
            }
        }
        Format::Tt | Format::TtBidir => {
            let d = match (format, choice) {
                (Format::Tt, RankChoice::Fixed(r)) => tt_svd(t, r)?,
                (Format::Tt, RankChoice::Tolerance(tol)) => tt_svd_with_tolerance(t, tol)?,
                (_, RankChoice::Fixed(r)) => bidirectional_clamped(t, r)?,
                (_, RankChoice::Tolerance(tol)) => {
                    let r = tt_svd_with_tolerance(t, tol)?.ranks();
                    bidirectional_clamped(t, &r)?
                }
            };
            let steps = d
                .steps
                .iter()
                .map(|s| StepRow {
                    position: s.bond,
                    direction: match s.direction {
                        lowrank::tt::Direction::Forward => "forward",
                        lowrank::tt::Direction::Backward => "backward",
                    },
                    stacked_dim: s.stacked_dim,
                    rank: s.rank,
                    tail: d.tails[s.bond - 1],
                })
                .collect();
            Outcome {
                format,
                ranks: d.ranks(),
                error: tt_error(t, &d)?,
                bound: d.error_bound(),
                norm,
                cost: d.cost(),
                storage: d.storage(),
                steps,
                seconds: 0.0,
            }
        }
    };
    outcome.seconds = start.elapsed().as_secs_f64();
    Ok(outcome)
}

/// Backward steps can be tighter than forward feasibility; lower offending ranks to the reported maximum.
fn bidirectional_clamped(t: &DenseTensor<f64>, ranks: &[usize]) -> Result<lowrank::TtDecomposition<f64>, CliError> {
    let mut ranks = clamp_tt(t.extents(), ranks);
    loop {
        match tt_svd_bidirectional(t, &ranks) {
            Err(Error::RankInfeasible { position, max, .. }) if max >= 1 && ranks[position - 1] > max => {
                ranks[position - 1] = max;
            }
            other => return Ok(other?),
        }
    }
}

fn error_row(report: &mut Report, table: &mut Table, o: &Outcome, tolerance: Option<f64>) {
    let limit = o.bound + BOUND_SLACK * o.norm;
    let bound_pass = report.check(|| format!("{} error vs tail bound", o.format.as_str()), o.error, limit);
    let tol_pass = match tolerance {
        Some(tol) => report.check(|| format!("{} error vs tolerance", o.format.as_str()), o.error, tol * o.norm * (1.0 + 1e-12)),
        None => String::new(),
    };
    table.push(vec![
        o.format.as_str().into(),
        list(&o.ranks),
        num(o.error),
        num(o.bound),
        num(rel(o.error, o.norm)),
        o.cost.value.to_string(),
        o.cost.saturated.to_string(),
        o.storage.to_string(),
        bound_pass,
        tol_pass,
    ]);
}

const ERROR_COLUMNS: [&str; 10] = [
    "format",
    "ranks",
    "error",
    "bound",
    "relative_error",
    "cost",
    "cost_saturated",
    "storage",
    "bound_pass",
    "tolerance_pass",
];

fn rel(error: f64, norm: f64) -> f64 {
    if norm > 0.0 {
        error / norm
    } else {
        error
    }
}

fn steps_table(outcomes: &[&Outcome]) -> Table {
    let mut t = Table::new("ranks", &["format", "position", "direction", "stacked_dim", "rank", "tail"]);
    for o in outcomes {
        for s in &o.steps {
            t.push(vec![
                o.format.as_str().into(),
                s.position.to_string(),
                s.direction.into(),
                s.stacked_dim.to_string(),
                s.rank.to_string(),
                num(s.tail),
            ]);
        }
    }
    t
}

/// Mode order for TT when `order_modes` is set, as a permutation of the subdomains.
fn tt_order(cfg: &ExperimentConfig, format: Format) -> Result<Option<Vec<usize>>, CliError> {
    if !cfg.order_modes || format == Format::Tucker {
        return Ok(None);
    }
    let f = cfg.require_function()?;
    let d = DomainSpec::new(f.dims.clone()).map_err(|e| CliError::config("function.dims", e.to_string()))?;
    Ok(d.ordered_ascending().ordering_permutation)
}

fn scheduled_ranks(sc: &SchedulerConfig, format: Format, dims: &[usize]) -> Result<(Regime, Vec<usize>), CliError> {
    let regime = match (format, sc.regime.is_weighted()) {
        (Format::Tucker, false) => Regime::TuckerUnweighted,
        (Format::Tucker, true) => Regime::TuckerWeighted,
        (_, false) => Regime::TtUnweighted,
        (_, true) => Regime::TtWeighted,
    };
    let mut p = sc.params();
    p.dims = dims.to_vec();
    let s = schedule(regime, &p).map_err(|e| CliError::config("scheduler", e.to_string()))?;
    Ok((regime, s.ranks.iter().map(|&r| usize::try_from(r).unwrap_or(usize::MAX)).collect()))
}

fn decompose(cfg: &ExperimentConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let (sampled, _) = function_and_grid(cfg, opts)?;
    let format = cfg.require_format()?;
    let mut t = sampled.tensor;
    let f = cfg.require_function()?;
    let mut dims = f.dims.clone();
    if let Some(order) = tt_order(cfg, format)? {
        t = t.permute(&order)?;
        dims = order.iter().map(|&k| dims[k]).collect();
        report.notes.push(format!("Modes reordered for TT: permutation {order:?}."));
    }
    let fixed;
    let choice = if let Some(r) = &cfg.ranks {
        RankChoice::Fixed(r)
    } else if let Some(sc) = &cfg.scheduler {
        let (regime, ranks) = scheduled_ranks(sc, format, &dims)?;
        fixed = match format {
            Format::Tucker => clamp_tucker(t.extents(), &ranks),
            _ => clamp_tt(t.extents(), &ranks),
        };
        report.notes.push(format!(
            "Ranks from the {} schedule {}, clamped to the grid: {}.",
            regime.as_str(),
            list(&ranks),
            list(&fixed)
        ));
        RankChoice::Fixed(&fixed)
    } else if let Some(tol) = cfg.tolerance {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::config("tolerance", format!("must be positive, got {tol}")));
        }
        RankChoice::Tolerance(tol)
    } else {
        return Err(CliError::config("tolerance", "one of `ranks`, `scheduler` or `tolerance` is required"));
    };
    let outcome = decompose_with(&t, format, choice).map_err(|e| match e {
        CliError::Lowrank(err @ (Error::RankCount { .. } | Error::RankInfeasible { .. })) => {
            CliError::config("ranks", err.to_string())
        }
        CliError::Lowrank(err @ Error::BelowNoiseFloor { .. }) => CliError::config("tolerance", err.to_string()),
        other => other,
    })?;
    let mut errors = Table::new("errors", &ERROR_COLUMNS);
    let tol = match choice {
        RankChoice::Tolerance(t) => Some(t),
        RankChoice::Fixed(_) => None,
    };
    error_row(report, &mut errors, &outcome, tol);
    report.notes.push(format!(
        "{} ranks {}: error {:e} (relative {:e}), bound {:e}.",
        format.as_str(),
        list(&outcome.ranks),
        outcome.error,
        rel(outcome.error, outcome.norm),
        outcome.bound
    ));
    report.timings.push((format!("decompose {}", format.as_str()), outcome.seconds));
    report.tables.push(steps_table(&[&outcome]));
    report.tables.push(errors);
    Ok(())
}

fn mode_spectra(t: &DenseTensor<f64>) -> Result<Vec<SingularSpectrum<f64>>, CliError> {
    let m = t.ndim();
    (0..m)
        .map(|j| {
            let u = unfold(t, &UnfoldingSpec::mode(j, m))?;
            Ok(truncated_svd(&u, TruncationRule::FixedRank(0))?.spectrum)
        })
        .collect()
}

fn spectrum(cfg: &ExperimentConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let (sampled, _) = function_and_grid(cfg, opts)?;
    let spectra = mode_spectra(&sampled.tensor)?;
    let mut table = Table::new("spectrum", &["mode", "alpha", "sigma", "lambda", "tail_energy", "noise"]);
    let mut fits = Table::new(
        "fit",
        &["mode", "lambda_exponent", "sigma_exponent", "r2", "window_first", "window_last"],
    );
    for (j, s) in spectra.iter().enumerate() {
        for (a, &sigma) in s.values().iter().enumerate() {
            table.push(vec![
                (j + 1).to_string(),
                (a + 1).to_string(),
                num(sigma),
                num(sigma * sigma),
                num(s.tail_energy(a + 1)),
                s.is_noise(a).to_string(),
            ]);
        }
        match fit_decay_exponent(s) {
            Ok(fit) => {
                fits.push(vec![
                    (j + 1).to_string(),
                    num(fit.exponent),
                    num(fit.exponent / 2.0),
                    num(fit.r2),
                    fit.window.0.to_string(),
                    fit.window.1.to_string(),
                ]);
                report.notes.push(format!(
                    "Mode {}: λ(α) ~ α^{:.3} (σ ~ α^{:.3}) over α ∈ [{}, {}], r² = {:.4}.",
                    j + 1,
                    fit.exponent,
                    fit.exponent / 2.0,
                    fit.window.0,
                    fit.window.1,
                    fit.r2
                ));
            }
            Err(e) => report.notes.push(format!("Mode {}: no decay fit ({e}).", j + 1)),
        }
    }
    report.tables.push(table);
    report.tables.push(fits);
    Ok(())
}

fn schedule_only(cfg: &ExperimentConfig, report: &mut Report) -> Result<(), CliError> {
    let sc = cfg.require_scheduler()?;
    let s = schedule(sc.regime, &sc.params()).map_err(|e| CliError::config("scheduler", e.to_string()))?;
    let mut table = Table::new("schedule", &["j", "rank", "active"]);
    for (j, &r) in s.ranks.iter().enumerate() {
        let active = s.m.is_none_or(|m| j < m);
        table.push(vec![(j + 1).to_string(), r.to_string(), active.to_string()]);
    }
    report.tables.push(table);
    report.json.push(("schedule.json".into(), format!("{}\n", s.to_json())));
    report.notes.push(format!(
        "Regime {}: ranks {}, predicted cost {}{}.",
        s.regime.as_str(),
        list(&s.ranks),
        s.predicted_cost,
        if s.cost_saturated { " (saturated)" } else { "" }
    ));
    if let (Some(m), Some(printed)) = (s.m, s.printed_m_value) {
        report.notes.push(format!(
            "Truncation index M = {m}; the printed form ε^(k/(1+δ′)) evaluates to {printed:.6} and is reported only."
        ));
        // cost ≤ M·exp(ε^{-n/k})², evaluated in logs
        let n = sc.dims[0] as f64;
        let log_bound = (m as f64).ln() + 2.0 * sc.epsilon.powf(-n / sc.k);
        report.check(|| "weighted TT cost vs M·exp(ε^(-n/k))²".into(), (s.predicted_cost as f64).ln(), log_bound);
    }
    Ok(())
}

fn predicted_lambda_exponent(spec: Option<&FunctionSpec>, dims: &[usize]) -> Option<f64> {
    match spec?.smoothness {
        Smoothness::Finite(k) => {
            let n = *dims.iter().min()? as f64;
            Some(-(2.0 * k / n + 1.0))
        }
        Smoothness::Analytic => None,
    }
}

fn decay_rate(cfg: &ExperimentConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let grid = cfg.require_grid()?;
    let f = cfg.require_function()?;
    let sizes = cfg.grid_sizes.clone().unwrap_or_else(|| vec![grid.points_per_axis]);
    let mut table = Table::new(
        "decay",
        &[
            "points_per_axis",
            "mode",
            "lambda_exponent",
            "predicted_exponent",
            "r2",
            "window_first",
            "window_last",
            "pass",
        ],
    );
    for (i, &n) in sizes.iter().enumerate() {
        let g = GridSpec::new(n, grid.rule).map_err(|e| CliError::config(format!("grid_sizes[{i}]"), e.to_string()))?;
        let sampled = sample_function(f, &g, opts)?;
        let predicted = predicted_lambda_exponent(sampled.spec.as_ref(), &f.dims);
        for (j, s) in mode_spectra(&sampled.tensor)?.iter().enumerate() {
            let Ok(fit) = fit_decay_exponent(s) else {
                report.notes.push(format!("N = {n}, mode {}: spectrum too short to fit.", j + 1));
                continue;
            };
            let pass = match predicted {
                Some(p) => report.check(
                    || format!("N = {n}, mode {}: λ-exponent vs predicted {p:.3} + {DECAY_SLACK}", j + 1),
                    fit.exponent,
                    p + DECAY_SLACK,
                ),
                None => String::new(),
            };
            table.push(vec![
                n.to_string(),
                (j + 1).to_string(),
                num(fit.exponent),
                predicted.map(num).unwrap_or_default(),
                num(fit.r2),
                fit.window.0.to_string(),
                fit.window.1.to_string(),
                pass,
            ]);
            report.notes.push(format!(
                "N = {n}, mode {}: fitted λ-exponent {:.3}{}.",
                j + 1,
                fit.exponent,
                predicted.map(|p| format!(", predicted {p:.3}")).unwrap_or_default()
            ));
        }
    }
    report.tables.push(table);
    Ok(())
}

fn smoothness_k(cfg: &ExperimentConfig, spec: Option<&FunctionSpec>) -> Result<f64, CliError> {
    if let Some(sc) = &cfg.scheduler {
        return Ok(sc.k);
    }
    match spec.map(|s| s.smoothness) {
        Some(Smoothness::Finite(k)) => Ok(k),
        _ => Err(CliError::config("scheduler.k", "required when the function has no finite smoothness")),
    }
}

fn rank_vs_eps(cfg: &ExperimentConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let (sampled, _) = function_and_grid(cfg, opts)?;
    let format = cfg.require_format()?;
    let f = cfg.require_function()?;
    let epsilons = cfg.epsilons.as_ref().ok_or_else(|| CliError::config("epsilons", "missing"))?;
    let k = smoothness_k(cfg, sampled.spec.as_ref())?;
    let t = &sampled.tensor;
    let base = match &cfg.scheduler {
        Some(sc) => sc.clone(),
        None => SchedulerConfig {
            regime: Regime::TuckerUnweighted,
            epsilon: 0.5,
            k,
            dims: f.dims.clone(),
            delta: None,
            delta_prime: None,
            gamma: None,
        },
    };
    let mut table = Table::new(
        "rank_vs_eps",
        &[
            "epsilon",
            "format",
            "scheduled_ranks",
            "used_ranks",
            "error",
            "bound",
            "relative_error",
            "predicted_cost",
            "cost",
            "bound_pass",
            "tolerance_ranks",
            "tolerance_relative_error",
            "tolerance_pass",
        ],
    );
    for (i, &eps) in epsilons.iter().enumerate() {
        let mut sc = base.clone();
        sc.epsilon = eps;
        let (regime, ranks) =
            scheduled_ranks(&sc, format, &f.dims).map_err(|e| CliError::config(format!("epsilons[{i}]"), e.to_string()))?;
        let mut params: SchedulerParams = sc.params();
        params.dims = f.dims.clone();
        let predicted = schedule(regime, &params)?.cost();
        let used = match format {
            Format::Tucker => clamp_tucker(t.extents(), &ranks),
            _ => clamp_tt(t.extents(), &ranks),
        };
        let o = decompose_with(t, format, RankChoice::Fixed(&used))?;
        let bound_pass = report.check(
            || format!("ε = {eps}: {} error vs tail bound", format.as_str()),
            o.error,
            o.bound + BOUND_SLACK * o.norm,
        );
        let tol = match decompose_with(t, format, RankChoice::Tolerance(eps)) {
            Ok(tol) => Some(tol),
            Err(CliError::Lowrank(Error::BelowNoiseFloor { .. })) => None,
            Err(e) => return Err(e),
        };
        let (tol_ranks, tol_err, tol_pass) = match &tol {
            Some(tol) => {
                let r = rel(tol.error, tol.norm);
                let pass = report.check(
                    || format!("ε = {eps}: {} tolerance run", format.as_str()),
                    r,
                    eps * (1.0 + 1e-12),
                );
                (list(&tol.ranks), num(r), pass)
            }
            None => ("below-noise-floor".into(), String::new(), String::new()),
        };
        table.push(vec![
            num(eps),
            format.as_str().into(),
            list(&ranks),
            list(&used),
            num(o.error),
            num(o.bound),
            num(rel(o.error, o.norm)),
            predicted.value.to_string(),
            o.cost.value.to_string(),
            bound_pass,
            tol_ranks,
            tol_err,
            tol_pass,
        ]);
    }
    report.tables.push(table);
    Ok(())
}

fn dim_robustness(cfg: &ExperimentConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let sc = cfg.require_scheduler()?;
    let n = *sc.dims.first().ok_or_else(|| CliError::config("scheduler.dims", "must be non-empty"))?;
    let ms = cfg.m_values.clone().unwrap_or_else(|| vec![2, 4, 8, 16, 32, 64]);
    if ms.iter().any(|&m| m < 2) {
        return Err(CliError::config("m_values", "every m must be ≥ 2"));
    }
    let regimes = [
        Regime::TuckerUnweighted,
        Regime::TuckerWeighted,
        Regime::TtUnweighted,
        Regime::TtWeighted,
    ];
    let mut table = Table::new(
        "dim_robustness",
        &["m", "regime", "log_cost", "predicted_cost", "cost_saturated", "delta_log_cost_per_mode"],
    );
    let mut log_costs = std::collections::BTreeMap::new();
    for regime in regimes {
        let mut prev: Option<(usize, f64)> = None;
        for &m in &ms {
            let mut p = sc.params();
            p.dims = vec![n; m];
            let s = match schedule(regime, &p) {
                Ok(s) => s,
                Err(Error::InvalidSchedule(msg)) if msg.contains("exceeds") => {
                    table.push(vec![m.to_string(), regime.as_str().into(), "overflow".into(), String::new(), "true".into(), String::new()]);
                    report.notes.push(format!("{} at m = {m}: {msg}.", regime.as_str()));
                    prev = None;
                    continue;
                }
                Err(e) => return Err(CliError::config("scheduler", e.to_string())),
            };
            let lc = s.log_cost();
            let delta = prev.map(|(pm, pl)| num((lc - pl) / (m - pm) as f64)).unwrap_or_default();
            table.push(vec![
                m.to_string(),
                regime.as_str().into(),
                num(lc),
                s.predicted_cost.to_string(),
                s.cost_saturated.to_string(),
                delta,
            ]);
            log_costs.insert((regime.as_str(), m), lc);
            prev = Some((m, lc));
        }
    }
    report.tables.push(table);

    let mut checks = Table::new("dim_checks", &["check", "value", "bound", "pass"]);
    if let (Some(&a), Some(&b)) = (
        log_costs.get(&(Regime::TuckerWeighted.as_str(), 16)),
        log_costs.get(&(Regime::TuckerWeighted.as_str(), 64)),
    ) {
        let growth = (b - a) / a;
        let pass = report.check(|| "weighted Tucker log-cost growth 16 → 64".into(), growth, 0.01);
        checks.push(vec!["weighted_tucker_log_cost_growth_16_64".into(), num(growth), num(0.01), pass]);
    }
    if let (Some(&a), Some(&b)) = (
        log_costs.get(&(Regime::TuckerUnweighted.as_str(), 16)),
        log_costs.get(&(Regime::TuckerUnweighted.as_str(), 64)),
    ) {
        let slope = (b - a) / 48.0;
        let expected = n as f64 / sc.k * (1.0 / sc.epsilon).ln();
        let dev = (slope - expected).abs() / expected;
        let pass = report.check(|| "unweighted Tucker log-cost slope deviation".into(), dev, 0.1);
        checks.push(vec!["unweighted_tucker_slope_deviation".into(), num(dev), num(0.1), pass]);
    }
    report.tables.push(checks);

    if let Some(spot) = &cfg.spot_check {
        spot_check(sc, spot, opts, report)?;
    }
    Ok(())
}

fn spot_check(sc: &SchedulerConfig, spot: &config::SpotCheck, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let n = sc.dims[0];
    let m = spot.m;
    let delta_prime = sc
        .delta_prime
        .ok_or_else(|| CliError::config("scheduler.delta_prime", "required for the spot check"))?;
    let gamma = sc.gamma.clone().unwrap_or_else(|| default_gamma(m, sc.k, delta_prime));
    let grid = GridSpec::trapezoid(spot.points_per_axis)
        .map_err(|e| CliError::config("spot_check.points_per_axis", e.to_string()))?;
    let limit = SPOT_CHECK_CONSTANT * (m as f64).sqrt() * sc.epsilon;
    let mut table = Table::new(
        "spot_check",
        &["function", "format", "scheduled_ranks", "used_ranks", "relative_error", "bound", "pass"],
    );
    for (i, id) in spot.functions.iter().enumerate() {
        let fc = FunctionConfig {
            id: id.clone(),
            dims: vec![n; m],
            params: Default::default(),
            gamma: Some(gamma.clone()),
        };
        let sampled = sample_function(&fc, &grid, opts).map_err(|e| match e {
            CliError::Config { message, .. } => CliError::config(format!("spot_check.functions[{i}]"), message),
            other => other,
        })?;
        let t = &sampled.tensor;
        for format in [Format::Tucker, Format::Tt] {
            let (_, ranks) = scheduled_ranks(sc, format, &fc.dims)?;
            let used = match format {
                Format::Tucker => clamp_tucker(t.extents(), &ranks),
                _ => clamp_tt(t.extents(), &ranks),
            };
            let o = decompose_with(t, format, RankChoice::Fixed(&used))?;
            let r = rel(o.error, o.norm);
            let pass = report.check(|| format!("spot check {id} {}", format.as_str()), r, limit);
            table.push(vec![
                id.clone(),
                format.as_str().into(),
                list(&ranks),
                list(&used),
                num(r),
                num(limit),
                pass,
            ]);
        }
    }
    report.tables.push(table);
    Ok(())
}

fn compare_formats(cfg: &ExperimentConfig, opts: &Options, report: &mut Report) -> Result<(), CliError> {
    let (sampled, _) = function_and_grid(cfg, opts)?;
    let f = cfg.require_function()?;
    let t = &sampled.tensor;
    let mut outcomes = Vec::new();
    for format in Format::ALL {
        let o = if let Some(sc) = &cfg.scheduler {
            let (_, ranks) = scheduled_ranks(sc, format, &f.dims)?;
            let used = match format {
                Format::Tucker => clamp_tucker(t.extents(), &ranks),
                _ => clamp_tt(t.extents(), &ranks),
            };
            decompose_with(t, format, RankChoice::Fixed(&used))?
        } else {
            let tol = cfg
                .tolerance
                .ok_or_else(|| CliError::config("tolerance", "compare-formats needs `tolerance` or `scheduler`"))?;
            decompose_with(t, format, RankChoice::Tolerance(tol))?
        };
        outcomes.push(o);
    }
    let mut table = Table::new(
        "compare",
        &["format", "ranks", "error", "bound", "relative_error", "tucker_cost", "tt_cost", "storage", "pass"],
    );
    let mut md = vec!["| format | ranks | relative error | cost | storage | seconds |".to_string(), "|---|---|---|---|---|---|".into()];
    for o in &outcomes {
        let pass = report.check(
            || format!("{} error vs tail bound", o.format.as_str()),
            o.error,
            o.bound + BOUND_SLACK * o.norm,
        );
        let (tucker_cost, tt_cost) = match o.format {
            Format::Tucker => (o.cost.value.to_string(), String::new()),
            _ => (String::new(), o.cost.value.to_string()),
        };
        table.push(vec![
            o.format.as_str().into(),
            list(&o.ranks),
            num(o.error),
            num(o.bound),
            num(rel(o.error, o.norm)),
            tucker_cost,
            tt_cost,
            o.storage.to_string(),
            pass,
        ]);
        md.push(format!(
            "| {} | {} | {:.3e} | {} | {} | {:.3} |",
            o.format.as_str(),
            list(&o.ranks),
            rel(o.error, o.norm),
            o.cost.value,
            o.storage,
            o.seconds
        ));
        report.timings.push((format!("decompose {}", o.format.as_str()), o.seconds));
    }
    report.notes.extend(md);
    report.tables.push(table);
    report.tables.push(steps_table(&outcomes.iter().collect::<Vec<_>>()));

    if let Some(sc) = cfg.scheduler.as_ref().filter(|sc| sc.regime.is_weighted()) {
        report.tables.push(saturation_table(sc, f.dims.len())?);
    }
    Ok(())
}

/// Log-costs of the weighted schedules on the first `m` modes, `m = 2..=total`.
fn saturation_table(sc: &SchedulerConfig, total: usize) -> Result<Table, CliError> {
    let mut table = Table::new(
        "saturation",
        &["m", "tucker_log_cost", "tt_log_cost", "delta_tucker_log_cost", "delta_tt_log_cost"],
    );
    let n = sc.dims.first().copied().unwrap_or(1);
    let mut prev: Option<(f64, f64)> = None;
    for m in 2..=total.max(2) {
        let mut p = sc.params();
        p.dims = vec![n; m];
        let tu = schedule(Regime::TuckerWeighted, &p).map_err(|e| CliError::config("scheduler", e.to_string()))?;
        let tt = schedule(Regime::TtWeighted, &p).map_err(|e| CliError::config("scheduler", e.to_string()))?;
        let (a, b) = (tu.log_cost(), tt.log_cost());
        let (da, db) = prev.map(|(pa, pb)| (num(a - pa), num(b - pb))).unwrap_or_default();
        table.push(vec![m.to_string(), num(a), num(b), da, db]);
        prev = Some((a, b));
    }
    Ok(table)
}
