use std::path::Path;

use clap::{Args, ValueEnum};
use klcone::cones::{minimal_cone_strategy, Budget, ConeStatus, StrategyMode, StrategyOptions};
use klcone::coxeter::{CoxeterGroup, CoxeterSpec};
use klcone::groupring::{
    check_feasible_31, check_feasible_33, dihedral_min_basis, groupring_search, GroupRingBasis, GroupRingError,
    SearchOptions,
};
use klcone::hecke::{wgraph_with_cap, HeckeError, KlTable, WGraphMethod};
use klcone::optimize::{
    feasible_region_probe, kkt_residual, maximize_trace, minimize_trace, MaxOptions, Mode, OptError, OptResult,
};
use klcone::rational::rational_to_string;
use klcone::specht::SpechtBundle;
use klcone::tableaux::Partition;
use serde_json::{json, Value};

use crate::config::{parse_lambda, Format, GroupArgs};
use crate::{CliError, Outcome, Status};

const CACHE_ENV: &str = "KLCONE_CACHE_DIR";
const DIHEDRAL_ORDER_CAP: usize = 5040;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Parabolic,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StartArg {
    /// Every tableau maximal for its descent complement
    All,
    /// The last tableau only
    Last,
}

#[derive(Args, Debug)]
pub struct ConeArgs {
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Partition,
    #[arg(long, value_enum, default_value = "all")]
    pub start: StartArg,
    /// Power-iteration step limit
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(value_enum)]
    pub direction: Option<ModeArg>,
    #[arg(long = "mode", value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_parser = parse_lambda)]
    pub lambda: Partition,
    #[arg(long, default_value_t = 8)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// KKT stationarity tolerance (relative to λ_max(G))
    #[arg(long)]
    pub tol: Option<f64>,
    /// Outer augmented-Lagrangian iterations per start
    #[arg(long)]
    pub budget: Option<usize>,
    /// Initial penalty, scaled by λ_max(G)
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Penalty growth factor
    #[arg(long)]
    pub rho_growth: Option<f64>,
    /// Perturbed restarts around each certified point
    #[arg(long)]
    pub kicks: Option<usize>,
}

fn json_body(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn ok(body: String, summary: Vec<String>) -> Outcome {
    Outcome { body, summary, status: Status::Ok }
}

fn group_with_cap(spec: CoxeterSpec, cap: usize) -> Result<CoxeterGroup, CliError> {
    match spec {
        CoxeterSpec::TypeA { rank } if rank + 1 > cap => {
            return Err(CliError::Cap(format!("S_{} exceeds the cap n <= {cap}", rank + 1)));
        }
        CoxeterSpec::Dihedral { m } if 2 * m > DIHEDRAL_ORDER_CAP => {
            return Err(CliError::Cap(format!("I2({m}) exceeds the order cap {DIHEDRAL_ORDER_CAP}")));
        }
        _ => {}
    }
    CoxeterGroup::new(spec).map_err(|e| CliError::Usage(e.to_string()))
}

fn kl_table(group: &CoxeterGroup) -> Result<KlTable, CliError> {
    let dir = std::env::var_os(CACHE_ENV).map(std::path::PathBuf::from);
    KlTable::compute_cached(group, dir.as_deref()).map_err(|e| CliError::Failed(e.to_string()))
}

pub fn kl(group_args: &GroupArgs, cap: usize, format: Format) -> Result<Outcome, CliError> {
    let group = group_with_cap(group_args.spec()?, cap)?;
    let table = kl_table(&group)?;
    let mut rows = Vec::new();
    for x in 0..group.len() {
        for (y, p) in table.basis().column(x) {
            rows.push((group.element(*y as usize).to_string(), group.element(x).to_string(), p.to_string()));
        }
    }
    let body = match format {
        Format::Json => json_body(&json!({
            "group": group.spec().name(),
            "elements": group.elements().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "entries": rows.iter().map(|(y, x, p)| json!({"y": y, "x": x, "h": p})).collect::<Vec<_>>(),
        })),
        _ => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["y", "x", "h"]).map_err(|e| CliError::Failed(e.to_string()))?;
            for (y, x, p) in &rows {
                w.write_record([y, x, p]).map_err(|e| CliError::Failed(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
            String::from_utf8(bytes).expect("CSV of UTF-8 fields")
        }
    };
    Ok(ok(body, vec![format!("{}: {} elements, {} nonzero h_(y,x)", group.spec().name(), group.len(), rows.len())]))
}

pub fn wgraph(lambda: &Partition, method: Method, cap: usize, format: Format) -> Result<Outcome, CliError> {
    let m = match method {
        Method::Parabolic => WGraphMethod::Parabolic,
        Method::Full => WGraphMethod::FullKl,
    };
    let g = wgraph_with_cap(lambda, m, cap).map_err(|e| match e {
        HeckeError::CapExceeded { .. } => CliError::Cap(e.to_string()),
        other => CliError::Failed(other.to_string()),
    })?;
    let body = match format {
        Format::Json => json_body(&g.to_json()),
        _ => g.to_dot(),
    };
    Ok(ok(body, vec![format!("{lambda}: {} vertices, {} edges", g.dim(), g.edges.len())]))
}

pub fn specht(lambda: &Partition) -> Result<Outcome, CliError> {
    let b = SpechtBundle::new(lambda).map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(ok(json_body(&b.export().to_json()), vec![format!("{lambda}: dimension {}", b.dim())]))
}

pub fn cone_verify(a: &ConeArgs) -> Result<Outcome, CliError> {
    let mut opts = StrategyOptions::default();
    if let Some(b) = a.budget {
        opts.budget = Budget { max_iter: b, ..opts.budget };
    }
    opts.mode = match a.start {
        StartArg::All => StrategyMode::Standard,
        StartArg::Last => StrategyMode::LastTableau,
    };
    let report = minimal_cone_strategy(&a.lambda, opts).map_err(|e| CliError::Failed(e.to_string()))?;
    let mut summary = vec![format!(
        "{}: {} of {} tableaux reached",
        a.lambda,
        report.reached.len(),
        report.tableaux.len()
    )];
    for &u in &report.unreached {
        summary.push(format!("unreached: {} (index {})", report.tableaux[u], u + 1));
    }
    let status = match report.status {
        ConeStatus::VerifiedMinimal => Status::Ok,
        ConeStatus::Failed => Status::VerificationFailed,
    };
    Ok(Outcome { body: json_body(&report.to_json()), summary, status })
}

fn upper_entries(r: &OptResult) -> Vec<String> {
    let a = &r.point.a;
    let mut out = Vec::new();
    for i in 0..a.nrows() {
        for j in i + 1..a.ncols() {
            out.push(match &r.a_exact {
                Some(e) => format!("A[{},{}] = {}", i + 1, j + 1, rational_to_string(&e[(i, j)])),
                None => format!("A[{},{}] = {}", i + 1, j + 1, a[(i, j)]),
            });
        }
    }
    out
}

pub fn optimize(a: &OptimizeArgs) -> Result<Outcome, CliError> {
    let mode = match (a.direction, a.mode) {
        (Some(x), Some(y)) if x != y => return Err(CliError::Usage("conflicting optimization modes".into())),
        (Some(x), _) | (None, Some(x)) => x,
        (None, None) => return Err(CliError::Usage("give min or max".into())),
    };
    let b = SpechtBundle::new(&a.lambda).map_err(|e| CliError::Failed(e.to_string()))?;
    let result = match mode {
        ModeArg::Min => minimize_trace(&b),
        ModeArg::Max => {
            let mut opts = MaxOptions { starts: a.starts, seed: a.seed, ..MaxOptions::default() };
            if let Some(t) = a.tol {
                opts.grad_tol = t;
            }
            if let Some(n) = a.budget {
                opts.outer_iters = n;
            }
            if let Some(r) = a.rho0 {
                opts.rho0 = r;
            }
            if let Some(g) = a.rho_growth {
                opts.rho_growth = g;
            }
            if let Some(k) = a.kicks {
                opts.kicks = k;
            }
            maximize_trace(&b, &opts)
        }
    };
    let r = match result {
        Ok(r) => r,
        Err(OptError::NoFeasibleStart(res)) => {
            let v = json!({"lambda": a.lambda.to_string(), "mode": "max", "converged": false, "residual": res});
            return Ok(Outcome {
                body: json_body(&v),
                summary: vec![format!("no start reached a feasible point (residual {res:e})")],
                status: Status::NotConverged,
            });
        }
        Err(e) => return Err(CliError::Failed(e.to_string())),
    };
    let objective = match &r.objective_exact {
        Some(f) => rational_to_string(f),
        None => r.objective.to_string(),
    };
    let mut summary = vec![format!("{} {}: objective {objective}", r.mode.as_str(), a.lambda)];
    if b.dim() <= 4 {
        summary.extend(upper_entries(&r));
    }
    if r.mode == Mode::Max {
        summary.push(format!("local maxima: {}", r.local_maxima.len()));
    }
    let status = if r.converged { Status::Ok } else { Status::NotConverged };
    Ok(Outcome { body: json_body(&r.to_json()), summary, status })
}

pub fn kkt(n: usize) -> Result<Outcome, CliError> {
    let k = kkt_residual(n).map_err(|e| CliError::Usage(e.to_string()))?;
    let v = json!({
        "lambda": format!("({n},1)"),
        "residual": rational_to_string(&k.residual),
        "multipliers": k.multipliers.iter().map(|(s, i, j, mu)| json!({
            "s": s + 1, "i": i + 1, "j": j + 1, "mu": rational_to_string(mu),
        })).collect::<Vec<_>>(),
    });
    Ok(ok(json_body(&v), vec![format!("KKT residual {}", rational_to_string(&k.residual))]))
}

pub fn probe(lambda: &Partition, samples: usize, seed: u64, tol: f64) -> Result<Outcome, CliError> {
    let b = SpechtBundle::new(lambda).map_err(|e| CliError::Failed(e.to_string()))?;
    let p = feasible_region_probe(&b, samples, seed, tol).map_err(|e| CliError::Failed(e.to_string()))?;
    let v = json!({
        "lambda": lambda.to_string(),
        "samples": p.samples,
        "accepted": p.accepted,
        "ranges": p.ranges.iter().map(|((u, w), lo, hi)| json!({"entry": [u + 1, w + 1], "min": lo, "max": hi})).collect::<Vec<_>>(),
        "max_column_norm": p.max_column_norm,
    });
    Ok(ok(json_body(&v), vec![format!("{lambda}: {} of {} samples accepted", p.accepted, p.samples)]))
}

fn gr_error(e: GroupRingError) -> CliError {
    match e {
        GroupRingError::TooLarge(..) => CliError::Cap(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

pub fn gr_dihedral(m: usize, mirror: bool) -> Result<Outcome, CliError> {
    let (group, basis) = dihedral_min_basis(m, mirror).map_err(gr_error)?;
    Ok(ok(
        json_body(&basis.to_json(&group)),
        vec![format!("I2({m}): objective {}", rational_to_string(&basis.objective()))],
    ))
}

pub fn gr_kl(g: &GroupArgs) -> Result<Outcome, CliError> {
    let group = group_with_cap(g.spec()?, 7)?;
    let basis = GroupRingBasis::kl_at_one(&group, &kl_table(&group)?);
    Ok(ok(
        json_body(&basis.to_json(&group)),
        vec![format!("{}: objective {}", group.spec().name(), rational_to_string(&basis.objective()))],
    ))
}

pub fn gr_check(g: &GroupArgs, path: Option<&Path>, with_longest: bool) -> Result<Outcome, CliError> {
    let spec = g.spec()?;
    let group = group_with_cap(spec, 5)?;
    let basis = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            GroupRingBasis::from_json(&group, &v).map_err(gr_error)?
        }
        None => GroupRingBasis::kl_at_one(&group, &kl_table(&group)?),
    };
    let r = check_feasible_31(&group, &basis, with_longest);
    let mut v = json!({
        "group": spec.name(),
        "with_longest": with_longest,
        "feasible": r.feasible,
        "objective": rational_to_string(&r.objective),
        "violation": r.violation.as_ref().map(|x| x.describe(&group)),
    });
    let mut feasible = r.feasible;
    let mut summary = vec![match &r.violation {
        None => format!("feasible, objective {}", rational_to_string(&r.objective)),
        Some(x) => format!("infeasible: {}", x.describe(&group)),
    }];
    if let CoxeterSpec::TypeA { .. } = spec {
        let r33 = check_feasible_33(&group, &basis);
        let name = |w: usize| group.element(w).to_string();
        v["recursion"] = json!({
            "feasible": r33.feasible,
            "mu": r33.mu.iter().map(|((y, x), c)| json!({"y": name(*y), "x": name(*x), "mu": rational_to_string(c)})).collect::<Vec<_>>(),
            "violation": r33.violation.as_ref().map(|x| format!("{x:?}")),
        });
        feasible &= r33.feasible;
        summary.push(format!("recursion constraints {}", if r33.feasible { "hold" } else { "fail" }));
    }
    let status = if feasible { Status::Ok } else { Status::VerificationFailed };
    Ok(Outcome { body: json_body(&v), summary, status })
}

pub fn gr_search(g: &GroupArgs, budget: usize, seed: u64, with_longest: bool) -> Result<Outcome, CliError> {
    let opts = SearchOptions { budget, seed, with_longest };
    match groupring_search(g.spec()?, &opts) {
        Ok((group, r)) => {
            let summary = vec![format!(
                "objective {} (KL at v=1: {}), {} evaluations{}",
                rational_to_string(&r.objective),
                rational_to_string(&r.kl_objective),
                r.evaluations,
                if r.local_minimum { ", local minimum" } else { "" }
            )];
            Ok(ok(json_body(&r.to_json(&group)), summary))
        }
        Err(GroupRingError::BudgetExhausted) => Ok(Outcome {
            body: json_body(&json!({"group": g.spec()?.name(), "error": "budget exhausted"})),
            summary: vec!["budget exhausted before a feasible basis was found".into()],
            status: Status::NotConverged,
        }),
        Err(e) => Err(gr_error(e)),
    }
}
