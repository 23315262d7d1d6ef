use eipsim::analytics::{
    abort_probability_damp, dejmps_curve, determine_all_bound, expected_resources_damp,
    fidelity_bounds, hashing_fidelity_bound, hashing_p1, hashing_yield, k_max_opt, report_lambda,
    two_alt_yield, yield_damp, HashingBoundParams, RTable,
};
use eipsim::montecarlo::{run_point, McStats, Workload};
use eipsim::oracle::{verify_suite, Check};
use eipsim::protocols::Scenario;

use crate::config::{AnalyzeConfig, Curve, GridPoint, SimulateConfig};
use crate::table::{Cell, Table};
use crate::CliError;

const SIMULATE_COLUMNS: [&str; 16] = [
    "point",
    "protocol",
    "n",
    "fidelity",
    "trials",
    "yield",
    "yield_se",
    "f_local",
    "f_local_se",
    "f_global",
    "f_global_se",
    "abort_rate",
    "abort_rate_se",
    "resources",
    "resources_se",
    "kept",
];

fn label(g: &GridPoint) -> String {
    match g.point.workload {
        Workload::Pairs { protocol, .. } => protocol.label(),
        Workload::Ghz { .. } => "ghz".into(),
    }
}

fn stats(g: &GridPoint, index: u32, trials: u64, seed: u64) -> Result<McStats, CliError> {
    run_point(&g.point, index, trials, seed).map_err(|e| CliError::Config(e.to_string()))
}

fn seed_of(cfg: &SimulateConfig, trials: u64) -> Result<u64, CliError> {
    match cfg.seed {
        Some(s) => Ok(s),
        None if trials == 0 => Ok(0),
        None => Err(CliError::Config("seed: required for simulation".into())),
    }
}

pub fn simulate(cfg: &SimulateConfig) -> Result<Table, CliError> {
    let mut table = Table::new(&SIMULATE_COLUMNS);
    let grid = cfg.grid(cfg.protocol)?;
    let seed = seed_of(cfg, cfg.trials)?;
    if cfg.trials == 0 {
        return Ok(table);
    }
    for (i, g) in grid.iter().enumerate() {
        let s = stats(g, i as u32, cfg.trials, seed)?;
        let (abort, abort_se) = s.abort_rate();
        table.push(vec![
            i.into(),
            label(g).into(),
            g.n.into(),
            g.fidelity.into(),
            s.trials.into(),
            s.net_yield.mean().into(),
            s.net_yield.se().into(),
            s.local.mean().into(),
            s.local.se().into(),
            s.global.mean().into(),
            s.global.se().into(),
            abort.into(),
            abort_se.into(),
            s.resources.mean().into(),
            s.resources.se().into(),
            s.kept.mean().into(),
        ]);
    }
    Ok(table)
}

pub fn compare(cfg: &SimulateConfig) -> Result<Table, CliError> {
    let mut table = Table::new(&[
        "method", "n", "fidelity", "source", "yield", "yield_se", "f_local", "f_global",
    ]);
    let mut protocols = vec![cfg.protocol];
    protocols.extend(cfg.protocols.iter().copied().filter(|p| *p != cfg.protocol));
    let seed = seed_of(cfg, cfg.trials)?;
    let grids = protocols
        .iter()
        .map(|&p| cfg.grid(p))
        .collect::<Result<Vec<_>, _>>()?;
    let mut index = 0u32;
    for (gi, r) in grids[0].iter().enumerate() {
        if cfg.trials > 0 {
            for grid in &grids {
                let g = grid[gi];
                let s = stats(&g, index, cfg.trials, seed)?;
                index += 1;
                table.push(vec![
                    label(&g).into(),
                    g.n.into(),
                    g.fidelity.into(),
                    "monte_carlo".into(),
                    s.net_yield.mean().into(),
                    s.net_yield.se().into(),
                    s.local.mean().into(),
                    s.global.mean().into(),
                ]);
            }
        }
        let hashing = HashingBoundParams::new(r.n, r.fidelity);
        table.push(vec![
            "hashing".into(),
            r.n.into(),
            r.fidelity.into(),
            "analytic".into(),
            hashing_yield(r.fidelity, hashing.delta).into(),
            f64::NAN.into(),
            f64::NAN.into(),
            hashing_fidelity_bound(&hashing).into(),
        ]);
        let e = (1.0 - r.fidelity) / 2.0;
        for point in dejmps_curve([r.fidelity, e, 0.0, e], r.n, cfg.recurrence_rounds)
            .into_iter()
            .skip(1)
        {
            table.push(vec![
                format!("recurrence{}", point.rounds).into(),
                r.n.into(),
                r.fidelity.into(),
                "analytic".into(),
                point.yield_.into(),
                f64::NAN.into(),
                point.fidelity.into(),
                point.global_fidelity.into(),
            ]);
        }
    }
    Ok(table)
}

fn bad(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

pub fn analyze(cfg: &AnalyzeConfig) -> Result<Table, CliError> {
    Ok(match cfg.curve {
        Curve::Damp => {
            let mut t = Table::new(&[
                "n", "fidelity", "k_max", "optimal", "yield", "resources", "abort_probability",
            ]);
            for n in cfg.n_axis()? {
                if n == 0 {
                    return Err(bad("n: must be positive"));
                }
                let best = k_max_opt(n, cfg.fan_out);
                let thresholds = match &cfg.k_max {
                    Some(axis) => axis.sizes("k_max")?,
                    None => vec![best],
                };
                for f in cfg.fidelity_axis()? {
                    for &k in &thresholds {
                        t.push(vec![
                            n.into(),
                            f.into(),
                            k.into(),
                            (k == best).into(),
                            yield_damp(n, f, Some(k), cfg.fan_out).into(),
                            expected_resources_damp(n, f, Some(k), cfg.fan_out).into(),
                            abort_probability_damp(n, f, Some(k)).into(),
                        ]);
                    }
                }
            }
            t
        }
        Curve::Lambda => {
            let mut t = Table::new(&[
                "n",
                "fidelity",
                "lambda",
                "yield",
                "f_local",
                "f_global",
                "resources",
                "p_none",
                "p_one",
                "p_two_identical",
                "p_two_different",
            ]);
            for n in cfg.n_axis()? {
                for f in cfg.fidelity_axis()? {
                    let r = report_lambda(n, f, cfg.lambda, RTable::Exact).map_err(bad)?;
                    let p = |s: Scenario| r.branch_probs.get(&s).copied().unwrap_or(0.0);
                    t.push(vec![
                        n.into(),
                        f.into(),
                        cfg.lambda.into(),
                        r.yield_.into(),
                        r.f_local.into(),
                        r.f_global.into(),
                        r.resources.into(),
                        p(Scenario::NoErrors).into(),
                        p(Scenario::One).into(),
                        p(Scenario::TwoIdentical).into(),
                        p(Scenario::TwoDifferent).into(),
                    ]);
                }
            }
            t
        }
        Curve::TwoAlt => {
            let mut t = Table::new(&["n", "yield", "bound"]);
            for n in cfg.n_axis()? {
                t.push(vec![
                    n.into(),
                    two_alt_yield(n).into(),
                    determine_all_bound(n, 2).into(),
                ]);
            }
            t
        }
        Curve::FidelityBounds => {
            let mut t = Table::new(&["m", "f_global", "f_local_min", "f_local_max"]);
            for m in cfg.n_axis()? {
                if m == 0 {
                    return Err(bad("n: must be positive"));
                }
                for g in cfg.fidelity_axis()? {
                    let (lo, hi) = fidelity_bounds(g, m);
                    t.push(vec![m.into(), g.into(), lo.into(), hi.into()]);
                }
            }
            t
        }
        Curve::Hashing => {
            let mut t = Table::new(&["n", "fidelity", "delta", "p1", "fidelity_bound", "yield"]);
            for n in cfg.n_axis()? {
                for f in cfg.fidelity_axis()? {
                    let deltas = match &cfg.delta {
                        Some(axis) => axis.values("delta")?,
                        None => vec![HashingBoundParams::new(n, f).delta],
                    };
                    for delta in deltas {
                        let p = HashingBoundParams { n, fidelity: f, delta };
                        t.push(vec![
                            n.into(),
                            f.into(),
                            delta.into(),
                            hashing_p1(&p).into(),
                            hashing_fidelity_bound(&p).into(),
                            hashing_yield(f, delta).into(),
                        ]);
                    }
                }
            }
            t
        }
        Curve::Recurrence => {
            let mut t = Table::new(&["n", "fidelity", "rounds", "yield", "f_local", "f_global"]);
            for n in cfg.n_axis()? {
                for f in cfg.fidelity_axis()? {
                    let e = (1.0 - f) / 2.0;
                    for p in dejmps_curve([f, e, 0.0, e], n, cfg.rounds) {
                        t.push(vec![
                            n.into(),
                            f.into(),
                            p.rounds.into(),
                            p.yield_.into(),
                            p.fidelity.into(),
                            p.global_fidelity.into(),
                        ]);
                    }
                }
            }
            t
        }
    })
}

/// Run the oracle suite; `tolerance` replaces every threshold.
pub fn verify(tolerance: Option<f64>) -> Result<(Table, Vec<Check>), CliError> {
    let mut checks = verify_suite().map_err(bad)?;
    if let Some(tol) = tolerance {
        for c in &mut checks {
            c.tolerance = tol;
        }
    }
    let mut t = Table::new(&["check", "deviation", "tolerance", "passed"]);
    for c in &checks {
        t.push(vec![
            Cell::Text(c.name.clone()),
            c.deviation.into(),
            c.tolerance.into(),
            c.passed().into(),
        ]);
    }
    let failed = checks.into_iter().filter(|c| !c.passed()).collect();
    Ok((t, failed))
}
