//! The ten acceptance criteria, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eipsim::analytics::*;
use eipsim::ghz::{GhzEnsemble, GhzPairState};
use eipsim::montecarlo::{run_point, trial_rng, McStats, SimulationPoint, Workload};
use eipsim::noise::{AuxPoolSpec, AuxSource};
use eipsim::oracle::*;
use eipsim::protocols::*;
use eipsim::state::{Configuration, PairState, ProductEnsemble};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn pairs(ensemble: ProductEnsemble, protocol: ProtocolKind, params: ProtocolParams) -> SimulationPoint {
    SimulationPoint {
        workload: Workload::Pairs {
            ensemble,
            protocol,
            block_size: None,
        },
        params,
    }
}

fn mc(point: &SimulationPoint, index: u32, trials: u64) -> McStats {
    run_point(point, index, trials, 2024).expect("valid point")
}

fn two_alt_yield_numbers() -> Outcome {
    let ya = two_alt_yield(8);
    let bound = determine_all_bound(8, 2);
    if (ya - 0.159).abs() > 1e-3 || (bound - 0.149).abs() > 1e-3 {
        return Err(format!("Ya = {ya:.5}, bound = {bound:.5}"));
    }
    let runs = 1_000_000u32;
    let params = ProtocolParams::default();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for t in 0..runs {
        let mut rng = trial_rng(1, 0, t);
        let a = rng.gen_range(1..=8);
        let b = loop {
            let b = rng.gen_range(1..=8);
            if b != a {
                break b;
            }
        };
        let c = Configuration::with_errors(8, &[(a, PairState::Err01), (b, PairState::Err01)]);
        let y = two_alt_run(&c, &params, &mut rng).map_err(|e| e.to_string())?.net_yield();
        sum += y;
        sum_sq += y * y;
    }
    let n = runs as f64;
    let mean = sum / n;
    let se = ((sum_sq / n - mean * mean) / (n - 1.0)).sqrt();
    ensure(
        (mean - ya).abs() <= 3.0 * se,
        format!("Ya = {ya:.5}, bound = {bound:.5}, MC = {mean:.5} ± {se:.1e}"),
    )
}

fn damp_soundness() -> Outcome {
    let params = ProtocolParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut checked = 0;
    for code in 0u32..256 {
        if code.count_ones() > 5 {
            continue;
        }
        let errors: Vec<(usize, PairState)> = (0..8)
            .filter(|i| code >> i & 1 == 1)
            .map(|i| (i + 1, PairState::Err01))
            .collect();
        let c = Configuration::with_errors(8, &errors);
        let r = eip_damp_run(&c, &params, &mut rng).map_err(|e| e.to_string())?;
        checked += 1;
        if r.aborted {
            continue;
        }
        let located: Vec<usize> = errors.iter().map(|e| e.0).collect();
        if !r.all_correct() || r.discarded != located || r.local_fidelity().is_some_and(|f| f != 1.0) {
            return Err(format!("wrong location on {located:?}"));
        }
    }
    ensure(checked == 219, format!("{checked} configurations, all located"))
}

fn damp_resources() -> Outcome {
    let (n, f) = (16, 0.95);
    let k_max = k_max_opt(n, 2);
    let params = ProtocolParams {
        k_max: Some(k_max),
        ..Default::default()
    };
    let point = pairs(ProductEnsemble::rank2_damped(n, f).unwrap(), ProtocolKind::Damp, params);
    let s = mc(&point, 0, 100_000);
    let want = expected_resources_damp(n, f, Some(k_max), 2);
    let (got, se) = (s.resources.mean(), s.resources.se());
    let fit = (8..=300)
        .map(|n| (two_identical_location_fit(n) - two_identical_location_cost(n)).abs())
        .fold(0.0, f64::max);
    ensure(
        (got - want).abs() <= 4.0 * se && fit <= 0.15,
        format!("R = {got:.4} ± {se:.1e} vs {want:.4}; fit deviation {fit:.3}"),
    )
}

fn lambda_fidelity_laws() -> Outcome {
    let params = ProtocolParams::default();
    let kind = ProtocolKind::Lambda { lambda: 2 };
    let mut worst: f64 = 0.0;
    let mut index = 0;
    for n in [8, 16, 32] {
        for f in [0.9, 0.95, 0.99] {
            let s = mc(&pairs(ProductEnsemble::rank3(n, f).unwrap(), kind, params), index, 100_000);
            index += 1;
            let want = global_fidelity_lambda(n, f, 2);
            let z = (s.global.mean() - want).abs() / s.global.se().max(1e-300);
            if z > 4.0 {
                return Err(format!("global fidelity at n={n}, F={f}: {} vs {want}", s.global.mean()));
            }
            worst = worst.max(z);
        }
    }
    for n in [8, 12] {
        let f = 0.9;
        let s = mc(&pairs(ProductEnsemble::rank3(n, f).unwrap(), kind, params), index, 200_000);
        index += 1;
        for b in [Scenario::NoErrors, Scenario::One, Scenario::TwoIdentical, Scenario::TwoDifferent] {
            let (got, se) = s.branch_fidelity(b);
            if got.is_nan() {
                continue;
            }
            let want = local_fidelity_exact(n, f, 2, b).map_err(|e| e.to_string())?;
            if (got - want).abs() > 4.0 * se + 1e-12 {
                return Err(format!("{b} local fidelity at n={n}: {got} ± {se} vs {want}"));
            }
        }
    }
    // two pairs are always resolved
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for a in PairState::SAMPLED.into_iter().take(3) {
        for b in PairState::SAMPLED.into_iter().take(3) {
            let r = eip_lambda_run(&Configuration::new(vec![a, b]), &params, &mut rng)
                .map_err(|e| e.to_string())?;
            if !r.all_correct() || r.local_fidelity().is_some_and(|x| x != 1.0) {
                return Err(format!("n=2 run on {a:?},{b:?} left an error"));
            }
        }
    }
    let exact_two = [0.6, 0.9].iter().all(|&f| {
        global_fidelity_lambda(2, f, 2) == 1.0 && local_fidelity_lambda(2, f, 2).unwrap().0 == 1.0
    });
    ensure(exact_two, format!("worst global-fidelity z = {worst:.2}; F'=1 at n=2"))
}

fn aeip3_dominance() -> Outcome {
    let ensemble = ProductEnsemble::rank3(16, 0.95).unwrap();
    let params = ProtocolParams::default();
    let a = mc(&pairs(ensemble, ProtocolKind::Aeip3, params), 0, 1_000_000);
    let e = mc(&pairs(ensemble, ProtocolKind::Lambda { lambda: 2 }, params), 1, 1_000_000);
    let diff = a.local.mean() - e.local.mean();
    let se = (a.local.se().powi(2) + e.local.se().powi(2)).sqrt();
    ensure(
        diff > 3.0 * se,
        format!(
            "aEIP(3) {:.6} vs EIP(2) {:.6}, gap {:.1}σ",
            a.local.mean(),
            e.local.mean(),
            diff / se
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let checks = [
        check_counter_gates(3, 7),
        check_gates(7),
        check_bell_identities(7),
        check_kraus(7),
        check_amplitude_damping(0.8),
        check_bell_channels(20, 1).map_err(|e| e.to_string())?,
    ];
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{} ({:.1e})", c.name, c.deviation))
        .collect();
    let tv = checks[0].deviation;
    ensure(failed.is_empty(), format!("TV {tv:.1e}; failures: {failed:?}"))
}

/// Independent count of plateaus: distinct per-pair surprisal gaps over
/// every (targets, 01, 10) split of the string.
fn distinct_gaps(n: usize, f: f64) -> Vec<f64> {
    let e = (1.0 - f) / 2.0;
    let s = -(f * f.log2() + 2.0 * e * e.log2());
    let mut out: Vec<f64> = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            let p = f.powi(i as i32) * e.powi(j as i32) * e.powi(k as i32);
            let gap = (-p.log2() / n as f64 - s).abs();
            if !out.iter().any(|&g| (g - gap).abs() < 1e-9) {
                out.push(gap);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn hashing_steps() -> Outcome {
    let (n, f) = (16, 0.9);
    let gaps = distinct_gaps(n, f);
    let bound = |delta: f64| hashing_fidelity_bound(&HashingBoundParams { n, fidelity: f, delta });
    let mut plateaus = 1;
    let mut last = bound(0.0);
    let mut edges = vec![0.0];
    edges.extend(gaps.iter().copied().filter(|&g| g > 1e-12));
    edges.push(edges.last().unwrap() + 1.0);
    for w in edges.windows(2) {
        // constant inside, a rise across the right edge
        let (lo, hi) = (w[0], w[1]);
        let inside: Vec<f64> = (1..10).map(|t| bound(lo + (hi - lo) * t as f64 / 10.0)).collect();
        if inside.iter().any(|&v| v != inside[0]) || inside[0] < last {
            return Err(format!("not a step function on ({lo}, {hi})"));
        }
        if inside[0] > last {
            plateaus += 1;
        }
        last = inside[0];
    }
    let counted = hashing_plateau_count(n, f);
    ensure(
        counted == plateaus && plateaus == edges.len() - 1,
        format!("{plateaus} plateaus, reported {counted}"),
    )
}

fn fidelity_tradeoff() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut runs = 0;
    let mut fractional = 0;
    while runs < 10_000 {
        let n = rng.gen_range(2..=24);
        let f = rng.gen_range(0.6..1.0);
        let choice = rng.gen_range(0..7);
        let mut params = ProtocolParams {
            lambda: rng.gen_range(1..=3),
            ..Default::default()
        };
        if rng.gen_bool(0.3) {
            params.aux = AuxPoolSpec::new(AuxSource::Isotropic(rng.gen_range(0.5..1.0)), false).unwrap();
        }
        let point = match choice {
            0 => pairs(ProductEnsemble::rank2_damped(n, f).unwrap(), ProtocolKind::Damp, params),
            1 => pairs(ProductEnsemble::rank3(n, f).unwrap(), ProtocolKind::Lambda { lambda: 1 }, params),
            2 => pairs(ProductEnsemble::rank3(n, f).unwrap(), ProtocolKind::Lambda { lambda: 2 }, params),
            3 => pairs(ProductEnsemble::rank3(n, f).unwrap(), ProtocolKind::Aeip3, params),
            4 => pairs(ProductEnsemble::werner(n, f).unwrap(), ProtocolKind::FullRank { lambda: 2 }, params),
            5 => SimulationPoint {
                workload: Workload::Pairs {
                    ensemble: ProductEnsemble::rank3(n.max(8), f).unwrap(),
                    protocol: ProtocolKind::Lambda { lambda: 2 },
                    block_size: Some(4),
                },
                params,
            },
            _ => SimulationPoint {
                workload: Workload::Ghz {
                    ensemble: GhzEnsemble::new(n, f, (1.0 - f) / 2.0).unwrap(),
                },
                params: ProtocolParams { lambda: 1, ..params },
            },
        };
        let mut trial = trial_rng(rng.gen(), 0, 0);
        let r = eipsim::montecarlo::run_trial(&point, &mut trial).map_err(|e| e.to_string())?;
        runs += 1;
        let m = r.output_size();
        let (Some(local), Some(global)) = (r.local_fidelity(), r.global_fidelity()) else {
            continue;
        };
        if local != 0.0 && local != 1.0 {
            fractional += 1;
        }
        let (lo, hi) = fidelity_bounds(global, m);
        if local < lo - 1e-12 || local > hi + 1e-12 {
            return Err(format!("F = {local}, Fg = {global}, m = {m} outside [{lo}, {hi}]"));
        }
    }
    Ok(format!("{runs} runs within bounds, {fractional} with fractional fidelity"))
}

fn noisy_aux_eip1() -> Outcome {
    let f = 0.99;
    let params = ProtocolParams {
        lambda: 1,
        abort_policy: AbortPolicy::OnInconsistency,
        noisy_gate_q: 0.99,
        aux: AuxPoolSpec::new(AuxSource::EmbeddedRank2(f), true).unwrap(),
        ..Default::default()
    };
    let kind = ProtocolKind::Lambda { lambda: 1 };
    let mut detail = Vec::new();
    for (i, n) in [4usize, 8, 16].into_iter().enumerate() {
        // every position readout decodes, so the step cannot abort
        let d = params.aux.physical_dim(n as u64);
        let covered = (0..d).all(|v| {
            [PairState::Err01, PairState::Err10]
                .iter()
                .all(|&k| decode_position(v, d, n, k).is_some())
        });
        let s = mc(&pairs(ProductEnsemble::rank3(n, f).unwrap(), kind, params), i as u32, 100_000);
        if !covered || s.location_aborts != 0 {
            return Err(format!("location aborts at n={n}: {}", s.location_aborts));
        }
        detail.push(format!("n={n}: 0"));
    }
    for (i, n) in [5usize, 9, 17].into_iter().enumerate() {
        let s = mc(&pairs(ProductEnsemble::rank3(n, f).unwrap(), kind, params), 10 + i as u32, 100_000);
        let (p, se) = s.location_abort_rate();
        if !(p > 3.0 * se && se > 0.0) {
            return Err(format!("location abort rate at n={n}: {p} ± {se}"));
        }
        detail.push(format!("n={n}: {p:.2e}"));
    }
    let s = mc(&pairs(ProductEnsemble::rank3(16, f).unwrap(), kind, params), 20, 200_000);
    let (out, se) = (s.local.mean(), s.local.se());
    ensure(
        out - f > 3.0 * se,
        format!("{}; F' = {out:.6} ± {se:.1e} at n=16", detail.join(", ")),
    )
}

fn ghz_round_trip() -> Outcome {
    let params = ProtocolParams {
        lambda: 1,
        ..Default::default()
    };
    let n = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut configs = 0;
    for pos in 1..=n {
        let mut labels = vec![GhzPairState::PhaseErr];
        labels.extend((1..=6).map(GhzPairState::Sep));
        for s in labels {
            let mut c = vec![GhzPairState::Target; n];
            c[pos - 1] = s;
            let r = ghz_purify(&c, &params, &mut rng).map_err(|e| e.to_string())?;
            configs += 1;
            let ok = match s {
                GhzPairState::PhaseErr => r.corrected == vec![pos] && r.kept.len() == n,
                _ => r.discarded == vec![pos] && r.corrected.is_empty(),
            };
            if !ok || !r.all_correct() || r.aborted {
                return Err(format!("{s:?} at {pos} mishandled"));
            }
        }
    }
    let dense = check_ghz_gates(3);
    ensure(
        dense.passed(),
        format!("{configs} configurations; dense tCX TV {:.1e}", dense.deviation),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("two-error halving yield", two_alt_yield_numbers),
        ("damp soundness", damp_soundness),
        ("damp resource accounting", damp_resources),
        ("EIP(2) fidelity laws", lambda_fidelity_laws),
        ("aEIP(3) dominance", aeip3_dominance),
        ("oracle equivalence", oracle_equivalence),
        ("hashing bound steps", hashing_steps),
        ("fidelity trade-off", fidelity_tradeoff),
        ("noisy-aux EIP(1)", noisy_aux_eip1),
        ("GHZ round trip", ghz_round_trip),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {:2} PASS {name} ({secs:.1}s): {d}", i + 1),
            Err(d) => {
                failures += 1;
                println!("criterion {:2} FAIL {name} ({secs:.1}s): {d}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
