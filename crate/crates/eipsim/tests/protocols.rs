use eipsim::ghz::GhzPairState;
use eipsim::noise::{AuxPoolSpec, AuxSource};
use eipsim::protocols::*;
use eipsim::state::{Configuration, PairState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use PairState::{Err01, Err10, PhaseErr, Target};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every configuration of length n over `alphabet`.
fn all_configs(n: usize, alphabet: &[PairState]) -> Vec<Configuration> {
    let b = alphabet.len();
    (0..b.pow(n as u32))
        .map(|mut code| {
            let states = (0..n)
                .map(|_| {
                    let s = alphabet[code % b];
                    code /= b;
                    s
                })
                .collect();
            Configuration::new(states)
        })
        .collect()
}

fn errors_of(c: &Configuration) -> Vec<usize> {
    (1..=c.len()).filter(|&p| !c.get(p).is_target()).collect()
}

fn check_invariants(r: &ProtocolResult) {
    assert!((r.resources_ebits - r.ledger_sum()).abs() < 1e-9);
    assert!(r.kept.iter().all(|p| !r.discarded.contains(p)));
    assert_eq!(r.kept.len() + r.discarded.len(), r.n);
    if r.aborted {
        assert!(r.kept.is_empty());
    }
}

#[test]
fn damp_examples() {
    let p = ProtocolParams::default();
    let r = eip_damp_run(&Configuration::all_target(8), &p, &mut rng(1)).unwrap();
    assert_eq!(r.kept, (1..=8).collect::<Vec<_>>());
    assert!((r.resources_ebits - 9f64.log2()).abs() < 1e-12);

    let c = Configuration::with_errors(8, &[(5, Err01)]);
    let r = eip_damp_run(&c, &p, &mut rng(1)).unwrap();
    assert_eq!(r.discarded, vec![5]);
    assert!((r.resources_ebits - 9f64.log2() - 3.0).abs() < 1e-12);

    let c = Configuration::with_errors(16, &[(1, Err01), (2, Err01), (9, Err01)]);
    let p3 = ProtocolParams {
        k_max: Some(5),
        ..p
    };
    let r = eip_damp_run(&c, &p3, &mut rng(1)).unwrap();
    assert_eq!(r.discarded, vec![1, 2, 9]);
    // total count, first block count (d = min(3, 8) + 1), two-identical in the first block, one in the second
    let ds: Vec<u64> = r.transcript.iter().map(|m| m.d).collect();
    assert_eq!(ds[..2], [17, 4]);
    assert_eq!(ds[2], 13);

    let bad = Configuration::with_errors(4, &[(2, Err10)]);
    assert!(eip_damp_run(&bad, &p, &mut rng(1)).is_err());
}

#[test]
fn damp_exhaustive_soundness() {
    let p = ProtocolParams::default();
    for n in 1..=8 {
        for c in all_configs(n, &[Target, Err01]) {
            let r = eip_damp_run(&c, &p, &mut rng(7)).unwrap();
            check_invariants(&r);
            assert!(!r.aborted);
            assert!(r.all_correct(), "{c:?}");
            assert_eq!(r.discarded, errors_of(&c), "{c:?}");
        }
    }
}

#[test]
fn damp_threshold_aborts() {
    let p = ProtocolParams {
        k_max: Some(1),
        ..Default::default()
    };
    let c = Configuration::with_errors(6, &[(1, Err01), (4, Err01)]);
    let r = eip_damp_run(&c, &p, &mut rng(2)).unwrap();
    assert!(r.aborted && r.kept.is_empty());
    assert_eq!(r.transcript.len(), 1);
    let never = ProtocolParams {
        abort_policy: AbortPolicy::Never,
        ..p
    };
    assert!(!eip_damp_run(&c, &never, &mut rng(2)).unwrap().aborted);
}

#[test]
fn two_alt_trace() {
    let c = Configuration::with_errors(8, &[(1, Err01), (2, Err01)]);
    let r = two_alt_run(&c, &ProtocolParams::default(), &mut rng(3)).unwrap();
    assert_eq!(r.kept, vec![5, 6, 7, 8]);
    assert!((r.resources_ebits - 3f64.log2()).abs() < 1e-12);

    let c = Configuration::with_errors(8, &[(2, Err01), (7, Err01)]);
    let r = two_alt_run(&c, &ProtocolParams::default(), &mut rng(3)).unwrap();
    assert_eq!(r.discarded, vec![2, 7]);
    assert!((r.resources_ebits - 3f64.log2() - 4.0).abs() < 1e-12);
}

#[test]
fn two_alt_exhaustive() {
    for n in 3..=20 {
        for a in 1..=n {
            for b in a + 1..=n {
                let c = Configuration::with_errors(n, &[(a, Err01), (b, Err01)]);
                let r = two_alt_run(&c, &ProtocolParams::default(), &mut rng(0)).unwrap();
                check_invariants(&r);
                assert!(r.kept.iter().all(|&q| c.get(q) == Target));
                assert!(r.discarded.contains(&a) && r.discarded.contains(&b));
            }
        }
    }
}

#[test]
fn lambda_exhaustive_soundness() {
    for lambda in 1..=2 {
        let p = ProtocolParams {
            lambda,
            ..Default::default()
        };
        for n in 1..=8 {
            for c in all_configs(n, &[Target, Err01, Err10]) {
                if c.error_count() > lambda {
                    continue;
                }
                let r = eip_lambda_run(&c, &p, &mut rng(11)).unwrap();
                check_invariants(&r);
                assert!(r.all_correct(), "λ={lambda} {c:?}");
                assert_eq!(r.discarded, errors_of(&c));
            }
        }
    }
}

#[test]
fn two_different_decode_exhaustive() {
    let p = ProtocolParams::default();
    for n in 2..=12 {
        for r01 in 1..=n {
            for r10 in (1..=n).filter(|&t| t != r01) {
                let c = Configuration::with_errors(n, &[(r01, Err01), (r10, Err10)]);
                let r = eip_lambda_run(&c, &p, &mut rng(5)).unwrap();
                assert_eq!(r.scenario, Scenario::TwoDifferent);
                let mut want = vec![r01, r10];
                want.sort();
                assert_eq!(r.discarded, want, "n={n} 01@{r01} 10@{r10}");
                assert!(r.anomalies.is_empty());
            }
        }
    }
}

#[test]
fn two_different_direct_branch_trace() {
    // raw readout 10 ≡ −5 (mod 15): the 01 lies 5 below the 10
    let c = Configuration::with_errors(8, &[(2, Err01), (7, Err10)]);
    let r = eip_lambda_run(&c, &ProtocolParams::default(), &mut rng(0)).unwrap();
    let m = &r.transcript[1];
    assert_eq!((m.d, m.outcome), (15, 10));
    // located inside {1, 2, 3}
    assert_eq!(r.transcript[2].d, 3);
    assert_eq!(r.discarded, vec![2, 7]);
}

#[test]
fn lambda_two_misreads_three_errors() {
    let c = Configuration::with_errors(8, &[(1, Err01), (4, Err01), (6, Err01)]);
    let r = eip_lambda_run(&c, &ProtocolParams::default(), &mut rng(0)).unwrap();
    assert_eq!(r.transcript[0].outcome, 3);
    assert_eq!(r.scenario, Scenario::TwoIdentical);
    assert!(!r.all_correct());
    assert!(r
        .anomalies
        .iter()
        .any(|a| a.kind == AnomalyKind::AssumptionViolated));
}

#[test]
fn aeip3_abort_exactness() {
    let p = ProtocolParams::default();
    for n in 1..=8 {
        for c in all_configs(n, &[Target, Err01, Err10]) {
            let k = c.error_count();
            if k > 3 {
                continue;
            }
            let diff = c.count(Err01) as i64 - c.count(Err10) as i64;
            let expect_abort = diff.abs() == 3 || (k == 3 && diff.abs() == 1);
            let r = aeip3_run(&c, &p, &mut rng(13)).unwrap();
            check_invariants(&r);
            assert_eq!(r.aborted, expect_abort, "{c:?}");
            if !r.aborted {
                assert!(r.all_correct(), "{c:?}");
                assert!(r.kept.iter().all(|&q| c.get(q) == Target));
            }
        }
    }
}

#[test]
fn aeip3_examples() {
    let p = ProtocolParams::default();
    let c = Configuration::with_errors(8, &[(2, Err01), (5, Err01), (7, Err10)]);
    let r = aeip3_run(&c, &p, &mut rng(0)).unwrap();
    assert_eq!(r.transcript[0].outcome, 1);
    assert!(r.aborted);
    assert!(!r.local_checks[0].accepted);

    let c = Configuration::with_errors(8, &[(6, Err01)]);
    let r = aeip3_run(&c, &p, &mut rng(0)).unwrap();
    assert!(!r.aborted && r.local_checks[0].accepted);
    assert_eq!(r.kept.len(), 7);

    let c = Configuration::with_errors(8, &[(1, Err01), (3, Err01), (8, Err01)]);
    let r = aeip3_run(&c, &p, &mut rng(0)).unwrap();
    assert_eq!(r.transcript[0].outcome, 3);
    assert!(r.aborted && r.kept.is_empty());
}

#[test]
fn aeip3_strict_keeps_only_clean() {
    let p = ProtocolParams::default();
    for c in all_configs(6, &[Target, Err01, Err10]) {
        if c.error_count() > 3 {
            continue;
        }
        let r = ProtocolKind::Aeip3Strict.run(&c, &p, &mut rng(1)).unwrap();
        assert_eq!(r.aborted, c.error_count() > 0, "{c:?}");
    }
}

#[test]
fn general_lambda_soundness() {
    for lambda in 3..=4 {
        let p = ProtocolParams {
            lambda,
            ..Default::default()
        };
        for (i, c) in all_configs(7, &[Target, Err01, Err10])
            .into_iter()
            .enumerate()
        {
            if c.error_count() > lambda {
                continue;
            }
            let r = eip_lambda_run(&c, &p, &mut rng(i as u64)).unwrap();
            check_invariants(&r);
            // a hidden 01/10 pair escapes the random probes with probability below 2^-10
            if !r.all_correct() {
                assert!(c.count(Err01).min(c.count(Err10)) > 0, "{c:?}");
            }
        }
    }
}

#[test]
fn general_lambda_hidden_pair_rate() {
    let p = ProtocolParams {
        lambda: 3,
        ..Default::default()
    };
    let c = Configuration::with_errors(16, &[(3, Err01), (11, Err10)]);
    let misses = (0..2000)
        .filter(|&s| !eip_lambda_run(&c, &p, &mut rng(s)).unwrap().all_correct())
        .count();
    assert!(misses <= 10, "{misses}");
}

#[test]
fn full_rank_examples() {
    let p = ProtocolParams::default();
    let r = full_rank_run(&Configuration::all_target(6), &p, &mut rng(0)).unwrap();
    assert_eq!(r.kept.len(), 6);

    for seed in 0..40 {
        let c = Configuration::with_errors(8, &[(4, PhaseErr)]);
        let r = full_rank_run(&c, &p, &mut rng(seed)).unwrap();
        assert_eq!(r.discarded, vec![4]);
        assert!(r.all_correct());
    }
}

#[test]
fn blocking_matches_single_run() {
    let p = ProtocolParams::default();
    let c = Configuration::with_errors(10, &[(3, Err01), (8, Err10)]);
    let kind = ProtocolKind::Lambda { lambda: 2 };
    let single = kind.run(&c, &p, &mut rng(9)).unwrap();
    let blocked = blocking_run(&c, 10, kind, &p, &mut rng(9)).unwrap();
    assert_eq!(blocked.combined, single);

    let blocked = blocking_run(&c, 4, kind, &p, &mut rng(9)).unwrap();
    assert_eq!(blocked.blocks.len(), 3);
    assert_eq!(blocked.combined.discarded, vec![3, 8]);
    check_invariants(&blocked.combined);

    let blocked = blocking_run(&c, 1, kind, &p, &mut rng(9)).unwrap();
    assert!(blocked.blocks.iter().all(|b| b.transcript[0].d == 5));
    assert_eq!(blocked.combined.discarded, vec![3, 8]);
    assert!(blocking_run(&c, 11, kind, &p, &mut rng(9)).is_err());
}

#[test]
fn determinism() {
    let p = ProtocolParams {
        lambda: 3,
        ..Default::default()
    };
    let c = Configuration::with_errors(12, &[(2, Err01), (5, Err10), (9, Err01)]);
    let a = eip_lambda_run(&c, &p, &mut rng(42)).unwrap();
    let b = eip_lambda_run(&c, &p, &mut rng(42)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn power_of_two_single_error_never_inconsistent() {
    let p = ProtocolParams {
        lambda: 1,
        aux_dims_power_of_two_only: true,
        abort_policy: AbortPolicy::OnInconsistency,
        ..Default::default()
    };
    for n in [2usize, 4, 8, 16] {
        for pos in 1..=n {
            for kind in [Err01, Err10] {
                let c = Configuration::with_errors(n, &[(pos, kind)]);
                let r = eip_lambda_run(&c, &p, &mut rng(0)).unwrap();
                assert!(!r.aborted && r.all_correct());
            }
        }
    }
    // n = 6 rounds up to 8 but readouts stay in range for a true single error
    let c = Configuration::with_errors(6, &[(2, Err01)]);
    let r = eip_lambda_run(&c, &p, &mut rng(0)).unwrap();
    assert_eq!(r.transcript[1].d, 8);
}

#[test]
fn noisy_pool_ledger() {
    let p = ProtocolParams {
        aux: AuxPoolSpec::new(AuxSource::EmbeddedRank2(0.98), false).unwrap(),
        ..Default::default()
    };
    for seed in 0..50 {
        let c = Configuration::with_errors(9, &[(4, Err01)]);
        let r = eip_lambda_run(&c, &p, &mut rng(seed)).unwrap();
        check_invariants(&r);
        assert!(r.transcript.iter().all(|m| m.d.is_power_of_two()));
    }
}

#[test]
fn ghz_exhaustive_single_errors() {
    let p = ProtocolParams {
        lambda: 1,
        ..Default::default()
    };
    let n = 8;
    for pos in 1..=n {
        let mut c = vec![GhzPairState::Target; n];
        c[pos - 1] = GhzPairState::PhaseErr;
        let r = ghz_purify(&c, &p, &mut rng(0)).unwrap();
        assert_eq!(r.kept.len(), n);
        assert_eq!(r.corrected, vec![pos]);
        assert!(r.all_correct());
        for x in 1..=6 {
            let mut c = vec![GhzPairState::Target; n];
            c[pos - 1] = GhzPairState::sep(x).unwrap();
            let r = ghz_purify(&c, &p, &mut rng(0)).unwrap();
            assert_eq!(r.discarded, vec![pos], "Sep({x}) at {pos}");
            assert!(r.all_correct());
            assert!(r.corrected.is_empty());
        }
    }
    let r = ghz_purify(&vec![GhzPairState::Target; n], &p, &mut rng(0)).unwrap();
    assert_eq!(r.kept.len(), n);
    assert!(r.corrected.is_empty());
}

#[test]
fn ghz_binary_search_trace() {
    let p = ProtocolParams {
        lambda: 1,
        ghz_split_size: 4,
        ..Default::default()
    };
    let mut c = vec![GhzPairState::Target; 8];
    c[6] = GhzPairState::PhaseErr;
    let r = ghz_purify(&c, &p, &mut rng(0)).unwrap();
    let parities: Vec<_> = r
        .transcript
        .iter()
        .filter(|m| m.pattern == GatePattern::GhzParity)
        .map(|m| (m.positions.clone(), m.outcome))
        .collect();
    assert_eq!(parities[0], (vec![1, 2, 3, 4], 0));
    assert_eq!(parities[1], (vec![5, 6, 7, 8], 1));
    assert_eq!(r.corrected, vec![7]);
}

#[test]
fn ghz_two_component_rounds() {
    let p = ProtocolParams {
        lambda: 2,
        ..Default::default()
    };
    for x in 1..=6 {
        for y in 1..=6 {
            let mut c = vec![GhzPairState::Target; 6];
            c[1] = GhzPairState::sep(x).unwrap();
            c[4] = GhzPairState::sep(y).unwrap();
            let r = ghz_purify(&c, &p, &mut rng(0)).unwrap();
            if !r.aborted {
                assert!(r.kept.iter().all(|&q| c[q - 1] == GhzPairState::Target));
            }
        }
    }
}
