use eipsim::oracle::*;

fn assert_check(c: Check) {
    assert!(c.passed(), "{}: {:e} > {:e}", c.name, c.deviation, c.tolerance);
}

#[test]
fn gates() {
    assert_check(check_gates(7));
    assert_check(check_bell_identities(5));
}

#[test]
fn counter_gates_match_symbolic_engine() {
    assert_check(check_counter_gates(3, 7));
    assert_check(check_ghz_gates(3));
}

#[test]
fn channels() {
    assert_check(check_kraus(7));
    assert_check(check_amplitude_damping(0.8));
    assert_check(check_amplitude_damping(0.35));
    assert_check(check_bell_channels(50, 3).unwrap());
    for (d, q, a) in [(2, 0.9, 1), (5, 0.9, 4), (7, 0.5, 3)] {
        assert_check(check_noisy_gate(d, q, a));
    }
}

#[test]
fn embedding_and_isotropic_aux() {
    for k in 1..=3 {
        for f in [0.6, 0.85, 0.99] {
            assert_check(validate_embedding(f, k).unwrap());
        }
    }
    assert_check(check_product_orthogonality(2, 3));
    assert_check(check_product_orthogonality(3, 2));
    for d in 2..=7 {
        assert_check(validate_isotropic(d));
    }
}

#[test]
fn recurrence_round() {
    assert_check(check_dejmps([0.7, 0.15, 0.1, 0.05]));
    assert_check(check_dejmps([0.9, 0.05, 0.05, 0.0]));
}

#[test]
fn suite_passes() {
    let checks = verify_suite().unwrap();
    assert!(checks.len() >= 16);
    assert!(checks.iter().all(Check::passed));
}

#[test]
fn sign_flip_is_caught() {
    use eipsim::state::{measure_aux_distribution, AuxQudit, Configuration, PairState};
    // 01 and 10 swapped
    let flipped = |c: &Configuration, reps: &[usize], aux: AuxQudit| {
        let out = c.states().iter().zip(reps).fold(aux, |a, (&s, &r)| {
            let s = match s {
                PairState::Err01 => PairState::Err10,
                PairState::Err10 => PairState::Err01,
                other => other,
            };
            a.shifted(s, r as u64)
        });
        measure_aux_distribution(&out)
    };
    let c = check_counter_gates_against(2, 3, &flipped);
    assert!(!c.passed());
    assert!(c.deviation > 0.5);
}
