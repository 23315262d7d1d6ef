//! Checks of the symbolic engine against dense simulation.

use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dense::*;
use crate::analytics::dejmps_step;
use crate::channels::{self, BellBasisDensity};
use crate::error::Result;
use crate::ghz::{ghz_eng, ghz_epg, GhzPairState};
use crate::noise::{embedded_weight, fidelity_after_noisy_gate, gate_survival, make_noisy_aux};
use crate::state::{
    apply_eng, apply_epg, measure_aux_distribution, AuxQudit, Configuration, PairState,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Largest deviation seen between the two computations.
    pub deviation: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.deviation <= self.tolerance
    }
}

fn to_dense(m: &Matrix4<C>) -> DMatrix<C> {
    DMatrix::from_iterator(4, 4, m.iter().cloned())
}

fn vec_deviation(a: &DVector<C>, b: &DVector<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn omega(k: i64, d: usize) -> C {
    C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

/// Amplitudes of a sampled pair state on (A, B).
pub fn pair_vector(s: PairState) -> Option<DVector<C>> {
    match s {
        PairState::Target => Some(qudit_bell(2, 0, 0)),
        PairState::PhaseErr => Some(qudit_bell(2, 1, 0)),
        PairState::Err01 => Some(basis(4, 1)),
        PairState::Err10 => Some(basis(4, 2)),
        PairState::Dephased => None,
    }
}

pub fn ghz_triple_vector(s: GhzPairState) -> DVector<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match s {
        GhzPairState::Target => (basis(8, 0) + basis(8, 7)) * C::new(h, 0.0),
        GhzPairState::PhaseErr => (basis(8, 0) - basis(8, 7)) * C::new(h, 0.0),
        GhzPairState::Sep(x) => basis(8, x as usize),
    }
}

/// Unitarity of X, Z, QFT and the counter gate, and the counter gate
/// against the bilateral CNOT at d = 2.
pub fn check_gates(d_max: usize) -> Check {
    let mut dev: f64 = 0.0;
    for d in 2..=d_max {
        for u in [shift_x(d), clock_z(d), qft(d), build_bcx(d)] {
            dev = dev.max(unitarity_error(&u));
        }
    }
    // |a1 a2 b1 b2⟩ ↦ |a1, a2⊕a1, b1, b2⊕b1⟩
    let bcnot = DMatrix::from_fn(16, 16, |r, col| {
        let (a1, a2, b1, b2) = ((col >> 3) & 1, (col >> 2) & 1, (col >> 1) & 1, col & 1);
        let image = (a1 << 3) | ((a2 ^ a1) << 2) | (b1 << 1) | (b2 ^ b1);
        C::new(f64::from(u8::from(r == image)), 0.0)
    });
    dev = dev.max(deviation(&build_bcx(2), &bcnot));
    // bCX |mn⟩|Ψkl⟩ = ω^{mk} |mn⟩|Ψ_{k, l⊖m⊕n}⟩
    for d in 2..=d_max {
        for (m, n) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for k in 0..d {
                for l in 0..d {
                    let mut psi = DenseState::product(&[
                        (vec![2, 2], basis(4, 2 * m + n)),
                        (vec![d, d], qudit_bell(d, k, l)),
                    ]);
                    psi.apply(&build_bcx(d), &[0, 2, 1, 3]);
                    let want = kron_vec(&basis(4, 2 * m + n), &qudit_bell(d, k, (l + d + n - m) % d))
                        * omega((m * k) as i64, d);
                    dev = dev.max(vec_deviation(psi.amplitudes(), &want));
                }
            }
        }
    }
    Check::new("gate unitarity and counter action", dev, 1e-12)
}

/// Index interchange under QFT ⊗ QFT† and local X^v Z^w on either side.
///
/// The B-side phase is ω^{−wn}: Z acts on |k ⊖ n⟩ there.
pub fn check_bell_identities(d_max: usize) -> Check {
    let mut dev: f64 = 0.0;
    for d in 2..=d_max {
        let interchange = kron(&qft(d), &qft(d).adjoint());
        let x = shift_x(d);
        let z = clock_z(d);
        let id = DMatrix::identity(d, d);
        for m in 0..d {
            for n in 0..d {
                let psi = qudit_bell(d, m, n);
                let want = qudit_bell(d, n, (d - m) % d) * omega((n * m) as i64, d);
                dev = dev.max(vec_deviation(&(&interchange * &psi), &want));
                for v in 0..d {
                    for w in 0..d {
                        let op = x.pow(v as u32) * z.pow(w as u32);
                        let a_side = kron(&op, &id) * &psi;
                        let want_a = qudit_bell(d, (m + w) % d, (n + d - v) % d)
                            * omega((v * (m + w)) as i64, d);
                        dev = dev.max(vec_deviation(&a_side, &want_a));
                        let b_side = kron(&id, &op) * &psi;
                        let want_b = qudit_bell(d, (m + w) % d, (n + v) % d)
                            * omega(-((w * n) as i64), d);
                        dev = dev.max(vec_deviation(&b_side, &want_b));
                    }
                }
            }
        }
    }
    Check::new("bell index identities", dev, 1e-12)
}

/// Dense readout distribution of (a − b) mod d after counter gates with
/// per-pair repetition counts, on an aux mixed as p Ψ00 + (1−p)/d Σ Ψ0j.
/// Also returns the deviation of the pair register from its input for the
/// ideal aux.
pub fn dense_counter_readout(states: &[PairState], reps: &[usize], d: usize, p: f64) -> (Vec<f64>, f64) {
    let n = states.len();
    let pairs: Vec<DVector<C>> = states
        .iter()
        .map(|&s| pair_vector(s).expect("pure pair state"))
        .collect();
    let mut dist = vec![0.0; d];
    let mut post_dev: f64 = 0.0;
    for j in 0..d {
        let weight = if j == 0 { p } else { 0.0 } + (1.0 - p) / d as f64;
        if weight == 0.0 {
            continue;
        }
        let mut parts: Vec<(Vec<usize>, DVector<C>)> =
            pairs.iter().map(|v| (vec![2, 2], v.clone())).collect();
        parts.push((vec![d, d], qudit_bell(d, 0, j)));
        let mut psi = DenseState::product(&parts);
        for (i, &r) in reps.iter().enumerate() {
            psi.controlled_shift(2 * i, 2 * n, r);
            psi.controlled_shift(2 * i + 1, 2 * n + 1, r);
        }
        let joint = psi.probabilities(&[2 * n, 2 * n + 1]);
        for a in 0..d {
            for b in 0..d {
                dist[(a + d - b) % d] += weight * joint[a * d + b];
            }
        }
        if j == 0 && p == 1.0 {
            let input = pairs
                .iter()
                .fold(DVector::from_element(1, C::new(1.0, 0.0)), |acc, v| kron_vec(&acc, v));
            post_dev = deviation(&psi.reduced_leading(2 * n), &projector(&input));
        }
    }
    (dist, post_dev)
}

fn configurations(n: usize) -> Vec<Vec<PairState>> {
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            (0..n)
                .map(|_| {
                    let s = PairState::SAMPLED[code % 4];
                    code /= 4;
                    s
                })
                .collect()
        })
        .collect()
}

/// Symbolic readout distribution for per-pair repetition counts.
pub type SymbolicReadout = dyn Fn(&Configuration, &[usize], AuxQudit) -> Vec<f64>;

fn engine_readout(c: &Configuration, reps: &[usize], aux: AuxQudit) -> Vec<f64> {
    let eng = reps.iter().all(|&r| r == 1);
    let out = if eng { apply_eng(c, aux) } else { apply_epg(c, aux) };
    measure_aux_distribution(&out)
}

/// Error number and error position gates against the symbolic engine,
/// for every configuration of up to `n_max` pairs.
pub fn check_counter_gates(n_max: usize, d_max: usize) -> Check {
    check_counter_gates_against(n_max, d_max, &engine_readout)
}

/// As `check_counter_gates`, against any symbolic readout.
pub fn check_counter_gates_against(n_max: usize, d_max: usize, symbolic: &SymbolicReadout) -> Check {
    let mut dev: f64 = 0.0;
    for n in 1..=n_max {
        for states in configurations(n) {
            let c = Configuration::new(states.clone());
            for d in 2..=d_max {
                for p in [1.0, 0.6] {
                    let aux = AuxQudit::noisy(d as u64, p);
                    let ones = vec![1; n];
                    let positions: Vec<usize> = (1..=n).collect();
                    let eng = symbolic(&c, &ones, aux);
                    let epg = symbolic(&c, &positions, aux);
                    let (dense_eng, post_eng) = dense_counter_readout(&states, &ones, d, p);
                    let (dense_epg, post_epg) = dense_counter_readout(&states, &positions, d, p);
                    dev = dev
                        .max(total_variation(&eng, &dense_eng))
                        .max(total_variation(&epg, &dense_epg))
                        .max(post_eng)
                        .max(post_epg);
                }
            }
        }
    }
    Check::new("counter gate readouts", dev, 1e-10)
}

/// Tripartite counter gates on two triples against the symbolic indices.
pub fn check_ghz_gates(d: usize) -> Check {
    let labels: Vec<GhzPairState> = [GhzPairState::Target, GhzPairState::PhaseErr]
        .into_iter()
        .chain((1..=6).map(GhzPairState::Sep))
        .collect();
    let mut dev: f64 = 0.0;
    for &s1 in &labels {
        for &s2 in &labels {
            let c = [s1, s2];
            for (reps, symbolic) in [([1, 1], ghz_eng(&c, d as u64)), ([1, 2], ghz_epg(&c, d as u64))] {
                let mut psi = DenseState::product(&[
                    (vec![2, 2, 2], ghz_triple_vector(s1)),
                    (vec![2, 2, 2], ghz_triple_vector(s2)),
                    (vec![d, d, d], qudit_ghz(d)),
                ]);
                for (t, &r) in reps.iter().enumerate() {
                    for party in 0..3 {
                        psi.controlled_shift(3 * t + party, 6 + party, r);
                    }
                }
                let joint = psi.probabilities(&[6, 7, 8]);
                let mut dist = vec![0.0; d * d];
                for (key, pr) in joint.iter().enumerate() {
                    let (a, b, cc) = (key / (d * d), (key / d) % d, key % d);
                    dist[((a + d - b) % d) * d + (a + d - cc) % d] += pr;
                }
                let mut want = vec![0.0; d * d];
                want[symbolic.0 as usize * d + symbolic.1 as usize] = 1.0;
                dev = dev.max(total_variation(&dist, &want));
            }
        }
    }
    Check::new("ghz counter gate readouts", dev, 1e-10)
}

/// Completeness of every Kraus set the crate uses or models.
pub fn check_kraus(d_max: usize) -> Check {
    let mut sets: Vec<Vec<DMatrix<C>>> = vec![
        channels::d1_kraus().iter().map(to_dense).collect(),
        channels::d2_kraus().iter().map(to_dense).collect(),
        channels::d3_kraus().iter().map(to_dense).collect(),
    ];
    for p in [0.0, 0.3, 0.9, 1.0] {
        sets.push(
            channels::bilateral_amplitude_damping_kraus(p)
                .iter()
                .map(to_dense)
                .collect(),
        );
        let single = channels::amplitude_damping_kraus(p);
        sets.push(
            single
                .iter()
                .map(|k| DMatrix::from_iterator(2, 2, k.iter().cloned()))
                .collect(),
        );
        for d in 2..=d_max {
            sets.push(shift_noise_kraus(d, p));
            sets.push(depolarizing_kraus(d, p));
        }
    }
    let dev = sets.iter().map(|s| completeness_error(s)).fold(0.0, f64::max);
    Check::new("kraus completeness", dev, 1e-12)
}

fn sorted_eigenvalues(rho: &DMatrix<C>) -> Vec<f64> {
    let mut ev: Vec<f64> = rho.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Bilateral damping of the singlet has the spectrum of F Ψ00 + (1−F)|01⟩⟨01|.
pub fn check_amplitude_damping(fidelity: f64) -> Check {
    let kraus: Vec<DMatrix<C>> = channels::bilateral_amplitude_damping_kraus(fidelity)
        .iter()
        .map(to_dense)
        .collect();
    let damped = apply_channel(&projector(&qudit_bell(2, 1, 1)), &kraus);
    let model = projector(&qudit_bell(2, 0, 0)) * C::new(fidelity, 0.0)
        + projector(&basis(4, 1)) * C::new(1.0 - fidelity, 0.0);
    let dev = sorted_eigenvalues(&damped)
        .iter()
        .zip(sorted_eigenvalues(&model))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Check::new("amplitude damping spectrum", dev, 1e-12)
}

fn random_density(rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let g = DMatrix::from_fn(4, 4, |_, _| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

fn bell_projector(i: usize) -> DMatrix<C> {
    projector(&qudit_bell(2, i / 2, i % 2))
}

fn bell_weights(rho: &DMatrix<C>) -> [f64; 4] {
    std::array::from_fn(|i| {
        let v = qudit_bell(2, i / 2, i % 2);
        (v.adjoint() * rho * &v)[(0, 0)].re
    })
}

fn matrix4(m: &DMatrix<C>) -> Matrix4<C> {
    Matrix4::from_iterator(m.iter().cloned())
}

/// D1, D2 and the phase-to-flip transform on random input against their
/// expected closed forms.
pub fn check_bell_channels(samples: usize, seed: u64) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev: f64 = 0.0;
    let flip_pair = projector(&basis(4, 1)) + projector(&basis(4, 2));
    for _ in 0..samples {
        let rho = random_density(&mut rng);
        let w = bell_weights(&rho);
        let sym = BellBasisDensity::from_computational(&matrix4(&rho))?;
        // D1 keeps exactly the Bell-diagonal part
        let diag = (0..4).fold(DMatrix::zeros(4, 4), |acc, i| {
            acc + bell_projector(i) * C::new(w[i], 0.0)
        });
        let d1 = channels::depolarize_d1(&sym)?;
        dev = dev.max(deviation(&to_dense(&d1.to_computational()), &diag));
        // D2 on Bell-diagonal input mixes Ψ01 and Ψ11 evenly
        let [t, f01, f10, phase] = channels::d2_product_weights(w);
        debug_assert_eq!(f01, f10);
        let want = bell_projector(0) * C::new(t, 0.0)
            + bell_projector(2) * C::new(phase, 0.0)
            + &flip_pair * C::new(f01, 0.0);
        let d2 = channels::depolarize_d2(&d1)?;
        dev = dev.max(deviation(&to_dense(&d2.to_computational()), &want));
        // H ⊗ H swaps Ψ01 and Ψ10 before D2
        let swapped = [w[0], w[2], w[1], w[3]];
        let [t, f, _, phase] = channels::d2_product_weights(swapped);
        let want = bell_projector(0) * C::new(t, 0.0)
            + bell_projector(2) * C::new(phase, 0.0)
            + &flip_pair * C::new(f, 0.0);
        let moved = channels::transform_phase_to_flip(&d1)?;
        dev = dev.max(deviation(&to_dense(&moved.to_computational()), &want));
    }
    Ok(Check::new("bell-diagonal channels", dev, 1e-12))
}

/// A X_q channel applied `applications` times to an ideal aux: readout
/// survival and single-step fidelity.
pub fn check_noisy_gate(d: usize, q: f64, applications: u32) -> Check {
    let id = DMatrix::identity(d, d);
    let kraus: Vec<DMatrix<C>> = shift_noise_kraus(d, q).iter().map(|k| kron(&id, k)).collect();
    let mut rho = projector(&qudit_bell(d, 0, 0));
    for _ in 0..applications {
        rho = apply_channel(&rho, &kraus);
    }
    let mut dist = vec![0.0; d];
    for a in 0..d {
        for b in 0..d {
            dist[(a + d - b) % d] += rho[(a * d + b, a * d + b)].re;
        }
    }
    let s = gate_survival(q, applications as u64);
    let want: Vec<f64> = (0..d)
        .map(|j| (1.0 - s) / d as f64 + if j == 0 { s } else { 0.0 })
        .collect();
    let mut dev = total_variation(&dist, &want);
    // one gate on a noisy aux
    let p0 = 0.7;
    let noisy = apply_channel(&projector(&qudit_bell(d, 0, 0)), &shift_noise_kraus_bilateral(d, p0));
    let after = apply_channel(&noisy, &kraus);
    let target = qudit_bell(d, 0, 0);
    let fid = |r: &DMatrix<C>| (target.adjoint() * r * &target)[(0, 0)].re;
    let f0 = fid(&noisy);
    dev = dev.max((f0 - make_noisy_aux(d as u64, p0).state_fidelity()).abs());
    dev = dev.max((fid(&after) - fidelity_after_noisy_gate(f0, q, d as u64)).abs());
    Check::new("noisy gate composition", dev, 1e-12)
}

fn shift_noise_kraus_bilateral(d: usize, p: f64) -> Vec<DMatrix<C>> {
    let id = DMatrix::identity(d, d);
    shift_noise_kraus(d, p).iter().map(|k| kron(&id, k)).collect()
}

/// Rows of a k×k binary matrix as bitmasks; invertible over GF(2)?
fn invertible(rows: &[usize]) -> bool {
    let mut m = rows.to_vec();
    let k = m.len();
    for col in 0..k {
        let bit = 1 << col;
        let Some(pivot) = (col..k).find(|&r| m[r] & bit != 0) else {
            return false;
        };
        m.swap(col, pivot);
        for r in 0..k {
            if r != col && m[r] & bit != 0 {
                m[r] ^= m[col];
            }
        }
    }
    true
}

fn apply_binary(rows: &[usize], x: usize) -> usize {
    rows.iter()
        .enumerate()
        .fold(0, |y, (i, &r)| y | (((r & x).count_ones() as usize & 1) << i))
}

/// Embed k copies of F Ψ00 + (1−F) Ψ10 into one 2^k-level pair, twirl over
/// GL(k,2) and swap indices with QFT ⊗ QFT†; the result must be the
/// amplitude-noisy aux of overlap F^k.
pub fn validate_embedding(fidelity: f64, k: u32) -> Result<Check> {
    let k = k as usize;
    let d = 1usize << k;
    let mu = projector(&qudit_bell(2, 0, 0)) * C::new(fidelity, 0.0)
        + projector(&qudit_bell(2, 1, 0)) * C::new(1.0 - fidelity, 0.0);
    let copies = (1..k).fold(mu.clone(), |acc, _| kron(&acc, &mu));
    // qubit order A1 B1 A2 B2 ... → (A1..Ak, B1..Bk)
    let regroup = |i: usize| {
        let (mut a, mut b) = (0, 0);
        for pair in 0..k {
            let shift = 2 * (k - 1 - pair);
            a = (a << 1) | ((i >> (shift + 1)) & 1);
            b = (b << 1) | ((i >> shift) & 1);
        }
        a * d + b
    };
    let mut embedded = DMatrix::zeros(d * d, d * d);
    for r in 0..d * d {
        for col in 0..d * d {
            embedded[(regroup(r), regroup(col))] = copies[(r, col)];
        }
    }
    let group: Vec<Vec<usize>> = (0..1usize << (k * k))
        .map(|code| (0..k).map(|i| (code >> (i * k)) & (d - 1)).collect::<Vec<_>>())
        .filter(|rows| invertible(rows))
        .collect();
    let order: usize = (0..k).map(|i| d - (1 << i)).product();
    let mut dev = (group.len() as f64 - order as f64).abs();
    let mut twirled = DMatrix::zeros(d * d, d * d);
    for g in &group {
        let image = |i: usize| apply_binary(g, i / d) * d + apply_binary(g, i % d);
        for r in 0..d * d {
            for col in 0..d * d {
                twirled[(image(r), image(col))] += embedded[(r, col)];
            }
        }
    }
    twirled /= C::new(group.len() as f64, 0.0);
    let fk = fidelity.powi(k as i32);
    let mut phase_noisy = projector(&qudit_bell(d, 0, 0)) * C::new(fk, 0.0);
    for m in 1..d {
        phase_noisy += projector(&qudit_bell(d, m, 0)) * C::new((1.0 - fk) / (d - 1) as f64, 0.0);
    }
    dev = dev.max(deviation(&twirled, &phase_noisy));
    let u = kron(&qft(d), &qft(d).adjoint());
    let swapped = &u * &twirled * u.adjoint();
    let p = embedded_weight(fidelity, k as u32)?;
    let mut amplitude_noisy = projector(&qudit_bell(d, 0, 0)) * C::new(p, 0.0);
    for j in 0..d {
        amplitude_noisy += projector(&qudit_bell(d, 0, j)) * C::new((1.0 - p) / d as f64, 0.0);
    }
    dev = dev.max(deviation(&swapped, &amplitude_noisy));
    Ok(Check::new(format!("embedding k={k}"), dev, 1e-10))
}

/// Products of amplitude-zero states of sizes d1, d2 have no overlap with
/// any d1·d2-level state of nonzero amplitude index.
pub fn check_product_orthogonality(d1: usize, d2: usize) -> Check {
    let d = d1 * d2;
    let mut dev: f64 = 0.0;
    for k in 0..d2 {
        for j in 0..d1 {
            let outer = qudit_bell(d2, k, 0);
            let inner = qudit_bell(d1, j, 0);
            // |a2 b2⟩|a1 b1⟩ → |a2 d1 + a1, b2 d1 + b1⟩
            let mut v = DVector::zeros(d * d);
            for x in 0..d2 * d2 {
                for y in 0..d1 * d1 {
                    let (a2, b2, a1, b1) = (x / d2, x % d2, y / d1, y % d1);
                    v[(a2 * d1 + a1) * d + b2 * d1 + b1] = outer[x] * inner[y];
                }
            }
            for m in 0..d {
                for n in 1..d {
                    dev = dev.max(qudit_bell(d, m, n).dotc(&v).norm());
                }
            }
        }
    }
    Check::new(format!("product orthogonality {d1}x{d2}"), dev, 1e-12)
}

/// A target pair gated onto a maximally mixed aux pair is left dephased.
pub fn validate_isotropic(d: usize) -> Check {
    let mut avg = DMatrix::zeros(4, 4);
    for k in 0..d {
        for l in 0..d {
            let mut psi = DenseState::product(&[
                (vec![2, 2], qudit_bell(2, 0, 0)),
                (vec![d, d], qudit_bell(d, k, l)),
            ]);
            psi.controlled_shift(0, 2, 1);
            psi.controlled_shift(1, 3, 1);
            avg += psi.reduced_leading(2) / C::new((d * d) as f64, 0.0);
        }
    }
    let want = (projector(&basis(4, 0)) + projector(&basis(4, 3))) * C::new(0.5, 0.0);
    Check::new(format!("isotropic aux d={d}"), deviation(&avg, &want), 1e-12)
}

/// One recurrence round on two Bell-diagonal copies against `dejmps_step`.
pub fn check_dejmps(w: [f64; 4]) -> Check {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = DMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let weight = w[i] * w[j];
            if weight == 0.0 {
                continue;
            }
            let mut psi = DenseState::product(&[
                (vec![2, 2], qudit_bell(2, i / 2, i % 2)),
                (vec![2, 2], qudit_bell(2, j / 2, j % 2)),
            ]);
            psi.apply(&rx(half_pi), &[0]);
            psi.apply(&rx(half_pi), &[2]);
            psi.apply(&rx(-half_pi), &[1]);
            psi.apply(&rx(-half_pi), &[3]);
            psi.controlled_shift(0, 2, 1);
            psi.controlled_shift(1, 3, 1);
            for bit in 0..2 {
                let kept = psi.project(&[2, 3], &[bit, bit]);
                out += kept.reduced_leading(2) * C::new(weight, 0.0);
            }
        }
    }
    let success = out.trace().re;
    let got = bell_weights(&(out / C::new(success, 0.0)));
    let (want, p) = dejmps_step(w);
    let dev = got
        .iter()
        .zip(want)
        .map(|(a, b)| (a - b).abs())
        .fold((success - p).abs(), f64::max);
    Check::new("recurrence round", dev, 1e-12)
}

/// Every check at its standard size.
pub fn verify_suite() -> Result<Vec<Check>> {
    let mut out = vec![
        check_gates(7),
        check_bell_identities(5),
        check_counter_gates(3, 7),
        check_ghz_gates(3),
        check_kraus(7),
        check_amplitude_damping(0.8),
        check_bell_channels(20, 7)?,
        check_noisy_gate(5, 0.9, 4),
        check_product_orthogonality(2, 3),
        check_dejmps([0.7, 0.15, 0.1, 0.05]),
    ];
    for k in 1..=3 {
        out.push(validate_embedding(0.85, k)?);
    }
    for d in 2..=7 {
        out.push(validate_isotropic(d));
    }
    Ok(out)
}
