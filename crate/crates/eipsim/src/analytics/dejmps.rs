//! The two-copy recurrence protocol, for comparison curves.

use serde::{Deserialize, Serialize};

/// One round on two copies of a Bell-diagonal state.
///
/// Weights are ordered (Ψ00, Ψ01, Ψ10, Ψ11): the first index is the phase
/// bit and the second the amplitude bit. Returns the output weights and
/// the success probability.
pub fn dejmps_step(w: [f64; 4]) -> ([f64; 4], f64) {
    let [a, c, d, b] = w;
    let norm = (a + b).powi(2) + (c + d).powi(2);
    if norm <= 0.0 {
        return (w, 0.0);
    }
    let out = [
        (a * a + b * b) / norm,
        (c * c + d * d) / norm,
        2.0 * a * b / norm,
        2.0 * c * d / norm,
    ];
    (out, norm)
}

/// Permute the three error weights by a bilateral local Clifford so the
/// smallest sits on Ψ11, the slot the map squares into the target.
pub fn dejmps_orient(w: [f64; 4]) -> [f64; 4] {
    let mut errors = [w[1], w[2], w[3]];
    errors.sort_by(|a, b| b.total_cmp(a));
    [w[0], errors[0], errors[1], errors[2]]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DejmpsPoint {
    pub rounds: usize,
    /// Expected output pairs per input pair.
    pub yield_: f64,
    pub fidelity: f64,
    /// Fidelity of the expected output register, F^m.
    pub global_fidelity: f64,
}

/// Yield and fidelity after 0..=rounds recurrence rounds on n input pairs,
/// oriented once up front.
pub fn dejmps_curve(w: [f64; 4], n: usize, rounds: usize) -> Vec<DejmpsPoint> {
    let mut points = Vec::with_capacity(rounds + 1);
    let mut state = dejmps_orient(w);
    let mut y = 1.0;
    for r in 0..=rounds {
        let m = (n as f64 * y).max(1.0);
        points.push(DejmpsPoint {
            rounds: r,
            yield_: y,
            fidelity: state[0],
            global_fidelity: state[0].powf(m),
        });
        let (next, p) = dejmps_step(state);
        state = next;
        y *= p / 2.0;
    }
    points
}
