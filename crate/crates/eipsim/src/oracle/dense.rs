//! Dense state-vector and density-matrix simulation over mixed-radix
//! registers. Slow and exact; used only to check the symbolic engine.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn root_of_unity(k: i64, d: usize) -> C {
    C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / d as f64)
}

/// X|j⟩ = |j ⊖ 1⟩.
pub fn shift_x(d: usize) -> DMatrix<C> {
    DMatrix::from_fn(d, d, |r, col| if r == (col + d - 1) % d { c(1.0) } else { c(0.0) })
}

/// Z|j⟩ = ω^j |j⟩.
pub fn clock_z(d: usize) -> DMatrix<C> {
    DMatrix::from_fn(d, d, |r, col| if r == col { root_of_unity(r as i64, d) } else { c(0.0) })
}

pub fn qft(d: usize) -> DMatrix<C> {
    let s = 1.0 / (d as f64).sqrt();
    DMatrix::from_fn(d, d, |m, n| root_of_unity((m * n) as i64, d) * s)
}

pub fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

pub fn kron_vec(a: &DVector<C>, b: &DVector<C>) -> DVector<C> {
    a.kronecker(b)
}

/// |0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ X on (qubit, qudit).
pub fn controlled_x(d: usize) -> DMatrix<C> {
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(&DMatrix::identity(d, d));
    m.view_mut((d, d), (d, d)).copy_from(&shift_x(d));
    m
}

/// Bilateral counter gate on (A pair, A aux, B pair, B aux).
pub fn build_bcx(d: usize) -> DMatrix<C> {
    let cx = controlled_x(d);
    kron(&cx, &cx)
}

/// (1/√d) Σ_k ω^{km} |k⟩|k ⊖ n⟩.
pub fn qudit_bell(d: usize, m: usize, n: usize) -> DVector<C> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = DVector::zeros(d * d);
    for k in 0..d {
        v[k * d + (k + d - n % d) % d] = root_of_unity((k * m) as i64, d) * s;
    }
    v
}

/// (1/√d) Σ_k |k k k⟩.
pub fn qudit_ghz(d: usize) -> DVector<C> {
    let s = 1.0 / (d as f64).sqrt();
    let mut v = DVector::zeros(d * d * d);
    for k in 0..d {
        v[(k * d + k) * d + k] = c(s);
    }
    v
}

pub fn basis(dim: usize, i: usize) -> DVector<C> {
    let mut v = DVector::zeros(dim);
    v[i] = c(1.0);
    v
}

pub fn projector(v: &DVector<C>) -> DMatrix<C> {
    v * v.adjoint()
}

/// Entry-wise max deviation.
pub fn deviation(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Deviation of U†U from the identity.
pub fn unitarity_error(u: &DMatrix<C>) -> f64 {
    deviation(&(u.adjoint() * u), &DMatrix::identity(u.nrows(), u.ncols()))
}

/// Deviation of Σ K†K from the identity.
pub fn completeness_error(kraus: &[DMatrix<C>]) -> f64 {
    let dim = kraus[0].ncols();
    let sum = kraus
        .iter()
        .fold(DMatrix::zeros(dim, dim), |acc, k| acc + k.adjoint() * k);
    deviation(&sum, &DMatrix::identity(dim, dim))
}

pub fn apply_channel(rho: &DMatrix<C>, kraus: &[DMatrix<C>]) -> DMatrix<C> {
    kraus
        .iter()
        .fold(DMatrix::zeros(rho.nrows(), rho.ncols()), |acc, k| {
            acc + k * rho * k.adjoint()
        })
}

/// Kraus set of ρ ↦ pρ + (1−p)/d Σ_j X^j ρ X^{−j}.
pub fn shift_noise_kraus(d: usize, p: f64) -> Vec<DMatrix<C>> {
    let x = shift_x(d);
    let mut out = vec![DMatrix::identity(d, d) * c((p + (1.0 - p) / d as f64).sqrt())];
    let mut power = x.clone();
    for _ in 1..d {
        out.push(&power * c(((1.0 - p) / d as f64).sqrt()));
        power = &x * power;
    }
    out
}

/// Kraus set of ρ ↦ (1−p)ρ + p·1/d, via the d² generalized Paulis.
pub fn depolarizing_kraus(d: usize, p: f64) -> Vec<DMatrix<C>> {
    let x = shift_x(d);
    let z = clock_z(d);
    let mut out = Vec::with_capacity(d * d);
    let mut xa = DMatrix::identity(d, d);
    for a in 0..d {
        let mut op = xa.clone();
        for b in 0..d {
            let w = if a == 0 && b == 0 {
                1.0 - p + p / (d * d) as f64
            } else {
                p / (d * d) as f64
            };
            out.push(&op * c(w.sqrt()));
            op = &op * &z;
        }
        xa = &xa * &x;
    }
    out
}

/// Pure state on a register of subsystems with the given dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    dims: Vec<usize>,
    amps: DVector<C>,
}

impl DenseState {
    pub fn new(dims: Vec<usize>, amps: DVector<C>) -> Self {
        assert_eq!(dims.iter().product::<usize>(), amps.len(), "dimension mismatch");
        Self { dims, amps }
    }

    /// Tensor product of parts, each given as (subsystem dims, amplitudes).
    pub fn product(parts: &[(Vec<usize>, DVector<C>)]) -> Self {
        let mut dims = Vec::new();
        let mut amps = DVector::from_element(1, c(1.0));
        for (d, a) in parts {
            dims.extend_from_slice(d);
            amps = kron_vec(&amps, a);
        }
        Self::new(dims, amps)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<C> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            out[i] = index % self.dims[i];
            index /= self.dims[i];
        }
        out
    }

    /// Apply `op` to the listed subsystems, in the listed order.
    pub fn apply(&mut self, op: &DMatrix<C>, sites: &[usize]) {
        let strides = self.strides();
        let local: usize = sites.iter().map(|&s| self.dims[s]).product();
        assert_eq!(op.nrows(), local, "operator does not fit the sites");
        let offsets: Vec<usize> = (0..local)
            .map(|mut j| {
                let mut off = 0;
                for &s in sites.iter().rev() {
                    off += (j % self.dims[s]) * strides[s];
                    j /= self.dims[s];
                }
                off
            })
            .collect();
        let mut out = self.amps.clone();
        for base in 0..self.amps.len() {
            let digits = self.digits(base);
            if sites.iter().any(|&s| digits[s] != 0) {
                continue;
            }
            let sub = DVector::from_fn(local, |j, _| self.amps[base + offsets[j]]);
            let next = op * sub;
            for j in 0..local {
                out[base + offsets[j]] = next[j];
            }
        }
        self.amps = out;
    }

    /// Controlled X^reps from a qubit onto a qudit, by basis permutation.
    pub fn controlled_shift(&mut self, control: usize, target: usize, reps: usize) {
        let d = self.dims[target];
        let strides = self.strides();
        let mut out = DVector::zeros(self.amps.len());
        for i in 0..self.amps.len() {
            let digits = self.digits(i);
            let j = if digits[control] == 1 {
                let t = digits[target];
                let moved = (t + d - reps % d) % d;
                i - t * strides[target] + moved * strides[target]
            } else {
                i
            };
            out[j] = self.amps[i];
        }
        self.amps = out;
    }

    /// Joint Z-basis outcome distribution of the listed sites, mixed radix.
    pub fn probabilities(&self, sites: &[usize]) -> Vec<f64> {
        let size: usize = sites.iter().map(|&s| self.dims[s]).product();
        let mut out = vec![0.0; size];
        for (i, a) in self.amps.iter().enumerate() {
            let digits = self.digits(i);
            let key = sites.iter().fold(0, |k, &s| k * self.dims[s] + digits[s]);
            out[key] += a.norm_sqr();
        }
        out
    }

    /// Unnormalized post-measurement state for Z outcomes on `sites`.
    pub fn project(&self, sites: &[usize], outcome: &[usize]) -> Self {
        let mut amps = self.amps.clone();
        for (i, a) in amps.iter_mut().enumerate() {
            let digits = self.digits(i);
            if sites.iter().zip(outcome).any(|(&s, &o)| digits[s] != o) {
                *a = c(0.0);
            }
        }
        Self {
            dims: self.dims.clone(),
            amps,
        }
    }

    /// Reduced density matrix of the leading `keep` subsystems.
    pub fn reduced_leading(&self, keep: usize) -> DMatrix<C> {
        let dk: usize = self.dims[..keep].iter().product();
        let rest = self.amps.len() / dk;
        let m = DMatrix::from_fn(dk, rest, |r, col| self.amps[r * rest + col]);
        &m * m.adjoint()
    }
}

/// Qubit rotation exp(−iθX/2).
pub fn rx(theta: f64) -> DMatrix<C> {
    let (s, co) = (theta / 2.0).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c(co), C::new(0.0, -s), C::new(0.0, -s), c(co)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_states_are_orthonormal() {
        let d = 3;
        for a in 0..d * d {
            for b in 0..d * d {
                let x = qudit_bell(d, a / d, a % d);
                let y = qudit_bell(d, b / d, b % d);
                let ip = x.dotc(&y).norm();
                assert!((ip - f64::from(u8::from(a == b))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn permutation_gate_matches_matrix() {
        let d = 3;
        let v = DVector::from_fn(2 * d * 2 * d, |i, _| C::new(i as f64, 1.0 - i as f64));
        let mut a = DenseState::new(vec![2, d, 2, d], v.clone());
        let mut b = a.clone();
        a.apply(&build_bcx(d), &[0, 1, 2, 3]);
        b.controlled_shift(0, 1, 1);
        b.controlled_shift(2, 3, 1);
        assert!((a.amplitudes() - b.amplitudes()).norm() < 1e-12);
    }
}
