//! Two-qubit density operators in the Bell basis and the depolarization maps
//! that bring them to product-ensemble form.
//!
//! Basis order is Ψ00, Ψ01, Ψ10, Ψ11 with |Ψij⟩ = 1 ⊗ X^j Z^i (|00⟩+|11⟩)/√2.
//! Kraus operators are given in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C = Complex64;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Columns are the Bell vectors expressed in the computational basis.
pub fn bell_to_computational() -> Matrix4<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let m = Matrix4::new(
        c(h), c(0.0), c(h),  c(0.0),
        c(0.0), c(h), c(0.0), c(h),
        c(0.0), c(h), c(0.0), c(-h),
        c(h), c(0.0), c(-h), c(0.0),
    );
    m
}

/// A 4×4 density matrix with coefficients in the Bell basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BellBasisDensity {
    coeffs: Matrix4<C>,
}

impl BellBasisDensity {
    pub fn new(coeffs: Matrix4<C>) -> Result<Self> {
        let rho = Self { coeffs };
        rho.validate()?;
        Ok(rho)
    }

    /// Bell-diagonal state with weights on Ψ00, Ψ01, Ψ10, Ψ11.
    pub fn diagonal(weights: [f64; 4]) -> Result<Self> {
        let v = Vector4::from_iterator(weights.iter().map(|&w| c(w)));
        Self::new(Matrix4::from_diagonal(&v))
    }

    /// Build from a density matrix in the computational basis.
    pub fn from_computational(rho: &Matrix4<C>) -> Result<Self> {
        let b = bell_to_computational();
        Self::new(b.adjoint() * rho * b)
    }

    /// Pure state given by computational-basis amplitudes.
    pub fn from_pure_computational(amps: [C; 4]) -> Result<Self> {
        let v = Vector4::from_iterator(amps);
        Self::from_computational(&(v * v.adjoint()))
    }

    pub fn coeffs(&self) -> &Matrix4<C> {
        &self.coeffs
    }

    pub fn to_computational(&self) -> Matrix4<C> {
        let b = bell_to_computational();
        b * self.coeffs * b.adjoint()
    }

    pub fn bell_weights(&self) -> [f64; 4] {
        std::array::from_fn(|i| self.coeffs[(i, i)].re)
    }

    /// ⟨Ψ00|ρ|Ψ00⟩.
    pub fn fidelity(&self) -> f64 {
        self.coeffs[(0, 0)].re
    }

    /// Populations of Ψ00, |01⟩, |10⟩ and Ψ10, the product-ensemble weights
    /// when the state is in the image of D2.
    pub fn product_weights(&self) -> [f64; 4] {
        let m = self.to_computational();
        [
            self.coeffs[(0, 0)].re,
            m[(1, 1)].re,
            m[(2, 2)].re,
            self.coeffs[(2, 2)].re,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.coeffs;
        let herm_dev = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_dev > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian, deviation {herm_dev:e}"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let hermitian = (m + m.adjoint()).scale(0.5);
        let min_eig = hermitian
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    /// Apply a channel given by computational-basis Kraus operators.
    pub fn apply_kraus(&self, kraus: &[Matrix4<C>]) -> Result<Self> {
        self.validate()?;
        let rho = self.to_computational();
        let out = kraus
            .iter()
            .fold(Matrix4::zeros(), |acc, k| acc + k * rho * k.adjoint());
        Self::from_computational(&out)
    }
}

fn kron2(a: &Matrix2<C>, b: &Matrix2<C>) -> Matrix4<C> {
    Matrix4::from_fn(|r, col| a[(r / 2, col / 2)] * b[(r % 2, col % 2)])
}

pub fn pauli(i: usize) -> Matrix2<C> {
    let z = c(0.0);
    let o = c(1.0);
    match i {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, C::new(0.0, -1.0), C::new(0.0, 1.0), z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("Pauli index out of range: {i}"),
    }
}

pub fn hadamard() -> Matrix2<C> {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    Matrix2::new(h, h, h, -h)
}

/// {½ σi ⊗ σi}.
pub fn d1_kraus() -> Vec<Matrix4<C>> {
    (0..4)
        .map(|i| kron2(&pauli(i), &pauli(i)).scale(0.5))
        .collect()
}

/// The phase-gate pair e^{iπ/2 |1⟩⟨1|} ⊗ e^{iπ/2 |0⟩⟨0|}, twirled over the
/// cyclic group it generates.
///
/// Its square is −Z⊗Z, so on Bell-diagonal input this is the same channel as
/// the two-element set {1, U}/√2; the full group average makes it idempotent
/// on every input.
pub fn d2_kraus() -> Vec<Matrix4<C>> {
    let i = C::new(0.0, 1.0);
    let u = kron2(
        &Matrix2::new(c(1.0), c(0.0), c(0.0), i),
        &Matrix2::new(i, c(0.0), c(0.0), c(1.0)),
    );
    let mut out = Vec::with_capacity(4);
    let mut power = Matrix4::identity();
    for _ in 0..4 {
        out.push(power.scale(0.5));
        power = u * power;
    }
    out
}

/// {1⊗1, X⊗X}/√2.
pub fn d3_kraus() -> Vec<Matrix4<C>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        Matrix4::identity().scale(s),
        kron2(&pauli(1), &pauli(1)).scale(s),
    ]
}

/// Single-qubit amplitude damping with survival weight `p` on |1⟩.
pub fn amplitude_damping_kraus(p: f64) -> [Matrix2<C>; 2] {
    [
        Matrix2::new(c(1.0), c(0.0), c(0.0), c(p.sqrt())),
        Matrix2::new(c(0.0), c((1.0 - p).sqrt()), c(0.0), c(0.0)),
    ]
}

/// Amplitude damping with the same parameter on both qubits.
pub fn bilateral_amplitude_damping_kraus(p: f64) -> Vec<Matrix4<C>> {
    let k = amplitude_damping_kraus(p);
    let mut out = Vec::with_capacity(4);
    for a in &k {
        for b in &k {
            out.push(kron2(a, b));
        }
    }
    out
}

/// H ⊗ H, the two-level instance of QFT ⊗ QFT†.
pub fn bilateral_hadamard() -> Matrix4<C> {
    let h = hadamard();
    kron2(&h, &h)
}

pub fn depolarize_d1(rho: &BellBasisDensity) -> Result<BellBasisDensity> {
    rho.apply_kraus(&d1_kraus())
}

pub fn depolarize_d2(rho: &BellBasisDensity) -> Result<BellBasisDensity> {
    rho.apply_kraus(&d2_kraus())
}

/// D3, then H⊗H, then D2: moves phase errors into the flip subspace.
pub fn transform_phase_to_flip(rho: &BellBasisDensity) -> Result<BellBasisDensity> {
    let h = bilateral_hadamard();
    rho.apply_kraus(&d3_kraus())?
        .apply_kraus(&[h])?
        .apply_kraus(&d2_kraus())
}

/// Full-rank Bell-diagonal weights (Ψ00, Ψ01, Ψ10, Ψ11) after D2, as
/// (Ψ00, 01, 10, Ψ10) weights.
pub fn d2_product_weights(bell: [f64; 4]) -> [f64; 4] {
    let flip = (bell[1] + bell[3]) / 2.0;
    [bell[0], flip, flip, bell[2]]
}

/// Entry-wise max deviation between two matrices.
pub fn max_deviation(a: &Matrix4<C>, b: &Matrix4<C>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
