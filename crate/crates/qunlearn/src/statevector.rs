//! Exact dense statevector simulation.
//!
//! A state over `n` qubits is stored as `2^n` complex amplitudes; qubit `q`
//! is the bit `(index >> q) & 1` of the amplitude index, so qubit 0 is the
//! least-significant bit. Gates are applied as in-place pairwise amplitude
//! updates with stride `1 << target`, never by building the full unitary.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on simulator size: 2^24 amplitudes is 256 MiB of state.
pub const MAX_QUBITS: usize = 24;

/// Where a rotation gate takes its angle from when the circuit is bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngleSource {
    Constant(f64),
    /// Scaled input feature `x[i]`.
    Feature(usize),
    /// Pairwise interaction `x[i] * x[j]`.
    FeatureProduct(usize, usize),
    /// Trainable parameter `w[p]`.
    Param(usize),
}

/// One gate of the {RY, RZ, CX} set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Ry { target: usize, angle: AngleSource },
    Rz { target: usize, angle: AngleSource },
    Cx { control: usize, target: usize },
}

impl Gate {
    pub fn angle_source(&self) -> Option<AngleSource> {
        match self {
            Gate::Ry { angle, .. } | Gate::Rz { angle, .. } => Some(*angle),
            Gate::Cx { .. } => None,
        }
    }
}

/// Dense complex amplitude vector for an `n`-qubit register.
#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// |0...0⟩ on `n_qubits` qubits.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidArgument(format!(
                "n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Squared 2-norm; 1 within 1e-12 after any gate sequence.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidArgument(format!(
                "qubit index {qubit} out of range for {} qubits",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// RY(θ) = [[cos(θ/2), −sin(θ/2)], [sin(θ/2), cos(θ/2)]] on `target`.
    pub fn apply_ry(&mut self, target: usize, theta: f64) -> Result<()> {
        self.check_qubit(target)?;
        let cos = (theta / 2.0).cos();
        let sin = (theta / 2.0).sin();
        let step = 1 << target;
        for block in (0..self.amplitudes.len()).step_by(2 * step) {
            for offset in 0..step {
                let j = block + offset;
                let k = j + step;
                let a = self.amplitudes[j];
                let b = self.amplitudes[k];
                self.amplitudes[j] = cos * a - sin * b;
                self.amplitudes[k] = sin * a + cos * b;
            }
        }
        Ok(())
    }

    /// RZ(θ) = diag(e^{−iθ/2}, e^{iθ/2}) on `target`.
    pub fn apply_rz(&mut self, target: usize, theta: f64) -> Result<()> {
        self.check_qubit(target)?;
        let phase_zero = Complex64::from_polar(1.0, -theta / 2.0);
        let phase_one = Complex64::from_polar(1.0, theta / 2.0);
        let step = 1 << target;
        for block in (0..self.amplitudes.len()).step_by(2 * step) {
            for offset in 0..step {
                let j = block + offset;
                let k = j + step;
                self.amplitudes[j] *= phase_zero;
                self.amplitudes[k] *= phase_one;
            }
        }
        Ok(())
    }

    /// CX: flips `target` where `control` is 1.
    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidArgument(format!(
                "CX control and target collide on qubit {control}"
            )));
        }
        for i in 0..self.amplitudes.len() {
            if (i >> control) & 1 == 1 && (i >> target) & 1 == 0 {
                let flipped = i | (1 << target);
                self.amplitudes.swap(i, flipped);
            }
        }
        Ok(())
    }

    /// Applies `gate` with its angle already resolved; `bound_angle` is
    /// ignored for CX.
    pub fn apply_gate(&mut self, gate: &Gate, bound_angle: f64) -> Result<()> {
        match *gate {
            Gate::Ry { target, .. } => self.apply_ry(target, bound_angle),
            Gate::Rz { target, .. } => self.apply_rz(target, bound_angle),
            Gate::Cx { control, target } => self.apply_cx(control, target),
        }
    }

    /// Pauli-Z expectation on `qubit`: Σ ±|amplitude|², + where the qubit's
    /// bit is 0. Always in [−1, 1].
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mut value = 0.0;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let p = amp.norm_sqr();
            if (i >> qubit) & 1 == 0 {
                value += p;
            } else {
                value -= p;
            }
        }
        Ok(value)
    }
}
