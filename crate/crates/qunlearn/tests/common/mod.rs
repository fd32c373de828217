//! Reference simulator for the acceptance suite: every gate is expanded to a
//! dense 2ⁿ×2ⁿ matrix via Kronecker products and applied by matrix-vector
//! multiplication. Deliberately shares no code with the library's stride
//! kernels.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity2() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn proj0() -> Mat2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]]
}

pub fn proj1() -> Mat2 {
    [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn pauli_x() -> Mat2 {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn ry_matrix(theta: f64) -> Mat2 {
    let (sin, cos) = (theta / 2.0).sin_cos();
    [[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]]
}

pub fn rz_matrix(theta: f64) -> Mat2 {
    let half = theta / 2.0;
    [
        [c(half.cos(), -half.sin()), c(0.0, 0.0)],
        [c(0.0, 0.0), c(half.cos(), half.sin())],
    ]
}

/// Dense square matrix in row-major order.
#[derive(Clone)]
pub struct DenseMatrix {
    pub dim: usize,
    pub entries: Vec<Complex64>,
}

impl DenseMatrix {
    fn from_mat2(m: &Mat2) -> Self {
        DenseMatrix {
            dim: 2,
            entries: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
        }
    }

    fn kron(&self, rhs: &DenseMatrix) -> DenseMatrix {
        let dim = self.dim * rhs.dim;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for ar in 0..self.dim {
            for ac in 0..self.dim {
                let a = self.entries[ar * self.dim + ac];
                for br in 0..rhs.dim {
                    for bc in 0..rhs.dim {
                        let row = ar * rhs.dim + br;
                        let col = ac * rhs.dim + bc;
                        entries[row * dim + col] = a * rhs.entries[br * rhs.dim + bc];
                    }
                }
            }
        }
        DenseMatrix { dim, entries }
    }

    fn add(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.dim, rhs.dim);
        DenseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn apply(&self, state: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.dim, state.len());
        (0..self.dim)
            .map(|row| {
                (0..self.dim)
                    .map(|col| self.entries[row * self.dim + col] * state[col])
                    .sum()
            })
            .collect()
    }
}

/// Kronecker chain with `per_qubit[q]` acting on qubit q; qubit 0 is the
/// least-significant index bit, so the fold runs from the highest qubit down.
fn kron_chain(per_qubit: &[Mat2]) -> DenseMatrix {
    let mut result = DenseMatrix::from_mat2(per_qubit.last().expect("at least one qubit"));
    for m in per_qubit.iter().rev().skip(1) {
        result = result.kron(&DenseMatrix::from_mat2(m));
    }
    result
}

pub fn single_qubit_operator(n_qubits: usize, target: usize, gate: &Mat2) -> DenseMatrix {
    let mut per_qubit = vec![identity2(); n_qubits];
    per_qubit[target] = *gate;
    kron_chain(&per_qubit)
}

/// CX as |0⟩⟨0|_c ⊗ I + |1⟩⟨1|_c ⊗ X_t, each term a full Kronecker chain.
pub fn cx_operator(n_qubits: usize, control: usize, target: usize) -> DenseMatrix {
    let mut keep = vec![identity2(); n_qubits];
    keep[control] = proj0();
    let mut flip = vec![identity2(); n_qubits];
    flip[control] = proj1();
    flip[target] = pauli_x();
    kron_chain(&keep).add(&kron_chain(&flip))
}

/// Z on one qubit as a full matrix, for reference ⟨Z⟩ readout.
pub fn z_operator(n_qubits: usize, target: usize) -> DenseMatrix {
    let z = [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(-1.0, 0.0)],
    ];
    single_qubit_operator(n_qubits, target, &z)
}

pub fn zero_state(n_qubits: usize) -> Vec<Complex64> {
    let mut state = vec![c(0.0, 0.0); 1 << n_qubits];
    state[0] = c(1.0, 0.0);
    state
}

pub fn expectation(state: &[Complex64], operator: &DenseMatrix) -> f64 {
    let applied = operator.apply(state);
    state
        .iter()
        .zip(&applied)
        .map(|(amp, out)| (amp.conj() * out).re)
        .sum()
}
