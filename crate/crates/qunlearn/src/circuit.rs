//! Six-qubit classifier circuit: data re-uploading feature map, hardware-
//! efficient ansatz, and Pauli-Z readout.
//!
//! Layout is feature map, ansatz block, feature map again, second ansatz
//! block. Each feature map encodes the four scaled inputs as RY rotations on
//! qubits 0–3 plus CX-conjugated RZ rotations carrying pairwise feature
//! products. Each ansatz block is three repetitions of per-qubit RY and RZ
//! rotations followed by a CX ring. Class logits are ⟨Z⟩ on qubits 3, 4, 5.

use crate::error::{Error, Result};
use crate::statevector::{AngleSource, Gate, StateVector};

pub const N_QUBITS: usize = 6;
pub const N_FEATURES: usize = 4;
pub const N_CLASSES: usize = 3;
pub const ANSATZ_BLOCKS: usize = 2;
pub const ANSATZ_REPS: usize = 3;
pub const N_PARAMS: usize = ANSATZ_BLOCKS * ANSATZ_REPS * N_QUBITS * 2;
pub const READOUT_QUBITS: [usize; N_CLASSES] = [3, 4, 5];

/// Identifies the trainable-parameter ordering convention; stored in
/// checkpoints so a file trained under a different layout is rejected.
pub const PARAM_ORDER_TAG: &str = "block-rep-qubit-ry-rz-v1";

/// Flat index of one ansatz rotation: blocks are outermost, then repetitions,
/// then qubits, with the RY angle immediately before the RZ angle.
pub fn param_index(block: usize, rep: usize, qubit: usize, is_rz: bool) -> usize {
    ((block * ANSATZ_REPS + rep) * N_QUBITS + qubit) * 2 + usize::from(is_rz)
}

/// The fixed gate sequence of the classifier.
#[derive(Clone, Debug)]
pub struct CircuitSpec {
    gates: Vec<Gate>,
}

impl Default for CircuitSpec {
    fn default() -> Self {
        Self::build()
    }
}

impl CircuitSpec {
    pub fn build() -> Self {
        let mut gates = Vec::new();
        for block in 0..ANSATZ_BLOCKS {
            push_feature_map(&mut gates);
            push_ansatz_block(&mut gates, block);
        }
        CircuitSpec { gates }
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        N_PARAMS
    }

    /// Runs the circuit from |0…0⟩ with the given parameter and feature
    /// bindings and returns the final state.
    pub fn run(&self, params: &[f64], features: &[f64]) -> Result<StateVector> {
        if params.len() != N_PARAMS {
            return Err(Error::InvalidArgument(format!(
                "expected {N_PARAMS} parameters, got {}",
                params.len()
            )));
        }
        if features.len() != N_FEATURES {
            return Err(Error::InvalidArgument(format!(
                "expected {N_FEATURES} features, got {}",
                features.len()
            )));
        }
        let mut state = StateVector::zero_state(N_QUBITS)?;
        for gate in &self.gates {
            let angle = match gate.angle_source() {
                Some(AngleSource::Constant(c)) => c,
                Some(AngleSource::Feature(i)) => features[i],
                Some(AngleSource::FeatureProduct(i, j)) => features[i] * features[j],
                Some(AngleSource::Param(p)) => params[p],
                None => 0.0,
            };
            state.apply_gate(gate, angle)?;
        }
        Ok(state)
    }

    /// Class logits: ⟨Z⟩ on the readout qubits.
    pub fn logits(&self, params: &[f64], features: &[f64]) -> Result<[f64; N_CLASSES]> {
        let state = self.run(params, features)?;
        let mut logits = [0.0; N_CLASSES];
        for (slot, &qubit) in READOUT_QUBITS.iter().enumerate() {
            logits[slot] = state.expectation_z(qubit)?;
        }
        Ok(logits)
    }

    /// Class probabilities: softmax over the logits.
    pub fn predict_proba(&self, params: &[f64], features: &[f64]) -> Result<[f64; N_CLASSES]> {
        Ok(softmax(&self.logits(params, features)?))
    }
}

fn push_feature_map(gates: &mut Vec<Gate>) {
    for qubit in 0..N_FEATURES {
        gates.push(Gate::Ry {
            target: qubit,
            angle: AngleSource::Feature(qubit),
        });
    }
    for (a, b) in [(0, 1), (1, 2), (2, 3)] {
        gates.push(Gate::Cx {
            control: a,
            target: b,
        });
        gates.push(Gate::Rz {
            target: b,
            angle: AngleSource::FeatureProduct(a, b),
        });
        gates.push(Gate::Cx {
            control: a,
            target: b,
        });
    }
}

fn push_ansatz_block(gates: &mut Vec<Gate>, block: usize) {
    for rep in 0..ANSATZ_REPS {
        for qubit in 0..N_QUBITS {
            gates.push(Gate::Ry {
                target: qubit,
                angle: AngleSource::Param(param_index(block, rep, qubit, false)),
            });
            gates.push(Gate::Rz {
                target: qubit,
                angle: AngleSource::Param(param_index(block, rep, qubit, true)),
            });
        }
        for qubit in 0..N_QUBITS {
            gates.push(Gate::Cx {
                control: qubit,
                target: (qubit + 1) % N_QUBITS,
            });
        }
    }
}

/// Numerically stable softmax: subtracts the max logit before
/// exponentiating.
pub fn softmax(logits: &[f64; N_CLASSES]) -> [f64; N_CLASSES] {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; N_CLASSES];
    let mut total = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        total += *o;
    }
    for o in &mut out {
        *o /= total;
    }
    out
}

/// Index of the largest entry; ties resolve to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_counts_match_layout() {
        let circuit = CircuitSpec::build();
        assert_eq!(circuit.gates().len(), 134);

        let (mut ry, mut rz, mut cx) = (0, 0, 0);
        for gate in circuit.gates() {
            match gate {
                Gate::Ry { .. } => ry += 1,
                Gate::Rz { .. } => rz += 1,
                Gate::Cx { .. } => cx += 1,
            }
        }
        // Per feature map: 4 RY + 3 RZ + 6 CX. Per ansatz block: 18 of each.
        assert_eq!(ry, 2 * (4 + 18));
        assert_eq!(rz, 2 * (3 + 18));
        assert_eq!(cx, 2 * (6 + 18));
    }

    #[test]
    fn every_param_used_exactly_once_in_ascending_order() {
        let circuit = CircuitSpec::build();
        let seen: Vec<usize> = circuit
            .gates()
            .iter()
            .filter_map(|g| match g.angle_source() {
                Some(AngleSource::Param(p)) => Some(p),
                _ => None,
            })
            .collect();
        let expected: Vec<usize> = (0..N_PARAMS).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn param_index_covers_tag_layout() {
        assert_eq!(param_index(0, 0, 0, false), 0);
        assert_eq!(param_index(0, 0, 0, true), 1);
        assert_eq!(param_index(0, 0, 5, true), 11);
        assert_eq!(param_index(0, 1, 0, false), 12);
        assert_eq!(param_index(1, 0, 0, false), 36);
        assert_eq!(param_index(1, 2, 5, true), N_PARAMS - 1);
    }

    #[test]
    fn zero_params_and_features_leave_state_untouched() {
        // All rotations are identity and every CX sees a |0⟩ control, so the
        // register never leaves |0…0⟩ and every readout ⟨Z⟩ is +1.
        let circuit = CircuitSpec::build();
        let logits = circuit
            .logits(&[0.0; N_PARAMS], &[0.0; N_FEATURES])
            .unwrap();
        for l in logits {
            assert!((l - 1.0).abs() < 1e-12);
        }
        let probs = circuit
            .predict_proba(&[0.0; N_PARAMS], &[0.0; N_FEATURES])
            .unwrap();
        for p in probs {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn run_rejects_wrong_arity() {
        let circuit = CircuitSpec::build();
        assert!(circuit.run(&[0.0; 3], &[0.0; N_FEATURES]).is_err());
        assert!(circuit.run(&[0.0; N_PARAMS], &[0.0; 7]).is_err());
    }

    #[test]
    fn softmax_matches_closed_form() {
        // softmax(1, 0, 0) = (e, 1, 1) / (e + 2)
        let probs = softmax(&[1.0, 0.0, 0.0]);
        assert!((probs[0] - 0.576_116_884_765_829_1).abs() < 1e-12);
        assert!((probs[1] - 0.211_941_557_617_085_46).abs() < 1e-12);
        assert!((probs[2] - 0.211_941_557_617_085_46).abs() < 1e-12);
    }

    #[test]
    fn softmax_sums_to_one_and_is_shift_invariant() {
        let a = softmax(&[0.3, -0.8, 0.5]);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let b = softmax(&[0.3 + 100.0, -0.8 + 100.0, 0.5 + 100.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_survives_extreme_logits() {
        let probs = softmax(&[1000.0, 999.0, 998.0]);
        assert!(probs.iter().all(|p| p.is_finite()));
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(probs[0] > probs[1] && probs[1] > probs[2]);
    }

    #[test]
    fn argmax_breaks_ties_toward_lowest_index() {
        assert_eq!(argmax(&[0.2, 0.5, 0.3]), 1);
        assert_eq!(argmax(&[0.4, 0.4, 0.2]), 0);
        assert_eq!(argmax(&[0.1, 0.45, 0.45]), 1);
    }

    #[test]
    fn feature_rotations_respond_to_inputs() {
        // A single nonzero feature must move at least one readout away from
        // the zero-input fixed point.
        let circuit = CircuitSpec::build();
        let logits = circuit
            .logits(&[0.0; N_PARAMS], &[1.0, 0.0, 0.0, 0.0])
            .unwrap();
        assert!(logits.iter().any(|l| (l - 1.0).abs() > 1e-3));
    }
}
