//! Builders for the model's circuit blocks: data encoding, the routing
//! register, basis-controlled experts, the aggregation layer and the
//! routing-free baseline stack.
//!
//! Register convention: data qubits occupy indices `0..n_data_qubits`,
//! routing qubits the highest indices. Every builder returns a circuit over
//! the full register width so blocks compose by concatenation; "on data
//! qubits only" means the gates touch nothing else.

use std::f64::consts::PI;

use crate::qsim::{AngleSource, Circuit, Gate, GateKind};
use crate::{Error, Result};

/// Input dimensionality: one 8x8 image, row-major.
pub const N_FEATURES: usize = 64;

/// Which rotation axes make up one trainable sub-layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorSet {
    Rx,
    Ry,
    RxRy,
    RxRyRz,
}

impl OperatorSet {
    /// Rotation kinds in fixed order (RX first, then RY, then RZ).
    pub fn rotations(&self) -> &'static [GateKind] {
        match self {
            OperatorSet::Rx => &[GateKind::Rx],
            OperatorSet::Ry => &[GateKind::Ry],
            OperatorSet::RxRy => &[GateKind::Rx, GateKind::Ry],
            OperatorSet::RxRyRz => &[GateKind::Rx, GateKind::Ry, GateKind::Rz],
        }
    }

    pub fn rotations_per_qubit(&self) -> usize {
        self.rotations().len()
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorSet::Rx => "rx",
            OperatorSet::Ry => "ry",
            OperatorSet::RxRy => "rx+ry",
            OperatorSet::RxRyRz => "rx+ry+rz",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rx" => Ok(OperatorSet::Rx),
            "ry" => Ok(OperatorSet::Ry),
            "rx+ry" | "rxry" | "u2" => Ok(OperatorSet::RxRy),
            "rx+ry+rz" | "rxryrz" | "u3" => Ok(OperatorSet::RxRyRz),
            other => Err(Error::config(format!("unknown operator set '{other}'"))),
        }
    }
}

/// Split of the register into data and routing qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub n_data_qubits: usize,
    pub n_routing_qubits: usize,
}

impl RegisterLayout {
    pub fn new(n_data_qubits: usize, n_routing_qubits: usize) -> Self {
        RegisterLayout {
            n_data_qubits,
            n_routing_qubits,
        }
    }

    /// Layout with the minimal routing register for `n_experts` experts:
    /// ceil(log2(n_experts)) qubits, at least one.
    pub fn for_experts(n_data_qubits: usize, n_experts: usize) -> Self {
        let n_routing = if n_experts <= 1 {
            1
        } else {
            n_experts.next_power_of_two().trailing_zeros() as usize
        };
        RegisterLayout::new(n_data_qubits, n_routing.max(1))
    }

    pub fn total(&self) -> usize {
        self.n_data_qubits + self.n_routing_qubits
    }

    /// Global index of routing qubit `j`.
    pub fn routing_qubit(&self, j: usize) -> usize {
        self.n_data_qubits + j
    }

    pub fn routing_qubits(&self) -> Vec<usize> {
        (0..self.n_routing_qubits).map(|j| self.routing_qubit(j)).collect()
    }
}

/// CNOT ring q -> (q+1) mod n over the given qubits; omitted below 2 qubits.
fn push_cnot_ring(circuit: &mut Circuit, qubits: &[usize]) -> Result<()> {
    if qubits.len() < 2 {
        return Ok(());
    }
    for i in 0..qubits.len() {
        circuit.push(Gate::cnot(qubits[i], qubits[(i + 1) % qubits.len()]))?;
    }
    Ok(())
}

/// Rotation sub-layers (one per operator, in set order) followed by a CNOT
/// ring, repeated `depth` times over `qubits`. Parameters are fresh indices
/// starting at `param_offset`.
fn push_layered_block(
    circuit: &mut Circuit,
    qubits: &[usize],
    op_set: OperatorSet,
    depth: usize,
    param_offset: usize,
) -> Result<usize> {
    let mut p = param_offset;
    for _ in 0..depth {
        for &kind in op_set.rotations() {
            for &q in qubits {
                circuit.push(Gate::rotation(kind, q, AngleSource::Param(p)))?;
                p += 1;
            }
        }
        push_cnot_ring(circuit, qubits)?;
    }
    Ok(p)
}

/// Rotation axis used by encoding layer `layer`: RY, RZ, RX cycling.
///
/// Layer 0 is RY so the very first rotations move |0…0⟩ off the pole (an
/// RZ there would be a pure phase). Cycling axes keeps each qubit's
/// accumulated rotation sensitive to every layer instead of collapsing
/// same-axis angle sums, which wrap once they pass 2π.
fn encoding_axis(layer: usize) -> GateKind {
    match layer % 3 {
        0 => GateKind::Ry,
        1 => GateKind::Rz,
        _ => GateKind::Rx,
    }
}

/// Data-encoding circuit: per-qubit rotation chains with angle π·feature
/// over all qubits (routing included), features consumed row-major and
/// zero-padded past the last index. Layer axes cycle RY, RZ, RX; no
/// entangling gates, so every qubit's local observables keep a direct
/// dependence on its features. Carries no trainable parameters.
pub fn build_encoding(features: &[f64], layout: &RegisterLayout) -> Result<Circuit> {
    if features.len() != N_FEATURES {
        return Err(Error::data(format!(
            "expected {} features, got {}",
            N_FEATURES,
            features.len()
        )));
    }
    for (i, &f) in features.iter().enumerate() {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::data(format!(
                "feature {i} = {f} outside [0, 1]"
            )));
        }
    }
    let total = layout.total();
    let n_layers = N_FEATURES.div_ceil(total);
    let mut circuit = Circuit::new(total);
    for layer in 0..n_layers {
        let kind = encoding_axis(layer);
        for q in 0..total {
            let idx = layer * total + q;
            let f = if idx < N_FEATURES { features[idx] } else { 0.0 };
            circuit.push(Gate::rotation(kind, q, AngleSource::Fixed(PI * f)))?;
        }
    }
    Ok(circuit)
}

/// One expert: layered rotations plus CNOT rings over the data qubits only.
pub fn build_expert_block(
    layout: &RegisterLayout,
    op_set: OperatorSet,
    depth: usize,
    param_offset: usize,
) -> Result<Circuit> {
    let mut circuit = Circuit::new(layout.total());
    let data: Vec<usize> = (0..layout.n_data_qubits).collect();
    push_layered_block(&mut circuit, &data, op_set, depth, param_offset)?;
    Ok(circuit)
}

/// The trainable routing block over the routing register. The CNOT ring is
/// omitted when the register has a single qubit.
pub fn build_routing(
    layout: &RegisterLayout,
    op_set: OperatorSet,
    depth: usize,
    param_offset: usize,
) -> Result<Circuit> {
    let mut circuit = Circuit::new(layout.total());
    let routing = layout.routing_qubits();
    push_layered_block(&mut circuit, &routing, op_set, depth, param_offset)?;
    Ok(circuit)
}

/// Condition `expert` on the routing register holding basis pattern `k`:
/// X-conjugate the routing qubits whose bit in `k` is 0, control every
/// expert gate on the whole routing register, then undo the conjugation.
pub fn controlled_on_basis(
    expert: &Circuit,
    layout: &RegisterLayout,
    k: usize,
) -> Result<Circuit> {
    if k >= 1usize << layout.n_routing_qubits {
        return Err(Error::structure(format!(
            "expert index {k} out of range for {} routing qubits",
            layout.n_routing_qubits
        )));
    }
    for gate in expert.gates() {
        let off_register = gate.target >= layout.n_data_qubits
            || gate.controls.iter().any(|&c| c >= layout.n_data_qubits);
        if off_register {
            return Err(Error::structure(
                "expert circuit touches qubits outside the data register",
            ));
        }
    }

    let routing = layout.routing_qubits();
    let conjugated: Vec<usize> = (0..layout.n_routing_qubits)
        .filter(|j| k & (1 << j) == 0)
        .map(|j| layout.routing_qubit(j))
        .collect();

    let mut circuit = Circuit::new(layout.total());
    for &q in &conjugated {
        circuit.push(Gate::x(q))?;
    }
    for gate in expert.gates() {
        let mut controlled = gate.clone().with_controls(&routing);
        if controlled.kind == GateKind::Cnot {
            // A CNOT with extra controls is a plain multi-controlled X.
            controlled.kind = GateKind::X;
        }
        circuit.push(controlled)?;
    }
    for &q in &conjugated {
        circuit.push(Gate::x(q))?;
    }
    Ok(circuit)
}

/// Fixed aggregation layer: one CNOT from each routing qubit to the data
/// qubit of the same index, in routing order. No trainable parameters.
pub fn build_aggregation(layout: &RegisterLayout) -> Result<Circuit> {
    let mut circuit = Circuit::new(layout.total());
    for j in 0..layout.n_routing_qubits {
        circuit.push(Gate::cnot(layout.routing_qubit(j), j))?;
    }
    Ok(circuit)
}

/// Routing-free baseline: the same layered structure as an expert but over
/// every qubit (data plus routing, keeping register width identical).
pub fn build_baseline(
    layout: &RegisterLayout,
    op_set: OperatorSet,
    depth: usize,
) -> Result<Circuit> {
    let mut circuit = Circuit::new(layout.total());
    let all: Vec<usize> = (0..layout.total()).collect();
    push_layered_block(&mut circuit, &all, op_set, depth, 0)?;
    Ok(circuit)
}

/// The full trainable stage of the mixture model: routing, then each expert
/// controlled on its basis pattern, then aggregation. Parameter indices form
/// the contiguous partition [routing | expert 0 | ... | expert L-1].
pub fn build_moe_trainable(
    layout: &RegisterLayout,
    op_set: OperatorSet,
    n_experts: usize,
    expert_depth: usize,
    routing_depth: usize,
) -> Result<Circuit> {
    if n_experts == 0 {
        return Err(Error::config("mixture needs at least one expert"));
    }
    if n_experts > 1usize << layout.n_routing_qubits {
        return Err(Error::config(format!(
            "{} experts do not fit {} routing qubits",
            n_experts, layout.n_routing_qubits
        )));
    }
    let mut circuit = build_routing(layout, op_set, routing_depth, 0)?;
    let mut offset = circuit.n_params();
    for k in 0..n_experts {
        let expert = build_expert_block(layout, op_set, expert_depth, offset)?;
        offset = expert.n_params();
        circuit.append(&controlled_on_basis(&expert, layout, k)?)?;
    }
    circuit.append(&build_aggregation(layout)?)?;
    Ok(circuit)
}
