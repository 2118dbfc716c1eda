//! Dense statevector simulation of n-qubit circuits.
//!
//! Amplitudes are stored little-endian: bit `q` of a basis index is the state
//! of qubit `q`, so `|01⟩` (qubit 0 in `|1⟩`, qubit 1 in `|0⟩`) lives at
//! index 1. Gates are applied with O(2^n) bit-masked strided updates; no
//! full-dimension matrices are ever built.

use num_complex::Complex64;

use crate::{Error, Result};

/// Hard cap on simulated register width. 24 qubits is a 256 MiB statevector;
/// everything in this crate runs at 10 or fewer.
pub const MAX_QUBITS: usize = 24;

/// Where a rotation gate takes its angle from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleSource {
    /// A literal angle in radians (used by data encoding).
    Fixed(f64),
    /// An index into the parameter table passed to [`Circuit::run`].
    Param(usize),
}

/// Gate kinds supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    H,
    X,
    Cnot,
}

impl GateKind {
    fn is_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }
}

/// A single gate: a kind, a target qubit, an optional set of control qubits
/// and, for rotations, an angle source.
///
/// Rotations use the conventions RX(θ)=exp(−iθX/2), RY(θ)=exp(−iθY/2),
/// RZ(θ)=exp(−iθZ/2). Controls may be of arbitrary size; the controlled
/// action applies only on basis states where every control bit is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub target: usize,
    pub controls: Vec<usize>,
    pub angle: Option<AngleSource>,
}

impl Gate {
    pub fn rx(target: usize, angle: AngleSource) -> Self {
        Gate {
            kind: GateKind::Rx,
            target,
            controls: Vec::new(),
            angle: Some(angle),
        }
    }

    pub fn ry(target: usize, angle: AngleSource) -> Self {
        Gate {
            kind: GateKind::Ry,
            target,
            controls: Vec::new(),
            angle: Some(angle),
        }
    }

    pub fn rz(target: usize, angle: AngleSource) -> Self {
        Gate {
            kind: GateKind::Rz,
            target,
            controls: Vec::new(),
            angle: Some(angle),
        }
    }

    pub fn rotation(kind: GateKind, target: usize, angle: AngleSource) -> Self {
        debug_assert!(kind.is_rotation());
        Gate {
            kind,
            target,
            controls: Vec::new(),
            angle: Some(angle),
        }
    }

    pub fn h(target: usize) -> Self {
        Gate {
            kind: GateKind::H,
            target,
            controls: Vec::new(),
            angle: None,
        }
    }

    pub fn x(target: usize) -> Self {
        Gate {
            kind: GateKind::X,
            target,
            controls: Vec::new(),
            angle: None,
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate {
            kind: GateKind::Cnot,
            target,
            controls: vec![control],
            angle: None,
        }
    }

    /// Add control qubits on top of whatever the gate already has.
    pub fn with_controls(mut self, controls: &[usize]) -> Self {
        self.controls.extend_from_slice(controls);
        self
    }

    /// The parameter index this gate reads, if any.
    pub fn param_index(&self) -> Option<usize> {
        match self.angle {
            Some(AngleSource::Param(i)) => Some(i),
            _ => None,
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if self.target >= n_qubits {
            return Err(Error::structure(format!(
                "gate target {} out of range for {} qubits",
                self.target, n_qubits
            )));
        }
        for &c in &self.controls {
            if c >= n_qubits {
                return Err(Error::structure(format!(
                    "gate control {} out of range for {} qubits",
                    c, n_qubits
                )));
            }
            if c == self.target {
                return Err(Error::structure(format!(
                    "gate control {} collides with its target",
                    c
                )));
            }
        }
        if self.kind.is_rotation() {
            if self.angle.is_none() {
                return Err(Error::structure("rotation gate without an angle source"));
            }
        } else if self.angle.is_some() {
            return Err(Error::structure(format!(
                "{:?} gate must not carry an angle source",
                self.kind
            )));
        }
        if self.kind == GateKind::Cnot && self.controls.len() != 1 {
            return Err(Error::structure(format!(
                "CNOT must have exactly one control, got {}",
                self.controls.len()
            )));
        }
        Ok(())
    }

    /// Resolve the 2x2 unitary acting on the target qubit.
    fn matrix(&self, params: &[f64]) -> Result<[Complex64; 4]> {
        let angle = match self.angle {
            Some(AngleSource::Fixed(a)) => a,
            Some(AngleSource::Param(i)) => *params.get(i).ok_or_else(|| {
                Error::structure(format!(
                    "parameter index {} out of range (table has {})",
                    i,
                    params.len()
                ))
            })?,
            None => 0.0,
        };
        let m = match self.kind {
            GateKind::Rx => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                [
                    Complex64::new(c, 0.0),
                    Complex64::new(0.0, -s),
                    Complex64::new(0.0, -s),
                    Complex64::new(c, 0.0),
                ]
            }
            GateKind::Ry => {
                let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
                [
                    Complex64::new(c, 0.0),
                    Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(c, 0.0),
                ]
            }
            GateKind::Rz => [
                Complex64::from_polar(1.0, -angle / 2.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::from_polar(1.0, angle / 2.0),
            ],
            GateKind::H => {
                let f = std::f64::consts::FRAC_1_SQRT_2;
                [
                    Complex64::new(f, 0.0),
                    Complex64::new(f, 0.0),
                    Complex64::new(f, 0.0),
                    Complex64::new(-f, 0.0),
                ]
            }
            GateKind::X | GateKind::Cnot => [
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        };
        Ok(m)
    }
}

/// Complex amplitude vector over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros state |0…0⟩.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::config(format!(
                "qubit count {} outside supported range 1..={}",
                n_qubits, MAX_QUBITS
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// A computational basis state |index⟩ (little-endian bit order).
    pub fn computational_basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut state = Self::zero(n_qubits)?;
        if index >= state.amps.len() {
            return Err(Error::structure(format!(
                "basis index {} out of range for {} qubits",
                index, n_qubits
            )));
        }
        state.amps[0] = Complex64::new(0.0, 0.0);
        state.amps[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// L2 norm; 1 within numerical error for any state built from gates.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Apply one gate in place. Controlled gates act only on basis states
    /// where every control bit is 1.
    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_gate_unchecked(gate, params)
    }

    /// Gate application without structural re-validation; used by
    /// [`Circuit::run`], whose gates were validated when pushed.
    fn apply_gate_unchecked(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        let t_mask = 1usize << gate.target;
        let c_mask = gate
            .controls
            .iter()
            .fold(0usize, |m, &c| m | (1usize << c));
        let is_flip = matches!(gate.kind, GateKind::X | GateKind::Cnot);

        if c_mask == 0 {
            if is_flip {
                for base in (0..self.amps.len()).step_by(2 * t_mask) {
                    for i in base..base + t_mask {
                        self.amps.swap(i, i | t_mask);
                    }
                }
            } else {
                let [u00, u01, u10, u11] = gate.matrix(params)?;
                for base in (0..self.amps.len()).step_by(2 * t_mask) {
                    for i in base..base + t_mask {
                        let j = i | t_mask;
                        let a = self.amps[i];
                        let b = self.amps[j];
                        self.amps[i] = u00 * a + u01 * b;
                        self.amps[j] = u10 * a + u11 * b;
                    }
                }
            }
            return Ok(());
        }

        // Controlled path: enumerate only the control-satisfied subspace by
        // scattering a dense counter into the free bit positions.
        let mut free_bits = [0usize; MAX_QUBITS];
        let mut n_free = 0;
        for q in 0..self.n_qubits {
            let bit = 1usize << q;
            if bit != t_mask && bit & c_mask == 0 {
                free_bits[n_free] = bit;
                n_free += 1;
            }
        }
        let subspace = 1usize << n_free;
        if is_flip {
            for dense in 0..subspace {
                let mut i = c_mask;
                for (b, &bit) in free_bits[..n_free].iter().enumerate() {
                    if dense & (1 << b) != 0 {
                        i |= bit;
                    }
                }
                self.amps.swap(i, i | t_mask);
            }
        } else {
            let [u00, u01, u10, u11] = gate.matrix(params)?;
            for dense in 0..subspace {
                let mut i = c_mask;
                for (b, &bit) in free_bits[..n_free].iter().enumerate() {
                    if dense & (1 << b) != 0 {
                        i |= bit;
                    }
                }
                let j = i | t_mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = u00 * a + u01 * b;
                self.amps[j] = u10 * a + u11 * b;
            }
        }
        Ok(())
    }

    /// ⟨Z⟩ on one qubit: +1 weight for basis states with the qubit bit 0,
    /// −1 for bit 1. Purely a read.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::structure(format!(
                "readout qubit {} out of range for {} qubits",
                qubit, self.n_qubits
            )));
        }
        let mask = 1usize << qubit;
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if i & mask == 0 {
                acc += p;
            } else {
                acc -= p;
            }
        }
        Ok(acc)
    }
}

/// An ordered gate list over a fixed register width, with a parameter table
/// of size `n_params`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
            n_params: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Size of the parameter table this circuit expects.
    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// Append a gate, growing the parameter table to cover any ParamRef.
    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        if let Some(i) = gate.param_index() {
            self.n_params = self.n_params.max(i + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Concatenate another circuit's gates onto this one.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::structure(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.n_qubits, self.n_qubits
            )));
        }
        self.gates.extend_from_slice(&other.gates);
        self.n_params = self.n_params.max(other.n_params);
        Ok(())
    }

    /// Apply every gate in list order to `state`.
    pub fn run(&self, params: &[f64], state: &mut StateVector) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::structure(format!(
                "parameter table length {} does not match circuit n_params {}",
                params.len(),
                self.n_params
            )));
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::structure(format!(
                "state width {} does not match circuit width {}",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        for gate in &self.gates {
            state.apply_gate_unchecked(gate, params)?;
        }
        Ok(())
    }

    /// Run on a fresh |0…0⟩ register.
    pub fn run_on_zero(&self, params: &[f64]) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        self.run(params, &mut state)?;
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_close(a: Complex64, b: Complex64, tol: f64) {
        assert!(
            (a - b).norm() <= tol,
            "amplitudes differ: {a} vs {b} (tol {tol})"
        );
    }

    #[test]
    fn zero_state_single_qubit() {
        let s = StateVector::zero(1).unwrap();
        assert_eq!(s.amplitudes().len(), 2);
        assert_close(s.amplitudes()[0], Complex64::new(1.0, 0.0), 0.0);
        assert_close(s.amplitudes()[1], Complex64::new(0.0, 0.0), 0.0);
    }

    #[test]
    fn zero_state_two_qubits() {
        let s = StateVector::zero(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert_close(s.amplitudes()[0], Complex64::new(1.0, 0.0), 0.0);
        for i in 1..4 {
            assert_close(s.amplitudes()[i], Complex64::new(0.0, 0.0), 0.0);
        }
    }

    #[test]
    fn zero_state_norm_ten_qubits() {
        let s = StateVector::zero(10).unwrap();
        assert_eq!(s.norm(), 1.0);
    }

    #[test]
    fn zero_state_rejects_out_of_cap() {
        assert!(matches!(StateVector::zero(0), Err(Error::Config(_))));
        assert!(matches!(
            StateVector::zero(MAX_QUBITS + 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn rx_pi_flips_to_minus_i_one() {
        // exp(-i pi X / 2) = -iX, so |0> -> -i|1>
        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&Gate::rx(0, AngleSource::Fixed(PI)), &[]).unwrap();
        assert_close(s.amplitudes()[0], Complex64::new(0.0, 0.0), 1e-12);
        assert_close(s.amplitudes()[1], Complex64::new(0.0, -1.0), 1e-12);
    }

    #[test]
    fn bell_state_construction() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_gate(&Gate::h(0), &[]).unwrap();
        s.apply_gate(&Gate::cnot(0, 1), &[]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_close(s.amplitudes()[0], Complex64::new(r, 0.0), 1e-12);
        assert_close(s.amplitudes()[1], Complex64::new(0.0, 0.0), 1e-12);
        assert_close(s.amplitudes()[2], Complex64::new(0.0, 0.0), 1e-12);
        assert_close(s.amplitudes()[3], Complex64::new(r, 0.0), 1e-12);
    }

    #[test]
    fn unsatisfied_control_leaves_state_unchanged() {
        // |01> little-endian: qubit 0 is 1, qubit 1 (the control) is 0.
        let mut s = StateVector::computational_basis(2, 0b01).unwrap();
        let before = s.clone();
        let gate = Gate::x(0).with_controls(&[1]);
        s.apply_gate(&gate, &[]).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new(3);
        let mut s = StateVector::computational_basis(3, 5).unwrap();
        let before = s.clone();
        c.run(&[], &mut s).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn zero_angle_rotation_is_identity() {
        let mut c = Circuit::new(1);
        c.push(Gate::ry(0, AngleSource::Param(0))).unwrap();
        let s = c.run_on_zero(&[0.0]).unwrap();
        assert_close(s.amplitudes()[0], Complex64::new(1.0, 0.0), 1e-15);
        assert_close(s.amplitudes()[1], Complex64::new(0.0, 0.0), 1e-15);
    }

    #[test]
    fn ry_half_pi_matches_matrix() {
        let mut c = Circuit::new(1);
        c.push(Gate::ry(0, AngleSource::Param(0))).unwrap();
        let s = c.run_on_zero(&[FRAC_PI_2]).unwrap();
        let quarter = std::f64::consts::FRAC_PI_4;
        assert_close(s.amplitudes()[0], Complex64::new(quarter.cos(), 0.0), 1e-12);
        assert_close(s.amplitudes()[1], Complex64::new(quarter.sin(), 0.0), 1e-12);
    }

    #[test]
    fn expectation_z_basics() {
        let s = StateVector::zero(1).unwrap();
        assert!((s.expectation_z(0).unwrap() - 1.0).abs() < 1e-15);

        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&Gate::rx(0, AngleSource::Fixed(PI)), &[]).unwrap();
        assert!((s.expectation_z(0).unwrap() + 1.0).abs() < 1e-12);

        let mut bell = StateVector::zero(2).unwrap();
        bell.apply_gate(&Gate::h(0), &[]).unwrap();
        bell.apply_gate(&Gate::cnot(0, 1), &[]).unwrap();
        assert!(bell.expectation_z(0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn expectation_z_rejects_bad_index() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(s.expectation_z(2), Err(Error::Structure(_))));
    }

    #[test]
    fn run_rejects_dimension_mismatch() {
        let mut c = Circuit::new(2);
        c.push(Gate::rx(0, AngleSource::Param(0))).unwrap();
        let mut s = StateVector::zero(2).unwrap();
        assert!(matches!(c.run(&[], &mut s), Err(Error::Structure(_))));
        let mut narrow = StateVector::zero(1).unwrap();
        assert!(matches!(c.run(&[0.1], &mut narrow), Err(Error::Structure(_))));
    }

    #[test]
    fn gate_validation_rejects_bad_shapes() {
        let mut s = StateVector::zero(2).unwrap();
        assert!(s.apply_gate(&Gate::x(2), &[]).is_err());
        assert!(s.apply_gate(&Gate::x(0).with_controls(&[0]), &[]).is_err());
        let bad = Gate {
            kind: GateKind::H,
            target: 0,
            controls: vec![],
            angle: Some(AngleSource::Fixed(1.0)),
        };
        assert!(s.apply_gate(&bad, &[]).is_err());
        let bad_cnot = Gate {
            kind: GateKind::Cnot,
            target: 0,
            controls: vec![],
            angle: None,
        };
        assert!(s.apply_gate(&bad_cnot, &[]).is_err());
    }

    fn random_circuit(rng: &mut ChaCha8Rng, n_qubits: usize, n_gates: usize) -> (Circuit, Vec<f64>) {
        let mut c = Circuit::new(n_qubits);
        let mut params = Vec::new();
        for _ in 0..n_gates {
            let target = rng.gen_range(0..n_qubits);
            match rng.gen_range(0..6) {
                0 => {
                    params.push(rng.gen_range(-PI..PI));
                    c.push(Gate::rx(target, AngleSource::Param(params.len() - 1))).unwrap();
                }
                1 => {
                    params.push(rng.gen_range(-PI..PI));
                    c.push(Gate::ry(target, AngleSource::Param(params.len() - 1))).unwrap();
                }
                2 => {
                    params.push(rng.gen_range(-PI..PI));
                    c.push(Gate::rz(target, AngleSource::Param(params.len() - 1))).unwrap();
                }
                3 => c.push(Gate::h(target)).unwrap(),
                4 => c.push(Gate::x(target)).unwrap(),
                _ => {
                    if n_qubits > 1 {
                        let mut control = rng.gen_range(0..n_qubits);
                        while control == target {
                            control = rng.gen_range(0..n_qubits);
                        }
                        c.push(Gate::cnot(control, target)).unwrap();
                    }
                }
            }
        }
        (c, params)
    }

    #[test]
    fn norm_preserved_over_1000_random_circuits() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let n_qubits = rng.gen_range(1..=10);
            let n_gates = rng.gen_range(1..=30);
            let (c, params) = random_circuit(&mut rng, n_qubits, n_gates);
            let s = c.run_on_zero(&params).unwrap();
            assert!(
                (s.norm() - 1.0).abs() <= 1e-10,
                "norm drifted to {} on a {}-qubit circuit",
                s.norm(),
                n_qubits
            );
        }
    }

    #[test]
    fn controls_fix_every_unsatisfied_basis_state() {
        // For each basis state with some control bit 0, the state is
        // untouched exactly (not just within tolerance).
        let n = 4;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let target = rng.gen_range(0..n);
            let mut controls = Vec::new();
            for q in 0..n {
                if q != target && rng.gen_bool(0.5) {
                    controls.push(q);
                }
            }
            if controls.is_empty() {
                controls.push((target + 1) % n);
            }
            let c_mask: usize = controls.iter().map(|&c| 1usize << c).sum();
            let gate = Gate::ry(target, AngleSource::Fixed(rng.gen_range(-PI..PI)))
                .with_controls(&controls);
            for basis in 0..(1usize << n) {
                if basis & c_mask != c_mask {
                    let mut s = StateVector::computational_basis(n, basis).unwrap();
                    let before = s.clone();
                    s.apply_gate(&gate, &[]).unwrap();
                    assert_eq!(s, before, "basis {basis:#b} moved under unsatisfied controls");
                }
            }
        }
    }

    #[test]
    fn rotation_angles_compose_additively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = rng.gen_range(-PI..PI);
            let b = rng.gen_range(-PI..PI);
            for kind in [GateKind::Rx, GateKind::Ry, GateKind::Rz] {
                let mut two_step = StateVector::zero(2).unwrap();
                two_step.apply_gate(&Gate::h(0), &[]).unwrap();
                two_step.apply_gate(&Gate::cnot(0, 1), &[]).unwrap();
                let mut one_step = two_step.clone();

                two_step
                    .apply_gate(&Gate::rotation(kind, 0, AngleSource::Fixed(a)), &[])
                    .unwrap();
                two_step
                    .apply_gate(&Gate::rotation(kind, 0, AngleSource::Fixed(b)), &[])
                    .unwrap();
                one_step
                    .apply_gate(&Gate::rotation(kind, 0, AngleSource::Fixed(a + b)), &[])
                    .unwrap();

                for (x, y) in two_step.amplitudes().iter().zip(one_step.amplitudes()) {
                    assert!((x - y).norm() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn x_gate_is_little_endian_bit_flip() {
        // X on qubit q maps basis index i to i XOR 2^q.
        for n in 1..=4 {
            for q in 0..n {
                for i in 0..(1usize << n) {
                    let mut s = StateVector::computational_basis(n, i).unwrap();
                    s.apply_gate(&Gate::x(q), &[]).unwrap();
                    let expect = i ^ (1usize << q);
                    assert_close(s.amplitudes()[expect], Complex64::new(1.0, 0.0), 0.0);
                }
            }
        }
    }

    #[test]
    fn expectation_z_matches_bit_probability() {
        // <Z_q> = 1 - 2 * P(bit q = 1), and always lies in [-1, 1].
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let n = rng.gen_range(1..=6);
            let (c, params) = random_circuit(&mut rng, n, 20);
            let s = c.run_on_zero(&params).unwrap();
            for q in 0..n {
                let z = s.expectation_z(q).unwrap();
                assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&z));
                let mask = 1usize << q;
                let p_one: f64 = s
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i & mask != 0)
                    .map(|(_, a)| a.norm_sqr())
                    .sum();
                assert!((z - (1.0 - 2.0 * p_one)).abs() <= 1e-12);
            }
        }
    }
}
