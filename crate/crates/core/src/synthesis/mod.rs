//! Gate compiler for two qubits and one oscillator.

pub mod agate;
pub mod gates;
pub mod su2;

pub use agate::{a_gate, a_gate_decomposition, decompose_fixed_angle, euler_embed, DecompKind, Decomposition, Step};
pub use gates::{
    compile_two_qubit, f_gate, f_gate_dagger, ghz_circuit, named_gate, qubit_osc_swap, CompiledGate, NamedGate,
    Variant,
};
pub use su2::{axis_angle, compose_rotations, solve_two_step, AxisAngle, TwoStepFamily, M2};
