//! Two-qubit constructions: F-gate, the phase-family compiler, named gates,
//! the qubit↔oscillator SWAP and a GHZ preparation circuit.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::agate::{decompose_fixed_angle, DecompKind, Decomposition};
use super::su2::M2;
use crate::dynamics::{apply_circuit, distance_up_to_phase, interaction_time, sector_unitary, vacuum_sandwich, Circuit};
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, I};
use crate::sectors::SectorIndex;

pub fn sector0() -> SectorIndex {
    SectorIndex { n: 2, q: 0, two_j: 2 }
}
pub fn sector1() -> SectorIndex {
    SectorIndex { n: 2, q: 1, two_j: 2 }
}
pub fn sector2() -> SectorIndex {
    SectorIndex { n: 2, q: 2, two_j: 2 }
}

/// Charge-1, j = 1 block of a two-qubit TC/Rz circuit.
pub fn block11(circ: &Circuit) -> M2 {
    let b = sector_unitary(circ, sector1()).expect("TC/Rz circuit");
    M2::new(b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)])
}

pub fn phi1() -> f64 {
    0.5 * (7.0f64 / 16.0).acos()
}

pub fn phi0() -> f64 {
    (-(23f64.sqrt()) / 3.0).atan() + PI
}

/// F = R_z(φ₀/2)·V·R_z(−φ₁)·V·R_z(φ₁)·V·R_z(−φ₀/2), V = V_TC(π/√6).
pub fn f_gate() -> Circuit {
    let v = PI / 6f64.sqrt();
    Circuit::new(2)
        .rz(-phi0() / 2.0)
        .tc(v)
        .rz(phi1())
        .tc(v)
        .rz(-phi1())
        .tc(v)
        .rz(phi0() / 2.0)
}

pub fn f_gate_dagger() -> Circuit {
    f_gate().dagger()
}

/// Which F/F† pair flanks the middle R_z(θ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// A·F_a·R_z(θ)·F_b with F_a, F_b ∈ {F, F†}; `true` means F†.
    WithF { a_dagger: bool, b_dagger: bool },
    /// A·R_z(θ), available when φ₀₀ + φ₁₁ ≡ 0.
    NoF,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::WithF { a_dagger, b_dagger } => {
                let n = |d: bool| if d { "F†" } else { "F" };
                write!(f, "Rz(θ′)·A·{}·Rz(θ)·{}", n(*a_dagger), n(*b_dagger))
            }
            Variant::NoF => write!(f, "Rz(θ′)·A·Rz(θ)"),
        }
    }
}

/// Compiled two-qubit gate plus its synthesis report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompiledGate {
    pub target: String,
    pub circuit: Circuit,
    /// Interaction time in units of 2π.
    pub tau: f64,
    pub kind: DecompKind,
    pub variant: Variant,
    pub theta: f64,
    pub theta_prime: f64,
    pub theta_plus: f64,
    pub a_gate: Decomposition,
    /// e^{i·global_phase}·(circuit's vacuum sandwich) equals the target.
    pub global_phase: f64,
    /// ‖U†U − I‖_F of the vacuum sandwich.
    pub residual: f64,
    /// Distance up to global phase between sandwich and target.
    pub distance: f64,
}

/// 4×4 matrix Σ e^{iφ}P over |00⟩, |Ψ⁺⟩, |11⟩ with singlet phase 0.
pub fn phase_target(phi00: f64, phi_plus: f64, phi11: f64) -> CMat {
    let e = |p: f64| Complex64::from_polar(1.0, p);
    let mut u = CMat::zeros(4, 4);
    u[(0, 0)] = e(phi00);
    u[(3, 3)] = e(phi11);
    let a = (e(phi_plus) + c(1.0)) / 2.0;
    let b = (e(phi_plus) - c(1.0)) / 2.0;
    u[(1, 1)] = a;
    u[(2, 2)] = a;
    u[(1, 2)] = b;
    u[(2, 1)] = b;
    u
}

struct Candidate {
    variant: Variant,
    theta: f64,
    theta_prime: f64,
    prefix: Circuit,
    a: Decomposition,
    tau: f64,
}

fn inv2(m: &M2) -> M2 {
    m.try_inverse().expect("unitary block")
}

fn wrapped_zero(x: f64) -> bool {
    let y = x.rem_euclid(2.0 * PI);
    y < 1e-12 || 2.0 * PI - y < 1e-12
}

/// Compiles diag phases (φ₀₀ on |00⟩, φ₊ on |Ψ⁺⟩, φ₁₁ on |11⟩, 0 on |Ψ⁻⟩),
/// choosing the fastest F/F† placement.
pub fn compile_two_qubit(phi00: f64, phi_plus: f64, phi11: f64) -> Result<CompiledGate> {
    let f = f_gate();
    let fd = f_gate_dagger();
    let tf = interaction_time(&f);
    let mut specs = Vec::new();
    for a_dagger in [false, true] {
        for b_dagger in [false, true] {
            for branch in [0.0, 1.0] {
                specs.push((Variant::WithF { a_dagger, b_dagger }, branch));
            }
        }
    }
    if wrapped_zero(phi00 + phi11) {
        specs.push((Variant::NoF, 0.0));
    }
    let cands: Vec<Candidate> = specs
        .par_iter()
        .map(|&(variant, branch)| {
            let (theta, theta_prime, prefix) = match variant {
                Variant::WithF { a_dagger, b_dagger } => {
                    let theta = (phi00 + phi11) / 2.0 + branch * PI;
                    let theta_prime = (phi11 - phi00) / 2.0 + branch * PI;
                    let fa = if a_dagger { &fd } else { &f };
                    let fb = if b_dagger { &fd } else { &f };
                    let prefix = fb.clone().rz(theta).then(fa);
                    (theta, theta_prime, prefix)
                }
                Variant::NoF => (phi11, 0.0, Circuit::new(2).rz(phi11)),
            };
            let m = block11(&prefix);
            let d = M2::new(
                Complex64::from_polar(1.0, phi_plus),
                c(0.0),
                c(0.0),
                Complex64::from_polar(1.0, theta - phi_plus),
            );
            let target = d * inv2(&m);
            let a = decompose_fixed_angle(&target);
            let n_f = if variant == Variant::NoF { 0.0 } else { 2.0 * tf };
            let tau = a.tau + n_f;
            Candidate { variant, theta, theta_prime, prefix, a, tau }
        })
        .collect();
    let best = cands
        .into_iter()
        .reduce(|x, y| if y.tau < x.tau - 1e-12 { y } else { x })
        .expect("at least one candidate");
    let mut circuit = best.prefix.then(&best.a.circuit());
    if best.theta_prime != 0.0 {
        circuit = circuit.rz(best.theta_prime);
    }
    let target = phase_target(phi00, phi_plus, phi11);
    finish(
        format!("phases({phi00}, {phi_plus}, {phi11})"),
        circuit,
        best.a,
        best.variant,
        (best.theta, best.theta_prime, phi_plus),
        0.0,
        &target,
    )
}

fn finish(
    name: String,
    circuit: Circuit,
    a: Decomposition,
    variant: Variant,
    angles: (f64, f64, f64),
    global_phase: f64,
    target: &CMat,
) -> Result<CompiledGate> {
    let circuit = circuit.simplified();
    let bu = apply_circuit(&circuit, 2)?;
    let vs = vacuum_sandwich(&bu)?;
    let realized = &vs.operator * Complex64::from_polar(1.0, global_phase);
    let distance = distance_up_to_phase(&realized, target)?;
    Ok(CompiledGate {
        target: name,
        tau: interaction_time(&circuit),
        circuit,
        kind: a.kind,
        variant,
        theta: angles.0,
        theta_prime: angles.1,
        theta_plus: angles.2,
        a_gate: a,
        global_phase,
        residual: vs.residual,
        distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NamedGate {
    CZ,
    SWAP,
    ISWAP,
    SqrtISWAP,
    /// exp(−iφ Z⊗Z).
    UZZ(f64),
    /// exp(i·2π/√3·|Ψ⁺⟩⟨Ψ⁺|).
    UPsiPlus,
}

impl NamedGate {
    /// (global phase, φ₀₀, φ₊, φ₁₁) relative to the singlet.
    pub fn phases(&self) -> (f64, f64, f64, f64) {
        match *self {
            NamedGate::CZ => (0.0, 0.0, 0.0, PI),
            NamedGate::SWAP => (PI, PI, PI, PI),
            NamedGate::ISWAP => (-PI / 2.0, PI / 2.0, PI, PI / 2.0),
            NamedGate::SqrtISWAP => (-PI / 4.0, PI / 4.0, PI / 2.0, PI / 4.0),
            NamedGate::UZZ(phi) => (phi, -2.0 * phi, 0.0, -2.0 * phi),
            NamedGate::UPsiPlus => (0.0, 0.0, 2.0 * PI / 3f64.sqrt(), 0.0),
        }
    }

    /// Textbook matrix in the |00⟩, |01⟩, |10⟩, |11⟩ basis.
    pub fn matrix(&self) -> CMat {
        let z = c(0.0);
        let o = c(1.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            NamedGate::CZ => CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![o, o, o, -o])),
            NamedGate::SWAP => CMat::from_row_slice(4, 4, &[o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o]),
            NamedGate::ISWAP => CMat::from_row_slice(4, 4, &[o, z, z, z, z, z, I, z, z, I, z, z, z, z, z, o]),
            NamedGate::SqrtISWAP => CMat::from_row_slice(
                4,
                4,
                &[o, z, z, z, z, c(r), I * r, z, z, I * r, c(r), z, z, z, z, o],
            ),
            NamedGate::UZZ(phi) => {
                let a = Complex64::from_polar(1.0, -phi);
                let b = Complex64::from_polar(1.0, phi);
                CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![a, b, b, a]))
            }
            NamedGate::UPsiPlus => {
                let e = Complex64::from_polar(1.0, 2.0 * PI / 3f64.sqrt());
                let mut u = CMat::identity(4, 4);
                u[(1, 1)] = (e + o) / 2.0;
                u[(2, 2)] = (e + o) / 2.0;
                u[(1, 2)] = (e - o) / 2.0;
                u[(2, 1)] = (e - o) / 2.0;
                u
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            NamedGate::CZ => "cz".into(),
            NamedGate::SWAP => "swap".into(),
            NamedGate::ISWAP => "iswap".into(),
            NamedGate::SqrtISWAP => "sqrt_iswap".into(),
            NamedGate::UZZ(phi) => format!("uzz({phi})"),
            NamedGate::UPsiPlus => "upsiplus".into(),
        }
    }

    /// Parses a gate name; `uzz` takes its angle from `phi`.
    pub fn parse(name: &str, phi: Option<f64>) -> Result<NamedGate> {
        match name.to_ascii_lowercase().replace('-', "_").as_str() {
            "cz" => Ok(NamedGate::CZ),
            "swap" => Ok(NamedGate::SWAP),
            "iswap" => Ok(NamedGate::ISWAP),
            "sqrt_iswap" | "sqrtiswap" => Ok(NamedGate::SqrtISWAP),
            "uzz" => phi
                .map(NamedGate::UZZ)
                .ok_or_else(|| Error::Usage("uzz needs an angle φ".into())),
            "upsiplus" | "upsi_plus" => Ok(NamedGate::UPsiPlus),
            other => Err(Error::UnknownGate(other.into())),
        }
    }
}

impl FromStr for NamedGate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        NamedGate::parse(s, None)
    }
}

/// Compiles a named gate through the phase-family compiler and reports the
/// global phase relating the circuit to the textbook matrix.
pub fn named_gate(g: NamedGate) -> Result<CompiledGate> {
    let (global, p00, pp, p11) = g.phases();
    let compiled = compile_two_qubit(p00, pp, p11)?;
    let target = g.matrix();
    finish(
        g.name(),
        compiled.circuit,
        compiled.a_gate,
        compiled.variant,
        (compiled.theta, compiled.theta_prime, compiled.theta_plus),
        global,
        &target,
    )
}

/// V = A_swap·F† with A_swap = A((−iσ_y)·π₁₁(F†)†): moves a triplet state
/// into the oscillator, |ψ⟩⊗|0⟩ → |11⟩⊗|ψ⟩_osc.
pub fn qubit_osc_swap() -> Result<(Circuit, Decomposition)> {
    let fd = f_gate_dagger();
    let v1 = block11(&fd);
    let minus_i_sy = M2::new(c(0.0), c(-1.0), c(1.0), c(0.0));
    let target = minus_i_sy * v1.adjoint();
    let a = super::agate::a_gate_decomposition(&target)?;
    Ok((fd.then(&a.circuit()).simplified(), a))
}

/// |00⟩⊗|0⟩ → (|00⟩+|11⟩)/√2 ⊗ |0⟩ up to global phase: R_x-conjugated
/// U_ZZ(π/4) gives exp(−iπ/4·Y⊗Y), then R_z(−π/4) removes the relative i.
pub fn ghz_circuit() -> Result<Circuit> {
    let uzz = named_gate(NamedGate::UZZ(PI / 4.0))?;
    Ok(Circuit::new(2).rx(-PI / 2.0).then(&uzz.circuit).rx(PI / 2.0).rz(-PI / 4.0).simplified())
}
