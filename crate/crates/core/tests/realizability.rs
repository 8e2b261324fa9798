use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcforge_core::linalg::{det, wrap_pi};
use tcforge_core::realizability::*;
use tcforge_core::synthesis::compile_two_qubit;
use tcforge_core::{apply_circuit, CMat, Circuit, SectorIndex};

fn random_circuit(rng: &mut ChaCha8Rng, n: u32, len: usize) -> (Circuit, f64) {
    let mut c = Circuit::new(n);
    let mut sum_z = 0.0;
    for _ in 0..len {
        if rng.random_bool(0.5) {
            c = c.tc(rng.random_range(-3.0..3.0));
        } else {
            let t = rng.random_range(-2.0 * PI..2.0 * PI);
            sum_z += t;
            c = c.rz(t);
        }
    }
    (c, sum_z)
}

fn haar(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    g.qr().q()
}

#[test]
fn simulated_circuits_are_realizable() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let n = rng.random_range(2..=4);
        let len = rng.random_range(1..=30);
        let (c, _) = random_circuit(&mut rng, n, len);
        let q_max = rng.random_range(0..=8);
        let alpha = rng.random_range(-PI..PI);
        let t = BlockTarget::from_block_unitary(&apply_circuit(&c, q_max).unwrap()).unwrap().with_global_phase(alpha);
        let v = check_block_target(&t, DEFAULT_TOL).unwrap();
        assert!(v.realizable, "n={n} q_max={q_max}: {:?}", v.violation);
        assert!(v.violation.is_none() && v.theta_z.is_some() && v.alpha.is_some());
        // the witness reproduces every block's determinant phase
        let (tz, a) = (v.theta_z.unwrap(), v.alpha.unwrap());
        for (idx, b) in &t.blocks {
            let tr_jz: f64 = idx.labels().iter().map(|l| l.two_m as f64 / 2.0).sum();
            let want = tr_jz * tz + idx.dim() as f64 * a;
            assert!(wrap_pi(det(b).arg() - want).abs() < 1e-7, "{idx}");
        }
    }
}

#[test]
fn theta_z_recovered_for_symmetric_ladders() {
    // n = 2, q_max = 2: sectors pin θ_z modulo 2π (n even ⇒ R_z(2π) = I).
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let (c, sum_z) = random_circuit(&mut rng, 2, 20);
        let t = BlockTarget::from_block_unitary(&apply_circuit(&c, 3).unwrap()).unwrap();
        let v = check_block_target(&t, DEFAULT_TOL).unwrap();
        assert!(v.realizable);
        let d = wrap_pi(v.theta_z.unwrap() + sum_z);
        assert!(d.abs() < 1e-7, "θ_z = {}, −Σθ = {}", v.theta_z.unwrap(), -sum_z);
        assert!(v.alpha.unwrap().abs() < 1e-7);
    }
}

#[test]
fn independent_blocks_on_accidental_pair_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (c, _) = random_circuit(&mut rng, 3, 10);
    let mut t = BlockTarget::from_block_unitary(&apply_circuit(&c, 4).unwrap()).unwrap();
    let u = SectorIndex::new(3, 1, 3).unwrap();
    let f = SectorIndex::new(3, 4, 1).unwrap();
    t.blocks.insert(u, haar(&mut rng, 2));
    t.blocks.insert(f, haar(&mut rng, 2));
    let v = check_block_target(&t, DEFAULT_TOL).unwrap();
    assert!(!v.realizable);
    let viol = v.violation.unwrap();
    assert_eq!(viol.constraint, constraint::ACCIDENTAL_PAIR);
    assert!(v.alpha.is_none() && v.theta_z.is_none());
}

#[test]
fn perturbed_determinant_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (c, _) = random_circuit(&mut rng, 2, 12);
    let mut t = BlockTarget::from_block_unitary(&apply_circuit(&c, 3).unwrap()).unwrap();
    let idx = SectorIndex::new(2, 3, 2).unwrap();
    let b = t.blocks[&idx].clone() * Complex64::from_polar(1.0, 0.3);
    t.blocks.insert(idx, b);
    let v = check_block_target(&t, DEFAULT_TOL).unwrap();
    assert!(!v.realizable);
    assert_eq!(v.violation.unwrap().constraint, constraint::DETERMINANT_PHASE);
}

#[test]
fn block_dimension_mismatch_is_an_error() {
    let mut blocks = BTreeMap::new();
    blocks.insert(SectorIndex::new(2, 2, 2).unwrap(), CMat::identity(2, 2));
    assert!(check_block_target(&BlockTarget { n: 2, q_max: 2, blocks }, DEFAULT_TOL).is_err());
}

#[test]
fn symmetric_phase_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in 1..=4u32 {
        let (c, _) = random_circuit(&mut rng, n, 15);
        let bu = apply_circuit(&c, 8).unwrap();
        let thetas: Vec<f64> =
            (0..=8).map(|q| det(&bu.block(SectorIndex::new(n, q, n).unwrap()).unwrap()).arg()).collect();
        assert!(check_symmetric_phase_constraint(n, &thetas, DEFAULT_TOL).unwrap().realizable);
    }
}

/// Exhaustive oracle for n = 2: θ_q ≡ (q+1)[(q−2)x + α] with x = θ_z/2 on a
/// fine grid of windings, reimplemented independently.
fn brute_symmetric_n2(th: &[f64; 3]) -> bool {
    // q = 0: −2x + α ≡ θ₀; q = 1: 2(−x + α) ≡ θ₁; q = 2: 3α ≡ θ₂.
    for w2 in -2..=2 {
        let alpha = (th[2] + 2.0 * PI * w2 as f64) / 3.0;
        for w0 in -3..=3 {
            let x = (alpha - th[0] - 2.0 * PI * w0 as f64) / 2.0;
            if wrap_pi(2.0 * (-x + alpha) - th[1]).abs() < 1e-9 {
                return true;
            }
        }
    }
    false
}

#[test]
fn symmetric_phase_agrees_with_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut seen = [0, 0];
    for _ in 0..300 {
        let mut th: [f64; 3] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        if rng.random_bool(0.5) {
            // force consistency through random (x, α)
            let x = rng.random_range(-PI..PI);
            let a = rng.random_range(-PI..PI);
            th = [wrap_pi(-2.0 * x + a), wrap_pi(2.0 * (-x + a)), wrap_pi(3.0 * a)];
        }
        let want = brute_symmetric_n2(&th);
        let got = check_symmetric_phase_constraint(2, &th, 1e-9).unwrap().realizable;
        assert_eq!(got, want, "{th:?}");
        seen[want as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0);
    // θ₀ = 0.3 with θ₁, θ₂ off every branch
    assert!(!check_symmetric_phase_constraint(2, &[0.3, 1.0, 0.2], DEFAULT_TOL).unwrap().realizable);
}

#[test]
fn constraint_gap_and_cz_family() {
    for n in 2..=8u32 {
        assert_eq!(independent_constraint_count(n), (n / 2) as usize - 1);
        let cz = check_pi_u1(&PiU1Target::cz(n), DEFAULT_TOL).unwrap();
        assert_eq!(cz.realizable, n < 4);
        assert!(check_pi_u1(&PiU1Target::anti_cz(n), DEFAULT_TOL).unwrap().realizable);
    }
}

#[test]
fn two_and_three_qubits_unconstrained() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for n in [2u32, 3] {
        for _ in 0..100 {
            let vals: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let t = PiU1Target::from_fn(n, |tj, tm| vals[(tj * 8) as usize + ((tm + 8) / 2) as usize]);
            assert!(check_pi_u1(&t, DEFAULT_TOL).unwrap().realizable);
        }
    }
}

#[test]
fn diagonal_agrees_with_pi_u1_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for n in 2..=6u32 {
        for _ in 0..40 {
            let phases: BTreeMap<i32, f64> =
                (-(n as i32)..=n as i32).step_by(2).map(|tm| (tm, rng.random_range(0.0..2.0 * PI))).collect();
            let emb = PiU1Target::from_fn(n, |_, tm| phases[&tm]);
            assert_eq!(
                check_diagonal(n, &phases, DEFAULT_TOL).unwrap().realizable,
                check_pi_u1(&emb, DEFAULT_TOL).unwrap().realizable
            );
        }
        // affine phases are always accepted
        let aff: BTreeMap<i32, f64> = (-(n as i32)..=n as i32).step_by(2).map(|tm| (tm, 0.4 + 1.1 * tm as f64 / 2.0)).collect();
        assert!(check_diagonal(n, &aff, DEFAULT_TOL).unwrap().realizable);
    }
}

#[test]
fn compiled_targets_pass_pi_u1_check() {
    for p in [[0.0, 0.0, PI], [0.3, 1.2, -0.4], [PI, PI, PI]] {
        let r = compile_two_qubit(p[0], p[1], p[2]).unwrap();
        assert!(r.residual < 1e-8);
        let target = PiU1Target::from_fn(2, |tj, tm| match (tj, tm) {
            (0, _) => 0.0,
            (_, 2) => p[0],
            (_, 0) => p[1],
            _ => p[2],
        });
        assert!(check_pi_u1(&target, DEFAULT_TOL).unwrap().realizable);
    }
}

#[test]
fn convertibility() {
    let a = SymState::basis(2, 2, 0);
    let b = SymState::basis(2, -2, 2);
    assert!(state_convertible(&a, &b, 1e-12).unwrap());
    assert!(!state_convertible(&a, &SymState::basis(2, -2, 0), 1e-12).unwrap());
}

#[test]
fn verdict_json_shape() {
    let v = check_pi_u1(&PiU1Target::cz(4), DEFAULT_TOL).unwrap();
    let js: serde_json::Value = serde_json::to_value(&v).unwrap();
    assert_eq!(js["realizable"], false);
    assert_eq!(js["violation"]["constraint"], "lowest-weight-affine");
}

#[test]
fn pair_phase_mismatch_rejected() {
    // Blocks equal up to a phase that no θ_z explains, determinants untouched
    // where possible: conjugate the filled partner's phase by e^{i·0.5}.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (c, _) = random_circuit(&mut rng, 3, 10);
    let bu = apply_circuit(&c, 4).unwrap();
    let mut t = BlockTarget::from_block_unitary(&bu).unwrap();
    let f = SectorIndex::new(3, 4, 1).unwrap();
    let b = t.blocks[&f].clone() * Complex64::from_polar(1.0, 0.5);
    t.blocks.insert(f, b);
    assert!(!check_block_target(&t, DEFAULT_TOL).unwrap().realizable);
}
