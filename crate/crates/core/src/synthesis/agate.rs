//! A-gates: circuits acting as 1 ⊕ U ⊕ I₃ on the two-qubit j = 1 tower
//! (charges 0, 1, 2), built from Euler-embedded fixed-angle rotations.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::su2::{axis_angle, rot, scale, solve_two_step, su2_components, AxisAngle, Vec3, M2};
use crate::dynamics::Circuit;
use crate::error::{domain, Result};

/// Fixed rotation angle δ = 2π/√3 realized by V_TC(2π/√6) in charge 1.
pub fn delta() -> f64 {
    2.0 * PI / 3f64.sqrt()
}

/// Pulse length of one fixed-angle step of multiplicity k (angle kδ).
pub fn step_pulse(k: u8) -> f64 {
    k as f64 * 2.0 * PI / 6f64.sqrt()
}

/// Block of a step in charge 1: exp(−ikδ n̂·σ⃗).
pub fn step_matrix(axis: Vec3, k: u8) -> M2 {
    rot(axis, -(k as f64) * delta())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DecompKind {
    Identity,
    OneStep,
    TwoStep,
    ThreeStep,
    FourStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub axis: Vec3,
    /// Angle multiplier: the step is exp(−ikδ n̂·σ⃗).
    pub k: u8,
}

/// Fixed-angle decomposition; `steps` and `euler_params` are in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub kind: DecompKind,
    pub steps: Vec<Step>,
    /// (θ₁, θ₂) per step.
    pub euler_params: Vec<(f64, f64)>,
    /// Interaction time in units of 2π.
    pub tau: f64,
}

impl Decomposition {
    pub fn axes(&self) -> Vec<AxisAngle> {
        self.steps
            .iter()
            .map(|s| AxisAngle { axis: s.axis, angle: -(s.k as f64) * delta() })
            .collect()
    }

    /// Product of the steps, later steps on the left.
    pub fn product(&self) -> M2 {
        self.steps.iter().fold(M2::identity(), |acc, s| step_matrix(s.axis, s.k) * acc)
    }

    pub fn circuit(&self) -> Circuit {
        euler_circuit(&self.steps, &self.euler_params)
    }
}

/// The four Euler-angle sets (θ₁, θ₂) with
/// n̂ = (cos 2γ, −sin 2γ cos 2β, sin 2γ sin 2β), θ₁ = 2γ, θ₂ = β/√2.
pub fn euler_embed(n: Vec3) -> [(f64, f64); 4] {
    let g = n[0].clamp(-1.0, 1.0).acos() / 2.0;
    let b = n[2].atan2(-n[1]) / 2.0;
    let wrap = |x: f64| {
        let y = (x + PI).rem_euclid(2.0 * PI) - PI;
        if y >= PI { y - 2.0 * PI } else { y }
    };
    let sets = [(g, b), (g, b + PI), (-g, b + PI / 2.0), (-g, b - PI / 2.0)];
    sets.map(|(gg, bb)| (2.0 * gg, wrap(bb) / 2f64.sqrt()))
}

/// Axis realized by Euler parameters (θ₁, θ₂).
pub fn euler_axis(theta1: f64, theta2: f64) -> Vec3 {
    let g2 = theta1;
    let b2 = 2.0 * 2f64.sqrt() * theta2;
    [g2.cos(), -g2.sin() * b2.cos(), g2.sin() * b2.sin()]
}

/// Circuit W†·V_TC(kτ)·W per step with W = R_z(θ₁)V_TC(θ₂); adjacent
/// V_TC(−θ₂ᵢ)V_TC(θ₂ᵢ₊₁) pairs are merged.
pub fn euler_circuit(steps: &[Step], params: &[(f64, f64)]) -> Circuit {
    let mut c = Circuit::new(2);
    let mut pending = 0.0;
    for (s, &(t1, t2)) in steps.iter().zip(params) {
        pending += t2;
        if pending != 0.0 {
            c = c.tc(pending);
        }
        if t1 != 0.0 {
            c = c.rz(t1);
        }
        c = c.tc(step_pulse(s.k));
        if t1 != 0.0 {
            c = c.rz(-t1);
        }
        pending = -t2;
    }
    if pending != 0.0 {
        c = c.tc(pending);
    }
    c
}

fn theta2_cost(t2: &[f64]) -> f64 {
    if t2.is_empty() {
        return 0.0;
    }
    let mut s = t2[0].abs() + t2[t2.len() - 1].abs();
    for w in t2.windows(2) {
        s += (w[1] - w[0]).abs();
    }
    s
}

/// Cheapest Euler branch per axis; returns (params, θ₂ contribution).
fn best_branches(axes: &[Vec3]) -> (Vec<(f64, f64)>, f64) {
    let sets: Vec<[(f64, f64); 4]> = axes.iter().map(|&a| euler_embed(a)).collect();
    let total = 4usize.pow(axes.len() as u32);
    let mut best = (Vec::new(), f64::INFINITY);
    let mut t2 = vec![0.0; axes.len()];
    for code in 0..total {
        let mut c = code;
        for (i, s) in sets.iter().enumerate() {
            t2[i] = s[c % 4].1;
            c /= 4;
        }
        let cost = theta2_cost(&t2);
        if cost < best.1 - 1e-15 {
            let mut c = code;
            let params = sets
                .iter()
                .map(|s| {
                    let p = s[c % 4];
                    c /= 4;
                    p
                })
                .collect();
            best = (params, cost);
        }
    }
    best
}

fn tau_of(steps: &[Step], theta2_cost: f64) -> f64 {
    let pulses: f64 = steps.iter().map(|s| step_pulse(s.k)).sum();
    (pulses + theta2_cost) / (2.0 * PI)
}

fn build(kind: DecompKind, steps: Vec<Step>) -> Decomposition {
    let axes: Vec<Vec3> = steps.iter().map(|s| s.axis).collect();
    let (params, cost) = best_branches(&axes);
    let tau = tau_of(&steps, cost);
    Decomposition { kind, steps, euler_params: params, tau }
}

const GRID: usize = 64;
const GOLDEN_ITERS: usize = 48;

/// Minimizes f over θ ∈ [0, 2π): 64-point grid plus golden-section
/// refinement around the best three grid points.
fn minimize_periodic(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let h = 2.0 * PI / GRID as f64;
    let mut grid: Vec<(f64, f64)> = (0..GRID).map(|i| (f(i as f64 * h), i as f64 * h)).collect();
    grid.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut best = (grid[0].1, grid[0].0);
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for &(_, t0) in grid.iter().take(3) {
        let (mut a, mut b) = (t0 - h, t0 + h);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..GOLDEN_ITERS {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = f(x2);
            }
        }
        let (x, fx) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

fn two_step_candidate(u: &M2, k: u8, kind: DecompKind, tail: Option<Step>) -> Option<Decomposition> {
    let gamma = -(k as f64) * delta();
    let fam = solve_two_step(u, gamma)?;
    let steps_at = |theta: f64| {
        let (n1, n2) = fam.axes(theta);
        let mut v = vec![Step { axis: n1, k }, Step { axis: n2, k }];
        if let Some(t) = tail {
            v.push(t);
        }
        v
    };
    let cost = |theta: f64| {
        let steps = steps_at(theta);
        let axes: Vec<Vec3> = steps.iter().map(|s| s.axis).collect();
        best_branches(&axes).1
    };
    let (theta, _) = minimize_periodic(cost);
    Some(build(kind, steps_at(theta)))
}

/// Three-step candidates exp(−iδ(s μ̂)·σ⃗) · [two-step of the remainder].
fn three_step_candidates(u: &M2, mu: Vec3) -> Vec<Decomposition> {
    let mut out = Vec::new();
    for s in [1.0, -1.0] {
        let axis = scale(mu, s);
        let fixed = step_matrix(axis, 1);
        let rest = fixed.adjoint() * u;
        if let Some(d) = two_step_candidate(&rest, 1, DecompKind::ThreeStep, Some(Step { axis, k: 1 })) {
            out.push(d);
        }
    }
    out
}

fn sphere_point(theta: f64, phi: f64) -> Vec3 {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// −I has no preferred axis: search the fixed-step axis over the sphere.
fn three_step_free_axis(u: &M2) -> Option<Decomposition> {
    let eval = |t: f64, p: f64| -> Option<Decomposition> {
        three_step_candidates(u, sphere_point(t, p))
            .into_iter()
            .min_by(|a, b| a.tau.total_cmp(&b.tau))
    };
    let mut best: Option<(f64, f64, Decomposition)> = None;
    let (nt, np) = (12, 24);
    for i in 0..=nt {
        for jj in 0..np {
            let t = PI * i as f64 / nt as f64;
            let p = 2.0 * PI * jj as f64 / np as f64;
            if let Some(d) = eval(t, p) {
                if best.as_ref().is_none_or(|b| d.tau < b.2.tau) {
                    best = Some((t, p, d));
                }
            }
        }
    }
    let (mut t, mut p, mut d) = best?;
    // Compass search refinement.
    let mut h = PI / nt as f64 / 2.0;
    while h > 1e-7 {
        let mut improved = false;
        for (dt, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
            if let Some(c) = eval(t + dt, p + dp) {
                if c.tau < d.tau - 1e-13 {
                    t += dt;
                    p += dp;
                    d = c;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    Some(d)
}

fn one_step_candidates(u: &M2) -> Vec<Decomposition> {
    let (cos_a, v) = su2_components(u);
    let mut out = Vec::new();
    for k in [1u8, 2] {
        let g = k as f64 * delta();
        if (cos_a - g.cos()).abs() < 1e-12 && g.sin().abs() > 1e-12 {
            // U = cos(kδ) − i sin(kδ) n̂·σ⃗
            let axis = scale(v, -1.0 / g.sin());
            let nrm = super::su2::norm(axis);
            if (nrm - 1.0).abs() < 1e-9 {
                out.push(build(DecompKind::OneStep, vec![Step { axis: scale(axis, 1.0 / nrm), k }]));
            }
        }
    }
    out
}

/// Fastest fixed-angle decomposition of an SU(2) element.
pub fn decompose_fixed_angle(u: &M2) -> Decomposition {
    let (cos_a, v) = su2_components(u);
    let sin_a = super::su2::norm(v);
    if sin_a < 1e-13 && cos_a > 0.0 {
        return Decomposition { kind: DecompKind::Identity, steps: vec![], euler_params: vec![], tau: 0.0 };
    }
    let mut cands = one_step_candidates(u);
    cands.extend(two_step_candidate(u, 1, DecompKind::TwoStep, None));
    cands.extend(two_step_candidate(u, 2, DecompKind::FourStep, None));
    if sin_a < 1e-13 {
        cands.extend(three_step_free_axis(u));
    } else {
        let aa = axis_angle(u);
        cands.extend(three_step_candidates(u, aa.axis));
    }
    cands
        .into_iter()
        .min_by(|a, b| a.tau.total_cmp(&b.tau).then(a.kind.cmp(&b.kind)))
        .expect("fixed-angle regimes cover SU(2)")
}

/// Checks that `u` is special unitary to `tol`.
pub fn check_su2(u: &M2, tol: f64) -> Result<()> {
    let unit = (u.adjoint() * u - M2::identity()).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let det = u.determinant();
    if unit > tol || (det - num_complex::Complex64::new(1.0, 0.0)).norm() > tol {
        return domain(format!("target is not in SU(2) (unitarity {unit:.2e}, det {det})"));
    }
    Ok(())
}

/// A-gate decomposition for U ∈ SU(2) on the charge-1 block.
pub fn a_gate_decomposition(u: &M2) -> Result<Decomposition> {
    check_su2(u, 1e-10)?;
    Ok(decompose_fixed_angle(u))
}

/// Circuit acting as 1 ⊕ U ⊕ I₃ on charges 0, 1, 2 of the j = 1 tower.
pub fn a_gate(u: &M2) -> Result<Circuit> {
    Ok(a_gate_decomposition(u)?.circuit())
}
