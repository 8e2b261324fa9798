//! SU(2) rotations exp(iα n̂·σ⃗), their composition and the two-step
//! fixed-angle decomposition family.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::I;

pub type M2 = Matrix2<Complex64>;
pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    scale(a, 1.0 / norm(a))
}

/// n̂·σ⃗.
pub fn sigma(n: Vec3) -> M2 {
    let r = |x: f64| Complex64::new(x, 0.0);
    M2::new(r(n[2]), r(n[0]) - I * n[1], r(n[0]) + I * n[1], r(-n[2]))
}

/// exp(iγ n̂·σ⃗) = cos γ + i sin γ n̂·σ⃗.
pub fn rot(n: Vec3, gamma: f64) -> M2 {
    M2::identity() * Complex64::new(gamma.cos(), 0.0) + sigma(n) * (I * gamma.sin())
}

/// U = exp(i·angle·axis·σ⃗).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisAngle {
    pub axis: Vec3,
    pub angle: f64,
}

impl AxisAngle {
    pub fn matrix(&self) -> M2 {
        rot(self.axis, self.angle)
    }
}

/// Components (cos α, sin α·μ̂) of an SU(2) element.
pub fn su2_components(u: &M2) -> (f64, Vec3) {
    let c = ((u[(0, 0)] + u[(1, 1)]) / 2.0).re;
    let v = [
        ((u[(0, 1)] + u[(1, 0)]) / 2.0).im,
        ((u[(0, 1)] - u[(1, 0)]) / 2.0).re,
        ((u[(0, 0)] - u[(1, 1)]) / 2.0).im,
    ];
    (c, v)
}

/// Axis-angle view of an SU(2) element, with the angle in [0, π] except that
/// −I is reported as angle −π. The axis defaults to ẑ when sin α = 0.
pub fn axis_angle(u: &M2) -> AxisAngle {
    let (c, v) = su2_components(u);
    let s = norm(v);
    let angle = s.atan2(c);
    let axis = if s > 1e-14 { scale(v, 1.0 / s) } else { [0.0, 0.0, 1.0] };
    let angle = if angle >= std::f64::consts::PI { -std::f64::consts::PI } else { angle };
    AxisAngle { axis, angle }
}

/// exp(iγ₁ m̂·σ⃗)·exp(iγ₂ n̂·σ⃗) as (α, r̂); r̂ is `None` when sin α = 0.
pub fn compose_rotations(g1: f64, g2: f64, m: Vec3, n: Vec3) -> (f64, Option<Vec3>) {
    let (c1, s1, c2, s2) = (g1.cos(), g1.sin(), g2.cos(), g2.sin());
    let cos_a = c1 * c2 - s1 * s2 * dot(m, n);
    let v = add(add(scale(m, s1 * c2), scale(n, c1 * s2)), scale(cross(m, n), -s1 * s2));
    let sin_a = norm(v);
    let alpha = sin_a.atan2(cos_a);
    if sin_a < 1e-14 {
        (alpha, None)
    } else {
        (alpha, Some(scale(v, 1.0 / sin_a)))
    }
}

/// Deterministic orthonormal pair perpendicular to μ̂.
pub fn perpendicular_frame(mu: Vec3) -> (Vec3, Vec3) {
    let mut e1 = cross(mu, [1.0, 0.0, 0.0]);
    if norm(e1) < 0.5 {
        e1 = cross(mu, [0.0, 1.0, 0.0]);
    }
    let e1 = normalize(e1);
    let e2 = cross(mu, e1);
    (e1, e2)
}

/// One-parameter family of solutions U = exp(iγ n̂₂·σ⃗) exp(iγ n̂₁·σ⃗).
///
/// The family parameter θ rotates both axes about the target axis μ̂.
#[derive(Debug, Clone, Copy)]
pub struct TwoStepFamily {
    pub gamma: f64,
    pub mu: Vec3,
    e1: Vec3,
    e2: Vec3,
    p_mu: f64,
    p_perp: f64,
    w_mu: f64,
    identity: bool,
}

impl TwoStepFamily {
    /// Axes (n̂₁, n̂₂) at family parameter θ; n̂₁ acts first.
    pub fn axes(&self, theta: f64) -> (Vec3, Vec3) {
        let dir = add(scale(self.e1, theta.cos()), scale(self.e2, theta.sin()));
        if self.identity {
            return (dir, scale(dir, -1.0));
        }
        let (sg, cg) = (self.gamma.sin(), self.gamma.cos());
        let pp = scale(dir, self.p_perp);
        let p = add(scale(self.mu, self.p_mu), pp);
        let w = add(scale(self.mu, self.w_mu), scale(pp, cg / sg));
        let v = scale(cross(p, w), 1.0 / dot(p, p));
        let n2 = normalize(add(scale(p, 0.5), v));
        let n1 = normalize(add(scale(p, 0.5), scale(v, -1.0)));
        (n1, n2)
    }
}

/// Solves U = exp(iγ n̂₂·σ⃗) exp(iγ n̂₁·σ⃗); feasible iff cos α ≥ cos 2γ.
pub fn solve_two_step(target: &M2, gamma: f64) -> Option<TwoStepFamily> {
    let (cos_a, v) = su2_components(target);
    let sin_a = norm(v);
    let (sg, cg) = (gamma.sin(), gamma.cos());
    if sg.abs() < 1e-12 {
        return None;
    }
    let c = (cg * cg - cos_a) / (sg * sg);
    if !(-1.0 - 1e-10..=1.0 + 1e-10).contains(&c) {
        return None;
    }
    let c = c.clamp(-1.0, 1.0);
    if sin_a < 1e-12 {
        if cos_a > 0.0 {
            let mu = [0.0, 0.0, 1.0];
            let (e1, e2) = perpendicular_frame(mu);
            return Some(TwoStepFamily { gamma, mu, e1, e2, p_mu: 0.0, p_perp: 0.0, w_mu: 0.0, identity: true });
        }
        return None;
    }
    let mu = scale(v, 1.0 / sin_a);
    let p_mu = sg * cg * (2.0 + 2.0 * c) / sin_a;
    let p_perp = (2.0 + 2.0 * c - p_mu * p_mu).max(0.0).sqrt();
    let w_mu = (sg * cg * p_mu - sin_a) / (sg * sg);
    let (e1, e2) = perpendicular_frame(mu);
    Some(TwoStepFamily { gamma, mu, e1, e2, p_mu, p_perp, w_mu, identity: false })
}
