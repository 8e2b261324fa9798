//! Realizability of target unitaries with TC pulses and a global z field.
//!
//! All constraints are congruences mod 2π. They are solved by lifting to real
//! branches with bounded winding numbers and verifying every equation.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{distance_up_to_phase, Backend, BlockUnitary};
use crate::error::{domain, Result};
use crate::linalg::{det, frobenius, unitarity_residual, wrap_pi, CMat};
use crate::sectors::{accidental_partner, sector_dim, two_j_values, SectorIndex};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Which congruence a rejected target violates.
pub mod constraint {
    /// φ_{j,−j} ≡ α + jβ over the lowest-weight states of each j.
    pub const LOWEST_WEIGHT_AFFINE: &str = "lowest-weight-affine";
    /// Diagonal targets: φ_m ≡ α + mβ for m ≤ 0.
    pub const DIAGONAL_AFFINE: &str = "diagonal-affine";
    /// v_{q,j} = e^{i(j′−j)θ_z} v_{q′,j′} across an accidental pair.
    pub const ACCIDENTAL_PAIR: &str = "accidental-pair";
    /// arg det v_{q,j} fixed by (θ_z, α).
    pub const DETERMINANT_PHASE: &str = "determinant-phase";
    /// Determinant phases in the symmetric subspace.
    pub const SYMMETRIC_DETERMINANT_PHASE: &str = "symmetric-determinant-phase";
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: String,
    /// Offending sectors or levels, human readable.
    pub sectors: Vec<String>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizabilityVerdict {
    pub realizable: bool,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub theta_z: Option<f64>,
    /// Largest phase/entry residual of the best candidate examined.
    pub max_residual: f64,
    pub violation: Option<Violation>,
}

impl RealizabilityVerdict {
    fn accept(alpha: f64, beta: Option<f64>, theta_z: Option<f64>, residual: f64) -> Self {
        RealizabilityVerdict { realizable: true, alpha: Some(alpha), beta, theta_z, max_residual: residual, violation: None }
    }

    fn reject(constraint: &str, sectors: Vec<String>, residual: f64) -> Self {
        RealizabilityVerdict {
            realizable: false,
            alpha: None,
            beta: None,
            theta_z: None,
            max_residual: residual,
            violation: Some(Violation { constraint: constraint.into(), sectors, residual }),
        }
    }
}

/// Distance of x from the nearest multiple of 2π.
pub fn phase_residual(x: f64) -> f64 {
    wrap_pi(x).abs()
}

struct Fit {
    alpha: f64,
    beta: f64,
    residual: f64,
    worst: usize,
}

/// Fits y ≡ α + xβ (mod 2π) through points with x on a grid of step ½ or 1.
/// β ranges over [−2π, 2π): the two lowest-x points fix β up to its
/// branch, every branch is tried and all points are verified.
fn fit_affine(points: &[(f64, f64)]) -> Option<Fit> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    match pts.len() {
        0 => return None,
        1 => return Some(Fit { alpha: wrap_pi(pts[0].1), beta: 0.0, residual: 0.0, worst: 0 }),
        _ => {}
    }
    let (x0, y0) = pts[0];
    let (x1, y1) = pts[1];
    let dx = x1 - x0;
    let dy = y1 - y0;
    let wmax = (4.0 * PI * dx / (2.0 * PI)).ceil() as i64 + 2;
    let mut best: Option<Fit> = None;
    // Smallest |β| first so exact ties resolve to the simplest witness.
    let mut ws: Vec<i64> = (-wmax..=wmax).collect();
    ws.sort_by(|a, b| (dy + 2.0 * PI * *a as f64).abs().total_cmp(&(dy + 2.0 * PI * *b as f64).abs()));
    for w in ws {
        let beta = (dy + 2.0 * PI * w as f64) / dx;
        if !(-2.0 * PI - 1e-12..2.0 * PI - 1e-12).contains(&beta) {
            continue;
        }
        let alpha = wrap_pi(y0 - x0 * beta);
        let (residual, worst) = pts
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| (phase_residual(y - alpha - x * beta), i))
            .fold((0.0, 0), |acc, r| if r.0 > acc.0 { r } else { acc });
        if best.as_ref().is_none_or(|b| residual < b.residual - 1e-15) {
            best = Some(Fit { alpha, beta, residual, worst: pts_index(points, pts[worst]) });
        }
    }
    best
}

fn pts_index(points: &[(f64, f64)], p: (f64, f64)) -> usize {
    points.iter().position(|q| q.0 == p.0 && q.1 == p.1).unwrap_or(0)
}

/// Diagonal PI target U = Σ_{j,m} e^{iφ_{j,m}} P_{j,m} (charge and spin conserving).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiU1Target {
    pub n: u32,
    /// Keyed by (2j, 2m).
    pub phases: BTreeMap<(u32, i32), f64>,
}

impl PiU1Target {
    /// Builds a target from φ(2j, 2m); fails unless every (j, m) is covered.
    pub fn from_fn(n: u32, f: impl Fn(u32, i32) -> f64) -> Self {
        let mut phases = BTreeMap::new();
        for tj in two_j_values(n) {
            for tm in (-(tj as i32)..=tj as i32).step_by(2) {
                phases.insert((tj, tm), f(tj, tm));
            }
        }
        PiU1Target { n, phases }
    }

    pub fn validate(&self) -> Result<()> {
        for tj in two_j_values(self.n) {
            for tm in (-(tj as i32)..=tj as i32).step_by(2) {
                if !self.phases.contains_key(&(tj, tm)) {
                    return domain(format!("missing phase for (2j, 2m) = ({tj}, {tm})"));
                }
            }
        }
        Ok(())
    }

    /// Multi-controlled Z: phase π on |1…1⟩, i.e. (j, m) = (n/2, −n/2).
    pub fn cz(n: u32) -> Self {
        PiU1Target::from_fn(n, |tj, tm| if tj == n && tm == -(n as i32) { PI } else { 0.0 })
    }

    /// Phase π on |0…0⟩ only, (j, m) = (n/2, n/2).
    pub fn anti_cz(n: u32) -> Self {
        PiU1Target::from_fn(n, |tj, tm| if tj == n && tm == n as i32 { PI } else { 0.0 })
    }
}

/// φ_{j,−j} ≡ α + jβ for all j. Other phases are unconstrained.
pub fn check_pi_u1(target: &PiU1Target, tol: f64) -> Result<RealizabilityVerdict> {
    target.validate()?;
    let pts: Vec<(f64, f64)> =
        two_j_values(target.n).into_iter().map(|tj| (tj as f64 / 2.0, target.phases[&(tj, -(tj as i32))])).collect();
    let fit = fit_affine(&pts).expect("n ≥ 1 has a j value");
    if fit.residual <= tol {
        Ok(RealizabilityVerdict::accept(fit.alpha, Some(fit.beta), None, fit.residual))
    } else {
        let x = pts[fit.worst].0;
        Ok(RealizabilityVerdict::reject(
            constraint::LOWEST_WEIGHT_AFFINE,
            vec![format!("(j={x}, m={})", -x)],
            fit.residual,
        ))
    }
}

/// Diagonal target φ_m on the computational basis by m (keyed by 2m):
/// φ_m ≡ α + mβ for m ≤ 0, m > 0 free.
pub fn check_diagonal(n: u32, phases: &BTreeMap<i32, f64>, tol: f64) -> Result<RealizabilityVerdict> {
    let mut pts = Vec::new();
    for tm in (-(n as i32)..=n as i32).step_by(2) {
        let Some(&p) = phases.get(&tm) else {
            return domain(format!("missing phase for 2m = {tm}"));
        };
        if tm <= 0 {
            pts.push((tm as f64 / 2.0, p));
        }
    }
    let fit = fit_affine(&pts).expect("m = −n/2 always present");
    if fit.residual <= tol {
        Ok(RealizabilityVerdict::accept(fit.alpha, Some(fit.beta), None, fit.residual))
    } else {
        Ok(RealizabilityVerdict::reject(
            constraint::DIAGONAL_AFFINE,
            vec![format!("m={}", pts[fit.worst].0)],
            fit.residual,
        ))
    }
}

/// Number of independent constraints φ_{j,−j} ≡ α + jβ removes: one per j,
/// minus the rank of the (1, j) design matrix.
pub fn independent_constraint_count(n: u32) -> usize {
    let js = two_j_values(n);
    let rank = match js.len() {
        0 => 0,
        1 => 1,
        _ => 2,
    };
    js.len() - rank
}

/// Sector-level target, e.g. extracted from a simulated circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTarget {
    pub n: u32,
    pub q_max: u32,
    pub blocks: BTreeMap<SectorIndex, CMat>,
}

impl BlockTarget {
    pub fn from_block_unitary(v: &BlockUnitary) -> Result<Self> {
        if v.backend != Backend::ChargeSector {
            return domain("block targets come from the charge-sector backend");
        }
        Ok(BlockTarget {
            n: v.n,
            q_max: v.q_max,
            blocks: v.sectors.iter().map(|(k, s)| (*k, s.entries.clone())).collect(),
        })
    }

    /// Multiplies every block by e^{iα}.
    pub fn with_global_phase(mut self, alpha: f64) -> Self {
        let e = Complex64::from_polar(1.0, alpha);
        for b in self.blocks.values_mut() {
            *b *= e;
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (idx, b) in &self.blocks {
            let d = sector_dim(*idx)?;
            if b.nrows() != d || b.ncols() != d {
                return Err(crate::Error::Dimension { expected: d, found: b.nrows() });
            }
            if idx.n != self.n {
                return domain(format!("sector {idx} has the wrong qubit count"));
            }
            if unitarity_residual(b) > 1e-10 {
                return domain(format!("block {idx} is not unitary"));
            }
        }
        Ok(())
    }
}

/// a·x + b·α ≡ rhs (mod 2π) with x = θ_z/2.
#[derive(Debug, Clone)]
struct Congruence {
    a: i64,
    b: i64,
    rhs: f64,
    constraint: &'static str,
    label: String,
}

impl Congruence {
    fn residual(&self, x: f64, alpha: f64) -> f64 {
        phase_residual(self.a as f64 * x + self.b as f64 * alpha - self.rhs)
    }
}

/// All (x, α) ∈ [−π, π)² solving the two congruences exactly.
fn solve_pair(e1: &Congruence, e2: &Congruence) -> Vec<(f64, f64)> {
    let det = e1.a * e2.b - e2.a * e1.b;
    let mut out = Vec::new();
    let w1max = (e1.a.abs() + e1.b.abs()) / 2 + 1;
    let w2max = (e2.a.abs() + e2.b.abs()) / 2 + 1;
    for w1 in -w1max..=w1max {
        for w2 in -w2max..=w2max {
            let r1 = e1.rhs + 2.0 * PI * w1 as f64;
            let r2 = e2.rhs + 2.0 * PI * w2 as f64;
            let x = (r1 * e2.b as f64 - r2 * e1.b as f64) / det as f64;
            let alpha = (e1.a as f64 * r2 - e2.a as f64 * r1) / det as f64;
            if (-PI - 1e-9..PI + 1e-9).contains(&x) && (-PI - 1e-9..PI + 1e-9).contains(&alpha) {
                out.push((wrap_pi(x), wrap_pi(alpha)));
            }
        }
    }
    out
}

/// Candidates when every equation is proportional to one (a, b).
fn solve_single(e: &Congruence) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if e.a == 0 && e.b == 0 {
        return vec![(0.0, 0.0)];
    }
    let (coef, on_alpha) = if e.b != 0 { (e.b, true) } else { (e.a, false) };
    let wmax = coef.abs() / 2 + 1;
    for w in -wmax..=wmax {
        let v = (e.rhs + 2.0 * PI * w as f64) / coef as f64;
        if (-PI - 1e-9..PI + 1e-9).contains(&v) {
            out.push(if on_alpha { (0.0, wrap_pi(v)) } else { (wrap_pi(v), 0.0) });
        }
    }
    out
}

/// Equations with the smallest coefficients first keep the winding search tiny.
fn candidates(eqs: &[Congruence]) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..eqs.len()).collect();
    order.sort_by_key(|&i| (eqs[i].a.abs() + eqs[i].b.abs(), i));
    let nonzero: Vec<usize> = order.iter().copied().filter(|&i| eqs[i].a != 0 || eqs[i].b != 0).collect();
    let Some(&first) = nonzero.first() else {
        return vec![(0.0, 0.0)];
    };
    for &i in &nonzero {
        let (e1, e2) = (&eqs[first], &eqs[i]);
        if e1.a * e2.b - e2.a * e1.b != 0 {
            return solve_pair(e1, e2);
        }
    }
    solve_single(&eqs[first])
}

struct PairCheck {
    unfilled: SectorIndex,
    filled: SectorIndex,
    /// j − j′ (integer).
    shift: i64,
}

impl PairCheck {
    /// max |v_u − e^{i(j′−j)θ_z} v_f|.
    fn residual(&self, t: &BlockTarget, theta_z: f64) -> f64 {
        let vu = &t.blocks[&self.unfilled];
        let vf = &t.blocks[&self.filled];
        let e = Complex64::from_polar(1.0, -(self.shift as f64) * theta_z);
        (vu - vf * e).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Full block check: accidental pairs agree up to e^{i(j′−j)θ_z}, and the
/// determinant phases follow (θ_z, α).
pub fn check_block_target(target: &BlockTarget, tol: f64) -> Result<RealizabilityVerdict> {
    target.validate()?;
    let mut eqs = Vec::new();
    let mut pairs = Vec::new();
    for (idx, v) in &target.blocks {
        let d = idx.dim() as i64;
        let theta = det(v).arg();
        let (a, b) = if idx.is_filled() { (0, d) } else { (d * (idx.q as i64 - idx.n as i64 + idx.h()), d) };
        eqs.push(Congruence {
            a,
            b,
            rhs: theta,
            constraint: constraint::DETERMINANT_PHASE,
            label: idx.to_string(),
        });
        if idx.is_filled() {
            continue;
        }
        let Some(p) = accidental_partner(*idx) else { continue };
        let Some(vf) = target.blocks.get(&p) else { continue };
        let shift = (idx.two_j as i64 - p.two_j as i64) / 2;
        // v_f = e^{i(j−j′)θ_z} v_u, read off the largest entry.
        let (pos, _) = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).expect("nonempty");
        let ratio = vf.as_slice()[pos] / v.as_slice()[pos];
        eqs.push(Congruence {
            a: 2 * shift,
            b: 0,
            rhs: ratio.arg(),
            constraint: constraint::ACCIDENTAL_PAIR,
            label: format!("{idx} ~ {p}"),
        });
        pairs.push(PairCheck { unfilled: *idx, filled: p, shift });
    }

    // Pair blocks must agree up to a phase whatever (θ_z, α) is.
    for p in &pairs {
        let r = distance_up_to_phase(&target.blocks[&p.unfilled], &target.blocks[&p.filled])?;
        if r > tol {
            return Ok(RealizabilityVerdict::reject(
                constraint::ACCIDENTAL_PAIR,
                vec![format!("{} ~ {}", p.unfilled, p.filled)],
                r,
            ));
        }
    }

    let mut best: Option<(f64, f64, f64, String, &'static str)> = None;
    for (x, alpha) in candidates(&eqs) {
        let theta_z = 2.0 * x;
        let mut worst = (0.0, String::new(), "");
        for e in &eqs {
            let r = e.residual(x, alpha);
            if r > worst.0 {
                worst = (r, e.label.clone(), e.constraint);
            }
        }
        for p in &pairs {
            let r = p.residual(target, theta_z);
            if r > worst.0 {
                worst = (r, format!("{} ~ {}", p.unfilled, p.filled), constraint::ACCIDENTAL_PAIR);
            }
        }
        if best.as_ref().is_none_or(|b| worst.0 < b.2) {
            best = Some((theta_z, alpha, worst.0, worst.1, worst.2));
        }
    }
    let (theta_z, alpha, residual, label, cons) = best.expect("at least one candidate");
    if residual <= tol {
        Ok(RealizabilityVerdict::accept(alpha, None, Some(theta_z), residual))
    } else {
        Ok(RealizabilityVerdict::reject(cons, vec![label], residual))
    }
}

/// Determinant phases θ_q (q = 0..) of a symmetric-subspace target:
/// θ_q ≡ (q+1)[(q−n)θ_z/2 + α] for q ≤ n, (n+1)α beyond.
pub fn check_symmetric_phase_constraint(n: u32, theta_q: &[f64], tol: f64) -> Result<RealizabilityVerdict> {
    if theta_q.is_empty() {
        return domain("need at least θ_0");
    }
    let n = n as i64;
    let eqs: Vec<Congruence> = theta_q
        .iter()
        .enumerate()
        .map(|(q, &rhs)| {
            let q = q as i64;
            let (a, b) = if q <= n { ((q + 1) * (q - n), q + 1) } else { (0, n + 1) };
            Congruence { a, b, rhs, constraint: constraint::SYMMETRIC_DETERMINANT_PHASE, label: format!("q={q}") }
        })
        .collect();
    let mut best: Option<(f64, f64, f64, String)> = None;
    for (x, alpha) in candidates(&eqs) {
        let (r, l) = eqs
            .iter()
            .map(|e| (e.residual(x, alpha), e.label.clone()))
            .fold((0.0, String::new()), |acc, r| if r.0 > acc.0 { r } else { acc });
        if best.as_ref().is_none_or(|b| r < b.2) {
            best = Some((2.0 * x, alpha, r, l));
        }
    }
    let (theta_z, alpha, r, l) = best.expect("candidates nonempty");
    if r <= tol {
        Ok(RealizabilityVerdict::accept(alpha, None, Some(theta_z), r))
    } else {
        Ok(RealizabilityVerdict::reject(constraint::SYMMETRIC_DETERMINANT_PHASE, vec![l], r))
    }
}

/// Symmetric-subspace ⊗ oscillator state, amplitude per (2m, k).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymState {
    pub n: u32,
    pub amplitudes: BTreeMap<(i32, u32), Complex64>,
}

impl SymState {
    pub fn basis(n: u32, two_m: i32, k: u32) -> Self {
        SymState { n, amplitudes: BTreeMap::from([((two_m, k), Complex64::new(1.0, 0.0))]) }
    }

    /// Weight ⟨Π_q⟩ per charge q = m + k + n/2.
    pub fn charge_weights(&self) -> BTreeMap<u32, f64> {
        let mut w = BTreeMap::new();
        for (&(tm, k), a) in &self.amplitudes {
            let q = ((tm + self.n as i32) / 2) as u32 + k;
            *w.entry(q).or_insert(0.0) += a.norm_sqr();
        }
        w
    }

    fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }
}

/// True iff Ψ and Φ carry equal weight in every charge sector.
pub fn state_convertible(psi: &SymState, phi: &SymState, tol: f64) -> Result<bool> {
    for s in [psi, phi] {
        if (s.norm_sqr() - 1.0).abs() > tol {
            return domain("state is not normalized");
        }
        for &(tm, _) in s.amplitudes.keys() {
            if tm.unsigned_abs() > s.n || (tm + s.n as i32) % 2 != 0 {
                return domain(format!("2m = {tm} is not a symmetric-subspace level"));
            }
        }
    }
    if psi.n != phi.n {
        return domain("states have different qubit counts");
    }
    let (a, b) = (psi.charge_weights(), phi.charge_weights());
    let qs: std::collections::BTreeSet<u32> = a.keys().chain(b.keys()).copied().collect();
    Ok(qs.into_iter().all(|q| (a.get(&q).unwrap_or(&0.0) - b.get(&q).unwrap_or(&0.0)).abs() <= tol))
}

/// Frobenius distance between two block targets over common sectors.
pub fn block_distance(a: &BlockTarget, b: &BlockTarget) -> f64 {
    a.blocks
        .iter()
        .filter_map(|(k, x)| b.blocks.get(k).map(|y| frobenius(&(x - y))))
        .fold(0.0, f64::max)
}
