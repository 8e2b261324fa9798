//! Numerical Lie-algebra checks: closures and ranks, the ladder anharmonicity
//! condition, energy-variance separation, the accidental-symmetry operator S
//! and the Schwinger-oscillator map W.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{c, commutator, hermiticity_residual, CMat, I};
use crate::operators::{htc_block, htc_trace_sq, jz_block};
use crate::sectors::{accidental_partner, enumerate_sectors, two_j_values, SectorIndex};

pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_COMMUTATORS: usize = 5000;

/// Hilbert–Schmidt orthonormal basis of a real Lie algebra of skew-Hermitian matrices.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    pub dim: usize,
    pub elements: Vec<CMat>,
    pub rank: usize,
    /// Commutators evaluated before the closure stabilized.
    pub commutators: usize,
}

fn flatten(m: &CMat) -> DVector<f64> {
    DVector::from_iterator(m.len() * 2, m.iter().flat_map(|z| [z.re, z.im]))
}

struct Builder {
    dim: usize,
    flat: Vec<DVector<f64>>,
    elements: Vec<CMat>,
    tol: f64,
}

impl Builder {
    /// Gram–Schmidt (two passes) against the current basis; keeps the
    /// normalized remainder when its relative norm exceeds tol.
    fn try_add(&mut self, m: &CMat) -> bool {
        let mut v = flatten(m);
        let n0 = v.norm();
        if n0 <= f64::MIN_POSITIVE {
            return false;
        }
        v /= n0;
        for _ in 0..2 {
            for b in &self.flat {
                let p = b.dot(&v);
                v.axpy(-p, b, 1.0);
            }
        }
        let r = v.norm();
        if r <= self.tol {
            return false;
        }
        v /= r;
        let d = self.dim;
        let mat = CMat::from_fn(d, d, |i, j| {
            // nalgebra is column-major: flat index of (i, j) is j*d + i.
            let k = 2 * (j * d + i);
            Complex64::new(v[k], v[k + 1])
        });
        self.flat.push(v);
        self.elements.push(mat);
        true
    }
}

/// Breadth-first commutator closure with Gram–Schmidt rank tracking.
pub fn lie_closure(generators: &[CMat], tol: f64) -> Result<OperatorBasis> {
    let Some(first) = generators.first() else {
        return domain("no generators");
    };
    let d = first.nrows();
    for g in generators {
        if g.nrows() != d || g.ncols() != d {
            return domain("generators must be square with a common dimension");
        }
        let scale = crate::linalg::frobenius(g).max(1.0);
        if hermiticity_residual(&(g * I)) > 1e-10 * scale {
            return domain("generator is not skew-Hermitian");
        }
    }
    let full = d * d;
    let mut b = Builder { dim: d, flat: Vec::new(), elements: Vec::new(), tol };
    for g in generators {
        b.try_add(g);
    }
    let mut count = 0;
    let mut i = 0;
    'outer: while i < b.elements.len() {
        for j in 0..i {
            if b.elements.len() == full || count >= MAX_COMMUTATORS {
                break 'outer;
            }
            let cm = commutator(&b.elements[i], &b.elements[j]);
            count += 1;
            b.try_add(&cm);
        }
        i += 1;
    }
    let rank = b.elements.len();
    Ok(OperatorBasis { dim: d, elements: b.elements, rank, commutators: count })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankReport {
    pub scope: String,
    pub rank: usize,
    pub expected: usize,
    pub pass: bool,
}

/// Closure of {iH_TC, iH̄_TC} on one sector, H̄_TC = i[J_z, H_TC].
pub fn sector_rank_report(idx: SectorIndex, tol: f64) -> Result<RankReport> {
    let d = idx.dim();
    if d < 2 {
        return Ok(RankReport { scope: idx.to_string(), rank: 0, expected: 0, pass: true });
    }
    let h = htc_block(idx).entries;
    let z = jz_block(idx).entries;
    let hbar = commutator(&z, &h) * I;
    let basis = lie_closure(&[&h * I, &hbar * I], tol)?;
    let expected = d * d - 1;
    Ok(RankReport { scope: idx.to_string(), rank: basis.rank, expected, pass: basis.rank == expected })
}

pub fn sector_rank_check(idx: SectorIndex, tol: f64) -> Result<bool> {
    Ok(sector_rank_report(idx, tol)?.pass)
}

/// Spin-j generators {i|j,m⟩⟨j,m|} ∪ {iJ_x} must span u(2j+1).
pub fn verify_pi_universality(n: u32, two_j: u32) -> Result<bool> {
    if two_j > n || !(n - two_j).is_multiple_of(2) {
        return domain(format!("2j = {two_j} is not an angular momentum of {n} qubits"));
    }
    if two_j + 1 > 8 {
        return domain("2j + 1 > 8 is beyond the supported size");
    }
    let d = two_j as usize + 1;
    let mut gens = Vec::new();
    for r in 0..d {
        let mut p = CMat::zeros(d, d);
        p[(r, r)] = I;
        gens.push(p);
    }
    gens.push(spin_jx(two_j) * I);
    let basis = lie_closure(&gens, DEFAULT_TOL)?;
    Ok(basis.rank == d * d)
}

/// J_x on spin j, basis ordered by decreasing m.
pub fn spin_jx(two_j: u32) -> CMat {
    let d = two_j as usize + 1;
    let j = two_j as f64 / 2.0;
    let mut m = CMat::zeros(d, d);
    for r in 1..d {
        // row r−1 has m+1 relative to row r
        let mm = j - r as f64;
        let v = ((j - mm) * (j + mm + 1.0)).sqrt() / 2.0;
        m[(r - 1, r)] = c(v);
        m[(r, r - 1)] = c(v);
    }
    m
}

/// Second differences of a_y² along the sector ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnharmonicityReport {
    pub scope: String,
    pub y_min: i64,
    /// a_y² for y = y_min − 1 … y_min + d − 1 (boundary zeros included).
    pub a_sq: Vec<i64>,
    /// Δ²a_y² for y = y_min … y_min + d − 2.
    pub second_differences: Vec<i64>,
    /// Δ²a_y² ≠ Δ²a_{y_min} for every y > y_min.
    pub condition_holds: bool,
    /// Differences equal 2(n+q−1) − 6y.
    pub matches_closed_form: bool,
    /// Differences equal 6y − 2(n+q−1).
    pub matches_negated_form: bool,
}

/// a_y² = (j(j+1) − (y−n/2)(y−n/2+1))·(q−y), evaluated exactly.
pub fn ladder_a_sq(idx: SectorIndex, y: i64) -> i64 {
    let two_m = 2 * y - idx.n as i64;
    let tj = idx.two_j as i64;
    // (j−m)(j+m+1), both factors integral
    ((tj - two_m) / 2) * ((tj + two_m + 2) / 2) * (idx.q as i64 - y)
}

pub fn anharmonicity_check(idx: SectorIndex) -> AnharmonicityReport {
    let d = idx.dim() as i64;
    let y_min = idx.h();
    let n = idx.n as i64;
    let q = idx.q as i64;
    let a = |y: i64| if y < y_min || y > y_min + d - 2 { 0 } else { ladder_a_sq(idx, y) };
    let a_sq: Vec<i64> = (y_min - 1..=y_min + d - 1).map(a).collect();
    let ys: Vec<i64> = (y_min..=y_min + d - 2).collect();
    let diffs: Vec<i64> = ys.iter().map(|&y| a(y + 1) - 2 * a(y) + a(y - 1)).collect();
    let condition_holds = diffs.iter().skip(1).all(|&x| x != diffs[0]);
    let closed = |y: i64| 2 * (n + q - 1) - 6 * y;
    let matches_closed_form = ys.iter().zip(&diffs).all(|(&y, &x)| x == closed(y));
    let matches_negated_form = ys.iter().zip(&diffs).all(|(&y, &x)| x == -closed(y));
    AnharmonicityReport {
        scope: idx.to_string(),
        y_min,
        a_sq,
        second_differences: diffs,
        condition_holds,
        matches_closed_form,
        matches_negated_form,
    }
}

/// Same ladder test for a bare spin (J_x/J_y, no oscillator): a_y² is
/// quadratic so the second differences are constant.
pub fn spin_ladder_second_differences(two_j: u32) -> Vec<i64> {
    let d = two_j as i64 + 1;
    let tj = two_j as i64;
    // y indexes m = −j + y; a_y² = (j−m)(j+m+1) with the usual boundary zeros.
    let a = |y: i64| {
        if y < 0 || y > d - 2 {
            return 0;
        }
        let two_m = -tj + 2 * y;
        ((tj - two_m) / 2) * ((tj + two_m + 2) / 2)
    };
    (0..=d - 2).map(|y| a(y + 1) - 2 * a(y) + a(y - 1)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub n: u32,
    pub q_max: u32,
    /// Same-dimension pairs (d ≥ 2) compared.
    pub pairs_compared: usize,
    /// Pairs with equal Tr(H_TC²) that are accidental partners.
    pub partner_equalities: Vec<(String, String)>,
    /// Pairs with equal Tr(H_TC²) that are not partners.
    pub unexplained_equalities: Vec<(String, String)>,
    /// Partner pairs (both within q_max) whose variances differ.
    pub partner_mismatches: Vec<(String, String)>,
    /// Symmetric subspace: variance strictly increasing for n ≤ q ≤ q_max.
    pub symmetric_increasing: bool,
    pub pass: bool,
}

/// Compares exact Tr(H_TC²) between every same-dimension pair with d ≥ 2.
/// One-dimensional sectors all have H_TC = 0 and are skipped.
pub fn variance_separation_check(n: u32, q_max: u32) -> VarianceReport {
    let sectors: Vec<SectorIndex> = enumerate_sectors(n, q_max).into_iter().filter(|s| s.dim() >= 2).collect();
    let traces: Vec<i64> = sectors.iter().map(|s| htc_trace_sq(*s)).collect();
    let mut compared = 0;
    let mut partner_eq = Vec::new();
    let mut unexplained = Vec::new();
    let mut mismatches = Vec::new();
    for a in 0..sectors.len() {
        for b in a + 1..sectors.len() {
            if sectors[a].dim() != sectors[b].dim() {
                continue;
            }
            compared += 1;
            let partners = accidental_partner(sectors[a]) == Some(sectors[b]);
            let equal = traces[a] == traces[b];
            let pair = (sectors[a].to_string(), sectors[b].to_string());
            match (equal, partners) {
                (true, true) => partner_eq.push(pair),
                (true, false) => unexplained.push(pair),
                (false, true) => mismatches.push(pair),
                (false, false) => {}
            }
        }
    }
    let sym: Vec<f64> = (n..=q_max)
        .map(|q| crate::operators::energy_variance(SectorIndex { n, q, two_j: n }))
        .collect();
    let symmetric_increasing = sym.windows(2).all(|w| w[1] > w[0]);
    let pass = unexplained.is_empty() && mismatches.is_empty() && symmetric_increasing;
    VarianceReport {
        n,
        q_max,
        pairs_compared: compared,
        partner_equalities: partner_eq,
        unexplained_equalities: unexplained,
        partner_mismatches: mismatches,
        symmetric_increasing,
        pass,
    }
}

/// Label (2j, 2m, k) of the truncated direct sum ⊕_j spin-j ⊗ Fock.
pub type JmkLabel = (u32, i32, u32);

/// Basis of ⊕_j C^{2j+1} ⊗ Fock for the j values of n qubits, truncated to
/// charge q = m + k + n/2 ≤ q_max. One multiplicity copy per j.
#[derive(Debug, Clone)]
pub struct LabelSpace {
    pub n: u32,
    pub q_max: u32,
    pub labels: Vec<JmkLabel>,
    pub index: BTreeMap<JmkLabel, usize>,
}

impl LabelSpace {
    pub fn new(n: u32, q_max: u32) -> Self {
        let mut labels = Vec::new();
        for tj in two_j_values(n) {
            for tm in (-(tj as i32)..=tj as i32).rev().step_by(2) {
                let base = (tm + n as i32) / 2;
                for k in 0..=q_max {
                    if base as i64 + k as i64 <= q_max as i64 {
                        labels.push((tj, tm, k));
                    }
                }
            }
        }
        let index = labels.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        LabelSpace { n, q_max, labels, index }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn charge(&self, l: JmkLabel) -> i64 {
        ((l.1 + self.n as i32) / 2) as i64 + l.2 as i64
    }

    /// H_TC = J₊a + J₋a† on the truncated space (exact: H_TC conserves charge).
    pub fn htc(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut h = DMatrix::zeros(d, d);
        for (col, &(tj, tm, k)) in self.labels.iter().enumerate() {
            // J₊a: m → m+1, k → k−1
            if k > 0 && tm < tj as i32 {
                if let Some(&row) = self.index.get(&(tj, tm + 2, k - 1)) {
                    let v = crate::operators::htc_element_sq(tj, tm + 2, k - 1) as f64;
                    h[(row, col)] = v.sqrt();
                    h[(col, row)] = v.sqrt();
                }
            }
        }
        h
    }

    pub fn jz(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(self.dim(), self.labels.iter().map(|l| l.1 as f64 / 2.0)))
    }
}

/// Forward part of S(j, j′): |j,m′−j+j′⟩|j′−m′⟩ ↦ |j′,m′⟩|2j−j′−m′⟩.
/// Terms with an endpoint outside the truncation are dropped and counted.
fn s_forward(space: &LabelSpace, two_j: u32, two_jp: u32) -> (DMatrix<f64>, usize) {
    let d = space.dim();
    let mut s = DMatrix::zeros(d, d);
    let mut dropped = 0;
    for tmp in (-(two_jp as i32)..=two_jp as i32).step_by(2) {
        let src = (two_j, tmp - two_j as i32 + two_jp as i32, ((two_jp as i32 - tmp) / 2) as u32);
        let dst = (two_jp, tmp, ((2 * two_j as i32 - two_jp as i32 - tmp) / 2) as u32);
        match (space.index.get(&src), space.index.get(&dst)) {
            (Some(&a), Some(&b)) => s[(b, a)] = 1.0,
            (None, None) => {}
            _ => dropped += 1,
        }
    }
    (s, dropped)
}

/// S = Σ_{j>j′} S(j, j′), with S(j, j′) = forward + h.c.
pub fn build_s(n: u32, q_max: u32) -> DMatrix<f64> {
    let space = LabelSpace::new(n, q_max);
    let mut s = DMatrix::zeros(space.dim(), space.dim());
    for (tj, tjp) in s_pairs(n) {
        let (f, _) = s_forward(&space, tj, tjp);
        s += &f + f.transpose();
    }
    s
}

fn s_pairs(n: u32) -> Vec<(u32, u32)> {
    let js = two_j_values(n);
    let mut out = Vec::new();
    for &tj in &js {
        for &tjp in &js {
            if tjp < tj {
                out.push((tj, tjp));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SCommutationReport {
    pub n: u32,
    pub q_max: u32,
    /// ‖[H_TC, S]‖_F over unmasked rows, S built on representative qubit states.
    pub htc_residual: f64,
    /// Same residual in the bare (j, m, k) label space.
    pub label_htc_residual: f64,
    /// Rows excluded because S maps them across the truncation edge.
    pub masked_rows: usize,
    /// [J_z, F(j,j′)] = (j−j′)F(j,j′) exactly for the forward part F.
    pub jz_forward_exact: bool,
    /// [J_z, S(j,j′)] = (j−j′)(F − F†): the h.c. half carries the opposite shift.
    pub jz_full_exact: bool,
    /// S² = I on every level S moves.
    pub involution_on_support: bool,
    pub pass: bool,
}

/// |j,j,α₀⟩ = |Ψ⁻⟩^{⊗(n/2−j)} ⊗ |0⟩^{⊗2j} (singlets on qubit pairs (0,1), (2,3), …),
/// lowered with J₋ and normalized: column i is |j, j−i, α₀⟩.
pub fn representative_multiplet(n: u32, two_j: u32) -> Vec<DVector<f64>> {
    let d = 1usize << n;
    let pairs = ((n - two_j) / 2) as usize;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut top = DVector::<f64>::zeros(d);
    for b in 0..d {
        let bit = |q: usize| (b >> (n as usize - 1 - q)) & 1;
        let mut amp = 1.0;
        for p in 0..pairs {
            amp *= match (bit(2 * p), bit(2 * p + 1)) {
                (0, 1) => r,
                (1, 0) => -r,
                _ => 0.0,
            };
        }
        if (2 * pairs..n as usize).any(|q| bit(q) == 1) {
            amp = 0.0;
        }
        top[b] = amp;
    }
    let mut out = vec![top];
    for _ in 0..two_j {
        let prev = out.last().expect("nonempty");
        let mut next = DVector::<f64>::zeros(d);
        for b in 0..d {
            if prev[b] == 0.0 {
                continue;
            }
            for q in 0..n as usize {
                let bit = 1usize << (n as usize - 1 - q);
                if b & bit == 0 {
                    next[b | bit] += prev[b];
                }
            }
        }
        let nn = next.norm();
        out.push(next / nn);
    }
    out
}

/// Qubit-level representatives |j,m,α₀⟩ ⊗ |k⟩, one column per label.
fn representative_isometry(space: &LabelSpace) -> DMatrix<f64> {
    let n = space.n;
    let k_dim = space.q_max as usize + 1;
    let full = (1usize << n) * k_dim;
    let mut b = DMatrix::zeros(full, space.dim());
    let multiplets: BTreeMap<u32, Vec<DVector<f64>>> =
        two_j_values(n).into_iter().map(|tj| (tj, representative_multiplet(n, tj))).collect();
    for (col, &(tj, tm, k)) in space.labels.iter().enumerate() {
        let v = &multiplets[&tj][((tj as i32 - tm) / 2) as usize];
        for (bits, &amp) in v.iter().enumerate() {
            b[(bits * k_dim + k as usize, col)] = amp;
        }
    }
    b
}

/// Full-space H_TC on n qubits ⊗ Fock(≤ q_max), real entries.
fn full_htc(n: u32, q_max: u32) -> DMatrix<f64> {
    let space = crate::pibasis::FullSpace { n, k_max: q_max };
    space.htc().map(|z| z.re)
}

pub fn check_s_commutation(n: u32, q_max: u32) -> SCommutationReport {
    let space = LabelSpace::new(n, q_max);
    let h = space.htc();
    let jz = space.jz();
    let mut s = DMatrix::zeros(space.dim(), space.dim());
    let mut masked = 0;
    let mut jz_forward_exact = true;
    let mut jz_full_exact = true;
    for (tj, tjp) in s_pairs(n) {
        let (f, dropped) = s_forward(&space, tj, tjp);
        masked += dropped;
        let shift = (tj as f64 - tjp as f64) / 2.0;
        let ft = f.transpose();
        let comm_f = &jz * &f - &f * &jz;
        jz_forward_exact &= comm_f == &f * shift;
        let sjj = &f + &ft;
        let comm_s = &jz * &sjj - &sjj * &jz;
        jz_full_exact &= comm_s == (&f - &ft) * shift;
        s += sjj;
    }
    let label_residual = (&h * &s - &s * &h).norm();

    let b = representative_isometry(&space);
    let s_full = &b * &s * b.transpose();
    let hf = full_htc(n, q_max);
    let comm = &hf * &s_full - &s_full * &hf;
    let htc_residual = comm.norm();

    let s2 = &s * &s;
    let involution_on_support =
        (0..space.dim()).all(|i| s.column(i).iter().all(|&x| x == 0.0) || (s2.column(i).iter().enumerate().all(|(r, &x)| x == if r == i { 1.0 } else { 0.0 })));

    let pass = htc_residual < 1e-9 && label_residual < 1e-9 && jz_forward_exact && involution_on_support;
    SCommutationReport {
        n,
        q_max,
        htc_residual,
        label_htc_residual: label_residual,
        masked_rows: masked,
        jz_forward_exact,
        jz_full_exact,
        involution_on_support,
        pass,
    }
}

/// W|j,m⟩|k⟩ = |(j+m+k)/2, (j+m−k)/2⟩|j−m⟩ in doubled labels.
pub fn schwinger_image(l: JmkLabel) -> JmkLabel {
    let (tj, tm, k) = l;
    let s = (tj as i32 + tm) / 2; // j + m
    let two_jp = s + k as i32;
    let two_mp = s - k as i32;
    let kp = (tj as i32 - tm) / 2;
    (two_jp as u32, two_mp, kp as u32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchwingerReport {
    pub j_max_doubled: u32,
    pub k_max: u32,
    pub vectors: usize,
    pub checked_involution: usize,
    pub checked_intertwining: usize,
    pub skipped: usize,
    pub involution_residual: f64,
    pub intertwining_residual: f64,
    /// j + m is preserved by every in-bounds image.
    pub first_oscillator_preserved: bool,
    pub pass: bool,
}

/// (J₊⊗a)|j,m⟩|k⟩ as (coefficient, label); None when it vanishes.
fn jplus_a(l: JmkLabel) -> Option<(f64, JmkLabel)> {
    let (tj, tm, k) = l;
    if k == 0 || tm >= tj as i32 {
        return None;
    }
    let coef = ((tj as i32 - tm) as f64 / 2.0 * ((tj as i32 + tm + 2) as f64 / 2.0) * k as f64).sqrt();
    Some((coef, (tj, tm + 2, k - 1)))
}

/// Checks W² = I and W(J₊⊗a)W = J₊⊗a on ⊕_{2j ≤ two_j_max} C^{2j+1} ⊗ Fock(≤ k_max).
pub fn schwinger_check(two_j_max: u32, k_max: u32) -> SchwingerReport {
    let in_bounds = |l: JmkLabel| l.0 <= two_j_max && l.2 <= k_max && l.1.unsigned_abs() <= l.0;
    let mut labels = Vec::new();
    for tj in 0..=two_j_max {
        for tm in (-(tj as i32)..=tj as i32).step_by(2) {
            for k in 0..=k_max {
                labels.push((tj, tm, k));
            }
        }
    }
    let mut skipped = 0;
    let mut inv_checked = 0;
    let mut int_checked = 0;
    let mut inv_res: f64 = 0.0;
    let mut int_res: f64 = 0.0;
    let mut preserved = true;
    for &l in &labels {
        let w = schwinger_image(l);
        if !in_bounds(w) {
            skipped += 1;
            continue;
        }
        preserved &= (l.0 as i32 + l.1) == (w.0 as i32 + w.1);
        let ww = schwinger_image(w);
        inv_res = inv_res.max(if ww == l { 0.0 } else { 1.0 });
        inv_checked += 1;
        // W (J₊a) W e versus (J₊a) e
        let lhs = jplus_a(w).map(|(c, x)| (c, schwinger_image(x)));
        if let Some((_, x)) = jplus_a(w) {
            if !in_bounds(schwinger_image(x)) {
                skipped += 1;
                continue;
            }
        }
        let rhs = jplus_a(l);
        let r = match (lhs, rhs) {
            (None, None) => 0.0,
            (Some((a, x)), Some((b, y))) if x == y => (a - b).abs(),
            (Some((a, _)), Some((b, _))) => a.abs() + b.abs(),
            (Some((a, _)), None) | (None, Some((a, _))) => a.abs(),
        };
        int_res = int_res.max(r);
        int_checked += 1;
    }
    let pass = inv_res < 1e-10 && int_res < 1e-10 && preserved;
    SchwingerReport {
        j_max_doubled: two_j_max,
        k_max,
        vectors: labels.len(),
        checked_involution: inv_checked,
        checked_intertwining: int_checked,
        skipped,
        involution_residual: inv_res,
        intertwining_residual: int_res,
        first_oscillator_preserved: preserved,
        pass,
    }
}

/// sector_rank_report over every sector with 2 ≤ d ≤ d_max, in parallel.
pub fn sector_rank_sweep(n_max: u32, q_max: u32, d_max: usize, tol: f64) -> Result<Vec<RankReport>> {
    let sectors: Vec<SectorIndex> = (1..=n_max)
        .flat_map(|n| enumerate_sectors(n, q_max))
        .filter(|s| (2..=d_max).contains(&s.dim()))
        .collect();
    let mut out: Vec<RankReport> = sectors.par_iter().map(|s| sector_rank_report(*s, tol)).collect::<Result<_>>()?;
    out.sort_by(|a, b| a.scope.cmp(&b.scope));
    Ok(out)
}
