//! Sector-projected operators and their closed-form diagnostics.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::{c, frobenius, CMat};
use crate::sectors::{BasisLabel, SectorIndex};

/// Dense operator on one sector, in the sector's label order.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    pub idx: SectorIndex,
    pub labels: Vec<BasisLabel>,
    pub entries: CMat,
}

impl SectorMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }
}

/// Operator on the fixed-j tower span{|j,m,k⟩ : 0 ≤ k ≤ k_max}, ordered by
/// (k ascending, m descending).
#[derive(Debug, Clone)]
pub struct JSectorOperator {
    pub n: u32,
    pub two_j: u32,
    pub k_max: u32,
    pub entries: CMat,
}

/// (j+m)(j−m+1): squared J₋ element ⟨m−1|J₋|m⟩, in doubled units.
fn lowering_sq(two_j: i64, two_m: i64) -> i64 {
    (two_j + two_m) * (two_j - two_m + 2) / 4
}

pub fn tower_dim(two_j: u32, k_max: u32) -> usize {
    (two_j as usize + 1) * (k_max as usize + 1)
}

pub fn tower_index(two_j: u32, two_m: i32, k: u32) -> usize {
    k as usize * (two_j as usize + 1) + ((two_j as i32 - two_m) / 2) as usize
}

/// Squared H_TC coupling between (m, k) and (m−1, k+1).
pub fn htc_element_sq(two_j: u32, two_m: i32, k: u32) -> i64 {
    lowering_sq(two_j as i64, two_m as i64) * (k as i64 + 1)
}

pub fn htc_block(idx: SectorIndex) -> SectorMatrix {
    let labels = idx.labels();
    let d = labels.len();
    let mut m = CMat::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        let l = labels[i];
        let v = (htc_element_sq(idx.two_j, l.two_m, l.k) as f64).sqrt();
        m[(i, i + 1)] = c(v);
        m[(i + 1, i)] = c(v);
    }
    SectorMatrix { idx, labels, entries: m }
}

fn diag_block(idx: SectorIndex, f: impl Fn(&BasisLabel) -> f64) -> SectorMatrix {
    let labels = idx.labels();
    let d = labels.len();
    let mut m = CMat::zeros(d, d);
    for (i, l) in labels.iter().enumerate() {
        m[(i, i)] = c(f(l));
    }
    SectorMatrix { idx, labels, entries: m }
}

pub fn jz_block(idx: SectorIndex) -> SectorMatrix {
    diag_block(idx, |l| l.m())
}

pub fn number_block(idx: SectorIndex) -> SectorMatrix {
    diag_block(idx, |l| l.k as f64)
}

/// J_x on the fixed-j tower; conserves k.
pub fn jx_operator(n: u32, two_j: u32, k_max: u32) -> JSectorOperator {
    let d = tower_dim(two_j, k_max);
    let mut m = CMat::zeros(d, d);
    for k in 0..=k_max {
        let mut two_m = two_j as i32;
        while two_m > -(two_j as i32) {
            let v = (lowering_sq(two_j as i64, two_m as i64) as f64).sqrt() / 2.0;
            let a = tower_index(two_j, two_m, k);
            let b = tower_index(two_j, two_m - 2, k);
            m[(a, b)] = c(v);
            m[(b, a)] = c(v);
            two_m -= 2;
        }
    }
    JSectorOperator { n, two_j, k_max, entries: m }
}

/// H_TC on the truncated fixed-j tower (couplings leaving k ≤ k_max dropped).
pub fn htc_tower(n: u32, two_j: u32, k_max: u32) -> JSectorOperator {
    let d = tower_dim(two_j, k_max);
    let mut m = CMat::zeros(d, d);
    for k in 0..k_max {
        let mut two_m = two_j as i32;
        while two_m > -(two_j as i32) {
            let v = (htc_element_sq(two_j, two_m, k) as f64).sqrt();
            let a = tower_index(two_j, two_m, k);
            let b = tower_index(two_j, two_m - 2, k + 1);
            m[(a, b)] = c(v);
            m[(b, a)] = c(v);
            two_m -= 2;
        }
    }
    JSectorOperator { n, two_j, k_max, entries: m }
}

fn diag_tower(n: u32, two_j: u32, k_max: u32, f: impl Fn(i32, u32) -> f64) -> JSectorOperator {
    let d = tower_dim(two_j, k_max);
    let mut m = CMat::zeros(d, d);
    for k in 0..=k_max {
        let mut two_m = two_j as i32;
        while two_m >= -(two_j as i32) {
            let i = tower_index(two_j, two_m, k);
            m[(i, i)] = c(f(two_m, k));
            two_m -= 2;
        }
    }
    JSectorOperator { n, two_j, k_max, entries: m }
}

pub fn jz_tower(n: u32, two_j: u32, k_max: u32) -> JSectorOperator {
    diag_tower(n, two_j, k_max, |tm, _| tm as f64 / 2.0)
}

pub fn number_tower(n: u32, two_j: u32, k_max: u32) -> JSectorOperator {
    diag_tower(n, two_j, k_max, |_, k| k as f64)
}

/// Tr(H_TC²)/d for the sector, in closed form.
pub fn energy_variance(idx: SectorIndex) -> f64 {
    let q = idx.q as f64;
    let n = idx.n as f64;
    let j = idx.j();
    if idx.is_filled() {
        2.0 * j * (j + 1.0) * (2.0 * q - n + 1.0) / 3.0
    } else {
        let x = q - n / 2.0 + j;
        x * (x + 2.0) * (3.0 * j - q + n / 2.0 + 1.0) / 6.0
    }
}

/// Tr(H_TC²) exactly, as an integer: twice the sum of squared couplings.
pub fn htc_trace_sq(idx: SectorIndex) -> i64 {
    let labels = idx.labels();
    2 * labels
        .iter()
        .take(labels.len().saturating_sub(1))
        .map(|l| htc_element_sq(idx.two_j, l.two_m, l.k))
        .sum::<i64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Charge {
    Jz,
    N,
}

/// Per-copy trace of J_z or a†a on the sector, in closed form.
pub fn charge_vector(idx: SectorIndex, which: Charge) -> f64 {
    let q = idx.q as f64;
    let n = idx.n as f64;
    let j = idx.j();
    let filled_strict = q > n / 2.0 + j;
    match (which, filled_strict) {
        (Charge::Jz, false) => 0.5 * (q + j - n / 2.0 + 1.0) * (q - j - n / 2.0),
        (Charge::Jz, true) => 0.0,
        (Charge::N, false) => (q + j - n / 2.0 + 1.0) * (q + j - n / 2.0) / 2.0,
        (Charge::N, true) => (2.0 * j + 1.0) * (q - n / 2.0),
    }
}

/// Compares sector (q_A, j) of n qubits with sector (q_B, j) of n′ = 2j qubits:
/// H_TC, J_z and dimension must agree.
pub fn sector_equivalence_check(a: SectorIndex, b: SectorIndex, atol: f64) -> Result<bool> {
    if a.two_j != b.two_j {
        return domain("sector_equivalence_check needs equal j");
    }
    if a.dim() != b.dim() {
        return Ok(false);
    }
    let dh = frobenius(&(htc_block(a).entries - htc_block(b).entries));
    let dz = frobenius(&(jz_block(a).entries - jz_block(b).entries));
    Ok(dh <= atol && dz <= atol)
}

/// Lifts a sector matrix into the tower basis of the same j.
pub fn embed_in_tower(block: &SectorMatrix, k_max: u32) -> CMat {
    let tj = block.idx.two_j;
    let d = tower_dim(tj, k_max);
    let mut out = CMat::zeros(d, d);
    let pos: Vec<Option<usize>> = block
        .labels
        .iter()
        .map(|l| (l.k <= k_max).then(|| tower_index(tj, l.two_m, l.k)))
        .collect();
    for (r, pr) in pos.iter().enumerate() {
        for (col, pc) in pos.iter().enumerate() {
            if let (Some(pr), Some(pc)) = (pr, pc) {
                out[(*pr, *pc)] = block.entries[(r, col)];
            }
        }
    }
    out
}

/// Restricts a tower operator to one sector (all labels must satisfy k ≤ k_max).
pub fn restrict_to_sector(op: &CMat, two_j: u32, idx: SectorIndex) -> CMat {
    let labels = idx.labels();
    let pos: Vec<usize> = labels.iter().map(|l| tower_index(two_j, l.two_m, l.k)).collect();
    CMat::from_fn(pos.len(), pos.len(), |r, col| op[(pos[r], pos[col])])
}
