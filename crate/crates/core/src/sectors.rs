//! Indexing of the charge/angular-momentum sectors H_{q,j}.
//!
//! Half-integers are stored doubled (`two_j`, `two_m`) so that all label
//! arithmetic stays exact.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One U(1)×S_n sector: charge `q`, total angular momentum `two_j / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorIndex {
    pub n: u32,
    pub q: u32,
    pub two_j: u32,
}

/// Basis label |j, m⟩ ⊗ |k⟩ inside a sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisLabel {
    pub two_m: i32,
    pub k: u32,
}

impl BasisLabel {
    pub fn m(&self) -> f64 {
        self.two_m as f64 / 2.0
    }
}

impl SectorIndex {
    pub fn new(n: u32, q: u32, two_j: u32) -> Result<Self> {
        if n == 0 {
            return domain("n must be positive");
        }
        if two_j > n || !(n - two_j).is_multiple_of(2) {
            return domain(format!("2j={two_j} incompatible with n={n}"));
        }
        let idx = SectorIndex { n, q, two_j };
        if (q as i64) < idx.h() {
            return domain(format!("sector (q={q}, 2j={two_j}) is empty for n={n}"));
        }
        Ok(idx)
    }

    /// n/2 − j, always an integer.
    pub fn h(&self) -> i64 {
        (self.n as i64 - self.two_j as i64) / 2
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Filled sectors have reached their maximal dimension 2j+1.
    pub fn is_filled(&self) -> bool {
        self.q as i64 >= self.n as i64 - self.h()
    }

    pub fn dim(&self) -> usize {
        let full = self.two_j as i64 + 1;
        let partial = self.q as i64 + 1 - self.h();
        full.min(partial) as usize
    }

    /// Oscillator occupation range (inclusive) of the sector.
    pub fn k_range(&self) -> (u32, u32) {
        let q = self.q as i64;
        let top = self.n as i64 - self.h();
        let k_lo = (q - top).max(0);
        let k_hi = q - self.h();
        (k_lo as u32, k_hi as u32)
    }

    pub fn labels(&self) -> Vec<BasisLabel> {
        let (lo, hi) = self.k_range();
        (lo..=hi)
            .map(|k| BasisLabel { two_m: 2 * self.q as i32 - 2 * k as i32 - self.n as i32, k })
            .collect()
    }

    /// Position of `label` in [`labels`](Self::labels), if present.
    pub fn position(&self, label: BasisLabel) -> Option<usize> {
        let (lo, hi) = self.k_range();
        let expected_m = 2 * self.q as i32 - 2 * label.k as i32 - self.n as i32;
        (label.k >= lo && label.k <= hi && label.two_m == expected_m).then(|| (label.k - lo) as usize)
    }
}

impl fmt::Display for SectorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.two_j.is_multiple_of(2) {
            write!(f, "(n={}, q={}, j={})", self.n, self.q, self.two_j / 2)
        } else {
            write!(f, "(n={}, q={}, j={}/2)", self.n, self.q, self.two_j)
        }
    }
}

pub fn sector_dim(idx: SectorIndex) -> Result<usize> {
    SectorIndex::new(idx.n, idx.q, idx.two_j).map(|i| i.dim())
}

pub fn basis_labels(idx: SectorIndex) -> Vec<BasisLabel> {
    idx.labels()
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Multiplicity m(n, j) of the spin-j irrep in n qubits.
pub fn multiplicity(n: u32, two_j: u32) -> Result<u128> {
    if two_j > n || !(n - two_j).is_multiple_of(2) {
        return domain(format!("2j={two_j} incompatible with n={n}"));
    }
    let h = ((n - two_j) / 2) as u64;
    let b = binomial(n as u64, h);
    Ok(b * (two_j as u128 + 1) / (n as u128 - h as u128 + 1))
}

/// All allowed 2j values for n qubits, descending.
pub fn two_j_values(n: u32) -> Vec<u32> {
    (0..=n).rev().filter(|tj| (n - tj).is_multiple_of(2)).collect()
}

/// Sectors with q ≤ q_max, sorted by (q ascending, j descending).
pub fn enumerate_sectors(n: u32, q_max: u32) -> Vec<SectorIndex> {
    (0..=q_max)
        .flat_map(|q| {
            two_j_values(n).into_iter().filter_map(move |tj| SectorIndex::new(n, q, tj).ok())
        })
        .collect()
}

/// Accidental-symmetry partner: an unfilled (q, j) with q = n/2 + 2j′ − j
/// (0 < j′ < j) pairs with the filled (n/2 − j′ + 2j, j′), and vice versa.
pub fn accidental_partner(idx: SectorIndex) -> Option<SectorIndex> {
    let n = idx.n as i64;
    let q = idx.q as i64;
    let tj = idx.two_j as i64;
    if !idx.is_filled() {
        // 4j' = 2q - n + 2j
        let four_jp = 2 * q - n + tj;
        if four_jp % 2 != 0 {
            return None;
        }
        let tjp = four_jp / 2;
        if tjp <= 0 || tjp >= tj || (n - tjp) % 2 != 0 {
            return None;
        }
        let two_qp = n - tjp + 2 * tj;
        if two_qp % 2 != 0 {
            return None;
        }
        SectorIndex::new(idx.n, (two_qp / 2) as u32, tjp as u32).ok()
    } else {
        // 4j = 2q' - n + 2j'
        let tjp = tj;
        let four_j = 2 * q - n + tjp;
        if four_j % 2 != 0 || tjp == 0 {
            return None;
        }
        let tj_big = four_j / 2;
        if tj_big <= tjp || tj_big > n || (n - tj_big) % 2 != 0 {
            return None;
        }
        let two_q_small = n + 2 * tjp - tj_big;
        if two_q_small % 2 != 0 || two_q_small < 0 {
            return None;
        }
        let partner = SectorIndex::new(idx.n, (two_q_small / 2) as u32, tj_big as u32).ok()?;
        (!partner.is_filled()).then_some(partner)
    }
}
