//! Explicit |j, m, α⟩ basis of (C²)^{⊗n} and brute-force operators on the
//! truncated qubits ⊗ Fock space. Used as an independent oracle for the
//! sector-resolved code and to assemble 2^n × 2^n PI operators.
//!
//! Conventions: computational index `b` has qubit 0 as the most significant
//! bit; bit value 1 is |1⟩ (J_z = −1/2), so m(b) = n/2 − popcount(b).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::linalg::{c, CMat};
use crate::sectors::two_j_values;

/// All copies α of the spin-j irrep; `copies[α][i]` is |j, m = j − i, α⟩.
#[derive(Debug, Clone)]
pub struct PiBlock {
    pub two_j: u32,
    pub copies: Vec<Vec<DVector<f64>>>,
}

fn j_plus_real(n: u32) -> DMatrix<f64> {
    let d = 1usize << n;
    let mut m = DMatrix::zeros(d, d);
    for b in 0..d {
        for q in 0..n {
            let bit = 1usize << (n - 1 - q);
            if b & bit != 0 {
                m[(b ^ bit, b)] += 1.0;
            }
        }
    }
    m
}

/// Orthonormal |j,m,α⟩ vectors for every j, built from highest weights.
pub fn pi_basis(n: u32) -> Vec<PiBlock> {
    let d = 1usize << n;
    let jp = j_plus_real(n);
    let jm = jp.transpose();
    let mut out = Vec::new();
    for two_j in two_j_values(n) {
        let h = (n - two_j) / 2;
        let weight: Vec<usize> = (0..d).filter(|b| b.count_ones() == h).collect();
        let higher: Vec<usize> = if h == 0 {
            vec![]
        } else {
            (0..d).filter(|b| b.count_ones() == h - 1).collect()
        };
        // Null space of J₊ restricted to weight m = j.
        let a = DMatrix::from_fn(higher.len(), weight.len(), |r, col| jp[(higher[r], weight[col])]);
        let gram = a.transpose() * &a;
        let eig = SymmetricEigen::new(gram);
        let mut copies = Vec::new();
        for (i, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam.abs() > 1e-9 {
                continue;
            }
            let mut top = DVector::zeros(d);
            for (r, &b) in weight.iter().enumerate() {
                top[b] = eig.eigenvectors[(r, i)];
            }
            let mut ladder = vec![top];
            let mut two_m = two_j as i64;
            while two_m > -(two_j as i64) {
                let norm = (((two_j as i64 + two_m) * (two_j as i64 - two_m + 2)) as f64 / 4.0).sqrt();
                let next = &jm * ladder.last().unwrap() / norm;
                ladder.push(next);
                two_m -= 2;
            }
            copies.push(ladder);
        }
        out.push(PiBlock { two_j, copies });
    }
    out
}

/// Σ_j Σ_α Σ_{m,m′} u_j[m,m′] |j,m,α⟩⟨j,m′,α| with u_j in m-descending order.
pub fn assemble_pi_operator(n: u32, blocks: &BTreeMap<u32, CMat>) -> CMat {
    let d = 1usize << n;
    let mut out = CMat::zeros(d, d);
    for pb in pi_basis(n) {
        let Some(u) = blocks.get(&pb.two_j) else { continue };
        for copy in &pb.copies {
            let v = DMatrix::from_fn(d, copy.len(), |r, col| c(copy[col][r]));
            out += &v * u * v.adjoint();
        }
    }
    out
}

/// Truncated qubits ⊗ Fock(k_max) space; index = b·(k_max+1) + k.
#[derive(Debug, Clone, Copy)]
pub struct FullSpace {
    pub n: u32,
    pub k_max: u32,
}

impl FullSpace {
    pub fn dim(&self) -> usize {
        (1usize << self.n) * (self.k_max as usize + 1)
    }

    pub fn index(&self, b: usize, k: u32) -> usize {
        b * (self.k_max as usize + 1) + k as usize
    }

    /// J₊ ⊗ a + J₋ ⊗ a† (g = 1), truncated at k_max.
    pub fn htc(&self) -> CMat {
        let jp = j_plus_real(self.n);
        let dq = 1usize << self.n;
        let mut h = CMat::zeros(self.dim(), self.dim());
        for b in 0..dq {
            for b2 in 0..dq {
                let v = jp[(b2, b)];
                if v == 0.0 {
                    continue;
                }
                // J₊|b⟩ ∝ |b2⟩, paired with a|k⟩ = √k |k−1⟩
                for k in 1..=self.k_max {
                    let amp = v * (k as f64).sqrt();
                    let (r, col) = (self.index(b2, k - 1), self.index(b, k));
                    h[(r, col)] += c(amp);
                    h[(col, r)] += c(amp);
                }
            }
        }
        h
    }

    pub fn jz(&self) -> CMat {
        let mut m = CMat::zeros(self.dim(), self.dim());
        for b in 0..1usize << self.n {
            let mz = self.n as f64 / 2.0 - b.count_ones() as f64;
            for k in 0..=self.k_max {
                let i = self.index(b, k);
                m[(i, i)] = c(mz);
            }
        }
        m
    }

    pub fn jx(&self) -> CMat {
        let jp = j_plus_real(self.n);
        let dq = 1usize << self.n;
        let mut m = CMat::zeros(self.dim(), self.dim());
        for b in 0..dq {
            for b2 in 0..dq {
                let v = jp[(b2, b)];
                if v == 0.0 {
                    continue;
                }
                for k in 0..=self.k_max {
                    let (r, col) = (self.index(b2, k), self.index(b, k));
                    m[(r, col)] += c(v / 2.0);
                    m[(col, r)] += c(v / 2.0);
                }
            }
        }
        m
    }

    /// |qubit vector⟩ ⊗ |k⟩.
    pub fn embed(&self, qubits: &DVector<f64>, k: u32) -> DVector<Complex64> {
        let mut v = DVector::zeros(self.dim());
        for (b, &a) in qubits.iter().enumerate() {
            v[self.index(b, k)] = c(a);
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectors::multiplicity;

    #[test]
    fn basis_is_orthonormal_and_complete() {
        for n in 1..=5u32 {
            let basis = pi_basis(n);
            let mut all = Vec::new();
            for pb in &basis {
                assert_eq!(pb.copies.len() as u128, multiplicity(n, pb.two_j).unwrap());
                for copy in &pb.copies {
                    assert_eq!(copy.len(), pb.two_j as usize + 1);
                    all.extend(copy.iter().cloned());
                }
            }
            assert_eq!(all.len(), 1 << n);
            for (i, a) in all.iter().enumerate() {
                for (k, b) in all.iter().enumerate() {
                    let want = if i == k { 1.0 } else { 0.0 };
                    assert!((a.dot(b) - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn identity_assembles_to_identity() {
        let mut blocks = BTreeMap::new();
        for tj in two_j_values(4) {
            blocks.insert(tj, CMat::identity(tj as usize + 1, tj as usize + 1));
        }
        let u = assemble_pi_operator(4, &blocks);
        assert!(crate::linalg::frobenius(&(u - CMat::identity(16, 16))) < 1e-10);
    }
}
