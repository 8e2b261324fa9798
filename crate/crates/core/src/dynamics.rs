//! Exact circuit simulation on charge sectors (TC/Rz circuits) or on
//! Fock-truncated fixed-j towers (circuits containing Rx).

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::{c, expm_herm, frobenius, unitarity_residual, CMat, HermitianEig};
use crate::operators::{htc_block, htc_element_sq, jx_operator, tower_dim, tower_index, JSectorOperator, SectorMatrix};
use crate::pibasis::{assemble_pi_operator, pi_basis, FullSpace};
use crate::sectors::{enumerate_sectors, two_j_values, BasisLabel, SectorIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    TC,
    Rz,
    Rx,
}

/// V_TC(r) = exp(−i r H_TC), R_z(θ) = exp(−iθ J_z), R_x(θ) = exp(−iθ J_x).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub param: f64,
}

/// Rotations are 4π-periodic on half-integer spins; reduce into [−2π, 2π).
fn reduce_angle(theta: f64) -> f64 {
    if (-2.0 * PI..2.0 * PI).contains(&theta) {
        return theta;
    }
    let r = (theta + 2.0 * PI).rem_euclid(4.0 * PI) - 2.0 * PI;
    if r >= 2.0 * PI { r - 4.0 * PI } else { r }
}

impl Gate {
    pub fn tc(r: f64) -> Self {
        Gate { kind: GateKind::TC, param: r }
    }
    pub fn rz(theta: f64) -> Self {
        Gate { kind: GateKind::Rz, param: reduce_angle(theta) }
    }
    pub fn rx(theta: f64) -> Self {
        Gate { kind: GateKind::Rx, param: reduce_angle(theta) }
    }
    pub fn inverse(&self) -> Self {
        match self.kind {
            GateKind::TC => Gate::tc(-self.param),
            GateKind::Rz => Gate::rz(-self.param),
            GateKind::Rx => Gate::rx(-self.param),
        }
    }
}

/// Native gates in time order (first element acts first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n: u32,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n: u32) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, g: Gate) -> &mut Self {
        self.gates.push(g);
        self
    }

    pub fn tc(mut self, r: f64) -> Self {
        self.gates.push(Gate::tc(r));
        self
    }
    pub fn rz(mut self, theta: f64) -> Self {
        self.gates.push(Gate::rz(theta));
        self
    }
    pub fn rx(mut self, theta: f64) -> Self {
        self.gates.push(Gate::rx(theta));
        self
    }

    /// `self` followed in time by `later`.
    pub fn then(mut self, later: &Circuit) -> Self {
        self.gates.extend_from_slice(&later.gates);
        self
    }

    pub fn dagger(&self) -> Circuit {
        Circuit { n: self.n, gates: self.gates.iter().rev().map(Gate::inverse).collect() }
    }

    pub fn has_rx(&self) -> bool {
        self.gates.iter().any(|g| g.kind == GateKind::Rx)
    }

    /// Σ|r| over TC gates (dimensionless, not divided by 2π).
    pub fn raw_interaction_time(&self) -> f64 {
        self.gates.iter().filter(|g| g.kind == GateKind::TC).map(|g| g.param.abs()).sum()
    }

    /// Merges adjacent gates of equal kind and drops zero-parameter gates.
    pub fn simplified(&self) -> Circuit {
        let mut out: Vec<Gate> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            if let Some(last) = out.last_mut() {
                if last.kind == g.kind {
                    let merged = Gate { kind: g.kind, param: last.param + g.param };
                    *last = match g.kind {
                        GateKind::TC => merged,
                        GateKind::Rz => Gate::rz(merged.param),
                        GateKind::Rx => Gate::rx(merged.param),
                    };
                    if last.param == 0.0 {
                        out.pop();
                    }
                    continue;
                }
            }
            if g.param != 0.0 {
                out.push(*g);
            }
        }
        Circuit { n: self.n, gates: out }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("circuit serializes")
    }

    pub fn from_json(s: &str) -> Result<Circuit> {
        serde_json::from_str(s).map_err(|e| Error::Usage(format!("malformed circuit JSON: {e}")))
    }
}

/// Interaction time Σ|r| in units of 2π/g_TC.
pub fn interaction_time(c: &Circuit) -> f64 {
    c.raw_interaction_time() / (2.0 * PI)
}

fn rz_diag(labels: &[BasisLabel], theta: f64) -> CMat {
    let d = labels.len();
    let mut m = CMat::zeros(d, d);
    for (i, l) in labels.iter().enumerate() {
        m[(i, i)] = Complex64::from_polar(1.0, -theta * l.m());
    }
    m
}

pub fn gate_block(g: &Gate, idx: SectorIndex) -> Result<SectorMatrix> {
    let labels = idx.labels();
    let entries = match g.kind {
        GateKind::TC => expm_herm(&htc_block(idx).entries, g.param),
        GateKind::Rz => rz_diag(&labels, g.param),
        GateKind::Rx => return Err(Error::Usage("R_x does not conserve charge; use the j-tower backend".into())),
    };
    Ok(SectorMatrix { idx, labels, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Backend {
    ChargeSector,
    JTower,
}

#[derive(Debug, Clone)]
pub struct BlockUnitary {
    pub n: u32,
    pub q_max: u32,
    pub backend: Backend,
    /// Charge backend blocks.
    pub sectors: BTreeMap<SectorIndex, SectorMatrix>,
    /// J-tower backend blocks, keyed by 2j.
    pub towers: BTreeMap<u32, JSectorOperator>,
    /// Σ|r| in units of 2π.
    pub interaction_time: f64,
}

impl BlockUnitary {
    /// Matrix of the sector, from either backend.
    pub fn block(&self, idx: SectorIndex) -> Option<CMat> {
        match self.backend {
            Backend::ChargeSector => self.sectors.get(&idx).map(|s| s.entries.clone()),
            Backend::JTower => {
                let t = self.towers.get(&idx.two_j)?;
                let (_, k_hi) = idx.k_range();
                (k_hi <= t.k_max).then(|| crate::operators::restrict_to_sector(&t.entries, idx.two_j, idx))
            }
        }
    }

    pub fn max_unitarity_residual(&self) -> f64 {
        let a = self.sectors.values().map(|s| unitarity_residual(&s.entries));
        let b = self.towers.values().map(|t| unitarity_residual(&t.entries));
        a.chain(b).fold(0.0, f64::max)
    }
}

pub fn apply_circuit(c: &Circuit, q_max: i64) -> Result<BlockUnitary> {
    let backend = if c.has_rx() { Backend::JTower } else { Backend::ChargeSector };
    apply_circuit_with(c, q_max, backend)
}

pub fn apply_circuit_with(c: &Circuit, q_max: i64, backend: Backend) -> Result<BlockUnitary> {
    if q_max < 0 {
        return domain("q_max must be non-negative");
    }
    if c.n == 0 {
        return domain("n must be positive");
    }
    let q_max = q_max as u32;
    match backend {
        Backend::ChargeSector => {
            if c.has_rx() {
                return Err(Error::Usage("circuit contains R_x; the charge backend cannot represent it".into()));
            }
            let mut sectors = BTreeMap::new();
            for idx in enumerate_sectors(c.n, q_max) {
                sectors.insert(idx, charge_product(c, idx));
            }
            Ok(BlockUnitary {
                n: c.n,
                q_max,
                backend,
                sectors,
                towers: BTreeMap::new(),
                interaction_time: interaction_time(c),
            })
        }
        Backend::JTower => {
            let mut towers = BTreeMap::new();
            for tj in two_j_values(c.n) {
                let h = ((c.n - tj) / 2) as i64;
                if (q_max as i64) < h {
                    continue;
                }
                let k_max = tower_k_max(c, q_max, tj);
                towers.insert(tj, tower_product(c, tj, k_max));
            }
            Ok(BlockUnitary {
                n: c.n,
                q_max,
                backend,
                sectors: BTreeMap::new(),
                towers,
                interaction_time: interaction_time(c),
            })
        }
    }
}

/// Product of the circuit's gate blocks on one sector (TC/Rz only).
pub fn sector_unitary(c: &Circuit, idx: SectorIndex) -> Result<CMat> {
    if c.has_rx() {
        return Err(Error::Usage("circuit contains R_x; the charge backend cannot represent it".into()));
    }
    Ok(charge_product(c, idx).entries)
}

fn charge_product(c: &Circuit, idx: SectorIndex) -> SectorMatrix {
    let labels = idx.labels();
    let d = labels.len();
    let mut acc = CMat::identity(d, d);
    let eig = HermitianEig::new(&htc_block(idx).entries);
    for g in &c.gates {
        let gm = match g.kind {
            GateKind::TC => eig.evolve(g.param),
            GateKind::Rz => rz_diag(&labels, g.param),
            GateKind::Rx => unreachable!("checked by caller"),
        };
        acc = gm * acc;
    }
    SectorMatrix { idx, labels, entries: acc }
}

/// Fock cutoff that keeps the j-tower product exact for inputs with q ≤ q_max.
///
/// TC conserves q but moves k; R_x conserves k but moves q. Track both bounds
/// through the circuit.
pub fn tower_k_max(c: &Circuit, q_max: u32, two_j: u32) -> u32 {
    let n = c.n as i64;
    let h = (n - two_j as i64) / 2;
    let mut q_bound = q_max as i64;
    let mut k_bound = (q_max as i64 - h).max(0);
    for g in &c.gates {
        match g.kind {
            GateKind::TC => k_bound = k_bound.max(q_bound - h),
            GateKind::Rx => q_bound = q_bound.max(k_bound + n - h),
            GateKind::Rz => {}
        }
    }
    k_bound.max(0) as u32
}

fn tower_tc_eigs(n: u32, two_j: u32, k_max: u32) -> Vec<(Vec<usize>, HermitianEig)> {
    let h = ((n - two_j) / 2) as i64;
    let q_top = k_max as i64 + n as i64 - h;
    let mut out = Vec::new();
    for q in h..=q_top {
        let idx = SectorIndex { n, q: q as u32, two_j };
        let labels: Vec<BasisLabel> = idx.labels().into_iter().filter(|l| l.k <= k_max).collect();
        let d = labels.len();
        let mut hm = CMat::zeros(d, d);
        for i in 0..d.saturating_sub(1) {
            let v = (htc_element_sq(two_j, labels[i].two_m, labels[i].k) as f64).sqrt();
            hm[(i, i + 1)] = c(v);
            hm[(i + 1, i)] = c(v);
        }
        let pos = labels.iter().map(|l| tower_index(two_j, l.two_m, l.k)).collect();
        out.push((pos, HermitianEig::new(&hm)));
    }
    out
}

fn tower_product(c: &Circuit, two_j: u32, k_max: u32) -> JSectorOperator {
    let n = c.n;
    let d = tower_dim(two_j, k_max);
    let w = two_j as usize + 1;
    let mut acc = CMat::identity(d, d);
    let tc_eigs = tower_tc_eigs(n, two_j, k_max);
    let jx = jx_operator(n, two_j, 0).entries;
    let jx_eig = HermitianEig::new(&jx);
    for g in &c.gates {
        let mut gm = CMat::zeros(d, d);
        match g.kind {
            GateKind::TC => {
                for (pos, eig) in &tc_eigs {
                    let u = eig.evolve(g.param);
                    for (r, &pr) in pos.iter().enumerate() {
                        for (col, &pc) in pos.iter().enumerate() {
                            gm[(pr, pc)] = u[(r, col)];
                        }
                    }
                }
            }
            GateKind::Rz => {
                for k in 0..=k_max as usize {
                    for i in 0..w {
                        let m = two_j as f64 / 2.0 - i as f64;
                        gm[(k * w + i, k * w + i)] = Complex64::from_polar(1.0, -g.param * m);
                    }
                }
            }
            GateKind::Rx => {
                let u = jx_eig.evolve(g.param);
                for k in 0..=k_max as usize {
                    gm.view_mut((k * w, k * w), (w, w)).copy_from(&u);
                }
            }
        }
        acc = gm * acc;
    }
    JSectorOperator { n, two_j, k_max, entries: acc }
}

/// ⟨0|V|0⟩_osc as a PI qubit operator.
#[derive(Debug, Clone)]
pub struct VacuumSandwich {
    /// Per-j block u_j (m descending).
    pub blocks: BTreeMap<u32, CMat>,
    /// Assembled 2^n × 2^n operator.
    pub operator: CMat,
    /// ‖U†U − I‖_F; zero iff the oscillator returns to vacuum for every input.
    pub residual: f64,
}

pub fn vacuum_sandwich(v: &BlockUnitary) -> Result<VacuumSandwich> {
    let n = v.n;
    let mut blocks = BTreeMap::new();
    match v.backend {
        Backend::ChargeSector => {
            if v.q_max < n {
                return domain(format!("vacuum sandwich needs q_max ≥ n = {n} on the charge backend"));
            }
            for tj in two_j_values(n) {
                let w = tj as usize + 1;
                let mut u = CMat::zeros(w, w);
                for i in 0..w {
                    let two_m = tj as i32 - 2 * i as i32;
                    let q = ((two_m + n as i32) / 2) as u32;
                    let idx = SectorIndex::new(n, q, tj)?;
                    let blk = &v.sectors[&idx];
                    u[(i, i)] = blk.entries[(0, 0)];
                }
                blocks.insert(tj, u);
            }
        }
        Backend::JTower => {
            for (tj, t) in &v.towers {
                let w = *tj as usize + 1;
                blocks.insert(*tj, t.entries.view((0, 0), (w, w)).into_owned());
            }
        }
    }
    let operator = assemble_pi_operator(n, &blocks);
    let residual = unitarity_residual(&operator);
    Ok(VacuumSandwich { blocks, operator, residual })
}

/// ‖U − e^{iα*}V‖_F with α* = arg Tr(V†U).
pub fn distance_up_to_phase(u: &CMat, v: &CMat) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::Dimension { expected: u.nrows() * u.ncols(), found: v.nrows() * v.ncols() });
    }
    let tr = (v.adjoint() * u).trace();
    let alpha = if tr.norm() == 0.0 { 0.0 } else { tr.arg() };
    Ok(frobenius(&(u - v * Complex64::from_polar(1.0, alpha))))
}

/// The phase e^{iα*} minimizing ‖U − e^{iα}V‖_F.
pub fn best_phase(u: &CMat, v: &CMat) -> f64 {
    let tr = (v.adjoint() * u).trace();
    if tr.norm() == 0.0 { 0.0 } else { tr.arg() }
}

/// Evolves a state on qubits ⊗ Fock(space.k_max) through the circuit.
/// Returns the output in a (possibly larger) truncated space.
pub fn evolve_state(c: &Circuit, space: FullSpace, psi: &DVector<Complex64>) -> Result<(FullSpace, DVector<Complex64>)> {
    if psi.len() != space.dim() {
        return Err(Error::Dimension { expected: space.dim(), found: psi.len() });
    }
    if space.n != c.n {
        return domain("state and circuit disagree on n");
    }
    let n = c.n;
    let q_max = space.k_max + n;
    let basis = pi_basis(n);
    let mut plan: HashMap<u32, u32> = HashMap::new();
    for tj in two_j_values(n) {
        plan.insert(tj, tower_k_max(c, q_max, tj));
    }
    let k_out = plan.values().copied().max().unwrap_or(0).max(space.k_max);
    let out_space = FullSpace { n, k_max: k_out };
    let mut out = DVector::zeros(out_space.dim());
    let dq = 1usize << n;
    for pb in &basis {
        let k_max = plan[&pb.two_j];
        let u = tower_product(c, pb.two_j, k_max);
        let w = pb.two_j as usize + 1;
        for copy in &pb.copies {
            // components ⟨j,m,α;k|ψ⟩
            let mut comp = DVector::<Complex64>::zeros(tower_dim(pb.two_j, k_max));
            for k in 0..=space.k_max.min(k_max) {
                for (i, v) in copy.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for b in 0..dq {
                        if v[b] != 0.0 {
                            acc += psi[space.index(b, k)] * v[b];
                        }
                    }
                    comp[k as usize * w + i] = acc;
                }
            }
            let evolved = &u.entries * comp;
            for k in 0..=k_max {
                for (i, v) in copy.iter().enumerate() {
                    let a = evolved[k as usize * w + i];
                    if a == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    for b in 0..dq {
                        if v[b] != 0.0 {
                            out[out_space.index(b, k)] += a * v[b];
                        }
                    }
                }
            }
        }
    }
    Ok((out_space, out))
}

/// Dense brute-force evolution on the full truncated space; test oracle.
pub fn full_space_unitary(c: &Circuit, space: FullSpace) -> CMat {
    let h = HermitianEig::new(&space.htc());
    let z = HermitianEig::new(&space.jz());
    let x = HermitianEig::new(&space.jx());
    let d = space.dim();
    let mut acc = CMat::identity(d, d);
    for g in &c.gates {
        let gm = match g.kind {
            GateKind::TC => h.evolve(g.param),
            GateKind::Rz => z.evolve(g.param),
            GateKind::Rx => x.evolve(g.param),
        };
        acc = gm * acc;
    }
    acc
}
