use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use tcforge_core::dynamics::evolve_state;
use tcforge_core::liealg::{
    anharmonicity_check, schwinger_check, sector_rank_report, variance_separation_check, verify_pi_universality,
};
use tcforge_core::operators::{htc_block, jz_block};
use tcforge_core::pibasis::FullSpace;
use tcforge_core::realizability::{
    check_block_target, check_pi_u1, independent_constraint_count, BlockTarget, PiU1Target, RealizabilityVerdict,
};
use tcforge_core::sectors::two_j_values;
use tcforge_core::synthesis::{compile_two_qubit, f_gate, named_gate, qubit_osc_swap, CompiledGate, NamedGate};
use tcforge_core::{
    accidental_partner, apply_circuit, enumerate_sectors, interaction_time, vacuum_sandwich, Backend, CMat, Circuit,
    Complex64, SectorIndex,
};

use crate::output::{emit, json as to_json, write_file};
use crate::{ReportArgs, SectorsArgs, SimulateArgs, Status, Suite, SynthesizeArgs, UsageError, VerifyArgs};

const MAX_N: u32 = 6;
const MAX_Q: u32 = 12;

fn check_tol(tol: f64) -> Result<(), UsageError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(UsageError(format!("tolerance must be positive, got {tol}")))
    }
}

fn status(pass: bool) -> Status {
    if pass { Status::Pass } else { Status::Fail }
}

// ---------------------------------------------------------------- synthesize

#[derive(Serialize)]
struct SynthesisRow<'a> {
    gate: &'a str,
    tau: f64,
    kind: String,
    variant: String,
    distance: f64,
    residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SynthesisReport<'a> {
    #[serde(flatten)]
    compiled: &'a CompiledGate,
    tol: f64,
    pass: bool,
}

fn parse_phases(s: &str) -> Result<(f64, f64, f64), UsageError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| UsageError(format!("bad --phases `{s}`: {e}")))?;
    match v[..] {
        [a, b, c] if v.iter().all(|x| x.is_finite()) => Ok((a, b, c)),
        _ => Err(UsageError(format!("--phases needs three finite numbers φ00,φ+,φ11, got `{s}`"))),
    }
}

pub fn synthesize(a: &SynthesizeArgs) -> Result<Status, UsageError> {
    check_tol(a.tol)?;
    if a.n != 2 {
        return Err(UsageError(format!("gate synthesis is two-qubit only (got --n {})", a.n)));
    }
    let compiled = match (&a.gate, &a.phases) {
        (Some(name), _) => named_gate(NamedGate::parse(name, a.phi)?)?,
        (None, Some(p)) => {
            let (p00, pp, p11) = parse_phases(p)?;
            compile_two_qubit(p00, pp, p11)?
        }
        (None, None) => return Err(UsageError("give --gate or --phases".into())),
    };
    let pass = compiled.distance < a.tol && compiled.residual < a.tol;
    if let Some(path) = &a.circuit {
        write_file(path, &to_json(&compiled.circuit)?)?;
    }
    let row = SynthesisRow {
        gate: &compiled.target,
        tau: compiled.tau,
        kind: format!("{:?}", compiled.kind),
        variant: compiled.variant.to_string(),
        distance: compiled.distance,
        residual: compiled.residual,
        pass,
    };
    emit(&a.output, &SynthesisReport { compiled: &compiled, tol: a.tol, pass }, &[row])?;
    Ok(status(pass))
}

// ------------------------------------------------------------------ simulate

#[derive(Serialize)]
struct Amplitude {
    qubits: String,
    k: u32,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct StateReport {
    n: u32,
    interaction_time: f64,
    input: Vec<Amplitude>,
    output: Vec<Amplitude>,
    norm: f64,
    /// Probability that the oscillator ends outside |0⟩.
    vacuum_residual: f64,
}

#[derive(Serialize)]
struct Block {
    n: u32,
    q: Option<u32>,
    two_j: u32,
    k_max: Option<u32>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct UnitaryReport {
    n: u32,
    q_max: u32,
    backend: Backend,
    interaction_time: f64,
    max_unitarity_residual: f64,
    /// ‖U†U − I‖ of ⟨0|V|0⟩; `null` when q_max < n on the charge backend.
    vacuum_residual: Option<f64>,
    blocks: Vec<Block>,
}

#[derive(Serialize)]
struct EntryRow {
    q: Option<u32>,
    two_j: u32,
    k_max: Option<u32>,
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

fn bits(b: usize, n: u32) -> String {
    (0..n).map(|i| if b >> (n - 1 - i) & 1 == 1 { '1' } else { '0' }).collect()
}

fn parse_state(s: Option<&str>, n: u32) -> Result<DVector<f64>, UsageError> {
    let dim = 1usize << n;
    let mut v = DVector::zeros(dim);
    let s = s.unwrap_or("").trim().to_ascii_lowercase();
    let r = FRAC_1_SQRT_2;
    match s.as_str() {
        "" => v[0] = 1.0,
        "psi+" | "psi-" if n == 2 => {
            v[1] = r;
            v[2] = if s == "psi+" { r } else { -r };
        }
        "ghz" => {
            v[0] = r;
            v[dim - 1] = r;
        }
        _ if s.len() == n as usize && s.chars().all(|c| c == '0' || c == '1') => {
            v[usize::from_str_radix(&s, 2).unwrap()] = 1.0;
        }
        _ if s.contains(',') => {
            let a: Vec<f64> = s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| UsageError(format!("bad --state amplitudes: {e}")))?;
            if a.len() != dim {
                return Err(UsageError(format!("--state needs {dim} amplitudes for n = {n}, got {}", a.len())));
            }
            v = DVector::from_vec(a);
            let norm = v.norm();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(UsageError("--state amplitudes must have positive norm".into()));
            }
            v /= norm;
        }
        _ => return Err(UsageError(format!("unrecognized --state `{s}` for n = {n}"))),
    }
    Ok(v)
}

fn amplitudes(space: FullSpace, v: &DVector<Complex64>) -> Vec<Amplitude> {
    let mut out = Vec::new();
    for b in 0..1usize << space.n {
        for k in 0..=space.k_max {
            let a = v[space.index(b, k)];
            if a.norm() > 1e-12 {
                out.push(Amplitude { qubits: bits(b, space.n), k, re: a.re, im: a.im });
            }
        }
    }
    out
}

fn split(m: &CMat) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = |f: fn(&Complex64) -> f64| (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect()).collect();
    (rows(|z| z.re), rows(|z| z.im))
}

pub fn simulate(a: &SimulateArgs) -> Result<Status, UsageError> {
    let text = std::fs::read_to_string(&a.circuit)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", a.circuit.display())))?;
    let circ = Circuit::from_json(&text)?;
    if circ.n == 0 {
        return Err(UsageError("circuit has n = 0".into()));
    }
    if a.unitary {
        let q_max = a.qmax.unwrap_or(circ.n);
        let v = apply_circuit(&circ, q_max as i64)?;
        let vacuum_residual = vacuum_sandwich(&v).ok().map(|s| s.residual);
        let mut blocks = Vec::new();
        let mut rows = Vec::new();
        let mut push = |q: Option<u32>, two_j: u32, k_max: Option<u32>, m: &CMat| {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    rows.push(EntryRow { q, two_j, k_max, row: r, col: c, re: m[(r, c)].re, im: m[(r, c)].im });
                }
            }
            let (re, im) = split(m);
            blocks.push(Block { n: circ.n, q, two_j, k_max, re, im });
        };
        for (idx, s) in &v.sectors {
            push(Some(idx.q), idx.two_j, None, &s.entries);
        }
        for (tj, t) in &v.towers {
            push(None, *tj, Some(t.k_max), &t.entries);
        }
        let report = UnitaryReport {
            n: circ.n,
            q_max,
            backend: v.backend,
            interaction_time: v.interaction_time,
            max_unitarity_residual: v.max_unitarity_residual(),
            vacuum_residual,
            blocks,
        };
        emit(&a.output, &report, &rows)?;
        return Ok(Status::Pass);
    }
    let qubits = parse_state(a.state.as_deref(), circ.n)?;
    let space = FullSpace { n: circ.n, k_max: a.k };
    let psi = space.embed(&qubits, a.k);
    let (out_space, out) = evolve_state(&circ, space, &psi)?;
    let vac: f64 = (0..1usize << circ.n).map(|b| out[out_space.index(b, 0)].norm_sqr()).sum();
    let report = StateReport {
        n: circ.n,
        interaction_time: interaction_time(&circ),
        input: amplitudes(space, &psi),
        norm: out.norm(),
        vacuum_residual: (1.0 - vac).max(0.0),
        output: amplitudes(out_space, &out),
    };
    emit(&a.output, &report, &report.output)?;
    Ok(Status::Pass)
}

// -------------------------------------------------------------------- verify

#[derive(Serialize)]
struct Check {
    scope: String,
    metric: &'static str,
    value: f64,
    expected: f64,
    pass: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    suite: String,
    n: u32,
    q_max: u32,
    tol: f64,
    checks: usize,
    failures: usize,
    pass: bool,
    results: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    details: Value,
}

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn verify_accidental(n: u32, q_max: u32, tol: f64) -> (Vec<Check>, Value) {
    let mut out = Vec::new();
    for idx in enumerate_sectors(n, q_max) {
        let Some(p) = accidental_partner(idx) else { continue };
        if idx.is_filled() || p.q > q_max {
            continue;
        }
        let scope = format!("{idx}~{p}");
        let dh = max_abs(&(htc_block(idx).entries - htc_block(p).entries));
        let shift = (p.two_j as f64 - idx.two_j as f64) / 2.0;
        let dz = jz_block(idx).entries - jz_block(p).entries;
        let d = dz.nrows();
        let dz = max_abs(&(dz - CMat::identity(d, d) * Complex64::new(shift, 0.0)));
        out.push(Check { scope: scope.clone(), metric: "htc-difference", value: dh, expected: 0.0, pass: dh <= tol });
        out.push(Check { scope, metric: "jz-shift-residual", value: dz, expected: 0.0, pass: dz <= tol });
    }
    let v = variance_separation_check(n, q_max);
    let bad = v.unexplained_equalities.len() + v.partner_mismatches.len();
    out.push(Check {
        scope: format!("n={n}, q<={q_max}, d>=2"),
        metric: "unexplained-variance-equalities",
        value: bad as f64,
        expected: 0.0,
        pass: bad == 0,
    });
    (out, serde_json::to_value(&v).unwrap_or(Value::Null))
}

fn verify_lie(n: u32, q_max: u32, tol: f64) -> Result<(Vec<Check>, Value), UsageError> {
    let sectors: Vec<SectorIndex> = enumerate_sectors(n, q_max).into_iter().filter(|s| s.dim() >= 2).collect();
    let ranks = sectors.par_iter().map(|&idx| sector_rank_report(idx, tol)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    let mut anharm = Vec::new();
    for (idx, r) in sectors.iter().zip(ranks) {
        out.push(Check { scope: idx.to_string(), metric: "rank", value: r.rank as f64, expected: r.expected as f64, pass: r.pass });
        let a = anharmonicity_check(*idx);
        out.push(Check {
            scope: idx.to_string(),
            metric: "anharmonicity-condition",
            value: a.condition_holds as u8 as f64,
            expected: 1.0,
            pass: a.condition_holds,
        });
        anharm.push(a);
    }
    for tj in two_j_values(n).into_iter().filter(|&tj| tj > 0) {
        let ok = verify_pi_universality(n, tj)?;
        out.push(Check {
            scope: format!("(n={n}, 2j={tj})"),
            metric: "pi-universality",
            value: ok as u8 as f64,
            expected: 1.0,
            pass: ok,
        });
    }
    Ok((out, json!({ "anharmonicity": anharm })))
}

fn verify_phases(n: u32, tol: f64) -> Result<(Vec<Check>, Value), UsageError> {
    if n < 2 {
        return Err(UsageError("the phases suite needs n >= 2".into()));
    }
    let count = independent_constraint_count(n);
    let cz = check_pi_u1(&PiU1Target::cz(n), tol)?;
    let anti = check_pi_u1(&PiU1Target::anti_cz(n), tol)?;
    let flag = |v: &RealizabilityVerdict| v.realizable as u8 as f64;
    let scope = format!("n={n}");
    let out = vec![
        Check {
            scope: scope.clone(),
            metric: "independent-constraints",
            value: count as f64,
            expected: (n / 2) as f64 - 1.0,
            pass: count == (n / 2) as usize - 1,
        },
        Check {
            scope: scope.clone(),
            metric: "cz-realizable",
            value: flag(&cz),
            expected: (n <= 3) as u8 as f64,
            pass: cz.realizable == (n <= 3),
        },
        Check { scope, metric: "anti-cz-realizable", value: flag(&anti), expected: 1.0, pass: anti.realizable },
    ];
    Ok((out, json!({ "cz": cz, "anti_cz": anti })))
}

fn verify_realizability(n: u32, q_max: u32, tol: f64, trials: usize, seed: u64) -> Result<Vec<Check>, UsageError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in 0..trials {
        let mut circ = Circuit::new(n);
        for _ in 0..rng.random_range(1..=30) {
            circ = if rng.random_bool(0.5) {
                circ.tc(rng.random_range(-3.0..3.0))
            } else {
                circ.rz(rng.random_range(-2.0 * PI..2.0 * PI))
            };
        }
        let target = BlockTarget::from_block_unitary(&apply_circuit(&circ, q_max as i64)?)?
            .with_global_phase(rng.random_range(-PI..PI));
        let v = check_block_target(&target, tol)?;
        let ok = v.realizable && v.theta_z.is_some() && v.alpha.is_some();
        out.push(Check {
            scope: format!("circuit {t} ({} gates)", circ.gates.len()),
            metric: "round-trip-residual",
            value: v.max_residual,
            expected: 0.0,
            pass: ok,
        });
    }
    Ok(out)
}

fn verify_schwinger(two_j_max: u32, k_max: u32, tol: f64) -> (Vec<Check>, Value) {
    let r = schwinger_check(two_j_max, k_max);
    let scope = format!("2j<={two_j_max}, k<={k_max}");
    let out = vec![
        Check {
            scope: scope.clone(),
            metric: "involution-residual",
            value: r.involution_residual,
            expected: 0.0,
            pass: r.involution_residual <= tol,
        },
        Check {
            scope,
            metric: "intertwining-residual",
            value: r.intertwining_residual,
            expected: 0.0,
            pass: r.intertwining_residual <= tol,
        },
    ];
    (out, serde_json::to_value(&r).unwrap_or(Value::Null))
}

pub fn verify(a: &VerifyArgs) -> Result<Status, UsageError> {
    check_tol(a.tol)?;
    if a.n == 0 {
        return Err(UsageError("--n must be positive".into()));
    }
    // --n is 2j for the Schwinger suite; n qubits reach 2j = n.
    let n_max = if matches!(a.suite, Suite::Schwinger) { 2 * MAX_N } else { MAX_N };
    if !a.override_scale && (a.n > n_max || a.qmax > MAX_Q) {
        return Err(UsageError(format!(
            "n = {}, q_max = {} exceeds the desk-scale bounds n <= {n_max}, q_max <= {MAX_Q}; pass --override-scale",
            a.n, a.qmax
        )));
    }
    let (results, details) = match a.suite {
        Suite::Accidental => verify_accidental(a.n, a.qmax, a.tol),
        Suite::Lie => verify_lie(a.n, a.qmax, a.tol)?,
        Suite::Phases => verify_phases(a.n, a.tol)?,
        Suite::Realizability => (verify_realizability(a.n, a.qmax, a.tol, a.trials, a.seed)?, Value::Null),
        Suite::Schwinger => verify_schwinger(a.n, a.qmax, a.tol),
    };
    let failures = results.iter().filter(|c| !c.pass).count();
    let report = VerifyReport {
        suite: format!("{:?}", a.suite).to_ascii_lowercase(),
        n: a.n,
        q_max: a.qmax,
        tol: a.tol,
        checks: results.len(),
        failures,
        pass: failures == 0,
        results,
        details,
    };
    emit(&a.output, &report, &report.results)?;
    Ok(status(report.pass))
}

// ------------------------------------------------------------------- sectors

#[derive(Serialize)]
struct SectorRow {
    n: u32,
    q: u32,
    two_j: u32,
    dim: usize,
    h: i64,
    filled: bool,
    partner_q: Option<u32>,
    partner_two_j: Option<u32>,
}

pub fn sectors(a: &SectorsArgs) -> Result<Status, UsageError> {
    if a.n == 0 {
        return Err(UsageError("--n must be positive".into()));
    }
    let rows: Vec<SectorRow> = enumerate_sectors(a.n, a.qmax)
        .into_iter()
        .map(|idx| {
            let p = accidental_partner(idx);
            SectorRow {
                n: idx.n,
                q: idx.q,
                two_j: idx.two_j,
                dim: idx.dim(),
                h: idx.h(),
                filled: idx.is_filled(),
                partner_q: p.map(|p| p.q),
                partner_two_j: p.map(|p| p.two_j),
            }
        })
        .collect();
    emit(&a.output, &rows, &rows)?;
    Ok(Status::Pass)
}

// -------------------------------------------------------------------- report

#[derive(Serialize)]
struct TimeRow {
    gate: String,
    tau: f64,
    published: Option<f64>,
    distance: Option<f64>,
    kind: String,
}

pub fn report(a: &ReportArgs) -> Result<Status, UsageError> {
    check_tol(a.tol)?;
    let table = [
        (NamedGate::CZ, Some(2.866)),
        (NamedGate::SWAP, Some(1.273)),
        (NamedGate::ISWAP, Some(2.546)),
        (NamedGate::SqrtISWAP, Some(2.688)),
        (NamedGate::UPsiPlus, Some(0.585)),
        (NamedGate::UZZ(PI / 4.0), None),
    ];
    let compiled = table.par_iter().map(|(g, _)| named_gate(*g)).collect::<Result<Vec<_>, _>>()?;
    let mut rows: Vec<TimeRow> = table
        .iter()
        .zip(&compiled)
        .map(|((_, published), c)| TimeRow {
            gate: c.target.clone(),
            tau: c.tau,
            published: *published,
            distance: Some(c.distance),
            kind: format!("{:?}", c.kind),
        })
        .collect();
    let f = f_gate();
    rows.push(TimeRow { gate: "f".into(), tau: interaction_time(&f), published: Some(0.612), distance: None, kind: "Fixed".into() });
    let (qosc, dec) = qubit_osc_swap()?;
    rows.push(TimeRow {
        gate: "qubit_osc_swap".into(),
        tau: interaction_time(&qosc),
        published: Some(1.44),
        distance: None,
        kind: format!("{:?}", dec.kind),
    });
    let pass = compiled.iter().all(|c| c.distance < a.tol && c.residual < a.tol);
    emit(&a.output, &json!({ "time_unit": "2π/g_TC", "gates": rows, "pass": pass }), &rows)?;
    Ok(status(pass))
}
