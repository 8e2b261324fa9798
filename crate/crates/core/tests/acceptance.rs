//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria that fail for documented reasons (see README, "Known deviations")
//! are listed in `KNOWN`; any other failure makes this target exit non-zero.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tcforge_core::dynamics::{evolve_state, sector_unitary};
use tcforge_core::liealg::{
    anharmonicity_check, check_s_commutation, schwinger_check, sector_rank_report, variance_separation_check,
};
use tcforge_core::linalg::c;
use tcforge_core::operators::{htc_block, jz_block};
use tcforge_core::pibasis::{pi_basis, FullSpace};
use tcforge_core::realizability::{
    check_block_target, check_pi_u1, independent_constraint_count, BlockTarget, PiU1Target, DEFAULT_TOL,
};
use tcforge_core::synthesis::{compile_two_qubit, f_gate, named_gate, qubit_osc_swap, NamedGate};
use tcforge_core::{accidental_partner, apply_circuit, enumerate_sectors, interaction_time, CMat, Circuit, SectorIndex};

/// Criteria expected to fail, with the reason.
const KNOWN: &[(u32, &str)] = &[
    (1, "optimizer beats the published sqrt(iSWAP) time (2.511 < 2.688)"),
    (6, "published closed form has the opposite sign of its own finite-difference definition"),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let mut o = f();
    let el = t.elapsed();
    if let Some(l) = limit {
        if el > l {
            o.pass = false;
            o.detail.push_str(&format!("; over time limit {:?}", l));
        }
    }
    println!(
        "criterion {id:>2} {} {name} [{:.2}s] {}",
        if o.pass { "PASS" } else { "FAIL" },
        el.as_secs_f64(),
        o.detail
    );
    o.pass
}

fn c1() -> Outcome {
    let table = [
        (NamedGate::CZ, 2.866),
        (NamedGate::SWAP, 1.273),
        (NamedGate::ISWAP, 2.546),
        (NamedGate::SqrtISWAP, 2.688),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (g, published) in table {
        let r = named_gate(g).unwrap();
        let ok = (r.tau - published).abs() <= 0.01 && r.distance < 1e-8;
        pass &= ok;
        parts.push(format!("{}: tau={:.4} (published {published}) dist={:.1e}{}", g.name(), r.tau, r.distance, if ok { "" } else { " MISMATCH" }));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn c2() -> Outcome {
    let f = f_gate();
    let b = sector_unitary(&f, SectorIndex::new(2, 2, 2).unwrap()).unwrap();
    let want = CMat::from_row_slice(3, 3, &[c(0.0), c(0.0), c(1.0), c(0.0), c(-1.0), c(0.0), c(1.0), c(0.0), c(0.0)]);
    let dev = (b - want).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tau = interaction_time(&f);
    let tau_exact = 3.0 * PI / 6f64.sqrt() / (2.0 * PI);
    Outcome {
        pass: dev < 1e-9 && tau == tau_exact,
        detail: format!("charge-2 deviation {dev:.1e}, tau_F={tau} (3/(2*sqrt6)={tau_exact})"),
    }
}

fn c3() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in 1..=6 {
        let space = FullSpace { n, k_max: 12 };
        let h = space.htc();
        let blocks = pi_basis(n);
        for idx in enumerate_sectors(n, 12) {
            let pb = blocks.iter().find(|b| b.two_j == idx.two_j).unwrap();
            let labels = idx.labels();
            let want = htc_block(idx).entries;
            for copy in &pb.copies {
                let vecs: Vec<_> = labels
                    .iter()
                    .map(|l| space.embed(&copy[((idx.two_j as i32 - l.two_m) / 2) as usize], l.k))
                    .collect();
                let hv: Vec<_> = vecs.iter().map(|v| &h * v).collect();
                let got = CMat::from_fn(labels.len(), labels.len(), |r, col| vecs[r].dotc(&hv[col]));
                worst = worst.max((got - &want).iter().map(|z| z.norm()).fold(0.0, f64::max));
                count += 1;
            }
        }
    }
    Outcome { pass: worst < 1e-10, detail: format!("{count} sector copies, max deviation {worst:.1e}") }
}

fn c4() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for n in 1..=6 {
        for idx in enumerate_sectors(n, 12) {
            let Some(p) = accidental_partner(idx) else { continue };
            if idx.is_filled() || p.q > 12 {
                continue;
            }
            pairs += 1;
            let shift = (p.two_j as f64 - idx.two_j as f64) / 2.0;
            let dz = jz_block(idx).entries - jz_block(p).entries;
            let d = dz.nrows();
            let ok_h = htc_block(idx).entries == htc_block(p).entries;
            let ok_z = dz == CMat::identity(d, d) * c(shift);
            if !(ok_h && ok_z) {
                bad.push(format!("{idx}~{p}"));
            }
        }
    }
    let mut unexplained = 0;
    let mut compared = 0;
    for n in 1..=6 {
        let r = variance_separation_check(n, 12);
        unexplained += r.unexplained_equalities.len() + r.partner_mismatches.len();
        compared += r.pairs_compared;
    }
    Outcome {
        pass: bad.is_empty() && unexplained == 0 && pairs > 0,
        detail: format!(
            "{pairs} partner pairs identical (bad: {bad:?}); {compared} same-dimension pairs (d>=2), {unexplained} unexplained variance equalities"
        ),
    }
}

fn c5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 3..=6 {
        let r = check_s_commutation(n, 12);
        pass &= r.htc_residual < 1e-9 && r.jz_forward_exact && r.jz_full_exact;
        parts.push(format!("n={n}: |[H,S]|={:.1e} masked={} jz_exact={}", r.htc_residual, r.masked_rows, r.jz_forward_exact));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn c6() -> Outcome {
    let mut ranks_ok = true;
    let mut sectors = 0;
    let mut closed = true;
    let mut negated = true;
    let mut cond = true;
    for n in 1..=5 {
        for idx in enumerate_sectors(n, 12) {
            let d = idx.dim();
            if !(2..=7).contains(&d) {
                continue;
            }
            sectors += 1;
            ranks_ok &= sector_rank_report(idx, 1e-8).unwrap().pass;
            let a = anharmonicity_check(idx);
            closed &= a.matches_closed_form;
            negated &= a.matches_negated_form;
            cond &= a.condition_holds;
        }
    }
    Outcome {
        pass: ranks_ok && closed,
        detail: format!(
            "{sectors} sectors (q<=12): rank d^2-1 {}; universality condition {}; differences == 2(n+q-1)-6y: {closed}; == 6y-2(n+q-1): {negated}",
            if ranks_ok { "all" } else { "NOT all" },
            if cond { "holds" } else { "fails" }
        ),
    }
}

fn c7() -> Outcome {
    let mut ok = true;
    let mut counts = Vec::new();
    for n in 2..=8u32 {
        let k = independent_constraint_count(n);
        counts.push(k);
        ok &= k == (n / 2) as usize - 1;
        let cz = check_pi_u1(&PiU1Target::cz(n), DEFAULT_TOL).unwrap().realizable;
        ok &= cz == (n <= 3);
        ok &= check_pi_u1(&PiU1Target::anti_cz(n), DEFAULT_TOL).unwrap().realizable;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for n in [2u32, 3] {
        for _ in 0..200 {
            let vals: Vec<f64> = (0..64).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
            let t = PiU1Target::from_fn(n, |tj, tm| vals[(tj * 8) as usize + ((tm + 8) / 2) as usize]);
            ok &= check_pi_u1(&t, DEFAULT_TOL).unwrap().realizable;
        }
    }
    Outcome { pass: ok, detail: format!("constraint counts n=2..8: {counts:?}; CZ_(n-1) rejected iff n>=4; anti-CZ accepted") }
}

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut accepted = 0;
    let mut worst_res: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let mut circ = Circuit::new(n);
        for _ in 0..rng.random_range(1..=30) {
            circ = if rng.random_bool(0.5) {
                circ.tc(rng.random_range(-3.0..3.0))
            } else {
                circ.rz(rng.random_range(-2.0 * PI..2.0 * PI))
            };
        }
        let t = BlockTarget::from_block_unitary(&apply_circuit(&circ, rng.random_range(0..=8)).unwrap()).unwrap();
        let v = check_block_target(&t, DEFAULT_TOL).unwrap();
        if v.realizable && v.theta_z.is_some() && v.alpha.is_some() {
            accepted += 1;
        }
        worst_res = worst_res.max(v.max_residual);
    }
    let mut compiled = 0;
    let mut worst_dist: f64 = 0.0;
    let mut worst_tau: f64 = 0.0;
    for _ in 0..1000 {
        let p: [f64; 3] = std::array::from_fn(|_| rng.random_range(-PI..PI));
        let r = compile_two_qubit(p[0], p[1], p[2]).unwrap();
        worst_dist = worst_dist.max(r.distance.max(r.residual));
        worst_tau = worst_tau.max(r.tau);
        if r.distance < 1e-8 && r.residual < 1e-8 && r.tau <= 3.92 {
            compiled += 1;
        }
    }
    Outcome {
        pass: accepted == 200 && compiled == 1000,
        detail: format!(
            "{accepted}/200 block targets accepted (max residual {worst_res:.1e}); {compiled}/1000 phase triples compiled (max residual {worst_dist:.1e}, max tau {worst_tau:.4})"
        ),
    }
}

fn c9() -> Outcome {
    let (circ, a) = qubit_osc_swap().unwrap();
    let tau = interaction_time(&circ);
    let space = FullSpace { n: 2, k_max: 4 };
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut fids = BTreeMap::new();
    for (name, q, k) in [("|00>|0>", vec![1.0, 0.0, 0.0, 0.0], 2), ("|Psi+>|0>", vec![0.0, r, r, 0.0], 1), ("|11>|0>", vec![0.0, 0.0, 0.0, 1.0], 0)] {
        let psi = space.embed(&DVector::from_vec(q), 0);
        let (sp, out) = evolve_state(&circ, space, &psi).unwrap();
        let want = sp.embed(&DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]), k);
        fids.insert(name, want.dotc(&out).norm_sqr());
    }
    let min_f = fids.values().copied().fold(1.0, f64::min);
    Outcome {
        pass: min_f >= 1.0 - 1e-8 && (tau - 1.44).abs() <= 0.01,
        detail: format!("tau={tau:.4} (A_swap {:?} {:.4}), min fidelity 1-{:.1e}", a.kind, a.tau, 1.0 - min_f),
    }
}

fn c10() -> Outcome {
    let r = schwinger_check(8, 10);
    Outcome {
        pass: r.pass,
        detail: format!(
            "W^2=I on {} vectors (residual {:.1e}), W(J+ a)W=J+ a on {} (residual {:.1e}), {} out of bounds skipped",
            r.checked_involution, r.involution_residual, r.checked_intertwining, r.intertwining_residual, r.skipped
        ),
    }
}

fn main() {
    let results = [
        (1, run(1, "gate-time table", Some(Duration::from_secs(10)), c1)),
        (2, run(2, "F-gate exactness", None, c2)),
        (3, run(3, "matrix-element oracle", None, c3)),
        (4, run(4, "accidental symmetry", Some(Duration::from_secs(5)), c4)),
        (5, run(5, "S-operator", None, c5)),
        (6, run(6, "Lie universality", None, c6)),
        (7, run(7, "realizability dimension gap", None, c7)),
        (8, run(8, "round-trip soundness", Some(Duration::from_secs(60)), c8)),
        (9, run(9, "qubit-oscillator SWAP", None, c9)),
        (10, run(10, "Schwinger map", None, c10)),
    ];
    let passed = results.iter().filter(|r| r.1).count();
    println!("{passed}/{} criteria pass", results.len());
    let mut unexpected = false;
    for (id, ok) in results {
        if let Some((_, why)) = KNOWN.iter().find(|k| k.0 == id) {
            if ok {
                println!("note: criterion {id} now passes; remove it from the known list");
            } else {
                println!("known failure {id}: {why}");
            }
        } else if !ok {
            unexpected = true;
        }
    }
    if unexpected {
        std::process::exit(1);
    }
}
