//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single PASS/FAIL line on stderr (bypassing output capture).

// reference rows are printed to four decimals; 0.6931 is not meant as ln 2
#![allow(clippy::approx_constant, clippy::type_complexity)]

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use lr_core::chebyshev::*;
use lr_core::constants::{compute_m_constant, compute_w1, compute_w2, verify_theorem3};
use lr_core::engine::{Engine, RobinStatus};
use lr_core::exact::{brute_force_max_rho, ln_big, materialize, sigma_over_n_exact, ExponentMap};
use lr_core::EXP_GAMMA;

fn report(id: u32, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) {
    let within = elapsed <= limit;
    let verdict = if ok && within { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "{verdict} criterion {id} ({name}): {detail} [{:.2}s, limit {}s]",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {id} failed: {detail}");
    assert!(within, "criterion {id} exceeded its runtime limit");
}

fn lr(args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_lr-abundant"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        o.stderr.is_empty(),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    (
        o.status.code().unwrap(),
        String::from_utf8(o.stdout).unwrap(),
    )
}

/// m, q, k, z, δ, ρ, log n, G as printed in the reference table of the
/// first 20 LR numbers.
const TABLE: [(u64, u64, u32, u128, f64, f64, f64, f64); 20] = [
    (1, 2, 1, 2, 0.4055, 1.5000, 0.6931, -4.0296),
    (2, 3, 1, 3, 0.2877, 2.0000, 1.7918, 3.4294),
    (3, 5, 1, 5, 0.1823, 2.4000, 3.4012, 1.9606),
    (4, 2, 2, 6, 0.1542, 2.8000, 4.0943, 1.9864),
    (5, 7, 1, 7, 0.1335, 3.2000, 6.0403, 1.7793),
    (6, 11, 1, 11, 0.0870, 3.4909, 8.4381, 1.6368),
    (7, 3, 2, 12, 0.0800, 3.7818, 9.5368, 1.6770),
    (8, 13, 1, 13, 0.0741, 4.0727, 12.1017, 1.6334),
    (9, 2, 3, 14, 0.0690, 4.3636, 12.7949, 1.7119),
    (10, 17, 1, 17, 0.0572, 4.6203, 15.6281, 1.6807),
    (11, 19, 1, 19, 0.0513, 4.8635, 18.5725, 1.6646),
    (12, 23, 1, 23, 0.0426, 5.0750, 21.7080, 1.6490),
    (13, 29, 1, 29, 0.0339, 5.2500, 25.0753, 1.6295),
    (14, 5, 2, 30, 0.0328, 5.4249, 26.6847, 1.6519),
    (15, 2, 4, 30, 0.0328, 5.6058, 27.3779, 1.6937),
    (16, 31, 1, 31, 0.0317, 5.7866, 30.8119, 1.6881),
    (17, 37, 1, 37, 0.0267, 5.9430, 34.4228, 1.6794),
    (18, 3, 3, 39, 0.0253, 6.0954, 35.5214, 1.7073),
    (19, 41, 1, 41, 0.0241, 6.2441, 39.2350, 1.7016),
    (20, 43, 1, 43, 0.0230, 6.3893, 42.9962, 1.6988),
];

/// Direct evaluation of 1.5 / log log 2; the table's entry for m = 1 differs.
const G1: f64 = -4.0927;

#[test]
fn criterion_1_table_reproduction() {
    let t = Instant::now();
    let (code, out) = lr(&["generate", "--count", "20"]);
    let elapsed = t.elapsed();
    let mut lines = out.lines();
    let mut mismatches = Vec::new();
    if code != 0 || lines.next() != Some("m,q,k,z,delta,rho,log_n,G,verdict") {
        mismatches.push(format!("exit {code} or bad header"));
    }
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    if rows.len() != 20 {
        mismatches.push(format!("{} rows", rows.len()));
    }
    for (row, &(m, q, k, z, delta, rho, log_n, g)) in rows.iter().zip(&TABLE) {
        let int = |i: usize| row[i].parse::<u128>().unwrap();
        let f = |i: usize| row[i].parse::<f64>().unwrap();
        if (int(0), int(1), int(2), int(3)) != (m as u128, q as u128, k as u128, z) {
            mismatches.push(format!("m={m}: q,k,z"));
        }
        let (g_ref, g_tol) = if m == 1 { (G1, 2e-3) } else { (g, 1.5e-3) };
        for (name, got, want, tol) in [
            ("delta", f(4), delta, 1.5e-3),
            ("rho", f(5), rho, 1.5e-3),
            ("log_n", f(6), log_n, 1.5e-3),
            ("G", f(7), g_ref, g_tol),
        ] {
            if (got - want).abs() > tol {
                mismatches.push(format!("m={m}: {name} {got} vs {want}"));
            }
        }
    }
    let detail = if mismatches.is_empty() {
        "20 rows match; G at m=1 is -4.0926".to_string()
    } else {
        mismatches.join("; ")
    };
    report(
        1,
        "table of the first 20 LR numbers",
        mismatches.is_empty(),
        elapsed,
        Duration::from_secs(1),
        &detail,
    );
}

#[test]
fn criterion_2_constants() {
    let t = Instant::now();
    let w1 = compute_w1(10_000_000).unwrap();
    let m = compute_m_constant(10_000_000).unwrap();
    let w2 = compute_w2(10_000_000).unwrap();
    let t3 = verify_theorem3(&w1, &w2);
    let elapsed = t.elapsed();
    let ok = (w1.value - 0.20208).abs() <= 1e-4
        && (m.value - 0.26149).abs() <= 1e-4
        && (w2.value - 0.77929).abs() <= 2e-3
        && t3.residual <= t3.combined_tail
        && t3.residual <= 2e-3;
    let detail = format!(
        "W1={:.6} M={:.6} W2={:.6} residual={:.3e} tail={:.3e}",
        w1.value, m.value, w2.value, t3.residual, t3.combined_tail
    );
    report(
        2,
        "W1, M, W2 and W2 - W1 = gamma",
        ok,
        elapsed,
        Duration::from_secs(120),
        &detail,
    );
}

#[test]
fn criterion_3_robin() {
    let t = Instant::now();
    let mut e = Engine::new();
    let mut bad = Vec::new();
    let mut early_max = (f64::NEG_INFINITY, 0);
    let mut max = (f64::NEG_INFINITY, 0);
    for _ in 0..100_000 {
        let r = e.step().unwrap();
        let expected = if r.m <= 6 {
            RobinStatus::BelowThreshold
        } else {
            RobinStatus::Holds
        };
        if r.verdict.status != expected {
            bad.push(r.m);
        }
        if r.m >= 7 {
            if r.g > max.0 {
                max = (r.g, r.m);
            }
            if r.m <= 20 && r.g > early_max.0 {
                early_max = (r.g, r.m);
            }
        }
    }
    let (code, out) = lr(&["robin", "--count", "20"]);
    let elapsed = t.elapsed();
    let ok = bad.is_empty()
        && early_max.1 == 9
        && (early_max.0 - 1.7119).abs() <= 5e-5
        && max.0 < EXP_GAMMA
        && code == 0
        && out.contains("max G above threshold: 1.7119 at m=9");
    let detail = format!(
        "{} non-holding m; max G over m<=20 = {:.4} at m={}; max over m<=1e5 = {:.9} at m={} < {:.7}",
        bad.len(),
        early_max.0,
        early_max.1,
        max.0,
        max.1,
        EXP_GAMMA
    );
    report(
        3,
        "Robin inequality for m <= 1e5",
        ok,
        elapsed,
        Duration::from_secs(300),
        &detail,
    );
}

#[test]
fn criterion_4_oracle_equivalence() {
    let t = Instant::now();
    let mut e = Engine::new();
    let mut bad = Vec::new();
    for m in 1..=12usize {
        e.step().unwrap();
        let lr = ExponentMap::from_lr(e.state().exponents());
        let o = brute_force_max_rho(m).unwrap();
        if o.best != lr || o.n != materialize(&lr) || o.rho != sigma_over_n_exact(&lr) {
            bad.push(m);
        }
    }
    let elapsed = t.elapsed();
    let detail = if bad.is_empty() {
        "brute force maximum equals n_m with equal exact rho for m = 1..=12".to_string()
    } else {
        format!("mismatch at m = {bad:?}")
    };
    report(
        4,
        "LR maximality by brute force",
        bad.is_empty(),
        elapsed,
        Duration::from_secs(120),
        &detail,
    );
}

#[test]
fn criterion_5_exact_float_agreement() {
    let t = Instant::now();
    let mut e = Engine::new();
    let (mut worst_rho, mut worst_log) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        e.step().unwrap();
        let s = e.state();
        let map = ExponentMap::from_lr(s.exponents());
        let exact = sigma_over_n_exact(&map).to_f64();
        worst_rho = worst_rho.max((s.rho().unwrap() - exact).abs() / exact);
        let log_n = ln_big(&materialize(&map));
        worst_log = worst_log.max((s.log_n() - log_n).abs() / log_n);
    }
    let elapsed = t.elapsed();
    let ok = worst_rho <= 1e-10 && worst_log <= 1e-10;
    let detail = format!("max relative error rho {worst_rho:.2e}, log n {worst_log:.2e}");
    report(
        5,
        "exact and float agreement for m <= 500",
        ok,
        elapsed,
        Duration::from_secs(120),
        &detail,
    );
}

#[test]
fn criterion_6_bound_suites() {
    let t = Instant::now();
    let tables = SieveTables::new(SieveTables::DEFAULT_LIMIT).unwrap();
    let w1 = compute_w1(10_000_000).unwrap();
    let mut suites: Vec<BoundReport> = Vec::new();
    let mut fold = |r: BoundReport| match suites.iter_mut().find(|s| s.theorem == r.theorem) {
        Some(s) => s.merge(r),
        None => suites.push(r),
    };
    let mut e = Engine::new();
    for _ in 0..10_000 {
        e.step().unwrap();
        let s = e.state();
        let z = s.z_m().unwrap();
        fold(check_lemma1(z, &tables).unwrap());
        fold(check_lemma2(s, &tables).unwrap());
        fold(check_theorem2(s, &tables).unwrap());
        fold(check_theorem4(s, &w1).unwrap());
        if s.m() >= 2 {
            fold(check_theorem6(z, &tables).unwrap());
        }
        fold(check_theorem7(s, &tables).unwrap());
    }
    while e.m() < 100_000 {
        e.step().unwrap();
        if e.m().is_multiple_of(1000) {
            fold(check_theorem7(e.state(), &tables).unwrap());
        }
    }
    let elapsed = t.elapsed();
    let ok = suites.iter().all(|s| s.pass());
    let detail = suites
        .iter()
        .map(|s| match s.failures.first() {
            None => format!("{} ok ({} checks)", s.theorem, s.checked),
            Some(w) => format!(
                "{} {} failed (first at m={} {}, slack {:.4})",
                s.theorem, s.failed, w.at, w.part, w.slack
            ),
        })
        .collect::<Vec<_>>()
        .join("; ");
    report(
        6,
        "bound suites",
        ok,
        elapsed,
        Duration::from_secs(600),
        &detail,
    );
}

#[test]
fn criterion_7_dusart() {
    let t = Instant::now();
    let tables = SieveTables::new(10_000_000).unwrap();
    let r = check_dusart(&tables, DUSART_START, 10_000_000, 10_000).unwrap();
    let elapsed = t.elapsed();
    let ok = r.pass() && r.checked == 10_000;
    let detail = format!(
        "{} points, {} failures, worst slack {:.4} at x={}",
        r.checked, r.failed, r.worst_slack, r.worst_at
    );
    report(
        7,
        "|theta(x) - x| < 0.2x/log^2 x",
        ok,
        elapsed,
        Duration::from_secs(120),
        &detail,
    );
}

#[test]
fn criterion_8_determinism() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("ckpt.json");
    let ckpt = ckpt.to_str().unwrap();
    let mut mismatched = Vec::new();
    for precision in ["4", "15"] {
        let (c1, _) = lr(&[
            "generate",
            "--count",
            "1000",
            "--checkpoint",
            ckpt,
            "--precision",
            precision,
        ]);
        let (c2, warm) = lr(&[
            "generate",
            "--count",
            "2000",
            "--resume",
            ckpt,
            "--precision",
            precision,
        ]);
        let (c3, cold) = lr(&["generate", "--count", "2000", "--precision", precision]);
        let cold_tail: Vec<&str> = cold.lines().skip(1001).collect();
        let warm_rows: Vec<&str> = warm.lines().skip(1).collect();
        if (c1, c2, c3) != (0, 0, 0) || warm_rows.len() != 1000 || cold_tail != warm_rows {
            mismatched.push(precision);
        }
    }
    let elapsed = t.elapsed();
    let detail = if mismatched.is_empty() {
        "resumed rows 1001..=2000 identical to a cold run at 4 and 15 decimals".to_string()
    } else {
        format!("mismatch at precision {mismatched:?}")
    };
    report(
        8,
        "checkpoint and resume",
        mismatched.is_empty(),
        elapsed,
        Duration::from_secs(120),
        &detail,
    );
}
