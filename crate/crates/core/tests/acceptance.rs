//! Acceptance criteria, run as a plain binary so that every criterion
//! prints exactly one PASS/FAIL line. Exits nonzero if any line fails.

use std::time::{Duration, Instant};

use duality_lab::theorems::{
    negative_control, reports_to_json, run_suite, verify, Params, VerificationReport, THEOREM_IDS,
};

const SEED: u64 = 2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn params(p: u64, trials: usize) -> Params {
    Params {
        p,
        trials,
        seed: SEED,
        ..Params::default()
    }
}

fn run(id: &str, params: &Params) -> VerificationReport {
    verify(id, params).unwrap_or_else(|e| panic!("{id}: {e}"))
}

fn failures(r: &VerificationReport) -> usize {
    r.comparisons.iter().filter(|c| !c.pass).count()
}

/// Verdict PASS with at least `min` instances; returns (instances, failures).
fn tally(reports: &[VerificationReport], min: usize) -> (bool, usize, usize) {
    let instances: usize = reports.iter().map(|r| r.instances.len()).sum();
    let failed: usize = reports.iter().map(failures).sum();
    let ok = reports.iter().all(|r| r.passed()) && reports.iter().all(|r| r.instances.len() >= min);
    (ok, instances, failed)
}

fn within(elapsed: Duration, limit: u64) -> bool {
    elapsed < Duration::from_secs(limit)
}

fn koszul_selfduality() -> Outcome {
    let start = Instant::now();
    let mut reports = Vec::new();
    for p in [2, 3] {
        for d in 1..=4 {
            reports.push(run("koszul-selfduality", &Params { d, ..params(p, 50) }));
        }
    }
    let t = start.elapsed();
    let (ok, n, failed) = tally(&reports, 50);
    Outcome {
        pass: ok && within(t, 60),
        detail: format!("8 (p, d) cells, {n} modules, {failed} failures, {t:.2?} (limit 60 s)"),
    }
}

fn per_prime(id: &str, trials: usize, min: usize) -> Outcome {
    let reports: Vec<_> = [2, 3].iter().map(|&p| run(id, &params(p, trials))).collect();
    let (ok, n, failed) = tally(&reports, min);
    Outcome {
        pass: ok,
        detail: format!("{id}: {n} instances over p = 2, 3, {failed} failures"),
    }
}

fn tor_vanishing() -> Outcome {
    let start = Instant::now();
    let r = run(
        "tor-vanishing-graded",
        &Params {
            d: 4,
            n: 12,
            ..params(2, 1)
        },
    );
    let t = start.elapsed();
    let (ok, n, failed) = tally(std::slice::from_ref(&r), 1);
    Outcome {
        pass: ok && within(t, 120),
        detail: format!("{n} split pairs in 4 variables, N = 12, {failed} failures, {t:.2?} (limit 120 s)"),
    }
}

fn torus_duality() -> Outcome {
    let reports: Vec<_> = [2, 3].iter().map(|&p| run("torus-duality", &params(p, 40))).collect();
    let (ok, n, failed) = tally(&reports, 40);
    let no_stab = reports
        .iter()
        .flat_map(|r| &r.comparisons)
        .filter(|c| c.lhs.contains("no stabilization"))
        .count();
    let mut ranks = [0usize; 3];
    for r in &reports {
        for inst in &r.instances {
            let s = inst["module"]["ambient"]["s"].as_u64().unwrap_or(0) as usize;
            ranks[s.min(2)] += 1;
        }
    }
    Outcome {
        pass: ok && no_stab == 0 && ranks[1] > 0 && ranks[2] > 0,
        detail: format!(
            "{n} instances (s=1: {}, s=2: {}), {failed} failures, {no_stab} NoStabilization",
            ranks[1], ranks[2]
        ),
    }
}

fn local_duality() -> Outcome {
    let reports: Vec<_> = [2, 3]
        .iter()
        .map(|&p| run("local-duality-iwasawa", &params(p, 20)))
        .collect();
    let (ok, n, failed) = tally(&reports, 20);
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2)];
    let counts: Vec<usize> = pairs
        .iter()
        .map(|&(t, s)| {
            reports
                .iter()
                .flat_map(|r| &r.instances)
                .filter(|v| v["ambient"]["t"] == t && v["ambient"]["s"] == s)
                .count()
        })
        .collect();
    Outcome {
        pass: ok && counts.iter().all(|&c| c > 0),
        detail: format!("{n} complete intersections, per (t,s) {counts:?}, {failed} failures"),
    }
}

fn adjoints_and_jannsen() -> Outcome {
    let mut reports = Vec::new();
    for p in [2, 3] {
        reports.push(run("explicit-adjoints-finite", &params(p, 20)));
        reports.push(run("jannsen-route", &params(p, 20)));
    }
    let (ok, n, failed) = tally(&reports, 20);
    Outcome {
        pass: ok,
        detail: format!("{n} instances across both verifiers, {failed} failures"),
    }
}

fn hull_and_pontryagin() -> Outcome {
    let hull = run("injective-hull", &params(2, 1));
    let mut reports = vec![hull];
    for p in [2, 3] {
        reports.push(run("pont-involution", &params(p, 100)));
        reports.push(run("pont-hom-rvee", &params(p, 100)));
    }
    let rings = reports[0].instances.len();
    let (ok, n, failed) = tally(&reports[1..], 100);
    Outcome {
        pass: ok && reports[0].passed(),
        detail: format!(
            "{rings} monomial local rings of order <= 64, {n} random modules, {} failures",
            failed + failures(&reports[0])
        ),
    }
}

fn z_counterexample() -> Outcome {
    let r = run("z-counterexample", &params(2, 1));
    Outcome {
        pass: r.passed(),
        detail: format!("{} exact comparisons, {} failures", r.comparisons.len(), failures(&r)),
    }
}

fn negative_controls() -> Outcome {
    let mut missed = Vec::new();
    for id in THEOREM_IDS {
        match negative_control(id, &params(2, 1)) {
            Ok(r) if !r.passed() => {}
            _ => missed.push(id),
        }
    }
    Outcome {
        pass: missed.is_empty(),
        detail: format!("{} of 15 corrupted fixtures detected {missed:?}", 15 - missed.len()),
    }
}

fn determinism() -> Outcome {
    let p = params(3, 10);
    let a = reports_to_json(&run_suite(&p, 0).expect("suite runs"));
    let b = reports_to_json(&run_suite(&p, 2).expect("suite runs"));
    Outcome {
        pass: a == b,
        detail: format!(
            "two suite runs (all cores, 2 jobs): {} and {} bytes, identical: {}",
            a.len(),
            b.len(),
            a == b
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("koszul self-duality", koszul_selfduality),
        ("ext-tor duality", || per_prime("ext-tor-duality", 100, 100)),
        ("matlis commutation", || per_prime("matlis-commutation", 100, 100)),
        ("graded tor vanishing", tor_vanishing),
        ("torus duality", torus_duality),
        ("local duality", local_duality),
        ("explicit adjoints and jannsen route", adjoints_and_jannsen),
        ("injective hull and pontryagin", hull_and_pontryagin),
        ("z counterexample", z_counterexample),
        ("negative controls", negative_controls),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let out = check();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {name}: {verdict} ({})", i + 1, out.detail);
        failed += usize::from(!out.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
