//! Acceptance criteria, one line each.
//!
//! Run with `cargo test -p dedekind-core --test acceptance -- --nocapture`
//! to see the PASS/FAIL lines.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use dedekind_core::engine::{self, d_nplus2, d_nplus3, d_nplus4, ExecOptions};
use dedekind_core::oracle::{
    certify_exhaustive, certify_instance, compose_decomposition, decompose,
    enumerate_antichains, enumerate_interval, solve_system, CandidateSpace, Certification,
};
use dedekind_core::symmetry::{canonical_form, enumerate_classes};
use dedekind_core::{interval_size, p_general, tables, Antichain, BigCount, Error, SystemInstance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dedekind numbers `D(0..=7)`.
const D: [u128; 8] = [2, 3, 6, 20, 168, 7581, 7828354, 2414682040998];
/// Antichain classes under relabelling, `R(0..=6)`.
const R: [usize; 7] = [2, 3, 5, 10, 30, 210, 16353];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn d(n: usize) -> BigCount {
    BigCount::from(D[n])
}

fn opts() -> ExecOptions {
    ExecOptions::default()
}

fn c1_bruteforce() -> Outcome {
    let start = Instant::now();
    for n in 0..=6 {
        let got = engine::brute_force_d(n).map_err(|e| e.to_string())?;
        ensure(got == d(n), || format!("D({n}) = {got}, expected {}", D[n]))?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), || format!("took {t:?}"))?;
    Ok(format!("D(0..=6) exact in {:.2}s", t.as_secs_f64()))
}

fn c2_nplus2() -> Outcome {
    let mut detail = String::new();
    for n in 0..=5 {
        let r = d_nplus2(n, false, &opts()).map_err(|e| e.to_string())?;
        ensure(r.result == d(n + 2), || format!("n={n}: {}", r.result))?;
        if n <= 4 {
            ensure(r.terms == d(n + 1), || format!("n={n}: {} terms", r.terms))?;
        }
        if n == 5 {
            detail = format!("D(7) = {} in {:.2}s", r.result, r.seconds);
        }
    }
    Ok(format!("n=0..5 exact, term counts D(n+1); {detail}"))
}

fn c3_wiedemann() -> Outcome {
    for n in 0..=4 {
        let w = engine::wiedemann_d_nplus2(n).map_err(|e| e.to_string())?;
        let p = d_nplus2(n, false, &opts()).map_err(|e| e.to_string())?.result;
        ensure(w == p, || format!("n={n}: {w} vs {p}"))?;
    }
    Ok("agrees with nplus2 for n=0..4".into())
}

fn c4_nplus3() -> Outcome {
    for (n, table) in [(0, tables::table3()), (1, tables::table4())] {
        let table = table.map_err(|e| e.to_string())?;
        let bad: Vec<_> = table.rows.iter().filter(|r| !r.ok).collect();
        ensure(table.ok, || format!("{} mismatches: {bad:?}", table.table))?;
        let r = d_nplus3(n, &opts()).map_err(|e| e.to_string())?;
        ensure(r.result == d(n + 3), || format!("n={n}: {}", r.result))?;
    }
    for n in 2..=3 {
        let r = d_nplus3(n, &opts()).map_err(|e| e.to_string())?;
        ensure(r.result == d(n + 3), || format!("n={n}: {}", r.result))?;
    }
    Ok("20 (rows 9,6,3,2), 168 (ten rows), 7581, 7828354".into())
}

fn c5_nplus4() -> Outcome {
    for t in [tables::table5(), tables::table6(), tables::table7()] {
        let t = t.map_err(|e| e.to_string())?;
        let bad: Vec<_> = t.rows.iter().filter(|r| !r.ok).collect();
        ensure(t.ok, || format!("{} mismatches: {bad:?}", t.table))?;
    }
    for n in 0..=1 {
        let r = d_nplus4(n, &opts()).map_err(|e| e.to_string())?;
        ensure(r.result == d(n + 4), || format!("n={n}: {}", r.result))?;
    }
    Ok("168 = 2^6 + 8x2^3 + 14x2^1 + 12x2^0 with the reference combination table; 7581".into())
}

fn random_instance(rng: &mut ChaCha8Rng, r: usize, pool: &[Antichain]) -> SystemInstance {
    let m = r * (r - 1) / 2;
    if rng.gen_bool(0.5) {
        // built from a random solution, so the count is at least one
        let chi: Vec<&Antichain> = (0..r).map(|_| &pool[rng.gen_range(0..pool.len())]).collect();
        let alpha = chi.iter().skip(1).fold(chi[0].clone(), |acc, c| acc.meet(c).unwrap());
        let betas = (1..=r)
            .flat_map(|i| (i + 1..=r).map(move |j| (i, j)))
            .map(|(i, j)| chi[i - 1].join(chi[j - 1]).unwrap())
            .collect();
        SystemInstance::new(alpha, betas).unwrap()
    } else {
        let alpha = pool[rng.gen_range(0..pool.len())].clone();
        let betas = (0..m)
            .map(|_| {
                let b = &pool[rng.gen_range(0..pool.len())];
                alpha.join(b).unwrap()
            })
            .collect();
        SystemInstance::new(alpha, betas).unwrap()
    }
}

fn c6_pcoef() -> Outcome {
    let mut exhaustive = 0u64;
    for n in 0..=2 {
        for r in 2..=4 {
            let c = certify_exhaustive(n, r).map_err(|e| e.to_string())?;
            ensure(c.mismatches.is_empty(), || format!("n={n} r={r}: {:?}", &c.mismatches[..c.mismatches.len().min(3)]))?;
            exhaustive += c.instances;
        }
    }
    let pool: Vec<Antichain> = enumerate_antichains(3).unwrap().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sampled = Certification { n: 3, ..Certification::default() };
    for r in [2, 3] {
        for _ in 0..10_000 {
            let inst = random_instance(&mut rng, r, &pool);
            certify_instance(&inst, &mut sampled).map_err(|e| e.to_string())?;
        }
    }
    ensure(sampled.mismatches.is_empty(), || format!("n=3: {:?}", &sampled.mismatches[..sampled.mismatches.len().min(3)]))?;
    for t in [tables::table3(), tables::table4(), tables::table5(), tables::table6()] {
        let t = t.map_err(|e| e.to_string())?;
        ensure(t.ok, || format!("{} solution counts differ", t.table))?;
    }
    Ok(format!(
        "{exhaustive} exhaustive instances (n<=2, r=2..4), {} random at n=3 ({} nonzero), table coefficients reproduced",
        sampled.instances, sampled.nonzero
    ))
}

fn c7_interval() -> Outcome {
    let mut pairs = 0;
    for n in 0..=3 {
        let xs: Vec<Antichain> = enumerate_antichains(n).unwrap().collect();
        for a in &xs {
            for b in &xs {
                let fast = interval_size(a, b).unwrap();
                let slow = enumerate_interval(a, b).unwrap().count();
                ensure(fast == BigCount::from(slow), || format!("[{a}, {b}]: {fast} vs {slow}"))?;
                pairs += 1;
            }
        }
    }
    let xs: Vec<Antichain> = enumerate_antichains(4).unwrap().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let a = &xs[rng.gen_range(0..xs.len())];
        let b = &xs[rng.gen_range(0..xs.len())];
        // half the samples forced comparable so most intervals are nonempty
        let b = if rng.gen_bool(0.5) { a.join(b).unwrap() } else { b.clone() };
        let fast = interval_size(a, &b).unwrap();
        let slow = enumerate_interval(a, &b).unwrap().count();
        ensure(fast == BigCount::from(slow), || format!("[{a}, {b}]: {fast} vs {slow}"))?;
    }
    Ok(format!("{pairs} exhaustive pairs (n<=3), 10000 random at n=4"))
}

fn c8_symmetry() -> Outcome {
    for n in 0..=6 {
        let classes = enumerate_classes(n).map_err(|e| e.to_string())?;
        ensure(classes.len() == R[n], || format!("R({n}) = {}", classes.len()))?;
        if n <= 5 {
            let total: u64 = classes.iter().map(|c| c.orbit_size).sum();
            ensure(total as u128 == D[n], || format!("n={n}: orbit total {total}"))?;
            for c in classes.iter().take(50) {
                ensure(canonical_form(&c.representative).1 == c.orbit_size, || {
                    format!("orbit size of {}", c.representative)
                })?;
            }
        }
    }
    for n in 0..=4 {
        let a = d_nplus2(n, false, &opts()).map_err(|e| e.to_string())?.result;
        let b = d_nplus2(n, true, &opts()).map_err(|e| e.to_string())?.result;
        ensure(a == b, || format!("n={n}: {a} vs {b}"))?;
    }
    Ok("R(0..=6) = 2,3,5,10,30,210,16353; orbit sums D(n); reduced nplus2 agrees".into())
}

fn c9_determinism() -> Outcome {
    let result_json = |workers: usize| -> Result<String, String> {
        let r = d_nplus2(4, false, &ExecOptions::with_workers(workers)).map_err(|e| e.to_string())?;
        Ok(serde_json::to_value(&r).unwrap()["result"].to_string())
    };
    let one = result_json(1)?;
    for w in [2, 8] {
        let other = result_json(w)?;
        ensure(other == one, || format!("{w} workers: {other} vs {one}"))?;
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("nplus2.ckpt");
    let interrupted = ExecOptions {
        workers: 4,
        checkpoint: Some(path.clone()),
        stop_after_shards: Some(84),
        ..ExecOptions::default()
    };
    match d_nplus2(4, false, &interrupted) {
        Err(Error::Interrupted { completed: 84, total: 168 }) => {}
        other => return Err(format!("expected interruption at 84/168, got {other:?}")),
    }
    let resume = ExecOptions {
        stop_after_shards: None,
        ..interrupted
    };
    let r = d_nplus2(4, false, &resume).map_err(|e| e.to_string())?;
    ensure(r.resumed_shards == 84, || format!("resumed {} shards", r.resumed_shards))?;
    let resumed = serde_json::to_value(&r).unwrap()["result"].to_string();
    ensure(resumed == one, || format!("resumed {resumed} vs {one}"))?;
    Ok(format!("result {one} identical for 1, 2, 8 workers and after resume at 84/168 shards"))
}

fn c10_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // lattice axioms and the order, exhaustive at n <= 2, sampled at n = 3..4
    for n in 0..=4 {
        let xs: Vec<Antichain> = enumerate_antichains(n).unwrap().collect();
        let trials = if n <= 2 { xs.len().pow(3) } else { 3000 };
        for t in 0..trials {
            let pick = |k: usize, rng: &mut ChaCha8Rng| {
                if n <= 2 {
                    &xs[t / xs.len().pow(k as u32) % xs.len()]
                } else {
                    &xs[rng.gen_range(0..xs.len())]
                }
            };
            let (a, b, c) = (pick(0, &mut rng), pick(1, &mut rng), pick(2, &mut rng));
            let j = |x: &Antichain, y: &Antichain| x.join(y).unwrap();
            let m = |x: &Antichain, y: &Antichain| x.meet(y).unwrap();
            ensure(j(a, b) == j(b, a) && m(a, b) == m(b, a), || format!("commutativity {a} {b}"))?;
            ensure(j(&j(a, b), c) == j(a, &j(b, c)), || format!("join associativity {a} {b} {c}"))?;
            ensure(m(&m(a, b), c) == m(a, &m(b, c)), || format!("meet associativity {a} {b} {c}"))?;
            ensure(j(a, a) == *a && m(a, a) == *a, || format!("idempotence {a}"))?;
            ensure(j(a, &m(a, b)) == *a && m(a, &j(a, b)) == *a, || format!("absorption {a} {b}"))?;
            let le = a.le(b).unwrap();
            ensure(le == (j(a, b) == *b) && le == (m(a, b) == *a), || format!("order {a} {b}"))?;
        }
    }
    // dual: involution and order reversal, exhaustive at n <= 3
    for n in 0..=3 {
        let xs: Vec<Antichain> = enumerate_antichains(n).unwrap().collect();
        for a in &xs {
            ensure(a.dual().dual() == *a, || format!("dual involution {a}"))?;
            for b in &xs {
                ensure(a.le(b).unwrap() == b.dual().le(&a.dual()).unwrap(), || format!("dual order {a} {b}"))?;
            }
        }
    }
    // two-variable solutions: only sets of α and β occur, each set of β − α
    // lies in exactly one variable; exhaustive at n <= 3
    for n in 0..=3 {
        let xs: Vec<Antichain> = enumerate_antichains(n).unwrap().collect();
        for a in &xs {
            for b in xs.iter().filter(|b| a.le(b).unwrap()) {
                let inst = SystemInstance::new(a.clone(), vec![b.clone()]).unwrap();
                let sols = solve_system(&inst, CandidateSpace::Unrestricted).map_err(|e| e.to_string())?;
                ensure(BigCount::from(sols.len()) == p_general(&inst), || format!("count {a} {b}"))?;
                for s in &sols {
                    for set in s.chi.iter().flat_map(|c| c.sets()) {
                        ensure(a.contains(*set) || b.contains(*set), || format!("{set} outside {a} ∪ {b}"))?;
                    }
                    for set in b.sets().iter().filter(|x| !a.contains(**x)) {
                        ensure(s.chi[0].contains(*set) != s.chi[1].contains(*set), || {
                            format!("{set} not in exactly one of {} / {}", s.chi[0], s.chi[1])
                        })?;
                    }
                }
            }
        }
    }
    // decomposition round trip on D(5) with k = 1..3
    for k in 1..=3 {
        for eta in enumerate_antichains(5).unwrap() {
            let parts = decompose(&eta, k).unwrap();
            ensure(compose_decomposition(&parts, k).unwrap() == eta, || format!("round trip {eta} k={k}"))?;
        }
    }
    Ok("lattice axioms, dual, solution structure, decomposition round trip".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("small D(n) by brute force", c1_bruteforce),
        ("D(n+2) from pairs", c2_nplus2),
        ("all-pairs cross-check", c3_wiedemann),
        ("D(n+3) and its tables", c4_nplus3),
        ("D(n+4) and its tables", c5_nplus4),
        ("solution counts vs solver", c6_pcoef),
        ("interval sizes vs enumeration", c7_interval),
        ("classes and symmetry reduction", c8_symmetry),
        ("determinism and resume", c9_determinism),
        ("property suites", c10_properties),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                Err(format!("panicked: {msg}"))
            });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
