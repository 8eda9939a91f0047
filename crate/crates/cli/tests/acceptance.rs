//! Acceptance suite: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use coxeter_proper::asymptotics::{
    estimate_proportion, exhaustive_proportion, insertion_chain_distribution, model_order, EXHAUSTIVE_CAP,
};
use coxeter_proper::construction::{enumerate_pn, lower_bound_count, verify_all_proper, ConstructionParams};
use coxeter_proper::enumerate::{count_proper, cross_check_model, generate_layers, CollectSink, EnumerateOptions};
use coxeter_proper::perm::Family;
use coxeter_proper::proper::{
    is_i_spherical, is_proper_element, proper_count_dihedral, proper_count_dihedral_bruteforce, DEFAULT_NODE_CAP,
};
use coxeter_proper::{CoxeterMatrix, Engine, MaxW0Table, TypeLabel};

/// Seed for the decay witness; fixed before any run and never tuned.
const DECAY_SEED: u64 = 20_240_101;
const DECAY_SAMPLES: u64 = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
    /// Everything the criterion computed, for the determinism comparison.
    output: String,
}

fn outcome(pass: bool, detail: impl Into<String>, output: impl std::fmt::Debug) -> Outcome {
    Outcome { pass, detail: detail.into(), output: format!("{output:?}") }
}

fn c1_exceptional_counts(threads: usize) -> Outcome {
    let mut counts = BTreeMap::new();
    let mut times = BTreeMap::new();
    for label in [TypeLabel::H3, TypeLabel::F4, TypeLabel::H4, TypeLabel::E6, TypeLabel::E7] {
        let start = Instant::now();
        let s = count_proper(label, threads).unwrap();
        times.insert(label.to_string(), start.elapsed());
        counts.insert(label.to_string(), (s.total_proper(), s.layers.iter().map(|l| l.proper).collect::<Vec<_>>()));
    }
    let expected = [("H3", 48), ("F4", 297), ("H4", 594), ("E6", 10690), ("E7", 159368)];
    let exact = expected.iter().all(|(g, v)| counts[*g].0 == *v);
    let small: Duration = ["H3", "F4", "H4"].iter().map(|g| times[*g]).sum();
    let fast = small < Duration::from_secs(10) && times["E6"] < Duration::from_secs(120) && times["E7"] < Duration::from_secs(1800);
    let cli = Command::new(env!("CARGO_BIN_EXE_coxprop"))
        .args(["--threads", &threads.to_string(), "count-proper", "--group", "H3"])
        .output()
        .unwrap();
    let cli_ok = cli.status.success() && String::from_utf8_lossy(&cli.stdout).lines().last() == Some("proper 48");
    let detail = format!(
        "H3={} F4={} H4={} E6={} E7={}; H3+F4+H4 {:.2}s, E6 {:.2}s, E7 {:.1}s",
        counts["H3"].0,
        counts["F4"].0,
        counts["H4"].0,
        counts["E6"].0,
        counts["E7"].0,
        small.as_secs_f64(),
        times["E6"].as_secs_f64(),
        times["E7"].as_secs_f64()
    );
    outcome(exact && fast && cli_ok, detail, counts)
}

fn c2_e8_preflight(threads: usize) -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let dry = Command::new(env!("CARGO_BIN_EXE_coxprop"))
        .args(["--threads", &threads.to_string(), "enumerate", "--group", "E8", "--allow-huge", "--dry-run", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&dry.stdout).into_owned();
    let stable: Vec<&str> = text.lines().filter(|l| !l.contains("free") && !l.contains("fits")).collect();
    let gated = Command::new(env!("CARGO_BIN_EXE_coxprop"))
        .args(["enumerate", "--group", "E8", "--count-only"])
        .output()
        .unwrap();
    let pass = dry.status.success()
        && text.contains("elements        696729600")
        && text.contains("T               120")
        && gated.status.code() == Some(5)
        && std::fs::read_dir(dir.path()).unwrap().next().is_none();
    let detail = format!("dry run exit {:?}; run without --allow-huge exit {:?}", dry.status.code(), gated.status.code());
    outcome(pass, detail, stable)
}

fn c3_maxw0() -> Outcome {
    let mut labels: Vec<TypeLabel> = (1..=8).map(TypeLabel::A).collect();
    labels.extend((2..=8).map(TypeLabel::B));
    labels.extend((4..=8).map(TypeLabel::D));
    labels.extend([TypeLabel::E6, TypeLabel::E7, TypeLabel::E8, TypeLabel::F4, TypeLabel::H3, TypeLabel::H4]);
    let mut bad = Vec::new();
    let mut tables = Vec::new();
    for label in &labels {
        let closed = MaxW0Table::closed(*label).unwrap();
        let brute = MaxW0Table::bruteforce(&CoxeterMatrix::standard(*label).unwrap()).unwrap();
        if closed.entries() != brute.entries() {
            bad.push(label.to_string());
        }
        tables.push(closed.entries().to_vec());
    }
    outcome(bad.is_empty(), format!("{} types compared, mismatches {bad:?}", labels.len()), tables)
}

fn c4_engine_model(threads: usize) -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut out = Vec::new();
    for (label, order) in [(TypeLabel::A(4), 120), (TypeLabel::B(3), 48), (TypeLabel::B(4), 384), (TypeLabel::D(4), 192)] {
        let c = cross_check_model(label, threads).unwrap();
        pass &= c.passed() && c.elements() == order;
        details.push(format!("{label}:{}", c.elements()));
        out.push(c.engine);
    }
    outcome(pass, details.join(" "), out)
}

fn c5_invariants(threads: usize) -> Outcome {
    let mut labels: Vec<TypeLabel> = (1..=6).map(TypeLabel::A).collect();
    labels.extend((2..=6).map(TypeLabel::B));
    labels.extend((4..=6).map(TypeLabel::D));
    labels.extend([TypeLabel::F4, TypeLabel::H3, TypeLabel::H4, TypeLabel::E6]);
    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    for label in &labels {
        let s = count_proper(*label, threads).unwrap();
        let l = s.layer_sizes();
        let ok = label.group_order() == s.total_elements().into() && l.iter().eq(l.iter().rev());
        if !ok {
            bad.push(label.to_string());
        }
        sizes.push(l);
    }
    outcome(bad.is_empty(), format!("{} groups up to E6, failures {bad:?}", labels.len()), sizes)
}

fn c6_dihedral() -> Outcome {
    let mut pass = true;
    let mut values = Vec::new();
    for m in 3..=50u32 {
        let c = proper_count_dihedral(m).unwrap();
        pass &= c == proper_count_dihedral_bruteforce(m).unwrap();
        pass &= c == if m == 3 { 6 } else { 8 };
        values.push(c);
    }
    outcome(pass, format!("m=3: {}, m=4..50: {:?}", values[0], values[1..].iter().collect::<std::collections::BTreeSet<_>>()), values)
}

fn c7_construction(threads: usize) -> Outcome {
    let p8 = ConstructionParams::new(8, 4, 2).unwrap();
    let words = |p: ConstructionParams| -> Vec<String> {
        enumerate_pn(p).map(|w| w.images().iter().map(|v| v.to_string()).collect()).collect()
    };
    let all8 = words(p8);
    let report = verify_all_proper(p8, 1_000_000, threads).unwrap();
    let p9 = ConstructionParams::new(9, 4, 2).unwrap();
    let members = all8.contains(&"21436587".to_string()) && words(p9).contains(&"243165879".to_string());
    let bound = lower_bound_count(p8);
    let pass = all8.len() == 36 && report.proper == 36 && report.total == 36 && bound == 36u32.into() && members;
    let detail = format!("|P_8|={}, proper {}/{}, bound {bound}, examples present: {members}", all8.len(), report.proper, report.total);
    outcome(pass, detail, (all8, report.proper))
}

fn c8_spherical(threads: usize) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let mut out = Vec::new();
    for label in [TypeLabel::A(3), TypeLabel::B(3), TypeLabel::H3] {
        let engine = Engine::standard(label).unwrap();
        let table = MaxW0Table::closed(label).unwrap();
        let mut sink = CollectSink::default();
        generate_layers(&engine, &table, &mut sink, &EnumerateOptions { threads, ..Default::default() }).unwrap();
        let (mut spherical, mut violations, mut total) = (0, 0, 0);
        for word in sink.layers.iter().flatten() {
            let word: Vec<usize> = word.iter().map(|&l| l as usize).collect();
            let g = engine.from_word(&word).unwrap();
            let j = engine.left_descents(&g).unwrap();
            total += 1;
            if is_i_spherical(&engine, &word, &j, DEFAULT_NODE_CAP).unwrap() {
                spherical += 1;
                if !is_proper_element(&engine, &table, &g).unwrap() {
                    violations += 1;
                }
            }
        }
        pass &= violations == 0;
        details.push(format!("{label}: {spherical}/{total} spherical, {violations} violations"));
        out.push((spherical, total));
    }
    outcome(pass, details.join("; "), out)
}

fn c9_decay(threads: usize) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let mut out = Vec::new();
    for family in [Family::A, Family::B, Family::D] {
        let hits: Vec<u64> = [16, 32, 64, 128]
            .iter()
            .map(|&n| estimate_proportion(family, n, DECAY_SAMPLES, DECAY_SEED, threads).unwrap().hits)
            .collect();
        pass &= hits.windows(2).all(|w| w[0] > w[1]);
        details.push(format!("{family} {hits:?}"));
        out.push(hits);
    }
    let mut oracle_ok = true;
    for n in 1..=8 {
        let exact = exhaustive_proportion(Family::A, n, EXHAUSTIVE_CAP).unwrap();
        let mc = estimate_proportion(Family::A, n, DECAY_SAMPLES, DECAY_SEED, threads).unwrap();
        let (lo, hi) = mc.widened(3.0);
        oracle_ok &= lo <= exact.value() && exact.value() <= hi;
        out.push(vec![exact.proper, exact.order, mc.hits]);
    }
    pass &= oracle_ok;
    let detail = format!(
        "seed {DECAY_SEED}, {DECAY_SAMPLES} samples, hits at n=16/32/64/128: {}; exhaustive A n<=8 within 3x Wilson: {oracle_ok}",
        details.join(", ")
    );
    outcome(pass, detail, out)
}

fn c10_insertion() -> Outcome {
    let mut pass = true;
    let mut out = Vec::new();
    for family in [Family::A, Family::B] {
        for n in 1..=4 {
            let d = insertion_chain_distribution(family, n).unwrap();
            let order = model_order(family, n).unwrap();
            pass &= d.len() as u64 == order && d.values().all(|p| *p.numer() == 1 && *p.denom() == order);
            out.push((family, n, d.len()));
        }
    }
    outcome(pass, "types A and B, n = 1..4, every outcome has probability exactly 1/|W|", out)
}

fn evaluate(threads: usize) -> Vec<(u32, &'static str, Outcome)> {
    vec![
        (1, "exceptional proper counts", c1_exceptional_counts(threads)),
        (2, "E8 gated behind --allow-huge with dry-run preflight", c2_e8_preflight(threads)),
        (3, "maxw0 closed form equals brute force", c3_maxw0()),
        (4, "engine/model (length, descents) multisets", c4_engine_model(threads)),
        (5, "layer sums and symmetry up to E6", c5_invariants(threads)),
        (6, "dihedral proper counts", c6_dihedral()),
        (7, "construction P_8 (q=4, s=2)", c7_construction(threads)),
        (8, "spherical implies proper on A3, B3, H3", c8_spherical(threads)),
        (9, "decay witness and exhaustive oracle", c9_decay(threads)),
        (10, "insertion chains exactly uniform", c10_insertion()),
    ]
}

fn main() {
    let base = evaluate(1);
    let mut all_pass = true;
    for (id, name, o) in &base {
        all_pass &= o.pass;
        println!("criterion {id:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    let mut mismatched = Vec::new();
    for threads in [2, 8] {
        for ((id, _, a), (_, _, b)) in base.iter().zip(evaluate(threads)) {
            if a.output != b.output {
                mismatched.push(format!("criterion {id} at {threads} threads"));
            }
        }
    }
    let determinism = mismatched.is_empty();
    all_pass &= determinism;
    println!(
        "criterion 11 {}: outputs identical at 1, 2 and 8 threads: {}",
        if determinism { "PASS" } else { "FAIL" },
        if determinism { "all criteria match".to_string() } else { mismatched.join(", ") }
    );
    if !all_pass {
        std::process::exit(1);
    }
}
