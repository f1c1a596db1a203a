//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fatpoint::chow::{
    chi_identity_case1, chi_identity_case3, euler_characteristic, euler_characteristic_parts,
    triple_product, AmbientSpace, DivisorClass,
};
use fatpoint::combinatorics::{binom, line_defects};
use fatpoint::dimension::DriverStep;
use fatpoint::harness::{non_increasing, verify, SweepConfig};
use fatpoint::oracle::DEFAULT_PRIMES;
use fatpoint::reduction::{cremona_k, cremona_quadruple, reduce_to_standard};
use fatpoint::{
    classify, dimension, oracle_dimension, Classification, FatPointSystem, OracleConfig,
};

type Verdict = (bool, String);
type Criterion = (&'static str, fn() -> Verdict);

fn grid() -> Vec<FatPointSystem> {
    SweepConfig::exhaustive(5, 10, 3).instances()
}

/// Classified system at which the driver stopped, if it was case three.
fn terminal_case_three(sys: &FatPointSystem) -> Option<(FatPointSystem, Classification)> {
    let report = dimension(sys).unwrap();
    report.trace.iter().rev().find_map(|step| match step {
        DriverStep::Classify {
            system,
            classification: cls @ Classification::CaseThree { .. },
        } => Some((system.clone(), cls.clone())),
        _ => None,
    })
}

fn master_sweep() -> Verdict {
    let oracle = OracleConfig::single_prime(DEFAULT_PRIMES[0], 1, 3);
    let instances = grid();
    let mut bad = Vec::new();
    for sys in &instances {
        let rec = verify(sys, &oracle);
        if !rec.matches {
            bad.push(format!(
                "{sys}: formula {:?} oracle {:?} {:?}",
                rec.formula_dim, rec.oracle_dim, rec.error
            ));
        }
    }
    let detail = format!(
        "{}/{} instances agree",
        instances.len() - bad.len(),
        instances.len()
    );
    report_list(bad, detail)
}

fn report_list(bad: Vec<String>, detail: String) -> Verdict {
    if bad.is_empty() {
        (true, detail)
    } else {
        let shown: Vec<_> = bad.iter().take(5).cloned().collect();
        (
            false,
            format!("{detail}; first failures: {}", shown.join(" | ")),
        )
    }
}

fn quadric_cone_family() -> Verdict {
    let oracle = OracleConfig::default();
    let mut bad = Vec::new();
    let mut count = 0;
    for m in 1..=3 {
        for r in 8..=12 {
            count += 1;
            let sys = FatPointSystem::new(2 * m, vec![m; r]);
            let rec = verify(&sys, &oracle);
            if rec.formula_dim != Some(m) || rec.oracle_dim != Some(m) {
                bad.push(format!(
                    "{sys}: {:?} / {:?}",
                    rec.formula_dim, rec.oracle_dim
                ));
            }
        }
    }
    let special = dimension(&FatPointSystem::new(4, vec![2; 10])).unwrap();
    if (special.dim, special.edim, special.speciality) != (2, -1, 3) {
        bad.push(format!(
            "(4; 2x10): dim {} edim {} speciality {}",
            special.dim, special.edim, special.speciality
        ));
    }
    report_list(
        bad,
        format!("{count} systems equal m, (4; 2x10) speciality 3"),
    )
}

fn anchors() -> Verdict {
    let oracle = OracleConfig::default();
    let mut bad = Vec::new();
    for (d, m, want) in [
        (3, "1x13", 7),
        (5, "5,1x19", 5),
        (3, "2,2,2,2,1", 2),
        (5, "4,4,4,4", -1),
    ] {
        let sys = FatPointSystem::parse(d, m).unwrap();
        let formula = dimension(&sys).unwrap().dim;
        let oracle_dim = oracle_dimension(&sys, &oracle).unwrap().dim;
        if formula != want || oracle_dim != want {
            bad.push(format!(
                "{sys}: formula {formula} oracle {oracle_dim} want {want}"
            ));
        }
    }
    report_list(bad, "4 anchors exact".into())
}

fn riemann_roch_on_points() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    for _ in 0..500 {
        let d = rng.gen_range(0..=20);
        let r = rng.gen_range(0..=15);
        let m: Vec<i64> = (0..r).map(|_| rng.gen_range(0..=10)).collect();
        let sys = FatPointSystem::new(d, m.clone());
        let chi = euler_characteristic(&DivisorClass::from_system(&sys), &AmbientSpace::points(r));
        let want = binom(d + 3, 3) - m.iter().map(|&x| binom(x + 2, 3)).sum::<i64>();
        if chi != Ok(want) {
            bad.push(format!("{sys}: {chi:?} vs {want}"));
        }
    }
    report_list(bad, "500 random divisors on X".into())
}

fn line_identity() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut with_lines = 0;
    while checked < 500 {
        let d = rng.gen_range(1..=15);
        let r = rng.gen_range(1..=12);
        let m: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=d)).collect();
        let reduced = reduce_to_standard(&FatPointSystem::new(d, m).normalize()).unwrap();
        if reduced.empty || reduced.system.r() == 0 {
            continue;
        }
        let sys = reduced.system;
        let Ok(Classification::CaseOne { defects }) = classify(&sys) else {
            continue;
        };
        checked += 1;
        with_lines += usize::from(!defects.is_zero());
        match chi_identity_case1(&sys, &defects) {
            Ok((lhs, rhs)) if lhs == rhs => {}
            other => bad.push(format!("{sys}: {other:?}")),
        }
    }
    let worked = FatPointSystem::new(2, vec![2, 2]);
    let defects = line_defects(&worked);
    if defects.get(2) != 2 || chi_identity_case1(&worked, &defects) != Ok((3, 3)) {
        bad.push(format!(
            "(2; 2,2): {:?}",
            chi_identity_case1(&worked, &defects)
        ));
    }
    report_list(
        bad,
        format!("{checked} case-one systems ({with_lines} with lines), (2; 2,2) gives 3"),
    )
}

fn curve_chain() -> Verdict {
    let mut by_t: BTreeMap<i64, (usize, usize)> = BTreeMap::new();
    let mut bad = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for sys in grid() {
        let Some((terminal, cls)) = terminal_case_three(&sys) else {
            continue;
        };
        if !seen.insert(terminal.clone()) {
            continue;
        }
        let Classification::CaseThree { t, .. } = cls else {
            unreachable!()
        };
        let chi = chi_identity_case3(&terminal, &cls).unwrap();
        let dim = dimension(&terminal).unwrap().dim;
        let entry = by_t.entry(t).or_default();
        entry.0 += 1;
        let mut problems = Vec::new();
        if chi.chi_y != chi.rhs {
            problems.push(format!("chi_Y {} != rhs {}", chi.chi_y, chi.rhs));
        }
        if dim + 1 != chi.chi_tilde {
            problems.push(format!(
                "dim + 1 = {} != chi_tilde {}",
                dim + 1,
                chi.chi_tilde
            ));
        }
        if !problems.is_empty() {
            entry.1 += 1;
            bad.push(format!("{terminal} (t = {t}): {}", problems.join(", ")));
        }
    }
    let tally: Vec<_> = by_t
        .iter()
        .map(|(t, (n, f))| format!("t={t}: {}/{n} hold", n - f))
        .collect();
    report_list(
        bad,
        format!("distinct case-three systems, {}", tally.join(", ")),
    )
}

fn random_sorted(rng: &mut ChaCha8Rng) -> FatPointSystem {
    let d = rng.gen_range(0..40);
    let r = rng.gen_range(0..12);
    let mut m: Vec<i64> = (0..r).map(|_| rng.gen_range(0..25)).collect();
    m.sort_unstable_by(|a, b| b.cmp(a));
    FatPointSystem::new(d, m)
}

fn random_divisor(rng: &mut ChaCha8Rng, amb: &AmbientSpace) -> DivisorClass {
    DivisorClass::new(
        rng.gen_range(-6..=6),
        (0..amb.r()).map(|_| rng.gen_range(-6..=6)).collect(),
        amb.lines()
            .iter()
            .map(|&i| (i, rng.gen_range(-6..=6)))
            .collect(),
        if amb.curve_blown() {
            rng.gen_range(-6..=6)
        } else {
            0
        },
    )
}

fn properties() -> Verdict {
    let mut bad = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let mut involutions = 0;
    while involutions < 1000 {
        let s = random_sorted(&mut rng);
        let k = cremona_k(&s);
        if (1..=4).any(|i| s.m(i) + k < 0) {
            continue;
        }
        involutions += 1;
        let mut twice = cremona_quadruple(&cremona_quadruple(&s));
        twice.multiplicities.truncate(s.r().max(4));
        let mut padded = s.clone();
        padded.multiplicities.resize(s.r().max(4), 0);
        if twice != padded {
            bad.push(format!("involution fails on {s}"));
        }
    }

    let mut dims = BTreeMap::new();
    for sys in SweepConfig::exhaustive(6, 10, 4).instances() {
        dims.insert(sys.clone(), dimension(&sys).unwrap().dim);
    }
    let mut monotone_checks = 0;
    for (sys, &dim) in &dims {
        let mut up_degree = sys.clone();
        up_degree.degree += 1;
        if let Some(&above) = dims.get(&up_degree) {
            monotone_checks += 1;
            if above < dim {
                bad.push(format!("degree monotonicity: {sys} -> {up_degree}"));
            }
        }
        for i in 0..sys.r() {
            let mut heavier = sys.clone();
            heavier.multiplicities[i] += 1;
            let heavier = heavier.normalize();
            if let Some(&below) = dims.get(&heavier) {
                monotone_checks += 1;
                if below > dim {
                    bad.push(format!("multiplicity monotonicity: {sys} -> {heavier}"));
                }
            }
        }
        let mut extra = sys.multiplicities.clone();
        extra.push(1);
        if let Some(&below) = dims.get(&FatPointSystem::new(sys.degree, extra).normalize()) {
            monotone_checks += 1;
            if below > dim {
                bad.push(format!("adding a point raised the dimension of {sys}"));
            }
        }
    }

    let mut case_three = 0;
    for sys in grid() {
        let Some((terminal, cls)) = terminal_case_three(&sys) else {
            continue;
        };
        let Classification::CaseThree { t, n, b, .. } = cls else {
            unreachable!()
        };
        case_three += 1;
        let r = terminal.r() as i64;
        if !(0..=r - 9).contains(&n)
            || !(1..=terminal.m(terminal.r())).contains(&t)
            || b != terminal.r()
        {
            bad.push(format!("{terminal}: t {t} n {n} b {b}"));
        }
    }

    let ambients = [
        AmbientSpace::points(5),
        AmbientSpace::new(6, [1, 2, 4], false).unwrap(),
        AmbientSpace::new(4, [], true).unwrap(),
        AmbientSpace::new(10, [2, 3], true).unwrap(),
        AmbientSpace::new(12, [1, 5, 12], true).unwrap(),
    ];
    let mut brackets = 0;
    for amb in &ambients {
        for _ in 0..500 {
            let [a, b, c, e] = [(); 4].map(|_| random_divisor(&mut rng, amb));
            let abc = triple_product(&a, &b, &c, amb).unwrap();
            for perm in [
                triple_product(&a, &c, &b, amb),
                triple_product(&b, &a, &c, amb),
                triple_product(&c, &b, &a, amb),
            ] {
                if perm.unwrap() != abc {
                    bad.push("triple product not symmetric".into());
                }
            }
            let (x, y) = (rng.gen_range(-4..=4), rng.gen_range(-4..=4));
            let lhs = triple_product(&a.scale(x).add(&e.scale(y)), &b, &c, amb).unwrap();
            let rhs = x * abc + y * triple_product(&e, &b, &c, amb).unwrap();
            if lhs != rhs {
                bad.push("triple product not linear".into());
            }
            brackets += 1;
            if let Err(err) = euler_characteristic_parts(&a, amb) {
                bad.push(format!("{err} on {a:?}"));
            }
        }
    }

    report_list(
        bad,
        format!(
            "{involutions} involutions, {monotone_checks} monotonicity pairs, \
             {case_three} case-three bounds, {} triples, {brackets} brackets",
            ambients.len() * 500
        ),
    )
}

fn oracle_consistency() -> Verdict {
    let oracle = OracleConfig::new(DEFAULT_PRIMES.to_vec(), vec![1, 2, 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = Vec::new();
    for _ in 0..100 {
        let d = rng.gen_range(0..=5);
        let r = rng.gen_range(0..=10);
        let seqs = non_increasing(r, 1, 3);
        let sys = FatPointSystem::new(d, seqs[rng.gen_range(0..seqs.len())].clone());
        let report = oracle_dimension(&sys, &oracle).unwrap();
        if !report.stable || report.trials.len() != 6 {
            bad.push(format!("{sys}: {:?}", report.trials));
        }
    }
    report_list(bad, "100 instances, 2 primes x 3 seeds".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("master agreement sweep", master_sweep),
        ("(2m; m^r) family", quadric_cone_family),
        ("anchor systems", anchors),
        ("Riemann-Roch on X", riemann_roch_on_points),
        ("line blow-up chi identity", line_identity),
        ("curve blow-up chi chain", curve_chain),
        ("property suites", properties),
        ("oracle self-consistency", oracle_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let (ok, detail) = run();
        failed += usize::from(!ok);
        println!(
            "criterion {}: {} {name}: {detail} [{:.1}s]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
