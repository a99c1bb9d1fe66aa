//! Acceptance suite: one test per criterion, each printing a pass line
//! with the measured evidence. Everything is checked with exact rational
//! arithmetic; where a tolerance appears it is a wall-clock budget.

mod common;

use packideal_core::enumerate::{
    check_ideal, enumerate_extreme_points, witness_json, EnumerateOptions, IdealVerdict,
};
use packideal_core::export::{export, ExportFormat};
use packideal_core::formulations::{build, BuildOptions, FormulationKind, PairScope};
use packideal_core::gen::{generate, GenSpec};
use packideal_core::greedy::{greedy_pack, validate_layout};
use packideal_core::iom::build_iom;
use packideal_core::lemmas::{verify_lemma, ItemStatus, LemmaId};
use packideal_core::mblp::compose_relaxation;
use packideal_core::rpp::{oversized_margin_pair, classify, pair_2x2_10x10, RppInstance, RppObject};
use packideal_core::selectors::{hypercube_codes, selector_eval, SelectorKind};
use packideal_core::spp::{build_spp, SppOptions};
use packideal_core::{rat, rint, RatMatrix};
use std::time::Instant;

fn opts() -> EnumerateOptions {
    EnumerateOptions::default()
}

fn point_vec(p: &packideal_core::Point) -> Vec<packideal_core::Rat> {
    p.coords()
}

#[test]
fn criterion_01_sbl_counterexample() {
    let t = Instant::now();
    let m = build(
        FormulationKind::Sbl,
        &pair_2x2_10x10(),
        PairScope::All,
        &BuildOptions::default(),
    )
    .unwrap();
    let verdict = check_ideal(&m, &opts()).unwrap();
    let IdealVerdict::NotIdeal(w) = verdict else {
        panic!("two-binary linear formulation must not be ideal here");
    };
    let want: Vec<packideal_core::Rat> = vec![
        rint(9),
        rint(1),
        rint(9),
        rint(1),
        rat(1, 2),
        rat(1, 2),
    ];
    assert_eq!(point_vec(&w.point), want, "witness point is pinned exactly");
    assert_eq!(w.phi_value, rint(2));
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "criterion 1: PASS - SB-L witness (9, 1, 9, 1, 1/2, 1/2) reproduced exactly in {elapsed:?}"
    );
}

#[test]
fn criterion_02_nu_counterexample() {
    let t = Instant::now();
    let m = build(
        FormulationKind::Nu,
        &pair_2x2_10x10(),
        PairScope::All,
        &BuildOptions::default(),
    )
    .unwrap();
    let verdict = check_ideal(&m, &opts()).unwrap();
    let IdealVerdict::NotIdeal(w) = verdict else {
        panic!("naive formulation must not be ideal here");
    };
    assert!(w.point.y.contains(&rat(4, 5)), "y-part carries 4/5");
    assert!(w.point.y.contains(&rat(1, 5)), "y-part carries 1/5");
    // golden point frozen from an independent exact oracle run
    let want: Vec<packideal_core::Rat> = vec![
        rint(9),
        rint(9),
        rint(9),
        rint(1),
        rat(4, 5),
        rat(1, 5),
        rint(0),
        rint(0),
    ];
    assert_eq!(point_vec(&w.point), want);
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 2: PASS - NU witness carries 4/5 and 1/5 exactly in {elapsed:?}");
}

#[test]
fn criterion_03_su_beyond_hypothesis() {
    let t = Instant::now();
    let m = build(
        FormulationKind::Su,
        &oversized_margin_pair(),
        PairScope::All,
        &BuildOptions::default(),
    )
    .unwrap();
    let verdict = check_ideal(&m, &opts()).unwrap();
    let IdealVerdict::NotIdeal(w) = verdict else {
        panic!("standard unary must fail beyond the margin hypothesis");
    };
    // golden value frozen from an independent exact oracle run
    let want: Vec<packideal_core::Rat> = vec![
        rint(9),
        rint(1),
        rint(9),
        rint(3),
        rint(0),
        rat(1, 2),
        rint(0),
        rat(1, 2),
    ];
    assert_eq!(point_vec(&w.point), want);
    assert_eq!(w.phi_value, rint(2));
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("criterion 3: PASS - derived SU witness (9,1,9,3,0,1/2,0,1/2) reproduced in {elapsed:?}");
}

/// The desk-scale grid: sixteen seeded strip pairs plus four handcrafted
/// boundary instances with exact `P = UB - LB` realizations.
fn criterion_4_grid() -> Vec<RppInstance> {
    let mut grid: Vec<RppInstance> = Vec::new();
    // all four realizations at the boundary
    grid.push(RppInstance::new(
        (rint(4), rint(4)),
        vec![
            RppObject::plain(rint(2), rint(2)),
            RppObject::plain(rint(2), rint(2)),
        ],
    ));
    // x realizations at the boundary through a clearance
    let mut a = RppObject::plain(rint(2), rint(2));
    a.sigma.xm = rint(1);
    grid.push(RppInstance::new(
        (rint(5), rint(8)),
        vec![a, RppObject::plain(rint(2), rint(2))],
    ));
    // boundary along x only, distinct dimensions
    grid.push(RppInstance::new(
        (rint(4), rint(9)),
        vec![
            RppObject::plain(rint(2), rint(4)),
            RppObject::plain(rint(2), rint(4)),
        ],
    ));
    // boundary along y through an upper clearance
    let mut b = RppObject::plain(rint(2), rint(2));
    b.sigma.yp = rint(1);
    grid.push(RppInstance::new(
        (rint(9), rint(5)),
        vec![b, RppObject::plain(rint(2), rint(2))],
    ));
    for seed in 0..16 {
        let spec = GenSpec::new(2, 4200 + seed);
        grid.extend(generate(&spec, 1));
    }
    grid
}

#[test]
fn criterion_04_theorem_confirmation_grid() {
    let t = Instant::now();
    let grid = criterion_4_grid();
    assert!(grid.len() >= 20);
    let boundary = grid
        .iter()
        .filter(|inst| classify(inst).boundary_count() > 0)
        .count();
    assert!(boundary >= 4, "only {boundary} boundary instances");
    for inst in &grid {
        let class = classify(inst);
        assert!(!class.trivial);
        assert!(class.all_within_margin(), "grid instance out of hypothesis");
        assert!(class.all_strict(), "strict refined conditions must hold");
        for kind in [
            FormulationKind::Su,
            FormulationKind::Sbm,
            FormulationKind::Hu,
            FormulationKind::Ru,
        ] {
            let m = build(kind, inst, PairScope::All, &BuildOptions::default()).unwrap();
            let verdict = check_ideal(&m, &opts()).unwrap();
            assert_eq!(
                verdict,
                IdealVerdict::Ideal,
                "{kind} not ideal on {}",
                inst.to_json()
            );
        }
    }
    let elapsed = t.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "took {elapsed:?}");
    println!(
        "criterion 4: PASS - SU/SB-M/HU/RU ideal on {} instances ({} boundary) in {elapsed:?}",
        grid.len(),
        boundary
    );
}

#[test]
fn criterion_05_lemma_verification() {
    // every hypothesis is met on the all-boundary square; the plain pair
    // exercises the unconditional items
    let boundary = RppInstance::new(
        (rint(4), rint(4)),
        vec![
            RppObject::plain(rint(2), rint(2)),
            RppObject::plain(rint(2), rint(2)),
        ],
    );
    let mut checked = 0;
    for id in [LemmaId::L2, LemmaId::L3, LemmaId::L4] {
        let report = verify_lemma(id, &boundary).unwrap();
        for item in &report.items {
            assert_eq!(item.status, ItemStatus::Pass, "{} failed", item.id);
            checked += 1;
        }
        let plain = verify_lemma(id, &pair_2x2_10x10()).unwrap();
        assert!(plain.all_passed());
    }
    let l2 = verify_lemma(LemmaId::L2, &boundary).unwrap();
    let d = l2.items.iter().find(|i| i.id == "L2.3.D").unwrap();
    assert!(d.checks.iter().all(|c| c.rank == 3 && c.count == 6));
    let l4 = verify_lemma(LemmaId::L4, &boundary).unwrap();
    let a = l4.items.iter().find(|i| i.id == "L4.3.A").unwrap();
    assert!(a.checks.iter().all(|c| c.rank == 3 && c.count == 6));
    println!("criterion 5: PASS - {checked} lemma items verified, exact rank claims included");
}

#[test]
fn criterion_06_selector_properties() {
    for r in 1..=3 {
        let codes = hypercube_codes(r);
        for kind in [SelectorKind::UniformHamming, SelectorKind::Multilinear] {
            for a in &codes {
                for b in &codes {
                    let pt: Vec<packideal_core::Rat> =
                        b.iter().map(|&v| rint(v as i64)).collect();
                    let want = if a == b { rint(1) } else { rint(0) };
                    assert_eq!(selector_eval(kind, a, &pt, None), want);
                }
            }
            for b in &codes {
                let pt: Vec<packideal_core::Rat> = b.iter().map(|&v| rint(v as i64)).collect();
                let total = codes
                    .iter()
                    .map(|a| selector_eval(kind, a, &pt, None))
                    .fold(rint(0), |acc, v| acc + v);
                assert_eq!(total, rint(1), "partition of unity on vertices");
            }
        }
        // the multilinear selector also partitions the midpoint
        let mid: Vec<packideal_core::Rat> = (0..r).map(|_| rat(1, 2)).collect();
        let total = codes
            .iter()
            .map(|a| selector_eval(SelectorKind::Multilinear, a, &mid, None))
            .fold(rint(0), |acc, v| acc + v);
        assert_eq!(total, rint(1));
    }
    // the linear Hamming selector fails partition at the r = 2 midpoint
    let mid = vec![rat(1, 2), rat(1, 2)];
    let total = hypercube_codes(2)
        .iter()
        .map(|a| selector_eval(SelectorKind::Hamming, a, &mid, None))
        .fold(rint(0), |acc, v| acc + v);
    assert_eq!(total, rint(0));
    println!("criterion 6: PASS - selector laws exhaustive for r in 1..=3, linear failure witnessed");
}

#[test]
fn criterion_07_enumeration_oracle_equivalence() {
    use packideal_core::mblp::{ConstraintRow, ConstraintTag, MblpModel};
    let mut rng = common::TestRng::new(0xACCE97);
    let mut done = 0;
    while done < 50 {
        let nvars = 2 + (rng.below(2) as usize); // 2 or 3 variables
        let nrows = 3 + (rng.below(6) as usize); // up to 8 rows
        let mut m = MblpModel::new(
            nvars,
            0,
            (0..nvars).map(|i| format!("x{i}")).collect(),
        );
        for r in 0..nrows {
            let coeffs: Vec<packideal_core::Rat> =
                (0..nvars).map(|_| rng.small_rat()).collect();
            if coeffs.iter().all(|c| c == &rint(0)) {
                continue;
            }
            let rhs = rng.small_rat();
            m.push(ConstraintRow::ge(
                coeffs,
                rhs,
                ConstraintTag::new("r", format!("{r}")),
            ));
        }
        if m.rows.is_empty() {
            continue;
        }
        // half the cases get a box so vertices exist often
        if rng.below(2) == 0 {
            for v in 0..nvars {
                let mut lo = vec![rint(0); nvars];
                lo[v] = rint(1);
                m.push(ConstraintRow::ge(
                    lo.clone(),
                    rint(-4),
                    ConstraintTag::new("lo", format!("{v}")),
                ));
                let mut hi = vec![rint(0); nvars];
                hi[v] = rint(-1);
                m.push(ConstraintRow::ge(
                    hi,
                    rint(-4),
                    ConstraintTag::new("hi", format!("{v}")),
                ));
            }
        }
        if m.rows.len() > 8 {
            m.rows.truncate(8);
        }
        let relax = compose_relaxation(&m);
        let mine = enumerate_extreme_points(&relax, &opts()).unwrap();
        let mine_set: std::collections::BTreeSet<Vec<packideal_core::Rat>> =
            mine.vertices.iter().map(point_vec).collect();
        let oracle = common::brute_force_vertices(&relax);
        assert_eq!(mine_set, oracle, "vertex sets differ on case {done}");
        done += 1;
    }
    println!("criterion 7: PASS - 50 random polytopes match the independent brute-force oracle");
}

#[test]
fn criterion_08_iom_construction() {
    let m = build(
        FormulationKind::Su,
        &pair_2x2_10x10(),
        PairScope::All,
        &BuildOptions::default(),
    )
    .unwrap();
    let relax = compose_relaxation(&m);
    // install one dependence cover per realization: the dynamic-bound and
    // precedence rows plus the indicator's lower bound
    let mut covers = Vec::new();
    for (k, l, s) in packideal_core::formulations::realizations(1, 2) {
        let real = format!("{k}{l}{s}");
        let cover: Vec<usize> = [
            relax.model.find_row("SU:lb", &real).unwrap(),
            relax.model.find_row("SU:ub", &real).unwrap(),
            relax.model.find_row("SU:pm", &real).unwrap(),
            relax
                .model
                .find_row("bound", &format!("d{real}.lo"))
                .unwrap(),
        ]
        .to_vec();
        covers.push(cover);
    }
    let iom = build_iom(&m, &covers, rint(10)).unwrap();
    let extrm = iom.iom.find_row("IOM:extrm", "").unwrap();
    assert_eq!(iom.iom.rows[extrm].rhs, rint(7), "8 variables minus 1 equality");
    // every cover row's rank bound matches an independent recomputation
    for (ci, cover) in covers.iter().enumerate() {
        let aug = RatMatrix::from_rows(
            cover
                .iter()
                .map(|&r| {
                    let row = &relax.model.rows[r];
                    let mut v = row.coeffs.clone();
                    v.push(row.rhs.clone());
                    v
                })
                .collect(),
        );
        let want = aug.rank();
        assert_eq!(want, 3, "each realization cover is dependent when tight");
        let idx = iom.iom.find_row("IOM:cover", &ci.to_string()).unwrap();
        // the row is a <= stored negated, so its rhs is minus the bound
        assert_eq!(iom.iom.rows[idx].rhs, -rint(want as i64));
    }
    println!("criterion 8: PASS - tight-count right side 7, cover ranks recomputed independently");
}

#[test]
fn criterion_09_greedy_and_spp_oracle() {
    // greedy feasibility across the benchmark sizes
    for &n in &[10usize, 15, 20, 25] {
        let spec = GenSpec::new(n, 9000 + n as u64);
        for inst in generate(&spec, 100) {
            let layout = greedy_pack(&inst).unwrap();
            assert!(
                validate_layout(&inst, &layout.centers).is_empty(),
                "greedy layout invalid at n={n}"
            );
        }
    }
    // strip-packing optimum equals the disjunct-enumeration oracle
    let mut cases: Vec<RppInstance> = Vec::new();
    cases.push(RppInstance::new(
        (rint(100), rint(100)),
        vec![RppObject::plain(rint(2), rint(2))],
    ));
    for seed in [11u64, 12, 13] {
        cases.extend(generate(&GenSpec::new(2, seed), 1));
        cases.extend(generate(&GenSpec::new(3, seed), 1));
    }
    for inst in &cases {
        let want = common::spp_brute_force_optimum(inst).expect("oracle finds a packing");
        for kind in FormulationKind::ALL {
            let b = build_spp(inst, kind, &SppOptions::default()).unwrap();
            let pinned: Vec<(String, String, String)> = if kind == FormulationKind::Sbm {
                (1..=inst.len())
                    .flat_map(|i| {
                        ((i + 1)..=inst.len())
                            .map(move |j| (format!("D{i}{j}"), format!("d{i}{j}"), format!("d{j}{i}")))
                    })
                    .collect()
            } else {
                Vec::new()
            };
            let got = common::restricted_min_objective(&b.model, "h", &pinned)
                .expect("restricted model feasible");
            assert_eq!(got, want, "{kind} optimum mismatch on {}", inst.to_json());
        }
    }
    println!(
        "criterion 9: PASS - 400 greedy layouts validated; SPP optimum matches the oracle on {} instances x 6 formulations",
        cases.len()
    );
}

#[test]
fn criterion_10_determinism() {
    let grid = criterion_4_grid();
    let mut hasher_one = Vec::new();
    let mut hasher_eight = Vec::new();
    for threads in [1usize, 8] {
        let sink = if threads == 1 {
            &mut hasher_one
        } else {
            &mut hasher_eight
        };
        for inst in &grid {
            for kind in [FormulationKind::Sbl, FormulationKind::Su] {
                let m = build(kind, inst, PairScope::All, &BuildOptions::default()).unwrap();
                let relax = compose_relaxation(&m);
                let report = enumerate_extreme_points(
                    &relax,
                    &EnumerateOptions {
                        threads,
                        ..Default::default()
                    },
                )
                .unwrap();
                let doc = match report.fractional.first() {
                    Some(w) => witness_json(w, &relax),
                    None => format!("ideal:{}\n", report.vertices.len()),
                };
                sink.push(doc);
                sink.push(export(&m, None, ExportFormat::Lp));
                sink.push(export(&m, None, ExportFormat::Mps));
            }
        }
    }
    assert_eq!(hasher_one, hasher_eight, "1 vs 8 workers must be byte-identical");
    // and across repeated runs
    let rerun: Vec<String> = {
        let mut sink = Vec::new();
        for inst in &grid {
            for kind in [FormulationKind::Sbl, FormulationKind::Su] {
                let m = build(kind, inst, PairScope::All, &BuildOptions::default()).unwrap();
                let relax = compose_relaxation(&m);
                let report = enumerate_extreme_points(&relax, &opts()).unwrap();
                let doc = match report.fractional.first() {
                    Some(w) => witness_json(w, &relax),
                    None => format!("ideal:{}\n", report.vertices.len()),
                };
                sink.push(doc);
                sink.push(export(&m, None, ExportFormat::Lp));
                sink.push(export(&m, None, ExportFormat::Mps));
            }
        }
        sink
    };
    assert_eq!(hasher_one, rerun, "repeated runs must be byte-identical");
    println!(
        "criterion 10: PASS - {} artifacts byte-identical across runs and 1 vs 8 workers",
        hasher_one.len()
    );
}
