//! Cross-module invariants: bound folding preserves the feasible set,
//! enumerated vertices are sound, idealness agrees with the penalty
//! optimum, and hull-valid rows never break a certified-ideal model.

use packideal_core::enumerate::{
    check_ideal, enumerate_extreme_points, max_phi_over_vertices, EnumerateOptions, IdealVerdict,
};
use packideal_core::formulations::{build, BuildOptions, FormulationKind, PairScope};
use packideal_core::linalg::Matrix;
use packideal_core::mblp::{
    compose_relaxation, is_feasible, tight_rows, ConstraintRow, ConstraintTag, Point, Sense,
};
use packideal_core::rpp::{pair_2x2_10x10, RppInstance, RppObject};
use packideal_core::{rat, rint, Rat};

fn opts() -> EnumerateOptions {
    EnumerateOptions::default()
}

struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

fn clearance_pair() -> RppInstance {
    let mut a = RppObject::plain(rint(1), rint(2));
    a.sigma.xp = rint(1);
    a.sigma.yp = rint(1);
    let mut b = RppObject::plain(rint(2), rint(1));
    b.sigma.xm = rint(1);
    RppInstance::new((rint(9), rint(9)), vec![a, b])
}

#[test]
fn bound_folding_preserves_the_feasible_set() {
    // the relaxation must agree with "body rows plus the full binary box"
    // pointwise; 1000 seeded samples per formulation per instance
    for inst in [pair_2x2_10x10(), clearance_pair()] {
        for kind in FormulationKind::ALL {
            let m = build(kind, &inst, PairScope::All, &BuildOptions::default()).unwrap();
            let relax = compose_relaxation(&m);
            let mut rng = Rng(kind.prefix().len() as u64 * 7919 + inst.len() as u64);
            for _ in 0..1000 {
                let coords: Vec<Rat> = (0..m.dim())
                    .map(|j| {
                        if j < m.n_c {
                            // continuous: sample around the region
                            rat((rng.next() % 97) as i64 - 8, ((rng.next() % 4) + 1) as i64)
                        } else {
                            // binary block: stay near the box, crossing it
                            rat((rng.next() % 13) as i64 - 3, 8)
                        }
                    })
                    .collect();
                let p = Point::from_coords(&coords, m.n_c);
                let relaxed_ok = is_feasible(&relax, &p).unwrap();
                let mut direct_ok = p
                    .y
                    .iter()
                    .all(|v| *v >= rint(0) && *v <= rint(1));
                if direct_ok {
                    for row in &m.rows {
                        let lhs = packideal_core::linalg::dot(&row.coeffs, &coords);
                        let ok = match row.sense {
                            Sense::Ge => lhs >= row.rhs,
                            Sense::Eq => lhs == row.rhs,
                        };
                        if !ok {
                            direct_ok = false;
                            break;
                        }
                    }
                }
                assert_eq!(relaxed_ok, direct_ok, "{kind} disagrees at {coords:?}");
            }
        }
    }
}

#[test]
fn every_vertex_is_sound() {
    // feasibility plus a full-rank tight subset, re-established through the
    // standalone rank kernel rather than the enumeration path
    for kind in FormulationKind::ALL {
        let m = build(kind, &pair_2x2_10x10(), PairScope::All, &BuildOptions::default()).unwrap();
        let relax = compose_relaxation(&m);
        let report = enumerate_extreme_points(&relax, &opts()).unwrap();
        assert!(!report.vertices.is_empty());
        for v in &report.vertices {
            assert!(is_feasible(&relax, v).unwrap());
            let tight = tight_rows(&relax, v).unwrap();
            let rows: Vec<Vec<Rat>> = tight
                .iter()
                .map(|&i| relax.rows()[i].coeffs.clone())
                .collect();
            let rank = Matrix::from_rows(rows).rank();
            assert_eq!(rank, relax.dim(), "{kind} vertex lacks a full-rank tight set");
        }
        for w in &report.fractional {
            let rows: Vec<Vec<Rat>> = w
                .tight_subset
                .iter()
                .map(|&i| relax.rows()[i].coeffs.clone())
                .collect();
            assert_eq!(Matrix::from_rows(rows).rank(), relax.dim());
        }
    }
}

#[test]
fn ideal_iff_zero_penalty_optimum() {
    for (kind, want_ideal) in [
        (FormulationKind::Su, true),
        (FormulationKind::Sbm, true),
        (FormulationKind::Sbl, false),
        (FormulationKind::Nu, false),
    ] {
        let m = build(kind, &pair_2x2_10x10(), PairScope::All, &BuildOptions::default()).unwrap();
        let relax = compose_relaxation(&m);
        let verdict = check_ideal(&m, &opts()).unwrap();
        let max_phi = max_phi_over_vertices(&relax, &opts()).unwrap();
        assert_eq!(verdict == IdealVerdict::Ideal, want_ideal, "{kind}");
        assert_eq!(max_phi == rint(0), want_ideal, "{kind}");
    }
}

#[test]
fn hull_valid_rows_preserve_idealness() {
    // appending inequalities valid for the integer hull to an ideal model
    // cannot introduce a fractional vertex; the sequence-pair shape over a
    // pair and a sum of body rows both qualify
    let inst = pair_2x2_10x10();
    let m = build(FormulationKind::Su, &inst, PairScope::All, &BuildOptions::default()).unwrap();
    assert_eq!(check_ideal(&m, &opts()).unwrap(), IdealVerdict::Ideal);
    let layout =
        packideal_core::formulations::VarLayout::new(FormulationKind::Su, vec![1, 2]);
    let mut extended = m.clone();
    // transitivity-shaped row: d12x + d12y - d21x <= 1 (valid: the one-hot
    // equality and nonnegativity bound the sum by one)
    let mut row = vec![rint(0); extended.dim()];
    row[layout.d_unary(1, 2, packideal_core::rpp::Dir::X)] = rint(1);
    row[layout.d_unary(1, 2, packideal_core::rpp::Dir::Y)] = rint(1);
    row[layout.d_unary(2, 1, packideal_core::rpp::Dir::X)] = rint(-1);
    extended.push(ConstraintRow::le(
        row,
        rint(1),
        ConstraintTag::new("SPU", "12x"),
    ));
    // a nonnegative combination of two body rows is valid for the hull
    let sum: Vec<Rat> = extended.rows[0]
        .coeffs
        .iter()
        .zip(&extended.rows[1].coeffs)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    let rhs = extended.rows[0].rhs.clone() + extended.rows[1].rhs.clone();
    extended.push(ConstraintRow::ge(sum, rhs, ConstraintTag::new("mix", "")));
    assert_eq!(check_ideal(&extended, &opts()).unwrap(), IdealVerdict::Ideal);

    // the hybrid formulation is the built-in instance of the argument:
    // refined rows plus the standard precedence family stays ideal
    let hu = build(FormulationKind::Hu, &inst, PairScope::All, &BuildOptions::default()).unwrap();
    assert_eq!(check_ideal(&hu, &opts()).unwrap(), IdealVerdict::Ideal);
}

#[test]
fn counterexample_residuals_and_tight_rows() {
    use packideal_core::mblp::residuals;
    let m = build(
        FormulationKind::Sbl,
        &pair_2x2_10x10(),
        PairScope::All,
        &BuildOptions::default(),
    )
    .unwrap();
    let relax = compose_relaxation(&m);
    let witness = Point::new(
        vec![rint(9), rint(1), rint(9), rint(1)],
        vec![rat(1, 2), rat(1, 2)],
    );
    let res = residuals(&relax, &witness).unwrap();
    // the six cited rows are exactly tight at the witness
    let cited = ["SB:lb", "SB:ub", "SB:pm"];
    for fam in cited {
        for real in ["12x", "12y"] {
            let idx = relax.model.find_row(fam, real).unwrap();
            assert_eq!(res[idx], rint(0), "{fam}^{real}");
        }
    }
    // the full tight set adds the coincidentally tight static bounds
    let tight = tight_rows(&relax, &witness).unwrap();
    assert_eq!(tight.len(), 10);
    let tags: Vec<String> = tight
        .iter()
        .map(|&i| relax.rows()[i].tag.to_string())
        .collect();
    for fam in cited {
        for real in ["12x", "12y"] {
            assert!(tags.contains(&format!("{fam}^{real}")));
        }
    }
    assert!(tags.contains(&"SB:sub^1x".to_string()));
    assert!(tags.contains(&"SB:slb^2y".to_string()));
}

#[test]
fn report_accounting_is_consistent() {
    for kind in [FormulationKind::Su, FormulationKind::Sbl] {
        let m = build(kind, &pair_2x2_10x10(), PairScope::All, &BuildOptions::default()).unwrap();
        let relax = compose_relaxation(&m);
        let report = enumerate_extreme_points(&relax, &opts()).unwrap();
        assert!(report.subsets_rank_deficient <= report.subsets_examined);
        // fractional witnesses are a subset of the vertex list
        for w in &report.fractional {
            assert!(report.vertices.contains(&w.point));
        }
    }
}
