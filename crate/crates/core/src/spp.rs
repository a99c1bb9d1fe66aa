//! Strip-packing model assembly: height objective, greedy-derived hard
//! upper bound on the region height, optional sequence-pair cuts, and the
//! solver hints sidecar (branching priorities and a warm start).

use crate::export::{Objective, ObjectiveSense};
use crate::formulations::{
    branching_priority, build, realizations, sequence_pair_cuts, BuildOptions, FormulationKind,
    PairScope, VarLayout,
};
use crate::greedy::{greedy_pack, GreedyError, GreedyLayout};
use crate::mblp::{ConstraintRow, ConstraintTag, MblpModel};
use crate::rpp::{classify, derive_params, Dir, RppError, RppInstance};
use crate::selectors::{gray_code, PairRole};
use crate::{rat_to_string, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutFamily {
    #[default]
    None,
    Spu,
    Spb,
}

impl FromStr for CutFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(CutFamily::None),
            "spu" => Ok(CutFamily::Spu),
            "spb" => Ok(CutFamily::Spb),
            other => Err(format!("unknown cut family {other:?} (expected spu|spb|none)")),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SppOptions {
    pub cuts: CutFamily,
    pub priorities: bool,
    pub warm: bool,
}

/// The solver hints sidecar: integer branching priorities, a feasible warm
/// start, and the hard region-height bound from the greedy layout.
#[derive(Debug, Clone, Serialize)]
pub struct SolverHints {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub priorities: Option<BTreeMap<String, String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub start: Option<BTreeMap<String, String>>,
    pub bound_ry: String,
}

impl SolverHints {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("hints serialize");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone)]
pub struct SppBuild {
    pub model: MblpModel,
    pub objective: Objective,
    pub greedy: GreedyLayout,
    /// The greedy height installed as the region's hard upper bound.
    pub bound_ry: Rat,
    pub hints: SolverHints,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SppError {
    #[error(transparent)]
    Instance(#[from] RppError),
    #[error(transparent)]
    Greedy(#[from] GreedyError),
    #[error("cut family {family} does not apply to formulation {kind}")]
    CutMismatch { family: String, kind: String },
}

/// Builds the strip-packing model for an instance: the chosen disjunctive
/// embedding over a region whose height is replaced by the greedy bound,
/// one lower-bounding row per object for the height variable `h`, and the
/// minimize-h objective. Hints carry priorities and the greedy warm start
/// per the options.
pub fn build_spp(
    inst: &RppInstance,
    kind: FormulationKind,
    options: &SppOptions,
) -> Result<SppBuild, SppError> {
    inst.validate()?;
    let class = classify(inst);
    if class.trivial {
        return Err(SppError::Instance(RppError::TrivialInstance {
            reason: class.trivial_reason.unwrap_or_default(),
        }));
    }
    match (options.cuts, kind.is_unary()) {
        (CutFamily::Spu, false) | (CutFamily::Spb, true) => {
            return Err(SppError::CutMismatch {
                family: if options.cuts == CutFamily::Spu {
                    "spu".into()
                } else {
                    "spb".into()
                },
                kind: kind.to_string(),
            });
        }
        _ => {}
    }
    let greedy = greedy_pack(inst)?;
    // hard upper bound on the region height; the bounded instance may pin
    // objects exactly (greedy already optimal), so the build is forced
    let mut bounded = inst.clone();
    bounded.region.1 = greedy.height.clone();
    let mut model = build(
        kind,
        &bounded,
        PairScope::All,
        &BuildOptions {
            force: true,
            ..Default::default()
        },
    )?;
    let h = model.insert_continuous("h");
    let params = derive_params(&bounded);
    let half = |v: &Rat| v / crate::rint(2);
    let layout = VarLayout::new(kind, (1..=inst.len()).collect());
    for i in 1..=inst.len() {
        let o = &inst.objects[i - 1];
        let mut row = vec![Rat::zero(); model.dim()];
        row[h] = Rat::one();
        let ciy = layout.c(i, Dir::Y);
        debug_assert!(ciy < h);
        row[ciy] = -Rat::one();
        model.push(ConstraintRow::ge(
            row,
            half(&o.dy) + o.sigma.yp.clone(),
            ConstraintTag::new("SPP:h", format!("{i}")),
        ));
    }
    if options.cuts != CutFamily::None {
        let cuts = sequence_pair_cuts(kind, inst.len()).map_err(SppError::Instance)?;
        for mut row in cuts {
            row.coeffs.insert(h, Rat::zero());
            model.push(row);
        }
    }
    model.validate().expect("spp model well-formed");
    let objective = Objective {
        sense: ObjectiveSense::Minimize,
        terms: vec![("h".into(), Rat::one())],
    };
    let priorities = options.priorities.then(|| {
        let raw = branching_priority(kind, inst);
        scale_priorities(&raw)
    });
    let start = options
        .warm
        .then(|| warm_start(kind, inst, &params, &greedy, &layout));
    let hints = SolverHints {
        priorities,
        start,
        bound_ry: rat_to_string(&greedy.height),
    };
    Ok(SppBuild {
        model,
        objective,
        greedy: greedy.clone(),
        bound_ry: greedy.height,
        hints,
    })
}

/// Scales exact rational priorities by their common denominator so the
/// sidecar carries order-preserving integers.
fn scale_priorities(raw: &BTreeMap<String, Rat>) -> BTreeMap<String, String> {
    let mut l = BigInt::one();
    for v in raw.values() {
        l = l.lcm(v.denom());
    }
    let s = Rat::from_integer(l);
    raw.iter()
        .map(|(k, v)| (k.clone(), (v * &s).to_integer().to_string()))
        .collect()
}

/// Warm-start values from the greedy layout: centers, the height, and
/// indicator values. The disjunct chosen per pair is the x-precedence for
/// same-row pairs and the y-precedence of the lower row otherwise; this is
/// the row layout's sequence-pair order, so the one-hot and Gray-code
/// assignments also satisfy the transitivity cuts. The refined kinds carry
/// the full truth assignment instead.
fn warm_start(
    kind: FormulationKind,
    inst: &RppInstance,
    params: &crate::rpp::DerivedParams,
    greedy: &GreedyLayout,
    layout: &VarLayout,
) -> BTreeMap<String, String> {
    let coord = |i: usize, s: Dir| match s {
        Dir::X => &greedy.centers[i - 1].0,
        Dir::Y => &greedy.centers[i - 1].1,
    };
    let holds = |k: usize, l: usize, s: Dir| {
        coord(k, s).clone() + params.p(k, l, s).clone() <= *coord(l, s)
    };
    let mut row_of = vec![0usize; inst.len() + 1];
    for (r, row) in greedy.rows.iter().enumerate() {
        for &m in &row.members {
            row_of[m] = r;
        }
    }
    // same row: the left object precedes along x; otherwise the lower row
    // precedes along y
    let chosen = |i: usize, j: usize| -> (usize, usize, Dir) {
        if row_of[i] == row_of[j] {
            if coord(i, Dir::X) < coord(j, Dir::X) {
                (i, j, Dir::X)
            } else {
                (j, i, Dir::X)
            }
        } else if row_of[i] < row_of[j] {
            (i, j, Dir::Y)
        } else {
            (j, i, Dir::Y)
        }
    };
    let mut start: BTreeMap<String, String> = BTreeMap::new();
    for i in 1..=inst.len() {
        start.insert(format!("c{i}x"), rat_to_string(coord(i, Dir::X)));
        start.insert(format!("c{i}y"), rat_to_string(coord(i, Dir::Y)));
    }
    start.insert("h".into(), rat_to_string(&greedy.height));
    for &(i, j) in &layout.pairs {
        let pick = chosen(i, j);
        debug_assert!(holds(pick.0, pick.1, pick.2));
        match kind {
            FormulationKind::Su | FormulationKind::Nu => {
                for (k, l, s) in realizations(i, j) {
                    let v = if (k, l, s) == pick { "1" } else { "0" };
                    start.insert(format!("d{k}{l}{s}"), v.into());
                }
            }
            FormulationKind::Ru | FormulationKind::Hu => {
                for (k, l, s) in realizations(i, j) {
                    let v = if holds(k, l, s) { "1" } else { "0" };
                    start.insert(format!("d{k}{l}{s}"), v.into());
                }
            }
            FormulationKind::Sbl | FormulationKind::Sbm => {
                let role = if pick.0 == i {
                    PairRole::Fwd
                } else {
                    PairRole::Rev
                };
                let code = gray_code(role, pick.2);
                start.insert(format!("d{i}{j}"), code[0].to_string());
                start.insert(format!("d{j}{i}"), code[1].to_string());
                if kind == FormulationKind::Sbm {
                    start.insert(format!("D{i}{j}"), (code[0] * code[1]).to_string());
                }
            }
        }
    }
    start
}
