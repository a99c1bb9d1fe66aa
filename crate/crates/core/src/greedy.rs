//! Greedy row-building warm-start heuristic and the exact layout validator
//! for the underlying disjunctive placement rules.

use crate::rpp::{derive_params, Dir, RppInstance, DIRS};
use crate::{rat_to_string, Rat};
use num_traits::Zero;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowRecord {
    #[serde(with = "crate::rat_serde")]
    pub base: Rat,
    /// Largest physical height (clearance-below plus dimension) in the row.
    #[serde(with = "crate::rat_serde")]
    pub tallest_physical: Rat,
    /// Largest full extent including the upper clearance; the next row
    /// starts here so no occlusion occurs between rows.
    #[serde(with = "crate::rat_serde")]
    pub tallest_clearance: Rat,
    /// 1-based object indices, left to right.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyLayout {
    /// Center per object, in original object order.
    pub centers: Vec<(Rat, Rat)>,
    pub rows: Vec<RowRecord>,
    pub height: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GreedyError {
    #[error("object {object} is wider than the strip ({extent} > {width})")]
    ObjectTooWide {
        object: usize,
        extent: String,
        width: String,
    },
    #[error("greedy height {height} exceeds the instance region {region}")]
    ExceedsRegion { height: String, region: String },
}

/// A violated placement rule; empty output from `validate_layout` means the
/// layout is valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    /// Center outside `[LB, UB]` along the named direction.
    Bound { object: usize, dir: String },
    /// No precedence disjunct holds for the pair, so some physical object
    /// intersects the other's footprint or clearance.
    Occlusion { first: usize, second: usize },
}

/// Checks the disjunctive placement rules exactly: per object the center
/// bounds, per pair at least one precedence disjunct.
pub fn validate_layout(inst: &RppInstance, centers: &[(Rat, Rat)]) -> Vec<Violation> {
    assert_eq!(centers.len(), inst.len(), "centers must cover all objects");
    let params = derive_params(inst);
    let coord = |i: usize, s: Dir| match s {
        Dir::X => &centers[i - 1].0,
        Dir::Y => &centers[i - 1].1,
    };
    let mut out = Vec::new();
    for i in 1..=inst.len() {
        for s in DIRS {
            let v = coord(i, s);
            if v < params.lb(i, s) || v > params.ub(i, s) {
                out.push(Violation::Bound {
                    object: i,
                    dir: s.to_string(),
                });
            }
        }
    }
    for i in 1..=inst.len() {
        for j in i + 1..=inst.len() {
            let separated = DIRS.iter().any(|&s| {
                coord(i, s).clone() + params.p(i, j, s).clone() <= *coord(j, s)
                    || coord(j, s).clone() + params.p(j, i, s).clone() <= *coord(i, s)
            });
            if !separated {
                out.push(Violation::Occlusion {
                    first: i,
                    second: j,
                });
            }
        }
    }
    out
}

/// Packs objects into rows: sort by increasing total height, fill each row
/// left to right until the strip width would overflow, and start the next
/// row above the tallest clearance of the one below.
pub fn greedy_pack(inst: &RppInstance) -> Result<GreedyLayout, GreedyError> {
    let width = inst.region_dim(Dir::X).clone();
    let mut order: Vec<usize> = (1..=inst.len()).collect();
    order.sort_by(|&a, &b| {
        let ha = inst.objects[a - 1].extent(Dir::Y);
        let hb = inst.objects[b - 1].extent(Dir::Y);
        ha.cmp(&hb).then(a.cmp(&b))
    });
    for &i in &order {
        let extent = inst.objects[i - 1].extent(Dir::X);
        if extent > width {
            return Err(GreedyError::ObjectTooWide {
                object: i,
                extent: rat_to_string(&extent),
                width: rat_to_string(&width),
            });
        }
    }
    let mut centers: Vec<(Rat, Rat)> = vec![(Rat::zero(), Rat::zero()); inst.len()];
    let mut rows: Vec<RowRecord> = Vec::new();
    let mut base = Rat::zero();
    let mut cursor = Rat::zero();
    let mut current = RowRecord {
        base: base.clone(),
        tallest_physical: Rat::zero(),
        tallest_clearance: Rat::zero(),
        members: Vec::new(),
    };
    let half = |v: &Rat| v / crate::rint(2);
    for &i in &order {
        let o = &inst.objects[i - 1];
        let w = o.extent(Dir::X);
        if !current.members.is_empty() && cursor.clone() + w.clone() > width {
            base = current.base.clone() + current.tallest_clearance.clone();
            rows.push(current);
            current = RowRecord {
                base: base.clone(),
                tallest_physical: Rat::zero(),
                tallest_clearance: Rat::zero(),
                members: Vec::new(),
            };
            cursor = Rat::zero();
        }
        let cx = cursor.clone() + o.sigma.xm.clone() + half(&o.dx);
        let cy = base.clone() + o.sigma.ym.clone() + half(&o.dy);
        centers[i - 1] = (cx, cy);
        cursor += w;
        let phys = o.sigma.ym.clone() + o.dy.clone();
        if phys > current.tallest_physical {
            current.tallest_physical = phys;
        }
        let clear = o.extent(Dir::Y);
        if clear > current.tallest_clearance {
            current.tallest_clearance = clear;
        }
        current.members.push(i);
    }
    if !current.members.is_empty() {
        rows.push(current);
    }
    let mut height = Rat::zero();
    for (i, o) in inst.objects.iter().enumerate() {
        let top = centers[i].1.clone() + half(&o.dy) + o.sigma.yp.clone();
        if top > height {
            height = top;
        }
    }
    if height > *inst.region_dim(Dir::Y) {
        return Err(GreedyError::ExceedsRegion {
            height: rat_to_string(&height),
            region: rat_to_string(inst.region_dim(Dir::Y)),
        });
    }
    let layout = GreedyLayout {
        centers,
        rows,
        height,
    };
    debug_assert!(validate_layout(inst, &layout.centers).is_empty());
    Ok(layout)
}
