//! Rectangle packing instances with per-face clearances and the derived
//! placement parameters (center bounds and precedence margins).

use crate::{rat_from_str, rat_to_string, Rat};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Axis label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Dir {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
}

pub const DIRS: [Dir; 2] = [Dir::X, Dir::Y];

impl Dir {
    pub fn other(self) -> Dir {
        match self {
            Dir::X => Dir::Y,
            Dir::Y => Dir::X,
        }
    }
}

impl fmt::Display for Dir {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dir::X => write!(f, "x"),
            Dir::Y => write!(f, "y"),
        }
    }
}

/// Per-face clearance vector in the order (x-, y-, x+, y+).
#[derive(Debug, Clone, PartialEq)]
pub struct Clearances {
    pub xm: Rat,
    pub ym: Rat,
    pub xp: Rat,
    pub yp: Rat,
}

impl Clearances {
    pub fn zero() -> Self {
        Clearances {
            xm: Rat::zero(),
            ym: Rat::zero(),
            xp: Rat::zero(),
            yp: Rat::zero(),
        }
    }

    pub fn minus(&self, s: Dir) -> &Rat {
        match s {
            Dir::X => &self.xm,
            Dir::Y => &self.ym,
        }
    }

    pub fn plus(&self, s: Dir) -> &Rat {
        match s {
            Dir::X => &self.xp,
            Dir::Y => &self.yp,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RppObject {
    pub dx: Rat,
    pub dy: Rat,
    pub sigma: Clearances,
}

impl RppObject {
    pub fn plain(dx: Rat, dy: Rat) -> Self {
        RppObject {
            dx,
            dy,
            sigma: Clearances::zero(),
        }
    }

    pub fn dim(&self, s: Dir) -> &Rat {
        match s {
            Dir::X => &self.dx,
            Dir::Y => &self.dy,
        }
    }

    /// Footprint including clearances along `s`.
    pub fn extent(&self, s: Dir) -> Rat {
        self.sigma.minus(s).clone() + self.dim(s).clone() + self.sigma.plus(s).clone()
    }
}

/// A packing instance: region, objects, and optional explicit precedence
/// margin overrides keyed by 1-based `(k, l, s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RppInstance {
    pub region: (Rat, Rat),
    pub objects: Vec<RppObject>,
    pub p_overrides: BTreeMap<(usize, usize, Dir), Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RppError {
    #[error("instance is trivial: {reason}")]
    TrivialInstance { reason: String },
    #[error("sequence-pair cuts need at least 3 objects, got {got}")]
    TooFewObjects { got: usize },
    #[error("invalid instance: {0}")]
    Invalid(String),
}

impl RppInstance {
    pub fn new(region: (Rat, Rat), objects: Vec<RppObject>) -> Self {
        RppInstance {
            region,
            objects,
            p_overrides: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn region_dim(&self, s: Dir) -> &Rat {
        match s {
            Dir::X => &self.region.0,
            Dir::Y => &self.region.1,
        }
    }

    /// Dimension, clearance and override sanity checks.
    pub fn validate(&self) -> Result<(), RppError> {
        let bad = |m: String| Err(RppError::Invalid(m));
        if self.region.0.is_negative() || self.region.1.is_negative() {
            return bad("negative region dimension".into());
        }
        for (i, o) in self.objects.iter().enumerate() {
            if o.dx.is_negative() || o.dy.is_negative() {
                return bad(format!("object {} has a negative dimension", i + 1));
            }
            for s in DIRS {
                if o.sigma.minus(s).is_negative() || o.sigma.plus(s).is_negative() {
                    return bad(format!("object {} has a negative clearance", i + 1));
                }
            }
        }
        for &(k, l, s) in self.p_overrides.keys() {
            if k == 0 || l == 0 || k > self.len() || l > self.len() || k == l {
                return bad(format!("override index ({k},{l},{s}) out of range"));
            }
            // overrides must cover whole pairs: all four realizations
            for key in [(k, l, Dir::X), (l, k, Dir::X), (k, l, Dir::Y), (l, k, Dir::Y)] {
                if !self.p_overrides.contains_key(&key) {
                    return bad(format!(
                        "override for pair ({k},{l}) must cover all four realizations"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&InstanceJson::from(self)).expect("serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, RppError> {
        let raw: InstanceJson =
            serde_json::from_str(s).map_err(|e| RppError::Invalid(e.to_string()))?;
        raw.try_into()
    }
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    region: [String; 2],
    objects: Vec<ObjectJson>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    p_overrides: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct ObjectJson {
    d: [String; 2],
    sigma: [String; 4],
}

impl From<&RppInstance> for InstanceJson {
    fn from(inst: &RppInstance) -> Self {
        InstanceJson {
            region: [rat_to_string(&inst.region.0), rat_to_string(&inst.region.1)],
            objects: inst
                .objects
                .iter()
                .map(|o| ObjectJson {
                    d: [rat_to_string(&o.dx), rat_to_string(&o.dy)],
                    sigma: [
                        rat_to_string(&o.sigma.xm),
                        rat_to_string(&o.sigma.ym),
                        rat_to_string(&o.sigma.xp),
                        rat_to_string(&o.sigma.yp),
                    ],
                })
                .collect(),
            p_overrides: inst
                .p_overrides
                .iter()
                .map(|((k, l, s), v)| (format!("{k},{l},{s}"), rat_to_string(v)))
                .collect(),
        }
    }
}

impl TryFrom<InstanceJson> for RppInstance {
    type Error = RppError;

    fn try_from(raw: InstanceJson) -> Result<Self, RppError> {
        let r = |s: &str| rat_from_str(s).map_err(RppError::Invalid);
        let mut objects = Vec::new();
        for o in &raw.objects {
            objects.push(RppObject {
                dx: r(&o.d[0])?,
                dy: r(&o.d[1])?,
                sigma: Clearances {
                    xm: r(&o.sigma[0])?,
                    ym: r(&o.sigma[1])?,
                    xp: r(&o.sigma[2])?,
                    yp: r(&o.sigma[3])?,
                },
            });
        }
        let mut p_overrides = BTreeMap::new();
        for (key, val) in &raw.p_overrides {
            let parts: Vec<&str> = key.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(RppError::Invalid(format!("bad override key {key:?}")));
            }
            let k: usize = parts[0]
                .parse()
                .map_err(|_| RppError::Invalid(format!("bad override key {key:?}")))?;
            let l: usize = parts[1]
                .parse()
                .map_err(|_| RppError::Invalid(format!("bad override key {key:?}")))?;
            let s = match parts[2] {
                "x" => Dir::X,
                "y" => Dir::Y,
                _ => return Err(RppError::Invalid(format!("bad direction in {key:?}"))),
            };
            p_overrides.insert((k, l, s), r(val)?);
        }
        let inst = RppInstance {
            region: (r(&raw.region[0])?, r(&raw.region[1])?),
            objects,
            p_overrides,
        };
        inst.validate()?;
        Ok(inst)
    }
}

/// Exact placement parameters: per object per direction the center bounds
/// `LB_is = d_is/2 + sigma_is^-` and `UB_is = r_s - d_is/2 - sigma_is^+`,
/// and per ordered pair the precedence margin
/// `P_kls = d_ks/2 + d_ls/2 + max(sigma_ks^+, sigma_ls^-)` unless overridden.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    lb: BTreeMap<(usize, Dir), Rat>,
    ub: BTreeMap<(usize, Dir), Rat>,
    p: BTreeMap<(usize, usize, Dir), Rat>,
    n: usize,
}

impl DerivedParams {
    /// `LB` for 1-based object `i`.
    pub fn lb(&self, i: usize, s: Dir) -> &Rat {
        &self.lb[&(i, s)]
    }

    pub fn ub(&self, i: usize, s: Dir) -> &Rat {
        &self.ub[&(i, s)]
    }

    pub fn p(&self, k: usize, l: usize, s: Dir) -> &Rat {
        &self.p[&(k, l, s)]
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

pub fn derive_params(inst: &RppInstance) -> DerivedParams {
    let mut lb = BTreeMap::new();
    let mut ub = BTreeMap::new();
    let mut p = BTreeMap::new();
    let half = |v: &Rat| v / Rat::from_integer(2.into());
    for (idx, o) in inst.objects.iter().enumerate() {
        let i = idx + 1;
        for s in DIRS {
            lb.insert((i, s), half(o.dim(s)) + o.sigma.minus(s).clone());
            ub.insert(
                (i, s),
                inst.region_dim(s).clone() - half(o.dim(s)) - o.sigma.plus(s).clone(),
            );
        }
    }
    let n = inst.len();
    for k in 1..=n {
        for l in 1..=n {
            if k == l {
                continue;
            }
            for s in DIRS {
                let val = match inst.p_overrides.get(&(k, l, s)) {
                    Some(v) => v.clone(),
                    None => {
                        let ok = &inst.objects[k - 1];
                        let ol = &inst.objects[l - 1];
                        let gap = ok.sigma.plus(s).max(ol.sigma.minus(s)).clone();
                        half(ok.dim(s)) + half(ol.dim(s)) + gap
                    }
                };
                p.insert((k, l, s), val);
            }
        }
    }
    DerivedParams { lb, ub, p, n }
}

/// Exact classification flags for one ordered realization `(k, l, s)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationFlags {
    pub k: usize,
    pub l: usize,
    pub s: Dir,
    /// `P_kls <= UB_ls - LB_ks` (the widely applicable idealness hypothesis).
    pub within_margin: bool,
    /// `P_kls = UB_ls - LB_ks` exactly (the boundary case).
    pub boundary: bool,
    /// `P_kls + LB_ks - LB_ls > 0` (first strict refined-formulation condition).
    pub strict_lb: bool,
    /// `P_kls + UB_ks - UB_ls > 0` (second strict condition).
    pub strict_ub: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceClass {
    pub trivial: bool,
    pub trivial_reason: Option<String>,
    pub realizations: Vec<RealizationFlags>,
}

impl InstanceClass {
    pub fn all_within_margin(&self) -> bool {
        self.realizations.iter().all(|f| f.within_margin)
    }

    pub fn all_strict(&self) -> bool {
        self.realizations.iter().all(|f| f.strict_lb && f.strict_ub)
    }

    pub fn boundary_count(&self) -> usize {
        self.realizations.iter().filter(|f| f.boundary).count()
    }
}

pub fn classify(inst: &RppInstance) -> InstanceClass {
    let params = derive_params(inst);
    let mut trivial_reason = None;
    for s in DIRS {
        if inst.region_dim(s).is_zero() && trivial_reason.is_none() {
            trivial_reason = Some(format!("region has r_{s} = 0"));
        }
    }
    for (idx, o) in inst.objects.iter().enumerate() {
        for s in DIRS {
            if o.dim(s).is_zero() && trivial_reason.is_none() {
                trivial_reason = Some(format!("object {} is degenerate along {s}", idx + 1));
            }
            let slack = params.ub(idx + 1, s).clone() - params.lb(idx + 1, s).clone();
            if !slack.is_positive() && trivial_reason.is_none() {
                trivial_reason = Some(format!(
                    "object {} has UB - LB = {} along {s}",
                    idx + 1,
                    crate::rat_to_string(&slack)
                ));
            }
        }
    }
    let mut realizations = Vec::new();
    let n = inst.len();
    for k in 1..=n {
        for l in 1..=n {
            if k == l {
                continue;
            }
            for s in DIRS {
                let p = params.p(k, l, s);
                if p.is_negative() && trivial_reason.is_none() {
                    trivial_reason = Some(format!("P_{k}{l}{s} is negative"));
                }
                let margin = params.ub(l, s).clone() - params.lb(k, s).clone();
                realizations.push(RealizationFlags {
                    k,
                    l,
                    s,
                    within_margin: *p <= margin,
                    boundary: *p == margin,
                    strict_lb: (p.clone() + params.lb(k, s).clone() - params.lb(l, s).clone())
                        .is_positive(),
                    strict_ub: (p.clone() + params.ub(k, s).clone() - params.ub(l, s).clone())
                        .is_positive(),
                });
            }
        }
    }
    InstanceClass {
        trivial: trivial_reason.is_some(),
        trivial_reason,
        realizations,
    }
}

use num_traits::Signed;

/// The two 2x2 objects with no clearances in a 10x10 region.
pub fn pair_2x2_10x10() -> RppInstance {
    use crate::rint;
    RppInstance::new(
        (rint(10), rint(10)),
        vec![
            RppObject::plain(rint(2), rint(2)),
            RppObject::plain(rint(2), rint(2)),
        ],
    )
}

/// One 2x2 object plus one 2x6 object with a +3 upper y clearance in a
/// 10x10 region; violates the margin hypothesis at (2,1,y).
pub fn oversized_margin_pair() -> RppInstance {
    use crate::rint;
    let mut obj2 = RppObject::plain(rint(2), rint(6));
    obj2.sigma.yp = rint(3);
    RppInstance::new(
        (rint(10), rint(10)),
        vec![RppObject::plain(rint(2), rint(2)), obj2],
    )
}
