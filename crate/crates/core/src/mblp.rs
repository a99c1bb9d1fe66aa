//! Mixed-binary linear feasibility systems: `A [x; y] >= / = b` with the
//! binary block trailing, bound folding into the body, residual and
//! tightness evaluation, and the integrality penalty.

use crate::linalg::dot;
use crate::{rat_serde, Rat, RatVector};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    /// `coeffs . v >= rhs`
    #[serde(rename = ">=")]
    Ge,
    /// `coeffs . v = rhs`
    #[serde(rename = "=")]
    Eq,
}

/// Identifies a row within a model: a constraint family (e.g. `SU:lb`,
/// `bound`) plus the realization it applies to (e.g. `12x`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstraintTag {
    pub family: String,
    pub realization: String,
}

impl ConstraintTag {
    pub fn new(family: impl Into<String>, realization: impl Into<String>) -> Self {
        ConstraintTag {
            family: family.into(),
            realization: realization.into(),
        }
    }
}

impl fmt::Display for ConstraintTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.realization.is_empty() {
            write!(f, "{}", self.family)
        } else {
            write!(f, "{}^{}", self.family, self.realization)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRow {
    #[serde(with = "rat_serde::vec")]
    pub coeffs: RatVector,
    #[serde(with = "rat_serde")]
    pub rhs: Rat,
    pub sense: Sense,
    pub tag: ConstraintTag,
}

impl ConstraintRow {
    pub fn ge(coeffs: RatVector, rhs: Rat, tag: ConstraintTag) -> Self {
        ConstraintRow {
            coeffs,
            rhs,
            sense: Sense::Ge,
            tag,
        }
    }

    pub fn eq(coeffs: RatVector, rhs: Rat, tag: ConstraintTag) -> Self {
        ConstraintRow {
            coeffs,
            rhs,
            sense: Sense::Eq,
            tag,
        }
    }

    /// Builds a `<=` row, stored negated so one sense governs everything.
    pub fn le(coeffs: RatVector, rhs: Rat, tag: ConstraintTag) -> Self {
        ConstraintRow {
            coeffs: coeffs.into_iter().map(|c| -c).collect(),
            rhs: -rhs,
            sense: Sense::Ge,
            tag,
        }
    }
}

/// A mixed-binary linear feasibility system. Continuous variables occupy the
/// leading coordinates, binaries the trailing `n_b`; the `0 <= y <= 1` box is
/// implicit until `compose_relaxation` folds it into rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MblpModel {
    pub n_c: usize,
    pub n_b: usize,
    pub rows: Vec<ConstraintRow>,
    pub var_names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MblpError {
    #[error("point dimensions ({x}, {y}) do not match model ({n_c}, {n_b})")]
    DimensionMismatch { x: usize, y: usize, n_c: usize, n_b: usize },
    #[error("point is not feasible (row {tag} violated)")]
    InfeasiblePoint { tag: String },
    #[error("penalty argument {value} lies outside [0, 1]")]
    OutOfBox { value: String },
    #[error("duplicate constraint tag {tag}")]
    DuplicateTag { tag: String },
    #[error("row {tag} has width {got}, expected {want}")]
    BadRowWidth { tag: String, got: usize, want: usize },
}

impl MblpModel {
    pub fn new(n_c: usize, n_b: usize, var_names: Vec<String>) -> Self {
        assert_eq!(var_names.len(), n_c + n_b);
        MblpModel {
            n_c,
            n_b,
            rows: Vec::new(),
            var_names,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_c + self.n_b
    }

    pub fn push(&mut self, row: ConstraintRow) {
        self.rows.push(row);
    }

    pub fn find_row(&self, family: &str, realization: &str) -> Option<usize> {
        self.rows
            .iter()
            .position(|r| r.tag.family == family && r.tag.realization == realization)
    }

    /// Appends a continuous variable at the end of the continuous block,
    /// widening every existing row with a zero coefficient; returns its
    /// coordinate index.
    pub fn insert_continuous(&mut self, name: &str) -> usize {
        let at = self.n_c;
        for row in &mut self.rows {
            row.coeffs.insert(at, Rat::zero());
        }
        self.var_names.insert(at, name.to_string());
        self.n_c += 1;
        at
    }

    /// Checks widths and tag uniqueness.
    pub fn validate(&self) -> Result<(), MblpError> {
        let mut seen = BTreeSet::new();
        for r in &self.rows {
            if r.coeffs.len() != self.dim() {
                return Err(MblpError::BadRowWidth {
                    tag: r.tag.to_string(),
                    got: r.coeffs.len(),
                    want: self.dim(),
                });
            }
            if !seen.insert(r.tag.clone()) {
                return Err(MblpError::DuplicateTag {
                    tag: r.tag.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundSide {
    #[serde(rename = "lower")]
    Lower,
    #[serde(rename = "upper")]
    Upper,
}

/// A binary box bound omitted from the relaxation because a body row
/// dominates it over the box of the remaining binaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedBound {
    pub var: String,
    pub side: BoundSide,
    pub dominated_by: ConstraintTag,
}

/// A model with integrality dropped and the non-redundant binary box bounds
/// folded into the rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Relaxation {
    pub model: MblpModel,
    pub dropped_bounds: Vec<DroppedBound>,
    pub equality_count: usize,
}

impl Relaxation {
    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn rows(&self) -> &[ConstraintRow] {
        &self.model.rows
    }
}

/// Checks whether `row` alone, over the still-present box bounds of the
/// other binaries, implies the requested bound on binary `b` (an index
/// into the y-block). Rows touching any continuous variable never qualify;
/// a needed box side that was already dropped makes the sum unbounded and
/// the check fail.
fn row_dominates(
    model: &MblpModel,
    row: &ConstraintRow,
    b: usize,
    side: BoundSide,
    has_lower: &[bool],
    has_upper: &[bool],
) -> bool {
    let bi = model.n_c + b;
    let a_i = &row.coeffs[bi];
    if a_i.is_zero() {
        return false;
    }
    if row.coeffs[..model.n_c].iter().any(|c| !c.is_zero()) {
        return false;
    }
    let zero = Rat::zero();
    // Range of sum a_j y_j over the other binaries' remaining boxes;
    // `None` means unbounded on that side.
    let mut lo = Some(Rat::zero());
    let mut hi = Some(Rat::zero());
    for (j, c) in row.coeffs[model.n_c..].iter().enumerate() {
        if j == b || c.is_zero() {
            continue;
        }
        if *c > zero {
            hi = match (hi, has_upper[j]) {
                (Some(v), true) => Some(v + c),
                _ => None,
            };
            if !has_lower[j] {
                lo = None;
            }
        } else {
            if !has_lower[j] {
                hi = None;
            }
            lo = match (lo, has_upper[j]) {
                (Some(v), true) => Some(v + c),
                _ => None,
            };
        }
    }
    let implied = |worst: Option<Rat>| worst.map(|w| (row.rhs.clone() - w) / a_i.clone());
    match (row.sense, side) {
        (Sense::Ge, BoundSide::Lower) => {
            *a_i > zero && implied(hi).is_some_and(|v| v >= zero)
        }
        (Sense::Ge, BoundSide::Upper) => {
            *a_i < zero && implied(hi).is_some_and(|v| v <= Rat::one())
        }
        (Sense::Eq, BoundSide::Lower) => {
            let worst = if *a_i > zero { hi } else { lo };
            implied(worst).is_some_and(|v| v >= zero)
        }
        (Sense::Eq, BoundSide::Upper) => {
            let worst = if *a_i > zero { lo } else { hi };
            implied(worst).is_some_and(|v| v <= Rat::one())
        }
    }
}

/// Folds the binary box bounds into the body. A `0 <= y_i` or `y_i <= 1`
/// row is appended unless a single body row dominates it symbolically over
/// the box bounds still in force; removals are sequential (all uppers,
/// then all lowers), so each drop preserves the feasible set exactly.
/// Dropped bounds record the dominating row; equality rows keep their
/// sense.
pub fn compose_relaxation(m: &MblpModel) -> Relaxation {
    m.validate().expect("well-formed model");
    let mut relaxed = m.clone();
    let mut dropped = Vec::new();
    let equality_count = m.rows.iter().filter(|r| r.sense == Sense::Eq).count();
    let mut has_lower = vec![true; m.n_b];
    let mut has_upper = vec![true; m.n_b];
    for side in [BoundSide::Upper, BoundSide::Lower] {
        for b in 0..m.n_b {
            let dominating = m
                .rows
                .iter()
                .find(|r| row_dominates(m, r, b, side, &has_lower, &has_upper));
            if let Some(r) = dominating {
                dropped.push(DroppedBound {
                    var: m.var_names[m.n_c + b].clone(),
                    side,
                    dominated_by: r.tag.clone(),
                });
                match side {
                    BoundSide::Lower => has_lower[b] = false,
                    BoundSide::Upper => has_upper[b] = false,
                }
            }
        }
    }
    for b in 0..m.n_b {
        let name = &m.var_names[m.n_c + b];
        for (side, present) in [(BoundSide::Lower, has_lower[b]), (BoundSide::Upper, has_upper[b])]
        {
            if !present {
                continue;
            }
            let mut coeffs = vec![Rat::zero(); m.dim()];
            let (val, rhs, suffix) = match side {
                BoundSide::Lower => (Rat::one(), Rat::zero(), "lo"),
                BoundSide::Upper => (-Rat::one(), -Rat::one(), "up"),
            };
            coeffs[m.n_c + b] = val;
            relaxed.push(ConstraintRow::ge(
                coeffs,
                rhs,
                ConstraintTag::new("bound", format!("{name}.{suffix}")),
            ));
        }
    }
    dropped.sort_by(|a, b| (&a.var, a.side == BoundSide::Upper).cmp(&(&b.var, b.side == BoundSide::Upper)));
    Relaxation {
        model: relaxed,
        dropped_bounds: dropped,
        equality_count,
    }
}

/// A candidate point split into its continuous and binary parts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    #[serde(with = "rat_serde::vec")]
    pub x: RatVector,
    #[serde(with = "rat_serde::vec")]
    pub y: RatVector,
}

impl Point {
    pub fn new(x: RatVector, y: RatVector) -> Self {
        Point { x, y }
    }

    pub fn from_coords(coords: &[Rat], n_c: usize) -> Self {
        Point {
            x: coords[..n_c].to_vec(),
            y: coords[n_c..].to_vec(),
        }
    }

    pub fn coords(&self) -> RatVector {
        let mut v = self.x.clone();
        v.extend(self.y.iter().cloned());
        v
    }
}

/// Row-wise `A' p - b'`; the point is feasible iff every `>=` residual is
/// nonnegative and every `=` residual is zero.
pub fn residuals(r: &Relaxation, p: &Point) -> Result<RatVector, MblpError> {
    if p.x.len() != r.model.n_c || p.y.len() != r.model.n_b {
        return Err(MblpError::DimensionMismatch {
            x: p.x.len(),
            y: p.y.len(),
            n_c: r.model.n_c,
            n_b: r.model.n_b,
        });
    }
    let coords = p.coords();
    Ok(r.rows()
        .iter()
        .map(|row| dot(&row.coeffs, &coords) - row.rhs.clone())
        .collect())
}

pub fn is_feasible(r: &Relaxation, p: &Point) -> Result<bool, MblpError> {
    let res = residuals(r, p)?;
    Ok(r.rows().iter().zip(&res).all(|(row, v)| match row.sense {
        Sense::Ge => !v.is_negative(),
        Sense::Eq => v.is_zero(),
    }))
}

/// Indices of rows tight at a feasible point (equalities always included).
pub fn tight_rows(r: &Relaxation, p: &Point) -> Result<Vec<usize>, MblpError> {
    let res = residuals(r, p)?;
    for (row, v) in r.rows().iter().zip(&res) {
        let bad = match row.sense {
            Sense::Ge => v.is_negative(),
            Sense::Eq => !v.is_zero(),
        };
        if bad {
            return Err(MblpError::InfeasiblePoint {
                tag: row.tag.to_string(),
            });
        }
    }
    Ok(res
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_zero())
        .map(|(i, _)| i)
        .collect())
}

/// Integrality penalty `phi(y) = 1 - |2y - 1|`; zero exactly on {0, 1}.
pub fn phi(y: &Rat) -> Result<Rat, MblpError> {
    if y.is_negative() || *y > Rat::one() {
        return Err(MblpError::OutOfBox {
            value: crate::rat_to_string(y),
        });
    }
    let two = Rat::from_integer(2.into());
    Ok(Rat::one() - (two * y.clone() - Rat::one()).abs())
}

/// `Phi(y) = sum phi(y_i)`; zero iff the whole vector is binary.
pub fn phi_sum(ys: &[Rat]) -> Result<Rat, MblpError> {
    let mut acc = Rat::zero();
    for y in ys {
        acc += phi(y)?;
    }
    Ok(acc)
}

use num_traits::Signed;
