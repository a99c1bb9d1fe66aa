//! Exhaustive extreme-point enumeration: every full-rank n-subset of tight
//! rows is visited through an incrementally eliminated recursion, solved
//! exactly, and kept when feasible to all rows. Idealness is decided from
//! the enumerated vertex set.

use crate::mblp::{compose_relaxation, phi_sum, tight_rows, MblpModel, Point, Relaxation, Sense};
use crate::{Rat, RatVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct EnumerateOptions {
    /// Refuse instances with more than this many variables.
    pub dim_cap: usize,
    /// Refuse relaxations with more than this many rows.
    pub row_cap: usize,
    /// Worker count; the report is identical for any value.
    pub threads: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            dim_cap: 12,
            row_cap: 40,
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnumError {
    #[error("dimension {dim} exceeds the enumeration cap {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error("relaxation has {rows} rows, above the enumeration cap {cap}")]
    RowCapExceeded { rows: usize, cap: usize },
}

/// An extreme point with fractional binary coordinates, certified by a
/// full-rank tight subset.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalWitness {
    pub point: Point,
    /// Row indices of a tight subset of size `n_c + n_b`.
    pub tight_subset: Vec<usize>,
    /// Verified rank of that subset (always the full dimension).
    pub rank_certificate: usize,
    pub phi_value: Rat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexReport {
    pub vertices: Vec<Point>,
    pub fractional: Vec<FractionalWitness>,
    pub subsets_examined: u128,
    pub subsets_rank_deficient: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IdealVerdict {
    Ideal,
    NotIdeal(FractionalWitness),
}

/// The witness interchange document: the point split into its continuous
/// and binary parts, the tags of the certifying tight subset, and the
/// penalty value, all exact.
pub fn witness_json(w: &FractionalWitness, relax: &Relaxation) -> String {
    #[derive(serde::Serialize)]
    struct WitnessDoc<'a> {
        point: &'a Point,
        tight: Vec<String>,
        phi: String,
    }
    let doc = WitnessDoc {
        point: &w.point,
        tight: w
            .tight_subset
            .iter()
            .map(|&i| relax.rows()[i].tag.to_string())
            .collect(),
        phi: crate::rat_to_string(&w.phi_value),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("witness serializes");
    s.push('\n');
    s
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

fn exact_div(num: BigInt, den: &BigInt) -> BigInt {
    debug_assert!(
        (&num % den).is_zero(),
        "fraction-free division must be exact"
    );
    num / den
}

/// Incremental fraction-free row echelon over integer augmented rows
/// (coefficients + rhs). An incoming row passes through the Bareiss
/// cross-multiplication steps of all pushed rows in order, dividing by the
/// previous pivot, which is exact and keeps entries at minor size. A row
/// whose coefficient part vanishes is dependent and rejected.
struct Echelon {
    n: usize,
    // (pivot column, transformed augmented row)
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl Echelon {
    fn new(n: usize) -> Self {
        Echelon { n, rows: Vec::new() }
    }

    fn transform(&self, row: &[BigInt]) -> Vec<BigInt> {
        let mut r = row.to_vec();
        let mut prev = BigInt::one();
        for (p, e) in &self.rows {
            let q = &e[*p];
            let f = r[*p].clone();
            for (rj, ej) in r.iter_mut().zip(e) {
                let v = exact_div(q * &*rj - &f * ej, &prev);
                *rj = v;
            }
            debug_assert!(r[*p].is_zero());
            prev = q.clone();
        }
        r
    }

    /// Pushes a row; `false` when its coefficients are dependent on the
    /// current rows (the row is not added).
    fn push(&mut self, row: &[BigInt]) -> bool {
        let r = self.transform(row);
        match r[..self.n].iter().position(|v| !v.is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }

    fn pop(&mut self) {
        self.rows.pop();
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// Solves the square system once `n` pivots are present, returning the
    /// solution as integer numerators over one positive denominator. Each
    /// row has zeros in all earlier pivot columns, so reverse order
    /// substitutes.
    fn solve(&self) -> (Vec<BigInt>, BigInt) {
        debug_assert_eq!(self.rows.len(), self.n);
        let mut nums = vec![BigInt::zero(); self.n];
        let mut den = BigInt::one();
        let mut known = vec![false; self.n];
        for (p, row) in self.rows.iter().rev() {
            // x_p = (rhs - sum_j row_j x_j) / row_p with x_j = nums_j / den
            let mut acc = &row[self.n] * &den;
            for j in 0..self.n {
                if j != *p && known[j] && !row[j].is_zero() {
                    acc -= &row[j] * &nums[j];
                }
            }
            let pivot = &row[*p];
            for (j, v) in nums.iter_mut().enumerate() {
                if known[j] {
                    *v = &*v * pivot;
                }
            }
            nums[*p] = acc;
            den *= pivot;
            known[*p] = true;
        }
        if den.is_negative() {
            for v in nums.iter_mut() {
                *v = -&*v;
            }
            den = -den;
        }
        (nums, den)
    }
}

struct RowData {
    /// Rows scaled to integers (positive factor), width n + 1.
    aug: Vec<Vec<BigInt>>,
    senses: Vec<Sense>,
}

impl RowData {
    fn from_relaxation(r: &Relaxation) -> Self {
        let mut aug = Vec::with_capacity(r.rows().len());
        let mut senses = Vec::with_capacity(r.rows().len());
        for row in r.rows() {
            let mut scale = BigInt::one();
            for c in row.coeffs.iter().chain([&row.rhs]) {
                scale = scale.lcm(c.denom());
            }
            let s = Rat::from_integer(scale);
            let ints: Vec<BigInt> = row
                .coeffs
                .iter()
                .chain([&row.rhs])
                .map(|c| (c * &s).to_integer())
                .collect();
            aug.push(ints);
            senses.push(row.sense);
        }
        RowData { aug, senses }
    }
}

/// Exact feasibility of x = nums/den (den > 0) against every row, with
/// integer arithmetic only and an early exit on the first violation.
fn feasible_ints(data: &RowData, nums: &[BigInt], den: &BigInt) -> bool {
    let n = nums.len();
    for (aug, sense) in data.aug.iter().zip(&data.senses) {
        let mut acc = -(&aug[n] * den);
        for j in 0..n {
            if !aug[j].is_zero() {
                acc += &aug[j] * &nums[j];
            }
        }
        let ok = match sense {
            Sense::Ge => !acc.is_negative(),
            Sense::Eq => acc.is_zero(),
        };
        if !ok {
            return false;
        }
    }
    true
}

struct WorkerOut {
    // (chosen inequality positions, solution numerators, denominator)
    candidates: Vec<(Vec<usize>, Vec<BigInt>, BigInt)>,
    rank_deficient: u128,
}

fn run_range(
    data: &RowData,
    base: &Echelon,
    ineq_pos: &[usize],
    need: usize,
    top_range: std::ops::Range<usize>,
) -> WorkerOut {
    let mut out = WorkerOut {
        candidates: Vec::new(),
        rank_deficient: 0,
    };
    if need == 0 {
        // purely equality-determined; handled by the caller once
        return out;
    }
    let mut echelon = Echelon {
        n: base.n,
        rows: base.rows.clone(),
    };
    let mut chosen: Vec<usize> = Vec::with_capacity(need);

    fn recurse(
        data: &RowData,
        ineq_pos: &[usize],
        need: usize,
        start: usize,
        echelon: &mut Echelon,
        chosen: &mut Vec<usize>,
        out: &mut WorkerOut,
        limit: Option<usize>,
    ) {
        let depth = chosen.len();
        let slots = need - depth;
        let last = match limit {
            Some(l) => l,
            None => ineq_pos.len(),
        };
        for p in start..last {
            if ineq_pos.len() - p < slots {
                break;
            }
            if !echelon.push(&data.aug[ineq_pos[p]]) {
                // every completion of this prefix through row p is singular
                out.rank_deficient += binomial(ineq_pos.len() - p - 1, slots - 1);
                continue;
            }
            chosen.push(p);
            if chosen.len() == need {
                let (nums, den) = echelon.solve();
                if feasible_ints(data, &nums, &den) {
                    out.candidates.push((chosen.clone(), nums, den));
                }
            } else {
                recurse(data, ineq_pos, need, p + 1, echelon, chosen, out, None);
            }
            chosen.pop();
            echelon.pop();
        }
    }

    // the worker owns the top-level choices in `top_range`; deeper levels are
    // unrestricted
    for p in top_range {
        recurse(
            data,
            ineq_pos,
            need,
            p,
            &mut echelon,
            &mut chosen,
            &mut out,
            Some(p + 1),
        );
    }
    out
}

/// Enumerates all extreme points of the relaxation: every size-n subset of
/// rows containing the (independent) equality rows is examined, full-rank
/// subsets are solved exactly, and solutions feasible to all rows are kept.
/// Points are deduplicated by exact coordinates; the report is identical
/// for any worker count.
pub fn enumerate_extreme_points(
    r: &Relaxation,
    opts: &EnumerateOptions,
) -> Result<VertexReport, EnumError> {
    let n = r.dim();
    if n > opts.dim_cap {
        return Err(EnumError::DimensionCapExceeded {
            dim: n,
            cap: opts.dim_cap,
        });
    }
    if r.rows().len() > opts.row_cap {
        return Err(EnumError::RowCapExceeded {
            rows: r.rows().len(),
            cap: opts.row_cap,
        });
    }
    let rows = r.rows();
    let data = RowData::from_relaxation(r);

    // force the equality rows in; redundant (consistent) equalities are
    // skipped, an inconsistent one empties the feasible set
    let mut base = Echelon::new(n);
    let mut forced: Vec<usize> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if row.sense != Sense::Eq {
            continue;
        }
        if base.push(&data.aug[i]) {
            forced.push(i);
        } else {
            let reduced = base.transform(&data.aug[i]);
            if !reduced[n].is_zero() {
                return Ok(VertexReport {
                    vertices: Vec::new(),
                    fractional: Vec::new(),
                    subsets_examined: 0,
                    subsets_rank_deficient: 0,
                });
            }
        }
    }
    let ineq_pos: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].sense == Sense::Ge)
        .collect();
    let need = n - base.len();
    let subsets_examined = binomial(ineq_pos.len(), need);

    let mut outs: Vec<WorkerOut> = Vec::new();
    if need == 0 {
        // the equalities alone pin the point
        let (nums, den) = base.solve();
        let mut out = WorkerOut {
            candidates: Vec::new(),
            rank_deficient: 0,
        };
        if feasible_ints(&data, &nums, &den) {
            out.candidates.push((Vec::new(), nums, den));
        }
        outs.push(out);
    } else {
        let threads = opts.threads.max(1).min(ineq_pos.len().max(1));
        if threads <= 1 {
            outs.push(run_range(&data, &base, &ineq_pos, need, 0..ineq_pos.len()));
        } else {
            let chunk = ineq_pos.len().div_ceil(threads);
            let ranges: Vec<std::ops::Range<usize>> = (0..threads)
                .map(|t| (t * chunk).min(ineq_pos.len())..((t + 1) * chunk).min(ineq_pos.len()))
                .collect();
            outs = std::thread::scope(|scope| {
                let handles: Vec<_> = ranges
                    .into_iter()
                    .map(|range| {
                        let data = &data;
                        let base = &base;
                        let ineq_pos = &ineq_pos;
                        scope.spawn(move || run_range(data, base, ineq_pos, need, range))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            });
        }
    }

    let mut rank_deficient: u128 = 0;
    let mut candidates: Vec<(Vec<usize>, Vec<BigInt>, BigInt)> = Vec::new();
    for out in outs {
        rank_deficient += out.rank_deficient;
        candidates.extend(out.candidates);
    }
    // restore the global lexicographic subset order irrespective of how the
    // work was split, then keep the first witnessing subset per point
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    let mut dedup: BTreeMap<RatVector, Vec<usize>> = BTreeMap::new();
    for (chosen, nums, den) in candidates {
        let coords: RatVector = nums
            .into_iter()
            .map(|v| Rat::new(v, den.clone()))
            .collect();
        dedup.entry(coords).or_insert_with(|| {
            let mut subset: Vec<usize> = forced.clone();
            subset.extend(chosen.iter().map(|&p| ineq_pos[p]));
            subset.sort_unstable();
            subset
        });
    }

    let n_c = r.model.n_c;
    let mut vertices = Vec::new();
    let mut fractional = Vec::new();
    for (coords, subset) in &dedup {
        let point = Point::from_coords(coords, n_c);
        let phi = phi_sum(&point.y).expect("feasible point is inside the box");
        if phi.is_positive() {
            fractional.push(FractionalWitness {
                point: point.clone(),
                tight_subset: subset.clone(),
                rank_certificate: n,
                phi_value: phi,
            });
        }
        vertices.push(point);
    }
    Ok(VertexReport {
        vertices,
        fractional,
        subsets_examined,
        subsets_rank_deficient: rank_deficient,
    })
}

/// Largest integrality penalty over all extreme points; zero exactly when
/// the formulation is ideal.
pub fn max_phi_over_vertices(r: &Relaxation, opts: &EnumerateOptions) -> Result<Rat, EnumError> {
    let report = enumerate_extreme_points(r, opts)?;
    Ok(report
        .fractional
        .iter()
        .map(|w| w.phi_value.clone())
        .max()
        .unwrap_or_else(Rat::zero))
}

/// Certifies or refutes idealness by enumeration. The returned witness
/// maximizes the penalty, breaking ties by the larger tight-row count and
/// then the lexicographically greatest point, which pins the reported
/// counterexamples deterministically.
pub fn check_ideal(m: &MblpModel, opts: &EnumerateOptions) -> Result<IdealVerdict, EnumError> {
    let relax = compose_relaxation(m);
    let report = enumerate_extreme_points(&relax, opts)?;
    if report.fractional.is_empty() {
        return Ok(IdealVerdict::Ideal);
    }
    let mut best: Option<(Rat, usize, Point, FractionalWitness)> = None;
    for w in &report.fractional {
        let tight = tight_rows(&relax, &w.point)
            .expect("witness is feasible")
            .len();
        let key = (w.phi_value.clone(), tight, w.point.clone());
        let better = match &best {
            None => true,
            Some((phi, t, pt, _)) => {
                (key.0.clone(), key.1, &key.2) > (phi.clone(), *t, pt)
            }
        };
        if better {
            best = Some((key.0, key.1, key.2, w.clone()));
        }
    }
    Ok(IdealVerdict::NotIdeal(best.unwrap().3))
}
