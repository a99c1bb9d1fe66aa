//! Minimal linearly dependent row subsets (circuits) of an augmented
//! matrix, found by increasing-cardinality brute force. The smallest
//! circuit cardinality is the spark of the transposed matrix.

use crate::linalg::primitive_multipliers;
use crate::{Rat, RatMatrix};
use num_traits::Zero;

/// A minimal dependent row subset with exact combining multipliers: the
/// multipliers are nonzero on every cited row and combine the rows (with
/// their right-hand sides) to the zero row.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub rows: Vec<usize>,
    pub multipliers: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("matrix has {rows} rows, above the circuit-search cap {cap}")]
pub struct RowCapExceeded {
    pub rows: usize,
    pub cap: usize,
}

#[derive(Debug, Clone)]
pub struct SparkOptions {
    pub row_cap: usize,
}

impl Default for SparkOptions {
    fn default() -> Self {
        SparkOptions { row_cap: 24 }
    }
}

fn submatrix(t: &RatMatrix, rows: &[usize]) -> RatMatrix {
    RatMatrix::from_rows(rows.iter().map(|&i| t.row(i).to_vec()).collect())
}

/// All circuits of the rows of `t`, in increasing cardinality and then
/// lexicographic order; empty iff the rows are independent. The minimum
/// cardinality over the result is the spark.
pub fn spark_circuits(t: &RatMatrix, opts: &SparkOptions) -> Result<Vec<Circuit>, RowCapExceeded> {
    let m = t.nrows();
    if m > opts.row_cap {
        return Err(RowCapExceeded {
            rows: m,
            cap: opts.row_cap,
        });
    }
    let mut circuits: Vec<Circuit> = Vec::new();
    let mut subset: Vec<usize> = Vec::new();
    // a zero row is a circuit of size one
    for i in 0..m {
        if t.row(i).iter().all(|v| v.is_zero()) {
            circuits.push(Circuit {
                rows: vec![i],
                multipliers: vec![Rat::from_integer(1.into())],
            });
        }
    }
    for k in 2..=m {
        subset.clear();
        enumerate_subsets(t, m, k, 0, &mut subset, &mut circuits);
    }
    Ok(circuits)
}

fn enumerate_subsets(
    t: &RatMatrix,
    m: usize,
    k: usize,
    start: usize,
    subset: &mut Vec<usize>,
    circuits: &mut Vec<Circuit>,
) {
    if subset.len() == k {
        // supersets of a known circuit are not minimal
        if circuits
            .iter()
            .any(|c| c.rows.iter().all(|r| subset.contains(r)))
        {
            return;
        }
        let sub = submatrix(t, subset);
        let basis = sub.left_nullspace();
        if basis.len() == 1 && basis[0].iter().all(|v| !v.is_zero()) {
            circuits.push(Circuit {
                rows: subset.clone(),
                multipliers: primitive_multipliers(&basis[0]),
            });
        }
        return;
    }
    for i in start..m {
        if m - i < k - subset.len() {
            break;
        }
        subset.push(i);
        enumerate_subsets(t, m, k, i + 1, subset, circuits);
        subset.pop();
    }
}

/// Minimum circuit cardinality; `None` when the rows are independent.
pub fn spark(circuits: &[Circuit]) -> Option<usize> {
    circuits.iter().map(|c| c.rows.len()).min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, Matrix};
    use crate::rint;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| rint(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn triangle_has_one_circuit() {
        let t = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let circuits = spark_circuits(&t, &SparkOptions::default()).unwrap();
        assert_eq!(circuits.len(), 1);
        assert_eq!(circuits[0].rows, vec![0, 1, 2]);
        assert_eq!(spark(&circuits), Some(3));
        assert_eq!(
            circuits[0].multipliers,
            vec![rint(1), rint(1), rint(-1)]
        );
    }

    #[test]
    fn independent_rows_have_no_circuits() {
        let t = m(&[&[1, 0, 0], &[0, 1, 0]]);
        let circuits = spark_circuits(&t, &SparkOptions::default()).unwrap();
        assert!(circuits.is_empty());
        assert_eq!(spark(&circuits), None);
    }

    #[test]
    fn parallel_rows_are_a_two_circuit() {
        let t = m(&[&[1, 2], &[2, 4], &[0, 1]]);
        let circuits = spark_circuits(&t, &SparkOptions::default()).unwrap();
        assert_eq!(spark(&circuits), Some(2));
        assert_eq!(circuits[0].rows, vec![0, 1]);
    }

    #[test]
    fn multipliers_combine_rows_to_zero_and_are_minimal() {
        let t = m(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, -1], &[2, 2, 0]]);
        let circuits = spark_circuits(&t, &SparkOptions::default()).unwrap();
        assert!(!circuits.is_empty());
        for c in &circuits {
            for j in 0..t.ncols() {
                let col: Vec<_> = c.rows.iter().map(|&i| t[(i, j)].clone()).collect();
                assert!(dot(&c.multipliers, &col).is_zero());
            }
            // removing any row leaves an independent set
            let sub = submatrix(&t, &c.rows);
            for drop in 0..c.rows.len() {
                let rest: Vec<usize> = (0..c.rows.len()).filter(|&i| i != drop).collect();
                let rows: Vec<Vec<Rat>> = rest.iter().map(|&i| sub.row(i).to_vec()).collect();
                let rm = RatMatrix::from_rows(rows);
                assert_eq!(rm.rank(), rm.nrows());
            }
        }
    }

    #[test]
    fn dynamic_bound_rows_form_a_four_circuit_when_tight() {
        // the lb/ub/pm rows of one realization plus the indicator's lower
        // bound are minimally dependent as an augmented system
        use crate::formulations::{build, BuildOptions, FormulationKind, PairScope};
        use crate::mblp::compose_relaxation;
        let m = build(
            FormulationKind::Su,
            &crate::rpp::pair_2x2_10x10(),
            PairScope::All,
            &BuildOptions::default(),
        )
        .unwrap();
        let relax = compose_relaxation(&m);
        let picks: Vec<usize> = vec![
            relax.model.find_row("SU:lb", "12x").unwrap(),
            relax.model.find_row("SU:ub", "12x").unwrap(),
            relax.model.find_row("SU:pm", "12x").unwrap(),
            relax.model.find_row("bound", "d12x.lo").unwrap(),
        ];
        let rows: Vec<Vec<Rat>> = picks
            .iter()
            .map(|&i| {
                let r = &relax.model.rows[i];
                let mut v = r.coeffs.clone();
                v.push(r.rhs.clone());
                v
            })
            .collect();
        let t = RatMatrix::from_rows(rows);
        let circuits = spark_circuits(&t, &SparkOptions::default()).unwrap();
        assert_eq!(circuits.len(), 1);
        assert_eq!(circuits[0].rows, vec![0, 1, 2, 3]);
        assert_eq!(spark(&circuits), Some(4));
    }

    #[test]
    fn row_cap_enforced() {
        let rows: Vec<Vec<Rat>> = (0..25).map(|i| vec![rint(i)]).collect();
        let t = RatMatrix::from_rows(rows);
        assert!(spark_circuits(&t, &SparkOptions::default()).is_err());
    }
}
