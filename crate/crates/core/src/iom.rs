//! Builders for the idealness-testing MILP (penalty maximization over
//! tight full-rank subsets) and the circuit-separation MILP, both exported
//! as fixed-data models for external solvers, plus the encoding-size big-M
//! bound.

use crate::export::{Objective, ObjectiveSense};
use crate::mblp::{compose_relaxation, ConstraintRow, ConstraintTag, MblpModel, Relaxation, Sense};
use crate::{Rat, RatMatrix};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// The tightness-selection MILP wrapping a relaxation: variables x, y, the
/// per-binary penalty phi, and one tightness indicator per inequality row.
#[derive(Debug, Clone)]
pub struct IomModel {
    pub inner: Relaxation,
    pub iom: MblpModel,
    pub objective: Objective,
    /// Relaxation row index each tightness indicator mirrors.
    pub eta_rows: Vec<usize>,
    /// Installed dependence covers (relaxation row index sets).
    pub covers: Vec<Vec<usize>>,
    pub big_m: Rat,
}

/// The circuit-separation MILP over a tight augmented system: multipliers
/// p with sign indicators mu (positive) and nu (negative).
#[derive(Debug, Clone)]
pub struct SeparationModel {
    pub milp: MblpModel,
    pub objective: Objective,
    pub big_m: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IomError {
    #[error("separation needs a non-empty tight set")]
    EmptyTightSet,
    #[error("cover refers to row {row}, but the relaxation has {rows} rows")]
    CoverOutOfRange { row: usize, rows: usize },
    #[error("big-M must be positive")]
    NonPositiveBigM,
}

/// Encoding-size bound on the infinity norm of any vertex of the system:
/// `2^(4 n^3 (n_c+n_b) ceil(log2(|A_max| + 2)))` with `n = n_c + n_b` and
/// `|A_max|` the largest coefficient magnitude, clamped to at least one.
/// Deliberately conservative; callers may override with a smaller value.
pub fn big_m_bound(m: &MblpModel) -> Rat {
    let mut a_max = Rat::one();
    for row in &m.rows {
        for c in &row.coeffs {
            let v = c.abs();
            if v > a_max {
                a_max = v;
            }
        }
    }
    let n = m.dim() as u64;
    let exponent = 4 * n.pow(3) * n * u64::from(ceil_log2(&(a_max + Rat::from_integer(2.into()))));
    Rat::from_integer(BigInt::one() << usize::try_from(exponent).expect("exponent fits"))
}

/// Smallest k with 2^k >= q (q positive).
fn ceil_log2(q: &Rat) -> u32 {
    let mut k = 0u32;
    let mut pow = Rat::one();
    while pow < *q {
        pow *= Rat::from_integer(2.into());
        k += 1;
    }
    k
}

/// Builds the full tightness-selection MILP over the relaxation of `m`:
/// penalty rows, feasibility rows, big-M tightness mirrors for every
/// inequality, the tight-count equality with the equality rows discarded
/// from the mirror but subtracted from its right side, and one row per
/// dependence cover with an exactly computed rank bound.
pub fn build_iom(
    m: &MblpModel,
    covers: &[Vec<usize>],
    big_m: Rat,
) -> Result<IomModel, IomError> {
    if !big_m.is_positive() {
        return Err(IomError::NonPositiveBigM);
    }
    let relax = compose_relaxation(m);
    let rows = relax.rows();
    for cover in covers {
        for &r in cover {
            if r >= rows.len() {
                return Err(IomError::CoverOutOfRange {
                    row: r,
                    rows: rows.len(),
                });
            }
        }
    }
    let n_c = relax.model.n_c;
    let n_b = relax.model.n_b;
    let eta_rows: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].sense == Sense::Ge)
        .collect();
    let k = eta_rows.len();
    // variable order: x, y, phi (continuous), then the eta binaries
    let iom_nc = n_c + n_b + n_b;
    let mut names = relax.model.var_names.clone();
    for b in 0..n_b {
        names.push(format!("phi_{}", relax.model.var_names[n_c + b]));
    }
    for &r in &eta_rows {
        names.push(format!("eta{r}"));
    }
    let mut iom = MblpModel::new(iom_nc, k, names);
    let dim = iom.dim();
    let phi_idx = |b: usize| n_c + n_b + b;
    let eta_idx: std::collections::BTreeMap<usize, usize> = eta_rows
        .iter()
        .enumerate()
        .map(|(pos, &r)| (r, iom_nc + pos))
        .collect();

    for b in 0..n_b {
        let yname = relax.model.var_names[n_c + b].clone();
        let mut row = vec![Rat::zero(); dim];
        row[phi_idx(b)] = Rat::one();
        row[n_c + b] = -Rat::from_integer(2.into());
        iom.push(ConstraintRow::le(
            row,
            Rat::zero(),
            ConstraintTag::new("IOM:pen0", yname.clone()),
        ));
        let mut row = vec![Rat::zero(); dim];
        row[phi_idx(b)] = Rat::one();
        row[n_c + b] = Rat::from_integer(2.into());
        iom.push(ConstraintRow::le(
            row,
            Rat::from_integer(2.into()),
            ConstraintTag::new("IOM:pen1", yname),
        ));
    }
    for row in rows {
        let mut coeffs = row.coeffs.clone();
        coeffs.resize(dim, Rat::zero());
        let tagged = ConstraintTag::new("IOM:feas", row.tag.to_string());
        match row.sense {
            Sense::Ge => iom.push(ConstraintRow::ge(coeffs, row.rhs.clone(), tagged)),
            Sense::Eq => iom.push(ConstraintRow::eq(coeffs, row.rhs.clone(), tagged)),
        }
    }
    // tightness mirrors: a.v <= b + M(1 - eta); equalities are always tight
    // and stay out of the mirror
    for &r in &eta_rows {
        let row = &rows[r];
        let mut coeffs = row.coeffs.clone();
        coeffs.resize(dim, Rat::zero());
        coeffs[eta_idx[&r]] = big_m.clone();
        iom.push(ConstraintRow::le(
            coeffs,
            row.rhs.clone() + big_m.clone(),
            ConstraintTag::new("IOM:tight", row.tag.to_string()),
        ));
    }
    // sum eta = n_c + n_b minus the discarded equality count
    let mut coeffs = vec![Rat::zero(); dim];
    for &r in &eta_rows {
        coeffs[eta_idx[&r]] = Rat::one();
    }
    let rhs = Rat::from_integer(((n_c + n_b) as i64 - relax.equality_count as i64).into());
    iom.push(ConstraintRow::eq(
        coeffs,
        rhs,
        ConstraintTag::new("IOM:extrm", ""),
    ));
    // dependence covers: sum of the cover's indicators bounded by the exact
    // rank of its augmented rows; equality members count as always tight
    for (ci, cover) in covers.iter().enumerate() {
        let aug = RatMatrix::from_rows(
            cover
                .iter()
                .map(|&r| {
                    let mut v = rows[r].coeffs.clone();
                    v.push(rows[r].rhs.clone());
                    v
                })
                .collect(),
        );
        let rank = aug.rank();
        let mut coeffs = vec![Rat::zero(); dim];
        let mut eq_members = 0usize;
        for &r in cover {
            match eta_idx.get(&r) {
                Some(&idx) => coeffs[idx] = Rat::one(),
                None => eq_members += 1,
            }
        }
        iom.push(ConstraintRow::le(
            coeffs,
            Rat::from_integer((rank as i64 - eq_members as i64).into()),
            ConstraintTag::new("IOM:cover", format!("{ci}")),
        ));
    }
    iom.validate().expect("builder emits well-formed rows");
    let objective = Objective {
        sense: ObjectiveSense::Maximize,
        terms: (0..n_b)
            .map(|b| (iom.var_names[phi_idx(b)].clone(), Rat::one()))
            .collect(),
    };
    Ok(IomModel {
        inner: relax,
        iom,
        objective,
        eta_rows,
        covers: covers.to_vec(),
        big_m,
    })
}

/// Builds the separation MILP for a tight augmented system `(A_T | b_T)`:
/// minimize the number of signed multipliers subject to orthogonality to
/// every column and two-sided big-M activation rows.
pub fn build_separation(t_aug: &RatMatrix, big_m: Rat) -> Result<SeparationModel, IomError> {
    if t_aug.nrows() == 0 {
        return Err(IomError::EmptyTightSet);
    }
    if !big_m.is_positive() {
        return Err(IomError::NonPositiveBigM);
    }
    let t = t_aug.nrows();
    let cols = t_aug.ncols();
    let mut names: Vec<String> = (0..t).map(|i| format!("p{i}")).collect();
    names.extend((0..t).map(|i| format!("mu{i}")));
    names.extend((0..t).map(|i| format!("nu{i}")));
    let mut milp = MblpModel::new(t, 2 * t, names);
    let dim = milp.dim();
    for j in 0..cols {
        let mut coeffs = vec![Rat::zero(); dim];
        for i in 0..t {
            coeffs[i] = t_aug[(i, j)].clone();
        }
        milp.push(ConstraintRow::eq(
            coeffs,
            Rat::zero(),
            ConstraintTag::new("sep:orth", format!("{j}")),
        ));
    }
    let m1 = big_m.clone() + Rat::one();
    for i in 0..t {
        // p_i <= M mu_i
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[i] = Rat::one();
        coeffs[t + i] = -big_m.clone();
        milp.push(ConstraintRow::le(
            coeffs,
            Rat::zero(),
            ConstraintTag::new("sep:pos-up", format!("{i}")),
        ));
        // p_i >= (M+1) mu_i - M
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[i] = Rat::one();
        coeffs[t + i] = -m1.clone();
        milp.push(ConstraintRow::ge(
            coeffs,
            -big_m.clone(),
            ConstraintTag::new("sep:pos-lo", format!("{i}")),
        ));
        // p_i >= -M nu_i
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[i] = Rat::one();
        coeffs[2 * t + i] = big_m.clone();
        milp.push(ConstraintRow::ge(
            coeffs,
            Rat::zero(),
            ConstraintTag::new("sep:neg-lo", format!("{i}")),
        ));
        // p_i <= M - (M+1) nu_i
        let mut coeffs = vec![Rat::zero(); dim];
        coeffs[i] = Rat::one();
        coeffs[2 * t + i] = m1.clone();
        milp.push(ConstraintRow::le(
            coeffs,
            big_m.clone(),
            ConstraintTag::new("sep:neg-up", format!("{i}")),
        ));
    }
    milp.validate().expect("builder emits well-formed rows");
    let objective = Objective {
        sense: ObjectiveSense::Minimize,
        terms: (0..2 * t)
            .map(|b| (milp.var_names[t + b].clone(), Rat::one()))
            .collect(),
    };
    Ok(SeparationModel {
        milp,
        objective,
        big_m,
    })
}
