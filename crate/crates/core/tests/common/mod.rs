//! Independent oracles shared by the integration suites. Everything here
//! deliberately avoids the library's elimination and enumeration paths:
//! determinants are Laplace expansions, systems are solved by Cramer's
//! rule, and optima come from explicit disjunct enumeration.

use num_traits::{One, Signed, Zero};
use packideal_core::mblp::{Relaxation, Sense};
use packideal_core::rpp::{derive_params, Dir, RppInstance, DIRS};
use packideal_core::{rat, Rat};
use std::collections::BTreeSet;

/// Laplace-expansion determinant; exponential, fine at oracle scale.
pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = Rat::zero();
    for (col, v) in m[0].iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rat>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = v.clone() * det(&minor);
        if col % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

fn cramer_solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let d = det(a);
    if d.is_zero() {
        return None;
    }
    let n = a.len();
    let mut x = Vec::with_capacity(n);
    for j in 0..n {
        let mut aj = a.to_vec();
        for i in 0..n {
            aj[i][j] = b[i].clone();
        }
        x.push(det(&aj) / d.clone());
    }
    Some(x)
}

/// Brute-force vertex finder: every size-n row subset containing all the
/// equality rows is solved by Cramer's rule and kept when the point
/// satisfies every row. Returns the sorted set of coordinate vectors.
pub fn brute_force_vertices(relax: &Relaxation) -> BTreeSet<Vec<Rat>> {
    let n = relax.dim();
    let rows = relax.rows();
    let eq: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].sense == Sense::Eq)
        .collect();
    let ineq: Vec<usize> = (0..rows.len())
        .filter(|&i| rows[i].sense == Sense::Ge)
        .collect();
    let mut verts = BTreeSet::new();
    if eq.len() > n {
        return verts;
    }
    let take = n - eq.len();
    let mut pick = vec![0usize; take];
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    fn combos(ineq: &[usize], take: usize, start: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pick.len() == take {
            out.push(pick.clone());
            return;
        }
        for i in start..ineq.len() {
            pick.push(ineq[i]);
            combos(ineq, take, i + 1, pick, out);
            pick.pop();
        }
    }
    pick.clear();
    combos(&ineq, take, 0, &mut pick, &mut subsets);
    for chosen in subsets {
        let mut idx = eq.clone();
        idx.extend(&chosen);
        let a: Vec<Vec<Rat>> = idx.iter().map(|&i| rows[i].coeffs.clone()).collect();
        let b: Vec<Rat> = idx.iter().map(|&i| rows[i].rhs.clone()).collect();
        let Some(x) = cramer_solve(&a, &b) else {
            continue;
        };
        let feasible = rows.iter().all(|row| {
            let lhs: Rat = row
                .coeffs
                .iter()
                .zip(&x)
                .map(|(c, v)| c.clone() * v.clone())
                .fold(Rat::zero(), |acc, t| acc + t);
            match row.sense {
                Sense::Ge => lhs >= row.rhs,
                Sense::Eq => lhs == row.rhs,
            }
        });
        if feasible {
            verts.insert(x);
        }
    }
    verts
}

/// Small deterministic generator for the oracle tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn small_rat(&mut self) -> Rat {
        let num = self.below(11) as i64 - 5;
        let den = self.below(3) as i64 + 1;
        rat(num, den)
    }
}

/// The strip-packing oracle: enumerate one precedence disjunct per pair,
/// push every y-center to its least feasible position, and take the best
/// height over the feasible selections. Exact, exponential in the pair
/// count.
pub fn spp_brute_force_optimum(inst: &RppInstance) -> Option<Rat> {
    let n = inst.len();
    let params = derive_params(inst);
    let mut pairs = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            pairs.push((i, j));
        }
    }
    let options: Vec<[(usize, usize, Dir); 4]> = pairs
        .iter()
        .map(|&(i, j)| {
            [
                (i, j, Dir::X),
                (j, i, Dir::X),
                (i, j, Dir::Y),
                (j, i, Dir::Y),
            ]
        })
        .collect();
    let mut best: Option<Rat> = None;
    let combos = 4usize.pow(pairs.len() as u32);
    for mask in 0..combos {
        let mut chosen = Vec::new();
        let mut m = mask;
        for opts in &options {
            chosen.push(opts[m % 4]);
            m /= 4;
        }
        // minimal center assignment per direction via fixpoint iteration on
        // the lower-bound edges; a run past n*m relaxations means a positive
        // cycle, i.e. infeasible
        let mut feasible = true;
        let mut height = Rat::zero();
        for s in DIRS {
            let mut c: Vec<Rat> = (1..=n).map(|i| params.lb(i, s).clone()).collect();
            let edges: Vec<&(usize, usize, Dir)> =
                chosen.iter().filter(|&&(_, _, d)| d == s).collect();
            let mut changed = true;
            let mut rounds = 0;
            while changed {
                changed = false;
                rounds += 1;
                if rounds > n * edges.len() + n + 1 {
                    feasible = false;
                    break;
                }
                for &&(k, l, _) in &edges {
                    let want = c[k - 1].clone() + params.p(k, l, s).clone();
                    if c[l - 1] < want {
                        c[l - 1] = want;
                        changed = true;
                    }
                }
            }
            if !feasible {
                break;
            }
            for i in 1..=n {
                if c[i - 1] > *params.ub(i, s) {
                    feasible = false;
                }
            }
            if !feasible {
                break;
            }
            if s == Dir::Y {
                for i in 1..=n {
                    let o = &inst.objects[i - 1];
                    let top =
                        c[i - 1].clone() + o.dy.clone() / rat(2, 1) + o.sigma.yp.clone();
                    if top > height {
                        height = top;
                    }
                }
            }
        }
        if feasible {
            best = match best {
                None => Some(height),
                Some(b) => Some(b.min(height)),
            };
        }
    }
    best
}

/// Minimal objective value of a model whose continuous part reduces to a
/// monotone lower-bound system plus upper bounds once the binaries (and
/// any named products of them) are substituted. Enumerates all binary
/// assignments; rows that become constant act as the logic filter.
pub fn restricted_min_objective(
    model: &packideal_core::MblpModel,
    objective_var: &str,
    pinned_products: &[(String, String, String)],
) -> Option<Rat> {
    let dim = model.dim();
    let n_c = model.n_c;
    let n_b = model.n_b;
    let name_idx = |n: &str| model.var_names.iter().position(|v| v == n).unwrap();
    let obj = name_idx(objective_var);
    let mut best: Option<Rat> = None;
    for mask in 0..(1u32 << n_b) {
        let mut fixed: Vec<Option<Rat>> = vec![None; dim];
        for b in 0..n_b {
            fixed[n_c + b] = Some(if (mask >> b) & 1 == 1 {
                Rat::one()
            } else {
                Rat::zero()
            });
        }
        for (prod, a, b) in pinned_products {
            let va = fixed[name_idx(a)].clone().unwrap();
            let vb = fixed[name_idx(b)].clone().unwrap();
            fixed[name_idx(prod)] = Some(va * vb);
        }
        // substituted rows over the remaining free (continuous) variables
        struct FreeRow {
            terms: Vec<(usize, Rat)>,
            rhs: Rat,
            eq: bool,
        }
        let mut rows: Vec<FreeRow> = Vec::new();
        let mut logic_ok = true;
        for row in &model.rows {
            let mut rhs = row.rhs.clone();
            let mut terms = Vec::new();
            for (j, cj) in row.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                match &fixed[j] {
                    Some(v) => rhs -= cj.clone() * v.clone(),
                    None => terms.push((j, cj.clone())),
                }
            }
            if terms.is_empty() {
                let ok = match row.sense {
                    Sense::Ge => rhs <= Rat::zero(),
                    Sense::Eq => rhs.is_zero(),
                };
                if !ok {
                    logic_ok = false;
                    break;
                }
            } else {
                rows.push(FreeRow {
                    terms,
                    rhs,
                    eq: row.sense == Sense::Eq,
                });
            }
        }
        if !logic_ok {
            continue;
        }
        let free: Vec<usize> = (0..dim).filter(|&j| fixed[j].is_none()).collect();
        // fixpoint on lower bounds: x_j >= (rhs - sum_{i != j} c_i x_i)/c_j
        // for the row's positive-coefficient variable; every row here has
        // the difference shape (at most one +1 and one -1 coefficient)
        let mut val: Vec<Option<Rat>> = vec![None; dim];
        for &j in &free {
            val[j] = Some(Rat::zero());
        }
        // initialize from singleton lower bounds to speed the fixpoint
        let mut changed = true;
        let mut rounds = 0usize;
        let mut feasible = true;
        while changed {
            changed = false;
            rounds += 1;
            if rounds > (free.len() + 1) * (rows.len() + 1) + 2 {
                feasible = false;
                break;
            }
            for row in &rows {
                for (pos, c) in &row.terms {
                    if c.is_positive() {
                        // x_pos >= (rhs - other terms) / c
                        let mut need = row.rhs.clone();
                        for (q, cq) in &row.terms {
                            if q != pos {
                                need -= cq.clone() * val[*q].clone().unwrap();
                            }
                        }
                        let need = need / c.clone();
                        let cur = val[*pos].clone().unwrap();
                        if cur < need {
                            val[*pos] = Some(need);
                            changed = true;
                        }
                    }
                }
            }
        }
        if !feasible {
            continue;
        }
        // check all rows (upper bounds and equalities included)
        let ok = rows.iter().all(|row| {
            let lhs: Rat = row
                .terms
                .iter()
                .map(|(q, cq)| cq.clone() * val[*q].clone().unwrap())
                .fold(Rat::zero(), |acc, t| acc + t);
            if row.eq {
                lhs == row.rhs
            } else {
                lhs >= row.rhs
            }
        });
        if !ok {
            continue;
        }
        let h = val[obj].clone().unwrap();
        best = match best {
            None => Some(h),
            Some(b) => Some(b.min(h)),
        };
    }
    best
}
