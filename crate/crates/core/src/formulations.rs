//! The six mixed-binary embeddings of the pairwise packing disjunction:
//! standard/refined/naive/hybrid unary and the two-binary linear and
//! multilinear (McCormick) formulations, plus sequence-pair cuts and
//! branching priorities.

use crate::mblp::{ConstraintRow, ConstraintTag, MblpModel};
use crate::rpp::{classify, derive_params, DerivedParams, Dir, RppError, RppInstance, DIRS};
use crate::selectors::{gray_code, PairRole};
use crate::Rat;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulationKind {
    /// Standard unary: one indicator per disjunct, one-hot.
    Su,
    /// Refined unary: three-state precedence rows.
    Ru,
    /// Naive unary: static center bounds and big-M precedence rows.
    Nu,
    /// Hybrid unary: refined rows plus the standard precedence family.
    Hu,
    /// Two binaries with the uniform Hamming selector projected out.
    Sbl,
    /// Two binaries with the multilinear selector, McCormick-linearized.
    Sbm,
}

impl FormulationKind {
    pub const ALL: [FormulationKind; 6] = [
        FormulationKind::Su,
        FormulationKind::Ru,
        FormulationKind::Nu,
        FormulationKind::Hu,
        FormulationKind::Sbl,
        FormulationKind::Sbm,
    ];

    pub fn is_unary(self) -> bool {
        matches!(
            self,
            FormulationKind::Su | FormulationKind::Ru | FormulationKind::Nu | FormulationKind::Hu
        )
    }

    pub fn prefix(self) -> &'static str {
        match self {
            FormulationKind::Su => "SU",
            FormulationKind::Ru => "RU",
            FormulationKind::Nu => "NU",
            FormulationKind::Hu => "HU",
            FormulationKind::Sbl | FormulationKind::Sbm => "SB",
        }
    }
}

impl fmt::Display for FormulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormulationKind::Su => "su",
            FormulationKind::Ru => "ru",
            FormulationKind::Nu => "nu",
            FormulationKind::Hu => "hu",
            FormulationKind::Sbl => "sbl",
            FormulationKind::Sbm => "sbm",
        };
        write!(f, "{s}")
    }
}

impl FromStr for FormulationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "su" => Ok(FormulationKind::Su),
            "ru" => Ok(FormulationKind::Ru),
            "nu" => Ok(FormulationKind::Nu),
            "hu" => Ok(FormulationKind::Hu),
            "sbl" | "sb-l" => Ok(FormulationKind::Sbl),
            "sbm" | "sb-m" => Ok(FormulationKind::Sbm),
            other => Err(format!(
                "unknown formulation {other:?} (expected su|ru|nu|hu|sbl|sbm)"
            )),
        }
    }
}

/// Which pairs of a (possibly larger) instance to model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairScope {
    All,
    /// A single pair, by 1-based object indices.
    Pair(usize, usize),
}

#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Build even when the instance is trivial (counterexample reproduction).
    pub force: bool,
    /// Override for the naive formulation's big-M (default `UB_ks - LB_ls`
    /// per realization, its smallest valid value).
    pub nu_big_m: Option<Rat>,
}

/// Variable layout of a model over the listed 1-based object indices:
/// x-centers, y-centers, McCormick auxiliaries (multilinear kind), then the
/// trailing binary block.
pub struct VarLayout {
    pub kind: FormulationKind,
    pub objects: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
    pub n_c: usize,
    pub n_b: usize,
    pub names: Vec<String>,
}

impl VarLayout {
    pub fn new(kind: FormulationKind, objects: Vec<usize>) -> Self {
        let n = objects.len();
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((objects[a], objects[b]));
            }
        }
        let n_c = 2 * n
            + if kind == FormulationKind::Sbm {
                pairs.len()
            } else {
                0
            };
        let n_b = pairs.len() * if kind.is_unary() { 4 } else { 2 };
        let mut names = Vec::with_capacity(n_c + n_b);
        for &i in &objects {
            names.push(format!("c{i}x"));
        }
        for &i in &objects {
            names.push(format!("c{i}y"));
        }
        if kind == FormulationKind::Sbm {
            for &(i, j) in &pairs {
                names.push(format!("D{i}{j}"));
            }
        }
        for &(i, j) in &pairs {
            if kind.is_unary() {
                for (k, l, s) in realizations(i, j) {
                    names.push(format!("d{k}{l}{s}"));
                }
            } else {
                names.push(format!("d{i}{j}"));
                names.push(format!("d{j}{i}"));
            }
        }
        VarLayout {
            kind,
            objects,
            pairs,
            n_c,
            n_b,
            names,
        }
    }

    pub fn dim(&self) -> usize {
        self.n_c + self.n_b
    }

    fn obj_pos(&self, i: usize) -> usize {
        self.objects
            .iter()
            .position(|&o| o == i)
            .expect("object in layout")
    }

    fn pair_pos(&self, i: usize, j: usize) -> usize {
        self.pairs
            .iter()
            .position(|&p| p == (i, j) || p == (j, i))
            .expect("pair in layout")
    }

    /// Index of center coordinate `c_is`.
    pub fn c(&self, i: usize, s: Dir) -> usize {
        match s {
            Dir::X => self.obj_pos(i),
            Dir::Y => self.objects.len() + self.obj_pos(i),
        }
    }

    /// Index of the McCormick auxiliary for a pair (multilinear kind only).
    pub fn aux(&self, i: usize, j: usize) -> usize {
        debug_assert_eq!(self.kind, FormulationKind::Sbm);
        2 * self.objects.len() + self.pair_pos(i, j)
    }

    /// Index of the unary indicator `d_kls`.
    pub fn d_unary(&self, k: usize, l: usize, s: Dir) -> usize {
        let p = self.pair_pos(k, l);
        let (i, j) = self.pairs[p];
        debug_assert!((k, l) == (i, j) || (k, l) == (j, i));
        let f = match (k == i, s) {
            (true, Dir::X) => 0,
            (false, Dir::X) => 1,
            (true, Dir::Y) => 2,
            (false, Dir::Y) => 3,
        };
        self.n_c + 4 * p + f
    }

    /// Index of the binary-code indicator `d_kl`.
    pub fn d_pair(&self, k: usize, l: usize) -> usize {
        let p = self.pair_pos(k, l);
        let (i, _) = self.pairs[p];
        self.n_c + 2 * p + if k == i { 0 } else { 1 }
    }

    fn zero_row(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.dim()]
    }
}

/// The four ordered realizations of a pair, in the fixed order
/// (i,j,x), (j,i,x), (i,j,y), (j,i,y).
pub fn realizations(i: usize, j: usize) -> [(usize, usize, Dir); 4] {
    [
        (i, j, Dir::X),
        (j, i, Dir::X),
        (i, j, Dir::Y),
        (j, i, Dir::Y),
    ]
}

fn tag(kind: FormulationKind, fam: &str, realization: String) -> ConstraintTag {
    ConstraintTag::new(format!("{}:{}", kind.prefix(), fam), realization)
}

/// Affine expansion of a selector term over the pair variables: constant
/// plus coefficients on (d_ij, d_ji, aux).
struct SelectorAffine {
    c0: Rat,
    d_ij: Rat,
    d_ji: Rat,
    aux: Rat,
}

fn selector_affine(kind: FormulationKind, role: PairRole, s: Dir) -> SelectorAffine {
    let code = gray_code(role, s);
    let r = crate::rint;
    match kind {
        FormulationKind::Sbl => {
            // 1 - ||code - d||_1 = c0 + sum a_t d_t with a_t = +1 for a set
            // bit and -1 otherwise
            let ones = code.iter().filter(|&&b| b == 1).count() as i64;
            let coef = |b: u8| if b == 1 { r(1) } else { r(-1) };
            SelectorAffine {
                c0: r(1 - ones),
                d_ij: coef(code[0]),
                d_ji: coef(code[1]),
                aux: Rat::zero(),
            }
        }
        FormulationKind::Sbm => {
            let (c0, a, b, x) = match code {
                [0, 0] => (1, -1, -1, 1),
                [1, 0] => (0, 1, 0, -1),
                [1, 1] => (0, 0, 0, 1),
                [0, 1] => (0, 0, 1, -1),
                _ => unreachable!(),
            };
            SelectorAffine {
                c0: r(c0),
                d_ij: r(a),
                d_ji: r(b),
                aux: r(x),
            }
        }
        _ => panic!("selector rows are for the binary kinds"),
    }
}

/// Builds the formulation for an instance. `scope` selects the pairwise
/// primitive or the full concatenation over pairs; trivial instances are
/// rejected unless `opts.force` is set.
pub fn build(
    kind: FormulationKind,
    inst: &RppInstance,
    scope: PairScope,
    opts: &BuildOptions,
) -> Result<MblpModel, RppError> {
    inst.validate()?;
    let class = classify(inst);
    if class.trivial && !opts.force {
        return Err(RppError::TrivialInstance {
            reason: class.trivial_reason.unwrap_or_default(),
        });
    }
    let objects: Vec<usize> = match scope {
        PairScope::All => (1..=inst.len()).collect(),
        PairScope::Pair(i, j) => {
            if i == 0 || j == 0 || i > inst.len() || j > inst.len() || i == j {
                return Err(RppError::Invalid(format!("bad pair ({i},{j})")));
            }
            vec![i.min(j), i.max(j)]
        }
    };
    let layout = VarLayout::new(kind, objects);
    let params = derive_params(inst);
    let mut m = MblpModel::new(layout.n_c, layout.n_b, layout.names.clone());

    // per-object static rows come first where the formulation has them
    if matches!(kind, FormulationKind::Nu | FormulationKind::Sbl) {
        let (lo_fam, hi_fam) = if kind == FormulationKind::Nu {
            ("clb", "cub")
        } else {
            ("slb", "sub")
        };
        for &i in &layout.objects {
            for s in DIRS {
                let mut lo = layout.zero_row();
                lo[layout.c(i, s)] = Rat::one();
                m.push(ConstraintRow::ge(
                    lo,
                    params.lb(i, s).clone(),
                    tag(kind, lo_fam, format!("{i}{s}")),
                ));
                let mut hi = layout.zero_row();
                hi[layout.c(i, s)] = Rat::one();
                m.push(ConstraintRow::le(
                    hi,
                    params.ub(i, s).clone(),
                    tag(kind, hi_fam, format!("{i}{s}")),
                ));
            }
        }
    }

    // a single object has no pair rows to carry its center bounds
    if layout.pairs.is_empty() && !matches!(kind, FormulationKind::Nu | FormulationKind::Sbl) {
        for &i in &layout.objects {
            for s in DIRS {
                let mut lo = layout.zero_row();
                lo[layout.c(i, s)] = Rat::one();
                m.push(ConstraintRow::ge(
                    lo,
                    params.lb(i, s).clone(),
                    tag(kind, "clb", format!("{i}{s}")),
                ));
                let mut hi = layout.zero_row();
                hi[layout.c(i, s)] = Rat::one();
                m.push(ConstraintRow::le(
                    hi,
                    params.ub(i, s).clone(),
                    tag(kind, "cub", format!("{i}{s}")),
                ));
            }
        }
    }
    let pairs = layout.pairs.clone();
    for &(i, j) in &pairs {
        push_pair_rows(kind, &layout, &params, i, j, opts, &mut m);
    }
    m.validate().expect("builder emits well-formed rows");
    Ok(m)
}

fn push_pair_rows(
    kind: FormulationKind,
    layout: &VarLayout,
    params: &DerivedParams,
    i: usize,
    j: usize,
    opts: &BuildOptions,
    m: &mut MblpModel,
) {
    let lb = |k: usize, s: Dir| params.lb(k, s).clone();
    let ub = |k: usize, s: Dir| params.ub(k, s).clone();
    let pm = |k: usize, l: usize, s: Dir| params.p(k, l, s).clone();
    let rl = |k: usize, l: usize, s: Dir| format!("{k}{l}{s}");

    match kind {
        FormulationKind::Su | FormulationKind::Ru | FormulationKind::Hu => {
            for (k, l, s) in realizations(i, j) {
                let mut row = layout.zero_row();
                row[layout.c(l, s)] = Rat::one();
                row[layout.d_unary(k, l, s)] = -(lb(k, s) + pm(k, l, s) - lb(l, s));
                m.push(ConstraintRow::ge(row, lb(l, s), tag(kind, "lb", rl(k, l, s))));
            }
            for (k, l, s) in realizations(i, j) {
                let mut row = layout.zero_row();
                row[layout.c(k, s)] = Rat::one();
                row[layout.d_unary(k, l, s)] = -(ub(l, s) - pm(k, l, s) - ub(k, s));
                m.push(ConstraintRow::le(row, ub(k, s), tag(kind, "ub", rl(k, l, s))));
            }
            if matches!(kind, FormulationKind::Su | FormulationKind::Hu) {
                for (k, l, s) in realizations(i, j) {
                    let mut row = layout.zero_row();
                    row[layout.c(k, s)] = Rat::one();
                    row[layout.c(l, s)] = -Rat::one();
                    row[layout.d_unary(k, l, s)] = -(lb(l, s) - pm(k, l, s) - ub(k, s));
                    m.push(ConstraintRow::le(
                        row,
                        ub(k, s) - lb(l, s),
                        tag(kind, "pm", rl(k, l, s)),
                    ));
                }
            }
            if matches!(kind, FormulationKind::Ru | FormulationKind::Hu) {
                for (k, l, s) in realizations(i, j) {
                    let mut row = layout.zero_row();
                    row[layout.c(k, s)] = Rat::one();
                    row[layout.c(l, s)] = -Rat::one();
                    row[layout.d_unary(k, l, s)] = pm(l, k, s) + pm(k, l, s);
                    row[layout.d_unary(l, k, s)] = -(ub(k, s) - pm(l, k, s) - lb(l, s));
                    m.push(ConstraintRow::le(row, pm(l, k, s), tag(kind, "rm", rl(k, l, s))));
                }
            }
            if kind == FormulationKind::Su {
                let mut row = layout.zero_row();
                for (k, l, s) in realizations(i, j) {
                    row[layout.d_unary(k, l, s)] = Rat::one();
                }
                m.push(ConstraintRow::eq(
                    row,
                    Rat::one(),
                    tag(kind, "disj", format!("{i}{j}")),
                ));
            } else {
                for s in DIRS {
                    let mut row = layout.zero_row();
                    row[layout.d_unary(i, j, s)] = Rat::one();
                    row[layout.d_unary(j, i, s)] = Rat::one();
                    m.push(ConstraintRow::le(
                        row,
                        Rat::one(),
                        tag(kind, "s1", format!("{i}{j}{s}")),
                    ));
                }
                let mut row = layout.zero_row();
                for (k, l, s) in realizations(i, j) {
                    row[layout.d_unary(k, l, s)] = Rat::one();
                }
                m.push(ConstraintRow::ge(
                    row,
                    Rat::one(),
                    tag(kind, "s2", format!("{i}{j}")),
                ));
            }
        }
        FormulationKind::Nu => {
            for (k, l, s) in realizations(i, j) {
                let big_m = opts
                    .nu_big_m
                    .clone()
                    .unwrap_or_else(|| ub(k, s) - lb(l, s));
                let mut row = layout.zero_row();
                row[layout.c(k, s)] = Rat::one();
                row[layout.c(l, s)] = -Rat::one();
                row[layout.d_unary(k, l, s)] = pm(k, l, s) + big_m.clone();
                m.push(ConstraintRow::le(row, big_m, tag(kind, "pm", rl(k, l, s))));
            }
            let mut row = layout.zero_row();
            for (k, l, s) in realizations(i, j) {
                row[layout.d_unary(k, l, s)] = Rat::one();
            }
            m.push(ConstraintRow::eq(
                row,
                Rat::one(),
                tag(kind, "disj", format!("{i}{j}")),
            ));
        }
        FormulationKind::Sbl | FormulationKind::Sbm => {
            let place = |row: &mut Vec<Rat>, sel: &SelectorAffine, g: &Rat| {
                row[layout.d_pair(i, j)] = -(g.clone() * sel.d_ij.clone());
                row[layout.d_pair(j, i)] = -(g.clone() * sel.d_ji.clone());
                if kind == FormulationKind::Sbm {
                    row[layout.aux(i, j)] = -(g.clone() * sel.aux.clone());
                }
            };
            let role = |k: usize| if k == i { PairRole::Fwd } else { PairRole::Rev };
            for (k, l, s) in realizations(i, j) {
                let sel = selector_affine(kind, role(k), s);
                let g = lb(k, s) + pm(k, l, s) - lb(l, s);
                let mut row = layout.zero_row();
                row[layout.c(l, s)] = Rat::one();
                place(&mut row, &sel, &g);
                m.push(ConstraintRow::ge(
                    row,
                    lb(l, s) + g.clone() * sel.c0.clone(),
                    tag(kind, "lb", rl(k, l, s)),
                ));
            }
            for (k, l, s) in realizations(i, j) {
                let sel = selector_affine(kind, role(k), s);
                let g = ub(l, s) - pm(k, l, s) - ub(k, s);
                let mut row = layout.zero_row();
                row[layout.c(k, s)] = Rat::one();
                place(&mut row, &sel, &g);
                m.push(ConstraintRow::le(
                    row,
                    ub(k, s) + g.clone() * sel.c0.clone(),
                    tag(kind, "ub", rl(k, l, s)),
                ));
            }
            for (k, l, s) in realizations(i, j) {
                let sel = selector_affine(kind, role(k), s);
                let g = lb(l, s) - pm(k, l, s) - ub(k, s);
                let mut row = layout.zero_row();
                row[layout.c(k, s)] = Rat::one();
                row[layout.c(l, s)] = -Rat::one();
                place(&mut row, &sel, &g);
                m.push(ConstraintRow::le(
                    row,
                    ub(k, s) - lb(l, s) + g.clone() * sel.c0.clone(),
                    tag(kind, "pm", rl(k, l, s)),
                ));
            }
            if kind == FormulationKind::Sbm {
                for (k, l) in [(i, j), (j, i)] {
                    let mut row = layout.zero_row();
                    row[layout.d_pair(k, l)] = Rat::one();
                    row[layout.aux(i, j)] = -Rat::one();
                    m.push(ConstraintRow::ge(
                        row,
                        Rat::zero(),
                        tag(kind, "McCor01", format!("{k}{l}")),
                    ));
                }
                let mut row = layout.zero_row();
                row[layout.d_pair(i, j)] = Rat::one();
                row[layout.d_pair(j, i)] = Rat::one();
                row[layout.aux(i, j)] = -Rat::one();
                m.push(ConstraintRow::le(
                    row,
                    Rat::one(),
                    tag(kind, "McCor2", format!("{i}{j}")),
                ));
                let mut row = layout.zero_row();
                row[layout.aux(i, j)] = Rat::one();
                m.push(ConstraintRow::ge(
                    row,
                    Rat::zero(),
                    tag(kind, "McCor3", format!("{i}{j}")),
                ));
            }
        }
    }
}

/// Transitivity cuts over object triples: the unary family emits one row
/// per ordered permutation of each triple per direction (12 per triple);
/// the binary family emits the two chain constraints per triple two-sided,
/// normalized to `>=` rows.
pub fn sequence_pair_cuts(
    kind: FormulationKind,
    n: usize,
) -> Result<Vec<ConstraintRow>, RppError> {
    if n < 3 {
        return Err(RppError::TooFewObjects { got: n });
    }
    let layout = VarLayout::new(kind, (1..=n).collect());
    let mut rows = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                if kind.is_unary() {
                    for (p, q, r) in [
                        (a, b, c),
                        (a, c, b),
                        (b, a, c),
                        (b, c, a),
                        (c, a, b),
                        (c, b, a),
                    ] {
                        for s in DIRS {
                            let mut row = layout.zero_row();
                            row[layout.d_unary(p, q, s)] = Rat::one();
                            row[layout.d_unary(q, r, s)] = Rat::one();
                            row[layout.d_unary(p, r, s)] = -Rat::one();
                            rows.push(ConstraintRow::le(
                                row,
                                Rat::one(),
                                ConstraintTag::new("SPU", format!("{p}{q}{r}{s}")),
                            ));
                        }
                    }
                } else {
                    for (chain, name) in [
                        ([(a, b), (b, c), (a, c)], format!("{a}{b}{c}")),
                        ([(b, a), (c, b), (c, a)], format!("{c}{b}{a}")),
                    ] {
                        let mut base = layout.zero_row();
                        base[layout.d_pair(chain[0].0, chain[0].1)] = Rat::one();
                        base[layout.d_pair(chain[1].0, chain[1].1)] = Rat::one();
                        base[layout.d_pair(chain[2].0, chain[2].1)] = -Rat::one();
                        rows.push(ConstraintRow::ge(
                            base.clone(),
                            Rat::zero(),
                            ConstraintTag::new("SPB:lo", name.clone()),
                        ));
                        rows.push(ConstraintRow::le(
                            base,
                            Rat::one(),
                            ConstraintTag::new("SPB:up", name),
                        ));
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Exact branching priorities per binary variable; the binary kinds drop
/// the direction. Values are rational for rational clearances and scaled
/// to integers only at export.
pub fn branching_priority(kind: FormulationKind, inst: &RppInstance) -> BTreeMap<String, Rat> {
    let n = inst.len();
    let area = |i: usize| -> Rat {
        let o = &inst.objects[i - 1];
        o.dx.clone() * o.dy.clone()
    };
    let sig_dir = |i: usize, s: Dir| -> Rat {
        let o = &inst.objects[i - 1];
        o.sigma.minus(s).clone() + o.sigma.plus(s).clone()
    };
    let dim = |i: usize, s: Dir| inst.objects[i - 1].dim(s).clone();
    let max_over = |f: &dyn Fn(usize) -> Rat| (1..=n).map(f).max().unwrap_or_else(Rat::zero);
    let mut out = BTreeMap::new();
    let layout = VarLayout::new(kind, (1..=n).collect());
    for &(i, j) in &layout.pairs {
        if kind.is_unary() {
            for s in DIRS {
                let sig_max = max_over(&|k| sig_dir(k, s));
                let dim_max = max_over(&|k| dim(k, s));
                let prio = sig_dir(i, s).min(sig_dir(j, s))
                    + (sig_max + Rat::one())
                        * (dim(i, s).min(dim(j, s)) + (dim_max + Rat::one()) * area(i).min(area(j)));
                for (k, l, ss) in realizations(i, j) {
                    if ss == s {
                        out.insert(layout.names[layout.d_unary(k, l, s)].clone(), prio.clone());
                    }
                }
            }
        } else {
            let sig = |k: usize| sig_dir(k, Dir::X) + sig_dir(k, Dir::Y);
            let sig_max = max_over(&sig);
            let prio = sig(i).min(sig(j)) + (sig_max + Rat::one()) * area(i).min(area(j));
            out.insert(layout.names[layout.d_pair(i, j)].clone(), prio.clone());
            out.insert(layout.names[layout.d_pair(j, i)].clone(), prio);
        }
    }
    out
}
