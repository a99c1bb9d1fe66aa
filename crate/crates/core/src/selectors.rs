//! Selector functions mediating between hypercube codes and simplex
//! vertices for the binary embeddings, plus the reflective Gray code
//! assignment the two-binary formulations use.

use crate::rpp::Dir;
use crate::Rat;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectorKind {
    /// `1 - ||code - point||_1`; linear, may go negative.
    Hamming,
    /// `max(0, 1 - ||code - point||_1)`.
    UniformHamming,
    /// `prod p_i^{c_i} (1 - p_i)^{1 - c_i}`, the exact multilinear
    /// interpolation of the Kronecker delta.
    Multilinear,
}

/// Which of the two objects of a pair leads the disjunct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRole {
    /// The lower-indexed object precedes.
    Fwd,
    /// The higher-indexed object precedes.
    Rev,
}

/// The reflective Gray code labelling the four disjunctive terms. Kept as
/// data so an alternative code order stays a one-table change.
pub const GRAY_TABLE: [(PairRole, Dir, [u8; 2]); 4] = [
    (PairRole::Fwd, Dir::X, [0, 0]),
    (PairRole::Fwd, Dir::Y, [1, 0]),
    (PairRole::Rev, Dir::X, [1, 1]),
    (PairRole::Rev, Dir::Y, [0, 1]),
];

/// Code assigned to a disjunctive term: (i,j,x) -> (0,0), (i,j,y) -> (1,0),
/// (j,i,x) -> (1,1), (j,i,y) -> (0,1).
pub fn gray_code(role: PairRole, s: Dir) -> [u8; 2] {
    GRAY_TABLE
        .iter()
        .find(|(r, d, _)| *r == role && *d == s)
        .map(|(_, _, code)| *code)
        .expect("every term is coded")
}

fn hamming_distance(code: &[u8], point: &[Rat]) -> Rat {
    code.iter()
        .zip(point)
        .map(|(&c, p)| {
            if c == 1 {
                Rat::one() - p.clone()
            } else {
                p.clone()
            }
        })
        .fold(Rat::zero(), |acc, v| acc + v)
}

/// Evaluates a selector at `point in [0,1]^r`. For the linearized
/// multilinear selector on r = 2 pass the auxiliary product variable as
/// `delta_aux`; the exact product is used otherwise.
pub fn selector_eval(
    kind: SelectorKind,
    code: &[u8],
    point: &[Rat],
    delta_aux: Option<&Rat>,
) -> Rat {
    assert_eq!(code.len(), point.len(), "code and point lengths differ");
    match kind {
        SelectorKind::Hamming => Rat::one() - hamming_distance(code, point),
        SelectorKind::UniformHamming => {
            let v = Rat::one() - hamming_distance(code, point);
            if v.is_negative() {
                Rat::zero()
            } else {
                v
            }
        }
        SelectorKind::Multilinear => match delta_aux {
            None => code
                .iter()
                .zip(point)
                .map(|(&c, p)| {
                    if c == 1 {
                        p.clone()
                    } else {
                        Rat::one() - p.clone()
                    }
                })
                .fold(Rat::one(), |acc, v| acc * v),
            Some(d) => multilinear_linearized(code, point, d),
        },
    }
}

/// The r = 2 multilinear selector with the bilinear product replaced by the
/// auxiliary variable: (0,0) -> 1 - p1 - p2 + D, (1,0) -> p1 - D,
/// (1,1) -> D, (0,1) -> p2 - D.
pub fn multilinear_linearized(code: &[u8], point: &[Rat], delta_aux: &Rat) -> Rat {
    assert_eq!(code.len(), 2, "linearized selector is two-dimensional");
    let (p1, p2) = (&point[0], &point[1]);
    match (code[0], code[1]) {
        (0, 0) => Rat::one() - p1 - p2 + delta_aux.clone(),
        (1, 0) => p1.clone() - delta_aux.clone(),
        (1, 1) => delta_aux.clone(),
        (0, 1) => p2.clone() - delta_aux.clone(),
        _ => panic!("codes are binary"),
    }
}

/// All codes of the r-hypercube in lexicographic order.
pub fn hypercube_codes(r: usize) -> Vec<Vec<u8>> {
    (0..1usize << r)
        .map(|m| (0..r).map(|b| ((m >> (r - 1 - b)) & 1) as u8).collect())
        .collect()
}
