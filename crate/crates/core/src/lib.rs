//! Exact-rational toolkit for rectangle packing MBLP formulations.
//!
//! Builds the unary and binary mixed-binary linear embeddings of rectangle
//! packing with clearances, certifies or refutes their pairwise idealness by
//! exhaustive extreme-point enumeration over arbitrary-precision rationals,
//! finds minimal dependence circuits, and exports LP/MPS models together
//! with solver hint sidecars. No floating point is used anywhere on the
//! certification path.

pub mod enumerate;
pub mod export;
pub mod formulations;
pub mod gen;
pub mod greedy;
pub mod iom;
pub mod lemmas;
pub mod linalg;
pub mod mblp;
pub mod rpp;
pub mod selectors;
pub mod spark;
pub mod spp;
pub mod summarize;

/// Exact scalar used throughout: arbitrary-precision rational, always in
/// lowest terms with a positive denominator.
pub type Rat = num_rational::BigRational;
/// Dense exact matrix.
pub type RatMatrix = linalg::Matrix<Rat>;
/// Exact vector.
pub type RatVector = Vec<Rat>;

pub use enumerate::{check_ideal, enumerate_extreme_points, max_phi_over_vertices, IdealVerdict};
pub use formulations::FormulationKind;
pub use mblp::{compose_relaxation, MblpModel, Point, Relaxation};
pub use rpp::RppInstance;

use num_bigint::BigInt;

/// Rational from an integer pair.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Renders a rational as `p/q` in lowest terms, or plain `p` when q = 1.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or plain `p` into a rational.
pub fn rat_from_str(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|e| format!("bad numerator in {s:?}: {e}"))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|e| format!("bad denominator in {s:?}: {e}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rat::new(n, d))
}

/// Serde helpers for rationals as `"p/q"` strings.
pub mod rat_serde {
    use super::{rat_from_str, rat_to_string, Rat};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rat_to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        rat_from_str(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&rat_to_string(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
            let raw: Vec<String> = Vec::deserialize(d)?;
            raw.iter()
                .map(|s| rat_from_str(s).map_err(D::Error::custom))
                .collect()
        }
    }
}
