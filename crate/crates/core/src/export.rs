//! Deterministic LP and MPS renderings of a model. Rationals are written
//! as exact decimals when they terminate; otherwise the row is scaled by
//! the common denominator and the factor recorded in a comment, so the
//! emitted file is always bit-exact for the model it encodes.

use crate::mblp::{ConstraintRow, MblpModel, Sense};
use crate::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Lp,
    Mps,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "lp" => Ok(ExportFormat::Lp),
            "mps" => Ok(ExportFormat::Mps),
            other => Err(format!("unknown format {other:?} (expected lp|mps)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

/// A linear objective over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub sense: ObjectiveSense,
    pub terms: Vec<(String, Rat)>,
}

/// A terminating decimal rendering, when the denominator is of the form
/// 2^a 5^b; exact by construction.
fn exact_decimal(r: &Rat) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut a = 0u32;
    let mut b = 0u32;
    while (&den % &two).is_zero() {
        den /= &two;
        a += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        b += 1;
    }
    if !den.is_one() {
        return None;
    }
    let m = a.max(b);
    let scale = two.pow(m - a) * five.pow(m - b);
    let scaled = r.numer() * scale;
    if m == 0 {
        return Some(scaled.to_string());
    }
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits = if digits.len() <= m as usize {
        format!("{}{}", "0".repeat(m as usize + 1 - digits.len()), digits)
    } else {
        digits
    };
    let split = digits.len() - m as usize;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(&digits[..split]);
    out.push('.');
    out.push_str(&digits[split..]);
    // trim trailing zeros but keep at least one fractional digit
    while out.ends_with('0') && !out.ends_with(".0") {
        out.pop();
    }
    Some(out)
}

/// Scale factor turning every value in the slice into an integer: the lcm
/// of the denominators. One when all values already terminate as decimals.
fn row_scale(values: &[&Rat]) -> BigInt {
    if values.iter().all(|v| exact_decimal(v).is_some()) {
        return BigInt::one();
    }
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v.denom());
    }
    l
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| match c {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '_' | '.' => c,
            ':' => '.',
            '^' => '_',
            _ => '_',
        })
        .collect()
}

/// Unique sanitized row names in model order.
fn row_names(m: &MblpModel) -> Vec<String> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    m.rows
        .iter()
        .map(|r| {
            let base = sanitize(&r.tag.to_string());
            let n = seen.entry(base.clone()).or_insert(0);
            *n += 1;
            if *n == 1 {
                base
            } else {
                format!("{base}.{n}")
            }
        })
        .collect()
}

fn scaled_row(row: &ConstraintRow) -> (Vec<Rat>, Rat, BigInt) {
    let mut refs: Vec<&Rat> = row.coeffs.iter().collect();
    refs.push(&row.rhs);
    let scale = row_scale(&refs);
    if scale.is_one() {
        (row.coeffs.clone(), row.rhs.clone(), scale)
    } else {
        let s = Rat::from_integer(scale.clone());
        (
            row.coeffs.iter().map(|c| c * &s).collect(),
            &row.rhs * &s,
            scale,
        )
    }
}

fn num(r: &Rat) -> String {
    exact_decimal(r).expect("value terminates after scaling")
}

/// Renders the model (rows in tag order as built) in the requested format.
/// Byte-stable: the same model and objective always produce the same text.
pub fn export(m: &MblpModel, objective: Option<&Objective>, format: ExportFormat) -> String {
    m.validate().expect("well-formed model");
    match format {
        ExportFormat::Lp => export_lp(m, objective),
        ExportFormat::Mps => export_mps(m, objective),
    }
}

fn objective_parts(m: &MblpModel, objective: Option<&Objective>) -> (ObjectiveSense, Vec<(usize, Rat)>, BigInt) {
    let Some(obj) = objective else {
        return (ObjectiveSense::Minimize, Vec::new(), BigInt::one());
    };
    let index: BTreeMap<&str, usize> = m
        .var_names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    let mut terms: Vec<(usize, Rat)> = obj
        .terms
        .iter()
        .map(|(name, c)| {
            let i = *index
                .get(name.as_str())
                .unwrap_or_else(|| panic!("objective names unknown variable {name}"));
            (i, c.clone())
        })
        .collect();
    terms.sort_by_key(|(i, _)| *i);
    let refs: Vec<&Rat> = terms.iter().map(|(_, c)| c).collect();
    let scale = row_scale(&refs);
    if !scale.is_one() {
        let s = Rat::from_integer(scale.clone());
        for (_, c) in terms.iter_mut() {
            *c = &*c * &s;
        }
    }
    (obj.sense, terms, scale)
}

fn lp_linear(terms: &[(usize, Rat)], names: &[String]) -> String {
    let mut out = String::new();
    for (k, (i, c)) in terms.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if k == 0 {
            if c.is_negative() {
                out.push_str("- ");
            }
        } else if c.is_negative() {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let _ = write!(out, "{} {}", num(&mag), names[*i]);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn export_lp(m: &MblpModel, objective: Option<&Objective>) -> String {
    let names: Vec<String> = m.var_names.iter().map(|n| sanitize(n)).collect();
    let rnames = row_names(m);
    let (sense, obj_terms, obj_scale) = objective_parts(m, objective);
    let mut out = String::new();
    if !obj_scale.is_one() {
        let _ = writeln!(out, "\\ objective scaled by {obj_scale}");
    }
    out.push_str(match sense {
        ObjectiveSense::Minimize => "Minimize\n",
        ObjectiveSense::Maximize => "Maximize\n",
    });
    let _ = writeln!(out, " obj: {}", lp_linear(&obj_terms, &names));
    out.push_str("Subject To\n");
    for (row, rname) in m.rows.iter().zip(&rnames) {
        let (coeffs, rhs, scale) = scaled_row(row);
        if !scale.is_one() {
            let _ = writeln!(out, "\\ {rname} scaled by {scale}");
        }
        let terms: Vec<(usize, Rat)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        let op = match row.sense {
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(
            out,
            " {rname}: {} {op} {}",
            lp_linear(&terms, &names),
            num(&rhs)
        );
    }
    out.push_str("Bounds\n");
    for i in 0..m.n_c {
        let _ = writeln!(out, " {} free", names[i]);
    }
    if m.n_b > 0 {
        out.push_str("Binaries\n");
        for i in m.n_c..m.dim() {
            let _ = writeln!(out, " {}", names[i]);
        }
    }
    out.push_str("End\n");
    out
}

fn export_mps(m: &MblpModel, objective: Option<&Objective>) -> String {
    let names: Vec<String> = m.var_names.iter().map(|n| sanitize(n)).collect();
    let rnames = row_names(m);
    let (sense, obj_terms, obj_scale) = objective_parts(m, objective);
    let obj_map: BTreeMap<usize, Rat> = obj_terms.into_iter().collect();
    let scaled: Vec<(Vec<Rat>, Rat, BigInt)> = m.rows.iter().map(scaled_row).collect();
    let mut out = String::new();
    out.push_str("NAME          MODEL\n");
    if sense == ObjectiveSense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    if !obj_scale.is_one() {
        let _ = writeln!(out, "* objective scaled by {obj_scale}");
    }
    for ((_, _, s), rname) in scaled.iter().zip(&rnames) {
        if !s.is_one() {
            let _ = writeln!(out, "* {rname} scaled by {s}");
        }
    }
    out.push_str("ROWS\n N  OBJ\n");
    for (row, rname) in m.rows.iter().zip(&rnames) {
        let kind = match row.sense {
            Sense::Ge => 'G',
            Sense::Eq => 'E',
        };
        let _ = writeln!(out, " {kind}  {rname}");
    }
    out.push_str("COLUMNS\n");
    let write_col = |out: &mut String, i: usize| {
        if let Some(c) = obj_map.get(&i) {
            if !c.is_zero() {
                let _ = writeln!(out, "    {}  OBJ  {}", names[i], num(c));
            }
        }
        for (r, (coeffs, _, _)) in scaled.iter().enumerate() {
            if !coeffs[i].is_zero() {
                let _ = writeln!(out, "    {}  {}  {}", names[i], rnames[r], num(&coeffs[i]));
            }
        }
    };
    for i in 0..m.n_c {
        write_col(&mut out, i);
    }
    if m.n_b > 0 {
        out.push_str("    MARKER  INTORG  'MARKER'  'INTORG'\n");
        for i in m.n_c..m.dim() {
            write_col(&mut out, i);
        }
        out.push_str("    MARKER  INTEND  'MARKER'  'INTEND'\n");
    }
    out.push_str("RHS\n");
    for ((_, rhs, _), rname) in scaled.iter().zip(&rnames) {
        if !rhs.is_zero() {
            let _ = writeln!(out, "    RHS  {}  {}", rname, num(rhs));
        }
    }
    out.push_str("BOUNDS\n");
    for i in 0..m.n_c {
        let _ = writeln!(out, " FR BND  {}", names[i]);
    }
    for i in m.n_c..m.dim() {
        let _ = writeln!(out, " BV BND  {}", names[i]);
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mblp::{ConstraintRow, ConstraintTag};
    use crate::{rat, rint};

    fn one_row_model() -> MblpModel {
        let mut m = MblpModel::new(1, 1, vec!["x".into(), "y".into()]);
        m.push(ConstraintRow::ge(
            vec![rat(1, 2), rint(-3)],
            rat(5, 4),
            ConstraintTag::new("SU:lb", "12x"),
        ));
        m
    }

    #[test]
    fn lp_golden_one_row() {
        let text = export(&one_row_model(), None, ExportFormat::Lp);
        let want = "\
Minimize
 obj: 0
Subject To
 SU.lb_12x: 0.5 x - 3 y >= 1.25
Bounds
 x free
Binaries
 y
End
";
        assert_eq!(text, want);
    }

    #[test]
    fn non_terminating_values_scale_the_row() {
        let mut m = MblpModel::new(1, 0, vec!["x".into()]);
        m.push(ConstraintRow::ge(
            vec![rat(1, 3)],
            rint(1),
            ConstraintTag::new("r", ""),
        ));
        let text = export(&m, None, ExportFormat::Lp);
        assert!(text.contains("\\ r scaled by 3"));
        assert!(text.contains(" r: 1 x >= 3"));
    }

    #[test]
    fn export_is_stable_and_injective() {
        let a = export(&one_row_model(), None, ExportFormat::Lp);
        let b = export(&one_row_model(), None, ExportFormat::Lp);
        assert_eq!(a, b);
        let mut other = one_row_model();
        other.rows[0].rhs = rat(7, 4);
        assert_ne!(a, export(&other, None, ExportFormat::Lp));
    }

    #[test]
    fn mps_sections_present() {
        let obj = Objective {
            sense: ObjectiveSense::Maximize,
            terms: vec![("x".into(), rint(1))],
        };
        let text = export(&one_row_model(), Some(&obj), ExportFormat::Mps);
        for section in ["NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"] {
            assert!(text.contains(section), "missing {section}");
        }
        assert!(text.contains(" FR BND  x"));
        assert!(text.contains(" BV BND  y"));
        assert!(text.contains("INTORG"));
    }

    #[test]
    fn su_pairwise_file_carries_thirteen_rows() {
        use crate::formulations::{build, BuildOptions, FormulationKind, PairScope};
        let m = build(
            FormulationKind::Su,
            &crate::rpp::pair_2x2_10x10(),
            PairScope::All,
            &BuildOptions::default(),
        )
        .unwrap();
        let text = export(&m, None, ExportFormat::Lp);
        let body = text
            .split("Subject To\n")
            .nth(1)
            .unwrap()
            .split("Bounds\n")
            .next()
            .unwrap();
        let rows = body.lines().filter(|l| l.contains(':')).count();
        assert_eq!(rows, 13);
    }

    #[test]
    fn exact_decimal_rendering() {
        assert_eq!(exact_decimal(&rat(1, 2)).unwrap(), "0.5");
        assert_eq!(exact_decimal(&rat(-3, 8)).unwrap(), "-0.375");
        assert_eq!(exact_decimal(&rat(1, 10)).unwrap(), "0.1");
        assert_eq!(exact_decimal(&rint(42)).unwrap(), "42");
        assert_eq!(exact_decimal(&rat(1, 3)), None);
        assert_eq!(exact_decimal(&rat(7, 20)).unwrap(), "0.35");
    }
}
