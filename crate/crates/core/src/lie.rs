//! Catalog of the 3-dimensional unimodular simply-connected Lie groups.
//!
//! A Milnor frame `{F1, F2, F3}` satisfies
//! `[F2, F3] = n1 F1`, `[F3, F1] = n2 F2`, `[F1, F2] = n3 F3` with
//! `n_i` in `{-1, 0, +1}`. The sign multiset of `(n1, n2, n3)` determines
//! the group; each group is stored with one canonical triple that all
//! flow and curvature formulas in this crate are written for.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{int, Field};

/// One of the six unimodular simply-connected 3D Lie groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Group {
    /// `SU(2)`, simple and compact.
    SU2,
    /// Universal cover of `SL(2, R)`.
    SL2R,
    /// Rigid motions of the Euclidean plane.
    E2,
    /// Rigid motions of the Minkowski plane.
    E11,
    /// Heisenberg group.
    H3,
    /// Abelian `R^3`.
    R3,
}

impl Group {
    pub const ALL: [Group; 6] = [Group::SU2, Group::SL2R, Group::E2, Group::E11, Group::H3, Group::R3];

    /// Canonical Milnor structure constants `(n1, n2, n3)`.
    pub const fn milnor_constants(self) -> [i8; 3] {
        match self {
            Group::SU2 => [1, 1, 1],
            Group::SL2R => [1, 1, -1],
            Group::E2 => [-1, 0, -1],
            Group::E11 => [1, 0, -1],
            Group::H3 => [1, 0, 0],
            Group::R3 => [0, 0, 0],
        }
    }

    /// Structure constants lifted into a scalar field.
    pub fn structure<T: Field>(self) -> [T; 3] {
        self.milnor_constants().map(|n| int(n as i64))
    }

    /// Short lowercase identifier used on the command line and in reports.
    pub const fn key(self) -> &'static str {
        match self {
            Group::SU2 => "su2",
            Group::SL2R => "sl2r",
            Group::E2 => "e2",
            Group::E11 => "e11",
            Group::H3 => "h3",
            Group::R3 => "r3",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::SU2 => "SU(2)",
            Group::SL2R => "SL(2,R)",
            Group::E2 => "E(2)",
            Group::E11 => "E(1,1)",
            Group::H3 => "H3",
            Group::R3 => "R3",
        })
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        match key.as_str() {
            "su2" => Ok(Group::SU2),
            "sl2r" => Ok(Group::SL2R),
            "e2" => Ok(Group::E2),
            "e11" => Ok(Group::E11),
            "h3" | "heisenberg" => Ok(Group::H3),
            "r3" => Ok(Group::R3),
            _ => Err(Error::UnknownGroup(s.to_string())),
        }
    }
}

impl Serialize for Group {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.key())
    }
}

/// Identify the group whose Milnor signature is `n`, in any order.
///
/// Only the counts of positive, negative and zero entries matter, and a
/// global sign flip gives the same group.
pub fn group_from_signature(n: [i64; 3]) -> Result<Group> {
    if n.iter().any(|v| !(-1..=1).contains(v)) {
        return Err(Error::UnknownSignature(n[0], n[1], n[2]));
    }
    let pos = n.iter().filter(|&&v| v > 0).count();
    let neg = n.iter().filter(|&&v| v < 0).count();
    let group = match (pos.max(neg), pos.min(neg)) {
        (3, 0) => Group::SU2,
        (2, 1) => Group::SL2R,
        (2, 0) => Group::E2,
        (1, 1) => Group::E11,
        (1, 0) => Group::H3,
        (0, 0) => Group::R3,
        _ => unreachable!("three entries in {{-1, 0, 1}}"),
    };
    Ok(group)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value<T: Field>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

/// Signs `(e1, e2, e3)` in front of `a^2, b^2, c^2` in
/// `dt^2 + e1 a^2 (th1)^2 + e2 b^2 (th2)^2 + e3 c^2 (th3)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignPattern(pub [Sign; 3]);

impl SignPattern {
    pub const ALL_PLUS: SignPattern = SignPattern([Sign::Plus, Sign::Plus, Sign::Plus]);
    /// `(+, -, -)`, the neutral metric over E(1,1).
    pub const PLUS_MINUS_MINUS: SignPattern = SignPattern([Sign::Plus, Sign::Minus, Sign::Minus]);
    /// `(-, -, +)`, the neutral metric over SL(2,R).
    pub const MINUS_MINUS_PLUS: SignPattern = SignPattern([Sign::Minus, Sign::Minus, Sign::Plus]);

    /// Signs of the full 4-metric, with `dt^2` first.
    pub fn metric_signs<T: Field>(self) -> [T; 4] {
        let [s1, s2, s3] = self.0;
        [T::one(), s1.value(), s2.value(), s3.value()]
    }

    /// `(positive, negative)` eigenvalue counts of the 4-metric.
    pub fn signature(self) -> (usize, usize) {
        let minus = self.0.iter().filter(|s| **s == Sign::Minus).count();
        (4 - minus, minus)
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let signs: Vec<Sign> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(Error::InvalidSignPattern(s.to_string())),
            })
            .collect::<Result<_>>()?;
        let signs: [Sign; 3] = signs
            .try_into()
            .map_err(|_| Error::InvalidSignPattern(s.to_string()))?;
        Ok(SignPattern(signs))
    }
}

impl Serialize for SignPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A cohomogeneity-one construction: the group acting on the 4-manifold,
/// the group whose Ricci flow drives `(a, b, c)`, and the sign pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CaseRow {
    pub group: Group,
    pub flow_group: Group,
    pub signs: SignPattern,
}

impl CaseRow {
    pub const fn new(group: Group, flow_group: Group, signs: SignPattern) -> Self {
        CaseRow { group, flow_group, signs }
    }

    /// The Ricci-flat row for `group`, if the group appears in the table.
    pub fn table1(group: Group) -> Option<CaseRow> {
        table1_cases().into_iter().find(|row| row.group == group)
    }

    pub fn is_table1(&self) -> bool {
        table1_cases().contains(self)
    }

    pub fn label(&self) -> String {
        format!("{} / flow {} / {}", self.group, self.flow_group, self.signs)
    }
}

/// The five Ricci-flat constructions, in table order.
pub fn table1_cases() -> [CaseRow; 5] {
    use Group::*;
    [
        CaseRow::new(SU2, SU2, SignPattern::ALL_PLUS),
        CaseRow::new(E2, E2, SignPattern::ALL_PLUS),
        CaseRow::new(SL2R, SU2, SignPattern::MINUS_MINUS_PLUS),
        CaseRow::new(H3, H3, SignPattern::ALL_PLUS),
        CaseRow::new(E11, E11, SignPattern::PLUS_MINUS_MINUS),
    ]
}

/// Signature column of the table, row by row.
pub const TABLE1_SIGNATURES: [(usize, usize); 5] = [(4, 0), (4, 0), (2, 2), (4, 0), (2, 2)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_signatures_resolve() {
        assert_eq!(group_from_signature([1, 0, 0]).unwrap(), Group::H3);
        assert_eq!(group_from_signature([-1, 0, 0]).unwrap(), Group::H3);
        assert_eq!(group_from_signature([0, 0, 0]).unwrap(), Group::R3);
        assert_eq!(group_from_signature([1, 1, 1]).unwrap(), Group::SU2);
        assert_eq!(group_from_signature([-1, -1, -1]).unwrap(), Group::SU2);
        assert_eq!(group_from_signature([-1, -1, 1]).unwrap(), Group::SL2R);
        assert_eq!(group_from_signature([-1, 1, 1]).unwrap(), Group::SL2R);
        assert_eq!(group_from_signature([-1, -1, 0]).unwrap(), Group::E2);
        assert_eq!(group_from_signature([1, 1, 0]).unwrap(), Group::E2);
        assert_eq!(group_from_signature([-1, 0, 1]).unwrap(), Group::E11);
    }

    #[test]
    fn reordered_signatures_resolve() {
        assert_eq!(group_from_signature([0, 1, 0]).unwrap(), Group::H3);
        assert_eq!(group_from_signature([1, -1, 1]).unwrap(), Group::SL2R);
        assert_eq!(group_from_signature([-1, 0, -1]).unwrap(), Group::E2);
        assert_eq!(group_from_signature([0, -1, 1]).unwrap(), Group::E11);
    }

    #[test]
    fn out_of_range_entries_are_rejected() {
        assert!(matches!(group_from_signature([2, 0, 0]), Err(Error::UnknownSignature(2, 0, 0))));
        assert!(group_from_signature([-1, 0, -3]).is_err());
    }

    #[test]
    fn canonical_constants() {
        assert_eq!(Group::E11.milnor_constants(), [1, 0, -1]);
        assert_eq!(Group::E2.milnor_constants(), [-1, 0, -1]);
        assert_eq!(Group::SL2R.milnor_constants(), [1, 1, -1]);
        for g in Group::ALL {
            let n = g.milnor_constants().map(i64::from);
            assert_eq!(group_from_signature(n).unwrap(), g);
        }
    }

    #[test]
    fn table_rows() {
        let rows = table1_cases();
        assert_eq!(rows.len(), 5);
        assert!(rows.contains(&CaseRow::new(Group::SL2R, Group::SU2, SignPattern::MINUS_MINUS_PLUS)));
        assert!(rows.contains(&CaseRow::new(Group::H3, Group::H3, SignPattern::ALL_PLUS)));
        assert!(rows.contains(&CaseRow::new(Group::E11, Group::E11, SignPattern::PLUS_MINUS_MINUS)));
        assert!(rows.iter().all(|r| r.group != Group::R3));
        for (row, declared) in rows.iter().zip(TABLE1_SIGNATURES) {
            assert_eq!(row.signs.signature(), declared, "{}", row.label());
        }
    }

    #[test]
    fn parsing() {
        assert_eq!("+--".parse::<SignPattern>().unwrap(), SignPattern::PLUS_MINUS_MINUS);
        assert_eq!("--+".parse::<SignPattern>().unwrap().to_string(), "--+");
        assert!("++".parse::<SignPattern>().is_err());
        assert!("+x+".parse::<SignPattern>().is_err());
        assert_eq!("SL2R".parse::<Group>().unwrap(), Group::SL2R);
        assert_eq!("e11".parse::<Group>().unwrap(), Group::E11);
        assert_eq!("E(1,1)".parse::<Group>().unwrap(), Group::E11);
        assert!("so3".parse::<Group>().is_err());
    }
}
