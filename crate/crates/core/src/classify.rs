//! Stable Calabi–Yau dimensions of self-injective algebras of finite
//! representation type, by gcd tests and least solutions of congruences.

use crate::families::{AsashibaType, FamilyError, TreeClass};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("inadmissible type: {0}")]
    InadmissibleType(String),
    #[error("characteristic must be 0 or a prime, got {0}")]
    BadCharacteristic(u32),
}

impl From<FamilyError> for ClassifyError {
    fn from(e: FamilyError) -> Self {
        ClassifyError::InadmissibleType(e.to_string())
    }
}

pub fn m_delta(tree: TreeClass) -> u64 {
    tree.m_delta()
}

/// `m | a·l − b` for `l` in the closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CongruenceProblem {
    pub a: i64,
    pub b: i64,
    pub modulus: i64,
    pub lo: i64,
    pub hi: i64,
}

impl CongruenceProblem {
    pub fn holds(&self, l: i64) -> bool {
        (self.a * l - self.b).rem_euclid(self.modulus) == 0
    }
}

/// Modular inverse of `a` modulo `m` for coprime `a, m`.
fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = a.rem_euclid(m).extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m)
}

/// Least `l` in range with `m | a·l − b`.
pub fn solve_min_congruence(p: &CongruenceProblem) -> Option<i64> {
    let m = p.modulus;
    assert!(m > 0, "modulus must be positive");
    let a = p.a.rem_euclid(m);
    let b = p.b.rem_euclid(m);
    let g = a.gcd(&m);
    if b % g != 0 {
        return None;
    }
    let m2 = m / g;
    let l0 = if m2 == 1 { 0 } else { (b / g) * mod_inverse(a / g, m2) % m2 };
    // Least l ≥ lo with l ≡ l0 (mod m2).
    let l = p.lo + (l0 - p.lo).rem_euclid(m2);
    (l <= p.hi).then_some(l)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CyValue {
    Finite(u64),
    Infinite,
}

impl fmt::Display for CyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyValue::Finite(n) => write!(f, "Finite({n})"),
            CyValue::Infinite => write!(f, "Infinite"),
        }
    }
}

/// Rows of the classification table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Row {
    /// `(Δ, r/m_Δ, 1)` with `Δ ∈ {A_1, D_{2n}, E_7, E_8}`.
    TorsionOneSelfDual,
    /// `(Δ, r/m_Δ, 1)` otherwise.
    TorsionOneGeneric,
    /// `(A_{2n+1}, r, 2)`.
    ATorsionTwo,
    /// `(D_n, r, 2)`, `r` odd.
    DTorsionTwoOdd,
    /// `(D_n, r, 2)`, `r` even.
    DTorsionTwoEven,
    /// `(D_4, r, 3)`.
    DTorsionThree,
    /// `(E_6, r, 2)`.
    ETorsionTwo,
    /// Nonstandard `(D_{3n}, 1/3, 1)`.
    Nonstandard,
}

/// A classification with the data needed to re-check it.
#[derive(Debug, Clone, Serialize)]
pub struct CyResult {
    pub value: CyValue,
    pub row: Row,
    /// Branch of the row that applied, e.g. `"gcd ≠ 1"` or `"2 ∤ r, p ≠ 2"`.
    pub branch: String,
    pub solution_l: Option<i64>,
    pub congruence: Option<CongruenceProblem>,
    pub flags: Vec<String>,
    pub checks: Vec<String>,
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn infinite(row: Row, branch: &str) -> CyResult {
    CyResult { value: CyValue::Infinite, row, branch: branch.into(), solution_l: None, congruence: None, flags: vec![], checks: vec![] }
}

/// Solves the congruence, maps `l` to the row's value and audits minimality.
fn finite(row: Row, branch: &str, p: CongruenceProblem, value: impl Fn(i64) -> i64) -> Result<CyResult, ClassifyError> {
    let l = solve_min_congruence(&p)
        .ok_or_else(|| ClassifyError::InadmissibleType(format!("{row:?}: congruence {}·l ≡ {} (mod {}) has no solution in [{}, {}]", p.a, p.b, p.modulus, p.lo, p.hi)))?;
    let mut checks = vec![format!("{} | {}·{} − {}", p.modulus, p.a, l, p.b)];
    if !p.holds(l) {
        return Err(ClassifyError::InadmissibleType("congruence audit failed".into()));
    }
    if (p.lo..l).any(|k| p.holds(k)) {
        return Err(ClassifyError::InadmissibleType("minimality audit failed".into()));
    }
    checks.push(format!("no smaller l in [{}, {}]", p.lo, l));
    let v = value(l);
    Ok(CyResult { value: CyValue::Finite(v as u64), row, branch: branch.into(), solution_l: Some(l), congruence: Some(p), flags: vec![], checks })
}

/// Stable Calabi–Yau dimension of type `t` over a field of characteristic `p`
/// (0 for the rationals; "p ≠ 2" covers it).
pub fn scydim(t: &AsashibaType, p: u32) -> Result<CyResult, ClassifyError> {
    if p != 0 && !crate::exactlin::is_prime(p as u64) {
        return Err(ClassifyError::BadCharacteristic(p));
    }
    t.validate()?;
    let char2 = p == 2;
    if !t.standard {
        let n = (t.tree.index() / 3) as u64;
        let mut r = infinite(Row::Nonstandard, "4n − 3");
        r.value = CyValue::Finite(4 * n - 3);
        r.checks.push(format!("n = {n}"));
        return Ok(r);
    }
    let mut res = match (t.tree, t.torsion) {
        (tree, 1) => {
            let m = tree.m_delta();
            let r = t.normalized_r().ok_or_else(|| ClassifyError::InadmissibleType(t.to_string()))?;
            let (ri, mi) = (r as i64, m as i64);
            let self_dual = match tree {
                TreeClass::A(1) => true,
                TreeClass::D(n) => n % 2 == 0,
                TreeClass::E(n) => n == 7 || n == 8,
                _ => false,
            };
            let mut res = if self_dual {
                let h = m.div_ceil(2);
                if gcd(h, r) != 1 {
                    infinite(Row::TorsionOneSelfDual, "((m_Δ+1)/2, r) ≠ 1")
                } else if r % 2 == 0 || char2 {
                    // r | (l−1)h + 1  ⇔  r | h·l − (h − 1).
                    let cp = CongruenceProblem { a: h as i64, b: h as i64 - 1, modulus: ri, lo: 1, hi: ri };
                    finite(Row::TorsionOneSelfDual, "2 | r or p = 2", cp, |l| l)?
                } else {
                    let cp = CongruenceProblem { a: mi + 1, b: -1, modulus: ri, lo: 0, hi: ri - 1 };
                    finite(Row::TorsionOneSelfDual, "2 ∤ r and p ≠ 2", cp, |l| 1 + 2 * l)?
                }
            } else if gcd(m + 1, r) != 1 {
                infinite(Row::TorsionOneGeneric, "(m_Δ+1, r) ≠ 1")
            } else {
                let cp = CongruenceProblem { a: mi + 1, b: -1, modulus: ri, lo: 0, hi: ri - 1 };
                finite(Row::TorsionOneGeneric, "(m_Δ+1, r) = 1", cp, |l| 1 + 2 * l)?
            };
            res.checks.insert(0, format!("r = f·m_Δ = {r}, m_Δ = {m}"));
            if matches!(tree, TreeClass::D(_)) && t.freq_den == 3 {
                res.flags.push("assumed-normalization".into());
            }
            res
        }
        (TreeClass::A(k), 2) => {
            let n = ((k - 1) / 2) as u64;
            let r = t.freq_num;
            let mut res = if gcd(r + n + 1, 2 * r) != 1 {
                infinite(Row::ATorsionTwo, "(r+n+1, 2r) ≠ 1")
            } else {
                let cp = CongruenceProblem { a: (r + n + 1) as i64, b: 1, modulus: 2 * r as i64, lo: 1, hi: 2 * r as i64 };
                finite(Row::ATorsionTwo, "(r+n+1, 2r) = 1", cp, |l| l * (2 * n as i64 + 1) - 1)?
            };
            if n % 2 == 1 {
                res.flags.push("odd-n: resolution terms not tabulated; brute force still applies".into());
            }
            res
        }
        (TreeClass::D(k), 2) => {
            let n = k as u64;
            let r = t.freq_num;
            if r % 2 == 1 {
                if gcd(n - 1, r) != 1 {
                    infinite(Row::DTorsionTwoOdd, "(n−1, r) ≠ 1")
                } else {
                    let md = (r * (2 * n - 3)) as i64;
                    let cp = CongruenceProblem { a: 2 * n as i64 - 2, b: n as i64 - 2, modulus: md, lo: 1, hi: md - 1 };
                    finite(Row::DTorsionTwoOdd, "(n−1, r) = 1", cp, |l| 2 * l)?
                }
            } else if gcd(n - 1, r) != 1 || !char2 {
                infinite(Row::DTorsionTwoEven, "(n−1, r) ≠ 1 or p ≠ 2")
            } else {
                let cp = CongruenceProblem { a: n as i64 - 1, b: 1, modulus: 2 * r as i64, lo: 1, hi: 2 * r as i64 };
                finite(Row::DTorsionTwoEven, "(n−1, r) = 1 and p = 2", cp, |l| l * (2 * n as i64 - 3) - 1)?
            }
        }
        (TreeClass::D(4), 3) => infinite(Row::DTorsionThree, "unconditional"),
        (TreeClass::E(6), 2) => {
            let r = t.freq_num;
            if gcd(6, r) != 1 {
                infinite(Row::ETorsionTwo, "(6, r) ≠ 1")
            } else {
                let md = 11 * r as i64;
                let cp = CongruenceProblem { a: 12, b: 5, modulus: md, lo: 1, hi: md - 1 };
                finite(Row::ETorsionTwo, "(6, r) = 1", cp, |l| 2 * l)?
            }
        }
        _ => return Err(ClassifyError::InadmissibleType(t.to_string())),
    };
    res.checks.push(format!("p = {p}"));
    Ok(res)
}

/// Parameter families for `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepPattern {
    /// `(A_{2n+1}, r, 2)`.
    ATorsionTwo,
    /// `(D_n, r, 2)`, `n ≥ 4`.
    DTorsionTwo,
    /// `(D_4, r, 3)`; `n` ignored.
    DTorsionThree,
    /// `(E_6, r, 2)`; `n` ignored.
    ETorsionTwo,
    /// Nonstandard `(D_{3n}, 1/3, 1)`; `r` ignored.
    Nonstandard,
    /// `(A_n, r/n, 1)`.
    ATorsionOne,
    /// `(D_n, r, 1)`.
    DTorsionOne,
}

impl SweepPattern {
    pub fn parse(s: &str) -> Option<SweepPattern> {
        Some(match s {
            "A2" => SweepPattern::ATorsionTwo,
            "D2" => SweepPattern::DTorsionTwo,
            "D4:3" | "D3" => SweepPattern::DTorsionThree,
            "E6:2" | "E2" => SweepPattern::ETorsionTwo,
            "nonstd" => SweepPattern::Nonstandard,
            "A1" => SweepPattern::ATorsionOne,
            "D1" => SweepPattern::DTorsionOne,
            _ => return None,
        })
    }

    /// The type for parameters `(n, r)`, if admissible.
    pub fn instance(&self, n: u32, r: u64) -> Option<AsashibaType> {
        let t = match self {
            SweepPattern::ATorsionTwo => AsashibaType::standard(TreeClass::A(2 * n + 1), r, 2),
            SweepPattern::DTorsionTwo => AsashibaType::standard(TreeClass::D(n), r, 2),
            SweepPattern::DTorsionThree => AsashibaType::standard(TreeClass::D(4), r, 3),
            SweepPattern::ETorsionTwo => AsashibaType::standard(TreeClass::E(6), r, 2),
            SweepPattern::Nonstandard => AsashibaType::nonstandard(n),
            SweepPattern::ATorsionOne => AsashibaType::new(TreeClass::A(n), r, n as u64, 1, true),
            SweepPattern::DTorsionOne => AsashibaType::standard(TreeClass::D(n), r, 1),
        };
        t.validate().ok().map(|_| t)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub r: u64,
    pub p: u32,
    #[serde(rename = "type")]
    pub type_name: String,
    pub result: Option<CyResult>,
    pub error: Option<String>,
}

/// Grid evaluation over `n ∈ ns`, `r ∈ rs`, `p ∈ chars`; inadmissible
/// parameter combinations are skipped.
pub fn sweep(pattern: SweepPattern, ns: impl IntoIterator<Item = u32> + Clone, rs: impl IntoIterator<Item = u64> + Clone, chars: &[u32]) -> Vec<SweepRow> {
    let mut cells = Vec::new();
    for n in ns {
        for r in rs.clone() {
            if let Some(t) = pattern.instance(n, r) {
                cells.extend(chars.iter().map(|&p| (n, r, p, t)));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(n, r, p, t)| {
            let (result, error) = match scydim(&t, p) {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            SweepRow { n, r, p, type_name: t.to_string(), result, error }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::parse_family;
    use crate::families::FamilySpec;

    fn ty(s: &str) -> AsashibaType {
        match parse_family(s).unwrap() {
            FamilySpec::Type(t) => t,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn m_delta_values() {
        assert_eq!(m_delta(TreeClass::A(5)), 5);
        assert_eq!(m_delta(TreeClass::D(4)), 5);
        assert_eq!(m_delta(TreeClass::E(6)), 11);
        assert_eq!(m_delta(TreeClass::E(7)), 17);
        assert_eq!(m_delta(TreeClass::E(8)), 29);
    }

    #[test]
    fn congruence_examples() {
        assert_eq!(solve_min_congruence(&CongruenceProblem { a: 12, b: 5, modulus: 11, lo: 0, hi: 10 }), Some(5));
        assert_eq!(solve_min_congruence(&CongruenceProblem { a: 4, b: 1, modulus: 2, lo: 0, hi: 100 }), None);
        assert_eq!(solve_min_congruence(&CongruenceProblem { a: 1, b: 0, modulus: 7, lo: 1, hi: 7 }), Some(7));
        assert_eq!(solve_min_congruence(&CongruenceProblem { a: 3, b: 2, modulus: 1, lo: 4, hi: 9 }), Some(4));
    }

    #[test]
    fn table_examples() {
        assert_eq!(scydim(&ty("D6:nonstd"), 2).unwrap().value, CyValue::Finite(5));
        assert_eq!(scydim(&ty("A5:r=2:t=2"), 2).unwrap().value, CyValue::Finite(4));
        assert_eq!(scydim(&ty("D4:r=2:t=2"), 2).unwrap().value, CyValue::Finite(14));
        assert_eq!(scydim(&ty("D4:r=2:t=2"), 3).unwrap().value, CyValue::Infinite);
        assert_eq!(scydim(&ty("D4:r=2:t=2"), 0).unwrap().value, CyValue::Infinite);
        assert_eq!(scydim(&ty("E6:r=1:t=2"), 0).unwrap().value, CyValue::Finite(10));
        assert_eq!(scydim(&ty("D4:r=7:t=3"), 5).unwrap().value, CyValue::Infinite);
        assert_eq!(scydim(&ty("A5:r=1:t=2"), 0).unwrap().value, CyValue::Infinite);
    }

    #[test]
    fn normalization_flag() {
        let r = scydim(&ty("D6:r=1/3:t=1"), 0).unwrap();
        assert!(r.flags.iter().any(|f| f == "assumed-normalization"));
        assert!(scydim(&ty("D6:r=1:t=1"), 0).unwrap().flags.is_empty());
    }

    #[test]
    fn sweep_counts() {
        assert_eq!(sweep(SweepPattern::ATorsionTwo, 1..=4, 1..=6, &[0, 2, 3]).len(), 72);
        assert!(sweep(SweepPattern::ATorsionTwo, 1..1, 1..=6, &[0]).is_empty());
    }
}
