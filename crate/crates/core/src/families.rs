//! Asashiba types and the concrete bound quiver algebras attached to the
//! constructible ones, with their automorphism σ, Frobenius form and the
//! closed-form terms of the minimal bimodule resolution.
//!
//! Vertex labels mirror the index notation: `i` for a plain vertex of Z/r,
//! `h<i>,<j>` for (î, j), `<i>,<j>` for (i, j) and `h<i>` for a lone î.
//! Residues are canonical in `[1, r]` and `[1, 2r]`; the nonstandard family
//! uses `0 .. n-1`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    build_algebra_retry, nakayama_automorphism, verify_frobenius, AlgebraError, AlgebraMorphism, BoundQuiverAlgebra, Elem, FrobeniusForm, Path, Quiver, Relation,
};
use crate::exactlin::{Field, Matrix, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error("nonstandard algebras require characteristic 2, got {0}")]
    WrongCharacteristic(String),
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("cannot parse type '{0}'")]
    Parse(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TreeClass {
    A(u32),
    D(u32),
    E(u32),
}

impl TreeClass {
    pub fn index(&self) -> u32 {
        match *self {
            TreeClass::A(n) | TreeClass::D(n) | TreeClass::E(n) => n,
        }
    }

    /// The constant m_Δ: n, 2n-3, 11, 17, 29 for A_n, D_n, E_6, E_7, E_8.
    pub fn m_delta(&self) -> u64 {
        match *self {
            TreeClass::A(n) => n as u64,
            TreeClass::D(n) => 2 * n as u64 - 3,
            TreeClass::E(6) => 11,
            TreeClass::E(7) => 17,
            TreeClass::E(8) => 29,
            TreeClass::E(n) => panic!("no tree class E_{n}"),
        }
    }

    pub fn is_valid(&self) -> bool {
        match *self {
            TreeClass::A(n) => n >= 1,
            TreeClass::D(n) => n >= 4,
            TreeClass::E(n) => (6..=8).contains(&n),
        }
    }
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeClass::A(n) => write!(f, "A{n}"),
            TreeClass::D(n) => write!(f, "D{n}"),
            TreeClass::E(n) => write!(f, "E{n}"),
        }
    }
}

/// Type (Δ, f, t) with frequency `f = freq_num / freq_den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct AsashibaType {
    pub tree: TreeClass,
    pub freq_num: u64,
    pub freq_den: u64,
    pub torsion: u32,
    pub standard: bool,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl AsashibaType {
    pub fn new(tree: TreeClass, freq_num: u64, freq_den: u64, torsion: u32, standard: bool) -> AsashibaType {
        let g = gcd(freq_num, freq_den).max(1);
        AsashibaType { tree, freq_num: freq_num / g, freq_den: freq_den / g, torsion, standard }
    }

    pub fn standard(tree: TreeClass, r: u64, torsion: u32) -> AsashibaType {
        AsashibaType::new(tree, r, 1, torsion, true)
    }

    /// Nonstandard (D_{3n}, 1/3, 1).
    pub fn nonstandard(n: u32) -> AsashibaType {
        AsashibaType::new(TreeClass::D(3 * n), 1, 3, 1, false)
    }

    /// Integer frequency, when the frequency is integral.
    pub fn r(&self) -> Option<u64> {
        (self.freq_den == 1).then_some(self.freq_num)
    }

    /// r := f·m_Δ, the parameter keyed by the torsion-1 rows.
    pub fn normalized_r(&self) -> Option<u64> {
        let m = self.tree.m_delta() * self.freq_num;
        m.is_multiple_of(self.freq_den).then(|| m / self.freq_den)
    }

    /// Checks the type against the nine shapes that occur.
    pub fn validate(&self) -> Result<(), FamilyError> {
        let bad = || FamilyError::UnsupportedType(self.to_string());
        if !self.tree.is_valid() || self.freq_num == 0 {
            return Err(bad());
        }
        let n = self.tree.index();
        if !self.standard {
            return if matches!(self.tree, TreeClass::D(_)) && n.is_multiple_of(3) && n >= 6 && self.freq_num == 1 && self.freq_den == 3 && self.torsion == 1 {
                Ok(())
            } else {
                Err(bad())
            };
        }
        let ok = match (self.tree, self.torsion) {
            (TreeClass::A(_), 1) => self.normalized_r().is_some(),
            (TreeClass::A(m), 2) => m % 2 == 1 && m >= 3 && self.freq_den == 1,
            (TreeClass::D(_), 1) => self.freq_den == 1 || (self.freq_den == 3 && n.is_multiple_of(3) && n >= 6),
            (TreeClass::D(_), 2) => self.freq_den == 1,
            (TreeClass::D(4), 3) => self.freq_den == 1,
            (TreeClass::E(_), 1) => self.freq_den == 1,
            (TreeClass::E(6), 2) => self.freq_den == 1,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for AsashibaType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.standard {
            return write!(f, "{}:nonstd", self.tree);
        }
        if self.freq_den == 1 {
            write!(f, "{}:r={}:t={}", self.tree, self.freq_num, self.torsion)
        } else {
            write!(f, "{}:r={}/{}:t={}", self.tree, self.freq_num, self.freq_den, self.torsion)
        }
    }
}

/// Anything the constructors accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FamilySpec {
    Type(AsashibaType),
    /// k[t]/t^n.
    Truncated(u32),
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Type(t) => write!(f, "{t}"),
            FamilySpec::Truncated(n) => write!(f, "trunc:{n}"),
        }
    }
}

/// Parses `A5:r=2:t=2`, `D6:nonstd`, `D6:r=1/3:t=1`, `E6:r=1:t=2`, `trunc:4`.
pub fn parse_family(s: &str) -> Result<FamilySpec, FamilyError> {
    let err = || FamilyError::Parse(s.to_string());
    let s = s.trim();
    if let Some(n) = s.strip_prefix("trunc:") {
        let n: u32 = n.parse().map_err(|_| err())?;
        if n == 0 {
            return Err(err());
        }
        return Ok(FamilySpec::Truncated(n));
    }
    let mut parts = s.split(':');
    let head = parts.next().ok_or_else(err)?;
    let (letter, idx) = head.split_at(1.min(head.len()));
    let idx: u32 = idx.parse().map_err(|_| err())?;
    let tree = match letter {
        "A" | "a" => TreeClass::A(idx),
        "D" | "d" => TreeClass::D(idx),
        "E" | "e" => TreeClass::E(idx),
        _ => return Err(err()),
    };
    let mut freq = None;
    let mut torsion = None;
    let mut standard = true;
    for p in parts {
        if p == "nonstd" {
            standard = false;
        } else if let Some(v) = p.strip_prefix("r=").or_else(|| p.strip_prefix("f=")) {
            let (a, b) = match v.split_once('/') {
                Some((a, b)) => (a.parse::<u64>().map_err(|_| err())?, b.parse::<u64>().map_err(|_| err())?),
                None => (v.parse::<u64>().map_err(|_| err())?, 1),
            };
            if b == 0 {
                return Err(err());
            }
            freq = Some((a, b));
        } else if let Some(v) = p.strip_prefix("t=") {
            torsion = Some(v.parse::<u32>().map_err(|_| err())?);
        } else {
            return Err(err());
        }
    }
    let t = if standard {
        let (a, b) = freq.ok_or_else(err)?;
        AsashibaType::new(tree, a, b, torsion.ok_or_else(err)?, true)
    } else {
        if freq.is_some_and(|f| f != (1, 3)) || torsion.is_some_and(|t| t != 1) || !matches!(tree, TreeClass::D(_)) || !idx.is_multiple_of(3) {
            return Err(err());
        }
        AsashibaType::nonstandard(idx / 3)
    };
    t.validate()?;
    Ok(FamilySpec::Type(t))
}

/// Multiset of indecomposable projective bimodules P_[v][u] = Ae_v ⊗ e_uA,
/// kept sorted so that equality is multiset equality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectiveBimodulePattern {
    pub summands: Vec<(String, String)>,
}

impl ProjectiveBimodulePattern {
    pub fn new(mut summands: Vec<(String, String)>) -> ProjectiveBimodulePattern {
        summands.sort();
        ProjectiveBimodulePattern { summands }
    }

    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }
}

impl fmt::Display for ProjectiveBimodulePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.summands.iter().map(|(v, u)| format!("P[{v}][{u}]")).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// Algebra with its companion data.
#[derive(Debug, Clone)]
pub struct FamilyBundle {
    pub spec: FamilySpec,
    pub algebra: BoundQuiverAlgebra,
    pub sigma: AlgebraMorphism,
    pub eps: FrobeniusForm,
    /// Quasi-period of the resolution; 0 when not applicable.
    pub period: usize,
    pub vertex_index: BTreeMap<String, usize>,
}

impl FamilyBundle {
    pub fn vertex(&self, label: &str) -> Option<usize> {
        self.vertex_index.get(label).copied()
    }
}

/// Canonical residue of `i` in `[1, m]`.
pub fn res1(i: i64, m: i64) -> i64 {
    (i - 1).rem_euclid(m) + 1
}

fn hat_label(i: i64, j: i64, r: i64) -> String {
    format!("h{},{}", res1(i, 2 * r), j)
}

fn plain_label(i: i64, r: i64) -> String {
    format!("{}", res1(i, r))
}

fn pair_label(i: i64, j: i64, r: i64) -> String {
    format!("{},{}", res1(i, r), j)
}

fn lone_hat_label(i: i64, r: i64) -> String {
    format!("h{}", res1(i, 2 * r))
}

struct Builder {
    q: Quiver,
    field: Field,
    rels: Vec<Relation>,
}

impl Builder {
    fn new(field: Field) -> Builder {
        Builder { q: Quiver::new(), field, rels: Vec::new() }
    }
    fn v(&mut self, l: String) -> usize {
        self.q.add_vertex(l)
    }
    fn vi(&self, l: &str) -> usize {
        self.q.vertex_index(l).unwrap_or_else(|| panic!("vertex {l}"))
    }
    fn arrow(&mut self, l: String, s: &str, t: &str) {
        let (s, t) = (self.vi(s), self.vi(t));
        self.q.add_arrow(l, s, t);
    }
    fn ai(&self, l: &str) -> usize {
        self.q.arrow_index(l).unwrap_or_else(|| panic!("arrow {l}"))
    }
    /// Path from arrow labels in traversal order.
    fn path(&self, labels: &[String]) -> Path {
        let idx: Vec<usize> = labels.iter().map(|l| self.ai(l)).collect();
        self.q.path(&idx).unwrap_or_else(|| panic!("non-composable {labels:?}"))
    }
    fn rel(&mut self, terms: Vec<(i64, Vec<String>)>) {
        let t = terms.into_iter().map(|(c, p)| (self.field.from_i64(c), self.path(&p))).collect();
        self.rels.push(Relation::new(t));
    }
}

fn vertex_map(q: &Quiver) -> BTreeMap<String, usize> {
    q.vertices.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect()
}

/// Morphism from images of vertices (as vertex labels) and of arrows (as
/// signed arrow labels, or general elements).
fn morphism_from_labels(a: &BoundQuiverAlgebra, vmap: impl Fn(&str) -> String, amap: impl Fn(&str) -> Elem) -> Result<AlgebraMorphism, AlgebraError> {
    let q = a.quiver();
    let vs: Vec<Elem> = q.vertices.iter().map(|l| a.vertex_elem(q.vertex_index(&vmap(l)).expect("vertex image"))).collect();
    let ars: Vec<Elem> = q.arrows.iter().map(|ar| amap(&ar.label)).collect();
    AlgebraMorphism::from_generators(a, &vs, &ars)
}

fn signed_arrow(a: &BoundQuiverAlgebra, label: &str, sign: i64) -> Elem {
    let x = a.arrow_elem(a.quiver().arrow_index(label).unwrap_or_else(|| panic!("arrow {label}")));
    let s = a.field().from_i64(sign);
    x.iter().map(|c| c * &s).collect()
}

/// Sign of σ and of ν on α_{î,0} in the (A_{2n+1}, r, 2) family: `+1` for
/// r ≤ i ≤ 2r-1 (mod 2r).
fn sign_a0(i: i64, r: i64) -> i64 {
    let x = i.rem_euclid(2 * r);
    if (r..2 * r).contains(&x) {
        1
    } else {
        -1
    }
}

/// Sign on α_{î,n}: `+1` for r-1 ≤ i ≤ 2r-2 (mod 2r).
fn sign_an(i: i64, r: i64) -> i64 {
    let x = i.rem_euclid(2 * r);
    if (r - 1..=2 * r - 2).contains(&x) {
        1
    } else {
        -1
    }
}

/// (A_{2n+1}, r, 2). Constructible for any n ≥ 1.
fn build_a(n: i64, r: i64, field: Field) -> Result<FamilyBundle, FamilyError> {
    let mut b = Builder::new(field);
    for i in 1..=r {
        b.v(plain_label(i, r));
    }
    for i in 1..=2 * r {
        for j in 1..=n {
            b.v(hat_label(i, j, r));
        }
    }
    let al = |i: i64, j: i64| format!("a{},{}", res1(i, 2 * r), j);
    for i in 1..=2 * r {
        b.arrow(al(i, 0), &plain_label(i, r), &hat_label(i, 1, r));
        for j in 1..n {
            b.arrow(al(i, j), &hat_label(i, j, r), &hat_label(i, j + 1, r));
        }
        b.arrow(al(i, n), &hat_label(i, n, r), &plain_label(i + 1, r));
    }
    // Traversal-order arrow lists.
    let full = |i: i64| -> Vec<String> { (0..=n).map(|j| al(i, j)).collect() };
    for i in 1..=2 * r {
        b.rel(vec![(1, vec![al(i, n), al(i + r + 1, 0)])]);
    }
    for i in 1..=r {
        b.rel(vec![(1, full(i)), (1, full(i + r))]);
    }
    for i in 1..=2 * r {
        for j in 1..n {
            let mut p: Vec<String> = (j..=n).map(|k| al(i, k)).collect();
            p.extend((0..=j).map(|k| al(i + 1, k)));
            b.rel(vec![(1, p)]);
        }
    }
    let alg = build_algebra_retry(&b.q, &b.rels, field, (n + 3) as usize, 8 * (n + 3) as usize)?;

    let shift = r + n + 1;
    let sigma = morphism_from_labels(
        &alg,
        |l| {
            if let Some(rest) = l.strip_prefix('h') {
                let (i, j) = rest.split_once(',').unwrap();
                hat_label(i.parse::<i64>().unwrap() + shift, j.parse().unwrap(), r)
            } else {
                plain_label(l.parse::<i64>().unwrap() + n + 1, r)
            }
        },
        |l| {
            let (i, j) = l[1..].split_once(',').unwrap();
            let (i, j): (i64, i64) = (i.parse().unwrap(), j.parse().unwrap());
            let sign = if j == 0 {
                sign_a0(i, r)
            } else if j == n {
                sign_an(i, r)
            } else {
                1
            };
            signed_arrow(&alg, &al(i + shift, j), sign)
        },
    )?;

    let eps = FrobeniusForm::from_path_values(&alg, |p| {
        if p.len() as i64 != n + 1 {
            return field.zero();
        }
        let first = &alg.quiver().arrows[p.arrows[0]].label;
        let (i, j) = first[1..].split_once(',').unwrap();
        let (i, j): (i64, i64) = (i.parse().unwrap(), j.parse().unwrap());
        // α_{î,n}…α_{î,0} with -1 ≤ i ≤ r-2 carries -1.
        if j == 0 && sign_an(i, r) == -1 {
            field.from_i64(-1)
        } else {
            field.one()
        }
    })?;
    finish(FamilySpec::Type(AsashibaType::standard(TreeClass::A((2 * n + 1) as u32), r as u64, 2)), alg, sigma, eps, (2 * n + 1) as usize)
}

/// (D_n, r, 2). Constructible for any r ≥ 1.
fn build_d(n: i64, r: i64, field: Field) -> Result<FamilyBundle, FamilyError> {
    let mut b = Builder::new(field);
    for i in 1..=r {
        for j in 1..=n - 2 {
            b.v(pair_label(i, j, r));
        }
    }
    for i in 1..=2 * r {
        b.v(lone_hat_label(i, r));
    }
    let g = |i: i64| format!("g{}", res1(i, 2 * r));
    let be = |i: i64| format!("b{}", res1(i, 2 * r));
    let al = |i: i64, j: i64| format!("a{},{}", res1(i, r), j);
    for i in 1..=r {
        for j in 1..=n - 3 {
            b.arrow(al(i, j), &pair_label(i, j, r), &pair_label(i, j + 1, r));
        }
    }
    for i in 1..=2 * r {
        b.arrow(be(i), &lone_hat_label(i, r), &pair_label(i + 1, 1, r));
        b.arrow(g(i), &pair_label(i, n - 2, r), &lone_hat_label(i, r));
    }
    let chain = |i: i64, from: i64, to: i64| -> Vec<String> { (from..=to).map(|j| al(i, j)).collect() };
    for i in 1..=2 * r {
        let mut p = vec![be(i - 1)];
        p.extend(chain(i, 1, n - 3));
        p.push(g(i + r));
        b.rel(vec![(1, p)]);
    }
    for i in 1..=r {
        b.rel(vec![(1, vec![g(i), be(i)]), (-1, vec![g(i + r), be(i + r)])]);
    }
    for i in 1..=r {
        for j in 1..=n - 3 {
            let mut p = chain(i, j, n - 3);
            p.push(g(i));
            p.push(be(i));
            p.extend(chain(i + 1, 1, j));
            b.rel(vec![(1, p)]);
        }
    }
    let alg = build_algebra_retry(&b.q, &b.rels, field, (n + 1) as usize, 8 * (n + 1) as usize)?;

    let sh = n - 1;
    let shh = n - 1 + r * n;
    let sigma = morphism_from_labels(
        &alg,
        |l| {
            if let Some(rest) = l.strip_prefix('h') {
                lone_hat_label(rest.parse::<i64>().unwrap() + shh, r)
            } else {
                let (i, j) = l.split_once(',').unwrap();
                pair_label(i.parse::<i64>().unwrap() + sh, j.parse().unwrap(), r)
            }
        },
        |l| match &l[..1] {
            "a" => {
                let (i, j) = l[1..].split_once(',').unwrap();
                signed_arrow(&alg, &al(i.parse::<i64>().unwrap() + sh, j.parse().unwrap()), 1)
            }
            "b" => signed_arrow(&alg, &be(l[1..].parse::<i64>().unwrap() + shh), 1),
            _ => {
                let i: i64 = l[1..].parse().unwrap();
                let sign = if i % r == 0 { 1 } else { -1 };
                signed_arrow(&alg, &g(i + shh), sign)
            }
        },
    )?;
    let eps = FrobeniusForm::from_path_values(&alg, |p| if p.len() as i64 == n - 1 { field.one() } else { field.zero() })?;
    finish(FamilySpec::Type(AsashibaType::standard(TreeClass::D(n as u32), r as u64, 2)), alg, sigma, eps, (2 * n - 3) as usize)
}

/// Nonstandard (D_{3n}, 1/3, 1); characteristic 2 only.
fn build_nonstandard(n: i64, field: Field) -> Result<FamilyBundle, FamilyError> {
    if field.characteristic() != 2 {
        return Err(FamilyError::WrongCharacteristic(field.to_string()));
    }
    let mut b = Builder::new(field);
    for i in 0..n {
        b.v(i.to_string());
    }
    let a = |i: i64| format!("a{i}");
    for i in 0..n - 1 {
        b.arrow(a(i), &i.to_string(), &(i + 1).to_string());
    }
    b.arrow(a(n - 1), &(n - 1).to_string(), "0");
    b.arrow("b".to_string(), "0", "0");
    // ν_i = α_{n-1}…α_i (i → 0), μ_i = α_{i-1}…α_0 (0 → i), traversal order.
    let nu = |i: i64| -> Vec<String> { (i..n).map(a).collect() };
    let mu = |i: i64| -> Vec<String> { (0..i).map(a).collect() };
    b.rel(vec![(1, vec![a(n - 1), a(0)]), (1, vec![a(n - 1), "b".into(), a(0)])]);
    b.rel(vec![(1, vec!["b".into(), "b".into()]), (-1, nu(0))]);
    // Zero relations run i → i+1 through 0; the cycle at i spans the socle of P_i.
    for i in 1..=(n - 2).max(1) {
        let mut p = nu(i);
        p.extend(mu(i + 1));
        b.rel(vec![(1, p)]);
    }
    let alg = build_algebra_retry(&b.q, &b.rels, field, (2 * n + 2) as usize, 16 * (n + 2) as usize)?;
    let beta = alg.arrow_elem(alg.quiver().arrow_index("b").unwrap());
    let b2 = alg.mul(&beta, &beta);
    let b3 = alg.mul(&b2, &beta);
    let img: Elem = beta.iter().zip(&b2).zip(&b3).map(|((x, y), z)| &(x + y) + z).collect();
    let sigma = morphism_from_labels(&alg, |l| l.to_string(), |l| if l == "b" { img.clone() } else { signed_arrow(&alg, l, 1) })?;
    let eps = symmetric_frobenius_form(&alg).ok_or(AlgebraError::Degenerate)?;
    finish(FamilySpec::Type(AsashibaType::nonstandard(n as u32)), alg, sigma, eps, (4 * n - 2) as usize)
}

/// First nondegenerate form vanishing on commutators: basis vectors of the
/// solution space in order, then their running sums.
pub fn symmetric_frobenius_form(a: &BoundQuiverAlgebra) -> Option<FrobeniusForm> {
    let n = a.dim();
    let f = a.field();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut row = vec![f.zero(); n];
            for (k, c) in a.structure(i, j) {
                row[*k] = &row[*k] + c;
            }
            for (k, c) in a.structure(j, i) {
                row[*k] = &row[*k] - c;
            }
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let sols = if rows.is_empty() { Matrix::identity(f, n).columns() } else { Matrix::from_rows(f, &rows).kernel_basis() };
    let mut cands: Vec<Vec<Scalar>> = sols.clone();
    let mut acc = vec![f.zero(); n];
    for s in &sols {
        acc = acc.iter().zip(s).map(|(x, y)| x + y).collect();
        cands.push(acc.clone());
    }
    cands.into_iter().map(|values| FrobeniusForm { values }).find(|e| verify_frobenius(a, e).is_ok())
}

fn build_truncated(n: u32, field: Field) -> Result<FamilyBundle, FamilyError> {
    let alg = crate::algebra::truncated_polynomial(n as usize, field);
    let mut values = vec![field.zero(); alg.dim()];
    values[alg.dim() - 1] = field.one();
    finish(FamilySpec::Truncated(n), alg.clone(), AlgebraMorphism::identity(&alg), FrobeniusForm { values }, 0)
}

fn finish(spec: FamilySpec, algebra: BoundQuiverAlgebra, sigma: AlgebraMorphism, eps: FrobeniusForm, period: usize) -> Result<FamilyBundle, FamilyError> {
    verify_frobenius(&algebra, &eps)?;
    if !sigma.is_bijective() {
        return Err(AlgebraError::NotMultiplicative("σ is not bijective".into()).into());
    }
    let vertex_index = vertex_map(algebra.quiver());
    Ok(FamilyBundle { spec, algebra, sigma, eps, period, vertex_index })
}

pub fn construct_family(spec: &FamilySpec, field: Field) -> Result<FamilyBundle, FamilyError> {
    match *spec {
        FamilySpec::Truncated(n) => build_truncated(n, field),
        FamilySpec::Type(t) => {
            t.validate()?;
            let idx = t.tree.index() as i64;
            match (t.tree, t.torsion, t.standard) {
                (TreeClass::A(m), 2, true) => build_a((m as i64 - 1) / 2, t.freq_num as i64, field),
                (TreeClass::D(_), 2, true) => build_d(idx, t.freq_num as i64, field),
                (TreeClass::D(_), 1, false) => build_nonstandard(idx / 3, field),
                _ => Err(FamilyError::UnsupportedType(t.to_string())),
            }
        }
    }
}

/// The resolution term Q_degree as a multiset of vertex pairs.
pub fn expected_resolution_term(spec: &FamilySpec, degree: usize) -> Result<ProjectiveBimodulePattern, FamilyError> {
    let t = match spec {
        FamilySpec::Type(t) => *t,
        // k[t]/t^n has the rank-one resolution A⊗A ← A⊗A ← ⋯.
        FamilySpec::Truncated(n) if *n >= 2 => return Ok(ProjectiveBimodulePattern::new(vec![("0".into(), "0".into())])),
        FamilySpec::Truncated(_) => return Err(FamilyError::UnsupportedType(spec.to_string())),
    };
    let d = degree as i64;
    match (t.tree, t.torsion, t.standard) {
        (TreeClass::A(m), 2, true) => {
            let n = (m as i64 - 1) / 2;
            if n % 2 != 0 {
                return Err(FamilyError::UnsupportedType(format!("{t}: resolution terms need even n")));
            }
            Ok(pattern_a(n, t.freq_num as i64, d))
        }
        (TreeClass::D(n), 2, true) => {
            let r = t.freq_num as i64;
            if r % 2 != 0 {
                return Err(FamilyError::UnsupportedType(format!("{t}: resolution terms need even r")));
            }
            Ok(pattern_d(n as i64, r, d))
        }
        (TreeClass::D(m), 1, false) => Ok(pattern_nonstandard(m as i64 / 3, d)),
        _ => Err(FamilyError::UnsupportedType(t.to_string())),
    }
}

/// Vertex of the A-family as (hat index or plain index, level); level 0 is a
/// plain vertex.
#[derive(Clone, Copy)]
struct AV(i64, i64);

fn pattern_a(n: i64, r: i64, degree: i64) -> ProjectiveBimodulePattern {
    let period = 2 * n + 1;
    let (l, t) = (degree / period, degree % period);
    let mut s: Vec<(AV, AV)> = Vec::new();
    if t % 2 == 0 {
        let m = t / 2;
        for i in 1..=r {
            s.push((AV(i + m, 0), AV(i, 0)));
        }
        for i in 1..=2 * r {
            for j in 1..=n - m {
                s.push((AV(i + m, j + m), AV(i, j)));
            }
            for j in n - m + 1..=n {
                s.push((AV(i + r + m, j + m - n), AV(i, j)));
            }
        }
    } else {
        let m = (t - 1) / 2;
        for i in 1..=2 * r {
            s.push((AV(i + m, m + 1), AV(i, 0)));
            for j in 1..=n - m - 1 {
                s.push((AV(i + m, j + m + 1), AV(i, j)));
            }
            s.push((AV(i + m + 1, 0), AV(i, n - m)));
            for j in n - m + 1..=n {
                s.push((AV(i + r + m + 1, j + m - n), AV(i, j)));
            }
        }
    }
    // σ^l on the first index: plain i ↦ i + l(n+1), (î, j) ↦ (î + l(r+n+1), j).
    let lab = |v: AV, shift: bool| -> String {
        let k = if shift { l } else { 0 };
        if v.1 == 0 {
            plain_label(v.0 + k * (n + 1), r)
        } else {
            hat_label(v.0 + k * (r + n + 1), v.1, r)
        }
    };
    ProjectiveBimodulePattern::new(s.into_iter().map(|(v, u)| (lab(v, true), lab(u, false))).collect())
}

/// Vertex of the D-family: `DV::Pair(i, j)` or `DV::Hat(i)`.
#[derive(Clone, Copy)]
enum DV {
    Pair(i64, i64),
    Hat(i64),
}

fn pattern_d(n: i64, r: i64, degree: i64) -> ProjectiveBimodulePattern {
    let period = 2 * n - 3;
    let (l, t) = (degree / period, degree % period);
    let mut s: Vec<(DV, DV)> = Vec::new();
    if t % 2 == 0 {
        let m = t / 2;
        for i in 1..=r {
            for j in 1..=n - 2 - m {
                s.push((DV::Pair(i + m, j + m), DV::Pair(i, j)));
            }
            for j in n - 1 - m..=n - 2 {
                s.push((DV::Pair(i + m, j + m - (n - 2)), DV::Pair(i, j)));
            }
        }
        for i in 1..=2 * r {
            s.push((DV::Hat(i + m * (r + 1)), DV::Hat(i)));
        }
    } else {
        let m = (t - 1) / 2;
        for i in 1..=r {
            for j in 1..=n - 3 - m {
                s.push((DV::Pair(i + m, j + m + 1), DV::Pair(i, j)));
            }
            for j in n - 1 - m..=n - 2 {
                s.push((DV::Pair(i + m + 1, j + m - (n - 2)), DV::Pair(i, j)));
            }
        }
        for i in 1..=2 * r {
            s.push((DV::Hat(i + m), DV::Pair(i, n - 2 - m)));
            s.push((DV::Pair(i + m + 1, m + 1), DV::Hat(i)));
        }
    }
    // σ^l on the first index: (i, j) ↦ (i + l(n-1), j), î ↦ î + l(n-1+rn).
    let lab = |v: DV, k: i64| -> String {
        match v {
            DV::Pair(i, j) => pair_label(i + k * (n - 1), j, r),
            DV::Hat(i) => lone_hat_label(i + k * (n - 1 + r * n), r),
        }
    };
    ProjectiveBimodulePattern::new(s.into_iter().map(|(v, u)| (lab(v, l), lab(u, 0))).collect())
}

fn t_even(n: i64, m: i64) -> Vec<(i64, i64)> {
    let mut s = vec![(0, 0)];
    for i in 1..=n - 1 - m {
        s.push((i + m, i));
    }
    for i in n - m..=n - 1 {
        s.push((i + m - (n - 1), i));
    }
    s
}

fn t_odd_prime(n: i64, m: i64) -> Vec<(i64, i64)> {
    let mut s = Vec::new();
    for i in 0..=n - 2 - m {
        s.push((i + m + 1, i));
    }
    for i in n - 1 - m..=n - 1 {
        s.push((i + m - (n - 1), i));
    }
    s
}

fn t_odd(n: i64, m: i64) -> Vec<(i64, i64)> {
    let mut s = t_odd_prime(n, m);
    s.push((0, 0));
    s
}

fn pattern_nonstandard(n: i64, degree: i64) -> ProjectiveBimodulePattern {
    // Degree t in 0..=2n-2 of the first half: T_{2m}; odd degrees 4m+1 → T,
    // 4m+3 → T'. The second half (odd n) swaps T and T' in odd degrees.
    let first_half = |t: i64, swap: bool| -> Vec<(i64, i64)> {
        if t % 2 == 0 {
            t_even(n, t / 2)
        } else {
            let m = (t - 1) / 2;
            let primed = (t % 4 == 3) != swap;
            if primed {
                t_odd_prime(n, m)
            } else {
                t_odd(n, m)
            }
        }
    };
    let s = if n % 2 == 0 {
        first_half(degree % (2 * n - 1), false)
    } else {
        let t = degree % (4 * n - 2);
        if t < 2 * n - 1 {
            first_half(t, false)
        } else {
            first_half(t - (2 * n - 1), true)
        }
    };
    ProjectiveBimodulePattern::new(s.into_iter().map(|(v, u)| (v.to_string(), u.to_string())).collect())
}

/// p_l(q) = #{s : 0 ≤ s ≤ l, 2r | q + s(r+n+1)}.
pub fn p_l(q: i64, l: i64, r: i64, n: i64) -> i64 {
    (0..=l).filter(|s| (q + s * (r + n + 1)).rem_euclid(2 * r) == 0).count() as i64
}

/// The element a = Σ_i (-1)^{Σ_{q=i-r+1}^{i} p_l(q)} e_i + Σ e_{î,j} whose
/// conjugation realizes ν̃σ^l on the (A_{2n+1}, r, 2) family. Verified
/// against `nu_sigma_l` on every basis element before returning.
pub fn witness_inner_element(bundle: &FamilyBundle, l: i64) -> Result<Elem, FamilyError> {
    let t = match bundle.spec {
        FamilySpec::Type(t @ AsashibaType { tree: TreeClass::A(_), torsion: 2, standard: true, .. }) => t,
        _ => return Err(FamilyError::UnsupportedType(bundle.spec.to_string())),
    };
    let n = (t.tree.index() as i64 - 1) / 2;
    let r = t.freq_num as i64;
    if l <= 0 || (l * (r + n + 1) - 1).rem_euclid(2 * r) != 0 {
        return Err(FamilyError::BadParameters(format!("2r ∤ l(r+n+1)-1 for l = {l}")));
    }
    let a = &bundle.algebra;
    let f = a.field();
    let mut w = a.zero();
    for i in 1..=r {
        let e: i64 = (i - r + 1..=i).map(|q| p_l(q, l, r, n)).sum();
        let v = bundle.vertex(&plain_label(i, r)).unwrap();
        w[a.vertex_basis(v)] = f.from_i64(if e % 2 == 0 { 1 } else { -1 });
    }
    for i in 1..=2 * r {
        for j in 1..=n {
            let v = bundle.vertex(&hat_label(i, j, r)).unwrap();
            w[a.vertex_basis(v)] = f.one();
        }
    }
    let nu = nakayama_automorphism(a, &bundle.eps)?;
    let mut phi = nu.clone();
    for _ in 0..l {
        phi = phi.compose(&bundle.sigma);
    }
    // a^{-1} = a here (a is a signed sum of orthogonal idempotents).
    let winv = w.clone();
    if a.mul(&w, &winv) != a.one() {
        return Err(FamilyError::BadParameters("witness is not invertible".into()));
    }
    for i in 0..a.dim() {
        let x = a.basis_elem(i);
        if a.mul(&a.mul(&winv, &x), &w) != phi.apply(&x) {
            return Err(FamilyError::BadParameters(format!("conjugation by the witness differs from ν̃σ^{l} on {}", a.basis()[i].display(a.quiver()))));
        }
    }
    Ok(w)
}

/// ν̃ ∘ σ^l.
pub fn nu_sigma_l(bundle: &FamilyBundle, l: usize) -> Result<AlgebraMorphism, FamilyError> {
    let mut phi = nakayama_automorphism(&bundle.algebra, &bundle.eps)?;
    for _ in 0..l {
        phi = phi.compose(&bundle.sigma);
    }
    Ok(phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_shorthands() {
        assert_eq!(parse_family("trunc:4").unwrap(), FamilySpec::Truncated(4));
        assert_eq!(parse_family("A5:r=2:t=2").unwrap(), FamilySpec::Type(AsashibaType::standard(TreeClass::A(5), 2, 2)));
        assert_eq!(parse_family("D6:nonstd").unwrap(), FamilySpec::Type(AsashibaType::nonstandard(2)));
        let t = parse_family("D6:r=1/3:t=1").unwrap();
        assert_eq!(t, FamilySpec::Type(AsashibaType::new(TreeClass::D(6), 1, 3, 1, true)));
        assert!(parse_family("D5:nonstd").is_err());
        assert!(parse_family("A4:r=1:t=2").is_err());
        assert!(parse_family("E9:r=1:t=1").is_err());
        assert!(parse_family("D5:r=1:t=3").is_err());
    }

    #[test]
    fn residues_are_one_based() {
        assert_eq!(res1(0, 4), 4);
        assert_eq!(res1(5, 4), 1);
        assert_eq!(res1(-1, 4), 3);
    }

    #[test]
    fn degree_zero_covers_the_diagonal() {
        for s in ["A5:r=2:t=2", "D4:r=2:t=2", "D6:nonstd"] {
            let spec = parse_family(s).unwrap();
            let b = construct_family(&spec, Field::fp(2)).unwrap();
            let q0 = expected_resolution_term(&spec, 0).unwrap();
            let diag = ProjectiveBimodulePattern::new(b.algebra.quiver().vertices.iter().map(|v| (v.clone(), v.clone())).collect());
            assert_eq!(q0, diag, "{s}");
        }
    }

    #[test]
    fn a5_degree_two_term() {
        let spec = parse_family("A5:r=2:t=2").unwrap();
        let mut want = Vec::new();
        for i in 1..=2 {
            want.push((plain_label(i + 1, 2), plain_label(i, 2)));
        }
        for i in 1..=4 {
            want.push((hat_label(i + 1, 2, 2), hat_label(i, 1, 2)));
            want.push((hat_label(i + 3, 1, 2), hat_label(i, 2, 2)));
        }
        assert_eq!(expected_resolution_term(&spec, 2).unwrap(), ProjectiveBimodulePattern::new(want));
    }

    #[test]
    fn nonstandard_degree_one_term() {
        let spec = parse_family("D6:nonstd").unwrap();
        let want = vec![("1".to_string(), "0".to_string()), ("0".into(), "1".into()), ("0".into(), "0".into())];
        assert_eq!(expected_resolution_term(&spec, 1).unwrap(), ProjectiveBimodulePattern::new(want));
    }

    #[test]
    fn parity_hypotheses_are_enforced() {
        assert!(expected_resolution_term(&parse_family("A7:r=2:t=2").unwrap(), 1).is_err());
        assert!(expected_resolution_term(&parse_family("D4:r=3:t=2").unwrap(), 1).is_err());
        assert!(construct_family(&parse_family("A7:r=1:t=2").unwrap(), Field::fp(3)).is_ok());
    }

    #[test]
    fn nonstandard_needs_char_two() {
        let spec = parse_family("D6:nonstd").unwrap();
        assert!(matches!(construct_family(&spec, Field::fp(3)), Err(FamilyError::WrongCharacteristic(_))));
    }

    #[test]
    fn p_l_by_enumeration() {
        // n = 2, r = 2, l = 1: r+n+1 = 5, s ∈ {0, 1}; 4 | q + 5s.
        let got: Vec<i64> = (0..4).map(|q| p_l(q, 1, 2, 2)).collect();
        assert_eq!(got, vec![1, 0, 0, 1]);
    }

    #[test]
    fn sigma_is_an_automorphism_shifting_vertices() {
        for (fam, p) in [("A5:r=2:t=2", 3), ("A3:r=1:t=2", 2), ("D4:r=2:t=2", 3), ("D5:r=1:t=2", 2), ("D6:nonstd", 2)] {
            let b = construct_family(&parse_family(fam).unwrap(), Field::fp(p)).unwrap();
            let a = &b.algebra;
            b.sigma.check_homomorphism(a).unwrap();
            assert!(b.sigma.is_bijective(), "{fam}");
            assert!(a.check_associativity(), "{fam}");
            assert!(b.sigma.vertex_permutation(a).is_some(), "{fam}: σ moves vertices to vertices");
        }
        // (A_5, 2, 2): î ↦ î+r+n+1 = î+5 on hat vertices, i ↦ i+n+1 = i+3 on plain ones.
        let b = construct_family(&parse_family("A5:r=2:t=2").unwrap(), Field::fp(3)).unwrap();
        let perm = b.sigma.vertex_permutation(&b.algebra).unwrap();
        let label = |v: usize| b.algebra.quiver().vertices[v].clone();
        assert_eq!(label(perm[b.vertex("h1,2").unwrap()]), "h2,2");
        assert_eq!(label(perm[b.vertex("1").unwrap()]), "2");
    }

    #[test]
    fn symmetric_forms_give_trivial_nakayama() {
        for (fam, p) in [("trunc:4", 3), ("D6:nonstd", 2), ("D9:nonstd", 2)] {
            let b = construct_family(&parse_family(fam).unwrap(), Field::fp(p)).unwrap();
            assert!(b.eps.is_symmetric(&b.algebra), "{fam}");
            assert!(nakayama_automorphism(&b.algebra, &b.eps).unwrap().is_identity(), "{fam}");
        }
        let b = construct_family(&parse_family("A5:r=2:t=2").unwrap(), Field::fp(3)).unwrap();
        assert!(!b.eps.is_symmetric(&b.algebra));
    }

    #[test]
    fn witness_realizes_nu_sigma() {
        let b = construct_family(&parse_family("A5:r=2:t=2").unwrap(), Field::fp(3)).unwrap();
        assert!(witness_inner_element(&b, 1).is_ok());
        assert!(witness_inner_element(&b, 2).is_err());
        assert_eq!(nu_sigma_l(&b, 0).unwrap(), nakayama_automorphism(&b.algebra, &b.eps).unwrap());
    }

    #[test]
    fn family_dimensions_regression() {
        // (family, dim, Loewy length, basis size by path length), computed once and frozen.
        let fixtures: [(&str, usize, usize, &[usize]); 8] = [
            ("A3:r=1:t=2", 10, 3, &[3, 4, 3]),
            ("A5:r=2:t=2", 44, 4, &[10, 12, 12, 10]),
            ("A9:r=2:t=2", 116, 6, &[18, 20, 20, 20, 20, 18]),
            ("D4:r=1:t=2", 18, 4, &[4, 5, 5, 4]),
            ("D4:r=2:t=2", 36, 4, &[8, 10, 10, 8]),
            ("D5:r=3:t=2", 84, 5, &[15, 18, 18, 18, 15]),
            ("D6:nonstd", 10, 4, &[2, 3, 4, 1]),
            ("D9:nonstd", 18, 5, &[3, 4, 6, 5]),
        ];
        for (fam, dim, ll, profile) in fixtures {
            let b = construct_family(&parse_family(fam).unwrap(), Field::fp(2)).unwrap();
            assert_eq!(b.algebra.dim(), dim, "{fam}");
            assert_eq!(b.algebra.loewy_length(), ll, "{fam}");
            assert_eq!(b.algebra.basis_length_profile(), profile, "{fam}");
        }
    }
}
