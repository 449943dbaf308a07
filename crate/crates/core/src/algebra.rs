//! Bound quiver algebras kQ/I with a path basis and structure constants.
//!
//! Multiplication is composition: for paths `p`, `q` the product `p·q` is
//! "first q, then p" and is nonzero only when `q` ends where `p` starts.
//! Hence `e_v · p = p` iff `p` ends at `v`, and `p · e_v = p` iff `p` starts
//! at `v`. Paths are stored in traversal order (first arrow first); the text
//! format writes them right to left.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::exactlin::{axpy, is_zero_vec, unit_vec, zero_vec, Field, LinError, Matrix, Scalar, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("length bound {bound} too small: some path of that length survives; retry with bound {suggested}")]
    BoundTooSmall { bound: usize, suggested: usize },
    #[error("relation is not admissible: {0}")]
    NotAdmissible(String),
    #[error("Frobenius form is degenerate")]
    Degenerate,
    #[error("map is not multiplicative: {0}")]
    NotMultiplicative(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("bad quiver: {0}")]
    BadQuiver(String),
    #[error(transparent)]
    Lin(#[from] LinError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub label: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Quiver {
    pub vertices: Vec<String>,
    pub arrows: Vec<Arrow>,
}

impl Quiver {
    pub fn new() -> Quiver {
        Quiver::default()
    }

    pub fn add_vertex(&mut self, label: impl Into<String>) -> usize {
        self.vertices.push(label.into());
        self.vertices.len() - 1
    }

    pub fn add_arrow(&mut self, label: impl Into<String>, src: usize, tgt: usize) -> usize {
        self.arrows.push(Arrow { label: label.into(), src, tgt });
        self.arrows.len() - 1
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == label)
    }

    pub fn arrow_index(&self, label: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.label == label)
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        let nv = self.vertices.len();
        for (i, a) in self.arrows.iter().enumerate() {
            if a.src >= nv || a.tgt >= nv {
                return Err(AlgebraError::BadQuiver(format!("arrow {} has an undeclared endpoint", a.label)));
            }
            if self.arrows[..i].iter().any(|b| b.label == a.label) {
                return Err(AlgebraError::BadQuiver(format!("duplicate arrow label {}", a.label)));
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].contains(v) {
                return Err(AlgebraError::BadQuiver(format!("duplicate vertex label {v}")));
            }
        }
        Ok(())
    }

    /// Path from arrows listed in traversal order.
    pub fn path(&self, arrows: &[usize]) -> Option<Path> {
        let first = *arrows.first()?;
        let mut cur = self.arrows[first].tgt;
        for &a in &arrows[1..] {
            if self.arrows[a].src != cur {
                return None;
            }
            cur = self.arrows[a].tgt;
        }
        Some(Path { src: self.arrows[first].src, tgt: cur, arrows: arrows.to_vec() })
    }

    /// Path from labels written right to left (`a_k … a_1`).
    pub fn path_from_labels(&self, written: &[&str]) -> Option<Path> {
        let mut idx = Vec::new();
        for l in written.iter().rev() {
            idx.push(self.arrow_index(l)?);
        }
        self.path(&idx)
    }

    pub fn trivial(&self, v: usize) -> Path {
        Path { src: v, tgt: v, arrows: Vec::new() }
    }
}

/// A path; `arrows` in traversal order, empty for the trivial path at `src`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub src: usize,
    pub tgt: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Sort key: shorter first, then lexicographic on arrow indices read in
    /// written (right-to-left) order, trivial paths by vertex.
    pub fn order_key(&self) -> (usize, Vec<usize>, usize) {
        (self.len(), self.arrows.iter().rev().copied().collect(), self.src)
    }

    /// Product `self · other` ("other first"), if composable.
    pub fn compose_after(&self, other: &Path) -> Option<Path> {
        if other.tgt != self.src {
            return None;
        }
        let mut arrows = other.arrows.clone();
        arrows.extend_from_slice(&self.arrows);
        Some(Path { src: other.src, tgt: self.tgt, arrows })
    }

    pub fn display(&self, q: &Quiver) -> String {
        if self.arrows.is_empty() {
            return format!("e_{}", q.vertices[self.src]);
        }
        self.arrows.iter().rev().map(|&a| q.arrows[a].label.as_str()).collect::<Vec<_>>().join(" ")
    }
}

/// Linear combination of parallel paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(Scalar, Path)>,
}

impl Relation {
    pub fn new(terms: Vec<(Scalar, Path)>) -> Relation {
        Relation { terms }
    }

    pub fn check_admissible(&self, q: &Quiver) -> Result<(), AlgebraError> {
        let Some((_, first)) = self.terms.first() else {
            return Err(AlgebraError::NotAdmissible("empty relation".into()));
        };
        for (_, p) in &self.terms {
            if p.len() < 2 {
                return Err(AlgebraError::NotAdmissible(format!("path {} has length < 2", p.display(q))));
            }
            if p.src != first.src || p.tgt != first.tgt {
                return Err(AlgebraError::NotAdmissible(format!("paths {} and {} are not parallel", p.display(q), first.display(q))));
            }
        }
        Ok(())
    }
}

pub type Elem = Vec<Scalar>;

#[derive(Debug, Clone)]
pub struct BoundQuiverAlgebra {
    quiver: Quiver,
    field: Field,
    relations: Vec<Relation>,
    basis: Vec<Path>,
    /// `mult[i * dim + j]` lists `(k, c)` with `b_i b_j = Σ c b_k`.
    mult: Vec<Vec<(usize, Scalar)>>,
    loewy_length: usize,
    length_bound: usize,
    arrow_basis: Vec<usize>,
}

impl BoundQuiverAlgebra {
    pub fn quiver(&self) -> &Quiver {
        &self.quiver
    }
    pub fn field(&self) -> Field {
        self.field
    }
    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }
    pub fn basis(&self) -> &[Path] {
        &self.basis
    }
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn loewy_length(&self) -> usize {
        self.loewy_length
    }
    pub fn length_bound(&self) -> usize {
        self.length_bound
    }
    pub fn num_vertices(&self) -> usize {
        self.quiver.vertices.len()
    }

    /// Basis index of the trivial path at `v` (they come first).
    pub fn vertex_basis(&self, v: usize) -> usize {
        v
    }

    /// Basis index of arrow `a`.
    pub fn arrow_basis(&self, a: usize) -> usize {
        self.arrow_basis[a]
    }

    pub fn structure(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        &self.mult[i * self.dim() + j]
    }

    pub fn zero(&self) -> Elem {
        zero_vec(self.field, self.dim())
    }

    pub fn one(&self) -> Elem {
        let mut v = self.zero();
        for i in 0..self.num_vertices() {
            v[i] = self.field.one();
        }
        v
    }

    pub fn basis_elem(&self, i: usize) -> Elem {
        unit_vec(self.field, self.dim(), i)
    }

    pub fn vertex_elem(&self, v: usize) -> Elem {
        self.basis_elem(v)
    }

    pub fn arrow_elem(&self, a: usize) -> Elem {
        self.basis_elem(self.arrow_basis[a])
    }

    pub fn mul(&self, x: &[Scalar], y: &[Scalar]) -> Elem {
        let n = self.dim();
        let mut out = self.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let c = xi * yj;
                for (k, s) in &self.mult[i * n + j] {
                    out[*k] = &out[*k] + &(&c * s);
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &[Scalar], e: usize) -> Elem {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, x);
        }
        r
    }

    /// Normal form of a path of the quiver.
    pub fn path_elem(&self, p: &Path) -> Elem {
        if p.is_trivial() {
            return self.vertex_elem(p.src);
        }
        let mut r = self.arrow_elem(p.arrows[0]);
        for &a in &p.arrows[1..] {
            r = self.mul(&self.arrow_elem(a), &r);
        }
        r
    }

    /// Matrix of `x ↦ a·x` (columns indexed by basis).
    pub fn left_mul_matrix(&self, a: &[Scalar]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(self.field, n, n);
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, s) in &self.mult[i * n + j] {
                    m.add_to(*k, j, &(ai * s));
                }
            }
        }
        m
    }

    /// Matrix of `x ↦ x·a`.
    pub fn right_mul_matrix(&self, a: &[Scalar]) -> Matrix {
        let n = self.dim();
        let mut m = Matrix::zeros(self.field, n, n);
        for (j, aj) in a.iter().enumerate() {
            if aj.is_zero() {
                continue;
            }
            for i in 0..n {
                for (k, s) in &self.mult[i * n + j] {
                    m.add_to(*k, i, &(aj * s));
                }
            }
        }
        m
    }

    /// Basis indices spanning `e_v A e_u` (paths from `u` to `v`).
    pub fn corner(&self, v: usize, u: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].tgt == v && self.basis[i].src == u).collect()
    }

    /// Basis indices spanning `A e_v` (paths starting at `v`).
    pub fn left_projective(&self, v: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].src == v).collect()
    }

    /// Basis indices spanning `e_u A` (paths ending at `u`).
    pub fn right_projective(&self, u: usize) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].tgt == u).collect()
    }

    /// rad^m, computed as rad^{m-1}·rad starting from the arrow span.
    pub fn radical_power(&self, m: usize) -> Subspace {
        let n = self.dim();
        if m == 0 {
            let all: Vec<Elem> = (0..n).map(|i| self.basis_elem(i)).collect();
            return Subspace::spanned_by(self.field, n, &all);
        }
        let rad: Vec<Elem> = (0..n).filter(|&i| !self.basis[i].is_trivial()).map(|i| self.basis_elem(i)).collect();
        let mut cur = Subspace::spanned_by(self.field, n, &rad);
        for _ in 1..m {
            let mut next = Subspace::new(self.field, n);
            for x in cur.basis() {
                for a in 0..self.quiver.arrows.len() {
                    next.insert(&self.mul(x, &self.arrow_elem(a)));
                }
            }
            cur = next;
        }
        cur
    }

    /// Left socle `{x : rad·x = 0}` or right socle `{x : x·rad = 0}`.
    pub fn socle(&self, side: Side) -> Subspace {
        let n = self.dim();
        let mut stacked = Matrix::zeros(self.field, 0, n);
        for a in 0..self.quiver.arrows.len() {
            let e = self.arrow_elem(a);
            let m = match side {
                Side::Left => self.left_mul_matrix(&e),
                Side::Right => self.right_mul_matrix(&e),
            };
            stacked = stacked.vstack(&m);
        }
        Subspace::spanned_by(self.field, n, &stacked.kernel_basis())
    }

    /// Number of basis paths of each length.
    pub fn basis_length_profile(&self) -> Vec<usize> {
        let maxl = self.basis.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut v = vec![0; maxl + 1];
        self.basis.iter().for_each(|p| v[p.len()] += 1);
        v
    }

    /// Checks `(b_i b_j) b_k = b_i (b_j b_k)` on all basis triples.
    pub fn check_associativity(&self) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul(&self.basis_elem(i), &self.basis_elem(j));
                for k in 0..n {
                    let l = self.mul(&ij, &self.basis_elem(k));
                    let r = self.mul(&self.basis_elem(i), &self.mul(&self.basis_elem(j), &self.basis_elem(k)));
                    if l != r {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn display_elem(&self, x: &[Scalar]) -> String {
        let mut out = String::new();
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let p = self.basis[i].display(&self.quiver);
            let neg = c.to_i64().is_some_and(|v| v < 0) || matches!(c, Scalar::Q(q) if q < &num_rational::BigRational::from_integer(0.into()));
            let mag = if neg { -c.clone() } else { c.clone() };
            let term = if mag.is_one() { p } else { format!("{mag}*{p}") };
            match (out.is_empty(), neg) {
                (true, false) => out.push_str(&term),
                (true, true) => out.push_str(&format!("-{term}")),
                (false, false) => out.push_str(&format!(" + {term}")),
                (false, true) => out.push_str(&format!(" - {term}")),
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    /// Parses an element such as `t + 2*t^3`, `b a1 a0`, `e_0 - a0` or `1`.
    pub fn parse_elem(&self, s: &str) -> Result<Elem, AlgebraError> {
        let bad = |m: String| AlgebraError::Parse { line: 0, msg: m };
        let mut out = self.zero();
        for (sign, term) in split_terms(s) {
            let term = term.trim();
            if term.is_empty() {
                return Err(bad(format!("empty term in '{s}'")));
            }
            let (coeff, word) = match term.split_once('*') {
                Some((c, w)) => (self.field.parse_scalar(c)?, w.trim()),
                None => {
                    if term.chars().all(|c| c.is_ascii_digit() || c == '/') {
                        (self.field.parse_scalar(term)?, "1")
                    } else {
                        (self.field.one(), term)
                    }
                }
            };
            let coeff = if sign { -coeff } else { coeff };
            let w = self.parse_word(word).ok_or_else(|| bad(format!("cannot parse path '{word}'")))?;
            axpy(&mut out, &coeff, &w);
        }
        Ok(out)
    }

    /// A word is `1`, `e_<vertex>` or arrow labels written right to left, each
    /// optionally raised to a power.
    fn parse_word(&self, w: &str) -> Option<Elem> {
        let w = w.trim();
        if w == "1" {
            return Some(self.one());
        }
        if let Some(v) = w.strip_prefix("e_") {
            if let Some(i) = self.quiver.vertex_index(v) {
                return Some(self.vertex_elem(i));
            }
        }
        let mut factors: Vec<Elem> = Vec::new();
        for tok in w.split(|c: char| c.is_whitespace() || c == '.' || c == '·').filter(|t| !t.is_empty()) {
            let (lab, e) = match tok.split_once('^') {
                Some((l, e)) => (l, e.parse::<usize>().ok()?),
                None => (tok, 1),
            };
            let a = self.quiver.arrow_index(lab)?;
            let x = self.arrow_elem(a);
            for _ in 0..e {
                factors.push(x.clone());
            }
        }
        let mut r = factors.pop()?;
        while let Some(f) = factors.pop() {
            r = self.mul(&f, &r);
        }
        Some(r)
    }
}

/// Splits `a + b - c` into signed terms; a leading `-` negates the first term.
pub(crate) fn split_terms(s: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut prev_star = false;
    for ch in s.chars() {
        if (ch == '+' || ch == '-') && !prev_star {
            if !cur.trim().is_empty() {
                out.push((neg, cur.trim().to_string()));
            }
            cur.clear();
            neg = ch == '-';
            continue;
        }
        if !ch.is_whitespace() {
            prev_star = ch == '*';
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Builds kQ/I by saturating the relation span under multiplication by arrows
/// on both sides, truncated at paths of length `length_bound`.
pub fn build_algebra(quiver: &Quiver, relations: &[Relation], field: Field, length_bound: usize) -> Result<BoundQuiverAlgebra, AlgebraError> {
    quiver.validate()?;
    for r in relations {
        r.check_admissible(quiver)?;
    }
    let bound = length_bound.max(2);
    let paths = enumerate_paths(quiver, bound);
    let np = paths.len();
    let index: HashMap<(usize, Vec<usize>), usize> = paths.iter().enumerate().map(|(i, p)| ((p.src, p.arrows.clone()), i)).collect();
    // Column of path i is np-1-i so that row reduction pivots on the largest
    // path of each closure element; non-pivot columns are the greedy basis.
    let col = |i: usize| np - 1 - i;

    let to_vec = |terms: &[(Scalar, Path)]| -> Option<Vec<Scalar>> {
        let mut v = zero_vec(field, np);
        for (c, p) in terms {
            if p.len() > bound {
                continue;
            }
            let i = *index.get(&(p.src, p.arrows.clone()))?;
            v[col(i)] = &v[col(i)] + c;
        }
        Some(v)
    };

    let mut closure = Subspace::new(field, np);
    let mut queue: Vec<Vec<Scalar>> = Vec::new();
    for r in relations {
        let v = to_vec(&r.terms).expect("relation paths enumerated");
        if closure.insert(&v) {
            queue.push(v);
        }
    }
    let arrows: Vec<Path> = (0..quiver.arrows.len()).map(|a| quiver.path(&[a]).unwrap()).collect();
    while let Some(v) = queue.pop() {
        for a in &arrows {
            for side in [Side::Left, Side::Right] {
                let mut w = zero_vec(field, np);
                let mut any = false;
                for (c, x) in v.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let p = &paths[np - 1 - c];
                    let q = match side {
                        Side::Left => a.compose_after(p),
                        Side::Right => p.compose_after(a),
                    };
                    let Some(q) = q else { continue };
                    if q.len() > bound {
                        continue;
                    }
                    let j = index[&(q.src, q.arrows.clone())];
                    w[col(j)] = &w[col(j)] + x;
                    any = true;
                }
                if any && closure.insert(&w) {
                    queue.push(w);
                }
            }
        }
    }

    for (i, p) in paths.iter().enumerate() {
        if p.len() == bound && !closure.contains(&unit_vec(field, np, col(i))) {
            return Err(AlgebraError::BoundTooSmall { bound, suggested: bound * 2 });
        }
    }

    let mut basis_paths: Vec<usize> = closure.complement_positions().into_iter().map(|c| np - 1 - c).collect();
    basis_paths.sort();
    let basis: Vec<Path> = basis_paths.iter().map(|&i| paths[i].clone()).collect();
    let pos_in_basis: HashMap<usize, usize> = basis_paths.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let dim = basis.len();

    let normal_form = |p: &Path| -> Vec<(usize, Scalar)> {
        if p.len() >= bound {
            return Vec::new();
        }
        let i = index[&(p.src, p.arrows.clone())];
        let red = closure.reduce(&unit_vec(field, np, col(i)));
        let mut out: Vec<(usize, Scalar)> = red
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(c, x)| (pos_in_basis[&(np - 1 - c)], x))
            .collect();
        out.sort_by_key(|t| t.0);
        out
    };

    let mut mult = vec![Vec::new(); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            if let Some(q) = basis[i].compose_after(&basis[j]) {
                mult[i * dim + j] = normal_form(&q);
            }
        }
    }
    let arrow_basis: Vec<usize> = (0..quiver.arrows.len())
        .map(|a| {
            let i = index[&(quiver.arrows[a].src, vec![a])];
            *pos_in_basis.get(&i).expect("arrows survive admissible relations")
        })
        .collect();

    let mut alg = BoundQuiverAlgebra {
        quiver: quiver.clone(),
        field,
        relations: relations.to_vec(),
        basis,
        mult,
        loewy_length: 0,
        length_bound: bound,
        arrow_basis,
    };
    let mut m = 0;
    while alg.radical_power(m).dim() > 0 {
        m += 1;
    }
    alg.loewy_length = m;
    Ok(alg)
}

/// `build_algebra`, doubling the bound on `BoundTooSmall` up to `max_bound`.
pub fn build_algebra_retry(quiver: &Quiver, relations: &[Relation], field: Field, start_bound: usize, max_bound: usize) -> Result<BoundQuiverAlgebra, AlgebraError> {
    let mut b = start_bound.max(2);
    loop {
        match build_algebra(quiver, relations, field, b) {
            Err(AlgebraError::BoundTooSmall { suggested, .. }) if suggested <= max_bound => b = suggested,
            other => return other,
        }
    }
}

/// All paths of length ≤ `bound`, sorted by `Path::order_key`.
pub fn enumerate_paths(q: &Quiver, bound: usize) -> Vec<Path> {
    let mut out: Vec<Path> = (0..q.vertices.len()).map(|v| q.trivial(v)).collect();
    let mut layer: Vec<Path> = (0..q.arrows.len()).map(|a| q.path(&[a]).unwrap()).collect();
    let mut len = 1;
    while len <= bound && !layer.is_empty() {
        out.extend(layer.iter().cloned());
        let mut next = Vec::new();
        for p in &layer {
            for (a, ar) in q.arrows.iter().enumerate() {
                if ar.src == p.tgt {
                    let mut arrows = p.arrows.clone();
                    arrows.push(a);
                    next.push(Path { src: p.src, tgt: ar.tgt, arrows });
                }
            }
        }
        layer = next;
        len += 1;
    }
    out.sort_by_key(|p| p.order_key());
    out
}

/// Frobenius form given by its values on the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusForm {
    pub values: Vec<Scalar>,
}

impl FrobeniusForm {
    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        let mut s = x.first().map(|c| c.field().zero()).unwrap_or_else(|| self.values[0].field().zero());
        for (c, v) in x.iter().zip(&self.values) {
            if !c.is_zero() && !v.is_zero() {
                s = &s + &(c * v);
            }
        }
        s
    }

    /// Form prescribed on the paths that are nonzero in A. The prescription
    /// is read off on basis paths and then checked on every nonzero path up
    /// to the length bound.
    pub fn from_path_values(a: &BoundQuiverAlgebra, f: impl Fn(&Path) -> Scalar) -> Result<FrobeniusForm, AlgebraError> {
        let values: Vec<Scalar> = a.basis().iter().map(&f).collect();
        let form = FrobeniusForm { values };
        for p in enumerate_paths(a.quiver(), a.length_bound()) {
            let x = a.path_elem(&p);
            if !is_zero_vec(&x) && form.eval(&x) != f(&p) {
                return Err(AlgebraError::NotMultiplicative(format!("form is not well defined on path {}", p.display(a.quiver()))));
            }
        }
        Ok(form)
    }

    /// Gram matrix `G_ij = ε(b_i b_j)`.
    pub fn gram(&self, a: &BoundQuiverAlgebra) -> Matrix {
        let n = a.dim();
        let mut g = Matrix::zeros(a.field(), n, n);
        for i in 0..n {
            for j in 0..n {
                let mut s = a.field().zero();
                for (k, c) in a.structure(i, j) {
                    s = &s + &(c * &self.values[*k]);
                }
                g.set(i, j, &s);
            }
        }
        g
    }

    pub fn is_symmetric(&self, a: &BoundQuiverAlgebra) -> bool {
        let g = self.gram(a);
        g == g.transpose()
    }
}

/// Returns the Gram matrix if it is invertible.
pub fn verify_frobenius(a: &BoundQuiverAlgebra, eps: &FrobeniusForm) -> Result<Matrix, AlgebraError> {
    let g = eps.gram(a);
    if g.is_invertible() {
        Ok(g)
    } else {
        Err(AlgebraError::Degenerate)
    }
}

/// Fallback search for some Frobenius form: first the form dual to the left
/// socle basis, then seeded random forms. Returns any nondegenerate form.
pub fn find_frobenius_form(a: &BoundQuiverAlgebra, seed: u64, attempts: usize) -> Option<FrobeniusForm> {
    use rand::{Rng, SeedableRng};
    let f = a.field();
    let soc = a.socle(Side::Left);
    let mut values = zero_vec(f, a.dim());
    for v in soc.basis() {
        if let Some(p) = v.iter().rposition(|x| !x.is_zero()) {
            values[p] = f.one();
        }
    }
    let cand = FrobeniusForm { values };
    if verify_frobenius(a, &cand).is_ok() {
        return Some(cand);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let range = if f.is_rational() { 7 } else { f.characteristic() as i64 };
    for _ in 0..attempts {
        let values: Vec<Scalar> = (0..a.dim()).map(|_| f.from_i64(rng.gen_range(0..range))).collect();
        let cand = FrobeniusForm { values };
        if verify_frobenius(a, &cand).is_ok() {
            return Some(cand);
        }
    }
    None
}

/// Linear endomorphism of the algebra given by the images of basis elements
/// as matrix columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraMorphism {
    pub matrix: Matrix,
}

impl AlgebraMorphism {
    pub fn identity(a: &BoundQuiverAlgebra) -> AlgebraMorphism {
        AlgebraMorphism { matrix: Matrix::identity(a.field(), a.dim()) }
    }

    /// Extends images of vertices and arrows multiplicatively to the basis and
    /// verifies the result is a unital algebra homomorphism.
    pub fn from_generators(a: &BoundQuiverAlgebra, vertex_images: &[Elem], arrow_images: &[Elem]) -> Result<AlgebraMorphism, AlgebraError> {
        let n = a.dim();
        let mut cols = Vec::with_capacity(n);
        for p in a.basis() {
            let img = if p.is_trivial() {
                vertex_images[p.src].clone()
            } else {
                let mut r = arrow_images[p.arrows[0]].clone();
                for &x in &p.arrows[1..] {
                    r = a.mul(&arrow_images[x], &r);
                }
                r
            };
            cols.push(img);
        }
        let m = AlgebraMorphism { matrix: Matrix::from_columns(a.field(), n, &cols) };
        m.check_homomorphism(a)?;
        Ok(m)
    }

    /// Morphism fixing every vertex and sending arrows to the given images.
    pub fn from_arrow_images(a: &BoundQuiverAlgebra, arrow_images: &[Elem]) -> Result<AlgebraMorphism, AlgebraError> {
        let vs: Vec<Elem> = (0..a.num_vertices()).map(|v| a.vertex_elem(v)).collect();
        AlgebraMorphism::from_generators(a, &vs, arrow_images)
    }

    pub fn apply(&self, x: &[Scalar]) -> Elem {
        self.matrix.mul_vec(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AlgebraMorphism) -> AlgebraMorphism {
        AlgebraMorphism { matrix: self.matrix.mul(&other.matrix) }
    }

    pub fn inverse(&self) -> Option<AlgebraMorphism> {
        self.matrix.inverse().map(|matrix| AlgebraMorphism { matrix })
    }

    pub fn is_identity(&self) -> bool {
        self.matrix == Matrix::identity(self.matrix.field(), self.matrix.rows())
    }

    pub fn is_bijective(&self) -> bool {
        self.matrix.is_invertible()
    }

    pub fn check_homomorphism(&self, a: &BoundQuiverAlgebra) -> Result<(), AlgebraError> {
        if self.apply(&a.one()) != a.one() {
            return Err(AlgebraError::NotMultiplicative("1 is not preserved".into()));
        }
        let n = a.dim();
        let imgs: Vec<Elem> = (0..n).map(|i| self.matrix.column(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.apply(&a.mul(&a.basis_elem(i), &a.basis_elem(j)));
                let rhs = a.mul(&imgs[i], &imgs[j]);
                if lhs != rhs {
                    return Err(AlgebraError::NotMultiplicative(format!(
                        "φ({}·{}) ≠ φ({})·φ({})",
                        a.basis()[i].display(a.quiver()),
                        a.basis()[j].display(a.quiver()),
                        a.basis()[i].display(a.quiver()),
                        a.basis()[j].display(a.quiver())
                    )));
                }
            }
        }
        Ok(())
    }

    /// Permutation of vertices induced on idempotents, if it is one.
    pub fn vertex_permutation(&self, a: &BoundQuiverAlgebra) -> Option<Vec<usize>> {
        (0..a.num_vertices())
            .map(|v| {
                let img = self.apply(&a.vertex_elem(v));
                (0..a.num_vertices()).find(|&w| img == a.vertex_elem(w))
            })
            .collect()
    }
}

/// Solves `ε(b_i b_j) = ε(b_j ν̃(b_i))` for all `i, j` and verifies the result
/// is an algebra automorphism.
pub fn nakayama_automorphism(a: &BoundQuiverAlgebra, eps: &FrobeniusForm) -> Result<AlgebraMorphism, AlgebraError> {
    let g = verify_frobenius(a, eps)?;
    // G_ij = Σ_k G_jk N_ki, i.e. Gᵀ = G N.
    let n = g.solve_matrix(&g.transpose()).map_err(|_| AlgebraError::Degenerate)?;
    let nu = AlgebraMorphism { matrix: n };
    nu.check_homomorphism(a)?;
    if !nu.is_bijective() {
        return Err(AlgebraError::NotMultiplicative("Nakayama map is not bijective".into()));
    }
    Ok(nu)
}

/// Checks `ε(ab) = ε(b ν̃(a))` on all basis pairs.
pub fn check_nakayama_identity(a: &BoundQuiverAlgebra, eps: &FrobeniusForm, nu: &AlgebraMorphism) -> bool {
    let n = a.dim();
    for i in 0..n {
        let nui = nu.apply(&a.basis_elem(i));
        for j in 0..n {
            let l = eps.eval(&a.mul(&a.basis_elem(i), &a.basis_elem(j)));
            let r = eps.eval(&a.mul(&a.basis_elem(j), &nui));
            if l != r {
                return false;
            }
        }
    }
    true
}

/// Parsed algebra description.
#[derive(Debug, Clone)]
pub struct AlgebraSpec {
    pub field: Field,
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub bound: usize,
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<BoundQuiverAlgebra, AlgebraError> {
        build_algebra(&self.quiver, &self.relations, self.field, self.bound)
    }

    /// Like `build`, doubling the bound on `BoundTooSmall` up to 8 times the start.
    pub fn build_retry(&self) -> Result<BoundQuiverAlgebra, AlgebraError> {
        build_algebra_retry(&self.quiver, &self.relations, self.field, self.bound, self.bound.max(2) * 8)
    }
}

/// Parses the line-oriented description format. `default_field` applies when
/// no `field` line is present; an explicit `field` line wins.
pub fn parse_algebra_spec(text: &str, default_field: Field) -> Result<AlgebraSpec, AlgebraError> {
    let mut field = default_field;
    let mut quiver = Quiver::new();
    let mut rel_lines: Vec<(usize, String)> = Vec::new();
    let mut bound = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        let lineno = ln + 1;
        let err = |msg: String| AlgebraError::Parse { line: lineno, msg };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("field ") {
            field = Field::parse(rest).map_err(|e| err(e.to_string()))?;
        } else if let Some(rest) = line.strip_prefix("vertex ") {
            let l = rest.trim();
            if l.is_empty() || quiver.vertex_index(l).is_some() {
                return Err(err(format!("bad or duplicate vertex '{l}'")));
            }
            quiver.add_vertex(l);
        } else if let Some(rest) = line.strip_prefix("arrow ") {
            let (lab, ends) = rest.split_once(':').ok_or_else(|| err("expected 'arrow <label>: <src> -> <tgt>'".into()))?;
            let (s, t) = ends.split_once("->").ok_or_else(|| err("expected '->' in arrow".into()))?;
            let s = quiver.vertex_index(s.trim()).ok_or_else(|| err(format!("unknown vertex '{}'", s.trim())))?;
            let t = quiver.vertex_index(t.trim()).ok_or_else(|| err(format!("unknown vertex '{}'", t.trim())))?;
            let lab = lab.trim();
            if lab.is_empty() || quiver.arrow_index(lab).is_some() {
                return Err(err(format!("bad or duplicate arrow '{lab}'")));
            }
            quiver.add_arrow(lab, s, t);
        } else if let Some(rest) = line.strip_prefix("relation:") {
            rel_lines.push((lineno, rest.to_string()));
        } else if let Some(rest) = line.strip_prefix("bound ") {
            bound = Some(rest.trim().parse::<usize>().map_err(|_| err(format!("bad bound '{}'", rest.trim())))?);
        } else {
            return Err(err(format!("unrecognized line '{line}'")));
        }
    }
    let mut relations = Vec::new();
    for (lineno, body) in rel_lines {
        relations.push(parse_relation(&quiver, field, &body).map_err(|msg| AlgebraError::Parse { line: lineno, msg })?);
    }
    let bound = bound.unwrap_or_else(|| quiver.arrows.len().max(2) * 2);
    Ok(AlgebraSpec { field, quiver, relations, bound })
}

/// Parses `c1*a_k … a_1 + c2*… - …` with arrow labels written right to left.
pub fn parse_relation(q: &Quiver, field: Field, body: &str) -> Result<Relation, String> {
    let mut terms = Vec::new();
    for (neg, term) in split_terms(body) {
        let (c, w) = match term.split_once('*') {
            Some((c, w)) => (field.parse_scalar(c).map_err(|e| e.to_string())?, w.trim().to_string()),
            None => (field.one(), term.clone()),
        };
        let c = if neg { -c } else { c };
        let mut labels: Vec<String> = Vec::new();
        for tok in w.split_whitespace() {
            match tok.split_once('^') {
                Some((l, e)) => {
                    let e: usize = e.parse().map_err(|_| format!("bad exponent in '{tok}'"))?;
                    labels.extend(std::iter::repeat_n(l.to_string(), e));
                }
                None => labels.push(tok.to_string()),
            }
        }
        for l in &labels {
            if q.arrow_index(l).is_none() {
                return Err(format!("unknown arrow '{l}'"));
            }
        }
        let refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        let p = q.path_from_labels(&refs).ok_or_else(|| format!("path '{w}' is not composable"))?;
        terms.push((c, p));
    }
    if terms.is_empty() {
        return Err("empty relation".into());
    }
    Ok(Relation::new(terms))
}

impl fmt::Display for BoundQuiverAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "kQ/I over {}: {} vertices, {} arrows, dim {}, Loewy length {}", self.field, self.num_vertices(), self.quiver.arrows.len(), self.dim(), self.loewy_length)
    }
}

/// `k[t]/t^n`.
pub fn truncated_polynomial(n: usize, field: Field) -> BoundQuiverAlgebra {
    let mut q = Quiver::new();
    let v = q.add_vertex("0");
    let t = q.add_arrow("t", v, v);
    let rel = Relation::new(vec![(field.one(), q.path(&vec![t; n.max(2)]).unwrap())]);
    if n == 1 {
        // k[t]/t: a single vertex without arrows.
        let mut q1 = Quiver::new();
        q1.add_vertex("0");
        return build_algebra(&q1, &[], field, 2).expect("semisimple");
    }
    build_algebra(&q, &[rel], field, n).expect("k[t]/t^n builds at bound n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Field {
        Field::fp(2)
    }

    #[test]
    fn truncated_polynomial_basis() {
        for n in 2..7 {
            let a = truncated_polynomial(n, Field::fp(3));
            assert_eq!(a.dim(), n);
            assert_eq!(a.loewy_length(), n);
            for (k, p) in a.basis().iter().enumerate() {
                assert_eq!(p.len(), k);
            }
        }
    }

    #[test]
    fn semisimple_without_arrows() {
        let mut q = Quiver::new();
        for i in 0..3 {
            q.add_vertex(i.to_string());
        }
        let a = build_algebra(&q, &[], Field::rationals(), 2).unwrap();
        assert_eq!(a.dim(), 3);
        assert_eq!(a.loewy_length(), 1);
        assert_eq!(a.socle(Side::Left).dim(), 3);
        assert_eq!(a.radical_power(1).dim(), 0);
    }

    #[test]
    fn bound_too_small_and_not_admissible() {
        let mut q = Quiver::new();
        let v = q.add_vertex("0");
        let t = q.add_arrow("t", v, v);
        let rel = Relation::new(vec![(f2().one(), q.path(&[t, t, t]).unwrap())]);
        assert!(matches!(build_algebra(&q, std::slice::from_ref(&rel), f2(), 2), Err(AlgebraError::BoundTooSmall { .. })));
        let a = build_algebra_retry(&q, &[rel], f2(), 2, 16).unwrap();
        assert_eq!(a.dim(), 3);
        let bad = Relation::new(vec![(f2().one(), q.path(&[t]).unwrap())]);
        assert!(matches!(build_algebra(&q, &[bad], f2(), 4), Err(AlgebraError::NotAdmissible(_))));
    }

    #[test]
    fn radical_powers_and_socle_of_truncated() {
        let a = truncated_polynomial(4, Field::fp(5));
        assert_eq!(a.radical_power(0).dim(), 4);
        let r2 = a.radical_power(2);
        assert_eq!(r2.dim(), 2);
        assert!(r2.contains(&a.basis_elem(2)) && r2.contains(&a.basis_elem(3)));
        assert_eq!(a.radical_power(4).dim(), 0);
        for side in [Side::Left, Side::Right] {
            let s = a.socle(side);
            assert_eq!(s.dim(), 1);
            assert!(s.contains(&a.basis_elem(3)));
        }
    }

    #[test]
    fn monomial_form_on_truncated() {
        let f = Field::fp(3);
        let a = truncated_polynomial(4, f);
        let mut values = zero_vec(f, 4);
        values[3] = f.one();
        let eps = FrobeniusForm { values };
        let g = verify_frobenius(&a, &eps).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g.get(i, j).is_one(), i + j == 3);
            }
        }
        assert!(nakayama_automorphism(&a, &eps).unwrap().is_identity());
        let zero = FrobeniusForm { values: zero_vec(f, 4) };
        assert_eq!(verify_frobenius(&a, &zero), Err(AlgebraError::Degenerate));
    }

    #[test]
    fn parse_text_format() {
        let text = "# k[t]/t^3\nfield 3\nvertex 0\narrow t: 0 -> 0\nrelation: 1*t t t\nbound 3\n";
        let spec = parse_algebra_spec(text, f2()).unwrap();
        assert_eq!(spec.field, Field::fp(3));
        let a = spec.build().unwrap();
        assert_eq!(a.dim(), 3);
        let x = a.parse_elem("t + 2*t^2").unwrap();
        assert_eq!(a.display_elem(&x), "t - t t");
        assert_eq!(a.parse_elem("t - t^2").unwrap(), x);
        let bad = "vertex 0\narrow t: 0 -> 0\nrelation: 1*t s\n";
        match parse_algebra_spec(bad, f2()) {
            Err(AlgebraError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn relation_terms_written_right_to_left() {
        // a: 0 -> 1, b: 1 -> 2; "b a" is the path a then b.
        let mut q = Quiver::new();
        for i in 0..3 {
            q.add_vertex(i.to_string());
        }
        q.add_arrow("a", 0, 1);
        q.add_arrow("b", 1, 2);
        let p = q.path_from_labels(&["b", "a"]).unwrap();
        assert_eq!((p.src, p.tgt), (0, 2));
        assert!(q.path_from_labels(&["a", "b"]).is_none());
        let a = build_algebra(&q, &[], Field::fp(2), 3).unwrap();
        let prod = a.mul(&a.arrow_elem(1), &a.arrow_elem(0));
        assert!(!is_zero_vec(&prod));
        assert!(is_zero_vec(&a.mul(&a.arrow_elem(0), &a.arrow_elem(1))));
    }
}
