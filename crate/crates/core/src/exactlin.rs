//! Exact scalars over F_p and Q, and dense matrices with row reduction.
//!
//! Matrices over F_p keep residues in a flat `u32` buffer; rationals use
//! arbitrary-precision fractions. Every operation is a pure function of its
//! inputs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinError {
    #[error("no solution: right-hand side is outside the column space")]
    NoSolution,
    #[error("characteristic {0} is neither 0 nor a prime")]
    BadCharacteristic(u64),
    #[error("cannot parse field element '{0}'")]
    BadScalar(String),
}

/// Ground field: `p == 0` means Q, otherwise F_p with p prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Field {
    p: u32,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(characteristic: u64) -> Result<Field, LinError> {
        if characteristic == 0 || (is_prime(characteristic) && characteristic < (1 << 31)) {
            Ok(Field { p: characteristic as u32 })
        } else {
            Err(LinError::BadCharacteristic(characteristic))
        }
    }

    pub fn fp(p: u32) -> Field {
        Field::new(p as u64).expect("prime characteristic")
    }

    pub fn rationals() -> Field {
        Field { p: 0 }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn is_rational(&self) -> bool {
        self.p == 0
    }

    /// Parses `Q`, `0` or a prime.
    pub fn parse(s: &str) -> Result<Field, LinError> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") {
            return Ok(Field::rationals());
        }
        let n: u64 = t.parse().map_err(|_| LinError::BadScalar(t.to_string()))?;
        Field::new(n)
    }

    pub fn zero(&self) -> Scalar {
        if self.p == 0 {
            Scalar::Q(BigRational::zero())
        } else {
            Scalar::Fp { v: 0, p: self.p }
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> Scalar {
        if self.p == 0 {
            Scalar::Q(BigRational::from_integer(BigInt::from(x)))
        } else {
            Scalar::Fp { v: x.rem_euclid(self.p as i64) as u32, p: self.p }
        }
    }

    pub fn from_ratio(&self, num: i64, den: i64) -> Option<Scalar> {
        let d = self.from_i64(den).inv()?;
        Some(self.from_i64(num) * d)
    }

    /// Parses an integer or a fraction `a/b`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar, LinError> {
        let t = s.trim();
        let bad = || LinError::BadScalar(t.to_string());
        if let Some((a, b)) = t.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            let a = self.from_bigint(&a);
            let b = self.from_bigint(&b).inv().ok_or_else(bad)?;
            Ok(a * b)
        } else {
            let a: BigInt = t.parse().map_err(|_| bad())?;
            Ok(self.from_bigint(&a))
        }
    }

    fn from_bigint(&self, a: &BigInt) -> Scalar {
        if self.p == 0 {
            Scalar::Q(BigRational::from_integer(a.clone()))
        } else {
            let m = a.mod_floor(&BigInt::from(self.p));
            Scalar::Fp { v: m.to_u32().unwrap(), p: self.p }
        }
    }

    /// All field elements for finite fields; `None` over Q.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        if self.p == 0 {
            None
        } else {
            Some((0..self.p).map(|v| Scalar::Fp { v, p: self.p }).collect())
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p == 0 {
            write!(f, "Q")
        } else {
            write!(f, "F_{}", self.p)
        }
    }
}

/// Canonical field element: residue in `[0, p)` or a reduced fraction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Fp { v: u32, p: u32 },
    Q(BigRational),
}

#[inline]
fn mulmod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn addmod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
fn submod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

fn powmod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1u32 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

#[inline]
fn invmod(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    powmod(a, p as u64 - 2, p)
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Fp { p, .. } => Field { p: *p },
            Scalar::Q(_) => Field { p: 0 },
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 0,
            Scalar::Q(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Fp { v, .. } => *v == 1,
            Scalar::Q(q) => q.is_one(),
        }
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Scalar::Fp { v, p } => Scalar::Fp { v: invmod(*v, *p), p: *p },
            Scalar::Q(q) => Scalar::Q(q.recip()),
        })
    }

    pub fn pow(&self, e: u64) -> Scalar {
        match self {
            Scalar::Fp { v, p } => Scalar::Fp { v: powmod(*v, e, *p), p: *p },
            Scalar::Q(q) => Scalar::Q(num_traits::pow(q.clone(), e as usize)),
        }
    }

    /// Residue for F_p elements.
    pub fn residue(&self) -> Option<u32> {
        match self {
            Scalar::Fp { v, .. } => Some(*v),
            Scalar::Q(_) => None,
        }
    }

    /// Symmetric integer representative for F_p, or the integer value over Q
    /// when the fraction is integral.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Fp { v, p } => {
                let v = *v as i64;
                let p = *p as i64;
                Some(if v > p / 2 { v - p } else { v })
            }
            Scalar::Q(q) => {
                if q.is_integer() {
                    q.to_integer().to_i64()
                } else {
                    None
                }
            }
        }
    }

    fn combine(&self, o: &Scalar, fp: impl Fn(u32, u32, u32) -> u32, q: impl Fn(&BigRational, &BigRational) -> BigRational) -> Scalar {
        match (self, o) {
            (Scalar::Fp { v: a, p }, Scalar::Fp { v: b, p: p2 }) => {
                assert_eq!(p, p2, "mixed characteristics");
                Scalar::Fp { v: fp(*a, *b, *p), p: *p }
            }
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(q(a, b)),
            _ => panic!("mixed characteristics"),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Fp { .. } => write!(f, "{}", self.to_i64().unwrap()),
            Scalar::Q(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.to_integer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        self.combine(o, addmod, |a, b| a + b)
    }
}
impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self.combine(o, submod, |a, b| a - b)
    }
}
impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        self.combine(o, mulmod, |a, b| a * b)
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Fp { v, p } => Scalar::Fp { v: submod(0, *v, *p), p: *p },
            Scalar::Q(q) => Scalar::Q(-q),
        }
    }
}
macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Store {
    Fp(Vec<u32>),
    Q(Vec<BigRational>),
}

/// Dense row-major matrix over a fixed field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Store,
}

/// Particular solution plus a basis of the homogeneous solutions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<Scalar>,
    pub kernel: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        let data = if field.p == 0 {
            Store::Q(vec![BigRational::zero(); rows * cols])
        } else {
            Store::Fp(vec![0; rows * cols])
        };
        Matrix { field, rows, cols, data }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        let one = field.one();
        for i in 0..n {
            m.set(i, i, &one);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<Scalar>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let rs: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&x| field.from_i64(x)).collect()).collect();
        Matrix::from_rows(field, &rs)
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(field: Field, rows: usize, cols: &[Vec<Scalar>]) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for (i, x) in c.iter().enumerate() {
                if !x.is_zero() {
                    m.set(i, j, x);
                }
            }
        }
        m
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        let k = i * self.cols + j;
        match &self.data {
            Store::Fp(d) => Scalar::Fp { v: d[k], p: self.field.p },
            Store::Q(d) => Scalar::Q(d[k].clone()),
        }
    }

    pub fn is_entry_zero(&self, i: usize, j: usize) -> bool {
        let k = i * self.cols + j;
        match &self.data {
            Store::Fp(d) => d[k] == 0,
            Store::Q(d) => d[k].is_zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: &Scalar) {
        let k = i * self.cols + j;
        match (&mut self.data, x) {
            (Store::Fp(d), Scalar::Fp { v, p }) => {
                assert_eq!(*p, self.field.p, "mixed characteristics");
                d[k] = *v;
            }
            (Store::Q(d), Scalar::Q(q)) => d[k] = q.clone(),
            _ => panic!("mixed characteristics"),
        }
    }

    /// Adds `x` to entry `(i, j)`.
    pub fn add_to(&mut self, i: usize, j: usize, x: &Scalar) {
        let k = i * self.cols + j;
        match (&mut self.data, x) {
            (Store::Fp(d), Scalar::Fp { v, p }) => d[k] = addmod(d[k], *v, *p),
            (Store::Q(d), Scalar::Q(q)) => d[k] += q,
            _ => panic!("mixed characteristics"),
        }
    }

    pub fn row(&self, i: usize) -> Vec<Scalar> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Store::Fp(d) => d.iter().all(|&x| x == 0),
            Store::Q(d) => d.iter().all(|x| x.is_zero()),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        match (&self.data, &mut t.data) {
            (Store::Fp(a), Store::Fp(b)) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        b[j * self.rows + i] = a[i * self.cols + j];
                    }
                }
            }
            (Store::Q(a), Store::Q(b)) => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        b[j * self.rows + i] = a[i * self.cols + j].clone();
                    }
                }
            }
            _ => unreachable!(),
        }
        t
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        assert_eq!(self.field, o.field);
        let (n, m, k) = (self.rows, o.cols, self.cols);
        let mut out = Matrix::zeros(self.field, n, m);
        match (&self.data, &o.data, &mut out.data) {
            (Store::Fp(a), Store::Fp(b), Store::Fp(c)) => {
                let p = self.field.p as u64;
                // Accumulate in u64 and reduce lazily; entries are < 2^31.
                let mut acc = vec![0u64; m];
                let budget = (u64::MAX / ((p - 1) * (p - 1)).max(1)).min(1 << 20).max(1);
                for i in 0..n {
                    acc.iter_mut().for_each(|x| *x = 0);
                    let mut pending = 0u64;
                    for t in 0..k {
                        let x = a[i * k + t] as u64;
                        if x == 0 {
                            continue;
                        }
                        let brow = &b[t * m..(t + 1) * m];
                        for (s, &y) in acc.iter_mut().zip(brow) {
                            *s += x * y as u64;
                        }
                        pending += 1;
                        if pending + 1 >= budget {
                            acc.iter_mut().for_each(|s| *s %= p);
                            pending = 1;
                        }
                    }
                    for (dst, s) in c[i * m..(i + 1) * m].iter_mut().zip(&acc) {
                        *dst = (s % p) as u32;
                    }
                }
            }
            (Store::Q(a), Store::Q(b), Store::Q(c)) => {
                for i in 0..n {
                    for t in 0..k {
                        let x = &a[i * k + t];
                        if x.is_zero() {
                            continue;
                        }
                        for j in 0..m {
                            let y = &b[t * m + j];
                            if !y.is_zero() {
                                c[i * m + j] += x * y;
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols);
        let col = Matrix::from_columns(self.field, self.cols, &[v.to_vec()]);
        self.mul(&col).column(0)
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        self.zip_with(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.zip_with(o, |a, b| a - b)
    }

    fn zip_with(&self, o: &Matrix, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let mut out = Matrix::zeros(self.field, self.rows, self.cols);
        match (&self.data, &o.data, &mut out.data) {
            (Store::Fp(a), Store::Fp(b), Store::Fp(c)) => {
                let p = self.field.p;
                for k in 0..a.len() {
                    let s = f(&Scalar::Fp { v: a[k], p }, &Scalar::Fp { v: b[k], p });
                    c[k] = s.residue().unwrap();
                }
            }
            _ => {
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        out.set(i, j, &f(&self.get(i, j), &o.get(i, j)));
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        match (&mut out.data, s) {
            (Store::Fp(d), Scalar::Fp { v, p }) => d.iter_mut().for_each(|x| *x = mulmod(*x, *v, *p)),
            (Store::Q(d), Scalar::Q(q)) => d.iter_mut().for_each(|x| *x *= q),
            _ => panic!("mixed characteristics"),
        }
        out
    }

    /// Stacks `self` above `o`.
    pub fn vstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols);
        let mut out = self.clone();
        out.rows += o.rows;
        match (&mut out.data, &o.data) {
            (Store::Fp(a), Store::Fp(b)) => a.extend_from_slice(b),
            (Store::Q(a), Store::Q(b)) => a.extend_from_slice(b),
            _ => panic!("mixed characteristics"),
        }
        out
    }

    /// Places `o` to the right of `self`.
    pub fn hstack(&self, o: &Matrix) -> Matrix {
        self.transpose().vstack(&o.transpose()).transpose()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            match (&self.data, &mut out.data) {
                (Store::Fp(a), Store::Fp(b)) => {
                    b[r * self.cols..(r + 1) * self.cols].copy_from_slice(&a[i * self.cols..(i + 1) * self.cols])
                }
                (Store::Q(a), Store::Q(b)) => b[r * self.cols..(r + 1) * self.cols].clone_from_slice(&a[i * self.cols..(i + 1) * self.cols]),
                _ => unreachable!(),
            }
        }
        out
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows, idx.len());
        for i in 0..self.rows {
            for (c, &j) in idx.iter().enumerate() {
                if !self.is_entry_zero(i, j) {
                    out.set(i, c, &self.get(i, j));
                }
            }
        }
        out
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let piv = m.rref_in_place();
        (m, piv)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        match &mut self.data {
            Store::Fp(d) => {
                let p = self.field.p;
                let mut r = 0;
                for c in 0..cols {
                    if r == rows {
                        break;
                    }
                    let Some(pr) = (r..rows).find(|&i| d[i * cols + c] != 0) else { continue };
                    if pr != r {
                        for j in c..cols {
                            d.swap(pr * cols + j, r * cols + j);
                        }
                    }
                    let inv = invmod(d[r * cols + c], p);
                    if inv != 1 {
                        for j in c..cols {
                            d[r * cols + j] = mulmod(d[r * cols + j], inv, p);
                        }
                    }
                    let (before, rest) = d.split_at_mut(r * cols);
                    let (prow, after) = rest.split_at_mut(cols);
                    let elim = |row: &mut [u32]| {
                        let f = row[c];
                        if f == 0 {
                            return;
                        }
                        let nf = p - f;
                        if p == 2 {
                            for j in c..cols {
                                row[j] ^= prow[j];
                            }
                        } else {
                            for j in c..cols {
                                if prow[j] != 0 {
                                    row[j] = ((row[j] as u64 + nf as u64 * prow[j] as u64) % p as u64) as u32;
                                }
                            }
                        }
                    };
                    before.chunks_mut(cols).for_each(elim);
                    after.chunks_mut(cols).for_each(elim);
                    pivots.push(c);
                    r += 1;
                }
            }
            Store::Q(d) => {
                let mut r = 0;
                for c in 0..cols {
                    if r == rows {
                        break;
                    }
                    let Some(pr) = (r..rows).find(|&i| !d[i * cols + c].is_zero()) else { continue };
                    if pr != r {
                        for j in c..cols {
                            d.swap(pr * cols + j, r * cols + j);
                        }
                    }
                    let inv = d[r * cols + c].recip();
                    for j in c..cols {
                        let x = &d[r * cols + j] * &inv;
                        d[r * cols + j] = x;
                    }
                    for i in 0..rows {
                        if i == r || d[i * cols + c].is_zero() {
                            continue;
                        }
                        let f = d[i * cols + c].clone();
                        for j in c..cols {
                            if !d[r * cols + j].is_zero() {
                                let x = &f * &d[r * cols + j];
                                d[i * cols + j] -= x;
                            }
                        }
                    }
                    pivots.push(c);
                    r += 1;
                }
            }
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the nullspace, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let k = self.kernel_matrix();
        k.columns()
    }

    /// Nullspace basis as the columns of a `cols x nullity` matrix. Column `t`
    /// has a 1 at the t-th free variable and zeros at the other free variables.
    pub fn kernel_matrix(&self) -> Matrix {
        self.kernel_with_free().0
    }

    /// Kernel matrix together with the free columns; coordinates of a kernel
    /// vector in this basis are its entries at the free columns.
    pub fn kernel_with_free(&self) -> (Matrix, Vec<usize>) {
        let (r, piv) = self.rref();
        let free: Vec<usize> = {
            let mut is_piv = vec![false; self.cols];
            piv.iter().for_each(|&c| is_piv[c] = true);
            (0..self.cols).filter(|&c| !is_piv[c]).collect()
        };
        let mut k = Matrix::zeros(self.field, self.cols, free.len());
        let one = self.field.one();
        for (t, &f) in free.iter().enumerate() {
            k.set(f, t, &one);
            for (i, &pc) in piv.iter().enumerate() {
                if !r.is_entry_zero(i, f) {
                    k.set(pc, t, &-r.get(i, f));
                }
            }
        }
        debug_assert!(self.mul(&k).is_zero(), "kernel basis not annihilated");
        (k, free)
    }

    /// Solves `self * x = b`.
    pub fn solve(&self, b: &[Scalar]) -> Result<Solution, LinError> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let bm = Matrix::from_columns(self.field, self.rows, &[b.to_vec()]);
        let x = self.solve_matrix(&bm)?;
        Ok(Solution { particular: x.column(0), kernel: self.kernel_basis() })
    }

    /// Solves `self * X = B` column by column, returning one particular solution.
    pub fn solve_matrix(&self, b: &Matrix) -> Result<Matrix, LinError> {
        assert_eq!(b.rows, self.rows);
        let aug = self.hstack(b);
        let (r, piv) = aug.rref();
        if piv.iter().any(|&c| c >= self.cols) {
            return Err(LinError::NoSolution);
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in piv.iter().enumerate() {
            for j in 0..b.cols {
                if !r.is_entry_zero(i, self.cols + j) {
                    x.set(pc, j, &r.get(i, self.cols + j));
                }
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let x = self.solve_matrix(&Matrix::identity(self.field, self.rows)).ok()?;
        if self.rank() == self.rows {
            Some(x)
        } else {
            None
        }
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

/// Incrementally maintained subspace in reduced echelon form.
///
/// Rows are kept fully reduced against each other so membership and
/// coordinates are read off directly at the pivot columns.
#[derive(Debug, Clone)]
pub struct Subspace {
    field: Field,
    dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn new(field: Field, ambient: usize) -> Subspace {
        Subspace { field, dim: ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by(field: Field, ambient: usize, vecs: &[Vec<Scalar>]) -> Subspace {
        let mut s = Subspace::new(field, ambient);
        if vecs.is_empty() {
            return s;
        }
        let m = Matrix::from_rows(field, vecs);
        let (r, piv) = m.rref();
        for (i, &c) in piv.iter().enumerate() {
            s.rows.push(r.row(i));
            s.pivots.push(c);
        }
        s.sort();
        s
    }

    pub fn ambient(&self) -> usize {
        self.dim
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn basis(&self) -> &[Vec<Scalar>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        self.rows = idx.iter().map(|&i| self.rows[i].clone()).collect();
        self.pivots = idx.iter().map(|&i| self.pivots[i]).collect();
    }

    /// Reduces `v` modulo the subspace.
    pub fn reduce(&self, v: &[Scalar]) -> Vec<Scalar> {
        let mut w = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if !w[c].is_zero() {
                let f = w[c].clone();
                for (x, y) in w.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns true if the dimension grew.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        let mut w = self.reduce(v);
        let Some(c) = w.iter().position(|x| !x.is_zero()) else { return false };
        let inv = w[c].inv().unwrap();
        w.iter_mut().for_each(|x| *x = &*x * &inv);
        for row in self.rows.iter_mut() {
            if !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&w) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let pos = self.pivots.partition_point(|&p| p < c);
        self.rows.insert(pos, w);
        self.pivots.insert(pos, c);
        true
    }

    /// Coordinates of `v` with respect to `basis()`; `None` if `v` is outside.
    pub fn coordinates(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&c| v[c].clone()).collect())
    }

    /// Basis vectors as matrix columns.
    pub fn as_columns(&self) -> Matrix {
        Matrix::from_columns(self.field, self.dim, &self.rows)
    }

    /// Standard basis vectors completing this subspace, chosen at the
    /// non-pivot positions.
    pub fn complement_positions(&self) -> Vec<usize> {
        let mut is_piv = vec![false; self.dim];
        self.pivots.iter().for_each(|&c| is_piv[c] = true);
        (0..self.dim).filter(|&c| !is_piv[c]).collect()
    }
}

pub fn zero_vec(field: Field, n: usize) -> Vec<Scalar> {
    vec![field.zero(); n]
}

pub fn unit_vec(field: Field, n: usize, i: usize) -> Vec<Scalar> {
    let mut v = zero_vec(field, n);
    v[i] = field.one();
    v
}

pub fn is_zero_vec(v: &[Scalar]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn vec_add(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(s: &Scalar, a: &[Scalar]) -> Vec<Scalar> {
    a.iter().map(|x| s * x).collect()
}

/// `a += s * b`.
pub fn axpy(a: &mut [Scalar], s: &Scalar, b: &[Scalar]) {
    if s.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = &*x + &(s * y);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_over_f2() {
        let m = Matrix::from_i64(Field::fp(2), &[vec![1, 1], vec![1, 1]]);
        let (r, piv) = m.rref();
        assert_eq!(r, Matrix::from_i64(Field::fp(2), &[vec![1, 1], vec![0, 0]]));
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn kernel_over_f3() {
        let f = Field::fp(3);
        let k = Matrix::from_i64(f, &[vec![1, 2]]).kernel_basis();
        assert_eq!(k, vec![vec![f.one(), f.one()]]);
    }

    #[test]
    fn solve_identity_and_zero() {
        let f = Field::rationals();
        let b = vec![f.from_i64(3), f.from_ratio(-1, 2).unwrap()];
        let s = Matrix::identity(f, 2).solve(&b).unwrap();
        assert_eq!(s.particular, b);
        assert!(s.kernel.is_empty());
        let z = Matrix::zeros(f, 2, 3).solve(&zero_vec(f, 2)).unwrap();
        assert!(is_zero_vec(&z.particular));
        assert_eq!(z.kernel.len(), 3);
        assert_eq!(Matrix::zeros(f, 2, 2).solve(&b), Err(LinError::NoSolution));
    }

    #[test]
    fn inverse_and_rank() {
        let f = Field::fp(5);
        let m = Matrix::from_i64(f, &[vec![2, 1], vec![1, 1]]);
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(f, 2));
        assert!(Matrix::from_i64(f, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
        assert_eq!(Matrix::from_i64(f, &[vec![1, 2, 3], vec![2, 4, 6]]).rank(), 1);
    }

    #[test]
    fn scalar_parsing_and_reduction() {
        let f = Field::fp(7);
        assert_eq!(f.parse_scalar("3/2").unwrap(), f.from_i64(5));
        assert_eq!(f.parse_scalar("-1").unwrap(), f.from_i64(6));
        assert!(f.parse_scalar("1/7").is_err());
        let q = Field::rationals();
        assert_eq!(q.parse_scalar("6/4").unwrap(), q.from_ratio(3, 2).unwrap());
        assert_eq!(f.elements().unwrap().len(), 7);
        assert!(Field::new(4).is_err());
    }

    #[test]
    fn subspace_reduction() {
        let f = Field::fp(3);
        let s = Subspace::spanned_by(f, 3, &[vec![f.one(), f.one(), f.zero()], vec![f.from_i64(2), f.from_i64(2), f.zero()]]);
        assert_eq!(s.dim(), 1);
        assert!(s.contains(&[f.from_i64(2), f.from_i64(2), f.zero()]));
        assert!(!s.contains(&[f.one(), f.zero(), f.zero()]));
        assert_eq!(s.complement_positions().len(), 2);
    }
}
