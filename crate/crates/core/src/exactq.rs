//! Exact rational arithmetic, degree-one parameter forms in `e, w, w′`, and
//! dense linear algebra over the rationals.
//!
//! Everything here is exact. Pivoting always takes the first nonzero entry in
//! a column, so the output of [`QMatrix::rref`] is deterministic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector is not in the span of the given basis")]
    NotInSpan,
    #[error("subspace is not preserved by the action")]
    NotInvariant,
    #[error("cannot parse rational from {0:?}")]
    Parse(String),
    #[error("product of two parameter-dependent scalars: ({0}) * ({1})")]
    ParameterProduct(String, String),
}

/// `n / d` as a rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `p` for integers and `p/q` otherwise.
pub fn fmt_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let t = s.trim();
    Rational::from_str(t).map_err(|_| LinalgError::Parse(s.to_string()))
}

// ---------------------------------------------------------------------------
// ParamScalar
// ---------------------------------------------------------------------------

/// A rational linear form `c0 + cE·e + cW·w + cW2·w′`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ParamScalar {
    pub c0: Rational,
    pub ce: Rational,
    pub cw: Rational,
    pub cw2: Rational,
}

impl ParamScalar {
    pub fn new(c0: Rational, ce: Rational, cw: Rational, cw2: Rational) -> Self {
        ParamScalar { c0, ce, cw, cw2 }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        ParamScalar { c0: c, ..Self::default() }
    }

    pub fn e() -> Self {
        ParamScalar { ce: Rational::one(), ..Self::default() }
    }

    pub fn w() -> Self {
        ParamScalar { cw: Rational::one(), ..Self::default() }
    }

    pub fn w2() -> Self {
        ParamScalar { cw2: Rational::one(), ..Self::default() }
    }

    /// Convenience constructor `a·e + b·w` with rational coefficients.
    pub fn ew(a: Rational, b: Rational) -> Self {
        ParamScalar { ce: a, cw: b, ..Self::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.ce.is_zero() && self.cw.is_zero() && self.cw2.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.ce.is_zero() && self.cw.is_zero() && self.cw2.is_zero()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        ParamScalar {
            c0: &self.c0 * k,
            ce: &self.ce * k,
            cw: &self.cw * k,
            cw2: &self.cw2 * k,
        }
    }

    /// Multiplication, defined only when one factor is a constant.
    pub fn try_mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.is_constant() {
            Ok(other.scale(&self.c0))
        } else if other.is_constant() {
            Ok(self.scale(&other.c0))
        } else {
            Err(LinalgError::ParameterProduct(self.to_string(), other.to_string()))
        }
    }

    /// Evaluates at concrete parameter values.
    pub fn eval(&self, e: &Rational, w: &Rational, w2: &Rational) -> Rational {
        &self.c0 + &self.ce * e + &self.cw * w + &self.cw2 * w2
    }

    /// Substitutes `w′ := w`.
    pub fn identify_w2_with_w(&self) -> Self {
        ParamScalar {
            c0: self.c0.clone(),
            ce: self.ce.clone(),
            cw: &self.cw + &self.cw2,
            cw2: Rational::zero(),
        }
    }

    /// Swaps the roles of `w` and `w′`.
    pub fn swap_w(&self) -> Self {
        ParamScalar {
            c0: self.c0.clone(),
            ce: self.ce.clone(),
            cw: self.cw2.clone(),
            cw2: self.cw.clone(),
        }
    }
}

impl fmt::Display for ParamScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (c, sym) in [(&self.c0, ""), (&self.ce, "e"), (&self.cw, "w"), (&self.cw2, "w'")] {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if sym.is_empty() || !mag.is_one() {
                out.push_str(&fmt_rational(&mag));
            }
            out.push_str(sym);
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

impl Add for ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl<'a> Add<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn add(self, rhs: &ParamScalar) -> ParamScalar {
        ParamScalar {
            c0: &self.c0 + &rhs.c0,
            ce: &self.ce + &rhs.ce,
            cw: &self.cw + &rhs.cw,
            cw2: &self.cw2 + &rhs.cw2,
        }
    }
}

impl AddAssign<&ParamScalar> for ParamScalar {
    fn add_assign(&mut self, rhs: &ParamScalar) {
        self.c0 += &rhs.c0;
        self.ce += &rhs.ce;
        self.cw += &rhs.cw;
        self.cw2 += &rhs.cw2;
    }
}

impl Sub for ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl<'a> Sub<&'a ParamScalar> for &'a ParamScalar {
    type Output = ParamScalar;
    fn sub(self, rhs: &ParamScalar) -> ParamScalar {
        self + &(-rhs)
    }
}

impl SubAssign<&ParamScalar> for ParamScalar {
    fn sub_assign(&mut self, rhs: &ParamScalar) {
        *self += &(-rhs);
    }
}

impl Neg for ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> Self {
        -&self
    }
}

impl Neg for &ParamScalar {
    type Output = ParamScalar;
    fn neg(self) -> ParamScalar {
        self.scale(&int(-1))
    }
}

impl Mul<&ParamScalar> for &Rational {
    type Output = ParamScalar;
    fn mul(self, rhs: &ParamScalar) -> ParamScalar {
        rhs.scale(self)
    }
}

// ---------------------------------------------------------------------------
// QMatrix
// ---------------------------------------------------------------------------

/// Dense rational matrix, stored as a list of rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![vec![Rational::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from rows; all rows must have `cols` entries.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        for r in &rows {
            if r.len() != cols {
                return Err(LinalgError::DimensionMismatch { expected: cols, found: r.len() });
            }
        }
        Ok(QMatrix { rows: rows.len(), cols, data: rows })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        QMatrix { rows: rows.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors of length `dim`.
    pub fn from_columns(dim: usize, cols: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != dim {
                return Err(LinalgError::DimensionMismatch { expected: dim, found: c.len() });
            }
            for (i, x) in c.iter().enumerate() {
                m.data[i][j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i][j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Rational) {
        self.data[i][j] += v;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &Vec<Rational>> {
        self.data.iter()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        self.data.iter().map(|r| r[j].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r.iter().enumerate() {
                if !x.is_zero() {
                    t.data[j][i] = x.clone();
                }
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (k, a) in self.data[i].iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in other.data[k].iter().enumerate() {
                    if !b.is_zero() {
                        out.data[i][j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok(self
            .data
            .iter()
            .map(|r| {
                let mut acc = Rational::zero();
                for (a, b) in r.iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect())
    }

    /// Reduced row-echelon form and the (strictly increasing) pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.data.clone();
        let pivots = rref_in_place(&mut m, self.cols);
        (QMatrix { rows: self.rows, cols: self.cols, data: m }, pivots)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        rref_in_place(&mut m, self.cols).len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                let x = &r.data[row][free];
                if !x.is_zero() {
                    v[p] = -x.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in &self.data {
            let line: Vec<String> = r.iter().map(fmt_rational).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<QMatrix, LinalgError> {
        let mut rows = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let row = line.split(',').map(parse_rational).collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let cols = rows.first().map_or(0, Vec::len);
        QMatrix::from_rows(cols, rows)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.data
                .iter()
                .map(|r| {
                    serde_json::Value::Array(
                        r.iter().map(|x| serde_json::Value::String(fmt_rational(x))).collect(),
                    )
                })
                .collect(),
        )
    }
}

/// Gauss-Jordan elimination over the first `cols` columns; returns pivot columns.
fn rref_in_place(m: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        if !inv.is_one() {
            for x in m[row][col..].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let (head, tail) = m.split_at_mut(row);
        let (pivot_row, rest) = tail.split_first_mut().expect("row in range");
        let nz: Vec<usize> = (col..cols).filter(|&j| !pivot_row[j].is_zero()).collect();
        for other in head.iter_mut().chain(rest.iter_mut()) {
            if other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for &j in &nz {
                let t = &f * &pivot_row[j];
                other[j] -= t;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// An echelon basis of a subspace of `Q^dim`, supporting fast membership and
/// coordinate queries.
#[derive(Clone, Debug)]
pub struct Subspace {
    dim: usize,
    /// RREF rows spanning the subspace.
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(dim: usize, vectors: &[Vec<Rational>]) -> Self {
        let mut rows: Vec<Vec<Rational>> = vectors.to_vec();
        let pivots = rref_in_place(&mut rows, dim);
        rows.truncate(pivots.len());
        Subspace { dim, rows, pivots }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// Residue of `v` after elimination against the echelon rows.
    pub fn residue(&self, v: &[Rational]) -> Vec<Rational> {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.residue(v).iter().all(Zero::is_zero)
    }

    pub fn contains_all(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(v: &[Rational], basis: &[Vec<Rational>]) -> bool {
    Subspace::span(v.len(), basis).contains(v)
}

/// Coordinates of `v` in the (linearly independent) vectors `basis`.
pub fn solve_in_basis(basis: &[Vec<Rational>], v: &[Rational]) -> Result<Vec<Rational>, LinalgError> {
    let dim = v.len();
    let k = basis.len();
    // Augmented system [B | v], eliminate.
    let mut rows: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut r: Vec<Rational> = basis.iter().map(|b| b[i].clone()).collect();
            r.push(v[i].clone());
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, k + 1);
    if pivots.last() == Some(&k) {
        return Err(LinalgError::NotInSpan);
    }
    if pivots.len() != k {
        return Err(LinalgError::DimensionMismatch { expected: k, found: pivots.len() });
    }
    Ok((0..k).map(|i| rows[i][k].clone()).collect())
}

/// Coordinates of the class of `v` in `ambient / subspace`, with respect to a
/// complement basis consisting of the ambient vectors that are not in the
/// span of the subspace together with the earlier ambient vectors.
///
/// Returns the complement indices (into `ambient`) and the coordinates.
pub fn quotient_coords(
    ambient: &[Vec<Rational>],
    subspace: &[Vec<Rational>],
    v: &[Rational],
) -> Result<(Vec<usize>, Vec<Rational>), LinalgError> {
    let dim = v.len();
    let amb = Subspace::span(dim, ambient);
    for s in subspace {
        if !amb.contains(s) {
            return Err(LinalgError::NotInSpan);
        }
    }
    if !amb.contains(v) {
        return Err(LinalgError::NotInSpan);
    }
    let mut acc: Vec<Vec<Rational>> = subspace.to_vec();
    let mut complement = Vec::new();
    let mut current = Subspace::span(dim, &acc);
    for (i, a) in ambient.iter().enumerate() {
        if !current.contains(a) {
            complement.push(i);
            acc.push(a.clone());
            current = Subspace::span(dim, &acc);
        }
    }
    let sub_basis = Subspace::span(dim, subspace);
    let mut full: Vec<Vec<Rational>> = complement.iter().map(|&i| ambient[i].clone()).collect();
    full.extend(sub_basis.basis().iter().cloned());
    let coords = solve_in_basis(&full, v)?;
    Ok((complement.clone(), coords[..complement.len()].to_vec()))
}

/// Trace of the endomorphism induced by `action` on the subspace with the
/// given (independent) basis vectors.
pub fn trace_on_invariant_subspace(action: &QMatrix, basis: &[Vec<Rational>]) -> Result<Rational, LinalgError> {
    let mut tr = Rational::zero();
    if basis.is_empty() {
        return Ok(tr);
    }
    let dim = basis[0].len();
    if action.ncols() != dim || action.nrows() != dim {
        return Err(LinalgError::DimensionMismatch { expected: dim, found: action.ncols() });
    }
    let images: Vec<Vec<Rational>> =
        basis.iter().map(|b| action.mul_vec(b)).collect::<Result<_, _>>()?;
    // Solve B·M = A·B column by column, summing diagonal entries of M.
    let k = basis.len();
    let mut rows: Vec<Vec<Rational>> = (0..dim)
        .map(|i| {
            let mut r: Vec<Rational> = basis.iter().map(|b| b[i].clone()).collect();
            r.extend(images.iter().map(|im| im[i].clone()));
            r
        })
        .collect();
    let pivots = rref_in_place(&mut rows, 2 * k);
    if pivots.len() > k || pivots.iter().any(|&p| p >= k) {
        return Err(LinalgError::NotInvariant);
    }
    if pivots.len() != k {
        return Err(LinalgError::DimensionMismatch { expected: k, found: pivots.len() });
    }
    for j in 0..k {
        tr += &rows[j][k + j];
    }
    Ok(tr)
}

/// Dot product of two rational vectors.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// `Serialize`-friendly rational wrapper (`"p/q"` strings).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalString(pub String);

impl From<&Rational> for RationalString {
    fn from(q: &Rational) -> Self {
        RationalString(fmt_rational(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = QMatrix::identity(3);
        let (r, p) = id.rref();
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1, 2]);

        let z = QMatrix::zeros(2, 4);
        let (r, p) = z.rref();
        assert_eq!(r, z);
        assert!(p.is_empty());
    }

    #[test]
    fn rref_is_idempotent_on_example() {
        let m = QMatrix::from_i64_rows(&[&[2, 4, 1], &[1, 2, 0], &[3, 6, 1]]);
        let (r, p) = m.rref();
        let (rr, pp) = r.rref();
        assert_eq!(r, rr);
        assert_eq!(p, pp);
        assert_eq!(p, vec![0, 2]);
    }

    #[test]
    fn nullspace_of_one_minus_one() {
        let m = QMatrix::from_i64_rows(&[&[1, -1]]);
        let ns = m.nullspace_basis();
        assert_eq!(ns, vec![v(&[1, 1])]);
    }

    #[test]
    fn span_membership() {
        assert!(in_span(&v(&[1, 1, 0]), &[v(&[1, 0, 0]), v(&[0, 1, 0])]));
        assert!(!in_span(&v(&[0, 0, 1]), &[v(&[1, 0, 0]), v(&[0, 1, 0])]));
    }

    #[test]
    fn traces_on_subspaces() {
        let id = QMatrix::identity(4);
        let b = vec![v(&[1, 0, 0, 0]), v(&[0, 1, 1, 0]), v(&[0, 0, 0, 1])];
        assert_eq!(trace_on_invariant_subspace(&id, &b).unwrap(), int(3));

        let swap = QMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(trace_on_invariant_subspace(&swap, &[v(&[1, 1])]).unwrap(), int(1));
        assert_eq!(trace_on_invariant_subspace(&swap, &[v(&[1, -1])]).unwrap(), int(-1));
        assert_eq!(
            trace_on_invariant_subspace(&swap, &[v(&[1, 0])]),
            Err(LinalgError::NotInvariant)
        );
    }

    #[test]
    fn quotient_coordinates() {
        let amb = vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])];
        let sub = vec![v(&[1, 1, 0])];
        let (comp, c) = quotient_coords(&amb, &sub, &v(&[2, 3, 5])).unwrap();
        // complement = e0, e2 ; class of (2,3,5) = (2,3,5) - 3(1,1,0) = (-1,0,5)
        assert_eq!(comp, vec![0, 2]);
        assert_eq!(c, v(&[-1, 5]));
        assert_eq!(
            quotient_coords(&amb[..2], &sub, &v(&[0, 0, 1])),
            Err(LinalgError::NotInSpan)
        );
    }

    #[test]
    fn param_scalar_rules() {
        let a = ParamScalar::ew(int(2), int(-1));
        let three = ParamScalar::constant(int(3));
        assert_eq!(three.try_mul(&a).unwrap(), ParamScalar::ew(int(6), int(-3)));
        assert!(matches!(a.try_mul(&a), Err(LinalgError::ParameterProduct(_, _))));
        assert_eq!(a.to_string(), "2e - w");
        assert_eq!(ParamScalar::zero().to_string(), "0");
        assert_eq!((ParamScalar::e().scale(&rat(-1, 2)) + ParamScalar::w2()).to_string(), "-1/2e + w'");
    }

    #[test]
    fn csv_round_trip() {
        let m = QMatrix::from_rows(2, vec![vec![rat(1, 2), int(-3)], vec![int(0), rat(-7, 3)]]).unwrap();
        let csv = m.to_csv();
        assert_eq!(csv, "1/2,-3\n0,-7/3\n");
        assert_eq!(QMatrix::from_csv(&csv).unwrap(), m);
    }
}
