//! Dense matrices over a [`Field`] and the echelon forms the rest of the
//! crate is built on.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fe>,
}

impl Serialize for Fe {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u16(self.0)
    }
}

impl<'de> Deserialize<'de> for Fe {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        u16::deserialize(d).map(Fe)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Colex comparison of equal-length vectors: the largest index at which they
/// differ decides.
pub fn colex_cmp(a: &[Fe], b: &[Fe]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

impl Ord for Matrix {
    /// Shape first, then columns left to right, each compared colex.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols)
            .cmp(&(other.rows, other.cols))
            .then_with(|| {
                for j in 0..self.cols {
                    for i in (0..self.rows).rev() {
                        match self.get(i, j).cmp(&other.get(i, j)) {
                            Ordering::Equal => continue,
                            o => return o,
                        }
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `matrix_cmp` with an explicit shape check.
pub fn matrix_cmp(a: &Matrix, b: &Matrix) -> Result<Ordering> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Shape(format!(
            "cannot compare {}x{} with {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.cmp(b))
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Fe::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fe::ONE);
        }
        m
    }

    pub fn diag(d: &[Fe]) -> Matrix {
        let mut m = Matrix::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Fe>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.concat() }
    }

    /// Builds a `rows`-row matrix from columns.
    pub fn from_cols(rows: usize, cols: &[Vec<Fe>]) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            m.set_col(j, c);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fe {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Fe) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Fe] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Fe] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fe> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn set_col(&mut self, j: usize, c: &[Fe]) {
        for (i, &x) in c.iter().enumerate() {
            self.set(i, j, x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut m = Matrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j));
            }
        }
        m
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!("hstack of {} and {} rows", self.rows, other.rows)));
        }
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            m.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            m.row_mut(i)[self.cols..].copy_from_slice(other.row(i));
        }
        Ok(m)
    }

    pub fn mul(&self, f: &Field, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "product of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut m = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        let cur = m.get(i, j);
                        m.set(i, j, f.add(cur, f.mul(a, b)));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Fe::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    /// `v^T M` as a vector of length `cols`.
    pub fn vec_mul(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![Fe::ZERO; self.cols];
        for (i, &a) in v.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(i, j);
                if !b.is_zero() {
                    *o = f.add(*o, f.mul(a, b));
                }
            }
        }
        out
    }

    /// Entrywise Frobenius `x -> x^(p^e)`.
    pub fn frob(&self, f: &Field, e: u32) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: f.frob_vec(&self.data, e) }
    }

    pub fn scale_row(&mut self, f: &Field, i: usize, c: Fe) {
        for x in self.row_mut(i) {
            *x = f.mul(*x, c);
        }
    }

    pub fn scale_col(&mut self, f: &Field, j: usize, c: Fe) {
        for i in 0..self.rows {
            let x = self.get(i, j);
            self.set(i, j, f.mul(x, c));
        }
    }

    /// row_dst += c * row_src
    pub fn add_row(&mut self, f: &Field, dst: usize, src: usize, c: Fe) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = f.add(self.get(dst, j), f.mul(c, self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    /// col_dst += c * col_src
    pub fn add_col(&mut self, f: &Field, dst: usize, src: usize, c: Fe) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = f.add(self.get(i, dst), f.mul(c, self.get(i, src)));
            self.set(i, dst, v);
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn entries(&self) -> &[Fe] {
        &self.data
    }
}

/// Result of row reduction: `t * m == r` with `t` invertible and `r` in
/// reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    pub r: Matrix,
    pub t: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn rref(f: &Field, m: &Matrix) -> Rref {
    let mut r = m.clone();
    let mut t = Matrix::identity(m.rows);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..m.cols {
        if row == m.rows {
            break;
        }
        let Some(p) = (row..m.rows).find(|&i| !r.get(i, col).is_zero()) else {
            continue;
        };
        r.swap_rows(row, p);
        t.swap_rows(row, p);
        let inv = f.inv_nz(r.get(row, col));
        r.scale_row(f, row, inv);
        t.scale_row(f, row, inv);
        for i in 0..m.rows {
            if i != row {
                let c = f.neg(r.get(i, col));
                r.add_row(f, i, row, c);
                t.add_row(f, i, row, c);
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { r, t, rank: row, pivots }
}

/// Reduced column echelon form: returns `(r, s, rank)` with `m * s^T == r`.
pub fn rcef(f: &Field, m: &Matrix) -> (Matrix, Matrix, usize) {
    let red = rref(f, &m.transpose());
    (red.r.transpose(), red.t, red.rank)
}

pub fn rank(f: &Field, m: &Matrix) -> usize {
    rref(f, m).rank
}

/// RCEF basis of the column space (zero columns dropped).
pub fn column_space(f: &Field, m: &Matrix) -> Matrix {
    let (r, _, rank) = rcef(f, m);
    r.submatrix(0, m.rows, 0, rank)
}

/// Columns `v` spanning `{ v : v^T m = 0 }`, as a `rows x (rows - rank)` matrix.
pub fn kernel_basis(f: &Field, m: &Matrix) -> Matrix {
    let red = rref(f, &m.transpose());
    let n = m.rows;
    let free: Vec<usize> = (0..n).filter(|c| !red.pivots.contains(c)).collect();
    let mut out = Matrix::zeros(n, free.len());
    for (j, &fc) in free.iter().enumerate() {
        out.set(fc, j, Fe::ONE);
        for (row, &pc) in red.pivots.iter().enumerate() {
            out.set(pc, j, f.neg(red.r.get(row, fc)));
        }
    }
    out
}

pub fn inverse(f: &Field, m: &Matrix) -> Result<Matrix> {
    if m.rows != m.cols {
        return Err(Error::Shape(format!("inverse of {}x{}", m.rows, m.cols)));
    }
    let red = rref(f, m);
    if red.rank < m.rows {
        return Err(Error::Singular);
    }
    Ok(red.t)
}

/// Normalized representatives (first nonzero entry 1) of the points of
/// PG(k-1, q), sorted colex.
pub fn projective_points(f: &Field, k: usize) -> Vec<Vec<Fe>> {
    let q = f.q() as usize;
    let mut out = Vec::new();
    for lead in 0..k {
        let free = k - lead - 1;
        let count = q.pow(free as u32);
        for mut code in 0..count {
            let mut v = vec![Fe::ZERO; k];
            v[lead] = Fe::ONE;
            for x in v.iter_mut().skip(lead + 1) {
                *x = Fe((code % q) as u16);
                code /= q;
            }
            out.push(v);
        }
    }
    out.sort_by(|a, b| colex_cmp(a, b));
    out
}

/// Number of points of PG(k-1, q), saturating.
pub fn num_projective_points(q: u32, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..k {
        total = total.saturating_add(pw);
        pw = pw.saturating_mul(q as u128);
    }
    total
}

/// Scales a nonzero vector so that its first nonzero entry is 1.
pub fn normalize_projective(f: &Field, v: &mut [Fe]) {
    if let Some(&lead) = v.iter().find(|x| !x.is_zero()) {
        let inv = f.inv_nz(lead);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
    }
}
