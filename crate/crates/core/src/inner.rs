//! Inner minimization: bringing the coordinates pinned by the partition into
//! a normal form under the inner group, while tracking the stabilizer of the
//! pinned data.
//!
//! The stabilizer is kept as `(t, cells, e)`. Acting on normals its matrix
//! part is `[[D, B1], [0, B2]]` with `D` diagonal and constant on every cell
//! of the rows `0..t`; the field part is generated by `frob^e`. Pinned normal
//! vectors and pinned columns of pinned subspaces are supported inside a
//! single cell, which is what lets a row scaling be undone on them by a
//! single scalar (`b_j` for a normal, a diagonal entry of `E_i` for a column).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::field::{Fe, Field};
use crate::linalg::{colex_cmp, Matrix};
use crate::model::Semilinear;
use crate::partition::Partition;
use crate::preprocess::ExtendedInstance;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerStab {
    pub t: usize,
    /// Cell label of each row `< t`; the label is the smallest row of the cell.
    pub row_cell: Vec<usize>,
    /// Field automorphisms left: `<frob^e>`, `e` divides `r` (`e == r` is trivial).
    pub e: u32,
}

impl InnerStab {
    pub fn new() -> InnerStab {
        InnerStab { t: 0, row_cell: Vec::new(), e: 1 }
    }

    /// Cells as sorted row lists, ordered by label.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (r, &l) in self.row_cell.iter().enumerate() {
            m.entry(l).or_default().push(r);
        }
        m.into_values().collect()
    }

    fn merge(&mut self, labels: &[usize]) {
        if labels.len() < 2 {
            return;
        }
        let target = *labels.iter().min().unwrap();
        for l in self.row_cell.iter_mut() {
            if labels.contains(l) {
                *l = target;
            }
        }
    }
}

impl Default for InnerStab {
    fn default() -> Self {
        Self::new()
    }
}

/// One column (or normal) brought to normal form.
#[derive(Clone, Debug)]
pub struct ColumnMin {
    /// Row multipliers for the rows the column was given on.
    pub mult: Vec<Fe>,
    pub frob: u32,
    pub result: Vec<Fe>,
    pub merge: Vec<usize>,
    pub new_e: u32,
}

/// Normal form of a column `col` (rows `0..col.len()`, all `< t`) under
/// row scalings constant on cells, one extra scalar and `<frob^e>`.
///
/// With `linked == None` the extra scalar is free, so every touched cell is
/// scaled independently to make its highest nonzero entry 1. With
/// `linked == Some(l)` the scalar is tied to cell `l`, whose entries stay as
/// they are. The remaining field automorphisms then minimize the column colex.
pub fn minimize_column(f: &Field, col: &[Fe], linked: Option<usize>, row_cell: &[usize], e: u32) -> ColumnMin {
    let t = col.len();
    let mut top: BTreeMap<usize, usize> = BTreeMap::new();
    let mut any = false;
    for (r, x) in col.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        any = true;
        if Some(row_cell[r]) != linked {
            top.insert(row_cell[r], r);
        }
    }
    let mut mult = vec![Fe::ONE; t];
    for (&label, &r) in &top {
        let inv = f.inv_nz(col[r]);
        for rr in 0..t {
            if row_cell[rr] == label {
                mult[rr] = inv;
            }
        }
    }
    let normalized: Vec<Fe> = col.iter().zip(&mult).map(|(&x, &m)| f.mul(x, m)).collect();
    let r = f.r();
    let (mut best, mut best_a) = (normalized.clone(), 0);
    let mut a = e;
    while a < r {
        let cand = f.frob_vec(&normalized, a);
        if colex_cmp(&cand, &best).is_lt() {
            best = cand;
            best_a = a;
        }
        a += e;
    }
    let mut new_e = e;
    while new_e < r && f.frob_vec(&best, new_e) != best {
        new_e += e;
    }
    let new_e = new_e.min(r);
    let mut merge: Vec<usize> = top.keys().copied().collect();
    if let Some(l) = linked {
        if any && !merge.is_empty() {
            merge.push(l);
        }
    }
    ColumnMin { mult, frob: best_a, result: best, merge, new_e }
}

/// Normal form of the top block of a newly fixed subspace, column by column,
/// on copies of the stabilizer data. Returns the per-column steps so that the
/// real state can replay them.
pub fn minimize_block(f: &Field, block: &Matrix, inn: &InnerStab) -> (Matrix, InnerStab, Vec<ColumnMin>) {
    let mut x = block.clone();
    let mut st = inn.clone();
    let mut steps = Vec::with_capacity(x.cols());
    for c in 0..x.cols() {
        let m = minimize_column(f, &x.col(c), None, &st.row_cell, st.e);
        for i in 0..x.rows() {
            x.scale_row(f, i, m.mult[i]);
        }
        for cc in 0..c {
            let piv = (0..x.rows()).find(|&i| !x.get(i, cc).is_zero()).expect("pinned column is nonzero");
            x.scale_col(f, cc, f.inv_nz(m.mult[piv]));
        }
        if m.frob != 0 {
            x = x.frob(f, m.frob);
        }
        st.merge(&m.merge);
        st.e = m.new_e;
        steps.push(m);
    }
    (x, st, steps)
}

/// Canonical image of an unfixed normal under the current stabilizer.
pub fn predict_normal(f: &Field, v: &[Fe], inn: &InnerStab) -> Vec<Fe> {
    let t = inn.t;
    if v[t..].iter().any(|x| !x.is_zero()) {
        let mut out = vec![Fe::ZERO; v.len()];
        out[t] = Fe::ONE;
        return out;
    }
    let m = minimize_column(f, &v[..t], None, &inn.row_cell, inn.e);
    let mut out = m.result;
    out.resize(v.len(), Fe::ZERO);
    out
}

/// What one round of inner minimization produced; part of the node trace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InnerRecord {
    pub t: usize,
    pub e: u32,
    pub row_cell: Vec<usize>,
    pub normals: Vec<Vec<Fe>>,
    pub blocks: Vec<Matrix>,
}

/// The data of one search node apart from its partition.
#[derive(Clone, Debug)]
pub struct NodeState {
    pub field: Arc<Field>,
    pub k: usize,
    pub n: usize,
    pub u: Vec<Matrix>,
    pub v: Vec<Vec<Fe>>,
    /// Original position of the item now at each position.
    pub labels: Vec<usize>,
    pub inn: InnerStab,
    /// Rank of the top `t` rows of each subspace.
    pub col_rank: Vec<usize>,
    /// Number of pinned leading columns of each subspace; only pinned
    /// positions have any.
    pub pinned_cols: Vec<usize>,
    pub pinned: Vec<bool>,
    /// Maps the extended instance (in original position order) to this node.
    pub acc: Semilinear,
    /// Prefix of the partition's fixed sequence already minimized.
    pub processed: usize,
}

impl NodeState {
    pub fn root(x: &ExtendedInstance) -> NodeState {
        let n = x.n();
        NodeState {
            field: x.field.clone(),
            k: x.k,
            n,
            u: x.u.clone(),
            v: x.v.clone(),
            labels: (0..n + x.h()).collect(),
            inn: InnerStab::new(),
            col_rank: vec![0; n],
            pinned_cols: vec![0; n],
            pinned: vec![false; n + x.h()],
            acc: Semilinear::identity(x.k),
            processed: 0,
        }
    }

    pub fn h(&self) -> usize {
        self.v.len()
    }

    /// Reorders positions: the item at `order[p]` moves to `p`.
    pub fn permute(&mut self, order: &[usize]) {
        if order.iter().enumerate().all(|(i, &o)| i == o) {
            return;
        }
        let n = self.n;
        let (cu, cv) = (&order[..n], &order[n..]);
        self.u = cu.iter().map(|&o| self.u[o].clone()).collect();
        self.col_rank = cu.iter().map(|&o| self.col_rank[o]).collect();
        self.pinned_cols = cu.iter().map(|&o| self.pinned_cols[o]).collect();
        self.v = cv.iter().map(|&o| self.v[o - n].clone()).collect();
        self.labels = order.iter().map(|&o| self.labels[o]).collect();
        self.pinned = order.iter().map(|&o| self.pinned[o]).collect();
    }

    pub fn swap(&mut self, a: usize, b: usize) {
        let mut order: Vec<usize> = (0..self.labels.len()).collect();
        order.swap(a, b);
        self.permute(&order);
    }

    /// Top block `(U_i)_{[t], [t_i]}`.
    pub fn top_block(&self, i: usize) -> Matrix {
        self.u[i].submatrix(0, self.inn.t, 0, self.col_rank[i])
    }

    /// U-side diagonal `d` (length `k`); normals are divided by `d`.
    /// Pinned data is restored by column and normal scalars afterwards.
    fn apply_diag(&mut self, d: &[Fe]) {
        if d.iter().all(|&x| x == Fe::ONE) {
            return;
        }
        let f = self.field.clone();
        let f = &*f;
        for m in &mut self.u {
            for (r, &x) in d.iter().enumerate() {
                if x != Fe::ONE {
                    m.scale_row(f, r, x);
                }
            }
        }
        let dinv: Vec<Fe> = d.iter().map(|&x| f.inv_nz(x)).collect();
        for v in &mut self.v {
            for (x, &di) in v.iter_mut().zip(&dinv) {
                *x = f.mul(*x, di);
            }
        }
        let a = Matrix::diag(d);
        self.acc = Semilinear { a: a.mul(f, &self.acc.a).unwrap(), frob: self.acc.frob };
        let t = self.inn.t;
        for i in 0..self.n {
            for c in 0..self.pinned_cols[i] {
                let piv = (0..t).find(|&r| !self.u[i].get(r, c).is_zero()).expect("pinned column");
                if d[piv] != Fe::ONE {
                    self.u[i].scale_col(f, c, dinv[piv]);
                }
            }
        }
        for j in 0..self.v.len() {
            if self.pinned[self.n + j] {
                let piv = (0..t).find(|&r| !self.v[j][r].is_zero()).expect("pinned normal");
                if d[piv] != Fe::ONE {
                    let s = d[piv];
                    for x in &mut self.v[j] {
                        *x = f.mul(*x, s);
                    }
                }
            }
        }
    }

    fn apply_frob(&mut self, a: u32) {
        if a % self.field.r() == 0 {
            return;
        }
        let f = self.field.clone();
        let f = &*f;
        for m in &mut self.u {
            *m = m.frob(f, a);
        }
        for v in &mut self.v {
            *v = f.frob_vec(v, a);
        }
        self.acc = Semilinear { a: Matrix::identity(self.k), frob: a }.compose(f, &self.acc);
    }

    /// U-side matrix `a`; normals transform by `(a^-1)^T = m`.
    fn apply_general(&mut self, a: &Matrix, m: &Matrix) {
        let f = self.field.clone();
        let f = &*f;
        for u in &mut self.u {
            *u = a.mul(f, u).unwrap();
        }
        for v in &mut self.v {
            *v = m.mul_vec(f, v);
        }
        self.acc = Semilinear { a: a.mul(f, &self.acc.a).unwrap(), frob: self.acc.frob };
    }

    /// Applies a column normal form computed on rows `0..m.mult.len()`.
    /// `normal_side` says whether the multipliers act on a normal (so the
    /// U-side diagonal is their inverse).
    fn apply_column_min(&mut self, m: &ColumnMin, normal_side: bool) {
        let f = self.field.clone();
        let mut d = vec![Fe::ONE; self.k];
        for (r, &x) in m.mult.iter().enumerate() {
            d[r] = if normal_side { f.inv_nz(x) } else { x };
        }
        // a column given on fewer rows still scales the whole of each cell
        let given = m.mult.len();
        for r in given..self.inn.t {
            if let Some(j) = (0..given).find(|&j| self.inn.row_cell[j] == self.inn.row_cell[r]) {
                d[r] = d[j];
            }
        }
        self.apply_diag(&d);
        self.apply_frob(m.frob);
        self.inn.merge(&m.merge);
        self.inn.e = m.new_e;
    }

    /// Pins the normal at position `p` (absolute position `>= n`).
    pub fn min_fixed_normal(&mut self, p: usize) {
        let f = self.field.clone();
        let f = &*f;
        let j = p - self.n;
        let t = self.inn.t;
        let k = self.k;
        if let Some(r0) = (t..k).find(|&r| !self.v[j][r].is_zero()) {
            // normal side: shift row r0 up to t, scale, eliminate
            let mut m = Matrix::identity(k);
            let mut perm: Vec<usize> = (0..k).collect();
            perm[t..=r0].rotate_right(1);
            let mut pm = Matrix::zeros(k, k);
            for (new, &old) in perm.iter().enumerate() {
                pm.set(new, old, Fe::ONE);
            }
            let w = pm.mul_vec(f, &self.v[j]);
            let piv_inv = f.inv_nz(w[t]);
            m.scale_row(f, t, piv_inv);
            for (i, &wi) in w.iter().enumerate() {
                if i != t && !wi.is_zero() {
                    // row_i -= w_i * (row_t already scaled by 1/w_t)
                    let c = f.neg(f.mul(wi, piv_inv));
                    m.set(i, t, c);
                }
            }
            let m = m.mul(f, &pm).unwrap();
            let a = crate::linalg::inverse(f, &m).unwrap().transpose();
            self.apply_general(&a, &m);
            debug_assert!(self.v[j].iter().enumerate().all(|(i, &x)| x == if i == t { Fe::ONE } else { Fe::ZERO }));
            self.inn.t += 1;
            self.inn.row_cell.push(t);
        } else {
            let cm = minimize_column(f, &self.v[j][..t], None, &self.inn.row_cell, self.inn.e);
            self.apply_column_min(&cm, true);
        }
        self.pinned[p] = true;
    }

    /// Extends the column echelon structure of every subspace to the new
    /// rows `t_old..t`, pinning the new entries of pinned subspaces in the
    /// order given by `fixed_seq`.
    pub fn recolumnize(&mut self, t_old: usize, fixed_seq: &[usize]) {
        let f = self.field.clone();
        let f = &*f;
        for r in t_old..self.inn.t {
            let mut fresh_pivot = vec![false; self.n];
            for i in 0..self.n {
                let ti = self.col_rank[i];
                let u = &mut self.u[i];
                let s = u.cols();
                let Some(c0) = (ti..s).find(|&c| !u.get(r, c).is_zero()) else {
                    continue;
                };
                for c in (ti..c0).rev() {
                    u.swap_cols(c, c + 1);
                }
                let inv = f.inv_nz(u.get(r, ti));
                u.scale_col(f, ti, inv);
                for c in 0..s {
                    if c != ti {
                        let x = u.get(r, c);
                        u.add_col(f, c, ti, f.neg(x));
                    }
                }
                self.col_rank[i] = ti + 1;
                fresh_pivot[i] = true;
            }
            // fresh pivots are 1 already and must be compensated by every
            // rescaling below, whatever their place in `fixed_seq`
            for p in 0..self.n {
                if self.pinned[p] && fresh_pivot[p] {
                    self.pinned_cols[p] = self.col_rank[p];
                }
            }
            for &p in fixed_seq {
                if p >= self.n || !self.pinned[p] || fresh_pivot[p] {
                    continue;
                }
                for c in 0..self.pinned_cols[p] {
                    if self.u[p].get(r, c).is_zero() {
                        continue;
                    }
                    let col: Vec<Fe> = (0..=r).map(|i| self.u[p].get(i, c)).collect();
                    let piv = col.iter().position(|x| !x.is_zero()).unwrap();
                    let linked = self.inn.row_cell[piv];
                    let cm = minimize_column(f, &col, Some(linked), &self.inn.row_cell[..=r], self.inn.e);
                    self.apply_column_min(&cm, false);
                }
            }
        }
    }

    /// Pins the subspace at position `p`: minimizes its top block column by
    /// column.
    pub fn min_fixed_subspace(&mut self, p: usize) {
        let f = self.field.clone();
        let f = &*f;
        self.pinned[p] = true;
        self.pinned_cols[p] = 0;
        for c in 0..self.col_rank[p] {
            let col: Vec<Fe> = (0..self.inn.t).map(|i| self.u[p].get(i, c)).collect();
            let cm = minimize_column(f, &col, None, &self.inn.row_cell, self.inn.e);
            self.apply_column_min(&cm, false);
            self.pinned_cols[p] = c + 1;
        }
    }

    /// Minimizes every position that became fixed since the last call.
    pub fn minimize(&mut self, part: &Partition) -> Option<InnerRecord> {
        let seq = part.fixed_seq();
        if self.processed == seq.len() {
            return None;
        }
        let new: Vec<usize> = seq[self.processed..].to_vec();
        self.processed = seq.len();
        let t_old = self.inn.t;
        let n = self.n;
        let mut normals = Vec::new();
        for &p in new.iter().filter(|&&p| p >= n) {
            self.min_fixed_normal(p);
            normals.push(self.v[p - n].clone());
        }
        if self.inn.t > t_old {
            self.recolumnize(t_old, seq);
        }
        for &p in new.iter().filter(|&&p| p < n) {
            self.min_fixed_subspace(p);
        }
        let grown = self.inn.t > t_old;
        let blocks = seq
            .iter()
            .filter(|&&p| p < self.n && (grown || new.contains(&p)))
            .map(|&p| self.top_block(p))
            .collect();
        Some(InnerRecord { t: self.inn.t, e: self.inn.e, row_cell: self.inn.row_cell.clone(), normals, blocks })
    }

    /// Checks that the node still represents the instance: every position
    /// holds the image under `acc` of the original item with its label.
    pub fn consistent_with(&self, x: &ExtendedInstance) -> bool {
        let f = &*self.field;
        let n = self.n;
        (0..n).all(|p| {
            let img = crate::linalg::column_space(f, &self.acc.apply_matrix(f, &x.u[self.labels[p]]));
            img == crate::linalg::column_space(f, &self.u[p])
        }) && (0..self.h()).all(|j| {
            let mut a = self.acc.apply_normal(f, &x.v[self.labels[n + j] - n]);
            let mut b = self.v[j].clone();
            crate::linalg::normalize_projective(f, &mut a);
            crate::linalg::normalize_projective(f, &mut b);
            a == b
        })
    }
}
