//! Invariants used to refine the partition of a node, and the refinement
//! loop that alternates them with inner minimization.

use crate::field::{Fe, Field};
use crate::inner::{self, InnerRecord, InnerStab, NodeState};
use crate::linalg::{colex_cmp, Matrix};
use crate::partition::Partition;

/// Orbit class of `v_j^T U_i` under the inner stabilizer.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeColor {
    /// `v_j^T U_i = 0`: the subspace lies in the hyperplane.
    Incident,
    /// Nonzero outside the first `t_i` coordinates.
    UnitTail,
    /// Zero tail; support of the head (bit c = coordinate c).
    Support(u64),
    /// Zero tail at a pinned subspace: canonical head under the scalings
    /// left by the pinned columns.
    Refined(Vec<Fe>),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Key {
    Flag(bool),
    Vector(Vec<Fe>),
    Block(Matrix),
    Colors(Vec<EdgeColor>),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Subset,
    MinNormal,
    MinSubspace,
    Graph,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Event {
    Inner(InnerRecord),
    Refine { kind: Kind, pair: Option<(usize, usize)>, fingerprint: Vec<Key> },
}

/// 1 iff the support of the normal lies in the first `t` coordinates.
pub fn theta_subset(st: &NodeState, j: usize) -> bool {
    st.v[j][st.inn.t..].iter().all(|x| x.is_zero())
}

pub fn theta_min_normal(st: &NodeState, j: usize) -> Vec<Fe> {
    inner::predict_normal(&st.field, &st.v[j], &st.inn)
}

pub fn theta_min_subspace(st: &NodeState, i: usize) -> Matrix {
    inner::minimize_block(&st.field, &st.top_block(i), &st.inn).0
}

/// Canonical representative of `w` (the head of `v^T U` at a pinned
/// subspace) under independent scalings of the coordinate groups given by
/// `col_cell` and the field automorphisms `<frob^e>`.
pub fn refined_class(f: &Field, w: &[Fe], col_cell: &[usize], e: u32) -> Vec<Fe> {
    let mut out = w.to_vec();
    let mut seen: Vec<usize> = Vec::new();
    for c in (0..w.len()).rev() {
        if w[c].is_zero() || seen.contains(&col_cell[c]) {
            continue;
        }
        seen.push(col_cell[c]);
        let inv = f.inv_nz(w[c]);
        for cc in 0..w.len() {
            if col_cell[cc] == col_cell[c] {
                out[cc] = f.mul(w[cc], inv);
            }
        }
    }
    let mut best = out.clone();
    let mut a = e;
    while a < f.r() {
        let cand = f.frob_vec(&out, a);
        if colex_cmp(&cand, &best).is_lt() {
            best = cand;
        }
        a += e;
    }
    best
}

/// Cell label of the pivot row of each pinned column of subspace `i`.
pub fn column_cells(st: &NodeState, i: usize) -> Vec<usize> {
    (0..st.col_rank[i])
        .map(|c| {
            let piv = (0..st.inn.t).find(|&r| !st.u[i].get(r, c).is_zero()).expect("pivot");
            st.inn.row_cell[piv]
        })
        .collect()
}

pub fn edge_color_of(f: &Field, w: &[Fe], ti: usize, pinned: Option<(&[usize], &InnerStab)>) -> EdgeColor {
    if w.iter().all(|x| x.is_zero()) {
        return EdgeColor::Incident;
    }
    if w[ti..].iter().any(|x| !x.is_zero()) {
        return EdgeColor::UnitTail;
    }
    match pinned {
        Some((cells, inn)) => EdgeColor::Refined(refined_class(f, &w[..ti], cells, inn.e)),
        None => EdgeColor::Support(
            w[..ti].iter().enumerate().filter(|(_, x)| !x.is_zero()).fold(0u64, |m, (c, _)| m | 1 << c),
        ),
    }
}

pub fn edge_color(st: &NodeState, i: usize, j: usize) -> EdgeColor {
    let f = &*st.field;
    let w = st.u[i].vec_mul(f, &st.v[j]);
    if st.pinned[i] {
        let cells = column_cells(st, i);
        edge_color_of(f, &w, st.col_rank[i], Some((&cells, &st.inn)))
    } else {
        edge_color_of(f, &w, st.col_rank[i], None)
    }
}

/// Edge colors between all subspace positions (rows) and normal positions.
pub fn color_matrix(st: &NodeState) -> Vec<Vec<EdgeColor>> {
    let f = &*st.field;
    (0..st.n)
        .map(|i| {
            let cells = if st.pinned[i] { Some(column_cells(st, i)) } else { None };
            let pin = cells.as_deref().map(|c| (c, &st.inn));
            (0..st.h())
                .map(|j| edge_color_of(f, &st.u[i].vec_mul(f, &st.v[j]), st.col_rank[i], pin))
                .collect()
        })
        .collect()
}

/// Keys for one (normal cell, subspace cell) pair: every vertex gets the
/// sorted multiset of its colors into the other cell.
pub fn graph_keys(colors: &[Vec<EdgeColor>], n: usize, total: usize, p: (usize, usize), q: (usize, usize)) -> Vec<Option<Key>> {
    let mut keys: Vec<Option<Key>> = vec![None; total];
    for (pos, key) in keys.iter_mut().enumerate().take(p.1).skip(p.0) {
        let mut cs: Vec<EdgeColor> = (q.0..q.1).map(|i| colors[i][pos - n].clone()).collect();
        cs.sort();
        *key = Some(Key::Colors(cs));
    }
    for (i, key) in keys.iter_mut().enumerate().take(q.1).skip(q.0) {
        let mut cs: Vec<EdgeColor> = (p.0..p.1).map(|pos| colors[i][pos - n].clone()).collect();
        cs.sort();
        *key = Some(Key::Colors(cs));
    }
    keys
}

fn permute_colors(colors: &mut Vec<Vec<EdgeColor>>, order: &[usize], n: usize) {
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return;
    }
    let rows: Vec<Vec<EdgeColor>> = (0..n).map(|i| colors[order[i]].clone()).collect();
    *colors = rows
        .into_iter()
        .map(|row| (n..order.len()).map(|p| row[order[p] - n].clone()).collect())
        .collect();
}

/// Runs inner minimization and refinements until nothing changes. Every
/// produced event is passed to `sink`; when it returns `false` the node is
/// abandoned and `false` is returned.
pub fn refine_node(st: &mut NodeState, part: &mut Partition, sink: &mut dyn FnMut(Event) -> bool) -> bool {
    let n = st.n;
    let total = part.len();
    let mut colors: Option<Vec<Vec<EdgeColor>>> = None;
    loop {
        if let Some(rec) = st.minimize(part) {
            colors = None;
            if !sink(Event::Inner(rec)) {
                return false;
            }
            let mut split = false;
            for kind in [Kind::Subset, Kind::MinNormal, Kind::MinSubspace] {
                let mut keys: Vec<Option<Key>> = vec![None; total];
                let mut any = false;
                for (s, e) in part.cells() {
                    if e - s < 2 || (s >= n) != (kind != Kind::MinSubspace) {
                        continue;
                    }
                    any = true;
                    for (p, key) in keys.iter_mut().enumerate().take(e).skip(s) {
                        *key = Some(match kind {
                            Kind::Subset => Key::Flag(theta_subset(st, p - n)),
                            Kind::MinNormal => Key::Vector(theta_min_normal(st, p - n)),
                            _ => Key::Block(theta_min_subspace(st, p)),
                        });
                    }
                }
                if !any {
                    continue;
                }
                let r = part.refine(&keys);
                st.permute(&r.order);
                if !sink(Event::Refine { kind, pair: None, fingerprint: r.fingerprint }) {
                    return false;
                }
                if r.split {
                    split = true;
                    break;
                }
            }
            if split {
                continue;
            }
        }
        if part.is_discrete() {
            return true;
        }
        let cm = colors.get_or_insert_with(|| color_matrix(st));
        let cells = part.cells();
        let mut hs: Vec<(usize, usize)> = cells.iter().copied().filter(|c| c.0 >= n).collect();
        let mut cs: Vec<(usize, usize)> = cells.iter().copied().filter(|c| c.0 < n).collect();
        hs.sort_by_key(|c| (c.1 - c.0, c.0));
        cs.sort_by_key(|c| (c.1 - c.0, c.0));
        let mut split = false;
        'pairs: for &p in &hs {
            for &q in &cs {
                if p.1 - p.0 == 1 && q.1 - q.0 == 1 {
                    continue;
                }
                let keys = graph_keys(cm, n, total, p, q);
                let r = part.refine(&keys);
                if r.split {
                    st.permute(&r.order);
                    permute_colors(cm, &r.order, n);
                    if !sink(Event::Refine { kind: Kind::Graph, pair: Some((p.0, q.0)), fingerprint: r.fingerprint }) {
                        return false;
                    }
                    split = true;
                    break 'pairs;
                }
            }
        }
        if !split {
            return true;
        }
    }
}
