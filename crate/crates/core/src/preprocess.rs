//! Hyperplane preprocessing: classify all hyperplanes by how many members of
//! each set they contain, pick a small invariant union of classes whose
//! normals span, and append it to the instance.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::{self, Matrix};
use crate::model::NormalizedInstance;

pub const MAX_HYPERPLANES: u128 = 10_000_000;

/// The instance together with the selected hyperplane normals. Positions
/// `0..n` hold subspaces, `n..n+h` hold normals; the initial partition has
/// one cell per subspace set followed by one cell per hyperplane block.
#[derive(Clone, Debug)]
pub struct ExtendedInstance {
    pub field: Arc<Field>,
    pub k: usize,
    pub u: Vec<Matrix>,
    pub v: Vec<Vec<Fe>>,
    pub cell_sizes: Vec<usize>,
    /// Set index of each subspace position.
    pub set_of: Vec<usize>,
    /// Incidence-count vector of each selected hyperplane block, in layout order.
    pub block_counts: Vec<Vec<u32>>,
    pub total_hyperplanes: usize,
    pub hyperplane_classes: usize,
}

impl ExtendedInstance {
    pub fn n(&self) -> usize {
        self.u.len()
    }
    pub fn h(&self) -> usize {
        self.v.len()
    }
}

/// Incidence counts `counts[i] = #{U in C_i : U <= v^perp}` for every
/// projective normal `v`.
pub fn hyperplane_signatures(inst: &NormalizedInstance) -> Result<Vec<(Vec<Fe>, Vec<u32>)>> {
    let f = inst.field();
    let total = linalg::num_projective_points(f.q(), inst.k);
    if total > MAX_HYPERPLANES {
        return Err(Error::CapacityExceeded(format!(
            "{total} hyperplanes in PG({}, {}) exceed the limit of {MAX_HYPERPLANES}",
            inst.k - 1,
            f.q()
        )));
    }
    let pts = linalg::projective_points(f, inst.k);
    Ok(pts
        .into_iter()
        .map(|v| {
            let counts = inst
                .sets
                .iter()
                .map(|s| s.members.iter().filter(|u| incident(f, &v, u.basis())).count() as u32)
                .collect();
            (v, counts)
        })
        .collect())
}

/// Whether `u` lies in the hyperplane with normal `v`.
pub fn incident(f: &Field, v: &[Fe], u: &Matrix) -> bool {
    u.vec_mul(f, v).iter().all(|x| x.is_zero())
}

#[derive(Clone, Debug)]
pub struct Selection {
    /// Selected blocks in layout order (ascending count vector).
    pub blocks: Vec<(Vec<u32>, Vec<Vec<Fe>>)>,
    pub classes: usize,
}

/// Greedy selection: blocks sorted by (size, count vector) are taken until
/// the chosen normals span F_q^k.
pub fn select_hyperplanes(f: &Field, k: usize, sigs: Vec<(Vec<Fe>, Vec<u32>)>) -> Result<Selection> {
    let mut classes: BTreeMap<Vec<u32>, Vec<Vec<Fe>>> = BTreeMap::new();
    for (v, c) in sigs {
        classes.entry(c).or_default().push(v);
    }
    let n_classes = classes.len();
    let mut order: Vec<(Vec<u32>, Vec<Vec<Fe>>)> = classes.into_iter().collect();
    order.sort_by(|a, b| (a.1.len(), &a.0).cmp(&(b.1.len(), &b.0)));
    let mut basis: Vec<Vec<Fe>> = Vec::new();
    let mut chosen = Vec::new();
    for (counts, mut normals) in order {
        if basis.len() == k {
            break;
        }
        let mut rows = basis.clone();
        rows.extend(normals.iter().cloned());
        let red = linalg::rref(f, &Matrix::from_rows(&rows));
        basis = (0..red.rank).map(|i| red.r.row(i).to_vec()).collect();
        normals.sort_by(|a, b| linalg::colex_cmp(a, b));
        chosen.push((counts, normals));
    }
    if basis.len() < k {
        return Err(Error::NonSpanning { span: basis.len(), k });
    }
    chosen.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(Selection { blocks: chosen, classes: n_classes })
}

pub fn extend(inst: &NormalizedInstance) -> Result<ExtendedInstance> {
    let f = inst.field();
    let sigs = hyperplane_signatures(inst)?;
    let total = sigs.len();
    let sel = select_hyperplanes(f, inst.k, sigs)?;
    let mut u = Vec::new();
    let mut set_of = Vec::new();
    let mut cell_sizes = Vec::new();
    for (i, s) in inst.sets.iter().enumerate() {
        for m in &s.members {
            u.push(m.basis().clone());
            set_of.push(i);
        }
        cell_sizes.push(s.members.len());
    }
    let mut v = Vec::new();
    let mut block_counts = Vec::new();
    for (counts, normals) in sel.blocks {
        cell_sizes.push(normals.len());
        v.extend(normals);
        block_counts.push(counts);
    }
    Ok(ExtendedInstance {
        field: inst.field.clone(),
        k: inst.k,
        u,
        v,
        cell_sizes,
        set_of,
        block_counts,
        total_hyperplanes: total,
        hyperplane_classes: sel.classes,
    })
}
