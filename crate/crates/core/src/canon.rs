//! Canonization entry point: normalization, optional dualization, the
//! search, and assembly of transporter and automorphism group.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::field::Fe;
use crate::linalg::{self, Matrix};
use crate::model::{normalize, should_dualize, DualizeMode, NormalizedInstance, RawFamily, Semilinear};
use crate::permgroup::{Perm, StabChain};
use crate::preprocess::{extend, ExtendedInstance};
use crate::search::{search, SearchConfig};

/// Largest projective space on which orders are computed from the point
/// action; beyond it the label action times the leaf kernel is used.
pub const POINT_ACTION_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, Default)]
pub struct CanonConfig {
    pub dualize: DualizeMode,
    pub search: SearchConfig,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct CanonStats {
    pub n: usize,
    pub h: usize,
    pub total_hyperplanes: usize,
    pub hyperplane_classes: usize,
    pub initial_cells: Vec<usize>,
    pub nodes: u64,
    pub leaves: u64,
    pub pruned_by_trace: u64,
    pub pruned_by_aut: u64,
    /// Wall time in milliseconds; not part of any report.
    #[serde(skip)]
    pub millis: u128,
}

#[derive(Clone, Debug)]
pub struct CanonResult {
    /// The normalized input.
    pub input: NormalizedInstance,
    pub canonical: NormalizedInstance,
    /// Maps `input` onto `canonical`.
    pub transporter: Semilinear,
    pub aut_generators: Vec<Semilinear>,
    pub aut_order_gammal: BigUint,
    pub aut_order_pgammal: BigUint,
    pub dualized: bool,
    pub config_hash: String,
    pub stats: CanonStats,
}

/// Hash of everything the canonical form depends on. Pruning switches and
/// limits do not change the form and are left out.
pub fn config_hash(dualized: bool) -> String {
    let desc = format!(
        "projcanon-form/1;field=rank-order;target=smallest-normal-cell-first;\
         refine=subset,min-normal,min-subspace,graph;layout=count-ascending;dualized={dualized}"
    );
    let digest = Sha256::digest(desc.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn canonize(raw: &RawFamily, cfg: &CanonConfig) -> Result<CanonResult> {
    canonize_normalized(&normalize(raw)?, cfg)
}

pub fn canonize_normalized(inst: &NormalizedInstance, cfg: &CanonConfig) -> Result<CanonResult> {
    let f = inst.field.clone();
    let dualized = should_dualize(inst, cfg.dualize);
    let work = if dualized { inst.dual() } else { inst.clone() };
    let x = extend(&work)?;
    let out = search(&x, &cfg.search)?;
    let leaf = &out.canonical;
    let t = leaf.acc.clone();

    let mut canonical = work.act(&t);
    canonical.dualized = work.dualized;
    debug_assert!(same_as_leaf(&x, &canonical, leaf));

    let t_inv = t.inverse(&f);
    let mut gens: Vec<Semilinear> = out.automorphisms.iter().map(|a| a.map.clone()).collect();
    let kernel = leaf_kernel(&f, leaf.k, &leaf.inn.cells(), leaf.inn.e);
    for g in &kernel {
        gens.push(t_inv.compose(&f, &g.compose(&f, &t)));
    }

    let label_gens: Vec<Perm> = out.automorphisms.iter().map(|a| a.perm.clone()).collect();
    let image = StabChain::new(x.n() + x.h(), &label_gens, &[]).order();
    let qm1 = BigUint::from(f.q() - 1);
    let kernel_order = qm1.pow(leaf.inn.cells().len() as u32) * BigUint::from(f.r() / leaf.inn.e);
    let by_labels = image * kernel_order;
    let aut_order_gammal = if linalg::num_projective_points(f.q(), inst.k) <= POINT_ACTION_LIMIT {
        let o = point_action_order(&f, inst.k, &gens) * &qm1;
        debug_assert_eq!(o, by_labels);
        o
    } else {
        by_labels
    };
    let aut_order_pgammal = &aut_order_gammal / &qm1;

    let (canonical, transporter, aut_generators) = if dualized {
        let c = canonical.dual();
        (c, t.dual(&f), gens.iter().map(|g| g.dual(&f)).collect())
    } else {
        (canonical, t, gens)
    };

    Ok(CanonResult {
        input: inst.clone(),
        canonical,
        transporter,
        aut_generators,
        aut_order_gammal,
        aut_order_pgammal,
        dualized,
        config_hash: config_hash(dualized),
        stats: CanonStats {
            n: x.n(),
            h: x.h(),
            total_hyperplanes: x.total_hyperplanes,
            hyperplane_classes: x.hyperplane_classes,
            initial_cells: x.cell_sizes.clone(),
            nodes: out.stats.nodes,
            leaves: out.stats.leaves,
            pruned_by_trace: out.stats.pruned_by_trace,
            pruned_by_aut: out.stats.pruned_by_aut,
            millis: out.stats.millis,
        },
    })
}

fn same_as_leaf(x: &ExtendedInstance, canonical: &NormalizedInstance, leaf: &crate::inner::NodeState) -> bool {
    let f = &*x.field;
    let mut by_set: Vec<Vec<crate::model::Subspace>> = vec![Vec::new(); canonical.sets.len()];
    for p in 0..x.n() {
        by_set[x.set_of[p]].push(crate::model::Subspace::span(f, &leaf.u[p]));
    }
    by_set.iter_mut().for_each(|s| s.sort());
    by_set.iter().zip(&canonical.sets).all(|(a, b)| *a == b.members)
}

/// Generators of the semilinear maps fixing the leaf: diagonal scalings that
/// are constant on each row cell, and `frob^e`.
fn leaf_kernel(f: &crate::field::Field, k: usize, cells: &[Vec<usize>], e: u32) -> Vec<Semilinear> {
    let mut out = Vec::new();
    if f.q() > 2 {
        for cell in cells {
            let mut d = vec![Fe::ONE; k];
            for &r in cell {
                d[r] = f.xi();
            }
            out.push(Semilinear { a: Matrix::diag(&d), frob: 0 });
        }
    }
    if e < f.r() {
        out.push(Semilinear { a: Matrix::identity(k), frob: e });
    }
    out
}

/// Order of the group generated by `gens` acting on the points of PG(k-1, q).
pub fn point_action_order(f: &crate::field::Field, k: usize, gens: &[Semilinear]) -> BigUint {
    let pts = linalg::projective_points(f, k);
    let index: HashMap<&[Fe], u32> = pts.iter().enumerate().map(|(i, p)| (p.as_slice(), i as u32)).collect();
    let perms: Vec<Perm> = gens
        .iter()
        .map(|g| {
            pts.iter()
                .map(|p| {
                    let mut img = g.apply_vec(f, p);
                    linalg::normalize_projective(f, &mut img);
                    index[img.as_slice()]
                })
                .collect()
        })
        .collect();
    StabChain::new(pts.len(), &perms, &[]).order()
}
