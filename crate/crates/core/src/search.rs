//! Depth-first individualization-refinement search over the extended
//! instance.
//!
//! Two reference traces are kept: the trace of the first path (leaves equal
//! to the first leaf give automorphisms) and the best trace seen so far
//! (its leaf is the canonical candidate). A node whose trace is larger than
//! the best trace and differs from the first path is pruned; a node whose
//! trace becomes smaller starts a new best trace. Children of a node that
//! lie in one orbit of the known automorphisms fixing the individualized
//! prefix are explored only once.

use std::cmp::Ordering;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::Fe;
use crate::inner::NodeState;
use crate::linalg::Matrix;
use crate::model::Semilinear;
use crate::partition::Partition;
use crate::permgroup::{self, Perm, StabChain};
use crate::preprocess::ExtendedInstance;
use crate::refine::{self, Event};

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub aut_prune: bool,
    pub candidate_prune: bool,
    pub node_limit: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { aut_prune: true, candidate_prune: true, node_limit: DEFAULT_NODE_LIMIT }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Rel {
    /// This path defines the reference trace and extends it.
    Ext,
    Eq,
    Less,
    Greater,
}

#[derive(Clone, Debug)]
struct PathCtx {
    trace: Vec<Event>,
    prefix: Vec<u32>,
    first: Rel,
    best: Rel,
}

type LeafData = (Vec<Matrix>, Vec<Vec<Fe>>);

struct Leaf {
    trace: Vec<Event>,
    data: LeafData,
    state: NodeState,
}

#[derive(Clone, Debug)]
pub struct Automorphism {
    /// Label permutation on `0..n+h`.
    pub perm: Perm,
    pub map: Semilinear,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub nodes: u64,
    pub leaves: u64,
    pub pruned_by_trace: u64,
    pub pruned_by_aut: u64,
    pub millis: u128,
}

pub struct SearchOutcome {
    pub canonical: NodeState,
    pub automorphisms: Vec<Automorphism>,
    pub stats: SearchStats,
}

struct Search<'a> {
    x: &'a ExtendedInstance,
    cfg: SearchConfig,
    first_trace: Vec<Event>,
    first_prefix: Vec<u32>,
    first_leaf: Option<Leaf>,
    best_trace: Vec<Event>,
    candidate: Option<Leaf>,
    auts: Vec<Automorphism>,
    chain: Option<StabChain>,
    stats: SearchStats,
}

fn leaf_data(st: &NodeState) -> LeafData {
    (st.u.clone(), st.v.clone())
}

impl<'a> Search<'a> {
    /// Appends an event to the path and updates its relations; returns
    /// `false` when the path must be abandoned.
    fn push(&mut self, ctx: &mut PathCtx, e: Event) -> bool {
        let idx = ctx.trace.len();
        ctx.first = step(ctx.first, &mut self.first_trace, idx, &e);
        let before = ctx.best;
        ctx.best = step(ctx.best, &mut self.best_trace, idx, &e);
        if ctx.best == Rel::Less {
            self.best_trace = ctx.trace.clone();
            self.best_trace.push(e.clone());
            self.candidate = None;
            ctx.best = Rel::Ext;
        }
        ctx.trace.push(e);
        if ctx.best == Rel::Greater && before != Rel::Greater {
            if self.cfg.candidate_prune && !matches!(ctx.first, Rel::Eq | Rel::Ext) {
                self.stats.pruned_by_trace += 1;
                return false;
            }
        }
        true
    }

    fn refine(&mut self, st: &mut NodeState, part: &mut Partition, ctx: &mut PathCtx) -> bool {
        let mut sink = |e: Event| self.push(ctx, e);
        refine::refine_node(st, part, &mut sink)
    }

    fn add_automorphism(&mut self, reference: &Leaf, st: &NodeState) {
        let f = &*self.x.field;
        let n_all = st.labels.len();
        let mut perm = vec![0u32; n_all];
        for p in 0..n_all {
            perm[st.labels[p]] = reference.state.labels[p] as u32;
        }
        if permgroup::is_identity(&perm) {
            return;
        }
        // only generators that enlarge the known group are kept
        let chain = self.chain.get_or_insert_with(|| StabChain::new(n_all, &[], &self.first_prefix));
        if !chain.extend(&perm) {
            return;
        }
        let map = reference.state.acc.inverse(f).compose(f, &st.acc);
        self.auts.push(Automorphism { perm, map });
    }

    fn leaf(&mut self, st: NodeState, ctx: PathCtx) {
        self.stats.leaves += 1;
        let data = leaf_data(&st);
        if self.first_leaf.is_none() {
            self.first_prefix = ctx.prefix.clone();
            let leaf = Leaf { trace: ctx.trace.clone(), data: data.clone(), state: st.clone() };
            self.first_leaf = Some(leaf);
            self.candidate = Some(Leaf { trace: ctx.trace, data, state: st });
            return;
        }
        let first = self.first_leaf.take().unwrap();
        if ctx.first == Rel::Eq && ctx.trace.len() == first.trace.len() && data == first.data {
            self.add_automorphism(&first, &st);
        }
        self.first_leaf = Some(first);
        match ctx.best {
            Rel::Ext => {
                self.candidate = Some(Leaf { trace: ctx.trace, data, state: st });
            }
            Rel::Eq if ctx.trace.len() == self.best_trace.len() => {
                let cand = self.candidate.take().expect("candidate for complete best trace");
                match data.cmp(&cand.data) {
                    Ordering::Less => self.candidate = Some(Leaf { trace: ctx.trace, data, state: st }),
                    Ordering::Equal => {
                        self.add_automorphism(&cand, &st);
                        self.candidate = Some(cand);
                    }
                    Ordering::Greater => self.candidate = Some(cand),
                }
            }
            _ => {}
        }
    }

    /// Orbit representatives of the known automorphisms fixing `prefix`.
    fn prefix_orbits(&mut self, prefix: &[u32], n_all: usize) -> Vec<u32> {
        let on_first = prefix.len() <= self.first_prefix.len() && self.first_prefix[..prefix.len()] == *prefix;
        if on_first && !self.first_prefix.is_empty() {
            let ch = self.chain.get_or_insert_with(|| StabChain::new(n_all, &[], &self.first_prefix));
            return permgroup::orbit_reps(n_all, ch.stabilizer_gens(prefix.len()));
        }
        let gens: Vec<Perm> = self
            .auts
            .iter()
            .filter(|a| prefix.iter().all(|&b| a.perm[b as usize] == b))
            .map(|a| a.perm.clone())
            .collect();
        permgroup::orbit_reps(n_all, &gens)
    }

    fn node(&mut self, st: NodeState, part: Partition, ctx: PathCtx) -> Result<()> {
        if part.is_discrete() {
            self.leaf(st, ctx);
            return Ok(());
        }
        let (s, e) = part.target_cell().expect("non-discrete partition has a target cell");
        let n_all = st.labels.len();
        let mut explored: Vec<u32> = Vec::new();
        let mut orbit_cache: Option<(usize, Vec<u32>)> = None;
        for j in s..e {
            let c = st.labels[j] as u32;
            if self.cfg.aut_prune && !explored.is_empty() && !self.auts.is_empty() {
                let version = self.auts.len();
                if orbit_cache.as_ref().map(|(v, _)| *v) != Some(version) {
                    orbit_cache = Some((version, self.prefix_orbits(&ctx.prefix, n_all)));
                }
                let reps = &orbit_cache.as_ref().unwrap().1;
                if explored.iter().any(|&x| reps[x as usize] == reps[c as usize]) {
                    self.stats.pruned_by_aut += 1;
                    continue;
                }
            }
            self.stats.nodes += 1;
            if self.stats.nodes > self.cfg.node_limit {
                return Err(Error::CapacityExceeded(format!("node limit {} reached", self.cfg.node_limit)));
            }
            let first_child = explored.is_empty();
            explored.push(c);
            let mut child = st.clone();
            child.swap(s, j);
            let mut p = part.clone();
            p.individualize(s);
            let demote = |r: Rel| if r == Rel::Ext && !first_child { Rel::Eq } else { r };
            let mut cctx = PathCtx {
                trace: ctx.trace.clone(),
                prefix: {
                    let mut v = ctx.prefix.clone();
                    v.push(c);
                    v
                },
                first: demote(ctx.first),
                best: demote(ctx.best),
            };
            if !self.refine(&mut child, &mut p, &mut cctx) {
                continue;
            }
            self.node(child, p, cctx)?;
        }
        Ok(())
    }
}

/// One comparison step of a path trace against a reference trace.
fn step(rel: Rel, reference: &mut Vec<Event>, idx: usize, e: &Event) -> Rel {
    match rel {
        Rel::Ext => {
            debug_assert_eq!(reference.len(), idx);
            reference.push(e.clone());
            Rel::Ext
        }
        Rel::Eq => match reference.get(idx) {
            None => Rel::Greater,
            Some(r) => match e.cmp(r) {
                Ordering::Less => Rel::Less,
                Ordering::Equal => Rel::Eq,
                Ordering::Greater => Rel::Greater,
            },
        },
        other => other,
    }
}

pub fn search(x: &ExtendedInstance, cfg: &SearchConfig) -> Result<SearchOutcome> {
    let start = Instant::now();
    let mut s = Search {
        x,
        cfg: cfg.clone(),
        first_trace: Vec::new(),
        first_prefix: Vec::new(),
        first_leaf: None,
        best_trace: Vec::new(),
        candidate: None,
        auts: Vec::new(),
        chain: None,
        stats: SearchStats::default(),
    };
    let mut st = NodeState::root(x);
    let mut part = Partition::new(x.n(), &x.cell_sizes);
    let mut ctx = PathCtx { trace: Vec::new(), prefix: Vec::new(), first: Rel::Ext, best: Rel::Ext };
    s.stats.nodes = 1;
    let ok = s.refine(&mut st, &mut part, &mut ctx);
    debug_assert!(ok, "the root is never pruned");
    s.node(st, part, ctx)?;
    s.stats.millis = start.elapsed().as_millis();
    let canonical = s.candidate.take().expect("search reaches a leaf").state;
    Ok(SearchOutcome { canonical, automorphisms: s.auts, stats: s.stats })
}
