//! Reports. The text and JSON renderings are produced from the same structs,
//! so they always carry the same data. Nothing time-dependent goes in here.

use std::fmt::Write as _;

use projcanon::codes::{CodeCanon, CodeCertificate};
use projcanon::model::NormalizedInstance;
use projcanon::{CanonResult, Field, Matrix, Semilinear};
use serde::Serialize;

pub const SCHEMA: &str = "projcanon-report";
pub const SCHEMA_VERSION: u32 = 1;

/// Rows of field element indices.
pub type Rows = Vec<Vec<u32>>;

pub fn rows(f: &Field, m: &Matrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| f.to_index(m.get(i, j))).collect()).collect()
}

#[derive(Serialize)]
pub struct FieldInfo {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
}

impl FieldInfo {
    pub fn new(f: &Field) -> FieldInfo {
        FieldInfo { p: f.p(), r: f.r(), modulus: f.modulus().to_vec() }
    }
}

/// A semilinear map `x -> A x^(p^frob)`.
#[derive(Serialize)]
pub struct Map {
    pub frob: u32,
    pub matrix: Rows,
}

impl Map {
    pub fn new(f: &Field, g: &Semilinear) -> Map {
        Map { frob: g.frob, matrix: rows(f, &g.a) }
    }
}

#[derive(Serialize)]
pub struct SetOut {
    pub dim: usize,
    /// Multiplicity of the members in each input set.
    pub signature: Vec<u32>,
    pub members: Vec<Rows>,
}

pub fn sets(inst: &NormalizedInstance) -> Vec<SetOut> {
    let f = &*inst.field;
    inst.sets
        .iter()
        .map(|s| SetOut { dim: s.dim, signature: s.signature.clone(), members: s.members.iter().map(|u| rows(f, u.basis())).collect() })
        .collect()
}

#[derive(Serialize)]
pub struct Stats {
    pub nodes: u64,
    pub leaves: u64,
    pub pruned_by_trace: u64,
    pub pruned_by_aut: u64,
}

#[derive(Serialize)]
pub struct Preprocess {
    pub subspaces: usize,
    pub h: usize,
    pub total_hyperplanes: usize,
    pub hyperplane_classes: usize,
    pub initial_cells: Vec<usize>,
}

#[derive(Serialize)]
pub struct Group {
    pub generators: Vec<Map>,
    pub order_gammal: String,
    pub order_pgammal: String,
}

#[derive(Serialize)]
pub struct CodeOut {
    pub block_size: usize,
    pub canonical: Rows,
    /// Block `j` of the canonical code is block `perm[j]` of the mapped
    /// input, times `blocks[j]`.
    pub perm: Vec<usize>,
    pub blocks: Vec<Rows>,
    pub zero_blocks: Vec<usize>,
}

#[derive(Serialize)]
pub struct Certificate {
    pub map: Map,
    pub perm: Vec<usize>,
    pub blocks: Vec<Rows>,
}

impl Certificate {
    pub fn new(f: &Field, c: &CodeCertificate) -> Certificate {
        Certificate { map: Map::new(f, &c.map), perm: c.perm.clone(), blocks: c.blocks.iter().map(|b| rows(f, b)).collect() }
    }
}

#[derive(Serialize)]
pub struct OracleCheck {
    pub what: String,
    pub value: String,
    pub agrees: bool,
}

#[derive(Serialize)]
pub struct Canonization {
    pub dualized: bool,
    pub preprocess: Preprocess,
    pub canonical: Vec<SetOut>,
    pub transporter: Map,
    pub automorphisms: Group,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code: Option<CodeOut>,
    pub config_hash: String,
    pub stats: Stats,
}

impl Canonization {
    pub fn new(r: &CanonResult, code: Option<&CodeCanon>) -> Canonization {
        let f = &*r.input.field;
        let s = &r.stats;
        Canonization {
            dualized: r.dualized,
            preprocess: Preprocess {
                subspaces: s.n,
                h: s.h,
                total_hyperplanes: s.total_hyperplanes,
                hyperplane_classes: s.hyperplane_classes,
                initial_cells: s.initial_cells.clone(),
            },
            canonical: sets(&r.canonical),
            transporter: Map::new(f, &r.transporter),
            automorphisms: group(r),
            code: code.map(|c| CodeOut {
                block_size: c.certificate.blocks.first().map_or(1, |b| b.rows()),
                canonical: rows(f, &c.canonical),
                perm: c.certificate.perm.clone(),
                blocks: c.certificate.blocks.iter().map(|b| rows(f, b)).collect(),
                zero_blocks: c.zero_blocks.clone(),
            }),
            config_hash: r.config_hash.clone(),
            stats: Stats { nodes: s.nodes, leaves: s.leaves, pruned_by_trace: s.pruned_by_trace, pruned_by_aut: s.pruned_by_aut },
        }
    }
}

pub fn group(r: &CanonResult) -> Group {
    let f = &*r.input.field;
    Group {
        generators: r.aut_generators.iter().map(|g| Map::new(f, g)).collect(),
        order_gammal: r.aut_order_gammal.to_string(),
        order_pgammal: r.aut_order_pgammal.to_string(),
    }
}

#[derive(Serialize)]
pub struct Equivalence {
    pub equivalent: bool,
    pub config_hash: String,
    /// Maps the second instance onto the first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mapping: Option<Map>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub code_certificate: Option<Certificate>,
    pub stats: [Stats; 2],
}

#[derive(Serialize)]
pub struct SelftestCase {
    pub q: u32,
    pub k: usize,
    pub same_orbit: bool,
    pub forms_equal: bool,
    pub stab_order: String,
    pub aut_order: String,
}

#[derive(Serialize)]
pub struct Selftest {
    pub seed: u64,
    pub cases: usize,
    pub equivalent_pairs: usize,
    pub failures: Vec<SelftestCase>,
}

#[derive(Serialize)]
#[serde(untagged)]
pub enum Body {
    Canonize(Canonization),
    Aut { group: Group, config_hash: String, stats: Stats },
    Equiv(Equivalence),
    Selftest(Selftest),
}

#[derive(Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub schema_version: u32,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub result: Body,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub oracle: Vec<OracleCheck>,
}

impl Report {
    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", SCHEMA, self.schema_version);
        let _ = writeln!(out, "command {}", self.command);
        if let Some(f) = &self.field {
            let _ = writeln!(out, "field {} {} {}", f.p, f.r, join(&f.modulus));
        }
        if let Some(k) = self.k {
            let _ = writeln!(out, "k {k}");
        }
        match &self.result {
            Body::Canonize(c) => canonization_text(&mut out, c),
            Body::Aut { group: g, config_hash, stats } => {
                group_text(&mut out, g);
                let _ = writeln!(out, "config_hash {config_hash}");
                stats_text(&mut out, "stats", stats);
            }
            Body::Equiv(e) => {
                let _ = writeln!(out, "equivalent {}", yes_no(e.equivalent));
                let _ = writeln!(out, "config_hash {}", e.config_hash);
                if let Some(m) = &e.mapping {
                    map_text(&mut out, "mapping", m);
                }
                if let Some(c) = &e.code_certificate {
                    map_text(&mut out, "code_certificate map", &c.map);
                    let _ = writeln!(out, "code_certificate perm {}", join(&c.perm));
                    for (j, b) in c.blocks.iter().enumerate() {
                        let _ = writeln!(out, "code_certificate block {j}");
                        matrix_text(&mut out, b);
                    }
                }
                stats_text(&mut out, "stats first", &e.stats[0]);
                stats_text(&mut out, "stats second", &e.stats[1]);
            }
            Body::Selftest(s) => {
                let _ = writeln!(out, "seed {}", s.seed);
                let _ = writeln!(out, "cases {}", s.cases);
                let _ = writeln!(out, "equivalent_pairs {}", s.equivalent_pairs);
                let _ = writeln!(out, "failures {}", s.failures.len());
                for c in &s.failures {
                    let _ = writeln!(
                        out,
                        "failure q {} k {} same_orbit {} forms_equal {} stab_order {} aut_order {}",
                        c.q,
                        c.k,
                        yes_no(c.same_orbit),
                        yes_no(c.forms_equal),
                        c.stab_order,
                        c.aut_order
                    );
                }
            }
        }
        for o in &self.oracle {
            let _ = writeln!(out, "oracle {} {} {}", o.what, o.value, if o.agrees { "agrees" } else { "DISAGREES" });
        }
        out
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn matrix_text(out: &mut String, m: &Rows) {
    for row in m {
        let _ = writeln!(out, "  {}", join(row));
    }
}

fn map_text(out: &mut String, name: &str, m: &Map) {
    let _ = writeln!(out, "{name} frob {}", m.frob);
    matrix_text(out, &m.matrix);
}

fn group_text(out: &mut String, g: &Group) {
    let _ = writeln!(out, "aut_generators {}", g.generators.len());
    for (i, m) in g.generators.iter().enumerate() {
        map_text(out, &format!("generator {i}"), m);
    }
    let _ = writeln!(out, "aut_order_gammal {}", g.order_gammal);
    let _ = writeln!(out, "aut_order_pgammal {}", g.order_pgammal);
}

fn stats_text(out: &mut String, name: &str, s: &Stats) {
    let _ = writeln!(
        out,
        "{name} nodes {} leaves {} pruned_by_trace {} pruned_by_aut {}",
        s.nodes, s.leaves, s.pruned_by_trace, s.pruned_by_aut
    );
}

fn canonization_text(out: &mut String, c: &Canonization) {
    let p = &c.preprocess;
    let _ = writeln!(out, "dualized {}", yes_no(c.dualized));
    let _ = writeln!(out, "subspaces {}", p.subspaces);
    let _ = writeln!(out, "h {}", p.h);
    let _ = writeln!(out, "total_hyperplanes {}", p.total_hyperplanes);
    let _ = writeln!(out, "hyperplane_classes {}", p.hyperplane_classes);
    let _ = writeln!(out, "initial_cells {}", join(&p.initial_cells));
    let _ = writeln!(out, "canonical sets {}", c.canonical.len());
    for (i, s) in c.canonical.iter().enumerate() {
        let _ = writeln!(out, "set {i} dim {} signature {} members {}", s.dim, join(&s.signature), s.members.len());
        for (j, m) in s.members.iter().enumerate() {
            let _ = writeln!(out, " member {j}");
            matrix_text(out, m);
        }
    }
    map_text(out, "transporter", &c.transporter);
    group_text(out, &c.automorphisms);
    if let Some(code) = &c.code {
        let _ = writeln!(out, "code block_size {} zero_blocks {}", code.block_size, join(&code.zero_blocks));
        let _ = writeln!(out, "code canonical");
        matrix_text(out, &code.canonical);
        let _ = writeln!(out, "code perm {}", join(&code.perm));
        for (j, b) in code.blocks.iter().enumerate() {
            let _ = writeln!(out, "code block {j}");
            matrix_text(out, b);
        }
    }
    let _ = writeln!(out, "config_hash {}", c.config_hash);
    stats_text(out, "stats", &c.stats);
}
