//! Linear, additive and random network codes as subspace families.
//!
//! A block code is a `k x (s n)` generator matrix whose `n` consecutive
//! `s`-column blocks span the coordinate subspaces; `s = 1` is a linear code.
//! Two codes are equivalent under `(GL_k x GL_s^n) ⋊ (S_n x Aut(F_q))` iff
//! their block subspace multisets lie in one orbit of the semilinear group.

use std::sync::Arc;

use crate::canon::{canonize, CanonConfig, CanonResult};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{self, Matrix};
use crate::model::{RawFamily, Semilinear, Subspace};

#[derive(Clone, Debug)]
pub struct BlockCode {
    pub field: Arc<Field>,
    pub k: usize,
    pub s: usize,
    pub gen: Matrix,
}

impl BlockCode {
    pub fn new(field: Arc<Field>, s: usize, gen: Matrix) -> Result<BlockCode> {
        if s == 0 || gen.cols() % s != 0 {
            return Err(Error::Shape(format!("{} columns do not split into blocks of {s}", gen.cols())));
        }
        let k = gen.rows();
        let rank = linalg::rank(&field, &gen);
        if rank < k {
            return Err(Error::RankDeficient { rank, k });
        }
        Ok(BlockCode { field, k, s, gen })
    }

    pub fn n(&self) -> usize {
        self.gen.cols() / self.s
    }

    pub fn block(&self, j: usize) -> Matrix {
        self.gen.submatrix(0, self.k, j * self.s, (j + 1) * self.s)
    }

    /// Blocks spanning the zero subspace (zero columns of a linear code).
    pub fn zero_blocks(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.block(j).is_zero()).collect()
    }

    /// The multiset of block subspaces; zero blocks are dropped.
    pub fn to_family(&self) -> RawFamily {
        let set = (0..self.n()).map(|j| self.block(j)).filter(|b| !b.is_zero()).collect();
        RawFamily { field: self.field.clone(), k: self.k, sets: vec![set] }
    }
}

pub fn lincode_to_family(field: Arc<Field>, gen: Matrix) -> Result<(BlockCode, RawFamily)> {
    addcode_to_family(field, gen, 1)
}

pub fn addcode_to_family(field: Arc<Field>, gen: Matrix, s: usize) -> Result<(BlockCode, RawFamily)> {
    let code = BlockCode::new(field, s, gen)?;
    let fam = code.to_family();
    Ok((code, fam))
}

pub fn netcode_wrap(field: Arc<Field>, k: usize, code: &[Subspace]) -> RawFamily {
    RawFamily { field, k, sets: vec![code.iter().map(|u| u.basis().clone()).collect()] }
}

/// A code transformation: block `j` of the result is block `perm[j]` of
/// `map` applied to the generator matrix, multiplied by `blocks[j]` on the
/// right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeCertificate {
    pub map: Semilinear,
    pub perm: Vec<usize>,
    pub blocks: Vec<Matrix>,
}

impl CodeCertificate {
    pub fn apply(&self, code: &BlockCode) -> Matrix {
        let f = &*code.field;
        let img = self.map.apply_matrix(f, &code.gen);
        let mut out = Matrix::zeros(code.k, code.gen.cols());
        for (j, &src) in self.perm.iter().enumerate() {
            let b = img.submatrix(0, code.k, src * code.s, (src + 1) * code.s).mul(f, &self.blocks[j]).expect("block shape");
            for c in 0..code.s {
                out.set_col(j * code.s + c, &b.col(c));
            }
        }
        out
    }
}

/// Block `[RCEF basis | 0]` of the subspace spanned by `m`, and `B` with
/// `m B` equal to it.
fn echelon_block(f: &Field, m: &Matrix) -> (Matrix, Matrix) {
    let (r, s, _) = linalg::rcef(f, m);
    (r, s.transpose())
}

/// Finds a block permutation and block transforms taking the blocks of
/// `source` onto those of `target` (same shapes).
pub fn match_blocks(f: &Field, s: usize, target: &Matrix, source: &Matrix) -> Option<(Vec<usize>, Vec<Matrix>)> {
    let k = target.rows();
    let n = target.cols() / s;
    let blocks = |m: &Matrix| -> Vec<(Matrix, Matrix)> {
        (0..n).map(|j| echelon_block(f, &m.submatrix(0, k, j * s, (j + 1) * s))).collect()
    };
    let tb = blocks(target);
    let sb = blocks(source);
    let mut used = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    let mut trans = Vec::with_capacity(n);
    for (rt, bt) in &tb {
        let src = (0..n).find(|&i| !used[i] && sb[i].0 == *rt)?;
        used[src] = true;
        perm.push(src);
        // source B_s = R = target B_t, so source (B_s B_t^-1) = target
        let bt_inv = linalg::inverse(f, bt).ok()?;
        trans.push(sb[src].1.mul(f, &bt_inv).ok()?);
    }
    Some((perm, trans))
}

#[derive(Clone, Debug)]
pub struct CodeCanon {
    pub result: CanonResult,
    /// Generator matrix of the canonical code.
    pub canonical: Matrix,
    /// Takes the input generator matrix to `canonical`; verified.
    pub certificate: CodeCertificate,
    pub zero_blocks: Vec<usize>,
}

/// Canonical code: the blocks `[RCEF | 0]` of the images of all blocks under
/// the transporter, sorted. Zero blocks come first.
pub fn canonize_code(code: &BlockCode, cfg: &CanonConfig) -> Result<CodeCanon> {
    let f = &*code.field;
    let result = canonize(&code.to_family(), cfg)?;
    let t = &result.transporter;
    let img = t.apply_matrix(f, &code.gen);
    let mut blocks: Vec<Matrix> = (0..code.n())
        .map(|j| echelon_block(f, &img.submatrix(0, code.k, j * code.s, (j + 1) * code.s)).0)
        .collect();
    blocks.sort();
    let mut canonical = Matrix::zeros(code.k, code.gen.cols());
    for (j, b) in blocks.iter().enumerate() {
        for c in 0..code.s {
            canonical.set_col(j * code.s + c, &b.col(c));
        }
    }
    let (perm, trans) =
        match_blocks(f, code.s, &canonical, &img).ok_or_else(|| Error::VerificationFailed("canonical blocks do not match".into()))?;
    let certificate = CodeCertificate { map: t.clone(), perm, blocks: trans };
    if certificate.apply(code) != canonical {
        return Err(Error::VerificationFailed("certificate does not produce the canonical code".into()));
    }
    Ok(CodeCanon { result, canonical, certificate, zero_blocks: code.zero_blocks() })
}

/// Decides equivalence; when equivalent, returns a verified certificate
/// taking `b` to `a`.
pub fn code_equivalence(a: &BlockCode, b: &BlockCode, cfg: &CanonConfig) -> Result<Option<CodeCertificate>> {
    if *a.field != *b.field || a.k != b.k || a.s != b.s || a.n() != b.n() {
        return Err(Error::Incompatible("codes differ in field, dimension, block size or length".into()));
    }
    let f = &*a.field;
    let (ca, cb) = (canonize_code(a, cfg)?, canonize_code(b, cfg)?);
    if ca.canonical != cb.canonical || ca.result.config_hash != cb.result.config_hash {
        return Ok(None);
    }
    let map = ca.result.transporter.inverse(f).compose(f, &cb.result.transporter);
    let img = map.apply_matrix(f, &b.gen);
    let (perm, blocks) =
        match_blocks(f, a.s, &a.gen, &img).ok_or_else(|| Error::VerificationFailed("equivalence blocks do not match".into()))?;
    let cert = CodeCertificate { map, perm, blocks };
    if cert.apply(b) != a.gen {
        return Err(Error::VerificationFailed("certificate does not map the codes".into()));
    }
    Ok(Some(cert))
}
