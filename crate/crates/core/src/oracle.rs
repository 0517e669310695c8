//! Exhaustive reference implementation over the whole semilinear group,
//! for small k and q only. Used to cross-check the search.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::{self, Matrix};
use crate::model::{NormalizedInstance, Semilinear};

/// Largest |GL_k(q)| the oracle agrees to enumerate.
pub const ORACLE_LIMIT: u128 = 10_000_000;

pub fn gl_order(q: u128, k: usize) -> u128 {
    let qk = q.saturating_pow(k as u32);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(qk - q.pow(i as u32)))
}

/// Calls `visit` on every element of ΓL_k(q) until it returns `false`.
pub fn for_each_semilinear(f: &Field, k: usize, visit: &mut dyn FnMut(&Semilinear) -> bool) -> Result<()> {
    let size = gl_order(f.q() as u128, k).saturating_mul(f.r() as u128);
    if size > ORACLE_LIMIT {
        return Err(Error::CapacityExceeded(format!("|ΓL_{k}({})| = {size} exceeds the oracle limit", f.q())));
    }
    let vectors: Vec<Vec<Fe>> = (0..(f.q() as usize).pow(k as u32))
        .map(|mut code| {
            (0..k)
                .map(|_| {
                    let x = Fe((code % f.q() as usize) as u16);
                    code /= f.q() as usize;
                    x
                })
                .collect()
        })
        .collect();
    let mut cols: Vec<Vec<Fe>> = Vec::with_capacity(k);
    let mut go = true;
    rec(f, k, &vectors, &mut cols, &mut go, visit);
    Ok(())
}

fn rec(f: &Field, k: usize, vectors: &[Vec<Fe>], cols: &mut Vec<Vec<Fe>>, go: &mut bool, visit: &mut dyn FnMut(&Semilinear) -> bool) {
    if !*go {
        return;
    }
    if cols.len() == k {
        let a = Matrix::from_cols(k, cols);
        for e in 0..f.r() {
            if !visit(&Semilinear { a: a.clone(), frob: e }) {
                *go = false;
                return;
            }
        }
        return;
    }
    for v in vectors {
        cols.push(v.clone());
        if linalg::rank(f, &Matrix::from_cols(k, cols)) == cols.len() {
            rec(f, k, vectors, cols, go, visit);
        }
        cols.pop();
        if !*go {
            return;
        }
    }
}

/// Whether some element of ΓL_k(q) maps `a` onto `b`.
pub fn brute_same_orbit(a: &NormalizedInstance, b: &NormalizedInstance) -> Result<bool> {
    if *a.field != *b.field || a.k != b.k {
        return Ok(false);
    }
    let mut found = false;
    for_each_semilinear(&a.field, a.k, &mut |g| {
        if a.act(g) == *b {
            found = true;
        }
        !found
    })?;
    Ok(found)
}

/// |Stab(a)| in ΓL_k(q), by counting.
pub fn brute_stab_order(a: &NormalizedInstance) -> Result<BigUint> {
    let mut count: u64 = 0;
    for_each_semilinear(&a.field, a.k, &mut |g| {
        if a.is_automorphism(g) {
            count += 1;
        }
        true
    })?;
    Ok(BigUint::from(count))
}

/// The smallest image of `a` under ΓL_k(q) in the order of the normalized
/// sets; an independent canonical form.
pub fn brute_min_image(a: &NormalizedInstance) -> Result<NormalizedInstance> {
    let key = |x: &NormalizedInstance| x.sets.iter().map(|s| s.members.clone()).collect::<Vec<_>>();
    let mut best = a.clone();
    let mut best_key = key(&best);
    for_each_semilinear(&a.field, a.k, &mut |g| {
        let img = a.act(g);
        let k = key(&img);
        if k < best_key {
            best = img;
            best_key = k;
        }
        true
    })?;
    Ok(best)
}
