//! Dual hyperovals in F_2^{2d} from the APN function x^3:
//! `X_a = { (x, a x^2 + a^2 x) : x in GF(2^d) }` for every `a in GF(2^d)`.
//! The family is checked against the dual hyperoval axioms before it is
//! returned.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::Matrix;
use crate::model::{RawFamily, Subspace};

fn bits(f: &Field, x: Fe, d: usize) -> Vec<Fe> {
    let idx = f.to_index(x);
    (0..d).map(|i| if idx >> i & 1 == 1 { Fe::ONE } else { Fe::ZERO }).collect()
}

/// Basis (columns) of `X_a`, coordinates being the polynomial-basis bits.
pub fn member(ext: &Field, d: usize, a: Fe) -> Matrix {
    let cols: Vec<Vec<Fe>> = (0..d)
        .map(|j| {
            let x = ext.from_index(1 << j).expect("basis element");
            let y = ext.add(ext.mul(a, ext.mul(x, x)), ext.mul(ext.mul(a, a), x));
            let mut v = bits(ext, x, d);
            v.extend(bits(ext, y, d));
            v
        })
        .collect();
    Matrix::from_cols(2 * d, &cols)
}

/// Checks that any two members meet in a point and no point lies on three
/// members. With pairwise intersections of dimension one, the second
/// condition says the intersection points of distinct pairs are distinct.
pub fn verify_dual_hyperoval(f2: &Field, members: &[Subspace]) -> Result<()> {
    let mut points: HashSet<Subspace> = HashSet::new();
    for i in 0..members.len() {
        for j in i + 1..members.len() {
            let p = members[i].intersection(f2, &members[j]);
            if p.dim() != 1 {
                return Err(Error::AxiomViolation(format!("members {i} and {j} meet in dimension {}", p.dim())));
            }
            if !points.insert(p) {
                return Err(Error::AxiomViolation(format!("the intersection of members {i} and {j} lies on a third member")));
            }
        }
    }
    Ok(())
}

pub fn dual_hyperoval(d: usize) -> Result<RawFamily> {
    if !(2..=8).contains(&d) {
        return Err(Error::InvalidField(format!("hyperoval parameter d={d} outside 2..=8")));
    }
    let ext = Field::new(2, d as u32)?;
    let f2 = Arc::new(Field::new(2, 1)?);
    let mats: Vec<Matrix> = ext.elements().map(|a| member(&ext, d, a)).collect();
    let subs: Vec<Subspace> = mats.iter().map(|m| Subspace::span(&f2, m)).collect();
    if subs.iter().any(|s| s.dim() != d) {
        return Err(Error::AxiomViolation("a member is not d-dimensional".into()));
    }
    verify_dual_hyperoval(&f2, &subs)?;
    Ok(RawFamily { field: f2, k: 2 * d, sets: vec![mats] })
}
