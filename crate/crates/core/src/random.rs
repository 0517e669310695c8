//! Random instances and group elements for tests and the self-test.

use std::sync::Arc;

use rand::Rng;

use crate::field::{Fe, Field};
use crate::linalg::{self, Matrix};
use crate::model::{RawFamily, Semilinear};

pub fn random_vector<R: Rng>(f: &Field, k: usize, rng: &mut R) -> Vec<Fe> {
    (0..k).map(|_| Fe(rng.gen_range(0..f.q()) as u16)).collect()
}

pub fn random_matrix<R: Rng>(f: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let cs: Vec<Vec<Fe>> = (0..cols).map(|_| random_vector(f, rows, rng)).collect();
    Matrix::from_cols(rows, &cs)
}

pub fn random_invertible<R: Rng>(f: &Field, k: usize, rng: &mut R) -> Matrix {
    loop {
        let m = random_matrix(f, k, k, rng);
        if linalg::rank(f, &m) == k {
            return m;
        }
    }
}

pub fn random_semilinear<R: Rng>(f: &Field, k: usize, rng: &mut R) -> Semilinear {
    Semilinear { a: random_invertible(f, k, rng), frob: rng.gen_range(0..f.r()) }
}

/// A `k x s` matrix of rank `s`.
pub fn random_full_rank<R: Rng>(f: &Field, k: usize, s: usize, rng: &mut R) -> Matrix {
    loop {
        let m = random_matrix(f, k, s, rng);
        if linalg::rank(f, &m) == s {
            return m;
        }
    }
}

/// A family of `sets` sets with `1..=max_per_set` proper nonzero subspaces
/// each, resampled until it spans F_q^k and survives normalization.
pub fn random_family<R: Rng>(f: &Arc<Field>, k: usize, sets: usize, max_per_set: usize, dims: std::ops::RangeInclusive<usize>, rng: &mut R) -> RawFamily {
    loop {
        let fam = RawFamily {
            field: f.clone(),
            k,
            sets: (0..sets)
                .map(|_| {
                    let n = rng.gen_range(1..=max_per_set);
                    (0..n).map(|_| random_full_rank(f, k, rng.gen_range(dims.clone()), rng)).collect()
                })
                .collect(),
        };
        if crate::model::normalize(&fam).is_ok() {
            return fam;
        }
    }
}

/// Image of a raw family under `g`, with members shuffled.
pub fn transform_family<R: Rng>(fam: &RawFamily, g: &Semilinear, rng: &mut R) -> RawFamily {
    use rand::seq::SliceRandom;
    let f = &*fam.field;
    RawFamily {
        field: fam.field.clone(),
        k: fam.k,
        sets: fam
            .sets
            .iter()
            .map(|s| {
                let mut out: Vec<Matrix> = s
                    .iter()
                    .map(|m| {
                        let img = g.apply_matrix(f, m);
                        // another basis of the same subspace
                        let c = random_invertible(f, m.cols(), rng);
                        img.mul(f, &c).expect("shapes agree")
                    })
                    .collect();
                out.shuffle(rng);
                out
            })
            .collect(),
    }
}
