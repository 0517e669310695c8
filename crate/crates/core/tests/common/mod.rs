#![allow(dead_code)]

use std::sync::Arc;

use projcanon::codes::{BlockCode, CodeCertificate};
use projcanon::model::{normalize, NormalizedInstance};
use projcanon::random::{random_invertible, random_matrix, random_semilinear};
use projcanon::{Fe, Field, Matrix, RawFamily};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn unit(k: usize, i: usize) -> Vec<Fe> {
    let mut v = vec![Fe::ZERO; k];
    v[i] = Fe::ONE;
    v
}

/// Three planes of F_3^4: <e1,e2>, <e3,e4>, <e1,e3>.
pub fn example_family() -> RawFamily {
    let f = Arc::new(Field::new(3, 1).unwrap());
    let e = |i| unit(4, i);
    let sets = vec![vec![
        Matrix::from_cols(4, &[e(0), e(1)]),
        Matrix::from_cols(4, &[e(2), e(3)]),
        Matrix::from_cols(4, &[e(0), e(2)]),
    ]];
    RawFamily { field: f, k: 4, sets }
}

pub fn example_instance() -> NormalizedInstance {
    normalize(&example_family()).unwrap()
}

pub fn random_code<R: Rng>(f: &Arc<Field>, k: usize, n: usize, s: usize, rng: &mut R) -> BlockCode {
    loop {
        let gen = random_matrix(f, k, n * s, rng);
        if let Ok(c) = BlockCode::new(f.clone(), s, gen) {
            if normalize(&c.to_family()).is_ok() {
                return c;
            }
        }
    }
}

/// Image of `c` under a random element of the code equivalence group.
pub fn random_equivalent<R: Rng>(c: &BlockCode, rng: &mut R) -> BlockCode {
    let f = &c.field;
    let map = random_semilinear(f, c.k, rng);
    let mut perm: Vec<usize> = (0..c.n()).collect();
    perm.shuffle(rng);
    let blocks: Vec<Matrix> = (0..c.n()).map(|_| random_invertible(f, c.s, rng)).collect();
    let gen = CodeCertificate { map, perm, blocks }.apply(c);
    BlockCode::new(f.clone(), c.s, gen).unwrap()
}
