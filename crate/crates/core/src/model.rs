//! Subspaces, families of subspace sets, the semilinear group action and
//! normalization of input families.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::linalg::{self, Matrix};

/// A subspace of F_q^k, stored by its RCEF basis (k x dim).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Subspace(Matrix);

impl Subspace {
    /// Column space of `m`.
    pub fn span(f: &Field, m: &Matrix) -> Subspace {
        Subspace(linalg::column_space(f, m))
    }

    pub fn from_vectors(f: &Field, k: usize, vs: &[Vec<Fe>]) -> Subspace {
        Subspace::span(f, &Matrix::from_cols(k, vs))
    }

    pub fn basis(&self) -> &Matrix {
        &self.0
    }
    pub fn dim(&self) -> usize {
        self.0.cols()
    }
    pub fn ambient(&self) -> usize {
        self.0.rows()
    }

    /// Orthogonal complement `{ v : v^T u = 0 for all u in U }`.
    pub fn dual(&self, f: &Field) -> Subspace {
        Subspace::span(f, &linalg::kernel_basis(f, &self.0))
    }

    pub fn contains(&self, f: &Field, v: &[Fe]) -> bool {
        let m = self.0.hstack(&Matrix::from_cols(v.len(), &[v.to_vec()])).expect("same ambient");
        linalg::rank(f, &m) == self.dim()
    }

    pub fn sum(&self, f: &Field, other: &Subspace) -> Subspace {
        Subspace::span(f, &self.0.hstack(&other.0).expect("same ambient"))
    }

    pub fn intersection(&self, f: &Field, other: &Subspace) -> Subspace {
        // (U cap V)^perp = U^perp + V^perp
        self.dual(f).sum(f, &other.dual(f)).dual(f)
    }
}

/// Subspace distance `dim(U+V) - dim(U cap V)`, computed from the sum.
pub fn subspace_distance(f: &Field, u: &Subspace, v: &Subspace) -> usize {
    2 * u.sum(f, v).dim() - u.dim() - v.dim()
}

/// `(A, a)` acting by `u -> A * frob^a(u)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Semilinear {
    pub a: Matrix,
    pub frob: u32,
}

impl Semilinear {
    pub fn identity(k: usize) -> Semilinear {
        Semilinear { a: Matrix::identity(k), frob: 0 }
    }

    pub fn new(f: &Field, a: Matrix, frob: u32) -> Result<Semilinear> {
        linalg::inverse(f, &a)?;
        Ok(Semilinear { a, frob: frob % f.r() })
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, f: &Field, other: &Semilinear) -> Semilinear {
        Semilinear {
            a: self.a.mul(f, &other.a.frob(f, self.frob)).expect("same dimension"),
            frob: (self.frob + other.frob) % f.r(),
        }
    }

    pub fn inverse(&self, f: &Field) -> Semilinear {
        let back = (f.r() - self.frob % f.r()) % f.r();
        let inv = linalg::inverse(f, &self.a).expect("semilinear map is invertible");
        Semilinear { a: inv.frob(f, back), frob: back }
    }

    pub fn apply_vec(&self, f: &Field, u: &[Fe]) -> Vec<Fe> {
        self.a.mul_vec(f, &f.frob_vec(u, self.frob))
    }

    pub fn apply_matrix(&self, f: &Field, m: &Matrix) -> Matrix {
        self.a.mul(f, &m.frob(f, self.frob)).expect("same dimension")
    }

    pub fn apply(&self, f: &Field, u: &Subspace) -> Subspace {
        Subspace::span(f, &self.apply_matrix(f, u.basis()))
    }

    /// Image of a hyperplane normal: `v -> (A^-1)^T frob^a(v)`.
    pub fn apply_normal(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        self.dual(f).apply_vec(f, v)
    }

    /// The map induced on orthogonal complements: `((A^-1)^T, a)`.
    pub fn dual(&self, f: &Field) -> Semilinear {
        let inv = linalg::inverse(f, &self.a).expect("invertible");
        Semilinear { a: inv.transpose(), frob: self.frob }
    }

    pub fn is_identity(&self) -> bool {
        self.frob == 0 && self.a == Matrix::identity(self.a.rows())
    }

    /// Whether the map is a scalar multiple of the identity with trivial
    /// field automorphism, i.e. acts trivially on projective space.
    pub fn is_projectively_trivial(&self) -> bool {
        let k = self.a.rows();
        self.frob == 0
            && (0..k).all(|i| (0..k).all(|j| (i == j) == !self.a.get(i, j).is_zero()))
            && (0..k).all(|i| self.a.get(i, i) == self.a.get(0, 0))
    }
}

/// A sequence of sets of subspaces as supplied by the user. Subspaces are
/// given by spanning matrices; repeated subspaces are allowed.
#[derive(Clone, Debug)]
pub struct RawFamily {
    pub field: Arc<Field>,
    pub k: usize,
    pub sets: Vec<Vec<Matrix>>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NormalizedSet {
    pub dim: usize,
    /// Multiplicity of each member in each input set, by input set position.
    pub signature: Vec<u32>,
    pub members: Vec<Subspace>,
}

/// Distinct subspaces grouped into sets of equal dimension and equal
/// multiplicity signature. Sets are ordered by `(dim, signature)` (the order
/// is kept when the instance is dualized) and members within a set are
/// sorted.
#[derive(Clone, Debug)]
pub struct NormalizedInstance {
    pub field: Arc<Field>,
    pub k: usize,
    pub sets: Vec<NormalizedSet>,
    pub input_sets: usize,
    pub dualized: bool,
}

impl PartialEq for NormalizedInstance {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.k == other.k && self.sets == other.sets
    }
}

/// Number of `s`-dimensional subspaces of F_q^k, saturating at `u128::MAX`.
pub fn gaussian_binomial(q: u64, k: usize, s: usize) -> u128 {
    if s > k {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..s {
        let a = q.checked_pow((k - i) as u32).and_then(|x| x.checked_sub(1));
        let b = q.checked_pow((i + 1) as u32).map(|x| x - 1);
        match (a.and_then(|a| num.checked_mul(a)), b.and_then(|b| den.checked_mul(b))) {
            (Some(n), Some(d)) => {
                num = n;
                den = d;
                let g = gcd(num, den);
                num /= g;
                den /= g;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Groups distinct subspaces by dimension and multiplicity signature and
/// removes parts that carry no information (zero space, whole space, and
/// sets containing every subspace of their dimension).
pub fn normalize(raw: &RawFamily) -> Result<NormalizedInstance> {
    let f = &*raw.field;
    let m = raw.sets.len();
    let mut mult: BTreeMap<Subspace, Vec<u32>> = BTreeMap::new();
    for (i, set) in raw.sets.iter().enumerate() {
        for g in set {
            if g.rows() != raw.k {
                return Err(Error::Shape(format!("subspace generator has {} rows, expected {}", g.rows(), raw.k)));
            }
            mult.entry(Subspace::span(f, g)).or_insert_with(|| vec![0; m])[i] += 1;
        }
    }
    let mut groups: BTreeMap<(usize, Vec<u32>), Vec<Subspace>> = BTreeMap::new();
    for (u, sig) in mult {
        groups.entry((u.dim(), sig)).or_default().push(u);
    }
    let mut sets = Vec::new();
    for ((dim, signature), members) in groups {
        if dim == 0 || dim == raw.k {
            continue;
        }
        if members.len() as u128 == gaussian_binomial(f.q() as u64, raw.k, dim) {
            continue;
        }
        sets.push(NormalizedSet { dim, signature, members });
    }
    if sets.is_empty() {
        return Err(Error::EmptyInstance);
    }
    let inst = NormalizedInstance { field: raw.field.clone(), k: raw.k, sets, input_sets: m, dualized: false };
    let span = inst.span_dim();
    if span < raw.k {
        return Err(Error::NonSpanning { span, k: raw.k });
    }
    Ok(inst)
}

impl NormalizedInstance {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn num_subspaces(&self) -> usize {
        self.sets.iter().map(|s| s.members.len()).sum()
    }

    pub fn subspaces(&self) -> impl Iterator<Item = &Subspace> {
        self.sets.iter().flat_map(|s| s.members.iter())
    }

    pub fn span_dim(&self) -> usize {
        let cols: Vec<Vec<Fe>> = self
            .subspaces()
            .flat_map(|u| (0..u.dim()).map(move |j| u.basis().col(j)))
            .collect();
        if cols.is_empty() {
            return 0;
        }
        linalg::rank(&self.field, &Matrix::from_cols(self.k, &cols))
    }

    /// Image under `g`; members are re-sorted within each set.
    pub fn act(&self, g: &Semilinear) -> NormalizedInstance {
        let f = &*self.field;
        let sets = self
            .sets
            .iter()
            .map(|s| {
                let mut members: Vec<Subspace> = s.members.iter().map(|u| g.apply(f, u)).collect();
                members.sort();
                NormalizedSet { dim: s.dim, signature: s.signature.clone(), members }
            })
            .collect();
        NormalizedInstance { sets, ..self.clone() }
    }

    /// Orthogonal complements of every member, set order kept.
    pub fn dual(&self) -> NormalizedInstance {
        let f = &*self.field;
        let sets = self
            .sets
            .iter()
            .map(|s| {
                let mut members: Vec<Subspace> = s.members.iter().map(|u| u.dual(f)).collect();
                members.sort();
                NormalizedSet { dim: self.k - s.dim, signature: s.signature.clone(), members }
            })
            .collect();
        NormalizedInstance { sets, dualized: !self.dualized, ..self.clone() }
    }

    /// Whether `g` maps every set onto itself.
    pub fn is_automorphism(&self, g: &Semilinear) -> bool {
        self.act(g) == *self
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum DualizeMode {
    #[default]
    Auto,
    On,
    Off,
}

/// Work on the dual instance when it has a strictly smaller total dimension.
pub fn should_dualize(inst: &NormalizedInstance, mode: DualizeMode) -> bool {
    match mode {
        DualizeMode::On => true,
        DualizeMode::Off => false,
        DualizeMode::Auto => {
            let k = inst.k;
            let (mut here, mut there) = (0usize, 0usize);
            for s in &inst.sets {
                here += s.members.len() * s.dim;
                there += s.members.len() * (k - s.dim);
            }
            there < here
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Field> {
        Arc::new(Field::new(3, 1).unwrap())
    }

    fn sub(f: &Field, k: usize, vs: &[&[u32]]) -> Subspace {
        let cols: Vec<Vec<Fe>> = vs.iter().map(|v| v.iter().map(|&x| f.from_index(x).unwrap()).collect()).collect();
        Subspace::from_vectors(f, k, &cols)
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(2, 3, 1), 7);
        assert_eq!(gaussian_binomial(2, 4, 2), 35);
        assert_eq!(gaussian_binomial(3, 3, 1), 13);
        assert_eq!(gaussian_binomial(4, 3, 2), 21);
        assert_eq!(gaussian_binomial(2, 200, 100), u128::MAX);
    }

    #[test]
    fn distance_formulas_agree() {
        let f = f3();
        let u = sub(&f, 4, &[&[1, 0, 0, 0], &[0, 1, 0, 0]]);
        let v = sub(&f, 4, &[&[1, 1, 0, 0], &[0, 0, 1, 0]]);
        let w = u.intersection(&f, &v);
        assert_eq!(w.dim(), 1);
        assert_eq!(subspace_distance(&f, &u, &v), u.dim() + v.dim() - 2 * w.dim());
    }

    #[test]
    fn semilinear_group_laws() {
        let f = Arc::new(Field::new(2, 2).unwrap());
        let x = f.xi();
        let a = Semilinear::new(&f, Matrix::from_rows(&[vec![Fe::ONE, x], vec![Fe::ZERO, x]]), 1).unwrap();
        let b = Semilinear::new(&f, Matrix::from_rows(&[vec![x, Fe::ZERO], vec![Fe::ONE, Fe::ONE]]), 0).unwrap();
        let u = vec![x, Fe::ONE];
        let ab = a.compose(&f, &b);
        assert_eq!(ab.apply_vec(&f, &u), a.apply_vec(&f, &b.apply_vec(&f, &u)));
        assert!(a.compose(&f, &a.inverse(&f)).is_identity());
        assert!(a.inverse(&f).compose(&f, &a).is_identity());
        // normals: v^T u = 0 is preserved
        let v = vec![Fe::ONE, f.neg(x)];
        let w = vec![x, Fe::ONE];
        let dot = |p: &[Fe], q: &[Fe]| p.iter().zip(q).fold(Fe::ZERO, |s, (&a, &b)| f.add(s, f.mul(a, b)));
        assert_eq!(dot(&v, &w).is_zero(), dot(&a.apply_normal(&f, &v), &a.apply_vec(&f, &w)).is_zero());
    }

    #[test]
    fn dual_commutes_with_action() {
        let f = Arc::new(Field::new(2, 2).unwrap());
        let x = f.xi();
        let g = Semilinear::new(
            &f,
            Matrix::from_rows(&[vec![Fe::ONE, x, Fe::ZERO], vec![Fe::ZERO, x, Fe::ONE], vec![x, Fe::ZERO, Fe::ONE]]),
            1,
        )
        .unwrap();
        let u = sub(&f, 3, &[&[1, 2, 0], &[0, 1, 3]]);
        assert_eq!(g.apply(&f, &u).dual(&f), g.dual(&f).apply(&f, &u.dual(&f)));
    }

    #[test]
    fn normalize_groups_by_signature_and_drops_trivial_sets() {
        let f = f3();
        let e = |i: usize| {
            let mut v = vec![Fe::ZERO; 3];
            v[i] = Fe::ONE;
            Matrix::from_cols(3, &[v])
        };
        let raw = RawFamily {
            field: f.clone(),
            k: 3,
            sets: vec![vec![e(0), e(1), e(2), e(0)], vec![e(2)], vec![Matrix::identity(3)]],
        };
        let inst = normalize(&raw).unwrap();
        let sigs: Vec<Vec<u32>> = inst.sets.iter().map(|s| s.signature.clone()).collect();
        assert_eq!(sigs, vec![vec![1, 0, 0], vec![1, 1, 0], vec![2, 0, 0]]);
        assert_eq!(inst.num_subspaces(), 3);
    }

    #[test]
    fn normalize_errors() {
        let f = f3();
        let e0 = Matrix::from_cols(3, &[vec![Fe::ONE, Fe::ZERO, Fe::ZERO]]);
        let raw = RawFamily { field: f.clone(), k: 3, sets: vec![vec![e0]] };
        assert!(matches!(normalize(&raw), Err(Error::NonSpanning { span: 1, k: 3 })));
        let raw = RawFamily { field: f.clone(), k: 3, sets: vec![vec![Matrix::zeros(3, 1)]] };
        assert!(matches!(normalize(&raw), Err(Error::EmptyInstance)));
        // all 13 points of PG(2,3) form a trivial set
        let pts: Vec<Matrix> = crate::linalg::projective_points(&f, 3)
            .into_iter()
            .map(|v| Matrix::from_cols(3, &[v]))
            .collect();
        let raw = RawFamily { field: f, k: 3, sets: vec![pts] };
        assert!(matches!(normalize(&raw), Err(Error::EmptyInstance)));
    }

    #[test]
    fn dualize_heuristic() {
        let f = f3();
        let mk = |dims: &[usize]| {
            let sets = dims
                .iter()
                .map(|&s| {
                    let mut m = Matrix::zeros(4, s);
                    for j in 0..s {
                        m.set(j, j, Fe::ONE);
                    }
                    let mut m2 = Matrix::zeros(4, s);
                    for j in 0..s {
                        m2.set(3 - j, j, Fe::ONE);
                    }
                    vec![m, m2]
                })
                .collect();
            normalize(&RawFamily { field: f.clone(), k: 4, sets }).unwrap()
        };
        assert!(should_dualize(&mk(&[3]), DualizeMode::Auto));
        assert!(!should_dualize(&mk(&[2]), DualizeMode::Auto));
        assert!(should_dualize(&mk(&[2]), DualizeMode::On));
        assert!(!should_dualize(&mk(&[3]), DualizeMode::Off));
    }
}
