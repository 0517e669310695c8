//! Permutation groups on `0..n`: deterministic Schreier-Sims stabilizer
//! chains, orbits and group orders.

use num_bigint::BigUint;

pub type Perm = Vec<u32>;

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn is_identity(p: &[u32]) -> bool {
    p.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

/// `(a * b)(x) = a(b(x))`
pub fn mul(a: &[u32], b: &[u32]) -> Perm {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn inverse(a: &[u32]) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x as usize] = i as u32;
    }
    out
}

/// Orbit representative (smallest point) of every point under `gens`.
pub fn orbit_reps(n: usize, gens: &[Perm]) -> Vec<u32> {
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(p: &mut [u32], x: u32) -> u32 {
        let mut r = x;
        while p[r as usize] != r {
            r = p[r as usize];
        }
        let mut c = x;
        while p[c as usize] != r {
            let nx = p[c as usize];
            p[c as usize] = r;
            c = nx;
        }
        r
    }
    for g in gens {
        for (x, &y) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, x as u32), find(&mut parent, y));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    (0..n as u32).map(|x| find(&mut parent, x)).collect()
}

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    gens_inv: Vec<Perm>,
    /// Generator index that reached each orbit point; `u32::MAX` for the
    /// base point, `None` outside the orbit.
    tree: Vec<Option<u32>>,
    orbit: Vec<u32>,
}

impl Level {
    fn new(n: usize, base: u32) -> Level {
        let mut l = Level { base, gens: Vec::new(), gens_inv: Vec::new(), tree: vec![None; n], orbit: Vec::new() };
        l.rebuild();
        l
    }

    fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|x| *x = None);
        self.tree[self.base as usize] = Some(u32::MAX);
        self.orbit = vec![self.base];
        let mut i = 0;
        while i < self.orbit.len() {
            let x = self.orbit[i];
            for (gi, g) in self.gens.iter().enumerate() {
                let y = g[x as usize];
                if self.tree[y as usize].is_none() {
                    self.tree[y as usize] = Some(gi as u32);
                    self.orbit.push(y);
                }
            }
            i += 1;
        }
    }

    fn add_gen(&mut self, g: Perm) {
        self.gens_inv.push(inverse(&g));
        self.gens.push(g);
        self.rebuild();
    }

    /// Coset representative `u` with `u(base) = y`.
    fn rep(&self, y: u32) -> Perm {
        let n = self.tree.len();
        let mut u = identity(n);
        let mut cur = y;
        while cur != self.base {
            let gi = self.tree[cur as usize].expect("point in orbit") as usize;
            u = mul(&u, &self.gens[gi]);
            cur = self.gens_inv[gi][cur as usize];
        }
        u
    }
}

#[derive(Clone, Debug)]
pub struct StabChain {
    n: usize,
    levels: Vec<Level>,
}

impl StabChain {
    /// Chain for `<gens>` whose base starts with `base_prefix`.
    pub fn new(n: usize, gens: &[Perm], base_prefix: &[u32]) -> StabChain {
        let mut ch = StabChain { n, levels: Vec::new() };
        for &b in base_prefix {
            if !ch.levels.iter().any(|l| l.base == b) {
                ch.levels.push(Level::new(n, b));
            }
        }
        for g in gens {
            ch.extend(g);
        }
        ch
    }

    /// Adds `g` unless the group already contains it; returns whether the
    /// group grew.
    pub fn extend(&mut self, g: &[u32]) -> bool {
        let (h, j) = self.strip(g, 0);
        if is_identity(&h) {
            return false;
        }
        self.add_strong(h, 0, j);
        self.complete();
        true
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base).collect()
    }

    fn strip(&self, g: &[u32], from: usize) -> (Perm, usize) {
        let mut h = g.to_vec();
        for (i, l) in self.levels.iter().enumerate().skip(from) {
            let y = h[l.base as usize];
            if l.tree[y as usize].is_none() {
                return (h, i);
            }
            let u = l.rep(y);
            h = mul(&inverse(&u), &h);
        }
        (h, self.levels.len())
    }

    /// Adds `h` as a strong generator on levels `from..=j`, extending the base if needed.
    fn add_strong(&mut self, h: Perm, from: usize, j: usize) {
        if j == self.levels.len() {
            let moved = h.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i as u32).unwrap();
            self.levels.push(Level::new(self.n, moved));
        }
        for l in from..=j {
            self.levels[l].add_gen(h.clone());
        }
    }

    /// Schreier-Sims closure: every Schreier generator sifts to the identity.
    fn complete(&mut self) {
        let mut i = self.levels.len();
        while i > 0 {
            let lvl = i - 1;
            let mut found = None;
            'search: for oi in 0..self.levels[lvl].orbit.len() {
                let y = self.levels[lvl].orbit[oi];
                let uy = self.levels[lvl].rep(y);
                for gi in 0..self.levels[lvl].gens.len() {
                    let s = &self.levels[lvl].gens[gi];
                    let sy = s[y as usize];
                    let usy = self.levels[lvl].rep(sy);
                    let sch = mul(&inverse(&usy), &mul(s, &uy));
                    if is_identity(&sch) {
                        continue;
                    }
                    let (h, j) = self.strip(&sch, lvl + 1);
                    if !is_identity(&h) {
                        found = Some((h, j));
                        break 'search;
                    }
                }
            }
            match found {
                Some((h, j)) => {
                    self.add_strong(h, lvl + 1, j);
                    i = j.min(self.levels.len() - 1) + 1;
                }
                None => i -= 1,
            }
        }
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    pub fn contains(&self, g: &[u32]) -> bool {
        let (h, _) = self.strip(g, 0);
        is_identity(&h)
    }

    /// Strong generators of the pointwise stabilizer of the first `d` base points.
    pub fn stabilizer_gens(&self, d: usize) -> &[Perm] {
        if d < self.levels.len() {
            &self.levels[d].gens
        } else {
            &[]
        }
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize, pts: &[u32]) -> Perm {
        let mut p = identity(n);
        for w in 0..pts.len() {
            p[pts[w] as usize] = pts[(w + 1) % pts.len()];
        }
        p
    }

    #[test]
    fn symmetric_and_alternating_orders() {
        let s6 = StabChain::new(6, &[cycle(6, &[0, 1]), cycle(6, &[0, 1, 2, 3, 4, 5])], &[]);
        assert_eq!(s6.order(), BigUint::from(720u32));
        let a5 = StabChain::new(5, &[cycle(5, &[0, 1, 2]), cycle(5, &[0, 1, 2, 3, 4])], &[]);
        assert_eq!(a5.order(), BigUint::from(60u32));
        assert!(a5.contains(&cycle(5, &[2, 3, 4])));
        assert!(!a5.contains(&cycle(5, &[0, 1])));
    }

    #[test]
    fn base_prefix_is_respected() {
        let g = StabChain::new(6, &[cycle(6, &[0, 1, 2, 3, 4, 5]), vec![0, 5, 4, 3, 2, 1]], &[3, 0]);
        assert_eq!(&g.base()[..2], &[3, 0]);
        assert_eq!(g.order(), BigUint::from(12u32));
        // the reflection through vertices 0 and 3 survives
        let st = g.stabilizer_gens(2);
        assert!(!st.is_empty());
        assert!(st.iter().all(|p| p[3] == 3 && p[0] == 0));
        let reps = orbit_reps(6, st);
        assert_eq!((reps[1], reps[5]), (1, 1));
    }

    #[test]
    fn orbits_union() {
        let reps = orbit_reps(6, &[cycle(6, &[1, 4]), cycle(6, &[4, 5])]);
        assert_eq!(reps, vec![0, 1, 2, 3, 1, 1]);
    }
}
