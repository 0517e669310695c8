//! Ordered partitions of `0..n+h` into intervals, with the subspace/normal
//! boundary at `n` never straddled by a cell.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    n_c: usize,
    /// Start of the cell containing each position.
    start_of: Vec<usize>,
    /// End (exclusive) of the cell starting at a position; only meaningful at starts.
    end_at: Vec<usize>,
    fixed_seq: Vec<usize>,
}

/// Outcome of refining some cells by an invariant.
#[derive(Clone, Debug)]
pub struct Refined<K> {
    /// `order[new_pos] = old_pos`, identity outside the refined cells.
    pub order: Vec<usize>,
    /// Sorted keys of every refined cell, cells left to right.
    pub fingerprint: Vec<K>,
    pub split: bool,
}

impl Partition {
    pub fn new(n_c: usize, cell_sizes: &[usize]) -> Partition {
        let total: usize = cell_sizes.iter().sum();
        let mut p = Partition { n_c, start_of: vec![0; total], end_at: vec![0; total], fixed_seq: Vec::new() };
        let mut s = 0;
        for &len in cell_sizes {
            assert!(len > 0, "empty cell");
            assert!(s >= n_c || s + len <= n_c, "cell straddles the subspace/normal boundary");
            p.set_cell(s, s + len);
            if len == 1 {
                p.fixed_seq.push(s);
            }
            s += len;
        }
        p
    }

    fn set_cell(&mut self, s: usize, e: usize) {
        for x in &mut self.start_of[s..e] {
            *x = s;
        }
        self.end_at[s] = e;
    }

    pub fn len(&self) -> usize {
        self.start_of.len()
    }
    pub fn is_empty(&self) -> bool {
        self.start_of.is_empty()
    }
    pub fn n_c(&self) -> usize {
        self.n_c
    }

    pub fn cell_of(&self, pos: usize) -> (usize, usize) {
        let s = self.start_of[pos];
        (s, self.end_at[s])
    }

    pub fn is_singleton(&self, pos: usize) -> bool {
        let (s, e) = self.cell_of(pos);
        e - s == 1
    }

    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut s = 0;
        while s < self.len() {
            let e = self.end_at[s];
            out.push((s, e));
            s = e;
        }
        out
    }

    pub fn num_cells(&self) -> usize {
        self.cells().len()
    }

    pub fn is_discrete(&self) -> bool {
        self.fixed_seq.len() == self.len()
    }

    /// Positions in the order they became singletons.
    pub fn fixed_seq(&self) -> &[usize] {
        &self.fixed_seq
    }

    /// Smallest non-singleton normal cell, else smallest non-singleton
    /// subspace cell; ties go to the leftmost cell.
    pub fn target_cell(&self) -> Option<(usize, usize)> {
        let cells = self.cells();
        let pick = |h: bool| {
            cells
                .iter()
                .filter(|&&(s, e)| e - s > 1 && (s >= self.n_c) == h)
                .min_by_key(|&&(s, e)| (e - s, s))
                .copied()
        };
        pick(true).or_else(|| pick(false))
    }

    /// Splits the cell starting at `start` into `{start}` and the rest.
    pub fn individualize(&mut self, start: usize) {
        let e = self.end_at[start];
        assert!(self.start_of[start] == start && e - start > 1, "not a non-singleton cell start");
        self.set_cell(start, start + 1);
        self.set_cell(start + 1, e);
        self.fixed_seq.push(start);
        if e - start == 2 {
            self.fixed_seq.push(start + 1);
        }
    }

    /// Stable-sorts each cell whose positions carry `Some` key and splits it
    /// where the key changes. Cells must be keyed entirely or not at all.
    pub fn refine<K: Ord + Clone>(&mut self, keys: &[Option<K>]) -> Refined<K> {
        assert_eq!(keys.len(), self.len());
        let mut order: Vec<usize> = (0..self.len()).collect();
        let mut fingerprint = Vec::new();
        let mut split = false;
        let mut new_fixed = Vec::new();
        for (s, e) in self.cells() {
            if keys[s].is_none() {
                debug_assert!(keys[s..e].iter().all(|k| k.is_none()));
                continue;
            }
            let mut idx: Vec<usize> = (s..e).collect();
            idx.sort_by(|&a, &b| keys[a].as_ref().unwrap().cmp(keys[b].as_ref().unwrap()));
            let sorted: Vec<&K> = idx.iter().map(|&i| keys[i].as_ref().unwrap()).collect();
            fingerprint.extend(sorted.iter().map(|&k| k.clone()));
            order[s..e].copy_from_slice(&idx);
            let mut cs = s;
            for p in s + 1..=e {
                if p == e || sorted[p - s] != sorted[p - 1 - s] {
                    if cs != s || p != e {
                        split = true;
                    }
                    self.set_cell(cs, p);
                    if p - cs == 1 && e - s > 1 {
                        new_fixed.push(cs);
                    }
                    cs = p;
                }
            }
        }
        new_fixed.sort_unstable();
        self.fixed_seq.extend(new_fixed);
        Refined { order, fingerprint, split }
    }
}
