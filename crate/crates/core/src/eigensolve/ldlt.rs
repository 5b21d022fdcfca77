//! Envelope (skyline) LDLᵀ factorization under reverse Cuthill–McKee ordering.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::discretize::SparseSymMatrix;

/// Adjacency lists of the symmetric sparsity pattern (diagonal excluded).
fn adjacency(a: &SparseSymMatrix) -> Vec<Vec<u32>> {
    let n = a.dim();
    let mut adj = alloc::vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if j != i {
                adj[i].push(j as u32);
                adj[j].push(i as u32);
            }
        }
    }
    for l in adj.iter_mut() {
        l.sort_unstable();
        l.dedup();
    }
    adj
}

/// BFS from `root`; returns the visit order and the level of each visited node.
fn bfs(adj: &[Vec<u32>], root: usize, mark: &mut [u32], stamp: u32) -> (Vec<usize>, Vec<usize>) {
    let mut order = alloc::vec![root];
    let mut level = alloc::vec![0usize];
    mark[root] = stamp;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        for &w in &adj[v] {
            if mark[w as usize] != stamp {
                mark[w as usize] = stamp;
                order.push(w as usize);
                level.push(level[k] + 1);
            }
        }
        k += 1;
    }
    (order, level)
}

/// Reverse Cuthill–McKee permutation: `perm[new] = old`.
pub fn rcm_order(a: &SparseSymMatrix) -> Vec<usize> {
    let adj = adjacency(a);
    let n = adj.len();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut placed = alloc::vec![false; n];
    let mut mark = alloc::vec![0u32; n];
    let mut stamp = 0u32;
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if placed[seed] {
            continue;
        }
        // Pseudo-peripheral root: walk to the far end of the BFS until the depth stops growing.
        let mut root = seed;
        let mut depth = 0;
        for _ in 0..8 {
            stamp += 1;
            let (lv, levels) = bfs(&adj, root, &mut mark, stamp);
            let d = *levels.last().unwrap();
            if d <= depth && depth > 0 {
                break;
            }
            depth = d;
            let far = lv
                .iter()
                .zip(&levels)
                .filter(|(_, &l)| l == d)
                .map(|(&v, _)| v)
                .min_by_key(|&v| (degree[v], v));
            match far {
                Some(f) if d > 0 => root = f,
                _ => break,
            }
        }
        let start = order.len();
        let mut queue = VecDeque::from([root]);
        placed[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().map(|&w| w as usize).filter(|&w| !placed[w]).collect();
            next.sort_unstable_by_key(|&w| (degree[w], w));
            for w in next {
                placed[w] = true;
                queue.push_back(w);
            }
        }
        order[start..].reverse();
    }
    order
}

/// `P A Pᵀ = L D Lᵀ` with `L` unit lower triangular stored row-wise over each row's envelope.
#[derive(Clone, Debug)]
pub struct Ldlt {
    perm: Vec<usize>,
    /// First column of the envelope of each permuted row.
    first: Vec<usize>,
    /// Offset of row `i`'s strictly-lower envelope in `l`.
    start: Vec<usize>,
    l: Vec<f64>,
    d: Vec<f64>,
    negative: usize,
    /// Smallest `|dᵢ| / |aᵢᵢ|` met during elimination.
    min_pivot_ratio: f64,
}

impl Ldlt {
    /// Factors `a` with the permutation `perm` (`perm[new] = old`).
    pub fn factor(a: &SparseSymMatrix, perm: Vec<usize>) -> Self {
        let n = a.dim();
        let mut inv = alloc::vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for i in 0..n {
            for (j, _) in a.row(i) {
                let (p, q) = (inv[i], inv[j]);
                let (r, c) = if p >= q { (p, q) } else { (q, p) };
                if c < first[r] {
                    first[r] = c;
                }
            }
        }
        let mut start = alloc::vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i]);
        }
        let mut l = alloc::vec![0.0; start[n]];
        let mut diag = alloc::vec![0.0; n];
        for i in 0..n {
            for (j, v) in a.row(i) {
                let (p, q) = (inv[i], inv[j]);
                if p == q {
                    diag[p] = v;
                } else {
                    let (r, c) = if p > q { (p, q) } else { (q, p) };
                    l[start[r] + (c - first[r])] = v;
                }
            }
        }
        let mut d = alloc::vec![0.0; n];
        let mut negative = 0;
        let mut min_ratio = f64::INFINITY;
        for i in 0..n {
            let fi = first[i];
            let (head, row_i) = l.split_at_mut(start[i]);
            let row_i = &mut row_i[..i - fi];
            // row_i[j - fi] holds g_ij = l_ij d_j while it is being formed.
            for j in fi..i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let row_j = &head[start[j]..start[j + 1]];
                let mut s = row_i[j - fi];
                let gi = &row_i[k0 - fi..j - fi];
                let lj = &row_j[k0 - fj..j - fj];
                s -= gi.iter().zip(lj).map(|(x, y)| x * y).sum::<f64>();
                row_i[j - fi] = s;
            }
            let mut di = diag[i];
            for j in fi..i {
                let g = row_i[j - fi];
                let lij = g / d[j];
                di -= g * lij;
                row_i[j - fi] = lij;
            }
            d[i] = di;
            if di < 0.0 {
                negative += 1;
            }
            let scale = diag[i].abs().max(f64::MIN_POSITIVE);
            min_ratio = min_ratio.min(di.abs() / scale);
        }
        Self {
            perm,
            first,
            start,
            l,
            d,
            negative,
            min_pivot_ratio: min_ratio,
        }
    }

    pub fn factor_rcm(a: &SparseSymMatrix) -> Self {
        Self::factor(a, rcm_order(a))
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Negative pivots: the number of eigenvalues of `A` below zero.
    pub fn negative_pivots(&self) -> usize {
        self.negative
    }

    pub fn min_pivot_ratio(&self) -> f64 {
        self.min_pivot_ratio
    }

    pub fn envelope_size(&self) -> usize {
        self.l.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        let mut y: Vec<f64> = (0..n).map(|i| b[self.perm[i]]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            let s: f64 = row.iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] -= s;
        }
        for i in 0..n {
            y[i] /= self.d[i];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let yi = y[i];
            let row = &self.l[self.start[i]..self.start[i + 1]];
            for (k, a) in row.iter().enumerate() {
                y[fi + k] -= a * yi;
            }
        }
        for i in 0..n {
            b[self.perm[i]] = y[i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
