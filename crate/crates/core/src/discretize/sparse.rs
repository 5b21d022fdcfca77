use alloc::vec::Vec;

/// Symmetric sparse matrix storing the upper triangle (diagonal included) in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSymMatrix {
    /// Sums `(i, j, v)` contributions; entries below the diagonal are mirrored up.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(u32, u32, f64)>) -> Self {
        for t in triplets.iter_mut() {
            if t.0 > t.1 {
                core::mem::swap(&mut t.0, &mut t.1);
            }
        }
        // Stable sort keeps the summation order of duplicates deterministic.
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_start = alloc::vec![0usize; dim + 1];
        let mut cols = Vec::new();
        let mut vals: Vec<f64> = Vec::new();
        let mut last = None;
        for (i, j, v) in triplets {
            assert!((j as usize) < dim, "triplet index out of range");
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_start[i as usize + 1] += 1;
                last = Some((i, j));
            }
        }
        for k in 0..dim {
            row_start[k + 1] += row_start[k];
        }
        Self {
            dim,
            row_start,
            cols,
            vals,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&alloc::vec![1.0; dim])
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        Self::from_triplets(
            d.len(),
            d.iter().enumerate().map(|(i, &v)| (i as u32, i as u32, v)).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Stored (upper-triangle) nonzeros.
    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Upper-triangle entries `(j, a_ij)` of row `i`, `j ≥ i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.vals[r])
            .map(|(&j, &v)| (j as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let r = self.row_start[i]..self.row_start[i + 1];
        match self.cols[r.clone()].binary_search(&(j as u32)) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for (j, v) in self.row(i) {
                acc += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
            y[i] += acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = alloc::vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A y`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.mul_vec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    /// `A + s B` over the union of both patterns.
    pub fn add_scaled(&self, s: f64, other: &SparseSymMatrix) -> SparseSymMatrix {
        assert_eq!(self.dim, other.dim);
        let mut t = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.dim {
            t.extend(self.row(i).map(|(j, v)| (i as u32, j as u32, v)));
            t.extend(other.row(i).map(|(j, v)| (i as u32, j as u32, s * v)));
        }
        SparseSymMatrix::from_triplets(self.dim, t)
    }

    /// Full dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = alloc::vec![alloc::vec![0.0; self.dim]; self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        d
    }

    /// Row sums of the full symmetric matrix.
    pub fn row_sums(&self) -> Vec<f64> {
        self.mul_vec(&alloc::vec![1.0; self.dim])
    }
}
