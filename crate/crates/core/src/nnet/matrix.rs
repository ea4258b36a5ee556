use rand::Rng;
use serde::{Deserialize, Serialize};

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix { rows: rows.len(), cols, data }
    }

    /// Entries drawn from `U(-bound, bound)`.
    pub fn uniform<R: Rng + ?Sized>(rows: usize, cols: usize, bound: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| rng.random_range(-bound..bound)).collect();
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// `self[:, col0..col0+x.len()] · x`
    pub fn matvec_block(&self, col0: usize, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            *o = dot(&self.row(r)[col0..col0 + x.len()], x);
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows];
        self.matvec_block(0, x, &mut out);
        out
    }

    /// `out += self[:, col0..col0+out.len()]ᵀ · y`
    pub fn add_matvec_t_block(&self, col0: usize, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                axpy(yr, &self.row(r)[col0..col0 + out.len()], out);
            }
        }
    }

    /// `self[:, col0..col0+x.len()] += y ⊗ x`
    pub fn add_outer_block(&mut self, col0: usize, y: &[f64], x: &[f64]) {
        debug_assert_eq!(y.len(), self.rows);
        for (r, &yr) in y.iter().enumerate() {
            if yr != 0.0 {
                axpy(yr, x, &mut self.row_mut(r)[col0..col0 + x.len()]);
            }
        }
    }

    /// `emb · self[:, col0..col0+d]ᵀ` for `emb` of width `d`: every row of
    /// `emb` pushed through one column block.
    pub fn project_rows_block(&self, col0: usize, emb: &Matrix) -> Matrix {
        let (n, d, h) = (emb.rows, emb.cols, self.rows);
        assert!(col0 + d <= self.cols, "column block out of range");
        let mut out = Matrix::zeros(n, h);
        if n == 0 || d == 0 || h == 0 {
            return out;
        }
        // SAFETY: shapes and strides are checked above; the largest index read
        // from `self` is (h-1)·cols + col0 + d-1 < rows·cols.
        unsafe {
            matrixmultiply::dgemm(
                n, d, h, 1.0,
                emb.data.as_ptr(), d as isize, 1,
                self.data.as_ptr().add(col0), 1, self.cols as isize,
                0.0,
                out.data.as_mut_ptr(), h as isize, 1,
            );
        }
        out
    }

    /// `self[:, col0..col0+d] += gᵀ · emb`, with `g` of width `self.rows`.
    pub fn add_gram_block(&mut self, col0: usize, g: &Matrix, emb: &Matrix) {
        let (n, d, h) = (emb.rows, emb.cols, self.rows);
        assert!(col0 + d <= self.cols && g.rows == n && g.cols == h, "shape mismatch");
        if n == 0 || d == 0 || h == 0 {
            return;
        }
        // SAFETY: shapes checked above.
        unsafe {
            matrixmultiply::dgemm(
                h, n, d, 1.0,
                g.data.as_ptr(), 1, h as isize,
                emb.data.as_ptr(), d as isize, 1,
                1.0,
                self.data.as_mut_ptr().add(col0), self.cols as isize, 1,
            );
        }
    }

    /// `out += g · self[:, col0..col0+out.cols]`.
    pub fn add_back_block(&self, col0: usize, g: &Matrix, out: &mut Matrix) {
        let (n, d, h) = (out.rows, out.cols, self.rows);
        assert!(col0 + d <= self.cols && g.rows == n && g.cols == h, "shape mismatch");
        if n == 0 || d == 0 || h == 0 {
            return;
        }
        // SAFETY: shapes checked above.
        unsafe {
            matrixmultiply::dgemm(
                n, h, d, 1.0,
                g.data.as_ptr(), h as isize, 1,
                self.data.as_ptr().add(col0), self.cols as isize, 1,
                1.0,
                out.data.as_mut_ptr(), d as isize, 1,
            );
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// `ln(softmax(logits)[k])` without forming the probabilities.
pub fn log_softmax_at(logits: &[f64], k: usize) -> f64 {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|&l| (l - max).exp()).sum::<f64>().ln();
    logits[k] - lse
}
