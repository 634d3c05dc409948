//! Small dense least-squares solver (Householder QR with column pivoting).

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// Relative threshold under which a pivot is treated as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Matrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }
}

/// Minimizes `‖A x − b‖₂`. Columns that are numerically dependent on earlier
/// pivots get a zero coefficient.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Vec<f64> {
    assert_eq!(a.rows(), b.len());
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut norms: Vec<f64> = (0..n).map(|j| sq_norm(r.col(j))).collect();
    let steps = m.min(n);
    let mut rank = 0;
    let mut first_pivot = 0.0;

    for k in 0..steps {
        // pivot on the largest remaining column
        let p = (k..n)
            .max_by(|&x, &y| norms[x].total_cmp(&norms[y]))
            .unwrap_or(k);
        if p != k {
            for i in 0..m {
                let (u, v) = (r.get(i, k), r.get(i, p));
                r.set(i, k, v);
                r.set(i, p, u);
            }
            norms.swap(k, p);
            perm.swap(k, p);
        }
        let alpha = math::sqrt((k..m).map(|i| r.get(i, k) * r.get(i, k)).sum());
        if k == 0 {
            first_pivot = alpha;
        }
        if alpha == 0.0 || alpha <= RANK_TOLERANCE * first_pivot {
            break;
        }
        let sign = if r.get(k, k) >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = (k..m).map(|i| r.get(i, k)).collect();
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k..n {
                let dot: f64 = (k..m).map(|i| v[i - k] * r.get(i, j)).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..m {
                    let val = r.get(i, j) - f * v[i - k];
                    r.set(i, j, val);
                }
            }
            let dot: f64 = (k..m).map(|i| v[i - k] * rhs[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                rhs[i] -= f * v[i - k];
            }
        }
        for (j, norm) in norms.iter_mut().enumerate().skip(k + 1) {
            *norm = (k + 1..m).map(|i| r.get(i, j) * r.get(i, j)).sum();
        }
        rank = k + 1;
    }

    let mut z = vec![0.0; n];
    for k in (0..rank).rev() {
        let mut s = rhs[k];
        for j in k + 1..rank {
            s -= r.get(k, j) * z[j];
        }
        z[k] = s / r.get(k, k);
    }
    let mut x = vec![0.0; n];
    for (k, &p) in perm.iter().enumerate() {
        x[p] = z[k];
    }
    x
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Linear model `intercept + Σ coef·x`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(c, v)| c * v)
                .sum::<f64>()
    }
}

/// Weighted least squares with an intercept. Weights must be nonnegative.
pub fn weighted_least_squares(x: &[Vec<f64>], y: &[f64], w: &[f64]) -> LinearModel {
    assert_eq!(x.len(), y.len());
    assert_eq!(x.len(), w.len());
    let p = x.first().map_or(0, Vec::len);
    let mut a = Matrix::zeros(x.len(), p + 1);
    let mut b = vec![0.0; x.len()];
    for (i, ((row, &yi), &wi)) in x.iter().zip(y).zip(w).enumerate() {
        let s = math::sqrt(wi.max(0.0));
        a.set(i, 0, s);
        for (j, &v) in row.iter().enumerate() {
            a.set(i, j + 1, s * v);
        }
        b[i] = s * yi;
    }
    let beta = least_squares(&a, &b);
    LinearModel {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
    }
}
