//! Small dense matrices over [`Scalar`].
//!
//! Exact matrices pivot on the first nonzero entry; float matrices pivot on
//! the largest modulus and treat `|x| ≤ tol` as zero.

use crate::scalar::{Mode, Scalar};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, mode: Mode) -> Matrix {
        Matrix { rows, cols, data: vec![Scalar::zero(mode); rows * cols] }
    }

    pub fn identity(n: usize, mode: Mode) -> Matrix {
        let mut m = Matrix::zeros(n, n, mode);
        for i in 0..n {
            m.set(i, i, Scalar::one(mode));
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = self.get(i, 0) * other.get(0, j);
                for k in 1..self.cols {
                    acc.add_assign_ref(&(self.get(i, k) * other.get(k, j)));
                }
                out.push(acc);
            }
        }
        Matrix { rows: self.rows, cols: other.cols, data: out }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        let mut out = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.get(i, j).conj());
            }
        }
        Matrix { rows: self.cols, cols: self.rows, data: out }
    }

    fn pivot_row(&self, col: usize, from: usize, tol: f64) -> Option<usize> {
        let candidates = (from..self.rows).filter(|&r| !self.get(r, col).is_zero_tol(tol));
        if tol == 0.0 {
            candidates.into_iter().next()
        } else {
            candidates.max_by(|&a, &b| self.get(a, col).abs().total_cmp(&self.get(b, col).abs()))
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Row-reduces in place to echelon form; returns pivot columns and the
    /// number of row swaps.
    fn echelon(&mut self, tol: f64) -> (Vec<usize>, usize) {
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut r = 0;
        for col in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = self.pivot_row(col, r, tol) else { continue };
            if p != r {
                self.swap_rows(p, r);
                swaps += 1;
            }
            let inv = self.get(r, col).inv();
            for below in r + 1..self.rows {
                let f = self.get(below, col) * &inv;
                if f.is_zero_tol(0.0) {
                    continue;
                }
                for j in col..self.cols {
                    let v = self.get(below, j) - &(&f * self.get(r, j));
                    self.set(below, j, v);
                }
            }
            pivots.push(col);
            r += 1;
        }
        (pivots, swaps)
    }

    /// Rank by row reduction with pivot threshold `tol` (`0` means exact).
    pub fn rank(&self, tol: f64) -> usize {
        let mut m = self.clone();
        m.echelon(tol).0.len()
    }

    /// Determinant of a square matrix.
    pub fn det(&self, mode: Mode) -> Scalar {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let mut m = self.clone();
        let (pivots, swaps) = m.echelon(mode.tol());
        if pivots.len() < self.rows {
            return Scalar::zero(mode);
        }
        let mut d = Scalar::one(mode);
        for i in 0..self.rows {
            d = &d * m.get(i, i);
        }
        if swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Inverse of a square matrix, `None` when singular at tolerance `tol`.
    pub fn inverse(&self, tol: f64) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mode = if self.data.iter().all(Scalar::is_exact) { Mode::Exact } else { Mode::Float { tol } };
        let mut aug = Matrix::zeros(n, 2 * n, mode);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, Scalar::one(mode));
        }
        for col in 0..n {
            let p = aug.pivot_row(col, col, tol)?;
            aug.swap_rows(p, col);
            let inv = aug.get(col, col).inv();
            for j in 0..2 * n {
                let v = aug.get(col, j) * &inv;
                aug.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = aug.get(r, col).clone();
                if f.is_zero_tol(0.0) {
                    continue;
                }
                for j in 0..2 * n {
                    let v = aug.get(r, j) - &(&f * aug.get(col, j));
                    aug.set(r, j, v);
                }
            }
        }
        let mut out = Matrix::zeros(n, n, mode);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, aug.get(i, n + j).clone());
            }
        }
        Some(out)
    }
}

/// Rank of a list of row vectors.
pub fn rank_of_rows(rows: &[Vec<Scalar>], tol: f64) -> usize {
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(rows.to_vec()).rank(tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> Scalar {
        Scalar::gaussian(re, im, Mode::Exact)
    }

    #[test]
    fn det_of_bracket_rows() {
        let m = Matrix::from_rows(vec![
            vec![g(0, -2), g(0, 0), g(0, 0)],
            vec![g(0, 0), g(0, -4), g(4, 0)],
            vec![g(0, 0), g(0, -4), g(-4, 0)],
        ]);
        assert_eq!(m.det(Mode::Exact), g(64, 0));
    }

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(vec![vec![g(1, 1), g(2, 0)], vec![g(0, 1), g(3, -1)]]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2, Mode::Exact));
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let m = Matrix::from_rows(vec![vec![g(1, 0), g(2, 0)], vec![g(2, 0), g(4, 0)]]);
        assert!(m.inverse(0.0).is_none());
        assert_eq!(m.rank(0.0), 1);
        assert_eq!(m.det(Mode::Exact), g(0, 0));
    }

    #[test]
    fn float_rank_respects_threshold() {
        let f = |x: f64| Scalar::float(x, 0.0);
        let rows = vec![vec![f(1.0), f(0.0)], vec![f(0.0), f(1e-12)]];
        assert_eq!(rank_of_rows(&rows, 1e-9), 1);
        assert_eq!(rank_of_rows(&rows, 1e-14), 2);
        assert_eq!(rank_of_rows(&[], 1e-9), 0);
    }
}
