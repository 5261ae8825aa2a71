//! Dense row-major matrices over a [`Scalar`].

use std::ops::{Index, IndexMut};

use crate::scalar::{Mode, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(entries: &[S]) -> Self {
        let n = entries.len();
        Self::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { S::zero() })
    }

    /// `u vᵀ`.
    pub fn outer(u: &[S], v: &[S]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i].clone() * v[j].clone())
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map(|a| a.clone() * c.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(self.rows), |acc, _| acc.matmul(self))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.to_f64().abs()))
    }

    /// Entrywise zero test: literal in exact mode, `tol * (1 + scale)` in float mode.
    pub fn is_negligible(&self, tol: f64, scale: f64) -> bool {
        self.data.iter().all(|v| v.is_negligible(tol, scale))
    }

    /// Entrywise comparison with the mode's tolerance rule, scaled by the larger operand.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let scale = self.max_abs().max(other.max_abs());
        self.sub(other).is_negligible(tol, scale)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square() && self.approx_eq(&self.transpose(), tol)
    }

    pub fn rank(&self, tol: f64) -> usize {
        S::rank(self, tol)
    }

    /// Gauss–Jordan inverse; `None` when singular (to tolerance in float mode).
    pub fn inverse(&self, tol: f64) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n)
                .filter(|&i| !a[(i, c)].is_zero())
                .max_by(|&i, &j| {
                    a[(i, c)].to_f64().abs().total_cmp(&a[(j, c)].to_f64().abs())
                })?;
            if S::MODE == Mode::Float64 && a[(p, c)].to_f64().abs() <= tol * scale {
                return None;
            }
            a.swap_rows(c, p);
            inv.swap_rows(c, p);
            let piv = a[(c, c)].clone();
            for j in 0..n {
                a[(c, j)] = a[(c, j)].clone() / piv.clone();
                inv[(c, j)] = inv[(c, j)].clone() / piv.clone();
            }
            for i in 0..n {
                if i == c || a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone();
                for j in 0..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                    a[(i, j)] = v;
                    let w = inv[(i, j)].clone() - f.clone() * inv[(c, j)].clone();
                    inv[(i, j)] = w;
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination.
    pub fn determinant(&self) -> S {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for c in 0..n {
            let Some(p) = (c..n).filter(|&i| !a[(i, c)].is_zero()).max_by(|&i, &j| {
                a[(i, c)].to_f64().abs().total_cmp(&a[(j, c)].to_f64().abs())
            }) else {
                return S::zero();
            };
            if p != c {
                a.swap_rows(c, p);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det = det * piv.clone();
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = a[(i, c)].clone() / piv.clone();
                for j in c..n {
                    let v = a[(i, j)].clone() - f.clone() * a[(c, j)].clone();
                    a[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Leading `k × k` principal submatrix.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)].clone())
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.cols + j]
    }
}

/// `Σ u_i v_i`.
pub fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    u.iter().zip(v).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn inverse_round_trips_exactly() {
        let m = Matrix::from_rows(vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(3, 1), q(1, 2)],
            vec![q(0, 1), q(1, 2), q(1, 1)],
        ]);
        let inv = m.inverse(0.0).unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(3));
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]);
        assert!(m.inverse(0.0).is_none());
        assert_eq!(m.determinant(), q(0, 1));
        let f = m.convert(|v| v.to_f64());
        assert!(f.inverse(1e-9).is_none());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = Matrix::from_rows(vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(0, 1), q(4, 1), q(5, 1)],
            vec![q(1, 1), q(0, 1), q(6, 1)],
        ]);
        // 1*(24-0) - 2*(0-5) + 3*(0-4) = 22
        assert_eq!(m.determinant(), q(22, 1));
    }

    #[test]
    fn exact_and_float_rank_agree_on_simple_cases() {
        let m = Matrix::from_rows(vec![
            vec![q(1, 1), q(2, 1), q(3, 1)],
            vec![q(2, 1), q(4, 1), q(6, 1)],
            vec![q(1, 1), q(0, 1), q(1, 1)],
        ]);
        assert_eq!(m.rank(0.0), 2);
        assert_eq!(m.convert(|v| v.to_f64()).rank(1e-9), 2);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let m = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]);
        let ns = Rational::nullspace(&m, 0.0);
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|v| *v == q(0, 1)));
        let f = m.convert(|v| v.to_f64());
        let nf = f64::nullspace(&f, 1e-9);
        assert_eq!(nf.len(), 1);
        assert!(f.mul_vec(&nf[0]).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let m = Matrix::from_rows(vec![vec![q(1, 1)], vec![q(1, 1)]]);
        assert!(Rational::solve(&m, &[q(1, 1), q(2, 1)], 0.0).is_none());
        assert_eq!(Rational::solve(&m, &[q(3, 1), q(3, 1)], 0.0), Some(vec![q(3, 1)]));
        let f = m.convert(|v| v.to_f64());
        assert!(f64::solve(&f, &[1.0, 2.0], 1e-9).is_none());
    }
}
