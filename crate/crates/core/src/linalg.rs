//! Dense integer matrices over an exact ring.
//!
//! Everything here is generic over [`Scalar`], which any signed integer type
//! from `num-traits`/`num-integer` satisfies (`i64`, `i128`, `BigInt`). The
//! crate itself works with [`crate::Int`]; fixed-width types are useful in
//! tests where overflow cannot happen.
//!
//! The central routine is [`Matrix::echelon`], a row Hermite form that also
//! returns the unimodular transform. Kernels, inverses and sublattice
//! coordinates are all read off from it, which keeps every result saturated.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact signed integer scalar.
pub trait Scalar: Clone + fmt::Debug + Integer + Signed {}

impl<T: Clone + fmt::Debug + Integer + Signed> Scalar for T {}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

/// Row Hermite form `h = u * a` with `u` unimodular.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    pub h: Matrix<T>,
    pub u: Matrix<T>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<T>], height: usize) -> Self {
        Self::from_fn(height, cols.len(), |i, j| cols[j][i].clone())
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

    pub fn row(&self, i: usize) -> Vec<T> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<T>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn select_rows(&self, range: std::ops::Range<usize>) -> Self {
        Self::from_fn(range.len(), self.cols, |i, j| self[(range.start + i, j)].clone())
    }

    pub fn select_cols(&self, range: std::ops::Range<usize>) -> Self {
        Self::from_fn(self.rows, range.len(), |i, j| self[(i, range.start + j)].clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = &self[(i, j)];
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows).map(|i| dot(&self.data[i * self.cols..(i + 1) * self.cols], v)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + other[(i, j)].clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * s.clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    /// Non-negative power of a square matrix.
    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power; negative exponents need a unimodular matrix.
    pub fn pow_signed(&self, e: i64) -> Option<Self> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            self.inverse().map(|inv| inv.pow(e.unsigned_abs()))
        }
    }

    /// Fraction-free (Bareiss) determinant.
    pub fn determinant(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut a = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return T::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = a[(i, j)].clone() * a[(k, k)].clone() - a[(i, k)].clone() * a[(k, j)].clone();
                    a[(i, j)] = v / prev.clone();
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Row Hermite normal form with transform: pivots positive, entries
    /// above each pivot reduced into `[0, pivot)`.
    pub fn echelon(&self) -> Echelon<T> {
        let m = self.rows;
        let mut h = self.clone();
        let mut u = Self::identity(m);
        let mut r = 0;
        let mut pivots = Vec::new();
        for c in 0..self.cols {
            if r == m {
                break;
            }
            for i in r + 1..m {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let a = h[(r, c)].clone();
                let b = h[(i, c)].clone();
                let eg = a.extended_gcd(&b);
                let (mut g, mut x, mut y) = (eg.gcd, eg.x, eg.y);
                if g.is_negative() {
                    g = -g;
                    x = -x;
                    y = -y;
                }
                let p = -(b / g.clone());
                let q = a / g;
                combine_rows(&mut h, r, i, &x, &y, &p, &q);
                combine_rows(&mut u, r, i, &x, &y, &p, &q);
            }
            if h[(r, c)].is_zero() {
                continue;
            }
            if h[(r, c)].is_negative() {
                negate_row(&mut h, r);
                negate_row(&mut u, r);
            }
            let piv = h[(r, c)].clone();
            for i in 0..r {
                let q = h[(i, c)].div_floor(&piv);
                if !q.is_zero() {
                    sub_row_multiple(&mut h, i, r, &q);
                    sub_row_multiple(&mut u, i, r, &q);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { h, u, rank: r, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank
    }

    /// Inverse over the integers, if the matrix is unimodular.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let e = self.echelon();
        if e.h.is_identity() {
            Some(e.u)
        } else {
            None
        }
    }

    /// Saturated basis of `{v : self * v = 0}`, one vector per column.
    pub fn right_kernel(&self) -> Self {
        let e = self.transpose().echelon();
        let n = self.cols;
        e.u.select_rows(e.rank..n).transpose()
    }

    /// Saturated basis of `{u : u^T * self = 0}`, one vector per column.
    pub fn left_kernel(&self) -> Self {
        self.transpose().right_kernel()
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `(row_r, row_i) <- (x*row_r + y*row_i, p*row_r + q*row_i)`.
fn combine_rows<T: Scalar>(m: &mut Matrix<T>, r: usize, i: usize, x: &T, y: &T, p: &T, q: &T) {
    for j in 0..m.cols {
        let a = m[(r, j)].clone();
        let b = m[(i, j)].clone();
        m[(r, j)] = x.clone() * a.clone() + y.clone() * b.clone();
        m[(i, j)] = p.clone() * a + q.clone() * b;
    }
}

fn negate_row<T: Scalar>(m: &mut Matrix<T>, r: usize) {
    for j in 0..m.cols {
        m[(r, j)] = -m[(r, j)].clone();
    }
}

fn sub_row_multiple<T: Scalar>(m: &mut Matrix<T>, target: usize, src: usize, q: &T) {
    for j in 0..m.cols {
        let v = m[(src, j)].clone() * q.clone();
        m[(target, j)] = m[(target, j)].clone() - v;
    }
}

pub fn vec_dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    dot(a, b)
}

pub fn vec_add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vec_sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vec_scale<T: Scalar>(a: &[T], s: &T) -> Vec<T> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn unit_vector<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:?}", self.data[i * self.cols + j])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A saturated sublattice of `Z^n` with a coordinate chart.
///
/// `basis` has the generators as columns; `coords * basis = I`, and a vector
/// `x` lies in the sublattice iff `complement * x = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice<T> {
    pub basis: Matrix<T>,
    pub coords: Matrix<T>,
    pub complement: Matrix<T>,
}

impl<T: Scalar> Sublattice<T> {
    /// Returns `None` when the columns are dependent or do not span a
    /// saturated sublattice.
    pub fn from_basis(basis: Matrix<T>) -> Option<Self> {
        let n = basis.rows();
        let r = basis.cols();
        let e = basis.echelon();
        if e.rank != r || !e.h.select_rows(0..r).is_identity() {
            return None;
        }
        Some(Sublattice { coords: e.u.select_rows(0..r), complement: e.u.select_rows(r..n), basis })
    }

    pub fn ambient_rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.complement.mul_vec(x).iter().all(Zero::is_zero)
    }

    /// Coordinates of `x`, or `None` if it lies outside.
    pub fn coordinates(&self, x: &[T]) -> Option<Vec<T>> {
        self.contains(x).then(|| self.coords.mul_vec(x))
    }

    pub fn embed(&self, c: &[T]) -> Vec<T> {
        self.basis.mul_vec(c)
    }

    /// Matrix of `op` in sublattice coordinates, if `op` preserves it.
    pub fn restrict(&self, op: &Matrix<T>) -> Option<Matrix<T>> {
        let image = op.mul(&self.basis);
        if !self.complement.mul(&image).is_zero() {
            return None;
        }
        Some(self.coords.mul(&image))
    }

    /// Matrix of `op` from `domain` into `self`, if the image lies in `self`.
    pub fn restrict_between(&self, op: &Matrix<T>, domain: &Sublattice<T>) -> Option<Matrix<T>> {
        let image = op.mul(&domain.basis);
        if !self.complement.mul(&image).is_zero() {
            return None;
        }
        Some(self.coords.mul(&image))
    }

    /// Gram matrix of a bilinear form restricted to the sublattice.
    pub fn restrict_form(&self, gram: &Matrix<T>) -> Matrix<T> {
        self.basis.transpose().mul(gram).mul(&self.basis)
    }
}

/// Unique solution of `a x = b` over the rationals, or `None` if the system
/// is inconsistent or underdetermined.
pub fn solve_rational<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<Ratio<T>>> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    let mut aug: Vec<Vec<Ratio<T>>> = (0..m)
        .map(|i| {
            let mut row: Vec<Ratio<T>> = a.row(i).into_iter().map(Ratio::from_integer).collect();
            row.push(Ratio::from_integer(b[i].clone()));
            row
        })
        .collect();
    let mut r = 0;
    let mut pivot_cols = Vec::new();
    for c in 0..n {
        let Some(p) = (r..m).find(|&i| !aug[i][c].is_zero()) else { continue };
        aug.swap(r, p);
        let pv = aug[r][c].clone();
        for v in aug[r].iter_mut() {
            *v = v.clone() / pv.clone();
        }
        let pivot_row = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x = x.clone() - p.clone() * f.clone();
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
        if r == m {
            break;
        }
    }
    if aug[r..].iter().any(|row| !row[n].is_zero()) || pivot_cols.len() < n {
        return None;
    }
    let mut x = vec![Ratio::zero(); n];
    for (i, &c) in pivot_cols.iter().enumerate() {
        x[c] = aug[i][n].clone();
    }
    Some(x)
}

/// Solves `u x = b` for upper unitriangular `u`.
pub fn solve_upper_unitriangular<T: Scalar>(u: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = u.rows();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for j in i + 1..n {
            s = s - u[(i, j)].clone() * x[j].clone();
        }
        x[i] = s;
    }
    x
}

/// Solves `l x = b` for lower unitriangular `l`.
pub fn solve_lower_unitriangular<T: Scalar>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = vec![T::zero(); n];
    for i in 0..n {
        let mut s = b[i].clone();
        for j in 0..i {
            s = s - l[(i, j)].clone() * x[j].clone();
        }
        x[i] = s;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: Vec<Vec<i64>>) -> Matrix<i64> {
        Matrix::from_rows(rows)
    }

    #[test]
    fn determinant_small_cases() {
        assert_eq!(m(vec![vec![2, 1], vec![7, 4]]).determinant(), 1);
        assert_eq!(m(vec![vec![0, 1], vec![1, 0]]).determinant(), -1);
        assert_eq!(m(vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]).determinant(), 0);
        assert_eq!(Matrix::<i64>::zeros(0, 0).determinant(), 1);
    }

    #[test]
    fn inverse_of_unimodular() {
        let a = m(vec![vec![2, 1], vec![7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(vec![vec![4, -1], vec![-7, 2]]));
        assert!(m(vec![vec![2, 0], vec![0, 1]]).inverse().is_none());
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of (2 4) is spanned by (2,-1), not a multiple of it
        let a = m(vec![vec![2, 4]]);
        let k = a.right_kernel();
        assert_eq!(k.cols(), 1);
        let v = k.col(0);
        assert!(v == vec![2, -1] || v == vec![-2, 1]);
    }

    #[test]
    fn sublattice_rejects_non_saturated() {
        assert!(Sublattice::from_basis(m(vec![vec![2], vec![0]])).is_none());
        let s = Sublattice::from_basis(m(vec![vec![1], vec![1]])).unwrap();
        assert!(s.contains(&[3, 3]));
        assert!(!s.contains(&[1, 0]));
        assert_eq!(s.coordinates(&[3, 3]), Some(vec![3]));
    }

    #[test]
    fn rational_solve_detects_underdetermined() {
        let a = m(vec![vec![1, 1]]);
        assert!(solve_rational(&a, &[1]).is_none());
        let a = m(vec![vec![2, 0], vec![0, 3]]);
        let x = solve_rational(&a, &[1, 1]).unwrap();
        assert_eq!(x, vec![Ratio::new(1, 2), Ratio::new(1, 3)]);
    }

    fn small_matrix(r: usize, c: usize) -> impl Strategy<Value = Matrix<i64>> {
        proptest::collection::vec(-6i64..=6, r * c).prop_map(move |d| Matrix::from_fn(r, c, |i, j| d[i * c + j]))
    }

    proptest! {
        #[test]
        fn echelon_transform_is_unimodular(a in small_matrix(4, 5)) {
            let e = a.echelon();
            prop_assert_eq!(e.u.mul(&a), e.h.clone());
            prop_assert_eq!(e.u.determinant().abs(), 1);
        }

        #[test]
        fn kernel_vectors_annihilate(a in small_matrix(3, 5)) {
            let k = a.right_kernel();
            prop_assert!(a.mul(&k).is_zero());
            prop_assert_eq!(k.cols() + a.rank(), 5);
        }

        #[test]
        fn determinant_is_multiplicative(a in small_matrix(3, 3), b in small_matrix(3, 3)) {
            prop_assert_eq!(a.mul(&b).determinant(), a.determinant() * b.determinant());
        }
    }
}
