//! Dense integer matrices with exact Smith normal form.
//!
//! The matrix is generic over the entry ring so the same elimination code
//! serves machine integers in tests and `BigInt` in the cohomology pipeline.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Entry ring for [`Matrix`]: a signed Euclidean domain.
pub trait IntRing: Integer + Signed + Clone + fmt::Debug + fmt::Display {}
impl<T: Integer + Signed + Clone + fmt::Debug + fmt::Display> IntRing for T {}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: IntRing> Matrix<T> {
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

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a.clone() * other[(k, j)].clone();
                    out[(i, j)] = out[(i, j)].clone() + v;
                }
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    pub fn map<U: IntRing>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Submatrix of the given row and column index ranges.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, i) in rows.clone().enumerate() {
            for (b, j) in cols.clone().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut m = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return T::zero();
                };
                m.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m[(i, j)].clone() * m[(k, k)].clone() - m[(i, k)].clone() * m[(k, j)].clone();
                    m[(i, j)] = v / prev.clone();
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &T) {
        for j in 0..self.cols {
            let v = self[(src, j)].clone() * f.clone();
            self[(dst, j)] = self[(dst, j)].clone() + v;
        }
    }

    /// col[dst] += f * col[src]
    fn add_col(&mut self, dst: usize, src: usize, f: &T) {
        for i in 0..self.rows {
            let v = self[(i, src)].clone() * f.clone();
            self[(i, dst)] = self[(i, dst)].clone() + v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -self[(i, j)].clone();
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of a Smith normal form computation: `u * a * v == d`.
#[derive(Clone, Debug)]
pub struct Smith<T> {
    pub u: Matrix<T>,
    pub u_inv: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: IntRing> Smith<T> {
    /// Nonzero diagonal entries in divisibility order.
    pub fn invariant_factors(&self) -> Vec<T> {
        (0..self.d.nrows().min(self.d.ncols()))
            .map(|i| self.d[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form with unimodular transforms.
///
/// The diagonal is nonnegative and satisfies `d[i] | d[i+1]`.
pub fn smith_normal_form<T: IntRing>(a: &Matrix<T>) -> Smith<T> {
    let (m, n) = (a.nrows(), a.ncols());
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut u_inv = Matrix::identity(m);
    let mut v = Matrix::identity(n);

    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero magnitude in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if d[(i, j)].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        let mut clean = true;
        for i in t + 1..m {
            if d[(i, t)].is_zero() {
                continue;
            }
            let q = -(d[(i, t)].div_floor(&d[(t, t)]));
            d.add_row(i, t, &q);
            u.add_row(i, t, &q);
            // inverse: col[t] -= q * col[i]
            u_inv.add_col(t, i, &(-q));
            if !d[(i, t)].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..n {
            if d[(t, j)].is_zero() {
                continue;
            }
            let q = -(d[(t, j)].div_floor(&d[(t, t)]));
            d.add_col(j, t, &q);
            v.add_col(j, t, &q);
            if !d[(t, j)].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let piv = d[(t, t)].clone();
        let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&piv)));
        if let Some(i) = offender {
            let one = T::one();
            d.add_row(t, i, &one);
            u.add_row(t, i, &one);
            u_inv.add_col(i, t, &(-one));
            continue;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            // inverse of a row negation is the same column negation
            for r in 0..m {
                u_inv[(r, t)] = -u_inv[(r, t)].clone();
            }
        }
        t += 1;
    }
    Smith { u, u_inv, d, v }
}

/// Rank over the rationals.
pub fn rank<T: IntRing>(a: &Matrix<T>) -> usize {
    smith_normal_form(a).rank()
}

/// Converts an `i64` matrix to arbitrary precision.
pub fn to_big(a: &Matrix<i64>) -> Matrix<BigInt> {
    a.map(|&x| BigInt::from(x))
}

/// Characteristic polynomial `det(xI - A)` by the Faddeev-LeVerrier recursion,
/// returned low-to-high with a leading coefficient of one.
pub fn char_poly(a: &Matrix<BigInt>) -> Vec<BigInt> {
    assert!(a.is_square());
    let n = a.nrows();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut mk = Matrix::<BigInt>::zeros(n, n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = a.mul(&mk);
        for i in 0..n {
            next[(i, i)] = next[(i, i)].clone() + coeffs[n - k + 1].clone();
        }
        let tr = a.mul(&next).trace();
        let c = -(tr / BigInt::from(k));
        coeffs[n - k] = c;
        mk = next;
    }
    coeffs
}

/// Solves `x * basis = target` for an integer row vector `x`, returning `None`
/// when no rational solution exists or the solution is not integral.
pub fn solve_left_integral(basis: &Matrix<BigInt>, target: &[BigInt]) -> Option<Vec<BigInt>> {
    // Gaussian elimination over Q on the transposed system basis^T x^T = target^T
    let r = basis.nrows();
    let c = basis.ncols();
    assert_eq!(target.len(), c);
    let mut aug: Vec<Vec<BigRational>> = (0..c)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..r).map(|i| BigRational::from(basis[(i, j)].clone())).collect();
            row.push(BigRational::from(target[j].clone()));
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..c).find(|&i| !aug[i][col].is_zero()) else { continue };
        aug.swap(row, p);
        let inv = aug[row][col].recip();
        for v in aug[row].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for i in 0..c {
            if i != row && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                for k in 0..=r {
                    let s = aug[row][k].clone() * f.clone();
                    aug[i][k] = aug[i][k].clone() - s;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if aug[row..].iter().any(|rw| !rw[r].is_zero()) {
        return None;
    }
    let mut x = vec![BigInt::zero(); r];
    for (i, &col) in pivots.iter().enumerate() {
        let v = &aug[i][r];
        if !v.is_integer() {
            return None;
        }
        x[col] = v.to_integer();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> Matrix<i64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    fn check_smith(a: &Matrix<i64>) -> Smith<i64> {
        let s = smith_normal_form(a);
        assert_eq!(s.u.mul(a).mul(&s.v), s.d);
        assert_eq!(s.u.mul(&s.u_inv), Matrix::identity(a.nrows()));
        assert_eq!(s.u.det().abs(), 1);
        assert_eq!(s.v.det().abs(), 1);
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert_eq!(w[1] % w[0], 0);
        }
        for i in 0..s.d.nrows() {
            for j in 0..s.d.ncols() {
                if i != j {
                    assert_eq!(s.d[(i, j)], 0);
                }
            }
        }
        s
    }

    #[test]
    fn smith_two_by_two() {
        let s = check_smith(&m(&[&[2, 4], &[6, 8]]));
        assert_eq!(s.invariant_factors(), vec![2, 4]);
    }

    #[test]
    fn smith_identity_and_zero() {
        let s = check_smith(&Matrix::identity(3));
        assert_eq!(s.d, Matrix::identity(3));
        let z = check_smith(&m(&[&[0]]));
        assert_eq!(z.d, m(&[&[0]]));
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn smith_rectangular_and_divisibility() {
        let s = check_smith(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors(), vec![1, 6]);
        let s = check_smith(&m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]));
        assert_eq!(s.invariant_factors(), vec![1, 3]);
        check_smith(&m(&[&[-1, 1, 0], &[0, -1, 1], &[1, 0, -1], &[2, 2, 2]]));
    }

    #[test]
    fn det_and_char_poly() {
        assert_eq!(m(&[&[1, 1], &[1, 0]]).det(), -1);
        assert_eq!(m(&[&[0, 2, 1], &[1, 0, 3], &[4, 1, 0]]).det(), 25);
        let cp = char_poly(&to_big(&m(&[&[1, 1], &[1, 0]])));
        assert_eq!(cp, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        let cp = char_poly(&to_big(&m(&[&[2, 0, 0], &[0, 3, 0], &[0, 0, 0]])));
        // x (x-2)(x-3) = x^3 - 5x^2 + 6x
        assert_eq!(cp, [0, 6, -5, 1].iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
    }

    #[test]
    fn left_solve() {
        let b = to_big(&m(&[&[1, 0, 1], &[0, 2, 2]]));
        let t: Vec<BigInt> = [3, 4, 7].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(solve_left_integral(&b, &t), Some(vec![BigInt::from(3), BigInt::from(2)]));
        let t: Vec<BigInt> = [0, 1, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert_eq!(solve_left_integral(&b, &t), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn smith_contract(rows in 1usize..5, cols in 1usize..5, seed in proptest::collection::vec(-6i64..7, 25)) {
                let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
                let a = Matrix::from_rows(data);
                let s = check_smith(&a);
                if a.is_square() {
                    let prod: i64 = (0..rows).map(|i| s.d[(i, i)]).product();
                    prop_assert_eq!(prod, a.det().abs());
                }
            }
        }
    }
}
