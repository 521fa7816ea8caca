use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{HomalgError, Result};

/// Dense matrix over the integers, row-major.
///
/// Every differential, inclusion and transform in the crate lives here.
/// Entries are arbitrary precision: normal-form intermediates overflow any
/// fixed width long before the inputs look big.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from rows of machine integers. Test and fixture helper.
    pub fn from_rows(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self[(i, j)].is_one()
                    } else {
                        self[(i, j)].is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(HomalgError::Shape(format!(
                "add {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| {
            &self[(i, j)] + &other[(i, j)]
        }))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(HomalgError::Shape(format!(
                "mul {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
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
                        let prod = a * b;
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * k)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(HomalgError::Shape(format!(
                "mul_vec {}x{} with vec of len {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() && !v[j].is_zero() {
                    out[i] += &self[(i, j)] * &v[j];
                }
            }
        }
        Ok(out)
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[BigInt]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i].clone();
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(HomalgError::Shape(format!(
                "hstack {} rows with {} rows",
                self.rows, other.rows
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        }))
    }

    /// Vertical concatenation, `self` on top.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(HomalgError::Shape(format!(
                "vstack {} cols with {} cols",
                self.cols, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        }))
    }

    /// Block diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &Self) -> Self {
        Self::from_fn(
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => other[(i - self.rows, j - self.cols)].clone(),
                _ => BigInt::zero(),
            },
        )
    }

    pub fn submatrix(&self, row_range: std::ops::Range<usize>, col_range: std::ops::Range<usize>) -> Self {
        Self::from_fn(row_range.len(), col_range.len(), |i, j| {
            self[(row_range.start + i, col_range.start + j)].clone()
        })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])].clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(rows.len(), self.cols, |i, j| self[(rows[i], j)].clone())
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.entries.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.rows {
            self.entries.swap(k * self.cols + i, k * self.cols + j);
        }
    }

    /// row[i] += k * row[j]
    pub fn add_row_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for col in 0..self.cols {
            let delta = &self[(j, col)] * k;
            self[(i, col)] += delta;
        }
    }

    /// col[i] += k * col[j]
    pub fn add_col_multiple(&mut self, i: usize, j: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for row in 0..self.rows {
            let delta = &self[(row, j)] * k;
            self[(row, i)] += delta;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for col in 0..self.cols {
            let v = -self[(i, col)].clone();
            self[(i, col)] = v;
        }
    }

    pub fn negate_col(&mut self, j: usize) {
        for row in 0..self.rows {
            let v = -self[(row, j)].clone();
            self[(row, j)] = v;
        }
    }

    pub fn max_abs(&self) -> BigInt {
        self.entries
            .iter()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if self.rows != self.cols {
            return Err(HomalgError::Shape(format!(
                "det of non-square {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(k, k)] * &a[(i, j)] - &a[(i, k)] * &a[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division must be exact");
                    a[(i, j)] = q;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * a[(n - 1, n - 1)].clone())
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Quotient of `a` by `b` rounded to the nearest integer (ties toward floor).
/// Used as the reduction step in normal-form eliminations to keep entries small.
pub(crate) fn quo_round(a: &BigInt, b: &BigInt) -> BigInt {
    debug_assert!(!b.is_zero());
    let (mut q, r) = a.div_mod_floor(b);
    // r is in [0, |b|) for positive b, (b, 0] handled by floor semantics.
    let two_r = BigInt::from(2) * &r;
    if b.is_positive() {
        if two_r > *b {
            q += 1;
        }
    } else if two_r < *b {
        q += 1;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_identity() {
        let m = IntMatrix::from_rows(&[&[1, 2], &[3, 4], &[5, 6]]);
        let i3 = IntMatrix::identity(3);
        assert_eq!(i3.mul(&m).unwrap(), m);
    }

    #[test]
    fn det_small() {
        let m = IntMatrix::from_rows(&[&[2, 0], &[1, 3]]);
        assert_eq!(m.det().unwrap(), BigInt::from(6));
        let s = IntMatrix::from_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(s.det().unwrap(), BigInt::from(-1));
        let z = IntMatrix::from_rows(&[&[1, 2], &[2, 4]]);
        assert_eq!(z.det().unwrap(), BigInt::zero());
    }

    #[test]
    fn det_bareiss_exactness() {
        let m = IntMatrix::from_rows(&[&[3, 1, 4], &[1, 5, 9], &[2, 6, 5]]);
        // cofactor expansion: 3*(25-54) - 1*(5-18) + 4*(6-10) = -87 + 13 - 16 = -90
        assert_eq!(m.det().unwrap(), BigInt::from(-90));
    }

    #[test]
    fn quo_round_behaviour() {
        let q = |a: i64, b: i64| quo_round(&BigInt::from(a), &BigInt::from(b));
        assert_eq!(q(7, 3), BigInt::from(2));
        assert_eq!(q(8, 3), BigInt::from(3));
        assert_eq!(q(-7, 3), BigInt::from(-2));
        assert_eq!(q(7, -3), BigInt::from(-2));
        assert_eq!(q(3, 2), BigInt::from(1)); // tie toward floor
    }
}
