use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{quo_round, IntMatrix};
use super::snf::smith_with_inverse;
use crate::error::{HomalgError, Result};

/// Column Hermite normal form of `m`, zero columns dropped.
///
/// The result has strictly increasing pivot rows, positive pivots, and the
/// entries left of each pivot reduced into `[0, pivot)`; it is the canonical
/// basis of the column span, so lattice equality is matrix equality.
pub fn col_hnf(m: &IntMatrix) -> IntMatrix {
    let (h, _v, rank) = col_hnf_transform(m);
    h.submatrix(0..h.rows(), 0..rank)
}

/// Column HNF with transform: returns `(h, v, rank)` where `m * v = [h | 0]`
/// up to the returned rank, and `v` is unimodular.
pub fn col_hnf_transform(m: &IntMatrix) -> (IntMatrix, IntMatrix, usize) {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut v = IntMatrix::identity(cols);
    let mut c = 0;

    for r in 0..rows {
        if c == cols {
            break;
        }
        // Reduce row r over columns >= c until a single nonzero remains at c.
        loop {
            let mut min_col: Option<usize> = None;
            let mut min_abs: Option<BigInt> = None;
            for j in c..cols {
                if h[(r, j)].is_zero() {
                    continue;
                }
                let a = h[(r, j)].abs();
                if min_abs.as_ref().is_none_or(|b| a < *b) {
                    min_abs = Some(a);
                    min_col = Some(j);
                }
            }
            let Some(jmin) = min_col else {
                break;
            };
            h.swap_cols(c, jmin);
            v.swap_cols(c, jmin);
            let mut clean = true;
            for j in c + 1..cols {
                if h[(r, j)].is_zero() {
                    continue;
                }
                let q = quo_round(&h[(r, j)].clone(), &h[(r, c)].clone());
                let negq = -q;
                h.add_col_multiple(j, c, &negq);
                v.add_col_multiple(j, c, &negq);
                if !h[(r, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_col(c);
            v.negate_col(c);
        }
        // Canonical reduction of earlier columns in the pivot row.
        for j in 0..c {
            let q = h[(r, j)].div_mod_floor(&h[(r, c)].clone()).0;
            if !q.is_zero() {
                let negq = -q;
                h.add_col_multiple(j, c, &negq);
                v.add_col_multiple(j, c, &negq);
            }
        }
        c += 1;
    }
    (h, v, c)
}

/// Canonical basis for the kernel of `m` (an `m.cols()`-dimensional lattice).
pub fn kernel(m: &IntMatrix) -> IntMatrix {
    let (_h, v, rank) = col_hnf_transform(m);
    let ker = v.submatrix(0..v.rows(), rank..v.cols());
    col_hnf(&ker)
}

/// Solve `a * x = b` over the integers; returns `None` when no integral
/// solution exists. With independent columns (every subgroup basis) the
/// solution is unique; otherwise any one solution is returned, which is all
/// membership tests need.
pub fn solve_exact(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "solve_exact shape");
    let (h, v, rank) = col_hnf_transform(a);
    // Forward substitution along pivot rows of h.
    let mut z = vec![BigInt::zero(); rank];
    let mut residual: Vec<BigInt> = b.to_vec();
    let mut pivot_rows = Vec::with_capacity(rank);
    {
        let mut r = 0;
        for j in 0..rank {
            while r < h.rows() && h[(r, j)].is_zero() {
                r += 1;
            }
            if r == h.rows() {
                return None;
            }
            pivot_rows.push(r);
        }
    }
    for j in 0..rank {
        let pr = pivot_rows[j];
        let (q, rem) = residual[pr].div_rem(&h[(pr, j)]);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for i in 0..h.rows() {
                if !h[(i, j)].is_zero() {
                    let delta = &h[(i, j)] * &q;
                    residual[i] -= delta;
                }
            }
        }
        z[j] = q;
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return None;
    }
    // x = v[:, 0..rank] * z, padded with zero kernel coordinates.
    let mut x = vec![BigInt::zero(); a.cols()];
    for (j, zj) in z.iter().enumerate() {
        if zj.is_zero() {
            continue;
        }
        for i in 0..a.cols() {
            let delta = &v[(i, j)] * zj;
            x[i] += delta;
        }
    }
    Some(x)
}

/// A subgroup of `Z^ambient_rank`, stored by its canonical HNF basis.
///
/// Houses filtration levels, cycle groups and boundary groups.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    ambient_rank: usize,
    basis: IntMatrix,
}

impl Subgroup {
    /// Subgroup generated by the columns of `gens`.
    pub fn from_generators(ambient_rank: usize, gens: &IntMatrix) -> Result<Self> {
        if gens.rows() != ambient_rank {
            return Err(HomalgError::Shape(format!(
                "generators live in Z^{}, ambient is Z^{}",
                gens.rows(),
                ambient_rank
            )));
        }
        Ok(Subgroup {
            ambient_rank,
            basis: col_hnf(gens),
        })
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Subgroup {
            ambient_rank,
            basis: IntMatrix::zeros(ambient_rank, 0),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Subgroup {
            ambient_rank,
            basis: IntMatrix::identity(ambient_rank),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    /// Canonical HNF basis, one column per generator.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.cols() == 0
    }

    pub fn is_full(&self) -> bool {
        self.basis.is_identity()
    }

    pub fn contains_vec(&self, v: &[BigInt]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        solve_exact(&self.basis, v).is_some()
    }

    pub fn contains(&self, other: &Subgroup) -> bool {
        (0..other.basis.cols()).all(|j| self.contains_vec(&other.basis.column(j)))
    }

    pub fn sum(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check_same_ambient(other)?;
        let gens = self.basis.hstack(&other.basis)?;
        Subgroup::from_generators(self.ambient_rank, &gens)
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check_same_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Subgroup::zero(self.ambient_rank));
        }
        // Solutions of A x = -B y; the A-halves of the kernel span A ∩ B.
        let stacked = self.basis.hstack(&other.basis)?;
        let ker = kernel(&stacked);
        let xpart = ker.submatrix(0..self.basis.cols(), 0..ker.cols());
        let gens = self.basis.mul(&xpart)?;
        Subgroup::from_generators(self.ambient_rank, &gens)
    }

    /// Full preimage `{x : m x ∈ self}` of this subgroup under `m`.
    /// The result lives in `Z^{m.cols()}` and always contains `ker m`.
    pub fn preimage(&self, m: &IntMatrix) -> Result<Subgroup> {
        if m.rows() != self.ambient_rank {
            return Err(HomalgError::Shape(format!(
                "preimage through {}x{} of subgroup of Z^{}",
                m.rows(),
                m.cols(),
                self.ambient_rank
            )));
        }
        if self.is_zero() {
            return Subgroup::from_generators(m.cols(), &kernel(m));
        }
        let stacked = m.hstack(&self.basis)?;
        let ker = kernel(&stacked);
        let xpart = ker.submatrix(0..m.cols(), 0..ker.cols());
        Subgroup::from_generators(m.cols(), &xpart)
    }

    /// Image `m(Z^{m.cols()})` as a subgroup of `Z^{m.rows()}`.
    pub fn image(m: &IntMatrix) -> Subgroup {
        Subgroup {
            ambient_rank: m.rows(),
            basis: col_hnf(m),
        }
    }

    /// Image of this subgroup under `m`.
    pub fn map_forward(&self, m: &IntMatrix) -> Result<Subgroup> {
        if m.cols() != self.ambient_rank {
            return Err(HomalgError::Shape(format!(
                "map {}x{} applied to subgroup of Z^{}",
                m.rows(),
                m.cols(),
                self.ambient_rank
            )));
        }
        let gens = m.mul(&self.basis)?;
        Subgroup::from_generators(m.rows(), &gens)
    }

    /// Saturation `{x : k x ∈ self for some k ≥ 1}`; the smallest subgroup
    /// containing `self` with torsion-free quotient.
    pub fn saturate(&self) -> Subgroup {
        if self.is_zero() || self.is_full() {
            return self.clone();
        }
        let f = smith_with_inverse(&self.basis);
        let k = (0..self.basis.cols().min(self.basis.rows()))
            .take_while(|&i| !f.d[(i, i)].is_zero())
            .count();
        // x is in the saturation iff the last (n - k) adapted coordinates of
        // U x vanish.
        let tail = f.u.submatrix(k..self.ambient_rank, 0..self.ambient_rank);
        if tail.rows() == 0 {
            return Subgroup::full(self.ambient_rank);
        }
        Subgroup {
            ambient_rank: self.ambient_rank,
            basis: kernel(&tail),
        }
    }

    fn check_same_ambient(&self, other: &Subgroup) -> Result<()> {
        if self.ambient_rank != other.ambient_rank {
            return Err(HomalgError::Shape(format!(
                "subgroups of Z^{} and Z^{}",
                self.ambient_rank, other.ambient_rank
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sg(rank: usize, cols: &[&[i64]]) -> Subgroup {
        // columns given as rows of the transposed matrix for readability
        let m = IntMatrix::from_rows(cols).transpose();
        Subgroup::from_generators(rank, &m).unwrap()
    }

    #[test]
    fn sum_coprime_scalars() {
        let a = sg(2, &[&[2, 0], &[0, 2]]);
        let b = sg(2, &[&[3, 0], &[0, 3]]);
        assert!(a.sum(&b).unwrap().is_full());
    }

    #[test]
    fn intersect_is_lcm() {
        let a = sg(1, &[&[2]]);
        let b = sg(1, &[&[3]]);
        let c = a.intersect(&b).unwrap();
        assert_eq!(c.basis(), &IntMatrix::from_rows(&[&[6]]));
    }

    #[test]
    fn preimage_under_identity() {
        let s = sg(2, &[&[1, 1]]);
        let pre = s.preimage(&IntMatrix::identity(2)).unwrap();
        assert_eq!(pre, s);
    }

    #[test]
    fn preimage_contains_kernel() {
        let m = IntMatrix::from_rows(&[&[1, -1]]);
        let s = sg(1, &[&[5]]);
        let pre = s.preimage(&m).unwrap();
        assert!(pre.contains_vec(&[BigInt::from(1), BigInt::from(1)]));
        assert!(pre.contains_vec(&[BigInt::from(5), BigInt::from(0)]));
        assert!(!pre.contains_vec(&[BigInt::from(1), BigInt::from(0)]));
    }

    #[test]
    fn kernel_of_projection() {
        let m = IntMatrix::from_rows(&[&[1, 0, 0], &[0, 1, 0]]);
        let k = kernel(&m);
        assert_eq!(k, IntMatrix::from_rows(&[&[0], &[0], &[1]]));
    }

    #[test]
    fn hnf_canonical_under_regeneration() {
        let gens1 = IntMatrix::from_rows(&[&[2, 4, 6], &[1, 3, 5]]);
        let gens2 = IntMatrix::from_rows(&[&[6, 2, 4], &[5, 1, 3]]);
        let a = Subgroup::from_generators(2, &gens1).unwrap();
        let b = Subgroup::from_generators(2, &gens2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn solve_detects_nonmember() {
        let a = IntMatrix::from_rows(&[&[2], &[0]]);
        assert!(solve_exact(&a, &[BigInt::from(1), BigInt::from(0)]).is_none());
        assert!(solve_exact(&a, &[BigInt::from(4), BigInt::from(0)]).is_some());
        assert!(solve_exact(&a, &[BigInt::from(4), BigInt::from(1)]).is_none());
    }

    #[test]
    fn saturate_index_two() {
        let s = sg(2, &[&[1, 1], &[1, -1]]); // index 2 in Z^2
        assert!(s.saturate().is_full());
        let t = sg(2, &[&[2, 4]]);
        let sat = t.saturate();
        assert!(sat.contains_vec(&[BigInt::from(1), BigInt::from(2)]));
        assert_eq!(sat.rank(), 1);
    }
}
