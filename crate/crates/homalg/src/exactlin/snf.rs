use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{quo_round, IntMatrix};

/// Smith normal form `U * M * V = D` with `U`, `V` unimodular and `D`
/// diagonal, entries nonnegative and forming a divisibility chain.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form together with the inverse of the left transform,
/// so `u_inv` columns express the adapted basis in the original one.
pub(crate) struct SmithFormInv {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let full = smith_with_inverse(m);
    SmithForm {
        u: full.u,
        d: full.d,
        v: full.v,
    }
}

pub(crate) fn smith_with_inverse(m: &IntMatrix) -> SmithFormInv {
    let rows = m.rows();
    let cols = m.cols();
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    // Row op helpers keep U, U^{-1} synchronized: applying E on the left of D
    // multiplies U by E on the left and U^{-1} by E^{-1} on the right.
    macro_rules! row_swap {
        ($i:expr, $j:expr) => {{
            d.swap_rows($i, $j);
            u.swap_rows($i, $j);
            u_inv.swap_cols($i, $j);
        }};
    }
    macro_rules! row_add {
        ($i:expr, $j:expr, $k:expr) => {{
            // row_i += k * row_j ; inverse: col_j -= k * col_i
            d.add_row_multiple($i, $j, $k);
            u.add_row_multiple($i, $j, $k);
            let neg = -($k).clone();
            u_inv.add_col_multiple($j, $i, &neg);
        }};
    }
    macro_rules! row_neg {
        ($i:expr) => {{
            d.negate_row($i);
            u.negate_row($i);
            u_inv.negate_col($i);
        }};
    }
    macro_rules! col_swap {
        ($i:expr, $j:expr) => {{
            d.swap_cols($i, $j);
            v.swap_cols($i, $j);
        }};
    }
    macro_rules! col_add {
        ($i:expr, $j:expr, $k:expr) => {{
            d.add_col_multiple($i, $j, $k);
            v.add_col_multiple($i, $j, $k);
        }};
    }

    let mut t = 0;
    'pivot: while t < rows.min(cols) {
        loop {
            // Re-select the minimal-absolute-value nonzero entry of the
            // trailing submatrix as the pivot on every round. Reductions
            // always divide by the current global minimum and no swaps
            // happen mid-sweep, which keeps coefficient growth in check.
            let mut pivot: Option<(usize, usize)> = None;
            let mut best: Option<BigInt> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    let a = d[(i, j)].abs();
                    if best.as_ref().is_none_or(|b| a < *b) {
                        best = Some(a);
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'pivot;
            };
            row_swap!(t, pi);
            col_swap!(t, pj);

            // One reduction sweep against the pivot.
            let mut clean = true;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = quo_round(&d[(i, t)].clone(), &d[(t, t)].clone());
                let negq = -q;
                row_add!(i, t, &negq);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = quo_round(&d[(t, j)].clone(), &d[(t, t)].clone());
                let negq = -q;
                col_add!(j, t, &negq);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // a remainder strictly smaller than the pivot appeared; the
                // next round promotes it
                continue;
            }
            // Pivot must divide the whole trailing submatrix for the chain.
            let mut divisible = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !d[(i, j)].mod_floor(&d[(t, t)].clone()).is_zero() {
                        let one = BigInt::from(1);
                        row_add!(t, i, &one);
                        divisible = false;
                        break 'scan;
                    }
                }
            }
            if divisible {
                break;
            }
        }
        if d[(t, t)].is_negative() {
            row_neg!(t);
        }
        t += 1;
    }

    debug_assert_eq!(u.mul(m).unwrap().mul(&v).unwrap(), d);
    debug_assert!(u.mul(&u_inv).unwrap().is_identity());
    SmithFormInv { u, u_inv, d, v }
}
