//! Smith and Hermite normal forms over the integers, with unimodular transforms.
//!
//! Both reductions pivot on the entry of least absolute value, which keeps
//! intermediate coefficients small for the block sizes the tower engine feeds in.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::lattice::ElementaryDivisors;
use super::matrix::IntegerMatrix;
use crate::error::{Error, Result};

/// Result of [`snf`]: `u * m * v` is diagonal with entries `diagonal`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }

    pub fn divisors(&self) -> ElementaryDivisors {
        ElementaryDivisors::new(self.diagonal.clone())
    }
}

fn min_abs_position(a: &IntegerMatrix, rows: impl Iterator<Item = usize> + Clone, cols: impl Iterator<Item = usize> + Clone) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in rows {
        for j in cols.clone() {
            let x = &a[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().map_or(true, |(_, b)| ax < *b) {
                let one = ax.is_one();
                best = Some(((i, j), ax));
                if one {
                    return best.map(|b| b.0);
                }
            }
        }
    }
    best.map(|b| b.0)
}

/// Smith normal form with transforms: `U·M·V = diag(d_1, …)` where each `d_j`
/// divides `d_{j+1}` and trailing zeros mark rank deficiency.
pub fn snf(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let n = rows.min(cols);

    for t in 0..n {
        let Some((pi, pj)) = min_abs_position(&a, t..rows, t..cols) else {
            break;
        };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = -(&a[(i, t)] / &a[(t, t)]);
                a.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = -(&a[(t, j)] / &a[(t, t)]);
                a.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // a smaller remainder appeared in row or column t; make it the pivot
                let (ci, cj) = min_abs_position(&a, t..rows, std::iter::once(t))
                    .into_iter()
                    .chain(min_abs_position(&a, std::iter::once(t), t..cols))
                    .min_by_key(|&(i, j)| a[(i, j)].abs())
                    .expect("pivot row/column is nonzero");
                a.swap_rows(t, ci);
                u.swap_rows(t, ci);
                a.swap_cols(t, cj);
                v.swap_cols(t, cj);
                continue;
            }
            // divisibility: pivot must divide the remaining block
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&a[(t, t)])));
            match offender {
                Some(i) => {
                    a.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    let diagonal = (0..n).map(|i| a[(i, i)].clone()).collect();
    SmithForm { diagonal, u, v }
}

/// Row-style Hermite normal form: returns `(h, u)` with `u·m = h`, `u` unimodular,
/// `h` in row echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`. Zero rows are at the bottom.
pub fn row_hnf(m: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut pivots = Vec::new();
    let mut pr = 0;
    for c in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            let Some((i, _)) = min_abs_position(&h, pr..rows, std::iter::once(c)) else {
                break;
            };
            h.swap_rows(pr, i);
            u.swap_rows(pr, i);
            let mut done = true;
            for k in pr + 1..rows {
                if h[(k, c)].is_zero() {
                    continue;
                }
                let q = -(&h[(k, c)] / &h[(pr, c)]);
                h.add_row_multiple(k, pr, &q);
                u.add_row_multiple(k, pr, &q);
                if !h[(k, c)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pr, c)].is_zero() {
            continue;
        }
        if h[(pr, c)].is_negative() {
            h.negate_row(pr);
            u.negate_row(pr);
        }
        for k in 0..pr {
            let q = -h[(k, c)].div_floor(&h[(pr, c)]);
            h.add_row_multiple(k, pr, &q);
            u.add_row_multiple(k, pr, &q);
        }
        pivots.push(c);
        pr += 1;
    }
    (h, u, pivots)
}

/// Basis of the integer kernel `{x : m·x = 0}`, as columns.
pub fn kernel(m: &IntegerMatrix) -> Vec<Vec<BigInt>> {
    let (h, u, pivots) = row_hnf(&m.transpose());
    let rank = pivots.len();
    debug_assert!((rank..h.rows()).all(|i| h.row(i).iter().all(Zero::is_zero)));
    (rank..u.rows()).map(|i| u.row(i).to_vec()).collect()
}

/// Solves `m·y = b` over the integers.
pub fn solve(m: &IntegerMatrix, b: &[BigInt]) -> Result<Vec<BigInt>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!("rhs has length {}, matrix has {} rows", b.len(), m.rows())));
    }
    let s = snf(m);
    let ub = s.u.mul_vec(b);
    let mut z = vec![BigInt::zero(); m.cols()];
    for (i, x) in ub.iter().enumerate() {
        let d = s.diagonal.get(i).cloned().unwrap_or_default();
        if d.is_zero() {
            if !x.is_zero() {
                return Err(Error::NoSolution);
            }
        } else {
            let (q, r) = x.div_rem(&d);
            if !r.is_zero() {
                return Err(Error::NoSolution);
            }
            z[i] = q;
        }
    }
    Ok(s.v.mul_vec(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_snf(m: &IntegerMatrix) -> SmithForm {
        let s = snf(m);
        let prod = s.u.mul(m).mul(&s.v);
        for i in 0..prod.rows() {
            for j in 0..prod.cols() {
                let expect = if i == j { s.diagonal[i].clone() } else { BigInt::zero() };
                assert_eq!(prod[(i, j)], expect, "U M V not diagonal for {m:?}");
            }
        }
        assert!(s.u.determinant().abs().is_one());
        assert!(s.v.determinant().abs().is_one());
        for w in s.diagonal.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]) || w[0].is_zero() && w[1].is_zero());
        }
        s
    }

    #[test]
    fn snf_examples() {
        let s = check_snf(&IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(6)]);
        let s = check_snf(&IntegerMatrix::identity(4));
        assert!(s.diagonal.iter().all(One::is_one));
        let s = check_snf(&IntegerMatrix::from_i64(&[&[7]]));
        assert_eq!(s.diagonal, vec![BigInt::from(7)]);
        let s = check_snf(&IntegerMatrix::zeros(0, 0));
        assert!(s.diagonal.is_empty());
    }

    #[test]
    fn snf_rectangular_and_singular() {
        let s = check_snf(&IntegerMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        let s = check_snf(&IntegerMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]));
        assert_eq!(s.diagonal, vec![BigInt::from(1), BigInt::from(0)]);
    }

    #[test]
    fn hnf_and_kernel() {
        let m = IntegerMatrix::from_i64(&[&[2, 3, 5], &[4, 6, 10]]);
        let ker = kernel(&m);
        assert_eq!(ker.len(), 2);
        for k in &ker {
            assert!(m.mul_vec(k).iter().all(Zero::is_zero));
        }
        let (h, u, piv) = row_hnf(&IntegerMatrix::from_i64(&[&[4, 6], &[6, 9], &[2, 2]]));
        assert_eq!(u.mul(&IntegerMatrix::from_i64(&[&[4, 6], &[6, 9], &[2, 2]])), h);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(h.row(0), &[BigInt::from(2), BigInt::from(0)][..]);
        assert_eq!(h.row(1), &[BigInt::from(0), BigInt::from(1)][..]);
    }

    #[test]
    fn solve_small() {
        let m = IntegerMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        let y = solve(&m, &[BigInt::from(4), BigInt::from(9)]).unwrap();
        assert_eq!(y, vec![BigInt::from(2), BigInt::from(3)]);
        assert_eq!(solve(&m, &[BigInt::from(1), BigInt::from(0)]), Err(Error::NoSolution));
    }
}
