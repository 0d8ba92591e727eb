//! Smith normal form over the integers.
//!
//! Pivoting always takes the nonzero entry of minimal absolute value in the
//! active block, ties broken by lowest `(row, col)`, so the output
//! (including the transforms) is a deterministic function of the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::Matrix;

/// Result of [`snf`]: `left * matrix * right` is diagonal with entries `diag`.
#[derive(Clone, Debug)]
pub struct Snf {
    /// Diagonal entries `d_1 | d_2 | ...`, nonnegative, zeros last. Length is `min(rows, cols)`.
    pub diag: Vec<BigInt>,
    pub left: Matrix,
    pub left_inv: Matrix,
    pub right: Matrix,
}

impl Snf {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diag.iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Work {
    a: Matrix,
    left: Matrix,
    left_inv: Matrix,
    right: Matrix,
}

impl Work {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.left.swap_rows(i, j);
        self.left_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.right.swap_cols(i, j);
    }

    /// row[dst] += k row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.left.add_row_multiple(dst, src, k);
        self.left_inv.add_col_multiple(src, dst, &-k);
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.right.add_col_multiple(dst, src, k);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.left.negate_row(i);
        self.left_inv.negate_col(i);
    }

    fn min_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let v = &self.a[(i, j)];
                if v.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[(bi, bj)].abs() <= v.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }
}

/// Smith normal form with unimodular transforms.
pub fn snf(matrix: &Matrix) -> Snf {
    let (r, c) = (matrix.rows(), matrix.cols());
    let mut w = Work {
        a: matrix.clone(),
        left: Matrix::identity(r),
        left_inv: Matrix::identity(r),
        right: Matrix::identity(c),
    };
    let n = r.min(c);
    let mut t = 0;
    while t < n {
        let Some((pi, pj)) = w.min_pivot(t) else {
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        let mut clean = true;
        for i in t + 1..r {
            if w.a[(i, t)].is_zero() {
                continue;
            }
            let q = w.a[(i, t)].div_floor(&w.a[(t, t)]);
            w.add_row(i, t, &-q);
            if !w.a[(i, t)].is_zero() {
                clean = false;
            }
        }
        for j in t + 1..c {
            if w.a[(t, j)].is_zero() {
                continue;
            }
            let q = w.a[(t, j)].div_floor(&w.a[(t, t)]);
            w.add_col(j, t, &-q);
            if !w.a[(t, j)].is_zero() {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        let p = w.a[(t, t)].clone();
        let offender = (t + 1..r).find(|&i| (t + 1..c).any(|j| !w.a[(i, j)].is_multiple_of(&p)));
        if let Some(i) = offender {
            w.add_row(t, i, &BigInt::from(1));
            continue;
        }
        if w.a[(t, t)].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let diag = (0..n).map(|i| w.a[(i, i)].clone()).collect();
    Snf {
        diag,
        left: w.left,
        left_inv: w.left_inv,
        right: w.right,
    }
}

/// Basis of the integer kernel `{x : matrix * x = 0}`, as columns.
pub fn integer_kernel(matrix: &Matrix) -> Vec<Vec<BigInt>> {
    let s = snf(matrix);
    let rank = s.rank();
    (rank..matrix.cols()).map(|j| s.right.col(j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &Matrix) -> Snf {
        let s = snf(m);
        let prod = s.left.mul(m).mul(&s.right);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let expect = if i == j {
                    s.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(prod[(i, j)], expect, "entry ({i},{j})");
            }
        }
        assert_eq!(s.left.mul(&s.left_inv), Matrix::identity(m.rows()));
        assert_eq!(s.left.determinant().abs(), BigInt::from(1));
        assert_eq!(s.right.determinant().abs(), BigInt::from(1));
        for w in s.diag.windows(2) {
            // zeros only at the end
            assert!(!(w[0].is_zero() && !w[1].is_zero()));
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
        s
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(check(&Matrix::identity(2)).diag, ints(&[1, 1]));
        assert_eq!(check(&Matrix::zeros(2, 2)).diag, ints(&[0, 0]));
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let m = Matrix::from_i64(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(check(&m).diag, ints(&[1, 6]));
    }

    #[test]
    fn empty_matrix() {
        let s = snf(&Matrix::zeros(0, 3));
        assert!(s.diag.is_empty());
        assert_eq!(integer_kernel(&Matrix::zeros(0, 3)).len(), 3);
    }

    #[test]
    fn rectangular_examples() {
        let m = Matrix::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        assert_eq!(check(&m).diag, ints(&[2, 6, 12]));
        let m = Matrix::from_i64(&[vec![6, 4], vec![4, 6], vec![2, 2]]);
        assert_eq!(check(&m).diag, ints(&[2, 2]));
    }

    #[test]
    fn kernel_is_annihilated() {
        let m = Matrix::from_i64(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, 1, 0]]);
        let k = integer_kernel(&m);
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }
}
