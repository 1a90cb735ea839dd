use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::DenseMatrix;

/// Rank of a row-major integer matrix by Bareiss fraction-free elimination.
/// Every intermediate stays integral, so the result is exact.
pub fn bareiss_rank(mut a: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    assert_eq!(a.len(), rows * cols);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r * cols + col].is_zero()) else {
            continue;
        };
        if p != rank {
            for j in 0..cols {
                a.swap(p * cols + j, rank * cols + j);
            }
        }
        let pivot = a[rank * cols + col].clone();
        for r in rank + 1..rows {
            let lead = a[r * cols + col].clone();
            for j in col..cols {
                // exact by Sylvester's identity
                let v = (&pivot * &a[r * cols + j] - &lead * &a[rank * cols + j]) / &prev;
                a[r * cols + j] = v;
            }
        }
        prev = pivot;
        rank += 1;
    }
    rank
}

pub fn exact_rank_i128(a: &[i128], rows: usize, cols: usize) -> usize {
    bareiss_rank(a.iter().map(|&v| BigInt::from(v)).collect(), rows, cols)
}

impl DenseMatrix<BigInt> {
    pub fn exact_rank(&self) -> usize {
        bareiss_rank(self.as_slice().to_vec(), self.rows(), self.cols())
    }
}

impl DenseMatrix<BigRational> {
    /// Exact rank: each row is scaled by the lcm of its denominators, then
    /// eliminated fraction-free.
    pub fn exact_rank(&self) -> usize {
        let mut ints = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            let row = self.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            ints.extend(row.iter().map(|q| q.numer() * (&l / q.denom())));
        }
        bareiss_rank(ints, self.rows(), self.cols())
    }
}

impl DenseMatrix<i64> {
    pub fn exact_rank(&self) -> usize {
        bareiss_rank(self.as_slice().iter().map(|&v| BigInt::from(v)).collect(), self.rows(), self.cols())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_ranks() {
        assert_eq!(exact_rank_i128(&[0; 6], 2, 3), 0);
        assert_eq!(exact_rank_i128(&[1, 0, 0, 0], 2, 2), 1);
        assert_eq!(exact_rank_i128(&[1, 2, 2, 4], 2, 2), 1);
        assert_eq!(exact_rank_i128(&[0, 1, 1, 0], 2, 2), 2);
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let m = DenseMatrix::from_rows(2, &[vec![q(1, 2), q(1, 3)], vec![q(3, 2), q(1, 1)]]).unwrap();
        assert_eq!(m.exact_rank(), 1);
    }

    proptest! {
        #[test]
        fn product_of_rank_two_factors(b in prop::collection::vec(-9i128..=9, 10), c in prop::collection::vec(-9i128..=9, 8)) {
            // B: 5x2, C: 2x4
            let mut a = vec![0i128; 20];
            for i in 0..5 { for t in 0..2 { for j in 0..4 { a[i * 4 + j] += b[i * 2 + t] * c[t * 4 + j]; } } }
            let r = exact_rank_i128(&a, 5, 4);
            let rb = exact_rank_i128(&b, 5, 2);
            let rc = exact_rank_i128(&c, 2, 4);
            prop_assert!(r <= rb.min(rc));
            if rb == 2 && rc == 2 { prop_assert_eq!(r, 2); }
        }
    }
}
