use num_traits::Float;

use super::DenseMatrix;
use crate::error::{Error, Result};

fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn norm<T: Float>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn frobenius<T: Float>(m: &DenseMatrix<T>) -> T {
    norm(m.as_slice())
}

fn max_abs<T: Float>(a: impl IntoIterator<Item = T>) -> T {
    a.into_iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

fn cast<T: Float>(v: f64) -> T {
    T::from(v).expect("representable constant")
}

/// Orthonormal basis of the row space of `m`, one basis vector per row.
///
/// Classical Gram-Schmidt with one reorthogonalization pass. A row whose
/// residual norm is at most `tol * ‖m‖_F` is dropped. Each basis row is
/// signed so that its first entry above `tol` in magnitude is positive.
pub fn qr_orthonormal_basis<T: Float>(m: &DenseMatrix<T>, tol: T) -> DenseMatrix<T> {
    let cols = m.cols();
    let cutoff = tol * frobenius(m);
    let mut basis: Vec<Vec<T>> = Vec::new();
    for i in 0..m.rows() {
        let mut w = m.row(i).to_vec();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, &y)| *x = *x - c * y);
            }
        }
        let r = norm(&w);
        if r <= cutoff || r == T::zero() {
            continue;
        }
        w.iter_mut().for_each(|x| *x = *x / r);
        if let Some(&lead) = w.iter().find(|x| x.abs() > tol) {
            if lead < T::zero() {
                w.iter_mut().for_each(|x| *x = -*x);
            }
        }
        basis.push(w);
    }
    DenseMatrix::from_rows(cols, &basis).expect("rows share the column count")
}

pub fn numeric_rank<T: Float>(m: &DenseMatrix<T>, tol: T) -> usize {
    qr_orthonormal_basis(m, tol).rows()
}

/// `Π = QᵀQ` for a matrix `Q` with orthonormal rows.
pub fn projection_from_basis<T: Float>(q: &DenseMatrix<T>, tol: T) -> Result<DenseMatrix<T>> {
    let k = q.rows();
    let check = cast::<T>(10.0) * tol;
    for i in 0..k {
        for j in i..k {
            let target = if i == j { T::one() } else { T::zero() };
            if (dot(q.row(i), q.row(j)) - target).abs() > check {
                return Err(Error::Precondition(format!("basis rows {i} and {j} are not orthonormal")));
            }
        }
    }
    let n = q.cols();
    let mut pi = DenseMatrix::zeros(n, n);
    for r in 0..k {
        let row = q.row(r);
        for i in 0..n {
            for j in 0..n {
                let v = *pi.get(i, j) + row[i] * row[j];
                pi.set(i, j, v);
            }
        }
    }
    Ok(pi)
}

/// Reduced row echelon form of a projection, as a canonical basis of its
/// range: pivots normalized to 1, rows ordered by pivot column, entries within
/// `tol` of zero snapped to zero. Two projections onto the same subspace yield
/// the same rows up to rounding.
pub fn canonical_subspace_basis<T: Float>(pi: &DenseMatrix<T>, tol: T) -> Result<DenseMatrix<T>> {
    let n = pi.rows();
    if pi.cols() != n {
        return Err(Error::Precondition(format!("{}x{} is not square", n, pi.cols())));
    }
    let check = cast::<T>(10.0) * tol;
    let asym = max_abs((0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| *pi.get(i, j) - *pi.get(j, i)));
    if asym > check {
        return Err(Error::Precondition(format!("not symmetric (deviation {:e})", asym.to_f64().unwrap_or(f64::NAN))));
    }
    let sq = pi.matmul(pi)?;
    let idem = max_abs(sq.as_slice().iter().zip(pi.as_slice()).map(|(&a, &b)| a - b));
    if idem > check {
        return Err(Error::Precondition(format!("not idempotent (deviation {:e})", idem.to_f64().unwrap_or(f64::NAN))));
    }

    let mut a = pi.clone();
    let mut rank = 0;
    for col in 0..n {
        if rank == n {
            break;
        }
        let (p, best) =
            (rank..n)
                .map(|r| (r, a.get(r, col).abs()))
                .fold((rank, T::zero()), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            continue;
        }
        if p != rank {
            for j in 0..n {
                let t = *a.get(p, j);
                a.set(p, j, *a.get(rank, j));
                a.set(rank, j, t);
            }
        }
        let piv = *a.get(rank, col);
        a.row_mut(rank).iter_mut().for_each(|x| *x = *x / piv);
        let prow = a.row(rank).to_vec();
        for r in 0..n {
            if r == rank {
                continue;
            }
            let f = *a.get(r, col);
            if f != T::zero() {
                a.row_mut(r).iter_mut().zip(&prow).for_each(|(x, &y)| *x = *x - f * y);
            }
        }
        rank += 1;
    }
    let rows: Vec<Vec<T>> =
        (0..rank).map(|r| a.row(r).iter().map(|&x| if x.abs() <= tol { T::zero() } else { x }).collect()).collect();
    DenseMatrix::from_rows(n, &rows)
}

/// `‖UᵀSᵀSU − I‖₂` for `U` with orthonormal columns and a sketch `S` already
/// scaled by `1/sqrt(rows)`. Power iteration to relative tolerance `1e-6`.
pub fn embedding_check<T: Float>(u: &DenseMatrix<T>, s: &DenseMatrix<T>) -> Result<T> {
    let su = s.matmul(u)?;
    let k = u.cols();
    let mut g = su.transpose().matmul(&su)?;
    for i in 0..k {
        let v = *g.get(i, i) - T::one();
        g.set(i, i, v);
    }
    Ok(spectral_norm_symmetric(&g, cast(1e-6)))
}

fn spectral_norm_symmetric<T: Float>(g: &DenseMatrix<T>, rel_tol: T) -> T {
    let k = g.rows();
    if k == 0 || g.as_slice().iter().all(|x| *x == T::zero()) {
        return T::zero();
    }
    let apply = |v: &[T]| -> Vec<T> { (0..k).map(|i| dot(g.row(i), v)).collect() };
    // deterministic start with no special alignment
    let mut v: Vec<T> = (0..k).map(|i| T::one() + cast::<T>(i as f64 * 0.618_033_988_75).sin() * cast(0.5)).collect();
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x = *x / n0);
    let mut est = T::zero();
    for _ in 0..100_000 {
        // iterate with G^2 so that eigenvalues of opposite sign cannot cancel
        let w = apply(&apply(&v));
        let nw = norm(&w);
        if nw == T::zero() {
            return T::zero();
        }
        let next = nw.sqrt();
        v = w.into_iter().map(|x| x / nw).collect();
        if (next - est).abs() <= rel_tol * next {
            return next;
        }
        est = next;
    }
    est
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_TOL;

    type M = DenseMatrix<f64>;

    fn close(a: &M, b: &M, tol: f64) -> bool {
        a.rows() == b.rows()
            && a.cols() == b.cols()
            && a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn qr_examples() {
        let id = M::identity(3);
        assert!(close(&qr_orthonormal_basis(&id, DEFAULT_TOL), &id, 1e-15));
        let neg = M::from_rows(3, &[vec![-1.0, 0.0, 0.0], vec![0.0, -2.0, 0.0], vec![0.0, 0.0, 3.0]]).unwrap();
        assert!(close(&qr_orthonormal_basis(&neg, DEFAULT_TOL), &id, 1e-15));
        let q = qr_orthonormal_basis(&M::from_rows(2, &[vec![3.0, 4.0]]).unwrap(), DEFAULT_TOL);
        assert!(close(&q, &M::from_rows(2, &[vec![0.6, 0.8]]).unwrap(), 1e-15));
        let q = qr_orthonormal_basis(&M::from_rows(2, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap(), DEFAULT_TOL);
        assert!(close(&q, &M::from_rows(2, &[vec![1.0, 0.0]]).unwrap(), 0.0));
        assert_eq!(numeric_rank(&M::zeros(3, 3), DEFAULT_TOL), 0);
    }

    #[test]
    fn qr_f32() {
        let m = DenseMatrix::<f32>::from_rows(2, &[vec![3.0, 4.0], vec![6.0, 8.0]]).unwrap();
        assert_eq!(numeric_rank(&m, 1e-5), 1);
    }

    #[test]
    fn projections() {
        let e1 = M::from_rows(3, &[vec![1.0, 0.0, 0.0]]).unwrap();
        let pi = projection_from_basis(&e1, DEFAULT_TOL).unwrap();
        let mut d = M::zeros(3, 3);
        d.set(0, 0, 1.0);
        assert_eq!(pi, d);
        assert!(projection_from_basis(&M::zeros(0, 3), DEFAULT_TOL).unwrap().is_zero());
        assert_eq!(projection_from_basis(&M::identity(3), DEFAULT_TOL).unwrap(), M::identity(3));
        let bad = M::from_rows(2, &[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(projection_from_basis(&bad, DEFAULT_TOL), Err(Error::Precondition(_))));
    }

    #[test]
    fn canonical_examples() {
        let mut d = M::zeros(3, 3);
        d.set(0, 0, 1.0);
        let b = canonical_subspace_basis(&d, DEFAULT_TOL).unwrap();
        assert_eq!(b, M::from_rows(3, &[vec![1.0, 0.0, 0.0]]).unwrap());
        let half = M::from_rows(2, &[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let b = canonical_subspace_basis(&half, DEFAULT_TOL).unwrap();
        assert!(close(&b, &M::from_rows(2, &[vec![1.0, 1.0]]).unwrap(), 1e-15));
        let not_proj = M::from_rows(2, &[vec![2.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(canonical_subspace_basis(&not_proj, DEFAULT_TOL).is_err());
    }

    #[test]
    fn canonical_is_span_invariant() {
        let g1 = M::from_rows(4, &[vec![1.0, 2.0, 0.0, -1.0], vec![0.0, 1.0, 3.0, 1.0]]).unwrap();
        // same span, different generators
        let g2 =
            M::from_rows(4, &[vec![2.0, 5.0, 3.0, -1.0], vec![-1.0, 0.0, 6.0, 3.0], vec![1.0, 3.0, 3.0, 0.0]]).unwrap();
        let basis = |g: &M| {
            let q = qr_orthonormal_basis(g, DEFAULT_TOL);
            canonical_subspace_basis(&projection_from_basis(&q, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap()
        };
        let (b1, b2) = (basis(&g1), basis(&g2));
        assert_eq!(b1.rows(), 2);
        assert!(close(&b1, &b2, 1e-12));
        // RREF of span{(1,2,0,-1), (0,1,3,1)}
        let expect = M::from_rows(4, &[vec![1.0, 0.0, -6.0, -3.0], vec![0.0, 1.0, 3.0, 1.0]]).unwrap();
        assert!(close(&b1, &expect, 1e-12));
    }

    #[test]
    fn embedding_examples() {
        let u = M::from_rows(1, &[vec![1.0], vec![0.0], vec![0.0]]).unwrap();
        assert!(embedding_check(&u, &M::identity(3)).unwrap().abs() < 1e-12);
        let s = M::from_rows(3, &[vec![0.5, 0.5, 0.5], vec![0.5, -0.5, 0.5]]).unwrap();
        // ‖Sᵀ… e_1‖² = 0.5
        assert!((embedding_check(&u, &s).unwrap() - 0.5).abs() < 1e-9);
        // eigenvalues of opposite sign: diag(+0.3, -0.7) after subtracting I
        let u2 = M::from_rows(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s2 = M::from_rows(2, &[vec![1.3f64.sqrt(), 0.0], vec![0.0, 0.3f64.sqrt()]]).unwrap();
        assert!((embedding_check(&u2, &s2).unwrap() - 0.7).abs() < 1e-6);
    }
}
