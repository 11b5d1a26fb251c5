//! Dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything here is small-matrix code (dimension at most a few dozen), so
//! clarity wins over blocking or allocation tricks.

use nalgebra::{Complex, DMatrix, DVector};

use crate::scalar::{lit, Real};

/// Standard symplectic form `[[0, I], [-I, 0]]` of size `2n`.
pub fn omega<T: Real>(n: usize) -> DMatrix<T> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = T::one();
        m[(n + i, i)] = -T::one();
    }
    m
}

/// Entrywise maximum absolute value.
pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

pub fn symmetrize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * lit::<T>(0.5)
}

/// Largest entrywise deviation from symmetry.
pub fn asymmetry<T: Real>(m: &DMatrix<T>) -> T {
    max_abs(&(m - m.transpose()))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted ascending
/// and eigenvectors permuted accordingly.
pub fn sym_eigen_sorted<T: Real>(m: &DMatrix<T>) -> (DVector<T>, DMatrix<T>) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn sym_eigenvalues<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    sym_eigen_sorted(m).0
}

/// Applies a scalar function to the spectrum of a symmetric matrix.
pub fn sym_apply<T: Real>(m: &DMatrix<T>, f: impl Fn(T) -> T) -> DMatrix<T> {
    let (vals, vecs) = sym_eigen_sorted(m);
    let mapped = DMatrix::from_diagonal(&vals.map(f));
    &vecs * mapped * vecs.transpose()
}

pub fn sym_exp<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    sym_apply(m, |x| x.exp())
}

/// Logarithm of a symmetric positive definite matrix.
pub fn spd_log<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    sym_apply(m, |x| x.ln())
}

/// Real power of a symmetric positive definite matrix.
pub fn spd_pow<T: Real>(m: &DMatrix<T>, p: T) -> DMatrix<T> {
    sym_apply(m, |x| x.powf(p))
}

/// Largest and smallest singular values.
pub fn singular_extremes<T: Real>(m: &DMatrix<T>) -> (T, T) {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().fold(T::zero(), |a, &b| a.max(b));
    let min = sv.iter().fold(T::max_value().unwrap(), |a, &b| a.min(b));
    (max, min)
}

pub fn min_singular_value<T: Real>(m: &DMatrix<T>) -> T {
    singular_extremes(m).1
}

/// Orthonormal basis of the column span (thin QR). The caller is responsible
/// for checking the rank beforehand.
pub fn orthonormalize<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let k = m.ncols();
    let q = m.clone().qr().q();
    q.columns(0, k).into_owned()
}

/// Polar decomposition `m = U P` with `U` orthogonal and `P` symmetric
/// positive semi-definite.
pub fn polar<T: Real>(m: &DMatrix<T>) -> Option<(DMatrix<T>, DMatrix<T>)> {
    let svd = m.clone().svd(true, true);
    let w = svd.u?;
    let vt = svd.v_t?;
    let u = &w * &vt;
    let p = vt.transpose() * DMatrix::from_diagonal(&svd.singular_values) * &vt;
    Some((u, symmetrize(&p)))
}

/// Singular values by one-sided (Hestenes) Jacobi rotations, sorted ascending.
///
/// The relative accuracy depends only on the conditioning of `m` after column
/// scaling, so matrices of the form `B * D` with `D` diagonal and wildly
/// graded keep their small singular values.
pub fn jacobi_singular_values<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    let mut a = m.clone();
    let n = a.ncols();
    let eps = T::default_epsilon();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dot(&a.column(q));
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == T::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (lit::<T>(2.0) * gamma);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..a.nrows() {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = c * ap - s * aq;
                    a[(i, q)] = s * ap + c * aq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..n).map(|j| a.column(j).norm()).collect();
    sv.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Eigenvalues of a general real matrix (via the real Schur form).
pub fn complex_spectrum<T: Real>(m: &DMatrix<T>) -> Vec<Complex<T>> {
    m.clone().complex_eigenvalues().iter().copied().collect()
}

/// Orthonormal basis of the invariant subspace belonging to the `k`
/// eigenvalues of largest modulus, by orthogonal iteration.
///
/// The iteration stops at machine precision or, for badly conditioned
/// matrices, once the step stalls below `1e-6`. Returns `None` if it does not
/// settle, which happens when the `k`-th and `k+1`-th moduli are (nearly)
/// equal.
pub fn dominant_subspace<T: Real>(m: &DMatrix<T>, k: usize) -> Option<DMatrix<T>> {
    let dim = m.nrows();
    // fixed generic start; a zero overlap with the target subspace is not
    // a concern for the structured matrices used here
    let start = DMatrix::from_fn(dim, k, |i, j| {
        lit::<T>(((i * 7 + j * 13 + 1) as f64).sin() + 0.1 * (i as f64 + 1.0) / (j as f64 + 1.0))
    });
    let mut q = orthonormalize(&start);
    let p = m / max_abs(m).max(T::one());
    let settled = lit::<T>(1e-6);
    let mut best = T::max_value().expect("bounded scalar");
    let mut stalled = 0;
    for _ in 0..20_000 {
        let next = orthonormalize(&(&p * &q));
        let dist = max_abs(&(&next - &q * (q.transpose() * &next)));
        q = next;
        if dist <= lit::<T>(64.0) * T::default_epsilon() {
            return Some(q);
        }
        if dist < best {
            best = dist;
            stalled = 0;
        } else {
            stalled += 1;
            if best <= settled && stalled >= 8 {
                return Some(q);
            }
        }
    }
    (best <= settled).then_some(q)
}

/// Complex determinant of an `n x n` complex matrix given as real and
/// imaginary parts.
pub fn complex_det<T: Real>(re: &DMatrix<T>, im: &DMatrix<T>) -> Complex<T> {
    let n = re.nrows();
    let c = DMatrix::from_fn(n, n, |i, j| Complex::new(re[(i, j)], im[(i, j)]));
    c.determinant()
}
