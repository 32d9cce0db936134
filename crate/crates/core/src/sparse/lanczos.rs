//! Extreme Ritz values of a symmetric operator.

use crate::Scalar;

/// Runs `steps` Lanczos iterations with full reorthogonalization and returns the smallest
/// and largest Ritz values.
pub fn ritz_extremes<T, F>(apply: F, start: &[T], steps: usize) -> (T, T)
where
    T: Scalar,
    F: Fn(&[T]) -> Vec<T>,
{
    let n = start.len();
    let mut q = start.to_vec();
    let nq = crate::scalar::norm2(&q);
    assert!(nq > T::zero(), "Lanczos start vector must be nonzero");
    q.iter_mut().for_each(|v| *v = *v / nq);
    let mut basis: Vec<Vec<T>> = vec![q];
    let mut alpha = Vec::new();
    let mut beta: Vec<T> = Vec::new();
    for k in 0..steps.min(n) {
        let mut w = apply(&basis[k]);
        let a = crate::scalar::dot(&w, &basis[k]);
        alpha.push(a);
        for _ in 0..2 {
            for v in &basis {
                let c = crate::scalar::dot(&w, v);
                crate::scalar::axpy(-c, v, &mut w);
            }
        }
        let b = crate::scalar::norm2(&w);
        if k + 1 == steps.min(n) || b <= T::lit(1e-12) * a.abs().max(T::one()) {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|v| *v = *v / b);
        basis.push(w);
    }
    tridiagonal_extremes(&alpha, &beta)
}

/// Smallest and largest eigenvalues of a symmetric tridiagonal matrix by Sturm bisection.
pub fn tridiagonal_extremes<T: Scalar>(alpha: &[T], beta: &[T]) -> (T, T) {
    let m = alpha.len();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..m {
        let r = (if i > 0 { beta[i - 1].abs() } else { T::zero() })
            + (if i < beta.len() { beta[i].abs() } else { T::zero() });
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    let count_below = |x: T| {
        let mut c = 0;
        let mut d = T::one();
        for i in 0..m {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { T::zero() };
            d = alpha[i] - x - if i > 0 { b2 / d } else { T::zero() };
            if d == T::zero() {
                d = T::epsilon() * (x.abs() + T::one());
            }
            if d < T::zero() {
                c += 1;
            }
        }
        c
    };
    let bisect = |target: usize| {
        let (mut a, mut b) = (lo, hi);
        for _ in 0..200 {
            let mid = (a + b) * T::lit(0.5);
            if mid <= a || mid >= b {
                break;
            }
            if count_below(mid) > target {
                b = mid;
            } else {
                a = mid;
            }
        }
        (a + b) * T::lit(0.5)
    };
    (bisect(0), bisect(m - 1))
}
