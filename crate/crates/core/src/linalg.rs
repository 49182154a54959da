//! Dense helpers for the small `d × d` matrices of the estimator (row-major).

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Inverse by Gauss–Jordan elimination with partial pivoting.
pub fn invert<T: Real>(a: &[T], d: usize) -> Result<Vec<T>> {
    assert_eq!(a.len(), d * d);
    let scale = a.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if scale == T::zero() {
        return Err(Error::Singular);
    }
    let tiny = scale * T::epsilon() * T::lit(64.0) * T::from_count(d);
    let mut m = a.to_vec();
    let mut inv = vec![T::zero(); d * d];
    for i in 0..d {
        inv[i * d + i] = T::one();
    }
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&r, &s| m[r * d + col].abs().partial_cmp(&m[s * d + col].abs()).unwrap())
            .unwrap();
        if m[pivot * d + col].abs() <= tiny {
            return Err(Error::Singular);
        }
        if pivot != col {
            for k in 0..d {
                m.swap(pivot * d + k, col * d + k);
                inv.swap(pivot * d + k, col * d + k);
            }
        }
        let p = m[col * d + col];
        for k in 0..d {
            m[col * d + k] = m[col * d + k] / p;
            inv[col * d + k] = inv[col * d + k] / p;
        }
        for r in 0..d {
            if r != col {
                let f = m[r * d + col];
                if f != T::zero() {
                    for k in 0..d {
                        m[r * d + k] = m[r * d + k] - f * m[col * d + k];
                        inv[r * d + k] = inv[r * d + k] - f * inv[col * d + k];
                    }
                }
            }
        }
    }
    Ok(inv)
}

/// Positive definiteness through an attempted Cholesky factorisation.
pub fn is_positive_definite<T: Real>(a: &[T], d: usize) -> bool {
    let trace = (0..d).map(|i| a[i * d + i]).fold(T::zero(), |s, v| s + v.abs());
    if !(trace > T::zero()) {
        return false;
    }
    let floor = trace * T::epsilon() * T::lit(16.0);
    let mut l = vec![T::zero(); d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut sum = a[i * d + j];
            for k in 0..j {
                sum = sum - l[i * d + k] * l[j * d + k];
            }
            if i == j {
                if !(sum > floor) {
                    return false;
                }
                l[i * d + i] = sum.sqrt();
            } else {
                l[i * d + j] = sum / l[j * d + j];
            }
        }
    }
    true
}

pub fn mat_vec<T: Real>(a: &[T], v: &[T]) -> Vec<T> {
    let d = v.len();
    (0..d).map(|i| (0..d).map(|k| a[i * d + k] * v[k]).sum()).collect()
}
