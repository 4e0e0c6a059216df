//! Dense symmetric eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! algorithm, after the EISPACK routines `tred2` and `tql2`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    n: usize,
    values: Vec<T>,
    /// Row-major `n × n`; column `j` is the eigenvector of `values[j]`.
    vectors: Vec<T>,
}

impl<T: Scalar> SymmetricEigen<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Component `row` of eigenvector `j`.
    #[inline]
    pub fn vector(&self, j: usize, row: usize) -> T {
        self.vectors[row * self.n + j]
    }

    pub fn vector_column(&self, j: usize) -> Vec<T> {
        (0..self.n).map(|r| self.vector(j, r)).collect()
    }
}

const MAX_QL_ITERATIONS: usize = 64;

/// Decomposes the symmetric row-major `n × n` matrix `a`. Only the lower
/// triangle is read.
///
/// Eigenvectors are unit length, with their largest-magnitude component
/// made positive so the output is reproducible.
pub fn symmetric_eigen<T: Scalar>(n: usize, a: &[T]) -> Result<SymmetricEigen<T>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "expected {} entries for a {n}x{n} matrix, got {}",
            n * n,
            a.len()
        )));
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            n,
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(
            "matrix has non-finite entries".into(),
        ));
    }
    let mut v = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..=i {
            v[i * n + j] = a[i * n + j];
            v[j * n + i] = a[i * n + j];
        }
    }
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(n, &mut v, &mut d, &mut e);
    ql_implicit(n, &mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).expect("finite eigenvalues"));
    let values = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (dst, &src) in order.iter().enumerate() {
        let mut pivot = 0;
        for r in 0..n {
            if v[r * n + src].abs() > v[pivot * n + src].abs() {
                pivot = r;
            }
        }
        let sign = if v[pivot * n + src] < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        for r in 0..n {
            vectors[r * n + dst] = sign * v[r * n + src];
        }
    }
    Ok(SymmetricEigen { n, values, vectors })
}

fn tridiagonalize<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) {
    let at = |r: usize, c: usize| r * n + c;
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = T::zero();
                v[at(j, i)] = T::zero();
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[at(j, i)] = f;
                g = e[j] + v[at(j, j)] * f;
                for k in j + 1..i {
                    g += v[at(k, j)] * d[k];
                    e[k] += v[at(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[at(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[at(i - 1, j)];
                v[at(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    // accumulate transformations
    for i in 0..n - 1 {
        v[at(n - 1, i)] = v[at(i, i)];
        v[at(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[at(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[at(k, i + 1)] * v[at(k, j)];
                }
                for k in 0..=i {
                    v[at(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[at(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[at(n - 1, j)];
        v[at(n - 1, j)] = T::zero();
    }
    v[at(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

fn ql_implicit<T: Scalar>(n: usize, v: &mut [T], d: &mut [T], e: &mut [T]) -> Result<()> {
    let at = |r: usize, c: usize| r * n + c;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let two = T::lit(2.0);
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iterations = 0;
            loop {
                iterations += 1;
                if iterations > MAX_QL_ITERATIONS {
                    return Err(Error::InvalidParameter(
                        "eigenvalue iteration did not converge".into(),
                    ));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[at(k, i + 1)];
                        v[at(k, i + 1)] = s * v[at(k, i)] + c * h;
                        v[at(k, i)] = c * v[at(k, i)] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn residual(n: usize, a: &[f64], eig: &SymmetricEigen<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for r in 0..n {
                let av: f64 = (0..n).map(|c| a[r * n + c] * eig.vector(j, c)).sum();
                worst = worst.max((av - eig.values()[j] * eig.vector(j, r)).abs());
            }
        }
        worst
    }

    #[test]
    fn diagonal_matrix() {
        let a = [3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0];
        let eig = symmetric_eigen(3, &a).unwrap();
        assert_eq!(eig.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(eig.vector_column(0), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn two_by_two() {
        let eig = symmetric_eigen(2, &[2.0f64, 1.0, 1.0, 2.0]).unwrap();
        assert!((eig.values()[0] - 1.0).abs() < 1e-14);
        assert!((eig.values()[1] - 3.0).abs() < 1e-14);
        let s = 0.5f64.sqrt();
        assert!((eig.vector(1, 0) - s).abs() < 1e-14);
        assert!((eig.vector(1, 1) - s).abs() < 1e-14);
    }

    #[test]
    fn random_matrices_have_small_residuals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1usize, 2, 5, 17, 40] {
            let mut a = vec![0.0f64; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let x = rng.random_range(-1.0..1.0);
                    a[i * n + j] = x;
                    a[j * n + i] = x;
                }
            }
            let eig = symmetric_eigen(n, &a).unwrap();
            assert!(residual(n, &a, &eig) < 1e-10);
            assert!(eig.values().windows(2).all(|w| w[0] <= w[1]));
            // orthonormal columns
            for p in 0..n {
                for q in 0..n {
                    let dot: f64 = (0..n).map(|r| eig.vector(p, r) * eig.vector(q, r)).sum();
                    let expect = if p == q { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn repeated_eigenvalues() {
        // block diagonal with two identical all-ones blocks
        let n = 4;
        let mut a = vec![0.0f64; n * n];
        for (i, j) in [
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
            (2, 2),
            (2, 3),
            (3, 2),
            (3, 3),
        ] {
            a[i * n + j] = 1.0;
        }
        let eig = symmetric_eigen(n, &a).unwrap();
        assert!(residual(n, &a, &eig) < 1e-12);
        assert!((eig.values()[3] - 2.0).abs() < 1e-12);
        assert!((eig.values()[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn f32_works() {
        let eig = symmetric_eigen(2, &[2.0f32, 1.0, 1.0, 2.0]).unwrap();
        assert!((eig.values()[1] - 3.0).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(symmetric_eigen(2, &[1.0f64, 2.0, 3.0]).is_err());
        assert!(symmetric_eigen(1, &[f64::NAN]).is_err());
    }
}
